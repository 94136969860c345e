#include "attractors/featurize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>
#include <unordered_map>

namespace attractors {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Exact radius queries. Bucketed on a uniform grid of cell size `radius` for
// up to four dimensions, brute force above that.
class NeighborIndex {
public:
    NeighborIndex(const FeatureMatrix& pts, double radius)
        : pts_(pts), radius_(radius), r2_(radius * radius),
          dims_(static_cast<int>(pts.cols())) {
        const double extent = pts.size() ? pts.cwiseAbs().maxCoeff() : 0.0;
        use_grid_ = dims_ <= 4 && extent / radius < 1e12;
        if (!use_grid_)
            return;
        for (Eigen::Index i = 0; i < pts.rows(); ++i)
            buckets_[key_of(i)].push_back(i);
    }

    template <typename Fn>
    void for_each_neighbor(Eigen::Index i, Fn&& fn) const {
        if (!use_grid_) {
            for (Eigen::Index j = 0; j < pts_.rows(); ++j)
                if ((pts_.row(j) - pts_.row(i)).squaredNorm() <= r2_)
                    fn(j);
            return;
        }
        const Key base = key_of(i);
        int combos = 1;
        for (int k = 0; k < dims_; ++k)
            combos *= 3;
        for (int c = 0; c < combos; ++c) {
            Key key = base;
            int rest = c;
            for (int k = 0; k < dims_; ++k) {
                key[static_cast<std::size_t>(k)] += rest % 3 - 1;
                rest /= 3;
            }
            auto it = buckets_.find(key);
            if (it == buckets_.end())
                continue;
            for (Eigen::Index j : it->second)
                if ((pts_.row(j) - pts_.row(i)).squaredNorm() <= r2_)
                    fn(j);
        }
    }

private:
    using Key = std::array<std::int64_t, 4>;
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept {
            std::uint64_t h = 0x84222325cbf29ce4ULL;
            for (auto v : k) {
                h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL +
                     (h << 6) + (h >> 2);
            }
            return static_cast<std::size_t>(h);
        }
    };

    Key key_of(Eigen::Index i) const {
        Key k{0, 0, 0, 0};
        for (int d = 0; d < dims_; ++d)
            k[static_cast<std::size_t>(d)] =
                static_cast<std::int64_t>(std::floor(pts_(i, d) / radius_));
        return k;
    }

    const FeatureMatrix& pts_;
    double radius_;
    double r2_;
    int dims_;
    bool use_grid_ = false;
    std::unordered_map<Key, std::vector<Eigen::Index>, KeyHash> buckets_;
};

int cluster_count(const GroupLabels& labels) {
    int g = 0;
    for (int l : labels)
        g = std::max(g, l);
    return g;
}

std::vector<Eigen::Index> subsample_rows(Eigen::Index n, Eigen::Index cap) {
    std::vector<Eigen::Index> rows;
    if (n <= cap) {
        rows.resize(static_cast<std::size_t>(n));
        std::iota(rows.begin(), rows.end(), Eigen::Index{0});
        return rows;
    }
    for (Eigen::Index i = 0; i < cap; ++i)
        rows.push_back(i * n / cap);
    return rows;
}

} // namespace

FeatureMatrix rescale_features(const FeatureMatrix& features) {
    if (features.rows() < 1)
        throw InputError("rescaling needs at least one feature vector");
    if (!features.allFinite())
        throw InputError("features must be finite");
    FeatureMatrix out(features.rows(), features.cols());
    for (Eigen::Index k = 0; k < features.cols(); ++k) {
        const double lo = features.col(k).minCoeff();
        const double hi = features.col(k).maxCoeff();
        const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
        if (hi - lo <= 1e-9 * scale)
            out.col(k).setZero();
        else
            out.col(k) = (features.col(k).array() - lo) / (hi - lo);
    }
    return out;
}

GroupLabels dbscan(const FeatureMatrix& points, double radius, int min_pts) {
    if (!(radius > 0.0))
        throw ConfigError("DBSCAN radius must be positive");
    if (min_pts < 1)
        throw ConfigError("DBSCAN minPts must be >= 1");
    const Eigen::Index n = points.rows();
    const NeighborIndex index(points, radius);

    std::vector<bool> core(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
        int count = 0;
        index.for_each_neighbor(i, [&](Eigen::Index) { ++count; });
        core[static_cast<std::size_t>(i)] = count >= min_pts;
    }

    GroupLabels labels(static_cast<std::size_t>(n), -1);
    int cluster = 0;
    std::vector<Eigen::Index> stack;
    for (Eigen::Index seed = 0; seed < n; ++seed) {
        const auto s = static_cast<std::size_t>(seed);
        if (!core[s] || labels[s] != -1)
            continue;
        ++cluster;
        labels[s] = cluster;
        stack.assign(1, seed);
        while (!stack.empty()) {
            const Eigen::Index i = stack.back();
            stack.pop_back();
            index.for_each_neighbor(i, [&](Eigen::Index j) {
                const auto u = static_cast<std::size_t>(j);
                if (core[u] && labels[u] == -1) {
                    labels[u] = cluster;
                    stack.push_back(j);
                }
            });
        }
    }

    for (Eigen::Index i = 0; i < n; ++i) {
        const auto s = static_cast<std::size_t>(i);
        if (core[s])
            continue;
        Eigen::Index best = n;
        index.for_each_neighbor(i, [&](Eigen::Index j) {
            if (core[static_cast<std::size_t>(j)] && j < best)
                best = j;
        });
        if (best < n)
            labels[s] = labels[static_cast<std::size_t>(best)];
    }
    return labels;
}

std::vector<double> silhouettes(const FeatureMatrix& points,
                                const GroupLabels& labels) {
    if (labels.size() != static_cast<std::size_t>(points.rows()))
        throw InputError("one label per point required");
    const int groups = cluster_count(labels);
    std::vector<std::size_t> sizes(static_cast<std::size_t>(groups) + 1, 0);
    for (int l : labels)
        if (l > 0)
            ++sizes[static_cast<std::size_t>(l)];
    int populated = 0;
    for (int g = 1; g <= groups; ++g)
        populated += sizes[static_cast<std::size_t>(g)] > 0;
    if (populated < 2)
        throw InputError("silhouettes need at least two clusters");

    const Eigen::Index n = points.rows();
    std::vector<double> out(static_cast<std::size_t>(n), kNaN);
    std::vector<double> sums(static_cast<std::size_t>(groups) + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int li = labels[static_cast<std::size_t>(i)];
        if (li <= 0)
            continue;
        if (sizes[static_cast<std::size_t>(li)] == 1) {
            out[static_cast<std::size_t>(i)] = 0.0;
            continue;
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            const int lj = labels[static_cast<std::size_t>(j)];
            if (lj <= 0 || j == i)
                continue;
            sums[static_cast<std::size_t>(lj)] += (points.row(i) - points.row(j)).norm();
        }
        const double a = sums[static_cast<std::size_t>(li)] /
                         static_cast<double>(sizes[static_cast<std::size_t>(li)] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int g = 1; g <= groups; ++g) {
            const auto gs = static_cast<std::size_t>(g);
            if (g == li || sizes[gs] == 0)
                continue;
            b = std::min(b, sums[gs] / static_cast<double>(sizes[gs]));
        }
        const double m = std::max(a, b);
        out[static_cast<std::size_t>(i)] = m > 0.0 ? (b - a) / m : 0.0;
    }
    return out;
}

double clustering_score(const FeatureMatrix& points, const GroupLabels& labels) {
    std::vector<bool> seen;
    int populated = 0;
    for (int l : labels) {
        if (l <= 0)
            continue;
        if (static_cast<std::size_t>(l) >= seen.size())
            seen.resize(static_cast<std::size_t>(l) + 1, false);
        if (!seen[static_cast<std::size_t>(l)]) {
            seen[static_cast<std::size_t>(l)] = true;
            ++populated;
        }
    }
    if (populated < 2)
        return -1.0;
    const auto s = silhouettes(points, labels);
    double total = 0.0;
    for (double v : s)
        if (!std::isnan(v))
            total += v;
    return total / static_cast<double>(points.rows());
}

double optimal_radius(const FeatureMatrix& features, int min_pts) {
    if (min_pts < 1)
        throw ConfigError("minPts must be >= 1");
    if (features.rows() < min_pts + 1)
        throw InputError("radius search needs at least minPts + 1 points");

    const auto rows = subsample_rows(features.rows(), 1000);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = a + 1; b < rows.size(); ++b) {
            const double d = (features.row(rows[a]) - features.row(rows[b])).norm();
            if (d > 0.0)
                lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    if (!(hi > 0.0))
        throw InputError("radius search on identical features is undefined");
    // Separations below this are rounding noise; splitting on them would
    // score perfect silhouettes for meaningless clusters.
    lo = std::max(lo, 1e-9 * hi);

    double best_radius = hi;
    double best_score = -std::numeric_limits<double>::infinity();
    auto score_at = [&](double log_r) {
        const double r = std::exp(log_r);
        const double s = clustering_score(features, dbscan(features, r, min_pts));
        if (s > best_score) {
            best_score = s;
            best_radius = r;
        }
        return s;
    };

    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    constexpr int scan = 12;
    std::vector<double> grid(scan);
    int best_slot = 0;
    double best_scan = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < scan; ++i) {
        grid[static_cast<std::size_t>(i)] = llo + (lhi - llo) * i / (scan - 1);
        const double s = score_at(grid[static_cast<std::size_t>(i)]);
        if (s > best_scan) {
            best_scan = s;
            best_slot = i;
        }
    }

    double a = grid[static_cast<std::size_t>(std::max(best_slot - 1, 0))];
    double b = grid[static_cast<std::size_t>(std::min(best_slot + 1, scan - 1))];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = score_at(c);
    double fd = score_at(d);
    for (int it = 0; it < 20; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = score_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = score_at(d);
        }
    }
    return best_radius;
}

GroupLabels group_by_histogram(const FeatureMatrix& features,
                               const std::vector<std::vector<double>>& edges) {
    if (edges.size() != static_cast<std::size_t>(features.cols()))
        throw ConfigError("histogram needs one edge list per feature dimension");
    for (const auto& e : edges) {
        if (e.size() < 2)
            throw ConfigError("histogram edges need at least two values");
        for (std::size_t j = 1; j < e.size(); ++j)
            if (!(e[j] > e[j - 1]))
                throw ConfigError("histogram edges must be strictly increasing");
    }

    const Eigen::Index n = features.rows();
    std::vector<std::vector<std::size_t>> bins(static_cast<std::size_t>(n));
    std::map<std::vector<std::size_t>, int> occupied;
    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<std::size_t> bin;
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const auto& e = edges[k];
            const double x = features(i, static_cast<Eigen::Index>(k));
            if (!(x >= e.front()) || !(x <= e.back())) {
                bin.clear();
                break;
            }
            auto it = std::upper_bound(e.begin(), e.end(), x);
            auto j = static_cast<std::size_t>(it - e.begin()) - 1;
            if (j == e.size() - 1)
                j = e.size() - 2;
            bin.push_back(j);
        }
        if (!bin.empty())
            occupied.emplace(bin, 0);
        bins[static_cast<std::size_t>(i)] = std::move(bin);
    }
    int next = 0;
    for (auto& [bin, label] : occupied)
        label = ++next;

    GroupLabels labels(static_cast<std::size_t>(n), -1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& bin = bins[static_cast<std::size_t>(i)];
        if (!bin.empty())
            labels[static_cast<std::size_t>(i)] = occupied.at(bin);
    }
    return labels;
}

GroupLabels group_by_nearest_template(const FeatureMatrix& features,
                                      const std::map<int, Vector>& templates,
                                      double max_distance) {
    if (templates.empty())
        throw ConfigError("nearest-template grouping needs templates");
    for (const auto& [label, t] : templates)
        if (t.size() != features.cols())
            throw ConfigError("template " + std::to_string(label) +
                              " has the wrong feature dimension");
    GroupLabels labels(static_cast<std::size_t>(features.rows()), -1);
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_label = -1;
        for (const auto& [label, t] : templates) {
            const double d = (features.row(i).transpose() - t).norm();
            if (d < best) {
                best = d;
                best_label = label;
            }
        }
        if (best <= max_distance)
            labels[static_cast<std::size_t>(i)] = best_label;
    }
    return labels;
}

void validate(const GroupingConfig& config) {
    if (const auto* c = std::get_if<Clustering>(&config)) {
        if (c->min_pts < 1)
            throw ConfigError("clustering minPts must be >= 1");
        if (c->radius && !(*c->radius > 0.0))
            throw ConfigError("clustering radius must be positive");
    } else if (const auto* h = std::get_if<Histogram>(&config)) {
        for (const auto& e : h->edges) {
            if (e.size() < 2)
                throw ConfigError("histogram edges need at least two values");
            for (std::size_t j = 1; j < e.size(); ++j)
                if (!(e[j] > e[j - 1]))
                    throw ConfigError("histogram edges must be strictly increasing");
        }
    } else if (const auto* t = std::get_if<NearestTemplate>(&config)) {
        if (t->templates.empty())
            throw ConfigError("nearest-template grouping needs templates");
        if (!(t->max_distance > 0.0))
            throw ConfigError("template max distance must be positive");
    }
}

GroupLabels group_features(const FeatureMatrix& features,
                           const GroupingConfig& config) {
    validate(config);
    if (features.rows() == 0)
        return {};
    if (const auto* c = std::get_if<Clustering>(&config)) {
        const FeatureMatrix scaled = rescale_features(features);
        const bool identical =
            (scaled.rowwise() - scaled.row(0)).cwiseAbs().maxCoeff() == 0.0;
        if (identical) {
            // A single point cloud with no spread is one group.
            return GroupLabels(static_cast<std::size_t>(features.rows()), 1);
        }
        double radius = 0.0;
        if (c->radius)
            radius = *c->radius;
        else if (scaled.rows() < c->min_pts + 1)
            throw InputError("too few feature vectors for the radius search");
        else
            radius = optimal_radius(scaled, c->min_pts);
        return dbscan(scaled, radius, c->min_pts);
    }
    if (const auto* h = std::get_if<Histogram>(&config))
        return group_by_histogram(features, h->edges);
    const auto& t = std::get<NearestTemplate>(config);
    return group_by_nearest_template(features, t.templates, t.max_distance);
}

FeatureBatch integrate_features(const DynamicalSystem& system,
                                const IcSampler& sampler, std::uint64_t first,
                                std::size_t n, const Featurizer& featurizer,
                                const IntegrationParams& integration,
                                std::size_t workers) {
    if (!featurizer)
        throw ConfigError("featurize route needs a featurizer");
    const auto dim = system.dimension();
    std::vector<Vector> feats(n);
    std::vector<Vector> finals(n);
    std::vector<char> diverged(n, 0);

    auto work = [&](std::size_t begin, std::size_t end) {
        const DynamicalSystem local = system;
        for (std::size_t i = begin; i < end; ++i) {
            try {
                const Trajectory tr =
                    trajectory(local, sampler(first + i), integration.total,
                               integration.transient, integration.dt,
                               integration.sample_dt);
                Vector f = featurizer(tr);
                if (!f.allFinite()) {
                    diverged[i] = 1;
                    continue;
                }
                feats[i] = std::move(f);
                finals[i] = tr.states.row(tr.size() - 1).transpose();
            } catch (const DivergenceError&) {
                diverged[i] = 1;
            }
        }
    };

    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    if (workers == 1) {
        work(0, n);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(work, w * n / workers, (w + 1) * n / workers);
    }

    Eigen::Index k = -1;
    for (std::size_t i = 0; i < n; ++i) {
        if (diverged[i])
            continue;
        if (k < 0)
            k = feats[i].size();
        else if (feats[i].size() != k)
            throw InputError("featurizer returned vectors of different lengths");
    }
    FeatureBatch out;
    out.features = FeatureMatrix::Constant(static_cast<Eigen::Index>(n),
                                           std::max<Eigen::Index>(k, 0), kNaN);
    out.final_states = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), dim, kNaN);
    out.diverged.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        if (diverged[i]) {
            out.diverged[i] = true;
            continue;
        }
        out.features.row(r) = feats[i].transpose();
        out.final_states.row(r) = finals[i].transpose();
    }
    return out;
}

GroupLabels group_batch(const FeatureBatch& batch, const GroupingConfig& config) {
    const auto n = static_cast<Eigen::Index>(batch.diverged.size());
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < n; ++i)
        if (!batch.diverged[static_cast<std::size_t>(i)])
            kept.push_back(i);
    GroupLabels labels(static_cast<std::size_t>(n), kDiverged);
    if (kept.empty())
        return labels;
    FeatureMatrix live(static_cast<Eigen::Index>(kept.size()), batch.features.cols());
    for (std::size_t r = 0; r < kept.size(); ++r)
        live.row(static_cast<Eigen::Index>(r)) = batch.features.row(kept[r]);
    const GroupLabels grouped = group_features(live, config);
    for (std::size_t r = 0; r < kept.size(); ++r)
        labels[static_cast<std::size_t>(kept[r])] = grouped[r];
    return labels;
}

AttractorMap group_representatives(const GroupLabels& labels,
                                   const Eigen::MatrixXd& final_states) {
    std::map<int, std::vector<Eigen::Index>> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] > 0)
            members[labels[i]].push_back(static_cast<Eigen::Index>(i));
    AttractorMap out;
    for (const auto& [label, rows] : members) {
        Attractor a;
        a.label = label;
        a.points.resize(static_cast<Eigen::Index>(rows.size()), final_states.cols());
        for (std::size_t r = 0; r < rows.size(); ++r)
            a.points.row(static_cast<Eigen::Index>(r)) = final_states.row(rows[r]);
        out.emplace(label, std::move(a));
    }
    return out;
}

FeaturizeResult featurize_fractions(const DynamicalSystem& system,
                                    const IcSampler& sampler, std::size_t n,
                                    const Featurizer& featurizer,
                                    const GroupingConfig& grouping,
                                    const IntegrationParams& integration,
                                    std::size_t workers) {
    if (n < 1)
        throw ConfigError("featurize fractions need at least one sample");
    validate(grouping);
    const FeatureBatch batch =
        integrate_features(system, sampler, 0, n, featurizer, integration, workers);
    FeaturizeResult out;
    out.labels = group_batch(batch, grouping);
    out.fractions = fractions_from_labels(out.labels);
    out.features = batch.features;
    out.attractors = group_representatives(out.labels, batch.final_states);
    return out;
}

} // namespace attractors
