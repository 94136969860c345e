#include "attractors/continuation.hpp"

#include <algorithm>
#include <thread>
#include <unordered_set>

namespace attractors {

namespace {

MappingDiagnostics difference(const MappingDiagnostics& after,
                              const MappingDiagnostics& before) {
    MappingDiagnostics d;
    d.found = after.found - before.found;
    d.converged = after.converged - before.converged;
    d.diverged = after.diverged - before.diverged;
    d.exhausted = after.exhausted - before.exhausted;
    d.steps = after.steps - before.steps;
    return d;
}

// 1 - |A n B| / min(|A|, |B|) over covered cells: 0 for nested sets, 1 for
// disjoint ones.
double cell_overlap_distance(const Attractor& a, const Attractor& b) {
    if (a.cells.empty() || b.cells.empty())
        return 1.0;
    const auto& small = a.cells.size() <= b.cells.size() ? a : b;
    const auto& large = a.cells.size() <= b.cells.size() ? b : a;
    std::unordered_set<CellIndex, CellIndexHash> lookup(large.cells.begin(),
                                                        large.cells.end());
    std::size_t shared = 0;
    for (const auto& c : small.cells)
        shared += lookup.count(c);
    return 1.0 - static_cast<double>(shared) / static_cast<double>(small.cells.size());
}

Attractor pool_points(int label, const std::vector<const Attractor*>& parts) {
    Attractor out;
    out.label = label;
    Eigen::Index rows = 0;
    for (const auto* p : parts)
        rows += p->points.rows();
    out.points.resize(rows, parts.front()->points.cols());
    Eigen::Index r = 0;
    for (const auto* p : parts) {
        out.points.middleRows(r, p->points.rows()) = p->points;
        r += p->points.rows();
        out.cells.insert(out.cells.end(), p->cells.begin(), p->cells.end());
    }
    return out;
}

ContinuationResult aggregate_with(
    const ContinuationResult& result,
    const std::function<int(std::size_t, const Attractor&)>& key) {
    ContinuationResult out;
    out.parameter_indices = result.parameter_indices;
    out.parameters = result.parameters;
    out.diagnostics = result.diagnostics;
    for (std::size_t s = 0; s < result.size(); ++s) {
        const auto& atts = result.attractors[s];
        std::map<int, int> keys;
        std::map<int, std::vector<const Attractor*>> groups;
        for (const auto& [label, att] : atts) {
            const int k = key(s, att);
            keys[label] = k;
            groups[k].push_back(&att);
        }
        BasinFractions fr;
        for (const auto& [label, f] : result.fractions[s]) {
            auto it = keys.find(label);
            fr[it == keys.end() ? label : it->second] += f;
        }
        AttractorMap grouped;
        for (const auto& [k, parts] : groups)
            grouped.emplace(k, pool_points(k, parts));
        out.fractions.push_back(std::move(fr));
        out.attractors.push_back(std::move(grouped));
    }
    return out;
}

} // namespace

ParameterPath ParameterPath::scalar(std::size_t index, const std::vector<double>& values) {
    ParameterPath p;
    p.indices = {index};
    for (double v : values)
        p.points.push_back(Vector::Constant(1, v));
    return p;
}

void ParameterPath::apply(DynamicalSystem& system, std::size_t step) const {
    const Vector& values = points.at(step);
    for (std::size_t k = 0; k < indices.size(); ++k)
        system.set_parameter(indices[k], values[static_cast<Eigen::Index>(k)]);
}

void ParameterPath::validate(const DynamicalSystem& system) const {
    if (points.empty())
        throw ConfigError("parameter range must not be empty");
    if (indices.empty())
        throw ConfigError("parameter path needs at least one parameter index");
    for (auto idx : indices)
        (void)system.parameter(idx);
    for (const auto& p : points)
        if (p.size() != static_cast<Eigen::Index>(indices.size()) || !p.allFinite())
            throw ConfigError("every parameter point needs one finite value per index");
}

std::set<int> ContinuationResult::labels() const {
    std::set<int> out;
    for (const auto& atts : attractors)
        for (const auto& [label, att] : atts)
            out.insert(label);
    for (const auto& fr : fractions)
        for (const auto& [label, f] : fr)
            if (label > 0)
                out.insert(label);
    return out;
}

BasinsResult parallel_basins_fractions(RecurrenceMapper& mapper,
                                       const IcSampler& sampler, std::size_t n,
                                       std::uint64_t first, std::size_t workers,
                                       MappingDiagnostics* diagnostics) {
    if (n < 1)
        throw ConfigError("basins fractions need at least one sample");
    workers = std::clamp<std::size_t>(workers, 1, n);
    if (workers == 1) {
        const MappingDiagnostics before = mapper.diagnostics();
        BasinsResult r = basins_fractions(mapper, sampler, n, first);
        if (diagnostics)
            *diagnostics += difference(mapper.diagnostics(), before);
        return r;
    }

    std::vector<RecurrenceMapper> copies(workers, mapper);
    std::vector<int> labels(n, kDiverged);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                const std::size_t begin = w * n / workers;
                const std::size_t end = (w + 1) * n / workers;
                for (std::size_t i = begin; i < end; ++i)
                    labels[i] = copies[w].map(sampler(first + i));
            });
    }

    MatchConfig overlap{CustomDistance{cell_overlap_distance, "cell-overlap"}, 1.0};
    AttractorMap merged = mapper.attractors();
    std::set<int> original;
    for (const auto& [label, att] : merged)
        original.insert(label);

    BasinsResult out;
    out.labels.reserve(n);
    for (std::size_t w = 0; w < workers; ++w) {
        AttractorMap fresh;
        for (const auto& [label, att] : copies[w].attractors())
            if (!original.count(label))
                fresh.emplace(label, att);
        std::set<int> reserved;
        for (const auto& [label, att] : merged)
            reserved.insert(label);
        const auto mapping = match_ids(fresh, merged, overlap, reserved);
        for (const auto& [from, to] : mapping)
            if (!merged.count(to)) {
                Attractor a = fresh.at(from);
                a.label = to;
                merged.emplace(to, std::move(a));
            }
        const std::size_t begin = w * n / workers;
        const std::size_t end = (w + 1) * n / workers;
        for (std::size_t i = begin; i < end; ++i) {
            auto it = mapping.find(labels[i]);
            out.labels.push_back(it == mapping.end() ? labels[i] : it->second);
        }
        if (diagnostics)
            *diagnostics += difference(copies[w].diagnostics(), mapper.diagnostics());
    }
    out.fractions = fractions_from_labels(out.labels);
    out.attractors = std::move(merged);
    return out;
}

StepResult rafm_step(RecurrenceMapper& mapper, const AttractorMap& previous,
                     const ParameterPath& path, std::size_t step,
                     const IcSampler& sampler, std::uint64_t first_index,
                     const RafmSettings& settings, const std::set<int>& reserved) {
    if (settings.samples < 1)
        throw ConfigError("continuation needs at least one sample per parameter");
    settings.match.validate();

    mapper.reset();
    path.apply(mapper.system(), step);

    StepResult out;
    const MappingDiagnostics start = mapper.diagnostics();
    for (const auto& [label, att] : previous) {
        const Eigen::Index rows = att.points.rows();
        const auto seeds = std::min<Eigen::Index>(
            rows, static_cast<Eigen::Index>(settings.seeds_per_attractor));
        for (Eigen::Index k = 0; k < seeds; ++k)
            mapper.map(att.points.row(k * rows / seeds).transpose());
    }
    out.diagnostics = difference(mapper.diagnostics(), start);

    BasinsResult r = parallel_basins_fractions(mapper, sampler, settings.samples,
                                               first_index, settings.workers,
                                               &out.diagnostics);
    for (const auto& [label, att] : r.attractors)
        r.fractions.try_emplace(label, 0.0);

    const auto mapping = match_ids(r.attractors, previous, settings.match, reserved);
    out.attractors = relabel(r.attractors, mapping);
    out.fractions = relabel(r.fractions, mapping);
    return out;
}

ContinuationResult rafm_continuation(RecurrenceMapper mapper,
                                     const ParameterPath& path,
                                     const IcSampler& sampler,
                                     const RafmSettings& settings) {
    path.validate(mapper.system());
    ContinuationResult out;
    out.parameter_indices = path.indices;
    std::set<int> reserved;
    AttractorMap previous;
    for (std::size_t k = 0; k < path.size(); ++k) {
        StepResult s = rafm_step(mapper, previous, path, k, sampler,
                                 static_cast<std::uint64_t>(k) * settings.samples,
                                 settings, reserved);
        for (const auto& [label, att] : s.attractors)
            reserved.insert(label);
        previous = s.attractors;
        out.parameters.push_back(path.points[k]);
        out.fractions.push_back(std::move(s.fractions));
        out.attractors.push_back(std::move(s.attractors));
        out.diagnostics.push_back(s.diagnostics);
    }
    return out;
}

ContinuationResult rafm_continuation(RecurrenceMapper mapper,
                                     const std::vector<double>& prange,
                                     std::size_t pidx, const IcSampler& sampler,
                                     const RafmSettings& settings) {
    return rafm_continuation(std::move(mapper), ParameterPath::scalar(pidx, prange),
                             sampler, settings);
}

ContinuationResult rematch(const ContinuationResult& result, const MatchConfig& config) {
    config.validate();
    ContinuationResult out = result;
    std::set<int> reserved;
    for (std::size_t k = 0; k < result.size(); ++k) {
        if (k > 0) {
            const auto mapping =
                match_ids(result.attractors[k], out.attractors[k - 1], config, reserved);
            out.attractors[k] = relabel(result.attractors[k], mapping);
            out.fractions[k] = relabel(result.fractions[k], mapping);
        }
        for (const auto& [label, att] : out.attractors[k])
            reserved.insert(label);
    }
    return out;
}

ContinuationResult aggregate_attractors(const ContinuationResult& result,
                                        const std::function<int(const Attractor&)>& key) {
    return aggregate_with(result, [&](std::size_t, const Attractor& a) { return key(a); });
}

ContinuationResult aggregate_by_grouping(
    const ContinuationResult& result,
    const std::function<Vector(const Attractor&)>& featurizer,
    const GroupingConfig& grouping) {
    std::vector<std::pair<std::size_t, int>> order;
    std::vector<Vector> rows;
    for (std::size_t s = 0; s < result.size(); ++s)
        for (const auto& [label, att] : result.attractors[s]) {
            order.emplace_back(s, label);
            rows.push_back(featurizer(att));
        }
    if (rows.empty())
        return result;
    FeatureMatrix features(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != features.cols())
            throw InputError("attractor featurizer returned vectors of different lengths");
        features.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    }
    const GroupLabels groups = group_features(features, grouping);
    int top = 0;
    for (int g : groups)
        top = std::max(top, g);
    std::map<std::pair<std::size_t, int>, int> key;
    for (std::size_t i = 0; i < order.size(); ++i)
        key[order[i]] = groups[i] > 0 ? groups[i] : top + order[i].second;
    return aggregate_with(result, [&](std::size_t s, const Attractor& a) {
        return key.at({s, a.label});
    });
}

ContinuationResult featurize_group_continuation(
    const DynamicalSystem& system, const ParameterPath& path,
    const IcSampler& sampler, const Featurizer& featurizer,
    const GroupingConfig& grouping, const IntegrationParams& integration,
    const FeaturizeContinuationSettings& settings,
    std::vector<GroupLabels>* labels_out, std::vector<FeatureMatrix>* features_out) {
    path.validate(system);
    validate(grouping);
    const std::size_t n = settings.samples;
    if (n < 1)
        throw ConfigError("continuation needs at least one sample per parameter");
    const double total = static_cast<double>(n) * static_cast<double>(path.size());
    if (std::holds_alternative<Clustering>(grouping)) {
        const double bytes = total * (total - 1.0) / 2.0 * sizeof(double);
        if (bytes > settings.memory_budget_bytes)
            throw ConfigError("pooled clustering of " + std::to_string(total) +
                              " feature vectors needs " + std::to_string(bytes) +
                              " bytes of pairwise distances, above the budget of " +
                              std::to_string(settings.memory_budget_bytes));
    }

    std::vector<FeatureBatch> batches;
    batches.reserve(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) {
        DynamicalSystem local = system;
        path.apply(local, k);
        batches.push_back(integrate_features(local, sampler,
                                             static_cast<std::uint64_t>(k) * n, n,
                                             featurizer, integration, settings.workers));
    }

    Eigen::Index K = 0;
    for (const auto& b : batches)
        K = std::max(K, b.features.cols());
    FeatureBatch pooled;
    const auto rows = static_cast<Eigen::Index>(n * path.size());
    pooled.features = FeatureMatrix::Constant(rows, K, std::numeric_limits<double>::quiet_NaN());
    pooled.final_states.resize(rows, system.dimension());
    for (std::size_t k = 0; k < batches.size(); ++k) {
        const auto r0 = static_cast<Eigen::Index>(k * n);
        const auto& b = batches[k];
        if (b.features.cols() == K)
            pooled.features.middleRows(r0, static_cast<Eigen::Index>(n)) = b.features;
        pooled.final_states.middleRows(r0, static_cast<Eigen::Index>(n)) = b.final_states;
        pooled.diverged.insert(pooled.diverged.end(), b.diverged.begin(), b.diverged.end());
    }
    const GroupLabels labels = group_batch(pooled, grouping);

    ContinuationResult out;
    out.parameter_indices = path.indices;
    for (std::size_t k = 0; k < path.size(); ++k) {
        const auto r0 = static_cast<Eigen::Index>(k * n);
        GroupLabels slice(labels.begin() + r0, labels.begin() + r0 + static_cast<Eigen::Index>(n));
        MappingDiagnostics d;
        d.diverged = static_cast<std::size_t>(
            std::count(batches[k].diverged.begin(), batches[k].diverged.end(), true));
        out.parameters.push_back(path.points[k]);
        out.fractions.push_back(fractions_from_labels(slice));
        out.attractors.push_back(group_representatives(
            slice, pooled.final_states.middleRows(r0, static_cast<Eigen::Index>(n))));
        out.diagnostics.push_back(d);
        if (labels_out)
            labels_out->push_back(std::move(slice));
        if (features_out)
            features_out->push_back(batches[k].features);
    }
    return out;
}

} // namespace attractors
