#include "attractors/matching.hpp"

#include <algorithm>
#include <tuple>
#include <vector>

namespace attractors {

double centroid_distance(const Attractor& a, const Attractor& b) {
    if (a.points.cols() != b.points.cols())
        throw ConfigError("attractors of different dimension");
    return centroid_distance(a.points, b.points);
}

double hausdorff_distance(const Attractor& a, const Attractor& b) {
    if (a.points.cols() != b.points.cols())
        throw ConfigError("attractors of different dimension");
    if (a.points.rows() == 0 || b.points.rows() == 0)
        throw ConfigError("Hausdorff distance needs non-empty point sets");
    return hausdorff_distance(a.points, b.points);
}

std::size_t covered_cells(const Attractor& a) {
    return a.cells.empty() ? static_cast<std::size_t>(a.points.rows()) : a.cells.size();
}

double period_ratio_distance(const Attractor& a, const Attractor& b) {
    return std::abs(std::log2(static_cast<double>(covered_cells(a))) -
                    std::log2(static_cast<double>(covered_cells(b))));
}

double evaluate(const SetDistance& distance, const Attractor& a, const Attractor& b) {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, CentroidDistance>)
                return centroid_distance(a, b);
            else if constexpr (std::is_same_v<T, HausdorffDistance>)
                return hausdorff_distance(a, b);
            else
                return d.fn(a, b);
        },
        distance);
}

std::string distance_name(const SetDistance& distance) {
    if (std::holds_alternative<CentroidDistance>(distance))
        return "centroid";
    if (std::holds_alternative<HausdorffDistance>(distance))
        return "hausdorff";
    return std::get<CustomDistance>(distance).name;
}

void MatchConfig::validate() const {
    if (!(threshold >= 0.0))
        throw ConfigError("matching threshold must be >= 0");
    if (const auto* c = std::get_if<CustomDistance>(&distance); c && !c->fn)
        throw ConfigError("custom distance has no function");
}

std::map<int, int> match_ids(const AttractorMap& current,
                             const AttractorMap& previous,
                             const MatchConfig& config,
                             const std::set<int>& reserved) {
    config.validate();
    struct Pair {
        double distance;
        int prev;
        int cur;
    };
    std::vector<Pair> pairs;
    pairs.reserve(current.size() * previous.size());
    for (const auto& [pl, pa] : previous)
        for (const auto& [cl, ca] : current) {
            const double d = evaluate(config.distance, ca, pa);
            if (!std::isfinite(d) || d < 0.0)
                throw ConfigError("set distance returned " + std::to_string(d) +
                                  " for attractors " + std::to_string(cl) +
                                  " and " + std::to_string(pl));
            pairs.push_back({d, pl, cl});
        }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
        return std::tie(x.distance, x.prev, x.cur) < std::tie(y.distance, y.prev, y.cur);
    });

    std::map<int, int> out;
    std::set<int> taken;
    for (const auto& p : pairs) {
        if (!(p.distance < config.threshold))
            break;
        if (out.count(p.cur) || taken.count(p.prev))
            continue;
        out[p.cur] = p.prev;
        taken.insert(p.prev);
    }

    std::set<int> used = reserved;
    for (const auto& [pl, pa] : previous)
        used.insert(pl);
    for (const auto& [cur, fin] : out)
        used.insert(fin);
    int candidate = 1;
    for (const auto& [cl, ca] : current) {
        if (out.count(cl))
            continue;
        while (used.count(candidate))
            ++candidate;
        out[cl] = candidate;
        used.insert(candidate);
    }
    return out;
}

AttractorMap relabel(const AttractorMap& attractors, const std::map<int, int>& mapping) {
    AttractorMap out;
    for (const auto& [label, att] : attractors) {
        auto it = mapping.find(label);
        const int to = it == mapping.end() ? label : it->second;
        Attractor copy = att;
        copy.label = to;
        if (!out.emplace(to, std::move(copy)).second)
            throw ConfigError("relabelling maps two attractors onto label " +
                              std::to_string(to));
    }
    return out;
}

BasinFractions relabel(const BasinFractions& fractions, const std::map<int, int>& mapping) {
    BasinFractions out;
    for (const auto& [label, f] : fractions) {
        auto it = mapping.find(label);
        out[it == mapping.end() ? label : it->second] += f;
    }
    return out;
}

} // namespace attractors
