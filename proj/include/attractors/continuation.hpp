#pragma once

#include <functional>
#include <set>
#include <vector>

#include "attractors/featurize.hpp"
#include "attractors/matching.hpp"
#include "attractors/recurrences.hpp"

namespace attractors {

/// Ordered parameter points. Each point assigns `values[k]` to the 1-based
/// parameter `indices[k]`; a single index gives an ordinary scalar range.
struct ParameterPath {
    std::vector<std::size_t> indices;
    std::vector<Vector> points;

    static ParameterPath scalar(std::size_t index, const std::vector<double>& values);
    std::size_t size() const noexcept { return points.size(); }
    void apply(DynamicalSystem& system, std::size_t step) const;
    void validate(const DynamicalSystem& system) const;
};

/// Attractors and basin fractions along a parameter path. Equal labels at
/// different steps denote one matched attractor chain.
struct ContinuationResult {
    std::vector<std::size_t> parameter_indices;
    std::vector<Vector> parameters;
    std::vector<BasinFractions> fractions;
    std::vector<AttractorMap> attractors;
    std::vector<MappingDiagnostics> diagnostics;

    std::size_t size() const noexcept { return parameters.size(); }
    /// Every positive label appearing anywhere, ascending.
    std::set<int> labels() const;
};

/// Maps sampler indices [first, first + n) with one mapper copy per worker,
/// then merges the workers' attractors through the matching engine: two
/// attractors are the same when they share a cell. Attractors present in
/// `mapper` beforehand keep their labels in every worker. Deterministic for a
/// fixed worker count; with one worker this equals basins_fractions.
BasinsResult parallel_basins_fractions(RecurrenceMapper& mapper,
                                       const IcSampler& sampler, std::size_t n,
                                       std::uint64_t first, std::size_t workers,
                                       MappingDiagnostics* diagnostics = nullptr);

struct RafmSettings {
    std::size_t samples = 100;
    std::size_t seeds_per_attractor = 10;
    MatchConfig match;
    std::size_t workers = 1;
};

struct StepResult {
    BasinFractions fractions;
    AttractorMap attractors;
    MappingDiagnostics diagnostics;
};

/// One find-and-match step: seed from `previous`, switch the parameters,
/// map the seeds on a fresh registry, map `samples` sampled conditions for
/// the fractions, relabel against `previous`. Seeds help find attractors but
/// never count towards fractions; attractors reached only by seeds get a zero
/// fraction.
StepResult rafm_step(RecurrenceMapper& mapper, const AttractorMap& previous,
                     const ParameterPath& path, std::size_t step,
                     const IcSampler& sampler, std::uint64_t first_index,
                     const RafmSettings& settings,
                     const std::set<int>& reserved = {});

/// Folds rafm_step along the path. Step k draws sampler indices
/// [k * samples, (k + 1) * samples).
ContinuationResult rafm_continuation(RecurrenceMapper mapper,
                                     const ParameterPath& path,
                                     const IcSampler& sampler,
                                     const RafmSettings& settings);

ContinuationResult rafm_continuation(RecurrenceMapper mapper,
                                     const std::vector<double>& prange,
                                     std::size_t pidx, const IcSampler& sampler,
                                     const RafmSettings& settings);

/// Re-runs matching over the stored attractors with a new configuration.
/// Only labels change.
ContinuationResult rematch(const ContinuationResult& result, const MatchConfig& config);

/// Sums fractions of attractors sharing a group key; keys become labels and
/// grouped attractors pool their points. Divergence (-1) is kept as is.
ContinuationResult aggregate_attractors(const ContinuationResult& result,
                                        const std::function<int(const Attractor&)>& key);

/// Groups every stored attractor at once by featurizing it and applying a
/// grouping configuration, then aggregates by the resulting group labels.
/// Attractors the grouping rejects (-1) stay separate under their own label
/// offset past the largest group.
ContinuationResult aggregate_by_grouping(
    const ContinuationResult& result,
    const std::function<Vector(const Attractor&)>& featurizer,
    const GroupingConfig& grouping);

struct FeaturizeContinuationSettings {
    std::size_t samples = 100;
    std::size_t workers = 1;
    /// Refuse clustering runs whose pairwise distances would exceed this.
    double memory_budget_bytes = 2.0 * 1024 * 1024 * 1024;
};

/// Integrates `samples` conditions at every parameter point, pools all
/// features, groups once and redistributes the labels to their points.
ContinuationResult featurize_group_continuation(
    const DynamicalSystem& system, const ParameterPath& path,
    const IcSampler& sampler, const Featurizer& featurizer,
    const GroupingConfig& grouping, const IntegrationParams& integration,
    const FeaturizeContinuationSettings& settings,
    std::vector<GroupLabels>* labels_out = nullptr,
    std::vector<FeatureMatrix>* features_out = nullptr);

} // namespace attractors
