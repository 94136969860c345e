#pragma once

#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "attractors/dynamics.hpp"
#include "attractors/recurrences.hpp"

namespace attractors {

/// One feature vector per row.
using FeatureMatrix = Eigen::MatrixXd;

/// One label per feature row; -1 marks noise, outliers and divergence.
using GroupLabels = std::vector<int>;

/// Maps every column affinely onto [0, 1]. Columns whose spread is below
/// 1e-9 of their magnitude count as constant and map to 0.
FeatureMatrix rescale_features(const FeatureMatrix& features);

/// DBSCAN with Euclidean distance. Points are neighbours when their distance
/// is <= radius; a point is core when its neighbourhood, itself included,
/// holds >= min_pts points. Clusters are the connected components of core
/// points, numbered 1..G in order of their lowest core index. A border point
/// joins the cluster of its lowest-index core neighbour.
GroupLabels dbscan(const FeatureMatrix& points, double radius, int min_pts);

/// Silhouette of every non-noise point, aligned with the input; noise rows
/// get NaN. Members of singleton clusters score 0. Throws InputError when
/// fewer than two clusters are present.
std::vector<double> silhouettes(const FeatureMatrix& points,
                                const GroupLabels& labels);

/// Radius-search objective: silhouette sum over all points (noise counts as
/// zero) divided by the point count, or -1 for fewer than two clusters.
double clustering_score(const FeatureMatrix& points, const GroupLabels& labels);

/// Radius maximising the clustering score, searched between the smallest
/// non-zero and the largest pairwise distance of a <= 1000 point subsample.
/// The lower end is floored at 1e-9 of the largest distance.
/// A log-spaced scan brackets the best region, then 20 golden-section
/// iterations refine it. The objective is not unimodal in general; the
/// result is a local maximum.
double optimal_radius(const FeatureMatrix& features, int min_pts);

/// Dense labels 1..G of occupied histogram bins, ordered by bin index.
/// Bins are [e_j, e_{j+1}) with the last bin closed; values outside get -1.
GroupLabels group_by_histogram(const FeatureMatrix& features,
                               const std::vector<std::vector<double>>& edges);

/// Label of the nearest template, ties to the smaller label; -1 when the
/// nearest template is farther than `max_distance`.
GroupLabels group_by_nearest_template(const FeatureMatrix& features,
                                      const std::map<int, Vector>& templates,
                                      double max_distance);

struct Clustering {
    int min_pts = 10;
    std::optional<double> radius;  ///< fixed radius, or search when empty
};

struct Histogram {
    std::vector<std::vector<double>> edges;
};

struct NearestTemplate {
    std::map<int, Vector> templates;
    double max_distance = std::numeric_limits<double>::infinity();
};

using GroupingConfig = std::variant<Clustering, Histogram, NearestTemplate>;

void validate(const GroupingConfig& config);

/// Groups raw features. Clustering rescales first; the other modes work on
/// raw values.
GroupLabels group_features(const FeatureMatrix& features,
                           const GroupingConfig& config);

struct IntegrationParams {
    double total = 100.0;     ///< T
    double transient = 100.0; ///< T_tr
    double dt = 0.01;
    double sample_dt = 0.1;
};

/// Features of a batch of initial conditions. Diverged rows are NaN.
struct FeatureBatch {
    FeatureMatrix features;
    Eigen::MatrixXd final_states;
    std::vector<bool> diverged;
};

/// Integrates and featurizes sampler indices [first, first + n), split over
/// `workers` threads. The result does not depend on the worker count.
FeatureBatch integrate_features(const DynamicalSystem& system,
                                const IcSampler& sampler, std::uint64_t first,
                                std::size_t n, const Featurizer& featurizer,
                                const IntegrationParams& integration,
                                std::size_t workers = 1);

/// Groups the non-diverged rows; diverged rows get -1.
GroupLabels group_batch(const FeatureBatch& batch, const GroupingConfig& config);

/// Final states of each group's members, one attractor per positive label.
AttractorMap group_representatives(const GroupLabels& labels,
                                   const Eigen::MatrixXd& final_states);

struct FeaturizeResult {
    BasinFractions fractions;
    GroupLabels labels;
    FeatureMatrix features;
    AttractorMap attractors;
};

FeaturizeResult featurize_fractions(const DynamicalSystem& system,
                                    const IcSampler& sampler, std::size_t n,
                                    const Featurizer& featurizer,
                                    const GroupingConfig& grouping,
                                    const IntegrationParams& integration,
                                    std::size_t workers = 1);

} // namespace attractors
