#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <variant>

#include "attractors/recurrences.hpp"

namespace attractors {

/// Euclidean distance between the row means of two point sets.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar centroid_distance(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b) {
    return (a.colwise().mean() - b.colwise().mean()).norm();
}

/// max_{a in A} min_{b in B} |a - b| over the rows of A and B. The inner
/// loop stops as soon as a row of A is closer than the running maximum.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar directed_hausdorff(const Eigen::MatrixBase<DerivedA>& a,
                                             const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename DerivedA::Scalar;
    Scalar running = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        Scalar nearest = std::numeric_limits<Scalar>::infinity();
        for (Eigen::Index j = 0; j < b.rows(); ++j) {
            const Scalar d2 = (a.row(i) - b.row(j)).squaredNorm();
            if (d2 < nearest) {
                nearest = d2;
                if (nearest < running)
                    break;
            }
        }
        if (nearest > running)
            running = nearest;
    }
    using std::sqrt;
    return sqrt(running);
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar hausdorff_distance(const Eigen::MatrixBase<DerivedA>& a,
                                             const Eigen::MatrixBase<DerivedB>& b) {
    using std::max;
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double centroid_distance(const Attractor& a, const Attractor& b);
double hausdorff_distance(const Attractor& a, const Attractor& b);

/// Cells an attractor covers; point count when no cells are recorded.
std::size_t covered_cells(const Attractor& a);

/// |log2 len(A) - log2 len(B)| with len the covered cell count. With a
/// threshold just below 1 it matches attractors whose periods differ by
/// less than a factor of two.
double period_ratio_distance(const Attractor& a, const Attractor& b);

using SetDistanceFn = std::function<double(const Attractor&, const Attractor&)>;

struct CentroidDistance {};
struct HausdorffDistance {};
struct CustomDistance {
    SetDistanceFn fn;
    std::string name = "custom";
};

using SetDistance = std::variant<CentroidDistance, HausdorffDistance, CustomDistance>;

double evaluate(const SetDistance& distance, const Attractor& a, const Attractor& b);
std::string distance_name(const SetDistance& distance);

struct MatchConfig {
    SetDistance distance = CentroidDistance{};
    /// Pairs are accepted only when strictly closer than this.
    double threshold = std::numeric_limits<double>::infinity();

    void validate() const;
};

/// Relabels `current` against `previous`. Pairs are accepted greedily in
/// increasing distance (ties by previous label, then current label), each
/// label at most once, and only below the threshold. Unmatched current
/// attractors take the smallest positive labels not used by `previous`,
/// `reserved`, or earlier assignments, in ascending order of current label.
/// Returns current label -> final label.
std::map<int, int> match_ids(const AttractorMap& current,
                             const AttractorMap& previous,
                             const MatchConfig& config,
                             const std::set<int>& reserved = {});

/// Applies a relabelling; labels absent from the map are kept.
AttractorMap relabel(const AttractorMap& attractors, const std::map<int, int>& mapping);
BasinFractions relabel(const BasinFractions& fractions, const std::map<int, int>& mapping);

} // namespace attractors
