#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "attractors/continuation.hpp"

namespace attractors {

/// %.17g, enough digits to round-trip a double.
std::string format_number(double x);

/// "-" for an empty point, the value for a scalar one, comma-joined otherwise.
std::string format_parameter(const Vector& point);

/// One row per (parameter, label): parameter, label, fraction, npoints and
/// `dimension` centroid columns. Tab separated with a header line.
void write_fractions_table(std::ostream& out, const ContinuationResult& result,
                           Eigen::Index dimension);

/// Header "# label=<l> param=<value> npoints=<n>", then one state per line.
void write_attractor_dump(std::ostream& out, const Attractor& attractor,
                          const std::string& parameter);

/// Feature rows followed by their group label. `step` prepends a column when
/// non-negative.
void write_features_table(std::ostream& out, const FeatureMatrix& features,
                          const GroupLabels& labels, long step = -1);

/// "# shape=<n1> <n2> ..." then the labels with the last axis along a line.
void write_basin_grid(std::ostream& out, const BasinGrid& grid);

/// Color of a label in the fixed 12-entry palette; -1 is grey.
std::string label_color(int label);

/// Stacked fractions against the parameter (or the step index when the path
/// is not scalar). Each parameter owns the x-interval halfway to its
/// neighbours, so bands change in steps. The y axis is in fraction units.
void write_stacked_band_plot(std::ostream& out, const ContinuationResult& result);
void emit_stacked_band_plot(const ContinuationResult& result,
                            const std::filesystem::path& path);

} // namespace attractors
