#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "attractors/config.hpp"
#include "attractors/continuation.hpp"

namespace attractors {

inline constexpr const char* kToolVersion = "0.1.0";

/// A runtime failure tagged with the phase it happened in.
class PhaseError : public std::runtime_error {
public:
    PhaseError(std::string phase, const std::string& what)
        : std::runtime_error(phase + ": " + what), phase_(std::move(phase)) {}
    const std::string& phase() const noexcept { return phase_; }

private:
    std::string phase_;
};

/// Everything a run computes. Fractions jobs produce a one-step result whose
/// parameter point is empty.
struct RunReport {
    ContinuationResult result;
    std::vector<FeatureMatrix> features;
    std::vector<GroupLabels> feature_labels;
    std::optional<BasinGrid> basins;
    std::vector<std::pair<std::string, double>> timings;  ///< seconds per phase
};

RunReport execute(const RunConfig& config);

/// Writes fractions.tsv, attractors/, manifest.json and, depending on the
/// job, plot.svg, features.tsv and basins.txt into `dir`. Wall-clock timings
/// go to timings.json so the other files depend on the config alone.
void write_outputs(const RunConfig& config, const RunReport& report,
                   const std::filesystem::path& dir);

/// execute + write_outputs. Returns 0, 1 on configuration errors, 2 on
/// runtime failures; messages go to `err`.
int run(const RunConfig& config, std::ostream& err);

} // namespace attractors
