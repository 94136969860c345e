#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "attractors/featurize.hpp"
#include "attractors/matching.hpp"
#include "attractors/models.hpp"
#include "attractors/recurrences.hpp"

namespace attractors {

enum class MapperKind { recurrences, featurize_group, proximity };
enum class JobKind { fractions, continuation, full_basins };
enum class DistanceKind { centroid, hausdorff, period_ratio };

struct MapperConfig {
    MapperKind kind = MapperKind::recurrences;
    RecurrenceParams recurrence;
    // featurize-group
    std::string grouping = "clustering";
    int min_pts = 10;
    std::optional<double> radius;
    std::vector<std::vector<double>> edges;
    std::vector<std::vector<double>> templates;
    double max_distance = std::numeric_limits<double>::infinity();
    IntegrationParams integration;
    // proximity
    std::vector<std::vector<std::vector<double>>> known_attractors;
    double delta = 1e-3;
    double proximity_dt = 0.05;
    std::int64_t proximity_max_steps = 1000000;
};

/// Everything a batch run needs, fully resolved.
struct RunConfig {
    std::string model = "double_well";
    std::size_t oscillators = 5;  ///< kuramoto only
    std::vector<double> parameters;
    std::vector<double> grid_min, grid_max;
    std::vector<std::int32_t> cells;
    std::vector<double> ic_min, ic_max;
    MapperConfig mapper;
    JobKind job = JobKind::fractions;
    std::size_t pidx = 0;            ///< 1-based, continuation only
    std::vector<double> prange;
    std::size_t samples = 100;
    std::uint64_t seed = 1;
    std::size_t seeds_per_attractor = 10;
    DistanceKind distance = DistanceKind::centroid;
    double threshold = std::numeric_limits<double>::infinity();
    std::string output = "out";
    std::size_t workers = 1;

    ModelSpec spec() const;
    StateSpaceBox grid_box() const { return {to_vector(grid_min), to_vector(grid_max)}; }
    StateSpaceBox ic_box() const { return {to_vector(ic_min), to_vector(ic_max)}; }
    MatchConfig match() const;
    GroupingConfig grouping() const;

    static Vector to_vector(const std::vector<double>& v) {
        return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
};

/// Parses and validates a JSON run description, filling defaults from the
/// model zoo. Throws ConfigError naming the offending key.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_tree(const nlohmann::json& tree);

/// Resolved configuration in the same schema parse_config accepts.
nlohmann::json to_json(const RunConfig& config);

std::string to_string(MapperKind kind);
std::string to_string(JobKind kind);
std::string to_string(DistanceKind kind);

} // namespace attractors
