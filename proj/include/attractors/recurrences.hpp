#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "attractors/dynamics.hpp"
#include "attractors/tessellation.hpp"

namespace attractors {

/// Label reported for divergence, box exit and non-convergence.
inline constexpr int kDiverged = -1;

/// Metaparameters of the recurrence finite-state machine.
struct RecurrenceParams {
    double dt = 1.0;                          ///< time per FSM step
    std::int64_t recurrences_to_find = 100;   ///< n_f
    std::int64_t points_to_locate = 1000;     ///< n_l
    std::int64_t steps_to_lose = 100;         ///< n_d
    std::int64_t max_steps = 100'000'000;     ///< n_m
    std::int64_t hits_to_converge = 100;      ///< n_r

    void validate() const;
};

/// Finite point sample of an attracting set. Points are stored one per row.
struct Attractor {
    int label = 0;
    Eigen::MatrixXd points;
    std::vector<CellIndex> cells;

    Eigen::Index size() const noexcept { return points.rows(); }
    Vector centroid() const { return points.colwise().mean().transpose(); }
};

using AttractorMap = std::map<int, Attractor>;
using BasinFractions = std::map<int, double>;

BasinFractions fractions_from_labels(std::span<const int> labels);

struct MappingDiagnostics {
    std::size_t found = 0;      ///< new attractors located
    std::size_t converged = 0;  ///< eager convergence to a known attractor
    std::size_t diverged = 0;   ///< box exit or non-finite state
    std::size_t exhausted = 0;  ///< n_m steps reached without a decision
    std::uint64_t steps = 0;

    MappingDiagnostics& operator+=(const MappingDiagnostics& o);
};

/// Maps initial conditions to attractors by detecting recurrences on a
/// tessellation. Single writer: one instance must not be shared between
/// threads while mapping.
class RecurrenceMapper {
public:
    RecurrenceMapper(DynamicalSystem system, Tessellation grid,
                     RecurrenceParams params);

    /// Runs the finite-state machine from `ic`. Returns the attractor label,
    /// a fresh label if a new attractor was located, or kDiverged.
    int map(const Vector& ic);

    const AttractorMap& attractors() const noexcept { return attractors_; }
    const VisitRegistry& registry() const noexcept { return registry_; }
    const MappingDiagnostics& diagnostics() const noexcept { return diag_; }
    const Tessellation& grid() const noexcept { return grid_; }
    const RecurrenceParams& params() const noexcept { return params_; }
    const DynamicalSystem& system() const noexcept { return system_; }
    DynamicalSystem& system() noexcept { return system_; }

    /// Forgets all attractors and visited cells.
    void reset();

private:
    int locate_new_attractor(Integrator& integ, Vector& u, std::int64_t& steps,
                             const Vector& first_point);

    DynamicalSystem system_;
    Tessellation grid_;
    RecurrenceParams params_;
    VisitRegistry registry_;
    AttractorMap attractors_;
    MappingDiagnostics diag_;
    CellIndex cell_;
    Vector observed_;
};

/// Evolves `ic` until it comes within `delta` of a known attractor point.
int map_ic_by_proximity(const AttractorMap& attractors,
                        const DynamicalSystem& system, const Vector& ic,
                        double delta, double dt, std::int64_t max_steps);

class ProximityMapper {
public:
    ProximityMapper(DynamicalSystem system, AttractorMap attractors,
                    double delta, double dt, std::int64_t max_steps);

    int map(const Vector& ic) const {
        return map_ic_by_proximity(attractors_, system_, ic, delta_, dt_,
                                   max_steps_);
    }
    const AttractorMap& attractors() const noexcept { return attractors_; }
    const DynamicalSystem& system() const noexcept { return system_; }
    DynamicalSystem& system() noexcept { return system_; }

private:
    DynamicalSystem system_;
    AttractorMap attractors_;
    double delta_;
    double dt_;
    std::int64_t max_steps_;
};

struct BasinsResult {
    BasinFractions fractions;
    std::vector<int> labels;  ///< one per sampled initial condition
    AttractorMap attractors;
};

/// Maps `n` sampled initial conditions, indices [first, first + n).
template <typename Mapper>
BasinsResult basins_fractions(Mapper& mapper, const IcSampler& sampler,
                              std::size_t n, std::uint64_t first = 0) {
    if (n < 1)
        throw ConfigError("basins fractions need at least one sample");
    BasinsResult out;
    out.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.labels.push_back(mapper.map(sampler(first + i)));
    out.fractions = fractions_from_labels(out.labels);
    out.attractors = mapper.attractors();
    return out;
}

/// Labels of every cell of a tessellation, row-major with the last axis
/// varying fastest.
struct BasinGrid {
    std::vector<std::int32_t> shape;
    std::vector<int> labels;

    BasinFractions fractions() const { return fractions_from_labels(labels); }
};

/// Maps the center of every cell. Refuses grids above `max_cells`.
BasinGrid full_basins(RecurrenceMapper& mapper, double max_cells = 1e8);

} // namespace attractors
