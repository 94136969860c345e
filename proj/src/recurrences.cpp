#include "attractors/recurrences.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>

namespace attractors {

void RecurrenceParams::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ConfigError("recurrence dt must be positive");
    if (recurrences_to_find < 1 || points_to_locate < 1 || steps_to_lose < 1 ||
        max_steps < 1 || hits_to_converge < 1)
        throw ConfigError("recurrence counts must all be >= 1");
}

BasinFractions fractions_from_labels(std::span<const int> labels) {
    BasinFractions out;
    if (labels.empty())
        return out;
    std::map<int, std::size_t> counts;
    for (int l : labels)
        ++counts[l];
    const double n = static_cast<double>(labels.size());
    for (auto [label, count] : counts)
        out[label] = static_cast<double>(count) / n;
    return out;
}

MappingDiagnostics& MappingDiagnostics::operator+=(const MappingDiagnostics& o) {
    found += o.found;
    converged += o.converged;
    diverged += o.diverged;
    exhausted += o.exhausted;
    steps += o.steps;
    return *this;
}

RecurrenceMapper::RecurrenceMapper(DynamicalSystem system, Tessellation grid,
                                   RecurrenceParams params)
    : system_(std::move(system)), grid_(std::move(grid)), params_(params) {
    params_.validate();
    if (grid_.dimension() != system_.dimension())
        throw ConfigError("tessellation dimension " +
                          std::to_string(grid_.dimension()) +
                          " does not match system dimension " +
                          std::to_string(system_.dimension()));
}

void RecurrenceMapper::reset() {
    registry_.clear();
    attractors_.clear();
}

int RecurrenceMapper::map(const Vector& ic) {
    if (ic.size() != system_.dimension())
        throw ConfigError("initial condition dimension does not match system");

    registry_.begin_search();
    Integrator integ(system_, params_.dt);
    Vector u = ic;
    std::int64_t steps = 0;
    std::int64_t recurrences = 0;
    std::int64_t outside = 0;
    std::int64_t hits = 0;
    int hit_label = 0;

    auto finish = [&](int label) {
        diag_.steps += static_cast<std::uint64_t>(steps);
        return label;
    };

    while (true) {
        if (steps >= params_.max_steps) {
            ++diag_.exhausted;
            return finish(kDiverged);
        }
        const bool finite = integ.advance(u);
        ++steps;
        if (!finite) {
            ++diag_.diverged;
            return finish(kDiverged);
        }
        observed_ = u;
        system_.wrap(observed_);
        if (!grid_.locate(observed_, cell_)) {
            recurrences = 0;
            hits = 0;
            if (++outside >= params_.steps_to_lose) {
                ++diag_.diverged;
                return finish(kDiverged);
            }
            continue;
        }
        outside = 0;

        const auto v = registry_.visit(cell_);
        switch (v.status) {
        case VisitRegistry::Status::labeled:
            recurrences = 0;
            if (v.label == hit_label) {
                ++hits;
            } else {
                hit_label = v.label;
                hits = 1;
            }
            if (hits >= params_.hits_to_converge) {
                ++diag_.converged;
                return finish(hit_label);
            }
            break;
        case VisitRegistry::Status::visited:
            hits = 0;
            if (++recurrences >= params_.recurrences_to_find) {
                const Vector first = observed_;
                return finish(locate_new_attractor(integ, u, steps, first));
            }
            break;
        case VisitRegistry::Status::unvisited:
            hits = 0;
            recurrences = 0;
            break;
        }
    }
}

// Collects one point per newly covered cell until `points_to_locate`
// consecutive steps land in cells already covered. Cells are committed to the
// registry only once location succeeds.
int RecurrenceMapper::locate_new_attractor(Integrator& integ, Vector& u,
                                           std::int64_t& steps,
                                           const Vector& first_point) {
    std::unordered_set<CellIndex, CellIndexHash> own;
    std::vector<CellIndex> cells;
    std::vector<Vector> points;

    own.insert(cell_);
    cells.push_back(cell_);
    points.push_back(first_point);

    std::int64_t consecutive = 0;
    std::int64_t outside = 0;
    std::int64_t hits = 0;
    int hit_label = 0;

    while (consecutive < params_.points_to_locate) {
        if (steps >= params_.max_steps) {
            ++diag_.exhausted;
            return kDiverged;
        }
        const bool finite = integ.advance(u);
        ++steps;
        if (!finite) {
            ++diag_.diverged;
            return kDiverged;
        }
        observed_ = u;
        system_.wrap(observed_);
        if (!grid_.locate(observed_, cell_)) {
            consecutive = 0;
            hits = 0;
            if (++outside >= params_.steps_to_lose) {
                ++diag_.diverged;
                return kDiverged;
            }
            continue;
        }
        outside = 0;

        if (own.count(cell_)) {
            ++consecutive;
            hits = 0;
            continue;
        }
        const auto v = registry_.peek(cell_);
        if (v.status == VisitRegistry::Status::labeled) {
            // The apparent recurrence was a transient onto a known attractor.
            hits = (v.label == hit_label) ? hits + 1 : 1;
            hit_label = v.label;
            if (hits >= params_.hits_to_converge) {
                ++diag_.converged;
                return hit_label;
            }
            continue;
        }
        hits = 0;
        consecutive = 0;
        own.insert(cell_);
        cells.push_back(cell_);
        points.push_back(observed_);
    }

    const int label = attractors_.empty() ? 1 : attractors_.rbegin()->first + 1;
    Attractor att;
    att.label = label;
    att.points.resize(static_cast<Eigen::Index>(points.size()),
                      system_.dimension());
    for (std::size_t i = 0; i < points.size(); ++i)
        att.points.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
    for (const auto& c : cells)
        registry_.assign_label(c, label);
    att.cells = std::move(cells);
    attractors_.emplace(label, std::move(att));
    ++diag_.found;
    return label;
}

int map_ic_by_proximity(const AttractorMap& attractors,
                        const DynamicalSystem& system, const Vector& ic,
                        double delta, double dt, std::int64_t max_steps) {
    if (attractors.empty())
        throw ConfigError("proximity mapping needs at least one attractor");
    if (!(delta > 0.0))
        throw ConfigError("proximity distance must be positive");
    if (ic.size() != system.dimension())
        throw ConfigError("initial condition dimension does not match system");

    Integrator integ(system, dt);
    Vector u = ic;
    Vector w;
    const double delta2 = delta * delta;
    for (std::int64_t s = 0; s < max_steps; ++s) {
        if (!integ.advance(u))
            return kDiverged;
        w = u;
        system.wrap(w);
        for (const auto& [label, att] : attractors) {
            const double d2 =
                (att.points.rowwise() - w.transpose()).rowwise().squaredNorm().minCoeff();
            if (d2 <= delta2)
                return label;
        }
    }
    return kDiverged;
}

ProximityMapper::ProximityMapper(DynamicalSystem system, AttractorMap attractors,
                                 double delta, double dt,
                                 std::int64_t max_steps)
    : system_(std::move(system)), attractors_(std::move(attractors)),
      delta_(delta), dt_(dt), max_steps_(max_steps) {
    if (attractors_.empty())
        throw ConfigError("proximity mapping needs at least one attractor");
    if (!(delta_ > 0.0))
        throw ConfigError("proximity distance must be positive");
    if (max_steps_ < 1)
        throw ConfigError("proximity mapping needs max_steps >= 1");
    for (const auto& [label, att] : attractors_)
        if (att.points.rows() == 0 || att.points.cols() != system_.dimension())
            throw ConfigError("attractor " + std::to_string(label) +
                              " has no points of the system dimension");
}

BasinGrid full_basins(RecurrenceMapper& mapper, double max_cells) {
    const auto& grid = mapper.grid();
    if (grid.total_cells() > max_cells)
        throw ConfigError("full basins over " + std::to_string(grid.total_cells()) +
                          " cells exceeds the budget of " +
                          std::to_string(max_cells));
    BasinGrid out;
    out.shape = grid.cells_per_axis();
    const auto total = static_cast<std::size_t>(grid.total_cells());
    out.labels.reserve(total);

    CellIndex cell(out.shape.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
        out.labels.push_back(mapper.map(grid.cell_center(cell)));
        for (std::size_t k = cell.size(); k-- > 0;) {
            if (++cell[k] < out.shape[k])
                break;
            cell[k] = 0;
        }
    }
    return out;
}

} // namespace attractors
