#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "attractors/dynamics.hpp"

namespace attractors {

using CellIndex = std::vector<std::int32_t>;

/// Axis-aligned partition of a box into half-open cells
/// [min + i*w, min + (i+1)*w). A coordinate equal to the box max is outside.
class Tessellation {
public:
    Tessellation(StateSpaceBox box, std::vector<std::int32_t> cells_per_axis);
    Tessellation(StateSpaceBox box, std::int32_t cells_per_axis);

    const StateSpaceBox& box() const noexcept { return box_; }
    Eigen::Index dimension() const noexcept { return box_.dimension(); }
    const std::vector<std::int32_t>& cells_per_axis() const noexcept {
        return cells_;
    }
    const Vector& widths() const noexcept { return widths_; }
    double total_cells() const;

    /// Writes the cell of `u` into `out`; false if `u` is outside the box.
    bool locate(const Vector& u, CellIndex& out) const;
    std::optional<CellIndex> cell_index(const Vector& u) const;
    Vector cell_center(const CellIndex& cell) const;

private:
    StateSpaceBox box_;
    std::vector<std::int32_t> cells_;
    Vector widths_;
};

struct CellIndexHash {
    std::size_t operator()(const CellIndex& c) const noexcept;
};

/// Sparse record of visited cells. Each entry is either an attractor label
/// (positive) or a visit mark stamped with the search generation that made
/// it; marks from older generations read as unvisited, so starting a new
/// search is O(1).
class VisitRegistry {
public:
    enum class Status { unvisited, visited, labeled };

    struct Visit {
        Status status;  ///< status before this visit
        int label;      ///< attractor label when status == labeled, else 0
    };

    /// Starts a new search generation.
    void begin_search() noexcept { ++generation_; }

    /// Looks up `cell` and marks it visited in the current generation unless
    /// it already carries a label. Returns the status prior to the call.
    Visit visit(const CellIndex& cell);

    Visit peek(const CellIndex& cell) const;

    /// Throws ConfigError when the cell already carries a different label.
    void assign_label(const CellIndex& cell, int label);

    std::size_t size() const noexcept { return table_.size(); }
    std::size_t labeled_cells() const noexcept { return labeled_; }
    void clear();

private:
    // >0: attractor label; <0: visit mark of generation -code.
    std::unordered_map<CellIndex, std::int64_t, CellIndexHash> table_;
    std::int64_t generation_ = 1;
    std::size_t labeled_ = 0;
};

} // namespace attractors
