#include "attractors/tessellation.hpp"

#include <cmath>
#include <string>

namespace attractors {

Tessellation::Tessellation(StateSpaceBox box,
                           std::vector<std::int32_t> cells_per_axis)
    : box_(std::move(box)), cells_(std::move(cells_per_axis)) {
    if (cells_.size() != static_cast<std::size_t>(box_.dimension()))
        throw ConfigError("tessellation has " + std::to_string(cells_.size()) +
                          " axes but the box has " +
                          std::to_string(box_.dimension()));
    widths_.resize(box_.dimension());
    for (Eigen::Index k = 0; k < box_.dimension(); ++k) {
        if (cells_[static_cast<std::size_t>(k)] < 1)
            throw ConfigError("cell count per axis must be positive");
        widths_[k] = (box_.upper[k] - box_.lower[k]) /
                     cells_[static_cast<std::size_t>(k)];
    }
}

Tessellation::Tessellation(StateSpaceBox box, std::int32_t cells_per_axis)
    : Tessellation(box, std::vector<std::int32_t>(
                            static_cast<std::size_t>(box.dimension()),
                            cells_per_axis)) {}

double Tessellation::total_cells() const {
    double n = 1.0;
    for (auto c : cells_)
        n *= c;
    return n;
}

bool Tessellation::locate(const Vector& u, CellIndex& out) const {
    const auto d = box_.dimension();
    out.resize(static_cast<std::size_t>(d));
    for (Eigen::Index k = 0; k < d; ++k) {
        const double lo = box_.lower[k];
        const double hi = box_.upper[k];
        const double x = u[k];
        if (!(x >= lo) || !(x < hi))
            return false;
        const auto n = cells_[static_cast<std::size_t>(k)];
        auto i = static_cast<std::int32_t>(std::floor((x - lo) / (hi - lo) * n));
        if (i >= n)
            i = n - 1;
        out[static_cast<std::size_t>(k)] = i;
    }
    return true;
}

std::optional<CellIndex> Tessellation::cell_index(const Vector& u) const {
    if (u.size() != dimension())
        throw ConfigError("state dimension does not match tessellation");
    CellIndex c;
    if (!locate(u, c))
        return std::nullopt;
    return c;
}

Vector Tessellation::cell_center(const CellIndex& cell) const {
    Vector x(dimension());
    for (Eigen::Index k = 0; k < dimension(); ++k)
        x[k] = box_.lower[k] +
               (cell[static_cast<std::size_t>(k)] + 0.5) * widths_[k];
    return x;
}

std::size_t CellIndexHash::operator()(const CellIndex& c) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ c.size();
    for (auto v : c) {
        h ^= static_cast<std::uint32_t>(v);
        h *= 0x100000001b3ULL;
        h ^= h >> 29;
    }
    h ^= h >> 32;
    h *= 0xd6e8feb86659fd93ULL;
    h ^= h >> 32;
    return static_cast<std::size_t>(h);
}

VisitRegistry::Visit VisitRegistry::visit(const CellIndex& cell) {
    auto [it, inserted] = table_.try_emplace(cell, -generation_);
    if (inserted)
        return {Status::unvisited, 0};
    auto& code = it->second;
    if (code > 0)
        return {Status::labeled, static_cast<int>(code)};
    if (code == -generation_)
        return {Status::visited, 0};
    code = -generation_;
    return {Status::unvisited, 0};
}

VisitRegistry::Visit VisitRegistry::peek(const CellIndex& cell) const {
    auto it = table_.find(cell);
    if (it == table_.end())
        return {Status::unvisited, 0};
    if (it->second > 0)
        return {Status::labeled, static_cast<int>(it->second)};
    if (it->second == -generation_)
        return {Status::visited, 0};
    return {Status::unvisited, 0};
}

void VisitRegistry::assign_label(const CellIndex& cell, int label) {
    if (label < 1)
        throw ConfigError("attractor labels must be positive");
    auto& code = table_[cell];
    if (code > 0) {
        if (code != label)
            throw ConfigError("cell already carries attractor label " +
                              std::to_string(code));
        return;
    }
    code = label;
    ++labeled_;
}

void VisitRegistry::clear() {
    table_.clear();
    generation_ = 1;
    labeled_ = 0;
}

} // namespace attractors
