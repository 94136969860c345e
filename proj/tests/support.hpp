#pragma once

#include <random>

#include "attractors/dynamics.hpp"
#include "attractors/recurrences.hpp"

namespace testing_support {

using namespace attractors;

// x' = -x in every coordinate; the origin is the only attractor.
inline DynamicalSystem linear_decay(Eigen::Index dim) {
    return DynamicalSystem(
        TimeKind::continuous,
        [](Vector& out, const Vector& u, const Vector&, double) { out = -u; },
        Vector::Zero(dim), Vector::Zero(0));
}

// x' = p x - x^3 alone; stable nodes at +-sqrt(p), boundary x = 0.
inline DynamicalSystem double_well_1d(double p = 1.0) {
    return DynamicalSystem(
        TimeKind::continuous,
        [](Vector& out, const Vector& u, const Vector& q, double) {
            out.resize(1);
            out[0] = q[0] * u[0] - u[0] * u[0] * u[0];
        },
        Vector::Zero(1), Vector::Constant(1, p));
}

// A period-k cycle on the integers mod k, shifted by +1 each step; values
// stay at the cell centres of a k-cell grid over [0, k).
inline DynamicalSystem rotation_map(int k) {
    return DynamicalSystem(
        TimeKind::discrete,
        [k](Vector& out, const Vector& u, const Vector&, double) {
            out = u;
            out[0] = std::fmod(u[0] + 1.0, static_cast<double>(k));
        },
        Vector::Constant(1, 0.5), Vector::Zero(0));
}

// An attractor made of random points; cells are distinct synthetic indices.
inline Attractor random_attractor(std::mt19937_64& rng, int label, int points,
                                  int dim, double spread, double offset) {
    std::uniform_real_distribution<double> u(-spread, spread);
    Attractor a;
    a.label = label;
    a.points.resize(points, dim);
    for (int i = 0; i < points; ++i)
        for (int j = 0; j < dim; ++j)
            a.points(i, j) = offset + u(rng);
    for (int i = 0; i < points; ++i)
        a.cells.push_back({label, i});
    return a;
}

inline Attractor point_attractor(int label, std::initializer_list<double> xs) {
    Attractor a;
    a.label = label;
    a.points.resize(1, static_cast<Eigen::Index>(xs.size()));
    Eigen::Index j = 0;
    for (double x : xs)
        a.points(0, j++) = x;
    a.cells.push_back({label});
    return a;
}

inline Attractor attractor_with_cells(int label, int cells) {
    Attractor a;
    a.label = label;
    a.points = Eigen::MatrixXd::Zero(cells, 1);
    for (int i = 0; i < cells; ++i) {
        a.points(i, 0) = i;
        a.cells.push_back({i});
    }
    return a;
}

} // namespace testing_support
