#pragma once

#include <functional>
#include <string>
#include <vector>

#include "attractors/dynamics.hpp"
#include "attractors/recurrences.hpp"

namespace attractors {

/// A ready-made system together with the settings it is usually explored
/// with.
struct ModelSpec {
    std::string name;
    Vector parameters;
    std::vector<std::string> parameter_names;
    StateSpaceBox box;
    std::vector<std::int32_t> cells_per_axis;
    RecurrenceParams recurrence;
    Featurizer featurizer;
    /// Integration settings for the featurizer route: T, T_tr, dt, sample dt.
    double feature_total = 0.0;
    double feature_transient = 0.0;
    double feature_dt = 0.0;
    double feature_sample_dt = 0.0;
    std::function<DynamicalSystem(const Vector&)> factory;

    Eigen::Index dimension() const noexcept { return box.dimension(); }
    DynamicalSystem make() const { return factory(parameters); }
    DynamicalSystem make(const Vector& params) const { return factory(params); }
};

/// Lorenz-84 low-order atmosphere model, parameters [F, G, a, b].
///   x' = -y^2 - z^2 - a x + a F
///   y' = x y - y - b x z + G
///   z' = b x y + x z - z
DynamicalSystem lorenz84(const Vector& params = Vector());
ModelSpec lorenz84_spec();

/// Henon map, parameters [a, b]: x' = 1 - a x^2 + y, y' = b x.
/// Henon, Commun. Math. Phys. 50 (1976).
DynamicalSystem henon(const Vector& params = Vector());
ModelSpec henon_spec();

/// Gradient flow with two stable nodes at (+-sqrt(p), 0), parameter [p]:
///   x' = p x - x^3,  y' = -y.
/// The basin boundary is the plane x = 0.
DynamicalSystem double_well(const Vector& params = Vector());
ModelSpec double_well_spec();

/// First-order Kuramoto network, parameters [K, w_1..w_n]:
///   theta_i' = w_i + (K/n) sum_j sin(theta_j - theta_i).
/// Kuramoto (1975); Strogatz, Physica D 143 (2000). Phases wrap on [0, 2pi).
DynamicalSystem kuramoto_first_order(std::size_t n, double coupling,
                                     const Vector& frequencies);
ModelSpec kuramoto_spec(std::size_t n, double coupling,
                        const Vector& frequencies);

/// |mean_j exp(i theta_j)|.
double order_parameter(const Eigen::Ref<const Vector>& phases);

/// Zoo lookup by name ("lorenz84", "henon", "double_well", "kuramoto").
/// Kuramoto defaults to n = 5, K = 0, unit-spaced frequencies.
ModelSpec model_by_name(const std::string& name);
std::vector<std::string> model_names();

} // namespace attractors
