#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace attractors {

using Vector = Eigen::VectorXd;

/// Invalid user configuration: bad indices, inconsistent dimensions,
/// non-positive counts.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid data handed to an algorithm (non-finite features and the like).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A state became non-finite or exceeded the divergence ceiling.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(double time);
    double time() const noexcept { return time_; }

private:
    double time_;
};

enum class TimeKind { continuous, discrete };

/// Evolution rule. For continuous systems `out` receives du/dt, for
/// discrete systems it receives the next state. Must not allocate `out`.
using Rule = std::function<void(Vector& out, const Vector& state,
                                const Vector& params, double t)>;

class DynamicalSystem {
public:
    DynamicalSystem(TimeKind kind, Rule rule, Vector state, Vector params);

    TimeKind kind() const noexcept { return kind_; }
    bool is_discrete() const noexcept { return kind_ == TimeKind::discrete; }
    Eigen::Index dimension() const noexcept { return state_.size(); }

    const Vector& state() const noexcept { return state_; }
    void set_state(const Vector& u);

    const Vector& parameters() const noexcept { return params_; }
    /// Parameter indices are 1-based throughout the toolkit.
    double parameter(std::size_t index) const;
    void set_parameter(std::size_t index, double value);

    void evaluate(Vector& out, const Vector& u, double t) const {
        out.resize(u.size());
        rule_(out, u, params_, t);
    }

    /// Axes with a positive period are wrapped into [0, period) before any
    /// cell lookup or proximity test. Zero means "not periodic".
    void set_periods(std::vector<double> periods);
    const std::vector<double>& periods() const noexcept { return periods_; }
    bool has_periodic_axes() const noexcept { return !periods_.empty(); }
    void wrap(Vector& u) const;

    double divergence_ceiling() const noexcept { return ceiling_; }
    void set_divergence_ceiling(double ceiling);

private:
    TimeKind kind_;
    Rule rule_;
    Vector state_;
    Vector params_;
    std::vector<double> periods_;
    double ceiling_ = 1e12;
};

/// Fixed-step evolution with a private workspace. Continuous systems use the
/// classical 4th-order Runge-Kutta scheme, discrete systems apply the map once
/// per step.
class Integrator {
public:
    Integrator(const DynamicalSystem& system, double dt, double t0 = 0.0);

    /// Advances `u` in place by one step. Returns false if the new state is
    /// non-finite or its norm exceeds the system's ceiling.
    bool advance(Vector& u);

    double time() const noexcept { return t_; }
    double dt() const noexcept { return dt_; }
    const DynamicalSystem& system() const noexcept { return *system_; }

private:
    const DynamicalSystem* system_;
    double dt_;
    double t_;
    Vector k1_, k2_, k3_, k4_, tmp_;
};

bool is_diverged(const Vector& u, double ceiling);

/// One step from `u`. Throws DivergenceError on a non-finite result.
Vector step(const DynamicalSystem& system, const Vector& u, double dt,
            double t = 0.0);

struct StateSpaceBox {
    StateSpaceBox(Vector lower, Vector upper);
    static StateSpaceBox cube(Eigen::Index dim, double lo, double hi);

    Eigen::Index dimension() const noexcept { return lower.size(); }
    double volume() const { return (upper - lower).prod(); }
    bool contains(const Vector& u) const;
    Vector center() const { return 0.5 * (lower + upper); }

    Vector lower;
    Vector upper;
};

struct Trajectory {
    Eigen::MatrixXd states; ///< one row per recorded sample
    double sample_dt = 0.0;
    double transient = 0.0;
    double total = 0.0;

    Eigen::Index size() const noexcept { return states.rows(); }
};

/// Maps a trajectory to a fixed-length feature vector.
using Featurizer = std::function<Vector(const Trajectory&)>;

/// Records states every `sample_dt` for a span `total`, after discarding the
/// transient. Throws DivergenceError carrying the failure time.
Trajectory trajectory(const DynamicalSystem& system, const Vector& ic,
                      double total, double transient, double dt,
                      double sample_dt);

/// Index-addressed initial-condition source: the i-th condition depends only
/// on (seed, i), so any partition of indices across workers reproduces the
/// same sequence.
using IcSampler = std::function<Vector(std::uint64_t index)>;

/// Uniform sampler over the open box, counter-based on SplitMix64.
class BoxSampler {
public:
    BoxSampler(StateSpaceBox box, std::uint64_t seed);

    Vector operator()(std::uint64_t index) const;
    const StateSpaceBox& box() const noexcept { return box_; }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    StateSpaceBox box_;
    std::uint64_t seed_;
};

std::vector<Vector> sample_initial_conditions(const StateSpaceBox& box,
                                              std::size_t n,
                                              std::uint64_t seed);

} // namespace attractors
