#include "attractors/dynamics.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace attractors {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in the open interval (0, 1).
double open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace

DivergenceError::DivergenceError(double time)
    : std::runtime_error("state diverged at t = " + std::to_string(time)),
      time_(time) {}

DynamicalSystem::DynamicalSystem(TimeKind kind, Rule rule, Vector state,
                                 Vector params)
    : kind_(kind), rule_(std::move(rule)), state_(std::move(state)),
      params_(std::move(params)) {
    if (!rule_)
        throw ConfigError("dynamical system needs an evolution rule");
    if (state_.size() == 0)
        throw ConfigError("dynamical system needs a non-empty state");
}

void DynamicalSystem::set_state(const Vector& u) {
    if (u.size() != state_.size())
        throw ConfigError("state dimension " + std::to_string(u.size()) +
                          " does not match system dimension " +
                          std::to_string(state_.size()));
    state_ = u;
}

double DynamicalSystem::parameter(std::size_t index) const {
    if (index < 1 || index > static_cast<std::size_t>(params_.size()))
        throw ConfigError("parameter index " + std::to_string(index) +
                          " outside 1.." + std::to_string(params_.size()));
    return params_[static_cast<Eigen::Index>(index - 1)];
}

void DynamicalSystem::set_parameter(std::size_t index, double value) {
    if (index < 1 || index > static_cast<std::size_t>(params_.size()))
        throw ConfigError("parameter index " + std::to_string(index) +
                          " outside 1.." + std::to_string(params_.size()));
    params_[static_cast<Eigen::Index>(index - 1)] = value;
}

void DynamicalSystem::set_periods(std::vector<double> periods) {
    if (!periods.empty() &&
        periods.size() != static_cast<std::size_t>(state_.size()))
        throw ConfigError("one period per state axis required");
    for (double p : periods)
        if (!(p >= 0.0) || !std::isfinite(p))
            throw ConfigError("periods must be finite and non-negative");
    periods_ = std::move(periods);
}

void DynamicalSystem::wrap(Vector& u) const {
    for (std::size_t i = 0; i < periods_.size(); ++i) {
        const double p = periods_[i];
        if (p > 0.0) {
            double& x = u[static_cast<Eigen::Index>(i)];
            x = std::fmod(x, p);
            if (x < 0.0)
                x += p;
            if (x >= p) // fmod of a tiny negative can round up to p
                x = 0.0;
        }
    }
}

void DynamicalSystem::set_divergence_ceiling(double ceiling) {
    if (!(ceiling > 0.0))
        throw ConfigError("divergence ceiling must be positive");
    ceiling_ = ceiling;
}

bool is_diverged(const Vector& u, double ceiling) {
    if (!u.allFinite())
        return true;
    return u.norm() > ceiling;
}

Integrator::Integrator(const DynamicalSystem& system, double dt, double t0)
    : system_(&system), dt_(system.is_discrete() ? 1.0 : dt), t_(t0) {
    if (!system.is_discrete() && !(dt > 0.0 && std::isfinite(dt)))
        throw ConfigError("time step must be positive");
    const auto d = system.dimension();
    k1_.resize(d);
    k2_.resize(d);
    k3_.resize(d);
    k4_.resize(d);
    tmp_.resize(d);
}

bool Integrator::advance(Vector& u) {
    const auto& sys = *system_;
    if (sys.is_discrete()) {
        sys.evaluate(tmp_, u, t_);
        u.swap(tmp_);
        t_ += 1.0;
    } else {
        const double h = dt_;
        sys.evaluate(k1_, u, t_);
        tmp_.noalias() = u + (0.5 * h) * k1_;
        sys.evaluate(k2_, tmp_, t_ + 0.5 * h);
        tmp_.noalias() = u + (0.5 * h) * k2_;
        sys.evaluate(k3_, tmp_, t_ + 0.5 * h);
        tmp_.noalias() = u + h * k3_;
        sys.evaluate(k4_, tmp_, t_ + h);
        u += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
        t_ += h;
    }
    return !is_diverged(u, sys.divergence_ceiling());
}

Vector step(const DynamicalSystem& system, const Vector& u, double dt,
            double t) {
    if (u.size() != system.dimension())
        throw ConfigError("state dimension does not match system");
    Integrator integ(system, dt, t);
    Vector next = u;
    if (!integ.advance(next))
        throw DivergenceError(integ.time());
    return next;
}

StateSpaceBox::StateSpaceBox(Vector lo, Vector hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size() || lower.size() == 0)
        throw ConfigError("box bounds must have equal, non-zero dimension");
    if (!lower.allFinite() || !upper.allFinite())
        throw ConfigError("box bounds must be finite");
    if (!(lower.array() < upper.array()).all())
        throw ConfigError("box requires min < max on every axis");
}

StateSpaceBox StateSpaceBox::cube(Eigen::Index dim, double lo, double hi) {
    return {Vector::Constant(dim, lo), Vector::Constant(dim, hi)};
}

bool StateSpaceBox::contains(const Vector& u) const {
    return u.size() == lower.size() && (u.array() >= lower.array()).all() &&
           (u.array() < upper.array()).all();
}

Trajectory trajectory(const DynamicalSystem& system, const Vector& ic,
                      double total, double transient, double dt,
                      double sample_dt) {
    if (ic.size() != system.dimension())
        throw ConfigError("initial condition dimension does not match system");
    if (!(total > 0.0) || !(transient >= 0.0) || !(sample_dt > 0.0))
        throw ConfigError("trajectory needs T > 0, T_tr >= 0, sample dt > 0");
    const double h = system.is_discrete() ? 1.0 : dt;
    if (!(h > 0.0))
        throw ConfigError("time step must be positive");

    const double ratio = sample_dt / h;
    const auto stride = static_cast<long long>(std::llround(ratio));
    if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9 * ratio)
        throw ConfigError("sample interval must be an integer multiple of dt");
    const auto transient_steps =
        static_cast<long long>(std::floor(transient / h + 1e-9));
    const auto samples =
        static_cast<Eigen::Index>(std::floor(total / sample_dt + 1e-9)) + 1;

    Integrator integ(system, h);
    Vector u = ic;
    for (long long i = 0; i < transient_steps; ++i)
        if (!integ.advance(u))
            throw DivergenceError(integ.time());

    Trajectory out;
    out.sample_dt = sample_dt;
    out.transient = transient;
    out.total = total;
    out.states.resize(samples, system.dimension());
    out.states.row(0) = u.transpose();
    for (Eigen::Index s = 1; s < samples; ++s) {
        for (long long i = 0; i < stride; ++i)
            if (!integ.advance(u))
                throw DivergenceError(integ.time());
        out.states.row(s) = u.transpose();
    }
    return out;
}

BoxSampler::BoxSampler(StateSpaceBox box, std::uint64_t seed)
    : box_(std::move(box)), seed_(seed) {}

Vector BoxSampler::operator()(std::uint64_t index) const {
    const auto d = box_.dimension();
    Vector u(d);
    const std::uint64_t stream = splitmix64(seed_ ^ 0x5851f42d4c957f2dULL);
    for (Eigen::Index k = 0; k < d; ++k) {
        const std::uint64_t counter =
            index * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(k);
        const double r = open_unit(splitmix64(stream + splitmix64(counter)));
        const double lo = box_.lower[k];
        const double hi = box_.upper[k];
        double x = lo + r * (hi - lo);
        if (x <= lo)
            x = std::nextafter(lo, hi);
        if (x >= hi)
            x = std::nextafter(hi, lo);
        u[k] = x;
    }
    return u;
}

std::vector<Vector> sample_initial_conditions(const StateSpaceBox& box,
                                              std::size_t n,
                                              std::uint64_t seed) {
    if (n < 1)
        throw ConfigError("need at least one sample");
    BoxSampler sampler(box, seed);
    std::vector<Vector> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(sampler(i));
    return out;
}

} // namespace attractors
