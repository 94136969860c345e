#include "attractors/models.hpp"

#include <cmath>
#include <numbers>

namespace attractors {

namespace {

Vector or_default(const Vector& given, std::initializer_list<double> defaults) {
    if (given.size() > 0) {
        if (given.size() != static_cast<Eigen::Index>(defaults.size()))
            throw ConfigError("expected " + std::to_string(defaults.size()) +
                              " parameters, got " + std::to_string(given.size()));
        return given;
    }
    Vector p(static_cast<Eigen::Index>(defaults.size()));
    Eigen::Index i = 0;
    for (double d : defaults)
        p[i++] = d;
    return p;
}

Vector column_means(const Trajectory& tr) {
    return tr.states.colwise().mean().transpose();
}

Vector column_stds(const Trajectory& tr) {
    const Eigen::RowVectorXd mean = tr.states.colwise().mean();
    const Eigen::MatrixXd centered = tr.states.rowwise() - mean;
    return (centered.colwise().squaredNorm() / static_cast<double>(tr.size()))
        .cwiseSqrt()
        .transpose();
}

} // namespace

DynamicalSystem lorenz84(const Vector& params) {
    const Vector p = or_default(params, {6.886, 1.347, 0.255, 4.0});
    auto rule = [](Vector& du, const Vector& u, const Vector& p, double) {
        const double F = p[0], G = p[1], a = p[2], b = p[3];
        const double x = u[0], y = u[1], z = u[2];
        du[0] = -y * y - z * z - a * x + a * F;
        du[1] = x * y - y - b * x * z + G;
        du[2] = b * x * y + x * z - z;
    };
    return {TimeKind::continuous, rule, Vector::Ones(3), p};
}

ModelSpec lorenz84_spec() {
    ModelSpec m{.name = "lorenz84",
                .parameters = lorenz84().parameters(),
                .parameter_names = {"F", "G", "a", "b"},
                .box = StateSpaceBox::cube(3, -3.0, 3.0),
                .cells_per_axis = {600, 600, 600},
                .recurrence = {},
                .featurizer = {},
                .factory = [](const Vector& p) { return lorenz84(p); }};
    m.recurrence.dt = 0.05;
    m.recurrence.recurrences_to_find = 1000;
    m.recurrence.points_to_locate = 2000;
    m.recurrence.steps_to_lose = 100;
    m.recurrence.max_steps = 100'000'000;
    m.recurrence.hits_to_converge = 2;
    m.featurizer = [](const Trajectory& tr) {
        Vector f(4);
        f.head(3) = column_means(tr);
        f[3] = column_stds(tr)[0];
        return f;
    };
    m.feature_total = 200.0;
    m.feature_transient = 500.0;
    m.feature_dt = 0.05;
    m.feature_sample_dt = 0.5;
    return m;
}

DynamicalSystem henon(const Vector& params) {
    const Vector p = or_default(params, {1.4, 0.3});
    auto rule = [](Vector& next, const Vector& u, const Vector& p, double) {
        next[0] = 1.0 - p[0] * u[0] * u[0] + u[1];
        next[1] = p[1] * u[0];
    };
    return {TimeKind::discrete, rule, Vector::Zero(2), p};
}

ModelSpec henon_spec() {
    ModelSpec m{.name = "henon",
                .parameters = henon().parameters(),
                .parameter_names = {"a", "b"},
                .box = StateSpaceBox::cube(2, -2.5, 2.5),
                .cells_per_axis = {400, 400},
                .recurrence = {},
                .featurizer = [](const Trajectory& tr) {
                    Vector f(2);
                    f[0] = column_means(tr)[0];
                    f[1] = column_stds(tr)[0];
                    return f;
                },
                .factory = [](const Vector& p) { return henon(p); }};
    m.recurrence.dt = 1.0;
    m.recurrence.recurrences_to_find = 100;
    m.recurrence.points_to_locate = 1000;
    m.recurrence.steps_to_lose = 20;
    m.recurrence.hits_to_converge = 20;
    m.feature_total = 1000.0;
    m.feature_transient = 1000.0;
    m.feature_dt = 1.0;
    m.feature_sample_dt = 1.0;
    return m;
}

DynamicalSystem double_well(const Vector& params) {
    const Vector p = or_default(params, {1.0});
    auto rule = [](Vector& du, const Vector& u, const Vector& p, double) {
        du[0] = p[0] * u[0] - u[0] * u[0] * u[0];
        du[1] = -u[1];
    };
    return {TimeKind::continuous, rule, Vector::Zero(2), p};
}

ModelSpec double_well_spec() {
    // 101 cells keep the nodes (+-1, 0) off cell faces.
    ModelSpec m{.name = "double_well",
                .parameters = double_well().parameters(),
                .parameter_names = {"p"},
                .box = StateSpaceBox::cube(2, -2.0, 2.0),
                .cells_per_axis = {101, 101},
                .recurrence = {},
                .featurizer = [](const Trajectory& tr) { return column_means(tr); },
                .factory = [](const Vector& p) { return double_well(p); }};
    m.recurrence.dt = 0.1;
    m.recurrence.recurrences_to_find = 100;
    m.recurrence.points_to_locate = 100;
    m.recurrence.steps_to_lose = 100;
    m.recurrence.hits_to_converge = 20;
    m.feature_total = 10.0;
    m.feature_transient = 30.0;
    m.feature_dt = 0.05;
    m.feature_sample_dt = 0.5;
    return m;
}

double order_parameter(const Eigen::Ref<const Vector>& phases) {
    const double c = phases.array().cos().sum();
    const double s = phases.array().sin().sum();
    return std::hypot(c, s) / static_cast<double>(phases.size());
}

DynamicalSystem kuramoto_first_order(std::size_t n, double coupling,
                                     const Vector& frequencies) {
    if (n < 2)
        throw ConfigError("Kuramoto network needs at least two oscillators");
    if (frequencies.size() != static_cast<Eigen::Index>(n))
        throw ConfigError("one natural frequency per oscillator required");
    Vector p(static_cast<Eigen::Index>(n) + 1);
    p[0] = coupling;
    p.tail(static_cast<Eigen::Index>(n)) = frequencies;
    auto rule = [](Vector& du, const Vector& theta, const Vector& p, double) {
        // sum_j sin(tj - ti) = S cos(ti) - C sin(ti)
        const auto n = theta.size();
        const double C = theta.array().cos().sum();
        const double S = theta.array().sin().sum();
        const double k = p[0] / static_cast<double>(n);
        for (Eigen::Index i = 0; i < n; ++i)
            du[i] = p[i + 1] + k * (S * std::cos(theta[i]) - C * std::sin(theta[i]));
    };
    DynamicalSystem sys(TimeKind::continuous, rule,
                        Vector::Zero(static_cast<Eigen::Index>(n)), p);
    sys.set_periods(std::vector<double>(n, 2.0 * std::numbers::pi));
    return sys;
}

ModelSpec kuramoto_spec(std::size_t n, double coupling,
                        const Vector& frequencies) {
    const auto dim = static_cast<Eigen::Index>(n);
    // Validates n and the frequency count.
    const auto probe = kuramoto_first_order(n, coupling, frequencies);
    std::vector<std::string> names{"K"};
    for (std::size_t i = 1; i <= n; ++i)
        names.push_back("w" + std::to_string(i));
    ModelSpec m{.name = "kuramoto",
                .parameters = probe.parameters(),
                .parameter_names = names,
                .box = StateSpaceBox::cube(dim, 0.0, 2.0 * std::numbers::pi),
                .cells_per_axis = std::vector<std::int32_t>(n, 32),
                .recurrence = {},
                .featurizer = [](const Trajectory& tr) {
                    double r = 0.0;
                    for (Eigen::Index i = 0; i < tr.size(); ++i)
                        r += order_parameter(tr.states.row(i).transpose());
                    Vector f(1);
                    f[0] = r / static_cast<double>(tr.size());
                    return f;
                },
                .factory = [n](const Vector& p) {
                    return kuramoto_first_order(
                        n, p[0], p.tail(static_cast<Eigen::Index>(n)));
                }};
    m.recurrence.dt = 0.1;
    m.recurrence.recurrences_to_find = 200;
    m.recurrence.points_to_locate = 500;
    m.recurrence.steps_to_lose = 100;
    m.recurrence.max_steps = 10'000'000;
    m.recurrence.hits_to_converge = 20;
    m.feature_total = 50.0;
    m.feature_transient = 100.0;
    m.feature_dt = 0.05;
    m.feature_sample_dt = 0.5;
    return m;
}

ModelSpec model_by_name(const std::string& name) {
    if (name == "lorenz84")
        return lorenz84_spec();
    if (name == "henon")
        return henon_spec();
    if (name == "double_well")
        return double_well_spec();
    if (name == "kuramoto")
        return kuramoto_spec(5, 0.0, Vector::LinSpaced(5, -1.0, 1.0));
    throw ConfigError("unknown model '" + name + "' (known: lorenz84, henon, "
                      "double_well, kuramoto)");
}

std::vector<std::string> model_names() {
    return {"lorenz84", "henon", "double_well", "kuramoto"};
}

} // namespace attractors
