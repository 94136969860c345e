#include "attractors/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace attractors {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words)
        out += (out.empty() ? "" : ", ") + w;
    return out;
}

void check_keys(const json& obj, const std::string& where,
                const std::vector<std::string>& allowed) {
    if (!obj.is_object())
        throw ConfigError("'" + where + "' must be an object");
    for (const auto& [key, value] : obj.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) +
                              "' (expected one of: " + join(allowed) + ")");
}

std::string dotted(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
}

double number(const json& v, const std::string& name) {
    if (!v.is_number())
        throw ConfigError("'" + name + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
        throw ConfigError("'" + name + "' must be finite");
    return x;
}

// null stands for +infinity, so the resolved config round-trips.
double number_or_inf(const json& v, const std::string& name) {
    if (v.is_null())
        return std::numeric_limits<double>::infinity();
    return number(v, name);
}

std::int64_t count(const json& v, const std::string& name) {
    if (v.is_number_integer() && v.get<std::int64_t>() >= 1)
        return v.get<std::int64_t>();
    if (v.is_number_float()) {
        const double x = v.get<double>();
        if (x >= 1 && x <= 9.2e18 && std::floor(x) == x)
            return static_cast<std::int64_t>(x);
    }
    throw ConfigError("'" + name + "' must be a positive integer");
}

std::string text(const json& v, const std::string& name) {
    if (!v.is_string())
        throw ConfigError("'" + name + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& name) {
    if (!v.is_array())
        throw ConfigError("'" + name + "' must be a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(number(v[i], name + "[" + std::to_string(i) + "]"));
    return out;
}

// Scalar broadcast or per-axis list.
std::vector<double> per_axis(const json& v, const std::string& name, std::size_t dim) {
    if (v.is_number())
        return std::vector<double>(dim, number(v, name));
    auto out = numbers(v, name);
    if (out.size() != dim)
        throw ConfigError("'" + name + "' has " + std::to_string(out.size()) +
                          " entries but the model has dimension " + std::to_string(dim));
    return out;
}

std::vector<double> parameter_range(const json& v, const std::string& name) {
    if (v.is_array()) {
        auto out = numbers(v, name);
        if (out.empty())
            throw ConfigError("'" + name + "' must not be empty");
        return out;
    }
    check_keys(v, name, {"start", "stop", "length"});
    for (const char* k : {"start", "stop", "length"})
        if (!v.contains(k))
            throw ConfigError("'" + name + "' needs '" + k + "'");
    const double a = number(v["start"], name + ".start");
    const double b = number(v["stop"], name + ".stop");
    const auto n = count(v["length"], name + ".length");
    std::vector<double> out;
    for (std::int64_t i = 0; i < n; ++i)
        out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

void check_box(const std::vector<double>& lo, const std::vector<double>& hi,
               const std::string& name) {
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (!(lo[i] < hi[i]))
            throw ConfigError("'" + name + "' needs min < max on every axis (axis " +
                              std::to_string(i + 1) + ")");
}

template <typename Enum>
Enum pick(const json& v, const std::string& name,
          const std::vector<std::pair<std::string, Enum>>& options) {
    const auto s = text(v, name);
    std::vector<std::string> names;
    for (const auto& [n, e] : options) {
        if (n == s)
            return e;
        names.push_back(n);
    }
    throw ConfigError("'" + name + "' is '" + s + "' (expected one of: " + join(names) + ")");
}

const std::vector<std::pair<std::string, MapperKind>> kMappers{
    {"recurrences", MapperKind::recurrences},
    {"featurize-group", MapperKind::featurize_group},
    {"proximity", MapperKind::proximity}};
const std::vector<std::pair<std::string, JobKind>> kJobs{
    {"fractions", JobKind::fractions},
    {"continuation", JobKind::continuation},
    {"full-basins", JobKind::full_basins}};
const std::vector<std::pair<std::string, DistanceKind>> kDistances{
    {"centroid", DistanceKind::centroid},
    {"hausdorff", DistanceKind::hausdorff},
    {"period-ratio", DistanceKind::period_ratio}};

template <typename Enum>
std::string name_of(Enum e, const std::vector<std::pair<std::string, Enum>>& options) {
    for (const auto& [n, v] : options)
        if (v == e)
            return n;
    return "?";
}

ModelSpec base_spec(const std::string& model, std::size_t oscillators) {
    if (model == "kuramoto")
        return kuramoto_spec(oscillators, 0.0,
                             Vector::LinSpaced(static_cast<Eigen::Index>(oscillators), -1.0, 1.0));
    return model_by_name(model);
}

void parse_mapper(const json& m, RunConfig& c, const ModelSpec& spec) {
    MapperConfig& out = c.mapper;
    out.recurrence = spec.recurrence;
    out.integration = {spec.feature_total, spec.feature_transient, spec.feature_dt,
                       spec.feature_sample_dt};
    if (m.is_null())
        return;
    if (!m.is_object() || !m.contains("kind"))
        throw ConfigError("'mapper' must be an object with a 'kind'");
    out.kind = pick(m["kind"], "mapper.kind", kMappers);
    switch (out.kind) {
    case MapperKind::recurrences: {
        check_keys(m, "mapper", {"kind", "dt", "recurrences_to_find", "points_to_locate",
                                 "steps_to_lose", "max_steps", "hits_to_converge"});
        auto& r = out.recurrence;
        if (m.contains("dt"))
            r.dt = number(m["dt"], "mapper.dt");
        const std::pair<const char*, std::int64_t*> counts[] = {
            {"recurrences_to_find", &r.recurrences_to_find},
            {"points_to_locate", &r.points_to_locate},
            {"steps_to_lose", &r.steps_to_lose},
            {"max_steps", &r.max_steps},
            {"hits_to_converge", &r.hits_to_converge}};
        for (const auto& [key, field] : counts)
            if (m.contains(key))
                *field = count(m[key], dotted("mapper", key));
        r.validate();
        break;
    }
    case MapperKind::featurize_group: {
        check_keys(m, "mapper", {"kind", "grouping", "min_pts", "radius", "edges",
                                 "templates", "max_distance", "total", "transient",
                                 "dt", "sample_dt"});
        if (m.contains("grouping")) {
            out.grouping = text(m["grouping"], "mapper.grouping");
            if (out.grouping != "clustering" && out.grouping != "histogram" &&
                out.grouping != "nearest-template")
                throw ConfigError("'mapper.grouping' is '" + out.grouping +
                                  "' (expected one of: clustering, histogram, nearest-template)");
        }
        if (m.contains("min_pts"))
            out.min_pts = static_cast<int>(count(m["min_pts"], "mapper.min_pts"));
        if (m.contains("radius") && !m["radius"].is_null())
            out.radius = number(m["radius"], "mapper.radius");
        if (m.contains("edges")) {
            if (!m["edges"].is_array())
                throw ConfigError("'mapper.edges' must be a list of lists");
            for (std::size_t i = 0; i < m["edges"].size(); ++i)
                out.edges.push_back(numbers(m["edges"][i], "mapper.edges[" + std::to_string(i) + "]"));
        }
        if (m.contains("templates")) {
            if (!m["templates"].is_array())
                throw ConfigError("'mapper.templates' must be a list of lists");
            for (std::size_t i = 0; i < m["templates"].size(); ++i)
                out.templates.push_back(
                    numbers(m["templates"][i], "mapper.templates[" + std::to_string(i) + "]"));
        }
        if (m.contains("max_distance"))
            out.max_distance = number_or_inf(m["max_distance"], "mapper.max_distance");
        auto& in = out.integration;
        const std::pair<const char*, double*> times[] = {
            {"total", &in.total}, {"transient", &in.transient},
            {"dt", &in.dt}, {"sample_dt", &in.sample_dt}};
        for (const auto& [key, field] : times)
            if (m.contains(key))
                *field = number(m[key], dotted("mapper", key));
        if (!(in.total >= 0) || !(in.transient >= 0) || !(in.dt > 0) || !(in.sample_dt > 0))
            throw ConfigError("'mapper' integration needs total, transient >= 0 and dt, sample_dt > 0");
        validate(c.grouping());
        break;
    }
    case MapperKind::proximity: {
        check_keys(m, "mapper", {"kind", "attractors", "delta", "dt", "max_steps"});
        if (!m.contains("attractors") || !m["attractors"].is_array() || m["attractors"].empty())
            throw ConfigError("'mapper.attractors' must list the known attractors as point lists");
        for (std::size_t a = 0; a < m["attractors"].size(); ++a) {
            const auto& pts = m["attractors"][a];
            const std::string name = "mapper.attractors[" + std::to_string(a) + "]";
            if (!pts.is_array() || pts.empty())
                throw ConfigError("'" + name + "' must be a non-empty list of points");
            std::vector<std::vector<double>> set;
            for (std::size_t i = 0; i < pts.size(); ++i)
                set.push_back(per_axis(pts[i], name + "[" + std::to_string(i) + "]",
                                       static_cast<std::size_t>(spec.dimension())));
            out.known_attractors.push_back(std::move(set));
        }
        if (m.contains("delta"))
            out.delta = number(m["delta"], "mapper.delta");
        if (m.contains("dt"))
            out.proximity_dt = number(m["dt"], "mapper.dt");
        if (m.contains("max_steps"))
            out.proximity_max_steps = count(m["max_steps"], "mapper.max_steps");
        if (!(out.delta > 0) || !(out.proximity_dt > 0))
            throw ConfigError("'mapper.delta' and 'mapper.dt' must be positive");
        break;
    }
    }
}

} // namespace

std::string to_string(MapperKind kind) { return name_of(kind, kMappers); }
std::string to_string(JobKind kind) { return name_of(kind, kJobs); }
std::string to_string(DistanceKind kind) { return name_of(kind, kDistances); }

ModelSpec RunConfig::spec() const {
    ModelSpec s = base_spec(model, oscillators);
    if (!parameters.empty())
        s.parameters = to_vector(parameters);
    return s;
}

MatchConfig RunConfig::match() const {
    MatchConfig m;
    m.threshold = threshold;
    switch (distance) {
    case DistanceKind::centroid: m.distance = CentroidDistance{}; break;
    case DistanceKind::hausdorff: m.distance = HausdorffDistance{}; break;
    case DistanceKind::period_ratio:
        m.distance = CustomDistance{period_ratio_distance, "period-ratio"};
        break;
    }
    return m;
}

GroupingConfig RunConfig::grouping() const {
    if (mapper.grouping == "histogram")
        return Histogram{mapper.edges};
    if (mapper.grouping == "nearest-template") {
        NearestTemplate t;
        for (std::size_t i = 0; i < mapper.templates.size(); ++i)
            t.templates.emplace(static_cast<int>(i) + 1, to_vector(mapper.templates[i]));
        t.max_distance = mapper.max_distance;
        return t;
    }
    return Clustering{mapper.min_pts, mapper.radius};
}

RunConfig parse_config(const std::string& text) {
    json tree;
    try {
        tree = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config_tree(tree);
}

RunConfig parse_config_tree(const json& tree) {
    check_keys(tree, "", {"model", "grid", "ic_box", "mapper", "job", "continuation",
                          "samples", "seed", "seeds_per_attractor", "matching",
                          "output", "workers"});
    RunConfig c;
    if (!tree.contains("model"))
        throw ConfigError("missing key 'model' (a zoo name such as \"lorenz84\")");

    // Model first: everything else defaults from it.
    const json& m = tree["model"];
    json overrides;
    if (m.is_string()) {
        c.model = m.get<std::string>();
    } else {
        check_keys(m, "model", {"name", "parameters", "oscillators"});
        if (!m.contains("name"))
            throw ConfigError("missing key 'model.name'");
        c.model = text(m["name"], "model.name");
        if (m.contains("oscillators")) {
            if (c.model != "kuramoto")
                throw ConfigError("'model.oscillators' only applies to kuramoto");
            c.oscillators = static_cast<std::size_t>(count(m["oscillators"], "model.oscillators"));
        }
        if (m.contains("parameters"))
            overrides = m["parameters"];
    }
    ModelSpec spec = base_spec(c.model, c.oscillators);
    const auto dim = static_cast<std::size_t>(spec.dimension());
    c.parameters.assign(spec.parameters.data(), spec.parameters.data() + spec.parameters.size());
    if (!overrides.is_null()) {
        check_keys(overrides, "model.parameters", spec.parameter_names);
        for (const auto& [key, value] : overrides.items()) {
            const auto it = std::find(spec.parameter_names.begin(), spec.parameter_names.end(), key);
            c.parameters[static_cast<std::size_t>(it - spec.parameter_names.begin())] =
                number(value, "model.parameters." + key);
        }
    }

    c.grid_min.assign(spec.box.lower.data(), spec.box.lower.data() + dim);
    c.grid_max.assign(spec.box.upper.data(), spec.box.upper.data() + dim);
    c.cells = spec.cells_per_axis;
    if (tree.contains("grid")) {
        const json& g = tree["grid"];
        check_keys(g, "grid", {"min", "max", "cells"});
        if (g.contains("min"))
            c.grid_min = per_axis(g["min"], "grid.min", dim);
        if (g.contains("max"))
            c.grid_max = per_axis(g["max"], "grid.max", dim);
        if (g.contains("cells")) {
            if (g["cells"].is_array()) {
                if (g["cells"].size() != dim)
                    throw ConfigError("'grid.cells' has " + std::to_string(g["cells"].size()) +
                                      " entries but the model has dimension " + std::to_string(dim));
                c.cells.clear();
                for (std::size_t i = 0; i < dim; ++i)
                    c.cells.push_back(static_cast<std::int32_t>(
                        count(g["cells"][i], "grid.cells[" + std::to_string(i) + "]")));
            } else {
                const auto n = count(g["cells"], "grid.cells");
                if (n > std::numeric_limits<std::int32_t>::max())
                    throw ConfigError("'grid.cells' is too large");
                c.cells.assign(dim, static_cast<std::int32_t>(n));
            }
        }
    }
    check_box(c.grid_min, c.grid_max, "grid");

    c.ic_min = c.grid_min;
    c.ic_max = c.grid_max;
    if (tree.contains("ic_box")) {
        const json& b = tree["ic_box"];
        check_keys(b, "ic_box", {"min", "max"});
        if (b.contains("min"))
            c.ic_min = per_axis(b["min"], "ic_box.min", dim);
        if (b.contains("max"))
            c.ic_max = per_axis(b["max"], "ic_box.max", dim);
        check_box(c.ic_min, c.ic_max, "ic_box");
    }

    parse_mapper(tree.contains("mapper") ? tree["mapper"] : json(), c, spec);

    if (tree.contains("job"))
        c.job = pick(tree["job"], "job", kJobs);
    if (tree.contains("continuation")) {
        if (c.job != JobKind::continuation)
            throw ConfigError("'continuation' is only valid with job = \"continuation\"");
        const json& k = tree["continuation"];
        check_keys(k, "continuation", {"pidx", "prange"});
        if (k.contains("pidx")) {
            if (k["pidx"].is_string()) {
                const auto name = k["pidx"].get<std::string>();
                const auto it = std::find(spec.parameter_names.begin(), spec.parameter_names.end(), name);
                if (it == spec.parameter_names.end())
                    throw ConfigError("'continuation.pidx' names unknown parameter '" + name +
                                      "' (expected one of: " + join(spec.parameter_names) + ")");
                c.pidx = static_cast<std::size_t>(it - spec.parameter_names.begin()) + 1;
            } else {
                c.pidx = static_cast<std::size_t>(count(k["pidx"], "continuation.pidx"));
            }
        }
        if (k.contains("prange"))
            c.prange = parameter_range(k["prange"], "continuation.prange");
    }
    if (c.job == JobKind::continuation) {
        if (c.prange.empty())
            throw ConfigError("job \"continuation\" needs 'continuation.prange'");
        if (c.pidx == 0)
            throw ConfigError("job \"continuation\" needs 'continuation.pidx'");
        if (c.pidx > c.parameters.size())
            throw ConfigError("'continuation.pidx' is " + std::to_string(c.pidx) + " but " +
                              c.model + " has " + std::to_string(c.parameters.size()) +
                              " parameters");
        if (c.mapper.kind == MapperKind::proximity)
            throw ConfigError("job \"continuation\" needs mapper.kind \"recurrences\" or "
                              "\"featurize-group\"");
    }
    if (c.job == JobKind::full_basins && c.mapper.kind != MapperKind::recurrences)
        throw ConfigError("job \"full-basins\" needs mapper.kind \"recurrences\"");

    if (tree.contains("samples"))
        c.samples = static_cast<std::size_t>(count(tree["samples"], "samples"));
    if (tree.contains("seed")) {
        const json& s = tree["seed"];
        if (!s.is_number_unsigned())
            throw ConfigError("'seed' must be a non-negative integer");
        c.seed = s.get<std::uint64_t>();
    }
    if (tree.contains("seeds_per_attractor"))
        c.seeds_per_attractor =
            static_cast<std::size_t>(count(tree["seeds_per_attractor"], "seeds_per_attractor"));
    if (tree.contains("matching")) {
        const json& mt = tree["matching"];
        check_keys(mt, "matching", {"distance", "threshold"});
        if (mt.contains("distance"))
            c.distance = pick(mt["distance"], "matching.distance", kDistances);
        if (mt.contains("threshold")) {
            c.threshold = number_or_inf(mt["threshold"], "matching.threshold");
            if (c.threshold < 0)
                throw ConfigError("'matching.threshold' must be >= 0");
        }
    }
    if (tree.contains("output"))
        c.output = text(tree["output"], "output");
    if (tree.contains("workers"))
        c.workers = static_cast<std::size_t>(count(tree["workers"], "workers"));
    return c;
}

json to_json(const RunConfig& c) {
    const ModelSpec spec = c.spec();
    json params = json::object();
    for (std::size_t i = 0; i < c.parameters.size(); ++i)
        params[spec.parameter_names[i]] = c.parameters[i];
    json model{{"name", c.model}, {"parameters", params}};
    if (c.model == "kuramoto")
        model["oscillators"] = c.oscillators;

    json mapper{{"kind", to_string(c.mapper.kind)}};
    switch (c.mapper.kind) {
    case MapperKind::recurrences: {
        const auto& r = c.mapper.recurrence;
        mapper["dt"] = r.dt;
        mapper["recurrences_to_find"] = r.recurrences_to_find;
        mapper["points_to_locate"] = r.points_to_locate;
        mapper["steps_to_lose"] = r.steps_to_lose;
        mapper["max_steps"] = r.max_steps;
        mapper["hits_to_converge"] = r.hits_to_converge;
        break;
    }
    case MapperKind::featurize_group: {
        mapper["grouping"] = c.mapper.grouping;
        mapper["min_pts"] = c.mapper.min_pts;
        mapper["radius"] = c.mapper.radius ? json(*c.mapper.radius) : json(nullptr);
        mapper["edges"] = c.mapper.edges;
        mapper["templates"] = c.mapper.templates;
        mapper["max_distance"] = std::isfinite(c.mapper.max_distance)
                                     ? json(c.mapper.max_distance) : json(nullptr);
        const auto& in = c.mapper.integration;
        mapper["total"] = in.total;
        mapper["transient"] = in.transient;
        mapper["dt"] = in.dt;
        mapper["sample_dt"] = in.sample_dt;
        break;
    }
    case MapperKind::proximity:
        mapper["attractors"] = c.mapper.known_attractors;
        mapper["delta"] = c.mapper.delta;
        mapper["dt"] = c.mapper.proximity_dt;
        mapper["max_steps"] = c.mapper.proximity_max_steps;
        break;
    }

    json out{{"model", model},
             {"grid", {{"min", c.grid_min}, {"max", c.grid_max}, {"cells", c.cells}}},
             {"ic_box", {{"min", c.ic_min}, {"max", c.ic_max}}},
             {"mapper", mapper},
             {"job", to_string(c.job)},
             {"samples", c.samples},
             {"seed", c.seed},
             {"seeds_per_attractor", c.seeds_per_attractor},
             {"matching", {{"distance", to_string(c.distance)},
                           {"threshold", std::isfinite(c.threshold) ? json(c.threshold)
                                                                    : json(nullptr)}}},
             {"output", c.output},
             {"workers", c.workers}};
    if (c.job == JobKind::continuation)
        out["continuation"] = {{"pidx", c.pidx}, {"prange", c.prange}};
    return out;
}

} // namespace attractors
