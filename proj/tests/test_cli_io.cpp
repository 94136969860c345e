#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "attractors/config.hpp"
#include "attractors/output.hpp"
#include "attractors/run.hpp"

using namespace attractors;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("attractors_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string error_of(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

ContinuationResult constant_bands(int steps, BasinFractions f) {
    ContinuationResult r;
    for (int k = 0; k < steps; ++k) {
        r.parameters.push_back(Vector::Constant(1, k));
        r.fractions.push_back(f);
        r.attractors.emplace_back();
        r.diagnostics.emplace_back();
    }
    return r;
}

// data-fractions attribute of the band for `label`.
std::string band_values(const std::string& svg, int label) {
    const std::string key = "data-label=\"" + std::to_string(label) + "\" data-fractions=\"";
    const auto at = svg.find(key);
    if (at == std::string::npos)
        return "";
    const auto start = at + key.size();
    return svg.substr(start, svg.find('"', start) - start);
}

} // namespace

TEST_SUITE("cli-io") {

TEST_CASE("minimal config gets zoo defaults") {
    const auto c = parse_config(R"({"model": "lorenz84", "job": "fractions"})");
    CHECK(c.cells == std::vector<std::int32_t>{600, 600, 600});
    CHECK(c.parameters == std::vector<double>{6.886, 1.347, 0.255, 4.0});
    CHECK(c.mapper.kind == MapperKind::recurrences);
    CHECK(c.mapper.recurrence.recurrences_to_find == 1000);
    CHECK(c.grid_min == std::vector<double>{-3, -3, -3});
    CHECK(c.ic_max == c.grid_max);
    CHECK(c.samples == 100);
}

TEST_CASE("configuration errors name the key") {
    CHECK(error_of(R"({"model": "lorenz84", "grid": {"min": [-3, -3], "max": 3}})").find("grid.min") !=
          std::string::npos);
    CHECK(error_of(R"({"model": "lorenz84", "grid": {"min": [-3, -3], "max": 3}})").find("dimension 3") !=
          std::string::npos);
    CHECK(error_of(R"({"model": "henon", "job": "continuation", "continuation": {"pidx": 1}})")
              .find("prange") != std::string::npos);
    CHECK(error_of(R"({"model": "henon", "mapper": {"kind": "recurrences", "n_f": 3}})")
              .find("mapper.n_f") != std::string::npos);
    CHECK(error_of(R"({"model": "henon", "colour": 3})").find("colour") != std::string::npos);
    CHECK(error_of(R"({"model": "nope"})").find("nope") != std::string::npos);
    CHECK(error_of(R"({"model": "henon", "samples": 0})").find("samples") != std::string::npos);
    CHECK(error_of(R"({"model": "henon", "samples": 2.5})").find("samples") != std::string::npos);
    CHECK(error_of(R"({"model": {"name": "henon", "parameters": {"c": 1}}})").find("model.parameters.c") !=
          std::string::npos);
    CHECK(error_of(R"({"model": "henon", "job": "continuation", "continuation": {"pidx": "z", "prange": [1]}})")
              .find("'z'") != std::string::npos);
    CHECK(error_of(R"({"model": "henon", "job": "continuation", "continuation": {"pidx": 3, "prange": [1]}})")
              .find("pidx") != std::string::npos);
    CHECK(error_of(R"({"model": "henon", "job": "sweep"})").find("job") != std::string::npos);
    CHECK(error_of(R"({"model": "henon",)").find("JSON") != std::string::npos);
    CHECK(error_of(R"({"model": "henon", "matching": {"threshold": -1}})").find("threshold") !=
          std::string::npos);
}

TEST_CASE("parameter ranges, names and overrides") {
    const auto c = parse_config(R"({
        "model": {"name": "lorenz84", "parameters": {"G": 1.34}},
        "grid": {"cells": 200},
        "job": "continuation",
        "continuation": {"pidx": "G", "prange": {"start": 1.34, "stop": 1.37, "length": 11}},
        "matching": {"distance": "hausdorff", "threshold": 0.5}
    })");
    CHECK(c.pidx == 2);
    CHECK(c.parameters[1] == 1.34);
    REQUIRE(c.prange.size() == 11);
    CHECK(c.prange.front() == 1.34);
    CHECK(c.prange.back() == doctest::Approx(1.37));
    CHECK(c.cells == std::vector<std::int32_t>{200, 200, 200});
    CHECK(c.distance == DistanceKind::hausdorff);
    CHECK(c.threshold == 0.5);
}

TEST_CASE("resolved config round-trips through the parser") {
    for (const char* text : {
             R"({"model": "double_well", "samples": 10})",
             R"({"model": "henon", "job": "full-basins", "grid": {"cells": [40, 50]}})",
             R"({"model": {"name": "kuramoto", "oscillators": 3}, "mapper": {"kind": "featurize-group", "grouping": "histogram", "edges": [[0, 0.5, 1.0]]}})",
             R"({"model": "double_well", "mapper": {"kind": "proximity", "attractors": [[[1, 0]], [[-1, 0]]]}})",
             R"({"model": "lorenz84", "job": "continuation", "continuation": {"pidx": 2, "prange": [1.34, 1.35]}})"}) {
        CAPTURE(text);
        const auto a = parse_config(text);
        const auto j = to_json(a);
        CHECK(to_json(parse_config(j.dump())) == j);
    }
}

TEST_CASE("double well fractions job writes a normalised table, twice identically") {
    const auto dir = scratch("dw");
    auto c = parse_config(R"({"model": "double_well", "samples": 1000, "seed": 4})");
    c.output = (dir / "a").string();
    std::ostringstream err;
    REQUIRE(run(c, err) == 0);
    c.output = (dir / "b").string();
    REQUIRE(run(c, err) == 0);
    for (const char* f : {"fractions.tsv", "manifest.json", "attractors/step0000_label1.txt",
                          "attractors/step0000_label2.txt"})
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));

    std::istringstream table(slurp(dir / "a" / "fractions.tsv"));
    std::string line;
    std::getline(table, line);
    CHECK(line == "parameter\tlabel\tfraction\tnpoints\tcentroid_1\tcentroid_2");
    double total = 0;
    int rows = 0;
    while (std::getline(table, line)) {
        std::istringstream row(line);
        std::string p;
        int label;
        double f;
        row >> p >> label >> f;
        CHECK(label > 0);
        CHECK(std::abs(f - 0.5) < 0.05);
        total += f;
        ++rows;
    }
    CHECK(rows == 2);
    CHECK(std::abs(total - 1.0) <= 1e-12);

    const auto dump = slurp(dir / "a" / "attractors/step0000_label1.txt");
    CHECK(dump.rfind("# label=1 param=- npoints=1\n", 0) == 0);
    const auto manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
    CHECK(manifest["config"]["samples"] == 1000);
    CHECK(manifest["steps"][0]["attractors"] == 2);
    CHECK(fs::exists(dir / "a" / "timings.json"));
}

TEST_CASE("featurize and full-basins jobs write their extra files") {
    const auto dir = scratch("extra");
    auto f = parse_config(R"({"model": "double_well", "samples": 100,
                             "mapper": {"kind": "featurize-group", "min_pts": 5}})");
    f.output = (dir / "f").string();
    std::ostringstream err;
    REQUIRE(run(f, err) == 0);
    CHECK(fs::exists(dir / "f" / "features.tsv"));

    auto b = parse_config(R"({"model": "double_well", "job": "full-basins", "grid": {"cells": 21}})");
    b.output = (dir / "b").string();
    REQUIRE(run(b, err) == 0);
    const auto grid = slurp(dir / "b" / "basins.txt");
    CHECK(grid.rfind("# shape=21 21\n", 0) == 0);
}

TEST_CASE("number formatting round-trips") {
    for (double x : {0.1, 1.0 / 3.0, 6.886, -1e-300, 12345.678901234567}) {
        CHECK(std::stod(format_number(x)) == x);
    }
    CHECK(format_number(0.5) == "0.5");
    Vector p(2);
    p << 1.5, 2;
    CHECK(format_parameter(p) == "1.5,2");
    CHECK(format_parameter(Vector()) == "-");
}

TEST_CASE("stacked band plot examples") {
    std::ostringstream a;
    write_stacked_band_plot(a, constant_bands(5, {{1, 0.6}, {2, 0.4}}));
    CHECK(band_values(a.str(), 1) == "0.59999999999999998 0.59999999999999998 0.59999999999999998 "
                                     "0.59999999999999998 0.59999999999999998");
    CHECK(band_values(a.str(), 2).rfind("0.40000000000000002", 0) == 0);
    CHECK(a.str().find(label_color(1)) != std::string::npos);
    CHECK(a.str().find(label_color(2)) != std::string::npos);

    std::ostringstream b;
    write_stacked_band_plot(b, constant_bands(1, {{1, 1.0}}));
    CHECK(band_values(b.str(), 1) == "1");

    auto mid = constant_bands(3, {{1, 1.0}});
    mid.fractions[2] = {{1, 0.25}, {3, 0.75}};
    std::ostringstream c;
    write_stacked_band_plot(c, mid);
    CHECK(band_values(c.str(), 3) == "0 0 0.75");

    CHECK(label_color(1) == label_color(13));
    CHECK(label_color(1) != label_color(2));
    CHECK_THROWS_AS(write_stacked_band_plot(c, ContinuationResult{}), InputError);
    CHECK_THROWS(emit_stacked_band_plot(mid, "/nonexistent-dir/x/plot.svg"));
}

TEST_CASE("command line exit codes") {
    const auto dir = scratch("cli");
    const std::string cli = ATTRACTORS_CLI;
    auto write = [&](const char* name, const std::string& text) {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    };
    auto status = [](const std::string& cmd) {
        const int s = std::system((cmd + " 2>/dev/null").c_str());
        return WEXITSTATUS(s);
    };
    const auto good = write("good.json", R"({"model": "double_well", "samples": 50})");
    CHECK(status(cli + " run " + good + " --out " + (dir / "out").string() + " --seed 3 --workers 2") == 0);
    CHECK(fs::exists(dir / "out" / "fractions.tsv"));
    const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(manifest["config"]["seed"] == 3);
    CHECK(manifest["config"]["workers"] == 2);

    const auto bad = write("bad.json", R"({"model": "double_well", "grid": {"min": [0]}})");
    CHECK(status(cli + " run " + bad) == 1);
    CHECK(status(cli + " run " + (dir / "missing.json").string()) == 1);
    CHECK(status(cli + " frobnicate") == 1);
    write("blocker", "x");
    CHECK(status(cli + " run " + good + " --out " + (dir / "blocker" / "sub").string()) == 2);
}

}
