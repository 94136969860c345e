#include "attractors/run.hpp"

#include <chrono>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "attractors/output.hpp"

namespace attractors {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename F>
auto timed(const char* name, RunReport& report, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    auto finish = [&] {
        const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
        report.timings.emplace_back(name, d.count());
    };
    try {
        if constexpr (std::is_void_v<decltype(body())>) {
            body();
            finish();
        } else {
            auto r = body();
            finish();
            return r;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const PhaseError&) {
        throw;
    } catch (const std::exception& e) {
        throw PhaseError(name, e.what());
    }
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write " + path.string());
    f << content;
    if (!f)
        throw std::runtime_error("failed writing " + path.string());
}

ContinuationResult single_step(BasinFractions fractions, AttractorMap attractors,
                               MappingDiagnostics diagnostics) {
    ContinuationResult r;
    r.parameters.push_back(Vector());
    r.fractions.push_back(std::move(fractions));
    r.attractors.push_back(std::move(attractors));
    r.diagnostics.push_back(diagnostics);
    return r;
}

} // namespace

RunReport execute(const RunConfig& config) {
    RunReport report;
    const ModelSpec spec = config.spec();
    const DynamicalSystem system = spec.make();
    const BoxSampler sampler(config.ic_box(), config.seed);
    const IcSampler ics = std::cref(sampler);
    const auto& mc = config.mapper;

    auto recurrence_mapper = [&] {
        return RecurrenceMapper(system, Tessellation(config.grid_box(), config.cells),
                                mc.recurrence);
    };

    if (config.job == JobKind::continuation) {
        const auto path = ParameterPath::scalar(config.pidx, config.prange);
        if (mc.kind == MapperKind::recurrences) {
            RafmSettings settings{config.samples, config.seeds_per_attractor,
                                  config.match(), config.workers};
            auto mapper = recurrence_mapper();
            report.result = timed("continuation", report, [&] {
                return rafm_continuation(std::move(mapper), path, ics, settings);
            });
        } else {
            FeaturizeContinuationSettings settings;
            settings.samples = config.samples;
            settings.workers = config.workers;
            report.result = timed("continuation", report, [&] {
                return featurize_group_continuation(system, path, ics, spec.featurizer,
                                                    config.grouping(), mc.integration,
                                                    settings, &report.feature_labels,
                                                    &report.features);
            });
        }
        return report;
    }

    if (config.job == JobKind::full_basins) {
        auto mapper = recurrence_mapper();
        report.basins = timed("full-basins", report, [&] { return full_basins(mapper); });
        report.result = single_step(report.basins->fractions(), mapper.attractors(),
                                    mapper.diagnostics());
        return report;
    }

    switch (mc.kind) {
    case MapperKind::recurrences: {
        auto mapper = recurrence_mapper();
        MappingDiagnostics d;
        auto r = timed("mapping", report, [&] {
            return parallel_basins_fractions(mapper, ics, config.samples, 0,
                                             config.workers, &d);
        });
        report.result = single_step(r.fractions, r.attractors, d);
        break;
    }
    case MapperKind::featurize_group: {
        auto r = timed("featurize-group", report, [&] {
            return featurize_fractions(system, ics, config.samples, spec.featurizer,
                                       config.grouping(), mc.integration, config.workers);
        });
        MappingDiagnostics d;
        d.diverged = static_cast<std::size_t>(
            std::count(r.labels.begin(), r.labels.end(), kDiverged));
        report.features.push_back(r.features);
        report.feature_labels.push_back(r.labels);
        report.result = single_step(r.fractions, r.attractors, d);
        break;
    }
    case MapperKind::proximity: {
        AttractorMap known;
        for (std::size_t a = 0; a < mc.known_attractors.size(); ++a) {
            const auto& pts = mc.known_attractors[a];
            Attractor att;
            att.label = static_cast<int>(a) + 1;
            att.points.resize(static_cast<Eigen::Index>(pts.size()), system.dimension());
            for (std::size_t i = 0; i < pts.size(); ++i)
                att.points.row(static_cast<Eigen::Index>(i)) = RunConfig::to_vector(pts[i]).transpose();
            known.emplace(att.label, std::move(att));
        }
        ProximityMapper mapper(system, known, mc.delta, mc.proximity_dt,
                               mc.proximity_max_steps);
        auto r = timed("mapping", report, [&] {
            return basins_fractions(mapper, ics, config.samples);
        });
        MappingDiagnostics d;
        d.diverged = static_cast<std::size_t>(
            std::count(r.labels.begin(), r.labels.end(), kDiverged));
        report.result = single_step(r.fractions, r.attractors, d);
        break;
    }
    }
    return report;
}

void write_outputs(const RunConfig& config, const RunReport& report, const fs::path& dir) {
    const auto& result = report.result;
    fs::create_directories(dir / "attractors");
    std::vector<std::string> files;

    {
        std::ostringstream s;
        write_fractions_table(s, result, config.spec().dimension());
        write_file(dir / "fractions.tsv", s.str());
        files.push_back("fractions.tsv");
    }

    json steps = json::array();
    for (std::size_t k = 0; k < result.size(); ++k) {
        const std::string p = format_parameter(result.parameters[k]);
        json labels = json::array();
        for (const auto& [label, att] : result.attractors[k]) {
            char name[64];
            std::snprintf(name, sizeof name, "step%04zu_label%d.txt", k, label);
            std::ostringstream s;
            write_attractor_dump(s, att, p);
            write_file(dir / "attractors" / name, s.str());
            files.push_back(std::string("attractors/") + name);
            labels.push_back(label);
        }
        const auto& d = result.diagnostics[k];
        steps.push_back({{"parameter", p},
                         {"attractors", result.attractors[k].size()},
                         {"labels", labels},
                         {"diagnostics", {{"found", d.found},
                                          {"converged", d.converged},
                                          {"diverged", d.diverged},
                                          {"exhausted", d.exhausted},
                                          {"steps", d.steps}}}});
    }

    if (config.job == JobKind::continuation) {
        emit_stacked_band_plot(result, dir / "plot.svg");
        files.push_back("plot.svg");
    }
    if (!report.features.empty()) {
        std::ostringstream s;
        const bool stepped = report.features.size() > 1 || config.job == JobKind::continuation;
        for (std::size_t k = 0; k < report.features.size(); ++k)
            write_features_table(s, report.features[k], report.feature_labels[k],
                                 stepped ? static_cast<long>(k) : -1);
        write_file(dir / "features.tsv", s.str());
        files.push_back("features.tsv");
    }
    if (report.basins) {
        std::ostringstream s;
        write_basin_grid(s, *report.basins);
        write_file(dir / "basins.txt", s.str());
        files.push_back("basins.txt");
    }

    // The destination is not part of the result.
    json resolved = to_json(config);
    resolved.erase("output");
    json manifest{{"tool", "attractors"},
                  {"version", kToolVersion},
                  {"config", resolved},
                  {"steps", steps},
                  {"files", files}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");

    json timings = json::object();
    for (const auto& [phase, seconds] : report.timings)
        timings[phase] = seconds;
    write_file(dir / "timings.json", timings.dump(2) + "\n");
}

int run(const RunConfig& config, std::ostream& err) {
    try {
        RunReport report = execute(config);
        try {
            write_outputs(config, report, config.output);
        } catch (const std::exception& e) {
            throw PhaseError("output", e.what());
        }
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 1;
    } catch (const PhaseError& e) {
        err << "run failed in phase " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "run failed: " << e.what() << '\n';
        return 2;
    }
}

} // namespace attractors
