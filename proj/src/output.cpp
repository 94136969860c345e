#include "attractors/output.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace attractors {

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_parameter(const Vector& point) {
    if (point.size() == 0)
        return "-";
    std::string s;
    for (Eigen::Index i = 0; i < point.size(); ++i)
        s += (i ? "," : "") + format_number(point[i]);
    return s;
}

void write_fractions_table(std::ostream& out, const ContinuationResult& result,
                           Eigen::Index dimension) {
    out << "parameter\tlabel\tfraction\tnpoints";
    for (Eigen::Index d = 0; d < dimension; ++d)
        out << "\tcentroid_" << d + 1;
    out << '\n';
    for (std::size_t s = 0; s < result.size(); ++s) {
        const std::string p = format_parameter(result.parameters[s]);
        for (const auto& [label, f] : result.fractions[s]) {
            out << p << '\t' << label << '\t' << format_number(f);
            auto it = result.attractors[s].find(label);
            if (it == result.attractors[s].end()) {
                out << "\t0";
                for (Eigen::Index d = 0; d < dimension; ++d)
                    out << "\tnan";
            } else {
                out << '\t' << it->second.size();
                const Vector c = it->second.centroid();
                for (Eigen::Index d = 0; d < dimension; ++d)
                    out << '\t' << format_number(c[d]);
            }
            out << '\n';
        }
    }
}

void write_attractor_dump(std::ostream& out, const Attractor& attractor,
                          const std::string& parameter) {
    out << "# label=" << attractor.label << " param=" << parameter
        << " npoints=" << attractor.points.rows() << '\n';
    for (Eigen::Index i = 0; i < attractor.points.rows(); ++i) {
        for (Eigen::Index j = 0; j < attractor.points.cols(); ++j)
            out << (j ? " " : "") << format_number(attractor.points(i, j));
        out << '\n';
    }
}

void write_features_table(std::ostream& out, const FeatureMatrix& features,
                          const GroupLabels& labels, long step) {
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        if (step >= 0)
            out << step << '\t';
        for (Eigen::Index j = 0; j < features.cols(); ++j)
            out << format_number(features(i, j)) << '\t';
        out << labels[static_cast<std::size_t>(i)] << '\n';
    }
}

void write_basin_grid(std::ostream& out, const BasinGrid& grid) {
    out << "# shape=";
    for (std::size_t i = 0; i < grid.shape.size(); ++i)
        out << (i ? " " : "") << grid.shape[i];
    out << '\n';
    const std::size_t line = grid.shape.empty() ? 1 : static_cast<std::size_t>(grid.shape.back());
    for (std::size_t i = 0; i < grid.labels.size(); ++i)
        out << grid.labels[i] << ((i + 1) % line == 0 ? '\n' : ' ');
}

std::string label_color(int label) {
    static const std::array<const char*, 12> palette{
        "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
        "#e377c2", "#17becf", "#bcbd22", "#393b79", "#637939", "#843c39"};
    if (label < 1)
        return "#7f7f7f";
    return palette[static_cast<std::size_t>(label - 1) % palette.size()];
}

void write_stacked_band_plot(std::ostream& out, const ContinuationResult& result) {
    if (result.size() < 1)
        throw InputError("stacked band plot needs at least one parameter value");
    const std::size_t n = result.size();
    const bool scalar = result.parameters.front().size() == 1;
    std::vector<double> x(n);
    for (std::size_t s = 0; s < n; ++s)
        x[s] = scalar ? result.parameters[s][0] : static_cast<double>(s);

    // Interval owned by each parameter value.
    std::vector<double> left(n), right(n);
    for (std::size_t s = 0; s < n; ++s) {
        left[s] = s == 0 ? x[0] : 0.5 * (x[s - 1] + x[s]);
        right[s] = s + 1 == n ? x[n - 1] : 0.5 * (x[s] + x[s + 1]);
    }
    double x0 = x.front(), x1 = x.back();
    if (n == 1 || !(x1 > x0)) {
        x0 -= 0.5;
        x1 += 0.5;
        left.front() = x0;
        right.back() = x1;
    }

    // Bands stacked by ascending label; divergence on top.
    std::vector<int> order;
    for (const auto& fr : result.fractions)
        for (const auto& [label, f] : fr)
            if (std::find(order.begin(), order.end(), label) == order.end())
                order.push_back(label);
    std::sort(order.begin(), order.end(), [](int a, int b) {
        return (a < 0) != (b < 0) ? b < 0 : a < b;
    });

    const double W = 640, H = 400, ml = 60, mr = 20, mt = 20, mb = 50;
    const double pw = W - ml - mr, ph = H - mt - mb;
    auto px = [&](double v) { return ml + (v - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return mt + (1.0 - v) * ph; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

    std::vector<double> base(n, 0.0);
    for (int label : order) {
        std::vector<double> top(n);
        std::string values;
        for (std::size_t s = 0; s < n; ++s) {
            auto it = result.fractions[s].find(label);
            const double f = it == result.fractions[s].end() ? 0.0 : it->second;
            top[s] = base[s] + f;
            values += (s ? " " : "") + format_number(f);
        }
        out << "<polygon class=\"band\" data-label=\"" << label << "\" data-fractions=\""
            << values << "\" fill=\"" << label_color(label) << "\" points=\"";
        for (std::size_t s = 0; s < n; ++s)
            out << format_number(px(left[s])) << ',' << format_number(py(top[s])) << ' '
                << format_number(px(right[s])) << ',' << format_number(py(top[s])) << ' ';
        for (std::size_t s = n; s-- > 0;)
            out << format_number(px(right[s])) << ',' << format_number(py(base[s])) << ' '
                << format_number(px(left[s])) << ',' << format_number(py(base[s]))
                << (s ? " " : "");
        out << "\"/>\n";
        base = top;
    }

    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = k / 4.0;
        out << "<text x=\"" << ml - 6 << "\" y=\"" << format_number(py(v) + 4)
            << "\" font-size=\"11\" text-anchor=\"end\">" << format_number(v) << "</text>\n";
    }
    for (double v : {x.front(), x.back()})
        out << "<text x=\"" << format_number(px(v)) << "\" y=\"" << H - mb + 16
            << "\" font-size=\"11\" text-anchor=\"middle\">" << format_number(v) << "</text>\n";
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 10
        << "\" font-size=\"12\" text-anchor=\"middle\">"
        << (scalar ? "parameter" : "step") << "</text>\n";
    out << "<text x=\"14\" y=\"" << mt + ph / 2 << "\" font-size=\"12\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 14 " << mt + ph / 2 << ")\">basin fraction</text>\n";
    out << "</svg>\n";
}

void emit_stacked_band_plot(const ContinuationResult& result,
                            const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write " + path.string());
    write_stacked_band_plot(f, result);
    if (!f)
        throw std::runtime_error("failed writing " + path.string());
}

} // namespace attractors
