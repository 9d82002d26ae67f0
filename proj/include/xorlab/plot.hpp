#pragma once

// Standalone SVG line charts.
//
// emit_plot() accepts three CSV layouts:
//   series,x,y                      long format, one series per distinct label
//   c,n,m,...,sat_fraction,...      sat_sweep summaries, one series per n
//   w,n,m,...,sat_fraction,...      window_check summaries, x = m - n
// Chart layout: 640x420 canvas, plot area inset 70/20/30/50 (left/right/top/
// bottom), five ticks per axis, legend in the top-right corner.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "xorlab/instance.hpp"
#include "xorlab/thresholds.hpp"

namespace xorlab::lab {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::vector<double> x_marks;  // dashed vertical guides
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline CsvTable parse_csv(const std::string& text)
{
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ls(s);
        while (std::getline(ls, cell, ',')) out.push_back(cell);
        if (!s.empty() && s.back() == ',') out.emplace_back();
        return out;
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size()) {
            throw std::invalid_argument("malformed CSV: row " + std::to_string(t.rows.size() + 1) + " has " +
                                        std::to_string(cells.size()) + " fields, header has " +
                                        std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty()) throw std::invalid_argument("malformed CSV: empty input");
    if (t.rows.empty()) throw std::invalid_argument("malformed CSV: no data rows");
    return t;
}

namespace detail {

inline double parse_number(const std::string& s)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed CSV: '" + s + "' is not a number");
    }
    if (used != s.size()) throw std::invalid_argument("malformed CSV: '" + s + "' is not a number");
    return v;
}

inline std::ptrdiff_t find_column(const CsvTable& t, const std::string& name)
{
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    return it == t.header.end() ? -1 : it - t.header.begin();
}

inline std::string escape(const std::string& s)
{
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

inline std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

} // namespace detail

inline std::string render_svg(const Chart& chart)
{
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : chart.series) {
        if (s.x.size() != s.y.size()) throw std::invalid_argument("render_svg: series '" + s.name + "' x/y size mismatch");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!(x0 <= x1)) throw std::invalid_argument("render_svg: no finite points");
    if (x1 == x0) { x0 -= 0.5; x1 += 0.5; }
    if (y1 == y0) { y0 -= 0.5; y1 += 0.5; }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    constexpr double W = 640, H = 420, L = 70, R = 20, T = 30, B = 50;
    auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto sy = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\">\n";
    os << "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
    os << "<text x=\"320\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << detail::escape(chart.title) << "</text>\n";
    os << "<g stroke=\"black\" fill=\"none\"><line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\""
       << H - B << "\"/><line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\"/></g>\n";
    os << "<g font-size=\"10\" class=\"ticks\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
        os << "<text x=\"" << detail::num(sx(xv)) << "\" y=\"" << H - B + 14 << "\" text-anchor=\"middle\">"
           << detail::tick_label(xv) << "</text>\n";
        os << "<text x=\"" << L - 6 << "\" y=\"" << detail::num(sy(yv) + 3) << "\" text-anchor=\"end\">"
           << detail::tick_label(yv) << "</text>\n";
    }
    os << "</g>\n";
    os << "<text class=\"x-label\" x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
       << detail::escape(chart.x_label) << "</text>\n";
    os << "<text class=\"y-label\" x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
       << (T + H - B) / 2 << ")\">" << detail::escape(chart.y_label) << "</text>\n";
    for (double xm : chart.x_marks) {
        if (xm < x0 || xm > x1) continue;
        os << "<line class=\"mark\" x1=\"" << detail::num(sx(xm)) << "\" y1=\"" << T << "\" x2=\"" << detail::num(sx(xm))
           << "\" y2=\"" << H - B << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    }
    std::size_t idx = 0;
    for (const auto& s : chart.series) {
        const char* color = detail::palette[idx % std::size(detail::palette)];
        os << "<polyline class=\"series\" data-name=\"" << detail::escape(s.name) << "\" fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            os << (first ? "" : " ") << detail::num(sx(s.x[i])) << ',' << detail::num(sy(s.y[i]));
            first = false;
        }
        os << "\"/>\n";
        const double ly = T + 12 + 14 * static_cast<double>(idx);
        os << "<line x1=\"" << W - R - 110 << "\" y1=\"" << ly << "\" x2=\"" << W - R - 92 << "\" y2=\"" << ly
           << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\"" << W - R - 88 << "\" y=\"" << ly + 3
           << "\" font-size=\"10\">" << detail::escape(s.name) << "</text>\n";
        ++idx;
    }
    os << "</svg>\n";
    return os.str();
}

// Chart for a CSV in one of the layouts listed at the top of this file.
inline Chart chart_from_csv(const CsvTable& t)
{
    using detail::find_column;
    using detail::parse_number;
    Chart chart;
    if (find_column(t, "series") >= 0 && find_column(t, "x") >= 0 && find_column(t, "y") >= 0) {
        const auto cs = find_column(t, "series"), cx = find_column(t, "x"), cy = find_column(t, "y");
        std::map<std::string, std::size_t> index;
        for (const auto& row : t.rows) {
            auto [it, fresh] = index.emplace(row[cs], chart.series.size());
            if (fresh) chart.series.push_back({row[cs], {}, {}});
            chart.series[it->second].x.push_back(parse_number(row[cx]));
            chart.series[it->second].y.push_back(parse_number(row[cy]));
        }
        chart.x_label = "x";
        chart.y_label = "y";
        return chart;
    }
    const auto cf = find_column(t, "sat_fraction"), cn = find_column(t, "n"), cm = find_column(t, "m");
    if (cf < 0 || cn < 0 || cm < 0) throw std::invalid_argument("malformed CSV: unrecognised column layout");
    const bool window = find_column(t, "w") >= 0;
    const auto cc = find_column(t, "c");
    if (!window && cc < 0) throw std::invalid_argument("malformed CSV: unrecognised column layout");
    std::map<double, std::size_t> index;
    for (const auto& row : t.rows) {
        const double n = parse_number(row[cn]);
        auto [it, fresh] = index.emplace(n, chart.series.size());
        if (fresh) chart.series.push_back({"n=" + detail::tick_label(n), {}, {}});
        const double x = window ? parse_number(row[cm]) - n : parse_number(row[cc]);
        chart.series[it->second].x.push_back(x);
        chart.series[it->second].y.push_back(parse_number(row[cf]));
    }
    for (auto& s : chart.series) {
        std::vector<std::size_t> order(s.x.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s.x[a] < s.x[b]; });
        Series sorted{s.name, {}, {}};
        for (auto i : order) {
            sorted.x.push_back(s.x[i]);
            sorted.y.push_back(s.y[i]);
        }
        s = std::move(sorted);
    }
    chart.title = window ? "satisfiable fraction across the window" : "satisfiable fraction";
    chart.x_label = window ? "m - n" : "c = m/n";
    chart.y_label = "fraction satisfiable";
    return chart;
}

// Reads csv_path and writes out_svg. Nothing is written if the CSV is rejected.
inline void emit_plot(const std::string& csv_path, const std::string& out_svg)
{
    const Chart chart = chart_from_csv(parse_csv(read_file(csv_path)));
    write_file(out_svg, render_svg(chart));
}

// H_k(alpha, zeta_choice(k, c, alpha); c) on an evenly spaced alpha grid in
// (0, 1/2], one series per c. Values above 1/2 are dominated by their mirror
// images, so they are not drawn.
inline Chart hk_chart(int k, const std::vector<double>& cs, std::size_t samples = 400)
{
    if (samples < 2) throw std::invalid_argument("hk_chart: samples must be >= 2");
    Chart chart;
    chart.title = "H_" + std::to_string(k) + "(alpha, zeta; c)";
    chart.x_label = "alpha";
    chart.y_label = "H_k";
    const double ak = thresholds::alpha_k(k);
    chart.x_marks = {ak};
    for (double c : cs) {
        Series s{"c=" + detail::tick_label(c), {}, {}};
        const double lambda = thresholds::lambda_of(c * k);
        for (std::size_t i = 1; i <= samples; ++i) {
            const double alpha = 0.5 * static_cast<double>(i) / static_cast<double>(samples);
            s.x.push_back(alpha);
            s.y.push_back(thresholds::H_k_at(alpha, thresholds::zeta_choice(k, c, alpha), c, k, lambda));
        }
        chart.series.push_back(std::move(s));
    }
    return chart;
}

// Long-format "series,x,y" CSV of a chart.
inline std::string chart_csv(const Chart& chart)
{
    std::ostringstream os;
    os << "series,x,y\n";
    char buf[64];
    for (const auto& s : chart.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            std::snprintf(buf, sizeof buf, ",%.12g,%.12g\n", s.x[i], s.y[i]);
            os << s.name << buf;
        }
    }
    return os.str();
}

inline void emit_hk_plot(int k, const std::vector<double>& cs, const std::string& out_svg, std::size_t samples = 400)
{
    write_file(out_svg, render_svg(hk_chart(k, cs, samples)));
}

} // namespace xorlab::lab
