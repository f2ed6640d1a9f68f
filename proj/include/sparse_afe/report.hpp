#ifndef SPARSE_AFE_REPORT_HPP
#define SPARSE_AFE_REPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "experiment.hpp"
#include "metrics.hpp"

namespace sparse_afe {

/// 9 significant digits, trailing zeros kept: 0.001 in dB prints as -30.0000000.
inline std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.9g", v);
    return buf;
}

struct CsvOptions {
    bool linear{false}; // write linear MSD (`<label>_msd`) instead of dB (`<label>_msd_db`)
};

/// Header `iteration,<label>_msd_db,...` then one LF-terminated row per iteration.
inline std::string render_csv(const ExperimentResult& result, CsvOptions options = {}) {
    std::string out = "iteration";
    for (const auto& e : result.entries) {
        out += ',';
        out += e.label;
        out += options.linear ? "_msd" : "_msd_db";
    }
    out += '\n';
    const std::size_t n = result.entries.empty() ? 0 : result.entries.front().curve.size();
    for (std::size_t k = 0; k < n; ++k) {
        out += std::to_string(k);
        for (const auto& e : result.entries) {
            const double v = e.curve.msd[k];
            out += ',';
            out += format_number(options.linear || std::isnan(v) ? v : to_db(v));
        }
        out += '\n';
    }
    return out;
}

/// One record per algorithm: label, steady_state_db, convergence_iteration, trials, diverged_trials
/// (plus msd_sum, and post_change_convergence_iteration for tracking runs). NaN is written as null.
inline nlohmann::json summary_json(const ExperimentResult& result) {
    auto records = nlohmann::json::array();
    for (const auto& e : result.entries) {
        nlohmann::json r;
        r["label"]           = e.label;
        r["steady_state_db"] = e.aborted() ? nlohmann::json(nullptr) : nlohmann::json(e.steady_state_db);
        r["convergence_iteration"] =
            e.aborted() ? nlohmann::json(nullptr) : nlohmann::json(e.convergence_iteration);
        if (e.post_change_convergence_iteration) {
            r["post_change_convergence_iteration"] = *e.post_change_convergence_iteration;
        }
        r["msd_sum"]         = e.aborted() ? nlohmann::json(nullptr) : nlohmann::json(e.msd_sum);
        r["trials"]          = e.curve.trials;
        r["diverged_trials"] = e.diverged_trials;
        if (!e.diagnostic.empty()) {
            r["diagnostic"] = e.diagnostic;
        }
        records.push_back(std::move(r));
    }
    return records;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void emit_csv(const ExperimentResult& result, const std::filesystem::path& path, CsvOptions options = {}) {
    write_text_file(path, render_csv(result, options));
}

inline void emit_summary(const ExperimentResult& result, const std::filesystem::path& path) {
    write_text_file(path, summary_json(result).dump(2) + "\n");
}

/// Learning curves in dB, one column per algorithm; the common input of the plotter.
struct CurveTable {
    std::vector<std::string>         labels;
    std::vector<std::vector<double>> db; // db[series][iteration]
};

inline CurveTable curve_table(const ExperimentResult& result) {
    CurveTable t;
    for (const auto& e : result.entries) {
        t.labels.push_back(e.label);
        std::vector<double> col(e.curve.size());
        std::transform(e.curve.msd.begin(), e.curve.msd.end(), col.begin(),
                       [](double v) { return std::isnan(v) ? v : to_db(v); });
        t.db.push_back(std::move(col));
    }
    return t;
}

/// Reads a CSV written by emit_csv (dB or linear columns) back into a dB table.
inline CurveTable parse_curves_csv(const std::string& text) {
    std::istringstream in(text);
    std::string        line;
    if (!std::getline(in, line) || line.rfind("iteration", 0) != 0) {
        throw ShapeError("CSV header must start with 'iteration'");
    }
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string              cell;
        std::istringstream       ss(s);
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        return cells;
    };

    CurveTable        t;
    std::vector<bool> linear;
    const auto        header = split(line);
    for (std::size_t i = 1; i < header.size(); ++i) {
        const std::string& h = header[i];
        if (h.size() > 7 && h.ends_with("_msd_db")) {
            t.labels.push_back(h.substr(0, h.size() - 7));
            linear.push_back(false);
        } else if (h.size() > 4 && h.ends_with("_msd")) {
            t.labels.push_back(h.substr(0, h.size() - 4));
            linear.push_back(true);
        } else {
            throw ShapeError("unrecognized CSV column '" + h + "'");
        }
    }
    t.db.resize(t.labels.size());
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw ShapeError("CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size()));
        }
        for (std::size_t i = 1; i < cells.size(); ++i) {
            double v = std::numeric_limits<double>::quiet_NaN();
            if (cells[i] != "nan") {
                try {
                    v = std::stod(cells[i]);
                } catch (const std::exception&) {
                    throw ShapeError("bad CSV number '" + cells[i] + "'");
                }
            }
            t.db[i - 1].push_back(linear[i - 1] && !std::isnan(v) ? to_db(v) : v);
        }
    }
    return t;
}

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

// Tick spacing of 1, 2 or 5 times a power of ten giving roughly `target` ticks.
inline double nice_step(double span, int target) {
    const double raw  = span / target;
    const double mag  = std::pow(10.0, std::floor(std::log10(raw)));
    const double frac = raw / mag;
    return (frac < 1.5 ? 1.0 : frac < 3.5 ? 2.0 : frac < 7.5 ? 5.0 : 10.0) * mag;
}

} // namespace detail

/// Self-contained SVG learning-curve figure: iteration vs MSD (dB), one line per series.
inline std::string render_svg(const CurveTable& table, const std::string& title) {
    std::size_t n = 0;
    double      lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : table.db) {
        n = std::max(n, s.size());
        for (double v : s) {
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    if (table.labels.empty() || n == 0) {
        throw ShapeError("nothing to plot");
    }
    if (!std::isfinite(lo)) {
        lo = -1.0;
        hi = 0.0;
    }
    const double ystep = detail::nice_step(std::max(hi - lo, 1.0), 8);
    const double ymin  = std::floor(lo / ystep) * ystep;
    double       ymax  = std::ceil(hi / ystep) * ystep;
    if (ymax <= ymin) {
        ymax = ymin + ystep;
    }
    const double xmax  = static_cast<double>(std::max<std::size_t>(n - 1, 1));

    constexpr double W = 800, H = 500, left = 70, right = 160, top = 40, bottom = 60;
    const double     pw = W - left - right, ph = H - top - bottom;
    auto             px = [&](double x) { return left + pw * x / xmax; };
    auto             py = [&](double y) { return top + ph * (ymax - y) / (ymax - ymin); };

    static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

    using detail::svg_num;
    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_num(W) + "\" height=\"" + svg_num(H) +
         "\" viewBox=\"0 0 " + svg_num(W) + " " + svg_num(H) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + svg_num(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         detail::xml_escape(title) + "</text>\n";

    // grid + ticks
    for (double y = ymin; y <= ymax + 1e-9; y += ystep) {
        s += "<line x1=\"" + svg_num(left) + "\" y1=\"" + svg_num(py(y)) + "\" x2=\"" + svg_num(left + pw) + "\" y2=\"" +
             svg_num(py(y)) + "\" stroke=\"#dddddd\"/>\n";
        s += "<text x=\"" + svg_num(left - 6) + "\" y=\"" + svg_num(py(y) + 4) + "\" text-anchor=\"end\">" +
             svg_num(y) + "</text>\n";
    }
    const double xstep = detail::nice_step(xmax, 8);
    for (double x = 0; x <= xmax + 1e-9; x += xstep) {
        s += "<line x1=\"" + svg_num(px(x)) + "\" y1=\"" + svg_num(top) + "\" x2=\"" + svg_num(px(x)) + "\" y2=\"" +
             svg_num(top + ph) + "\" stroke=\"#eeeeee\"/>\n";
        s += "<text x=\"" + svg_num(px(x)) + "\" y=\"" + svg_num(top + ph + 16) + "\" text-anchor=\"middle\">" +
             std::to_string(static_cast<long long>(x)) + "</text>\n";
    }
    s += "<rect x=\"" + svg_num(left) + "\" y=\"" + svg_num(top) + "\" width=\"" + svg_num(pw) + "\" height=\"" +
         svg_num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
    s += "<text x=\"" + svg_num(left + pw / 2) + "\" y=\"" + svg_num(H - 18) +
         "\" text-anchor=\"middle\">Iteration</text>\n";
    s += "<text x=\"18\" y=\"" + svg_num(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         svg_num(top + ph / 2) + ")\">MSD (dB)</text>\n";

    for (std::size_t i = 0; i < table.db.size(); ++i) {
        const char* color = palette[i % std::size(palette)];
        std::string points;
        auto        flush = [&] {
            if (!points.empty()) {
                s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.2\" points=\"" +
                     points + "\"/>\n";
                points.clear();
            }
        };
        const auto& series = table.db[i];
        for (std::size_t k = 0; k < series.size(); ++k) {
            if (!std::isfinite(series[k])) {
                flush();
                continue;
            }
            points += svg_num(px(static_cast<double>(k))) + "," + svg_num(py(series[k])) + " ";
        }
        flush();

        const double ly = top + 14 + 20 * static_cast<double>(i);
        s += "<line x1=\"" + svg_num(left + pw + 12) + "\" y1=\"" + svg_num(ly) + "\" x2=\"" + svg_num(left + pw + 36) +
             "\" y2=\"" + svg_num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + svg_num(left + pw + 42) + "\" y=\"" + svg_num(ly + 4) + "\">" +
             detail::xml_escape(table.labels[i]) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

inline std::string plot_title(const ExperimentConfig& c) {
    std::string t = std::to_string(c.channel_length) + "-tap channel, m = " + std::to_string(c.sparsity_m) + ", " +
                    detail::svg_num(c.snr_db) + " dB SNR, " + std::to_string(c.trials) + " trials";
    if (c.scenario == Scenario::tracking) {
        t += ", channel change at k = " + std::to_string(c.change_at);
    }
    return t;
}

/// Throws ShapeError (and writes nothing) when the result has no curves.
inline void emit_plot(const ExperimentResult& result, const std::filesystem::path& path) {
    write_text_file(path, render_svg(curve_table(result), plot_title(result.config)));
}

} // namespace sparse_afe

#endif // SPARSE_AFE_REPORT_HPP
