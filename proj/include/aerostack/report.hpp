#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "aerostack/data_model.hpp"
#include "aerostack/error.hpp"

namespace aerostack {

/// Writes `content` to a sibling temp file and renames it over `path`, so
/// readers never observe a partial file. A path of "-" means stdout.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::IoError, "cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) fail(ErrorKind::IoError, "write to '" + tmp.string() + "' failed");
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail(ErrorKind::IoError, "cannot move output into place at '" + path.string() + "'");
    }
}

inline std::string html_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

/// Fixed-precision number for tables; NaN renders as "NA".
inline std::string fixed(double v, int digits = 3) {
    if (!std::isfinite(v)) return "NA";
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

struct ChartSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool points = false;  // scatter dots instead of a polyline
};

namespace svg_detail {

inline std::string num(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << v;
    return os.str();
}

inline std::string tick_label(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

}  // namespace svg_detail

/// Static line/scatter chart. Axis ranges cover every series.
inline std::string svg_line_chart(const std::vector<ChartSeries>& series, std::string_view title,
                                  std::string_view x_label, std::string_view y_label, int width = 800,
                                  int height = 360) {
    using svg_detail::num;
    const double left = 60, right = 20, top = 30, bottom = 50;
    double x0 = HUGE_VAL, x1 = -HUGE_VAL, y0 = HUGE_VAL, y1 = -HUGE_VAL;
    for (const auto& s : series) {
        for (double v : s.x) {
            if (std::isfinite(v)) x0 = std::min(x0, v), x1 = std::max(x1, v);
        }
        for (double v : s.y) {
            if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
        }
    }
    if (!(x0 <= x1)) x0 = 0, x1 = 1;
    if (!(y0 <= y1)) y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    auto sx = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
    auto sy = [&](double v) { return top + ph - (v - y0) / (y1 - y0) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" << html_escape(title)
       << "</text>\n";
    os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
       << "\" fill=\"none\" stroke=\"#888\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double yv = y0 + (y1 - y0) * i / 4.0;
        const double xv = x0 + (x1 - x0) * i / 4.0;
        os << "<text x=\"" << num(left - 4) << "\" y=\"" << num(sy(yv) + 4) << "\" text-anchor=\"end\">"
           << svg_detail::tick_label(yv) << "</text>\n";
        os << "<text x=\"" << num(sx(xv)) << "\" y=\"" << num(top + ph + 16) << "\" text-anchor=\"middle\">"
           << svg_detail::tick_label(xv) << "</text>\n";
    }
    os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << height - 8 << "\" text-anchor=\"middle\">"
       << html_escape(x_label) << "</text>\n";
    os << "<text transform=\"translate(14," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
       << html_escape(y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const std::size_t n = std::min(s.x.size(), s.y.size());
        if (s.points) {
            os << "<g fill=\"" << s.color << "\" fill-opacity=\"0.35\">\n";
            for (std::size_t i = 0; i < n; ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                os << "<circle cx=\"" << num(sx(s.x[i])) << "\" cy=\"" << num(sy(s.y[i])) << "\" r=\"1.5\"/>\n";
            }
            os << "</g>\n";
        } else {
            os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < n; ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                os << num(sx(s.x[i])) << ',' << num(sy(s.y[i])) << ' ';
            }
            os << "\"/>\n";
        }
        const double ly = top + 12 + 14.0 * static_cast<double>(k);
        os << "<rect x=\"" << num(left + 8) << "\" y=\"" << num(ly - 8) << "\" width=\"10\" height=\"10\" fill=\""
           << s.color << "\"/>\n";
        os << "<text x=\"" << num(left + 22) << "\" y=\"" << num(ly + 1) << "\">" << html_escape(s.label)
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

/// Horizontal bar chart, one bar per label in the given order, with an
/// optional error whisker.
inline std::string svg_bar_chart(const std::vector<std::string>& labels, const std::vector<double>& values,
                                 const std::vector<double>& errors, std::string_view title,
                                 std::string_view value_label, int width = 720) {
    using svg_detail::num;
    const double left = 150, right = 30, top = 30, bar = 18, gap = 6, bottom = 40;
    const double height = top + bottom + static_cast<double>(labels.size()) * (bar + gap);
    double vmax = 0, vmin = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double e = i < errors.size() && std::isfinite(errors[i]) ? errors[i] : 0.0;
        if (std::isfinite(values[i])) vmax = std::max(vmax, values[i] + e), vmin = std::min(vmin, values[i] - e);
    }
    if (vmax == vmin) vmax = vmin + 1;
    const double pw = width - left - right;
    auto sx = [&](double v) { return left + (v - vmin) / (vmax - vmin) * pw; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << num(height)
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" << html_escape(title)
       << "</text>\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double y = top + static_cast<double>(i) * (bar + gap);
        const double v = i < values.size() && std::isfinite(values[i]) ? values[i] : 0.0;
        const double a = sx(std::min(0.0, v));
        const double b = sx(std::max(0.0, v));
        os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y + bar - 5) << "\" text-anchor=\"end\">"
           << html_escape(labels[i]) << "</text>\n";
        os << "<rect x=\"" << num(a) << "\" y=\"" << num(y) << "\" width=\"" << num(b - a) << "\" height=\"" << num(bar)
           << "\" fill=\"#4c72b0\"/>\n";
        if (i < errors.size() && std::isfinite(errors[i]) && errors[i] > 0) {
            os << "<line x1=\"" << num(sx(v - errors[i])) << "\" x2=\"" << num(sx(v + errors[i])) << "\" y1=\""
               << num(y + bar / 2) << "\" y2=\"" << num(y + bar / 2) << "\" stroke=\"#222\"/>\n";
        }
    }
    const double axis_y = top + static_cast<double>(labels.size()) * (bar + gap);
    os << "<line x1=\"" << num(left) << "\" x2=\"" << num(left + pw) << "\" y1=\"" << num(axis_y) << "\" y2=\""
       << num(axis_y) << "\" stroke=\"#888\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = vmin + (vmax - vmin) * i / 4.0;
        os << "<text x=\"" << num(sx(v)) << "\" y=\"" << num(axis_y + 14) << "\" text-anchor=\"middle\">"
           << svg_detail::tick_label(v) << "</text>\n";
    }
    os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(axis_y + 30) << "\" text-anchor=\"middle\">"
       << html_escape(value_label) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace aerostack
