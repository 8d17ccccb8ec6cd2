#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "errors.hpp"

namespace epochdd::svg {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
                          "#bcbd22", "#e377c2"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log = false;

    double map(double v, double pix_lo, double pix_hi) const {
        double a = log ? std::log10(v) : v;
        double l = log ? std::log10(lo) : lo;
        double h = log ? std::log10(hi) : hi;
        if (h <= l) h = l + 1.0;
        return pix_lo + (a - l) / (h - l) * (pix_hi - pix_lo);
    }

    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            int e_lo = static_cast<int>(std::floor(std::log10(lo)));
            int e_hi = static_cast<int>(std::ceil(std::log10(hi)));
            int stride = std::max(1, (e_hi - e_lo) / 8);
            for (int e = e_lo; e <= e_hi; e += stride)
                out.push_back(std::pow(10.0, e));
        } else {
            double span = hi - lo;
            if (span <= 0.0) span = 1.0;
            double raw = span / 6.0;
            double mag = std::pow(10.0, std::floor(std::log10(raw)));
            double step = mag;
            for (double c : {1.0, 2.0, 5.0, 10.0})
                if (mag * c >= raw) {
                    step = mag * c;
                    break;
                }
            double first = std::ceil(lo / step) * step;
            for (double v = first; v <= hi + 1e-12 * span; v += step)
                out.push_back(v);
        }
        return out;
    }
};

}  // namespace

void write_line_plot(const std::filesystem::path& path, const PlotSpec& spec,
                     const std::vector<Series>& series) {
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const Series& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double x = s.x[i], y = s.y[i];
            if (spec.log_x && x <= 0.0) continue;
            if (spec.log_y && y <= 0.0) continue;
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    if (!(x_lo < x_hi)) {
        x_lo = spec.log_x ? 0.1 : 0.0;
        x_hi = 1.0;
    }
    if (!(y_lo < y_hi)) {
        y_lo = spec.log_y ? 0.1 : 0.0;
        y_hi = y_lo + 1.0;
    }
    if (!spec.log_y) {
        double pad = 0.05 * (y_hi - y_lo);
        y_lo -= pad;
        y_hi += pad;
        if (!spec.log_y && y_lo < 0.0 && y_lo > -pad) y_lo = 0.0;
    }

    Axis xa{x_lo, x_hi, spec.log_x};
    Axis ya{y_lo, y_hi, spec.log_y};
    double ml = 62, mr = 16, mt = 34, mb = 46;
    double px_lo = ml, px_hi = spec.width - mr;
    double py_lo = spec.height - mb, py_hi = mt;  // y grows upward

    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << spec.width
        << "' height='" << spec.height << "' viewBox='0 0 " << spec.width
        << " " << spec.height << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << spec.width / 2 << "' y='20' text-anchor='middle' "
        << "font-family='sans-serif' font-size='14'>" << spec.title
        << "</text>\n";

    // frame
    out << "<rect x='" << ml << "' y='" << mt << "' width='" << px_hi - px_lo
        << "' height='" << py_lo - py_hi
        << "' fill='none' stroke='black' stroke-width='1'/>\n";

    for (double v : xa.ticks()) {
        if (v < x_lo || v > x_hi) continue;
        double px = xa.map(v, px_lo, px_hi);
        out << "<line x1='" << fmt(px) << "' y1='" << fmt(py_lo) << "' x2='"
            << fmt(px) << "' y2='" << fmt(py_lo + 5)
            << "' stroke='black' stroke-width='1'/>\n";
        out << "<text x='" << fmt(px) << "' y='" << fmt(py_lo + 18)
            << "' text-anchor='middle' font-family='sans-serif' "
               "font-size='11'>"
            << fmt(v) << "</text>\n";
    }
    for (double v : ya.ticks()) {
        if (v < y_lo || v > y_hi) continue;
        double py = ya.map(v, py_lo, py_hi);
        out << "<line x1='" << fmt(px_lo - 5) << "' y1='" << fmt(py)
            << "' x2='" << fmt(px_lo) << "' y2='" << fmt(py)
            << "' stroke='black' stroke-width='1'/>\n";
        out << "<text x='" << fmt(px_lo - 8) << "' y='" << fmt(py + 4)
            << "' text-anchor='end' font-family='sans-serif' font-size='11'>"
            << fmt(v) << "</text>\n";
    }
    out << "<text x='" << (px_lo + px_hi) / 2 << "' y='"
        << spec.height - 10
        << "' text-anchor='middle' font-family='sans-serif' font-size='12'>"
        << spec.x_label << "</text>\n";
    out << "<text x='16' y='" << (py_lo + py_hi) / 2
        << "' text-anchor='middle' font-family='sans-serif' font-size='12' "
        << "transform='rotate(-90 16 " << (py_lo + py_hi) / 2 << ")'>"
        << spec.y_label << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const Series& ser = series[s];
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(char*))];
        out << "<polyline fill='none' stroke='" << color
            << "' stroke-width='1.4' points='";
        for (std::size_t i = 0; i < ser.x.size(); ++i) {
            double x = ser.x[i], y = ser.y[i];
            if (spec.log_x && x <= 0.0) continue;
            if (spec.log_y && y <= 0.0) continue;
            out << fmt(xa.map(x, px_lo, px_hi)) << ","
                << fmt(ya.map(y, py_lo, py_hi)) << " ";
        }
        out << "'/>\n";
        if (!ser.label.empty()) {
            double ly = mt + 16 + 16 * static_cast<double>(s);
            out << "<line x1='" << px_hi - 150 << "' y1='" << ly - 4
                << "' x2='" << px_hi - 126 << "' y2='" << ly - 4
                << "' stroke='" << color << "' stroke-width='2'/>\n";
            out << "<text x='" << px_hi - 120 << "' y='" << ly
                << "' font-family='sans-serif' font-size='11'>" << ser.label
                << "</text>\n";
        }
    }
    out << "</svg>\n";
}

}  // namespace epochdd::svg
