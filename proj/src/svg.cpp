#include "switchkit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace switchkit::svg {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render(const std::vector<Panel>& panels, int width, int panel_height) {
    const double left = 60.0, right = 20.0, top = 30.0, bottom = 30.0;
    const int height = static_cast<int>(panels.size()) * panel_height;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const Panel& panel = panels[p];
        double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
        for (const auto& s : panel.series) {
            for (double x : s.x) { x0 = std::min(x0, x); x1 = std::max(x1, x); }
            for (double y : s.y) { y0 = std::min(y0, y); y1 = std::max(y1, y); }
        }
        if (!std::isfinite(x0)) { x0 = 0; x1 = 1; y0 = 0; y1 = 1; }
        if (x1 <= x0) x1 = x0 + 1.0;
        if (y1 <= y0) { y0 -= 0.5; y1 += 0.5; }
        const double pad = 0.05 * (y1 - y0);
        y0 -= pad;
        y1 += pad;
        const double oy = static_cast<double>(p) * panel_height;
        const double w = width - left - right;
        const double hgt = panel_height - top - bottom;
        auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * w; };
        auto sy = [&](double y) { return oy + top + (1.0 - (y - y0) / (y1 - y0)) * hgt; };

        os << "<g>\n<text x=\"" << px(left) << "\" y=\"" << px(oy + 18) << "\" font-size=\"13\">"
           << escape(panel.title) << "</text>\n";
        os << "<rect x=\"" << px(left) << "\" y=\"" << px(oy + top) << "\" width=\"" << px(w) << "\" height=\""
           << px(hgt) << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int k = 0; k <= 4; ++k) {
            const double xv = x0 + (x1 - x0) * k / 4.0;
            const double yv = y0 + (y1 - y0) * k / 4.0;
            os << "<text x=\"" << px(sx(xv)) << "\" y=\"" << px(oy + top + hgt + 14)
               << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
            os << "<text x=\"" << px(left - 4) << "\" y=\"" << px(sy(yv) + 4) << "\" text-anchor=\"end\">"
               << fmt(yv) << "</text>\n";
        }
        if (y0 < 0.0 && y1 > 0.0) {
            os << "<line x1=\"" << px(left) << "\" y1=\"" << px(sy(0)) << "\" x2=\"" << px(left + w) << "\" y2=\""
               << px(sy(0)) << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
        }
        double legend_y = oy + top + 12;
        for (const auto& s : panel.series) {
            if (s.x.size() != s.y.size()) throw std::invalid_argument("svg: series x/y length mismatch");
            os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.3\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (s.step && i > 0) os << px(sx(s.x[i])) << ',' << px(sy(s.y[i - 1])) << ' ';
                os << px(sx(s.x[i])) << ',' << px(sy(s.y[i])) << ' ';
            }
            os << "\"/>\n";
            if (!s.label.empty()) {
                os << "<text x=\"" << px(left + w - 6) << "\" y=\"" << px(legend_y) << "\" text-anchor=\"end\" fill=\""
                   << s.color << "\">" << escape(s.label) << "</text>\n";
                legend_y += 14;
            }
        }
        os << "</g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open for writing: " + path);
    out << content;
}

}  // namespace switchkit::svg
