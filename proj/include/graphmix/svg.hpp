#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace graphmix {

namespace detail {
inline std::string svg_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}
}  // namespace detail

// Self-contained histogram writer: target values in gray bars, bound values
// overlaid in red. No plotting dependency.
inline std::string histogram_svg(const std::vector<double> &targets,
                                 const std::vector<double> &bounds, int bins = 40,
                                 const std::string &title = "target vs bound") {
    const int width = 640, height = 360, margin = 40;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<text x=\"" << margin << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
    if (targets.empty() || bins < 1) {
        out << "</svg>\n";
        return out.str();
    }
    double lo = targets.front(), hi = targets.front();
    for (double x : targets) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    for (double x : bounds) {
        if (std::isfinite(x)) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
    if (!(hi > lo)) hi = lo + 1.0;
    const double span = hi - lo;

    const auto histogram = [&](const std::vector<double> &values) {
        std::vector<int> counts(std::size_t(bins), 0);
        for (double x : values) {
            if (!std::isfinite(x)) continue;
            int b = int(double(bins) * (x - lo) / span);
            b = std::clamp(b, 0, bins - 1);
            ++counts[std::size_t(b)];
        }
        return counts;
    };
    const auto target_counts = histogram(targets);
    const auto bound_counts = histogram(bounds);
    int peak = 1;
    for (int c : target_counts) peak = std::max(peak, c);
    for (int c : bound_counts) peak = std::max(peak, c);

    const double plot_w = width - 2.0 * margin;
    const double plot_h = height - 2.0 * margin;
    const double bar_w = plot_w / double(bins);
    const auto draw = [&](const std::vector<int> &counts, const char *fill, double opacity) {
        for (int b = 0; b < bins; ++b) {
            const int c = counts[std::size_t(b)];
            if (c == 0) continue;
            const double h = plot_h * double(c) / double(peak);
            out << "<rect x=\"" << detail::svg_num(margin + b * bar_w) << "\" y=\""
                << detail::svg_num(height - margin - h) << "\" width=\""
                << detail::svg_num(bar_w) << "\" height=\"" << detail::svg_num(h)
                << "\" fill=\"" << fill << "\" fill-opacity=\"" << detail::svg_num(opacity)
                << "\"/>\n";
        }
    };
    draw(target_counts, "#666666", 0.7);
    draw(bound_counts, "#cc2222", 0.5);

    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
        << width - margin << "\" y2=\"" << height - margin
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << margin << "\" y=\"" << height - margin + 16
        << "\" font-size=\"11\">" << detail::svg_num(lo) << "</text>\n";
    out << "<text x=\"" << width - margin - 40 << "\" y=\"" << height - margin + 16
        << "\" font-size=\"11\">" << detail::svg_num(hi) << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace graphmix
