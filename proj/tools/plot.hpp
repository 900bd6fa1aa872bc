/**
 * Static figure emission for roof functions: piecewise-linear graphs in rank
 * one, the refined subdivision with labeled vertices in rank two, and CSV
 * samples on the subdivision skeleton.  Output is deterministic byte for byte
 * for identical inputs.
 */

#ifndef TORICMIN_PLOT_HPP
#define TORICMIN_PLOT_HPP

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "toric/adelic.hpp"

namespace toricmin {

using namespace toric;

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s(buf);
    if (s == "-0.0000") s = "0.0000";
    return s;
}

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;  // sorted by x
};

/// Rank-1 figure: one polyline per local roof plus the global roof.
inline std::string svg_rank1(const std::vector<PlotSeries>& series) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (ymin > 0) ymin = 0;
    if (ymax < 0) ymax = 0;
    double xpad = (xmax - xmin) * 0.05 + 1e-9, ypad = (ymax - ymin) * 0.08 + 0.05;
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;
    const double W = 640, H = 400;
    auto X = [&](double x) { return (x - xmin) / (xmax - xmin) * W; };
    auto Y = [&](double y) { return H - (y - ymin) / (ymax - ymin) * H; };
    static const char* palette[] = {"#000000", "#c23b22", "#1f6fb2", "#2e8b57",
                                    "#8a2be2", "#b8860b", "#555555"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<line x1=\"" << fmt(X(xmin)) << "\" y1=\"" << fmt(Y(0)) << "\" x2=\"" << fmt(X(xmax))
       << "\" y2=\"" << fmt(Y(0)) << "\" stroke=\"#aaaaaa\" stroke-width=\"1\"/>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = palette[i % 7];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
           << (series[i].label == "global" ? 2.5 : 1.2) << "\" points=\"";
        for (auto [x, y] : series[i].points) os << fmt(X(x)) << "," << fmt(Y(y)) << " ";
        os << "\"/>\n";
        for (auto [x, y] : series[i].points)
            os << "<circle cx=\"" << fmt(X(x)) << "\" cy=\"" << fmt(Y(y))
               << "\" r=\"2.4\" fill=\"" << color << "\"/>\n";
        os << "<text x=\"8\" y=\"" << 16 * (i + 1) << "\" font-size=\"12\" fill=\"" << color
           << "\">" << series[i].label << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

/// Rank-2 figure: the refined subdivision with per-vertex roof values.
inline std::string svg_rank2(const RoofFn& roof) {
    const Subdivision& sub = roof.subdivision();
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& v : sub.base.vertices()) {
        xmin = std::min(xmin, rat_double(v[0]));
        xmax = std::max(xmax, rat_double(v[0]));
        ymin = std::min(ymin, rat_double(v[1]));
        ymax = std::max(ymax, rat_double(v[1]));
    }
    double pad = std::max(xmax - xmin, ymax - ymin) * 0.15 + 1e-9;
    xmin -= pad;
    xmax += pad;
    ymin -= pad;
    ymax += pad;
    const double W = 520, H = 520;
    auto X = [&](double x) { return (x - xmin) / (xmax - xmin) * W; };
    auto Y = [&](double y) { return H - (y - ymin) / (ymax - ymin) * H; };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    for (const auto& cell : sub.cells) {
        os << "<polygon fill=\"#f3f6fa\" stroke=\"#1f6fb2\" stroke-width=\"1.2\" points=\"";
        // Walk the boundary: order the vertices by angle around the centroid.
        double cx = 0, cy = 0;
        for (const auto& v : cell.vertices()) {
            cx += rat_double(v[0]);
            cy += rat_double(v[1]);
        }
        cx /= cell.vertices().size();
        cy /= cell.vertices().size();
        std::vector<std::pair<double, std::pair<double, double>>> ring;
        for (const auto& v : cell.vertices()) {
            double px = rat_double(v[0]), py = rat_double(v[1]);
            ring.push_back({std::atan2(py - cy, px - cx), {px, py}});
        }
        std::sort(ring.begin(), ring.end());
        for (const auto& [a, p] : ring) os << fmt(X(p.first)) << "," << fmt(Y(p.second)) << " ";
        os << "\"/>\n";
    }
    for (const auto& v : sub.vertex_set) {
        double px = rat_double(v[0]), py = rat_double(v[1]);
        LogValue val = roof.value_in_domain(v);
        os << "<circle cx=\"" << fmt(X(px)) << "\" cy=\"" << fmt(Y(py))
           << "\" r=\"3\" fill=\"#c23b22\"/>\n";
        os << "<text x=\"" << fmt(X(px) + 5) << "\" y=\"" << fmt(Y(py) - 5)
           << "\" font-size=\"11\" fill=\"#222222\">" << val.str() << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

/// CSV samples of every local roof and the global roof on the subdivision
/// skeleton (its vertex set).
inline std::string csv_samples(const std::vector<std::pair<std::string, const RoofFn*>>& roofs) {
    std::ostringstream os;
    os << "series";
    std::size_t rank = roofs.front().second->domain().rank();
    for (std::size_t c = 0; c < rank; ++c) os << ",x" << c + 1;
    os << ",value\n";
    for (const auto& [label, roof] : roofs) {
        for (const auto& v : roof->subdivision().vertex_set) {
            os << label;
            for (const auto& c : v) os << "," << c.str();
            os << "," << roof->value_in_domain(v).approx() << "\n";
        }
    }
    return os.str();
}

}  // namespace toricmin

#endif  // TORICMIN_PLOT_HPP
