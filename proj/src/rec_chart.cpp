#include "rankshift/rec_chart.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "rankshift/csv.hpp"

namespace rankshift {

namespace {

void check_pair(const Ranking& x, const Ranking& y) {
    if (x.size() != y.size()) {
        throw ArgumentError("REC chart: rankings cover different node sets");
    }
}

std::vector<bool> flag_mask(std::size_t n, std::span<const NodeIndex> flagged) {
    std::vector<bool> mask(n, false);
    for (auto v : flagged) {
        if (v >= n) {
            throw ArgumentError("REC chart: flagged node outside the node set");
        }
        mask[v] = true;
    }
    return mask;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&':
                out += "&amp;";
                break;
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '"':
                out += "&quot;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

}  // namespace

void write_rec_data(std::ostream& out, const Ranking& x, const Ranking& y, std::span<const NodeIndex> flagged,
                    const NodeSet& nodes) {
    check_pair(x, y);
    const auto mask = flag_mask(x.size(), flagged);
    out << "node,r_x,r_y,delta,flagged,direction\n";
    for (NodeIndex i = 0; i < x.size(); ++i) {
        const auto delta = static_cast<std::int64_t>(x.position[i]) - static_cast<std::int64_t>(y.position[i]);
        const char* direction = delta > 0 ? "gained" : delta < 0 ? "lost" : "none";
        csv::write_row(out, {nodes.id(i), std::to_string(x.position[i]), std::to_string(y.position[i]),
                             std::to_string(delta), mask[i] ? "1" : "0", direction});
    }
}

void write_rec_svg(std::ostream& out, const Ranking& x, const Ranking& y, std::span<const NodeIndex> flagged,
                   const NodeSet& nodes, std::string_view title) {
    check_pair(x, y);
    const auto mask = flag_mask(x.size(), flagged);
    const std::size_t n = x.size();

    constexpr double size = 640.0;
    constexpr double margin = 60.0;
    constexpr double plot = size - 2 * margin;
    constexpr double min_radius = 2.0;
    constexpr double max_radius = 14.0;
    // Position 1 sits at the origin corner so that top ranks read bottom-left.
    const double span = n > 1 ? static_cast<double>(n - 1) : 1.0;
    auto px = [&](double r) { return margin + (r - 1.0) / span * plot; };
    auto py = [&](double r) { return size - margin - (r - 1.0) / span * plot; };

    std::uint64_t max_delta = 0;
    for (NodeIndex i = 0; i < n; ++i) {
        const auto d = static_cast<std::int64_t>(x.position[i]) - static_cast<std::int64_t>(y.position[i]);
        max_delta = std::max<std::uint64_t>(max_delta, static_cast<std::uint64_t>(d < 0 ? -d : d));
    }
    // Area proportional to |delta|: radius ~ sqrt(|delta|).
    auto radius = [&](std::uint64_t d) {
        if (max_delta == 0) {
            return min_radius;
        }
        const double r = max_radius * std::sqrt(static_cast<double>(d) / static_cast<double>(max_delta));
        return std::max(r, min_radius);
    };

    out << fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n",
        size);
    out << fmt::format("<title>{}</title>\n", xml_escape(title.empty() ? "ranking evolution" : title));
    out << fmt::format("<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{0}\" fill=\"white\"/>\n", size);
    out << fmt::format("<rect x=\"{0}\" y=\"{0}\" width=\"{1}\" height=\"{1}\" fill=\"none\" stroke=\"#333\"/>\n",
                       margin, plot);
    out << fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n",
        px(1), py(1), px(static_cast<double>(n)), py(static_cast<double>(n)));
    out << fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
        "rank in {}</text>\n",
        size / 2, size - 20, xml_escape(y.interval.empty() ? "T_y" : y.interval));
    out << fmt::format(
        "<text x=\"20\" y=\"{0:.1f}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
        "transform=\"rotate(-90 20 {0:.1f})\">rank in {1}</text>\n",
        size / 2, xml_escape(x.interval.empty() ? "T_x" : x.interval));
    if (!title.empty()) {
        out << fmt::format(
            "<text x=\"{:.1f}\" y=\"30\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
            size / 2, xml_escape(title));
    }

    // Regular nodes first so that flagged markers stay on top.
    for (int pass = 0; pass < 2; ++pass) {
        for (NodeIndex i = 0; i < n; ++i) {
            if (mask[i] != (pass == 1)) {
                continue;
            }
            const double cx = px(y.position[i]);
            const double cy = py(x.position[i]);
            const auto d = static_cast<std::int64_t>(x.position[i]) - static_cast<std::int64_t>(y.position[i]);
            const double r = radius(static_cast<std::uint64_t>(d < 0 ? -d : d));
            const std::string label = xml_escape(nodes.id(i));
            if (!mask[i] || d == 0) {
                out << fmt::format(
                    "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" fill=\"{}\" fill-opacity=\"0.6\">"
                    "<title>{}</title></circle>\n",
                    cx, cy, r, mask[i] ? "#f4a259" : "#8ecae6", label);
                continue;
            }
            // Equilateral triangle with the same area as a circle of radius r.
            const double side = r * std::sqrt(4.0 * M_PI / std::sqrt(3.0));
            const double h = side * std::sqrt(3.0) / 2.0;
            const double tip = d > 0 ? cy - 2.0 * h / 3.0 : cy + 2.0 * h / 3.0;
            const double base = d > 0 ? cy + h / 3.0 : cy - h / 3.0;
            out << fmt::format(
                "<polygon points=\"{:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f}\" fill=\"#f4a259\" fill-opacity=\"0.85\" "
                "stroke=\"#a0522d\"><title>{}</title></polygon>\n",
                cx, tip, cx - side / 2, base, cx + side / 2, base, label);
        }
    }
    out << "</svg>\n";
}

}  // namespace rankshift
