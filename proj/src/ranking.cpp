#include "rankshift/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "rankshift/csv.hpp"

namespace rankshift {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* op) {
    if (a != b) {
        throw ArgumentError(std::string(op) + ": rankings cover different node sets");
    }
}

}  // namespace

Ranking rank_scores(std::span<const double> scores, Metric metric, std::string interval) {
    for (double s : scores) {
        if (!std::isfinite(s)) {
            throw ArgumentError("rank_nodes: scores must be finite");
        }
    }
    const std::size_t n = scores.size();
    Ranking r;
    r.metric = metric;
    r.interval = std::move(interval);
    r.order.resize(n);
    std::iota(r.order.begin(), r.order.end(), NodeIndex{0});
    std::stable_sort(r.order.begin(), r.order.end(), [&](NodeIndex a, NodeIndex b) { return scores[a] > scores[b]; });
    r.position.assign(n, 0);
    r.fractional.assign(n, 0.0);
    std::size_t p = 0;
    while (p < n) {
        std::size_t q = p + 1;
        while (q < n && scores[r.order[q]] == scores[r.order[p]]) {
            ++q;
        }
        // positions p+1 .. q share the average (p+1+q)/2
        const double avg = (static_cast<double>(p + 1) + static_cast<double>(q)) / 2.0;
        for (std::size_t k = p; k < q; ++k) {
            r.position[r.order[k]] = static_cast<std::uint32_t>(k + 1);
            r.fractional[r.order[k]] = avg;
        }
        if (q - p > 1) {
            r.ties.push_back(TieGroup{static_cast<std::uint32_t>(p + 1), static_cast<std::uint32_t>(q - p)});
        }
        p = q;
    }
    return r;
}

Ranking rank_nodes(const CentralityVector& scores) { return rank_scores(scores.scores, scores.metric, scores.interval); }

Ranking ranking_from_positions(std::span<const std::uint32_t> positions) {
    const std::size_t n = positions.size();
    std::vector<char> seen(n, 0);
    for (auto p : positions) {
        if (p < 1 || p > n || seen[p - 1]) {
            throw ArgumentError("ranking_from_positions: positions must be a permutation of 1..n");
        }
        seen[p - 1] = 1;
    }
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = static_cast<double>(n - positions[i]);
    }
    return rank_scores(scores);
}

std::vector<double> fractional_ranks(std::span<const double> values) { return rank_scores(values).fractional; }

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
    require_same_size(x.size(), y.size(), "spearman");
    const auto rx = fractional_ranks(x);
    const auto ry = fractional_ranks(y);
    const std::size_t n = rx.size();
    if (n < 2) {
        return std::nullopt;
    }
    // Fractional ranks always average (n+1)/2.
    const double mean = (static_cast<double>(n) + 1.0) / 2.0;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = rx[i] - mean;
        const double dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        return std::nullopt;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> spearman(const Ranking& x, const Ranking& y) {
    require_same_size(x.size(), y.size(), "spearman");
    // Fractional ranks are already ascending-is-better; negate so the
    // descending re-ranking inside reproduces them.
    std::vector<double> nx(x.fractional.size());
    std::vector<double> ny(y.fractional.size());
    std::transform(x.fractional.begin(), x.fractional.end(), nx.begin(), [](double v) { return -v; });
    std::transform(y.fractional.begin(), y.fractional.end(), ny.begin(), [](double v) { return -v; });
    return spearman(nx, ny);
}

namespace {

/// Number of tied pairs among runs of equal values in an already sorted range.
template <typename It, typename Eq>
std::uint64_t tied_pairs(It begin, It end, Eq eq) {
    std::uint64_t pairs = 0;
    while (begin != end) {
        It run = begin + 1;
        while (run != end && eq(*begin, *run)) {
            ++run;
        }
        const auto t = static_cast<std::uint64_t>(run - begin);
        pairs += t * (t - 1) / 2;
        begin = run;
    }
    return pairs;
}

/// Sorts `v` ascending with a bottom-up merge sort and returns the number of
/// inversions (pairs i<j with v[i] > v[j]).
std::uint64_t count_inversions(std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> buf(n);
    std::uint64_t swaps = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo < n; lo += 2 * width) {
            const std::size_t mid = std::min(lo + width, n);
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo;
            std::size_t j = mid;
            std::size_t k = lo;
            while (i < mid && j < hi) {
                if (v[j] < v[i]) {
                    buf[k++] = v[j++];
                    swaps += mid - i;
                } else {
                    buf[k++] = v[i++];
                }
            }
            while (i < mid) {
                buf[k++] = v[i++];
            }
            while (j < hi) {
                buf[k++] = v[j++];
            }
        }
        v.swap(buf);
    }
    return swaps;
}

}  // namespace

std::optional<double> kendall(std::span<const double> x, std::span<const double> y) {
    require_same_size(x.size(), y.size(), "kendall");
    const std::size_t n = x.size();
    if (n < 2) {
        return std::nullopt;
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
    });
    const std::uint64_t ties_x = tied_pairs(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] == x[b]; });
    const std::uint64_t ties_xy =
        tied_pairs(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] == x[b] && y[a] == y[b]; });

    std::vector<double> ys(n);
    for (std::size_t k = 0; k < n; ++k) {
        ys[k] = y[idx[k]];
    }
    const std::uint64_t discordant = count_inversions(ys);
    const std::uint64_t ties_y = tied_pairs(ys.begin(), ys.end(), [](double a, double b) { return a == b; });

    const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (ties_x == total || ties_y == total) {
        return std::nullopt;
    }
    // concordant - discordant = total - ties_x - ties_y + ties_xy - 2 * discordant
    const double numerator = static_cast<double>(total) - static_cast<double>(ties_x) - static_cast<double>(ties_y) +
                             static_cast<double>(ties_xy) - 2.0 * static_cast<double>(discordant);
    const double denominator =
        std::sqrt(static_cast<double>(total - ties_x)) * std::sqrt(static_cast<double>(total - ties_y));
    return std::clamp(numerator / denominator, -1.0, 1.0);
}

std::optional<double> kendall(const Ranking& x, const Ranking& y) {
    require_same_size(x.size(), y.size(), "kendall");
    return kendall(x.fractional, y.fractional);
}

void write_ranking(std::ostream& out, const Ranking& ranking, const NodeSet& nodes, bool header) {
    if (header) {
        out << "node_id,metric,interval,position,fractional_rank\n";
    }
    for (NodeIndex node : ranking.order) {
        csv::write_row(out, {nodes.id(node), std::string(to_string(ranking.metric)), ranking.interval,
                             std::to_string(ranking.position[node]), csv::format_number(ranking.fractional[node])});
    }
}

}  // namespace rankshift
