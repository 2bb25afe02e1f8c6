#include "rankshift/centrality.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <thread>

namespace rankshift {

namespace {

constexpr std::array<std::string_view, 12> kMetricNames = {
    "indegree",  "outdegree", "degree",   "instrength", "outstrength", "strength",
    "closeness", "harmonic",  "betweenness", "pagerank", "hub",        "authority",
};

CentralityVector make_vector(const TemporalLayer& layer, Metric metric, const CentralityParams& params = {}) {
    CentralityVector v;
    v.metric = metric;
    v.interval = layer.label();
    v.scores.assign(layer.node_count(), 0.0);
    v.params = params;
    return v;
}

void require_nodes(const TemporalLayer& layer, std::string_view op) {
    if (layer.node_count() == 0) {
        throw ArgumentError(fmt::format("{}: empty layer", op));
    }
}

/// Runs fn(begin, end, slot) over [0, n) split into `threads` contiguous
/// chunks; slot is the chunk number.
template <typename Fn>
void parallel_chunks(std::size_t n, unsigned threads, Fn&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        fn(std::size_t{0}, n, 0u);
        return;
    }
    const std::size_t chunk = (n + threads - 1) / threads;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = std::min(n, t * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&fn, begin, end, t] { fn(begin, end, t); });
    }
    for (auto& th : pool) {
        th.join();
    }
}

double l2_normalize(std::vector<double>& v) {
    double sq = 0.0;
    for (double x : v) {
        sq += x * x;
    }
    const double norm = std::sqrt(sq);
    if (norm > 0.0) {
        for (double& x : v) {
            x /= norm;
        }
    }
    return norm;
}

}  // namespace

std::string_view to_string(Metric metric) { return kMetricNames[static_cast<std::size_t>(metric)]; }

Metric parse_metric(std::string_view text) {
    for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
        if (kMetricNames[i] == text) {
            return static_cast<Metric>(i);
        }
    }
    if (text == "harmonic-closeness" || text == "harmonic_closeness") {
        return Metric::HarmonicCloseness;
    }
    throw ArgumentError("unknown metric '" + std::string(text) + "'");
}

DegreeCentralities degree_centralities(const TemporalLayer& layer) {
    require_nodes(layer, "degree_centralities");
    DegreeCentralities d{make_vector(layer, Metric::InDegree), make_vector(layer, Metric::OutDegree),
                         make_vector(layer, Metric::Degree)};
    const std::size_t n = layer.node_count();
    const double nd = static_cast<double>(n);
    for (NodeIndex i = 0; i < n; ++i) {
        const auto in = layer.in_neighbors(i);
        const auto out = layer.out_neighbors(i);
        // Both lists are sorted by node; merge to count the union.
        std::size_t a = 0;
        std::size_t b = 0;
        std::size_t both = 0;
        while (a < in.size() && b < out.size()) {
            if (in[a].node == out[b].node) {
                ++both;
                ++a;
                ++b;
            } else if (in[a].node < out[b].node) {
                ++a;
            } else {
                ++b;
            }
        }
        d.in.scores[i] = static_cast<double>(in.size()) / nd;
        d.out.scores[i] = static_cast<double>(out.size()) / nd;
        d.total.scores[i] = static_cast<double>(in.size() + out.size() - both) / nd;
    }
    return d;
}

StrengthCentralities strength_centralities(const TemporalLayer& layer, bool normalize) {
    require_nodes(layer, "strength_centralities");
    CentralityParams params;
    params.normalize_strength = normalize;
    StrengthCentralities s{make_vector(layer, Metric::InStrength, params),
                           make_vector(layer, Metric::OutStrength, params),
                           make_vector(layer, Metric::Strength, params)};
    const double scale = (normalize && layer.total_weight() > 0.0) ? 1.0 / layer.total_weight() : 1.0;
    for (NodeIndex i = 0; i < layer.node_count(); ++i) {
        s.in.scores[i] = layer.in_strength(i) * scale;
        s.out.scores[i] = layer.out_strength(i) * scale;
        s.total.scores[i] = (layer.in_strength(i) + layer.out_strength(i)) * scale;
    }
    return s;
}

CentralityVector closeness(const TemporalLayer& layer, bool harmonic, unsigned threads) {
    require_nodes(layer, "closeness");
    CentralityParams params;
    params.threads = threads;
    auto result = make_vector(layer, harmonic ? Metric::HarmonicCloseness : Metric::Closeness, params);
    const std::size_t n = layer.node_count();
    parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end, unsigned) {
        std::vector<std::int64_t> dist(n, -1);
        std::vector<NodeIndex> queue;
        queue.reserve(n);
        for (std::size_t s = begin; s < end; ++s) {
            queue.clear();
            queue.push_back(static_cast<NodeIndex>(s));
            dist[s] = 0;
            for (std::size_t head = 0; head < queue.size(); ++head) {
                const NodeIndex v = queue[head];
                for (const auto& nb : layer.out_neighbors(v)) {
                    if (dist[nb.node] < 0) {
                        dist[nb.node] = dist[v] + 1;
                        queue.push_back(nb.node);
                    }
                }
            }
            // The queue is in nondecreasing distance order. Summing count/d per
            // distance keeps the result independent of traversal order.
            double inverse_sum = 0.0;
            std::int64_t total = 0;
            for (std::size_t k = 1; k < queue.size();) {
                const std::int64_t d = dist[queue[k]];
                std::size_t same = 0;
                for (; k < queue.size() && dist[queue[k]] == d; ++k) {
                    ++same;
                }
                inverse_sum += static_cast<double>(same) / static_cast<double>(d);
                total += d * static_cast<std::int64_t>(same);
            }
            const double reachable = static_cast<double>(queue.size() - 1);
            if (harmonic) {
                result.scores[s] = inverse_sum;
            } else if (total > 0 && n > 1) {
                result.scores[s] = (reachable / static_cast<double>(total)) * (reachable / static_cast<double>(n - 1));
            }
            for (NodeIndex v : queue) {
                dist[v] = -1;
            }
        }
    });
    return result;
}

CentralityVector betweenness(const TemporalLayer& layer, unsigned threads) {
    require_nodes(layer, "betweenness");
    CentralityParams params;
    params.threads = threads;
    auto result = make_vector(layer, Metric::Betweenness, params);
    const std::size_t n = layer.node_count();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    // Dependencies and per-node sums are carried in extended precision and
    // rounded once at the end, so results are correctly rounded in practice
    // and do not depend on how sources are split across threads.
    std::vector<std::vector<long double>> partial(threads);

    parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end, unsigned slot) {
        auto& acc = partial[slot];
        acc.assign(n, 0.0L);
        std::vector<std::int64_t> dist(n, -1);
        std::vector<double> sigma(n, 0.0);
        std::vector<long double> delta(n, 0.0L);
        std::vector<NodeIndex> order;
        order.reserve(n);
        for (std::size_t s = begin; s < end; ++s) {
            order.clear();
            order.push_back(static_cast<NodeIndex>(s));
            dist[s] = 0;
            sigma[s] = 1.0;
            for (std::size_t head = 0; head < order.size(); ++head) {
                const NodeIndex v = order[head];
                for (const auto& nb : layer.out_neighbors(v)) {
                    const NodeIndex w = nb.node;
                    if (dist[w] < 0) {
                        dist[w] = dist[v] + 1;
                        order.push_back(w);
                    }
                    if (dist[w] == dist[v] + 1) {
                        sigma[w] += sigma[v];
                    }
                }
            }
            // Dependencies in order of non-increasing distance; predecessors of
            // w are the in-neighbours one hop closer to s.
            for (std::size_t k = order.size(); k-- > 1;) {
                const NodeIndex w = order[k];
                const long double coeff = (1.0L + delta[w]) / static_cast<long double>(sigma[w]);
                for (const auto& nb : layer.in_neighbors(w)) {
                    const NodeIndex v = nb.node;
                    if (dist[v] >= 0 && dist[v] + 1 == dist[w]) {
                        delta[v] += static_cast<long double>(sigma[v]) * coeff;
                    }
                }
                acc[w] += delta[w];
            }
            for (NodeIndex v : order) {
                dist[v] = -1;
                sigma[v] = 0.0;
                delta[v] = 0.0L;
            }
        }
    });
    std::vector<long double> total(n, 0.0L);
    for (const auto& acc : partial) {
        for (std::size_t i = 0; i < n; ++i) {
            total[i] += acc[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        result.scores[i] = static_cast<double>(total[i]);
    }
    return result;
}

CentralityVector pagerank(const TemporalLayer& layer, const CentralityParams& params) {
    require_nodes(layer, "pagerank");
    if (!(params.alpha > 0.0 && params.alpha < 1.0)) {
        throw ArgumentError(fmt::format("pagerank: damping factor must lie in (0,1), got {}", params.alpha));
    }
    auto result = make_vector(layer, Metric::PageRank, params);
    const std::size_t n = layer.node_count();
    const double nd = static_cast<double>(n);
    const double alpha = params.alpha;

    std::vector<double> norm(n, 0.0);  // per-source divisor; 0 marks dangling
    for (NodeIndex j = 0; j < n; ++j) {
        norm[j] = params.pagerank_weighted ? layer.out_strength(j) : static_cast<double>(layer.out_degree(j));
    }
    std::vector<double> x(n, 1.0 / nd);
    std::vector<double> next(n, 0.0);
    std::vector<double> share(n, 0.0);
    double residual = 0.0;
    for (int iter = 1; iter <= params.pagerank_max_iterations; ++iter) {
        double dangling = 0.0;
        for (NodeIndex j = 0; j < n; ++j) {
            if (norm[j] > 0.0) {
                share[j] = x[j] / norm[j];
            } else {
                share[j] = 0.0;
                dangling += x[j];
            }
        }
        const double base = (alpha * dangling + (1.0 - alpha)) / nd;
        residual = 0.0;
        for (NodeIndex i = 0; i < n; ++i) {
            double sum = 0.0;
            for (const auto& nb : layer.in_neighbors(i)) {
                sum += share[nb.node] * (params.pagerank_weighted ? nb.weight : 1.0);
            }
            next[i] = alpha * sum + base;
            residual += std::abs(next[i] - x[i]);
        }
        x.swap(next);
        if (residual < params.pagerank_tolerance) {
            result.scores = std::move(x);
            return result;
        }
    }
    throw ConvergenceError(fmt::format("pagerank did not converge in {} iterations (L1 residual {:g})",
                                       params.pagerank_max_iterations, residual),
                           std::move(x), residual, params.pagerank_max_iterations);
}

HitsScores hits(const TemporalLayer& layer, const CentralityParams& params) {
    require_nodes(layer, "hits");
    if (layer.edge_count() == 0) {
        throw ArgumentError("hits: layer has no edges, every iterate would be zero");
    }
    const std::size_t n = layer.node_count();
    std::vector<double> h(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> a(n, 0.0);
    std::vector<double> next_a(n, 0.0);
    std::vector<double> next_h(n, 0.0);
    double residual = 0.0;
    for (int iter = 1; iter <= params.hits_max_iterations; ++iter) {
        for (NodeIndex i = 0; i < n; ++i) {
            double sum = 0.0;
            for (const auto& nb : layer.in_neighbors(i)) {
                sum += nb.weight * h[nb.node];
            }
            next_a[i] = sum;
        }
        if (l2_normalize(next_a) == 0.0) {
            throw Error("hits: authority iterate collapsed to zero");
        }
        for (NodeIndex i = 0; i < n; ++i) {
            double sum = 0.0;
            for (const auto& nb : layer.out_neighbors(i)) {
                sum += nb.weight * next_a[nb.node];
            }
            next_h[i] = sum;
        }
        if (l2_normalize(next_h) == 0.0) {
            throw Error("hits: hub iterate collapsed to zero");
        }
        residual = 0.0;
        for (NodeIndex i = 0; i < n; ++i) {
            residual = std::max({residual, std::abs(next_a[i] - a[i]), std::abs(next_h[i] - h[i])});
        }
        a.swap(next_a);
        h.swap(next_h);
        if (residual < params.hits_tolerance) {
            HitsScores out{make_vector(layer, Metric::Hub, params), make_vector(layer, Metric::Authority, params),
                           iter};
            out.hub.scores = std::move(h);
            out.authority.scores = std::move(a);
            return out;
        }
    }
    throw ConvergenceError(fmt::format("hits did not converge in {} iterations (max-norm residual {:g})",
                                       params.hits_max_iterations, residual),
                           std::move(a), residual, params.hits_max_iterations);
}

CentralityVector compute_metric(const TemporalLayer& layer, Metric metric, const CentralityParams& params) {
    switch (metric) {
        case Metric::InDegree:
            return degree_centralities(layer).in;
        case Metric::OutDegree:
            return degree_centralities(layer).out;
        case Metric::Degree:
            return degree_centralities(layer).total;
        case Metric::InStrength:
            return strength_centralities(layer, params.normalize_strength).in;
        case Metric::OutStrength:
            return strength_centralities(layer, params.normalize_strength).out;
        case Metric::Strength:
            return strength_centralities(layer, params.normalize_strength).total;
        case Metric::Closeness:
            return closeness(layer, false, params.threads);
        case Metric::HarmonicCloseness:
            return closeness(layer, true, params.threads);
        case Metric::Betweenness:
            return betweenness(layer, params.threads);
        case Metric::PageRank:
            return pagerank(layer, params);
        case Metric::Hub:
            return hits(layer, params).hub;
        case Metric::Authority:
            return hits(layer, params).authority;
    }
    throw ArgumentError("unknown metric");
}

}  // namespace rankshift
