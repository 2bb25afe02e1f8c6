#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rankshift/graph.hpp"

namespace rankshift {

enum class Metric {
    InDegree,
    OutDegree,
    Degree,
    InStrength,
    OutStrength,
    Strength,
    Closeness,
    HarmonicCloseness,
    Betweenness,
    PageRank,
    Hub,
    Authority,
};

inline constexpr std::array<Metric, 12> all_metrics = {
    Metric::InDegree,  Metric::OutDegree,         Metric::Degree,      Metric::InStrength,
    Metric::OutStrength, Metric::Strength,        Metric::Closeness,   Metric::HarmonicCloseness,
    Metric::Betweenness, Metric::PageRank,        Metric::Hub,         Metric::Authority,
};

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view text);

/// Parameters of the iterative and optional-normalisation metrics. Defaults:
/// PageRank alpha 0.85, L1 tolerance 1e-10, 200 iterations, weighted
/// transitions; HITS max-norm tolerance 1e-12, 1000 iterations.
struct CentralityParams {
    double alpha = 0.85;
    double pagerank_tolerance = 1e-10;
    int pagerank_max_iterations = 200;
    bool pagerank_weighted = true;
    double hits_tolerance = 1e-12;
    int hits_max_iterations = 1000;
    bool normalize_strength = false;
    unsigned threads = 1;
};

struct CentralityVector {
    Metric metric = Metric::InDegree;
    std::string interval;
    std::vector<double> scores;  // indexed by NodeIndex
    CentralityParams params;
};

/// Power iteration did not converge. Carries the last iterate.
class ConvergenceError : public Error {
public:
    ConvergenceError(std::string what, std::vector<double> last_iterate, double residual, int iterations)
        : Error(std::move(what)), last_iterate_(std::move(last_iterate)), residual_(residual), iterations_(iterations) {}

    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    std::vector<double> last_iterate_;
    double residual_;
    int iterations_;
};

struct DegreeCentralities {
    CentralityVector in, out, total;
};

/// k-(i)/n, k+(i)/n and k(i)/n where k counts distinct neighbours.
DegreeCentralities degree_centralities(const TemporalLayer& layer);

struct StrengthCentralities {
    CentralityVector in, out, total;
};

/// Raw in/out/total weight sums, or divided by the layer's total weight when
/// `normalize` is set.
StrengthCentralities strength_centralities(const TemporalLayer& layer, bool normalize = false);

/// Unweighted directed distances from each node. Harmonic: sum of 1/l over
/// reachable nodes. Classic: r / sum(l) scaled by r / (n-1), r being the
/// number of nodes reachable from i; 0 when nothing is reachable.
CentralityVector closeness(const TemporalLayer& layer, bool harmonic, unsigned threads = 1);

/// Unweighted directed shortest-path betweenness, unnormalised. Sums are
/// carried in extended precision and rounded once.
CentralityVector betweenness(const TemporalLayer& layer, unsigned threads = 1);

/// Power iteration of pr(i) = alpha * sum_j pr(j) P(j,i) + (1-alpha)/n, with
/// P(j,i) = 1/k+(j) or w_ji/s+(j) when weighted. Dangling mass is spread
/// uniformly. Stops when the L1 change drops below the tolerance.
CentralityVector pagerank(const TemporalLayer& layer, const CentralityParams& params = {});

struct HitsScores {
    CentralityVector hub, authority;
    int iterations = 0;
};

/// a <- W^T h, h <- W a with unit Euclidean norm after each half step,
/// starting from a uniform hub vector. Stops when the max-norm change of both
/// vectors drops below the tolerance.
HitsScores hits(const TemporalLayer& layer, const CentralityParams& params = {});

/// Computes one metric. Metrics that come in families (degree, strength,
/// HITS) compute the family and return the requested member.
CentralityVector compute_metric(const TemporalLayer& layer, Metric metric, const CentralityParams& params = {});

}  // namespace rankshift
