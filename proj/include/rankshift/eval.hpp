#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankshift/graph.hpp"
#include "rankshift/ingest.hpp"

namespace rankshift {

/// Relevance of each entry of an ordered list, as judged by the labels.
/// Unlabeled entries count as not relevant but are tracked separately.
enum class Judgement { Relevant, NotRelevant, Unlabeled };

std::vector<Judgement> judge(std::span<const std::string> list, const LabelSet& labels);

/// tp@K / K. The denominator stays K when the list is shorter. An empty list
/// yields 0 and a warning.
double precision_at_k(std::span<const Judgement> list, std::size_t k);

/// Mean of P@i over the positions i <= K holding a relevant entry; 0 when the
/// top K holds none.
double avg_precision_at_k(std::span<const Judgement> list, std::size_t k);

/// Relevant entries within the first `cutoff` divided by tp_star. nullopt
/// when tp_star is 0.
std::optional<double> r_star(std::span<const Judgement> list, std::size_t cutoff, std::size_t tp_star);

/// Number of distinct relevant ids across all lists.
std::size_t union_relevant(std::span<const std::vector<std::string>> lists, const LabelSet& labels);

struct EvalCutoffs {
    std::vector<std::size_t> precision = {1, 2, 5};
    std::vector<std::size_t> avg_precision = {5, 10, 20, 30, 60};
    std::vector<std::size_t> recall = {30, 60};
};

struct ListEvaluation {
    std::string name;
    std::size_t length = 0;
    std::size_t relevant = 0;
    std::size_t unlabeled = 0;
    std::vector<double> precision;             // parallel to cutoffs.precision
    std::vector<double> avg_precision;         // parallel to cutoffs.avg_precision
    std::vector<std::optional<double>> recall; // parallel to cutoffs.recall
};

struct EvalReport {
    EvalCutoffs cutoffs;
    std::size_t tp_star = 0;
    std::vector<ListEvaluation> lists;
};

struct NamedList {
    std::string name;
    std::vector<std::string> ids;
};

/// Evaluates every list. tp* defaults to the distinct relevant ids across
/// all given lists.
EvalReport evaluate(std::span<const NamedList> lists, const LabelSet& labels, const EvalCutoffs& cutoffs = {},
                    std::optional<std::size_t> tp_star = std::nullopt);

void write_eval_csv(std::ostream& out, const EvalReport& report);
/// Fixed-width table with one row per list (p@.., avg p@.., r* at ..).
void write_eval_table(std::ostream& out, const EvalReport& report);

/// Sorts strengths descending, fits log(strength) against log(position) by
/// least squares over the positive entries and returns minus the slope.
/// Throws ArgumentError with fewer than 3 positive entries.
double zipf_slope(std::span<const double> strengths);

enum class Binning { Integer, Linear, Log };

struct HistogramBin {
    double lower = 0.0;
    double upper = 0.0;  // exclusive, except for the last bin and the zero bin
    std::size_t count = 0;
};

/// Integer: one bin per integer value [k, k+1) from the minimum to the
/// maximum. Linear: `bins` equal-width bins. Log: `bins` bins per decade
/// over the positive values, with zeros counted in a [0, 0] bin.
std::vector<HistogramBin> histogram(std::span<const double> values, Binning binning, std::size_t bins = 10);

/// variable,bin_lower,bin_upper,count for indegree, outdegree, degree,
/// instrength, outstrength and the edge amount distribution. Degrees use
/// integer bins; strengths and amounts use `amount_binning`.
void distribution_export(std::ostream& out, const TemporalLayer& layer, Binning amount_binning = Binning::Log,
                         std::size_t bins = 5, bool header = true);

}  // namespace rankshift
