#include "rankshift/eval.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "rankshift/centrality.hpp"
#include "rankshift/csv.hpp"

namespace rankshift {

std::vector<Judgement> judge(std::span<const std::string> list, const LabelSet& labels) {
    std::vector<Judgement> out;
    out.reserve(list.size());
    for (const auto& id : list) {
        const auto rel = labels.relevant(id);
        out.push_back(!rel ? Judgement::Unlabeled : *rel ? Judgement::Relevant : Judgement::NotRelevant);
    }
    return out;
}

namespace {

std::size_t relevant_within(std::span<const Judgement> list, std::size_t k) {
    const auto end = list.begin() + static_cast<std::ptrdiff_t>(std::min(k, list.size()));
    return static_cast<std::size_t>(std::count(list.begin(), end, Judgement::Relevant));
}

}  // namespace

double precision_at_k(std::span<const Judgement> list, std::size_t k) {
    if (k < 1) {
        throw ArgumentError("precision_at_k: K must be at least 1");
    }
    if (list.empty()) {
        warn("precision_at_k: empty list, reporting 0");
        return 0.0;
    }
    return static_cast<double>(relevant_within(list, k)) / static_cast<double>(k);
}

double avg_precision_at_k(std::span<const Judgement> list, std::size_t k) {
    if (k < 1) {
        throw ArgumentError("avg_precision_at_k: K must be at least 1");
    }
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(k, list.size()); ++i) {
        if (list[i] == Judgement::Relevant) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return hits == 0 ? 0.0 : sum / static_cast<double>(hits);
}

std::optional<double> r_star(std::span<const Judgement> list, std::size_t cutoff, std::size_t tp_star) {
    if (tp_star == 0) {
        return std::nullopt;
    }
    return static_cast<double>(relevant_within(list, cutoff)) / static_cast<double>(tp_star);
}

std::size_t union_relevant(std::span<const std::vector<std::string>> lists, const LabelSet& labels) {
    std::set<std::string> relevant;
    for (const auto& list : lists) {
        for (const auto& id : list) {
            if (labels.relevant(id).value_or(false)) {
                relevant.insert(id);
            }
        }
    }
    return relevant.size();
}

EvalReport evaluate(std::span<const NamedList> lists, const LabelSet& labels, const EvalCutoffs& cutoffs,
                    std::optional<std::size_t> tp_star) {
    EvalReport report;
    report.cutoffs = cutoffs;
    if (tp_star) {
        report.tp_star = *tp_star;
    } else {
        std::vector<std::vector<std::string>> ids;
        for (const auto& l : lists) {
            ids.push_back(l.ids);
        }
        report.tp_star = union_relevant(ids, labels);
    }
    for (const auto& l : lists) {
        const auto j = judge(l.ids, labels);
        ListEvaluation ev;
        ev.name = l.name;
        ev.length = j.size();
        ev.relevant = static_cast<std::size_t>(std::count(j.begin(), j.end(), Judgement::Relevant));
        ev.unlabeled = static_cast<std::size_t>(std::count(j.begin(), j.end(), Judgement::Unlabeled));
        for (auto k : cutoffs.precision) {
            ev.precision.push_back(j.empty() ? 0.0 : precision_at_k(j, k));
        }
        for (auto k : cutoffs.avg_precision) {
            ev.avg_precision.push_back(avg_precision_at_k(j, k));
        }
        for (auto k : cutoffs.recall) {
            ev.recall.push_back(r_star(j, k, report.tp_star));
        }
        report.lists.push_back(std::move(ev));
    }
    return report;
}

namespace {

std::vector<std::string> column_names(const EvalCutoffs& c) {
    std::vector<std::string> names;
    for (auto k : c.precision) {
        names.push_back(fmt::format("p@{}", k));
    }
    for (auto k : c.avg_precision) {
        names.push_back(fmt::format("avg p@{}", k));
    }
    for (auto k : c.recall) {
        names.push_back(fmt::format("r* at {}", k));
    }
    return names;
}

}  // namespace

void write_eval_csv(std::ostream& out, const EvalReport& report) {
    std::vector<std::string> header{"list", "length", "relevant", "unlabeled", "tp_star"};
    for (auto& n : column_names(report.cutoffs)) {
        header.push_back(std::move(n));
    }
    csv::write_row(out, header);
    for (const auto& ev : report.lists) {
        std::vector<std::string> row{ev.name, std::to_string(ev.length), std::to_string(ev.relevant),
                                     std::to_string(ev.unlabeled), std::to_string(report.tp_star)};
        for (double v : ev.precision) {
            row.push_back(csv::format_number(v));
        }
        for (double v : ev.avg_precision) {
            row.push_back(csv::format_number(v));
        }
        for (const auto& v : ev.recall) {
            row.push_back(v ? csv::format_number(*v) : "undefined");
        }
        csv::write_row(out, row);
    }
}

void write_eval_table(std::ostream& out, const EvalReport& report) {
    std::size_t name_width = 4;
    for (const auto& ev : report.lists) {
        name_width = std::max(name_width, ev.name.size());
    }
    const auto names = column_names(report.cutoffs);
    out << fmt::format("{:<{}}", "list", name_width);
    for (const auto& n : names) {
        out << fmt::format("  {:>9}", n);
    }
    out << '\n';
    for (const auto& ev : report.lists) {
        out << fmt::format("{:<{}}", ev.name, name_width);
        for (double v : ev.precision) {
            out << fmt::format("  {:>9.2f}", v);
        }
        for (double v : ev.avg_precision) {
            out << fmt::format("  {:>9.2f}", v);
        }
        for (const auto& v : ev.recall) {
            out << (v ? fmt::format("  {:>9.2f}", *v) : fmt::format("  {:>9}", "n/a"));
        }
        out << '\n';
    }
    out << fmt::format("tp* = {}\n", report.tp_star);
}

double zipf_slope(std::span<const double> strengths) {
    std::vector<double> s;
    for (double v : strengths) {
        if (v > 0.0) {
            s.push_back(v);
        }
    }
    if (s.size() < 3) {
        throw ArgumentError("zipf_slope: need at least 3 positive strengths");
    }
    std::sort(s.begin(), s.end(), std::greater<>());
    const double n = static_cast<double>(s.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        mx += std::log(static_cast<double>(i + 1));
        my += std::log(s[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double dx = std::log(static_cast<double>(i + 1)) - mx;
        sxy += dx * (std::log(s[i]) - my);
        sxx += dx * dx;
    }
    const double slope = sxy / sxx;
    return slope == 0.0 ? 0.0 : -slope;
}

std::vector<HistogramBin> histogram(std::span<const double> values, Binning binning, std::size_t bins) {
    if (values.empty()) {
        return {};
    }
    if (binning != Binning::Integer && bins == 0) {
        throw ArgumentError("histogram: bin count must be positive");
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::vector<HistogramBin> out;
    switch (binning) {
        case Binning::Integer: {
            const auto first = static_cast<long long>(std::floor(lo));
            const auto last = static_cast<long long>(std::floor(hi));
            for (long long k = first; k <= last; ++k) {
                out.push_back(HistogramBin{static_cast<double>(k), static_cast<double>(k + 1), 0});
            }
            for (double v : values) {
                ++out[static_cast<std::size_t>(static_cast<long long>(std::floor(v)) - first)].count;
            }
            break;
        }
        case Binning::Linear: {
            const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
            for (std::size_t b = 0; b < bins; ++b) {
                out.push_back(HistogramBin{lo + width * static_cast<double>(b),
                                           lo + width * static_cast<double>(b + 1), 0});
            }
            for (double v : values) {
                auto b = static_cast<std::size_t>((v - lo) / width);
                ++out[std::min(b, bins - 1)].count;
            }
            break;
        }
        case Binning::Log: {
            std::size_t zeros = 0;
            double pos_lo = 0.0;
            for (double v : values) {
                if (v < 0.0) {
                    throw ArgumentError("histogram: log binning needs non-negative values");
                }
                if (v == 0.0) {
                    ++zeros;
                } else if (pos_lo == 0.0 || v < pos_lo) {
                    pos_lo = v;
                }
            }
            if (zeros > 0) {
                out.push_back(HistogramBin{0.0, 0.0, zeros});
            }
            if (pos_lo > 0.0) {
                const double step = 1.0 / static_cast<double>(bins);
                const double first = std::floor(std::log10(pos_lo) / step) * step;
                const std::size_t offset = out.size();
                const auto count =
                    static_cast<std::size_t>(std::floor((std::log10(hi) - first) / step)) + 1;
                for (std::size_t b = 0; b < count; ++b) {
                    out.push_back(HistogramBin{std::pow(10.0, first + step * static_cast<double>(b)),
                                               std::pow(10.0, first + step * static_cast<double>(b + 1)), 0});
                }
                for (double v : values) {
                    if (v > 0.0) {
                        auto b = static_cast<std::size_t>(std::floor((std::log10(v) - first) / step));
                        ++out[offset + std::min(b, count - 1)].count;
                    }
                }
            }
            break;
        }
    }
    return out;
}

void distribution_export(std::ostream& out, const TemporalLayer& layer, Binning amount_binning, std::size_t bins,
                         bool header) {
    if (header) {
        out << "interval,variable,bin_lower,bin_upper,count\n";
    }
    auto emit = [&](std::string_view name, std::span<const double> values, Binning b) {
        for (const auto& bin : histogram(values, b, bins)) {
            if (bin.count == 0) {
                continue;
            }
            csv::write_row(out, {layer.label(), std::string(name), csv::format_number(bin.lower),
                                 csv::format_number(bin.upper), std::to_string(bin.count)});
        }
    };
    const std::size_t n = layer.node_count();
    const double nd = static_cast<double>(n);
    if (n > 0) {
        const auto deg = degree_centralities(layer);
        auto counts = [&](const CentralityVector& v) {
            std::vector<double> k(n);
            for (std::size_t i = 0; i < n; ++i) {
                k[i] = std::round(v.scores[i] * nd);
            }
            return k;
        };
        emit("indegree", counts(deg.in), Binning::Integer);
        emit("outdegree", counts(deg.out), Binning::Integer);
        emit("degree", counts(deg.total), Binning::Integer);
        const auto str = strength_centralities(layer);
        emit("instrength", str.in.scores, amount_binning);
        emit("outstrength", str.out.scores, amount_binning);
    }
    std::vector<double> amounts;
    for (const auto& e : layer.edges()) {
        amounts.push_back(e.weight);
    }
    emit("amount", amounts, amount_binning);
}

}  // namespace rankshift
