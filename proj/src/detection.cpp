#include "rankshift/detection.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>
#include <random>

#include "rankshift/csv.hpp"

namespace rankshift {

const MetricStability* StabilityReport::find(Metric metric) const {
    for (const auto& m : metrics) {
        if (m.metric == metric) {
            return &m;
        }
    }
    return nullptr;
}

bool StabilityReport::any_valid() const {
    return std::any_of(metrics.begin(), metrics.end(), [](const auto& m) { return m.valid; });
}

StabilityReport stability_check(std::span<const std::vector<Ranking>> rankings, double theta, int repetitions,
                                std::uint64_t seed) {
    if (!(theta > 0.0 && theta < 1.0)) {
        throw ArgumentError(fmt::format("stability_check: theta must lie in (0,1), got {}", theta));
    }
    if (repetitions < 1) {
        throw ArgumentError("stability_check: at least one random repetition is required");
    }
    StabilityReport report;
    report.theta = theta;
    report.repetitions = repetitions;
    report.seed = seed;
    for (std::size_t slot = 0; slot < rankings.size(); ++slot) {
        const auto& seq = rankings[slot];
        if (seq.size() < 2) {
            throw ArgumentError("stability_check: need at least two layers");
        }
        MetricStability ms;
        ms.metric = seq.front().metric;
        ms.valid = true;
        for (std::size_t p = 0; p + 1 < seq.size(); ++p) {
            const Ranking& x = seq[p];
            const Ranking& y = seq[p + 1];
            PairStability ps;
            ps.from = x.interval;
            ps.to = y.interval;
            ps.rho = spearman(x, y);
            ps.tau = kendall(x, y);
            ps.passes = ps.rho && ps.tau && std::max(*ps.rho, *ps.tau) > theta;

            std::seed_seq seq_seed{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                                   static_cast<std::uint32_t>(slot), static_cast<std::uint32_t>(p)};
            std::mt19937_64 rng(seq_seed);
            std::vector<double> shuffled = y.fractional;
            double rho_sum = 0.0;
            double tau_sum = 0.0;
            for (int r = 0; r < repetitions; ++r) {
                std::shuffle(shuffled.begin(), shuffled.end(), rng);
                rho_sum += spearman(x.fractional, shuffled).value_or(0.0);
                tau_sum += kendall(x.fractional, shuffled).value_or(0.0);
            }
            ps.random_rho = rho_sum / repetitions;
            ps.random_tau = tau_sum / repetitions;
            ms.valid = ms.valid && ps.passes;
            ms.pairs.push_back(std::move(ps));
        }
        report.metrics.push_back(std::move(ms));
    }
    return report;
}

StabilityReport stability_check(std::span<const TemporalLayer> layers, std::span<const Metric> metrics,
                                double theta, int repetitions, std::uint64_t seed, const CentralityParams& params) {
    std::vector<std::vector<Ranking>> rankings;
    for (Metric m : metrics) {
        std::vector<Ranking> seq;
        for (const auto& layer : layers) {
            seq.push_back(rank_nodes(compute_metric(layer, m, params)));
        }
        rankings.push_back(std::move(seq));
    }
    return stability_check(rankings, theta, repetitions, seed);
}

void write_stability_report(std::ostream& out, const StabilityReport& report) {
    auto opt = [](const std::optional<double>& v) { return v ? csv::format_number(*v) : std::string("undefined"); };
    out << "metric,from,to,rho,tau,all_equals,random_rho,random_tau,passes,theta,metric_valid\n";
    for (const auto& m : report.metrics) {
        for (const auto& p : m.pairs) {
            csv::write_row(out, {std::string(to_string(m.metric)), p.from, p.to, opt(p.rho), opt(p.tau),
                                 csv::format_number(p.all_equals), csv::format_number(p.random_rho),
                                 csv::format_number(p.random_tau), p.passes ? "1" : "0",
                                 csv::format_number(report.theta), m.valid ? "1" : "0"});
        }
    }
}

std::vector<Residual> residuals(const Ranking& x, const Ranking& y) {
    if (x.size() != y.size()) {
        throw ArgumentError("residuals: rankings cover different node sets");
    }
    std::vector<Residual> out(x.size());
    for (NodeIndex i = 0; i < x.size(); ++i) {
        out[i] = Residual{i, static_cast<std::int64_t>(x.position[i]) - static_cast<std::int64_t>(y.position[i])};
    }
    return out;
}

std::vector<Residual> drop_silent(std::span<const Residual> res, std::span<const double> scores_x,
                                  std::span<const double> scores_y) {
    std::vector<Residual> out;
    out.reserve(res.size());
    for (const auto& r : res) {
        if (scores_x[r.node] != 0.0 || scores_y[r.node] != 0.0) {
            out.push_back(r);
        }
    }
    return out;
}

std::vector<Residual> select_topk_abs(std::span<const Residual> res, std::size_t k) {
    if (k < 1) {
        throw ArgumentError("select_topk_abs: K must be at least 1");
    }
    std::vector<Residual> pool;
    std::copy_if(res.begin(), res.end(), std::back_inserter(pool), [](const Residual& r) { return r.delta != 0; });
    auto better = [](const Residual& a, const Residual& b) {
        const auto ma = a.delta < 0 ? -a.delta : a.delta;
        const auto mb = b.delta < 0 ? -b.delta : b.delta;
        if (ma != mb) {
            return ma > mb;
        }
        if (a.delta != b.delta) {
            return a.delta > b.delta;
        }
        return a.node < b.node;
    };
    const std::size_t take = std::min(k, pool.size());
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take), pool.end(), better);
    pool.resize(take);
    return pool;
}

std::vector<Residual> select_topk_split(std::span<const Residual> res, std::size_t k_pos, std::size_t k_neg) {
    std::vector<Residual> gainers;
    std::vector<Residual> losers;
    for (const auto& r : res) {
        if (r.delta > 0) {
            gainers.push_back(r);
        } else if (r.delta < 0) {
            losers.push_back(r);
        }
    }
    auto take = [](std::vector<Residual>& v, std::size_t k, auto cmp) {
        const std::size_t t = std::min(k, v.size());
        std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(t), v.end(), cmp);
        v.resize(t);
    };
    take(gainers, k_pos, [](const Residual& a, const Residual& b) {
        return a.delta != b.delta ? a.delta > b.delta : a.node < b.node;
    });
    take(losers, k_neg, [](const Residual& a, const Residual& b) {
        return a.delta != b.delta ? a.delta < b.delta : a.node < b.node;
    });
    gainers.insert(gainers.end(), losers.begin(), losers.end());
    return gainers;
}

std::string_view to_string(Direction d) { return d == Direction::Gained ? "gained" : "lost"; }

std::string_view to_string(FilterStatus s) {
    switch (s) {
        case FilterStatus::Unfiltered:
            return "unfiltered";
        case FilterStatus::Kept:
            return "kept";
        case FilterStatus::KeptUnresolvedRisk:
            return "unresolved-risk";
        case FilterStatus::Removed:
            return "removed";
    }
    return "?";
}

std::vector<OutlierRecord> make_outliers(std::span<const Residual> selection, const Ranking& x, const Ranking& y) {
    std::vector<OutlierRecord> out;
    out.reserve(selection.size());
    for (std::size_t k = 0; k < selection.size(); ++k) {
        const auto& r = selection[k];
        OutlierRecord rec;
        rec.node = r.node;
        rec.metric = x.metric;
        rec.r_x = x.position.at(r.node);
        rec.r_y = y.position.at(r.node);
        rec.delta = r.delta;
        rec.list_position = k + 1;
        out.push_back(rec);
    }
    return out;
}

FilterResult threshold_filter(std::span<const OutlierRecord> outliers, const TemporalLayer& layer_x,
                              const TemporalLayer& layer_y, std::span<const std::optional<RiskLevel>> node_risk,
                              double t_hr, double multiplier) {
    if (!(t_hr > 0.0)) {
        throw ArgumentError("threshold_filter: T_hr must be positive");
    }
    if (!(multiplier >= 1.0)) {
        throw ArgumentError("threshold_filter: multiplier must be at least 1");
    }
    FilterResult result;
    for (const auto& rec : outliers) {
        const NodeIndex i = rec.node;
        const double volume_x = layer_x.in_strength(i) + layer_x.out_strength(i);
        const double volume_y = layer_y.in_strength(i) + layer_y.out_strength(i);
        const double volume = std::max(volume_x, volume_y);
        OutlierRecord out = rec;
        const auto risk = i < node_risk.size() ? node_risk[i] : std::nullopt;
        if (!risk) {
            out.filter = FilterStatus::KeptUnresolvedRisk;
            result.kept.push_back(out);
            continue;
        }
        const double threshold = *risk == RiskLevel::High ? t_hr : multiplier * t_hr;
        if (volume > threshold) {
            out.filter = FilterStatus::Kept;
            result.kept.push_back(out);
        } else {
            out.filter = FilterStatus::Removed;
            result.removed.push_back(RemovedOutlier{
                out, fmt::format("{} risk: max volume {} not above {}", to_string(*risk), csv::format_number(volume),
                                 csv::format_number(threshold))});
        }
    }
    for (std::size_t k = 0; k < result.kept.size(); ++k) {
        result.kept[k].list_position = k + 1;
    }
    return result;
}

std::vector<double> delta_hra(const TemporalLayer& layer_x, const TemporalLayer& layer_y,
                              std::span<const std::optional<RiskLevel>> node_risk) {
    if (layer_x.node_count() != layer_y.node_count()) {
        throw ArgumentError("delta_hra: layers cover different node sets");
    }
    auto high = [&](NodeIndex j) { return j < node_risk.size() && node_risk[j] == RiskLevel::High; };
    auto volume = [&](const TemporalLayer& layer) {
        std::vector<double> v(layer.node_count(), 0.0);
        for (const auto& e : layer.edges()) {
            if (high(e.dst)) {
                v[e.src] += e.weight;
            }
            if (e.src != e.dst && high(e.src)) {
                v[e.dst] += e.weight;
            }
        }
        return v;
    };
    auto vx = volume(layer_x);
    const auto vy = volume(layer_y);
    for (std::size_t i = 0; i < vx.size(); ++i) {
        vx[i] = vy[i] - vx[i];
    }
    return vx;
}

namespace {

bool earlier(const OutlierRecord& a, const OutlierRecord& b) {
    return a.list_position != b.list_position ? a.list_position < b.list_position : a.metric < b.metric;
}

std::map<NodeIndex, std::vector<Metric>> sources_by_node(std::span<const std::vector<OutlierRecord>> lists) {
    std::map<NodeIndex, std::vector<Metric>> sources;
    for (const auto& list : lists) {
        for (const auto& rec : list) {
            auto& s = sources[rec.node];
            if (std::find(s.begin(), s.end(), rec.metric) == s.end()) {
                s.push_back(rec.metric);
            }
        }
    }
    for (auto& [node, s] : sources) {
        std::sort(s.begin(), s.end());
    }
    return sources;
}

double hra_of(std::span<const double> dhra, NodeIndex node) { return node < dhra.size() ? dhra[node] : 0.0; }

}  // namespace

std::vector<FinalEntry> mixed_sort(std::span<const std::vector<OutlierRecord>> lists, std::span<const double> dhra) {
    const auto sources = sources_by_node(lists);
    std::map<NodeIndex, OutlierRecord> first;
    for (const auto& list : lists) {
        for (const auto& rec : list) {
            auto [it, inserted] = first.emplace(rec.node, rec);
            if (!inserted && earlier(rec, it->second)) {
                it->second = rec;
            }
        }
    }
    std::vector<FinalEntry> out;
    for (const auto& [node, rec] : first) {
        out.push_back(FinalEntry{node, sources.at(node), rec, hra_of(dhra, node), 0});
    }
    std::sort(out.begin(), out.end(), [](const FinalEntry& a, const FinalEntry& b) {
        return a.delta_hra != b.delta_hra ? a.delta_hra > b.delta_hra : a.node < b.node;
    });
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].final_position = k + 1;
        out[k].record.delta_hra = out[k].delta_hra;
    }
    return out;
}

std::vector<FinalEntry> stratified_sort(std::span<const std::vector<OutlierRecord>> lists,
                                        std::span<const double> dhra) {
    const auto sources = sources_by_node(lists);
    std::vector<OutlierRecord> all;
    for (const auto& list : lists) {
        for (std::size_t k = 0; k < list.size(); ++k) {
            OutlierRecord rec = list[k];
            rec.list_position = k + 1;
            rec.delta_hra = hra_of(dhra, rec.node);
            all.push_back(rec);
        }
    }
    std::sort(all.begin(), all.end(), [](const OutlierRecord& a, const OutlierRecord& b) {
        if (a.list_position != b.list_position) {
            return a.list_position < b.list_position;
        }
        if (a.delta_hra != b.delta_hra) {
            return a.delta_hra > b.delta_hra;
        }
        if (a.node != b.node) {
            return a.node < b.node;
        }
        return a.metric < b.metric;
    });
    std::vector<FinalEntry> out;
    std::vector<NodeIndex> seen;
    for (const auto& rec : all) {
        if (std::find(seen.begin(), seen.end(), rec.node) != seen.end()) {
            continue;
        }
        seen.push_back(rec.node);
        out.push_back(FinalEntry{rec.node, sources.at(rec.node), rec, rec.delta_hra, out.size() + 1});
    }
    return out;
}

namespace {

std::string joined_metrics(std::span<const Metric> metrics) {
    std::string s;
    for (Metric m : metrics) {
        if (!s.empty()) {
            s += ';';
        }
        s += to_string(m);
    }
    return s;
}

}  // namespace

void write_outliers(std::ostream& out, std::span<const OutlierRecord> records, const NodeSet& nodes) {
    out << "node_id,metric,r_x,r_y,delta,direction,delta_hra,final_position\n";
    for (const auto& r : records) {
        csv::write_row(out, {nodes.id(r.node), std::string(to_string(r.metric)), std::to_string(r.r_x),
                             std::to_string(r.r_y), std::to_string(r.delta), std::string(to_string(r.direction())),
                             csv::format_number(r.delta_hra), std::to_string(r.list_position)});
    }
}

void write_final_list(std::ostream& out, std::span<const FinalEntry> entries, const NodeSet& nodes) {
    out << "node_id,metric,r_x,r_y,delta,direction,delta_hra,final_position\n";
    for (const auto& e : entries) {
        const auto& r = e.record;
        csv::write_row(out, {nodes.id(e.node), joined_metrics(e.sources), std::to_string(r.r_x),
                             std::to_string(r.r_y), std::to_string(r.delta), std::string(to_string(r.direction())),
                             csv::format_number(e.delta_hra), std::to_string(e.final_position)});
    }
}

void write_removal_log(std::ostream& out, std::span<const RemovedOutlier> removed, const NodeSet& nodes) {
    out << "node_id,metric,r_x,r_y,delta,reason\n";
    for (const auto& r : removed) {
        csv::write_row(out, {nodes.id(r.record.node), std::string(to_string(r.record.metric)),
                             std::to_string(r.record.r_x), std::to_string(r.record.r_y),
                             std::to_string(r.record.delta), r.reason});
    }
}

}  // namespace rankshift
