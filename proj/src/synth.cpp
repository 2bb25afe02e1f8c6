#include "rankshift/synth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <unordered_set>

#include "rankshift/csv.hpp"

namespace rankshift {

TemporalLayer barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed, std::string label) {
    if (m < 1 || n <= m) {
        throw ArgumentError(fmt::format("barabasi_albert: need n > m >= 1, got n={} m={}", n, m));
    }
    std::mt19937_64 rng(seed);
    std::vector<Edge> edges;
    edges.reserve(m * (n - m) + m * (m - 1) / 2);
    std::vector<NodeIndex> endpoints;  // each node repeated once per incident edge
    for (NodeIndex i = 1; i < m; ++i) {
        for (NodeIndex j = 0; j < i; ++j) {
            edges.push_back(Edge{i, j, 1.0});
            endpoints.push_back(i);
            endpoints.push_back(j);
        }
    }
    std::vector<NodeIndex> targets;
    for (auto v = static_cast<NodeIndex>(m); v < n; ++v) {
        targets.clear();
        while (targets.size() < m) {
            NodeIndex t = 0;
            if (endpoints.empty()) {
                t = std::uniform_int_distribution<NodeIndex>(0, v - 1)(rng);
            } else {
                t = endpoints[std::uniform_int_distribution<std::size_t>(0, endpoints.size() - 1)(rng)];
            }
            if (std::find(targets.begin(), targets.end(), t) == targets.end()) {
                targets.push_back(t);
            }
        }
        for (NodeIndex t : targets) {
            edges.push_back(Edge{v, t, 1.0});
            endpoints.push_back(v);
            endpoints.push_back(t);
        }
    }
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = std::to_string(i);
    }
    return TemporalLayer(std::move(label), make_node_set(std::move(ids)), std::move(edges));
}

TemporalLayer reshuffle_edges(const TemporalLayer& layer, double fraction, std::uint64_t seed, std::string label) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ArgumentError(fmt::format("reshuffle_edges: fraction must lie in (0,1], got {}", fraction));
    }
    const std::size_t n = layer.node_count();
    const auto source = layer.edges();
    const std::size_t m = source.size();
    const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(m)));
    if (label.empty()) {
        label = layer.label();
    }
    std::vector<Edge> edges(source.begin(), source.end());
    if (k == 0) {
        return TemporalLayer(std::move(label), layer.nodes(), std::move(edges));
    }
    if (n < 2) {
        throw Error("reshuffle_edges: need at least two nodes to rewire");
    }

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> pick(m);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = std::uniform_int_distribution<std::size_t>(i, m - 1)(rng);
        std::swap(pick[i], pick[j]);
    }
    pick.resize(k);
    std::sort(pick.begin(), pick.end());

    auto key = [n](NodeIndex s, NodeIndex d) { return static_cast<std::uint64_t>(s) * n + d; };
    std::unordered_set<std::uint64_t> taken;
    taken.reserve(m * 2);
    for (const auto& e : source) {
        taken.insert(key(e.src, e.dst));
    }
    std::uniform_int_distribution<NodeIndex> node(0, static_cast<NodeIndex>(n - 1));
    const std::size_t max_tries = 1000;
    for (std::size_t idx : pick) {
        bool placed = false;
        for (std::size_t attempt = 0; attempt < max_tries && !placed; ++attempt) {
            const NodeIndex s = node(rng);
            const NodeIndex d = node(rng);
            if (s == d || taken.count(key(s, d)) != 0) {
                continue;
            }
            taken.insert(key(s, d));
            edges[idx].src = s;
            edges[idx].dst = d;
            placed = true;
        }
        if (!placed) {
            throw Error(fmt::format("reshuffle_edges: no free node pair found after {} tries, graph too dense",
                                    max_tries));
        }
    }
    return TemporalLayer(std::move(label), layer.nodes(), std::move(edges));
}

std::string_view to_string(AnomalyKind kind) {
    return kind == AnomalyKind::VolumeSpike ? "volume_spike" : "counterparty_shift";
}

std::vector<Injection> random_injections(const SynthProfile& profile, std::size_t count, std::uint64_t seed) {
    if (count > profile.nodes) {
        throw ArgumentError("random_injections: more injections than nodes");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> nodes(profile.nodes);
    std::iota(nodes.begin(), nodes.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        std::swap(nodes[i], nodes[std::uniform_int_distribution<std::size_t>(i, nodes.size() - 1)(rng)]);
    }
    std::vector<Injection> out;
    for (std::size_t i = 0; i < count; ++i) {
        Injection inj;
        inj.node = nodes[i];
        inj.month = profile.months - 1;
        inj.kind = i % 2 == 0 ? AnomalyKind::VolumeSpike : AnomalyKind::CounterpartyShift;
        out.push_back(inj);
    }
    return out;
}

namespace {

Date add_months(Date d, std::size_t months) {
    const int total = d.year * 12 + (d.month - 1) + static_cast<int>(months);
    return Date{total / 12, total % 12 + 1, 1};
}

int days_in(const Date& d) {
    static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = (d.year % 4 == 0 && d.year % 100 != 0) || d.year % 400 == 0;
    return (d.month == 2 && leap) ? 29 : days[d.month - 1];
}

}  // namespace

SynthData synth_transactions(const SynthProfile& profile, std::uint64_t seed) {
    if (profile.nodes < 2 || profile.months < 1 || profile.countries < 1 || profile.partners < 1 ||
        profile.partners >= profile.nodes || profile.accounts_per_node < 1) {
        throw ArgumentError("synth_transactions: invalid profile");
    }
    for (const auto& inj : profile.injections) {
        if (inj.node >= profile.nodes || inj.month >= profile.months || !(inj.factor > 0.0)) {
            throw ArgumentError("synth_transactions: injection outside the profile");
        }
    }
    std::mt19937_64 rng(seed);
    SynthData data;

    std::vector<std::string> countries;
    std::vector<RiskLevel> country_risk;
    const auto high = static_cast<std::size_t>(std::lround(profile.high_risk_share * profile.countries));
    const auto medium = static_cast<std::size_t>(std::lround(profile.medium_risk_share * profile.countries));
    for (std::size_t c = 0; c < profile.countries; ++c) {
        countries.push_back(fmt::format("{}{}", static_cast<char>('A' + (c / 26) % 26), static_cast<char>('A' + c % 26)));
        const RiskLevel level = c < high ? RiskLevel::High : c < high + medium ? RiskLevel::Medium : RiskLevel::Low;
        country_risk.push_back(level);
        data.risk.set(countries.back(), level);
    }
    std::vector<std::size_t> high_risk_nodes;
    std::vector<std::size_t> node_country(profile.nodes);
    for (std::size_t i = 0; i < profile.nodes; ++i) {
        node_country[i] = std::uniform_int_distribution<std::size_t>(0, profile.countries - 1)(rng);
        data.node_ids.push_back(fmt::format("BK{:04}{}", i, countries[node_country[i]]));
        if (country_risk[node_country[i]] == RiskLevel::High) {
            high_risk_nodes.push_back(i);
        }
    }

    // Stable backbone: each node spreads its typical volume over a fixed set
    // of counterparties.
    std::lognormal_distribution<double> volume(profile.volume_log_mean, profile.volume_log_sigma);
    std::uniform_real_distribution<double> share(0.5, 1.5);
    struct Link {
        std::size_t src, dst;
        double weight;
    };
    std::vector<Link> backbone;
    for (std::size_t i = 0; i < profile.nodes; ++i) {
        const double v = volume(rng);
        std::vector<std::size_t> partners;
        while (partners.size() < profile.partners) {
            const auto j = std::uniform_int_distribution<std::size_t>(0, profile.nodes - 1)(rng);
            if (j != i && std::find(partners.begin(), partners.end(), j) == partners.end()) {
                partners.push_back(j);
            }
        }
        std::vector<double> w(partners.size());
        for (auto& x : w) {
            x = share(rng);
        }
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        for (std::size_t k = 0; k < partners.size(); ++k) {
            backbone.push_back(Link{i, partners[k], v * w[k] / total});
        }
    }

    std::normal_distribution<double> jitter(0.0, 1.0);
    std::bernoulli_distribution active(profile.edge_activity);
    const IntervalSpec months;
    for (std::size_t t = 0; t < profile.months; ++t) {
        const Date month_start = add_months(profile.start, t);
        const std::string label = months.label(month_start);
        std::vector<Link> links;
        for (const auto& l : backbone) {
            const bool on = active(rng);
            const double noise = std::max(0.05, 1.0 + profile.monthly_noise * jitter(rng));
            if (on) {
                links.push_back(Link{l.src, l.dst, l.weight * noise});
            }
        }
        for (const auto& inj : profile.injections) {
            if (inj.month != t) {
                continue;
            }
            data.truth.push_back(GroundTruth{data.node_ids[inj.node], label, inj.kind});
            if (inj.kind == AnomalyKind::VolumeSpike) {
                for (auto& l : links) {
                    if (l.src == inj.node || l.dst == inj.node) {
                        l.weight *= inj.factor;
                    }
                }
            } else {
                double moved = 0.0;
                std::set<std::size_t> old_partners;
                for (auto& l : links) {
                    if (l.src == inj.node) {
                        moved += l.weight;
                        old_partners.insert(l.dst);
                        l.weight = 0.0;
                    }
                }
                std::vector<std::size_t> pool;
                for (auto j : high_risk_nodes) {
                    if (j != inj.node && old_partners.count(j) == 0) {
                        pool.push_back(j);
                    }
                }
                if (pool.empty()) {
                    for (std::size_t j = 0; j < profile.nodes; ++j) {
                        if (j != inj.node && old_partners.count(j) == 0) {
                            pool.push_back(j);
                        }
                    }
                }
                std::shuffle(pool.begin(), pool.end(), rng);
                pool.resize(std::min(pool.size(), profile.partners));
                const double each = std::max(moved, 1.0) * inj.factor / static_cast<double>(pool.size());
                for (auto j : pool) {
                    links.push_back(Link{inj.node, j, each});
                }
            }
        }
        auto& intended = data.intended[label];
        for (const auto& l : links) {
            if (l.weight <= 0.0) {
                continue;
            }
            const auto cents = std::max<std::int64_t>(100, std::llround(l.weight * 100.0));
            intended[{data.node_ids[l.src], data.node_ids[l.dst]}] += cents;
        }

        std::uniform_int_distribution<int> day(1, days_in(month_start));
        std::uniform_int_distribution<int> parts(1, 3);
        std::uniform_int_distribution<std::size_t> account(0, profile.accounts_per_node - 1);
        std::bernoulli_distribution swift(0.1);
        std::unordered_map<std::string, std::size_t> index_of;
        for (std::size_t i = 0; i < data.node_ids.size(); ++i) {
            index_of.emplace(data.node_ids[i], i);
        }
        for (const auto& [pair, cents] : intended) {
            const std::size_t src = index_of.at(pair.first);
            const std::size_t dst = index_of.at(pair.second);
            const int pieces = static_cast<int>(std::min<std::int64_t>(parts(rng), cents));
            std::vector<std::int64_t> cuts;
            for (int p = 1; p < pieces; ++p) {
                cuts.push_back(std::uniform_int_distribution<std::int64_t>(1, cents - 1)(rng));
            }
            cuts.push_back(0);
            cuts.push_back(cents);
            std::sort(cuts.begin(), cuts.end());
            for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
                const std::int64_t amount = cuts[p + 1] - cuts[p];
                if (amount == 0) {
                    continue;
                }
                Transaction tx;
                tx.date = Date{month_start.year, month_start.month, day(rng)};
                tx.transaction_id = fmt::format("T{:08}", data.transactions.size() + 1);
                tx.sender_bic = pair.first;
                tx.receiver_bic = pair.second;
                tx.sender_iban = fmt::format("{}{:04}", pair.first, account(rng));
                tx.receiver_iban = fmt::format("{}{:04}", pair.second, account(rng));
                tx.sender_country_bank = countries[node_country[src]];
                tx.receiver_country_bank = countries[node_country[dst]];
                tx.sender_country_residence = tx.sender_country_bank;
                tx.receiver_country_residence = tx.receiver_country_bank;
                tx.amount_cents = amount;
                tx.currency = "EUR";
                tx.source = swift(rng) ? PaymentSource::SWIFT : PaymentSource::SEPA;
                data.transactions.push_back(std::move(tx));
            }
        }
    }
    return data;
}

void write_transactions(std::ostream& out, std::span<const Transaction> transactions) {
    std::vector<std::string> header;
    for (std::size_t f = 0; f < field_count; ++f) {
        header.emplace_back(field_name(static_cast<Field>(f)));
    }
    csv::write_row(out, header);
    for (const auto& t : transactions) {
        csv::write_row(out, {format_date(t.date), t.transaction_id, t.sender_bic, t.receiver_bic, t.sender_iban,
                             t.receiver_iban, t.sender_country_residence, t.receiver_country_residence,
                             t.sender_country_bank, t.receiver_country_bank, format_cents(t.amount_cents), t.currency,
                             t.source == PaymentSource::SEPA ? "SEPA" : "SWIFT"});
    }
}

void write_ground_truth(std::ostream& out, std::span<const GroundTruth> truth) {
    out << "node_id,month,anomaly_kind\n";
    for (const auto& g : truth) {
        csv::write_row(out, {g.node_id, g.month, std::string(to_string(g.kind))});
    }
}

void write_risk_table(std::ostream& out, const RiskTable& risk) {
    out << "country,level\n";
    out << "*," << to_string(risk.default_level()) << '\n';
    for (const auto& [country, level] : risk.entries()) {
        csv::write_row(out, {country, std::string(to_string(level))});
    }
}

}  // namespace rankshift
