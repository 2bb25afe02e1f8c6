#include "rankshift/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <functional>
#include <istream>
#include <ostream>

#include "rankshift/csv.hpp"

namespace rankshift {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
    throw ArgumentError(fmt::format("{}: '{}' is not {}", key, value, expected));
}

double to_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) {
        bad_value(key, v, "a number");
    }
    return out;
}

template <typename T>
T to_unsigned(std::string_view key, std::string_view v) {
    T out{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) {
        bad_value(key, v, "a non-negative integer");
    }
    return out;
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        return false;
    }
    bad_value(key, v, "a boolean");
}

std::string_view to_string(IntervalUnit u) {
    switch (u) {
        case IntervalUnit::Month:
            return "month";
        case IntervalUnit::Quarter:
            return "quarter";
        case IntervalUnit::Year:
            return "year";
    }
    return "month";
}

std::string join_metrics(const std::vector<Metric>& metrics) {
    std::string out;
    for (auto m : metrics) {
        if (!out.empty()) {
            out += ',';
        }
        out += to_string(m);
    }
    return out;
}

std::vector<Metric> parse_metric_list(std::string_view v) {
    if (v == "all") {
        return {all_metrics.begin(), all_metrics.end()};
    }
    std::vector<Metric> out;
    for (const auto& item : csv::split(v, ',')) {
        const auto m = parse_metric(trim(item));
        if (std::find(out.begin(), out.end(), m) == out.end()) {
            out.push_back(m);
        }
    }
    return out;
}

struct Setting {
    std::string key;
    std::function<std::string(const PipelineConfig&)> get;
    std::function<void(PipelineConfig&, std::string_view)> set;
};

Setting text(std::string key, std::string PipelineConfig::*field) {
    return {key, [field](const PipelineConfig& c) { return c.*field; },
            [field](PipelineConfig& c, std::string_view v) { c.*field = std::string(v); }};
}

Setting number(std::string key, double PipelineConfig::*field) {
    return {key, [field](const PipelineConfig& c) { return csv::format_number(c.*field); },
            [key, field](PipelineConfig& c, std::string_view v) { c.*field = to_double(key, v); }};
}

Setting count(std::string key, std::size_t PipelineConfig::*field) {
    return {key, [field](const PipelineConfig& c) { return std::to_string(c.*field); },
            [key, field](PipelineConfig& c, std::string_view v) { c.*field = to_unsigned<std::size_t>(key, v); }};
}

const std::vector<Setting>& settings() {
    static const std::vector<Setting> table = [] {
        std::vector<Setting> t;
        t.push_back(text("input.transactions", &PipelineConfig::transactions));
        t.push_back(text("input.edges", &PipelineConfig::edges));
        t.push_back(text("input.risk_table", &PipelineConfig::risk_table));
        t.push_back(text("input.labels", &PipelineConfig::labels));
        t.push_back(text("input.schema", &PipelineConfig::schema));
        t.push_back({"input.level", [](const PipelineConfig& c) { return std::string(to_string(c.level)); },
                     [](PipelineConfig& c, std::string_view v) { c.level = parse_aggregation_level(v); }});
        t.push_back({"input.interval", [](const PipelineConfig& c) { return std::string(to_string(c.interval)); },
                     [](PipelineConfig& c, std::string_view v) { c.interval = parse_interval_spec(v).unit; }});
        t.push_back({"input.risk_default",
                     [](const PipelineConfig& c) { return std::string(to_string(c.risk_default)); },
                     [](PipelineConfig& c, std::string_view v) {
                         const auto level = parse_risk_level(v);
                         if (!level) {
                             bad_value("input.risk_default", v, "low, medium or high");
                         }
                         c.risk_default = *level;
                     }});

        t.push_back({"centrality.metrics", [](const PipelineConfig& c) { return join_metrics(c.metrics); },
                     [](PipelineConfig& c, std::string_view v) { c.metrics = parse_metric_list(v); }});
        t.push_back({"centrality.alpha", [](const PipelineConfig& c) { return csv::format_number(c.centrality.alpha); },
                     [](PipelineConfig& c, std::string_view v) { c.centrality.alpha = to_double("centrality.alpha", v); }});
        t.push_back({"centrality.pagerank_tolerance",
                     [](const PipelineConfig& c) { return csv::format_number(c.centrality.pagerank_tolerance); },
                     [](PipelineConfig& c, std::string_view v) {
                         c.centrality.pagerank_tolerance = to_double("centrality.pagerank_tolerance", v);
                     }});
        t.push_back({"centrality.pagerank_iterations",
                     [](const PipelineConfig& c) { return std::to_string(c.centrality.pagerank_max_iterations); },
                     [](PipelineConfig& c, std::string_view v) {
                         c.centrality.pagerank_max_iterations = to_unsigned<int>("centrality.pagerank_iterations", v);
                     }});
        t.push_back({"centrality.pagerank_weighted",
                     [](const PipelineConfig& c) { return std::string(c.centrality.pagerank_weighted ? "true" : "false"); },
                     [](PipelineConfig& c, std::string_view v) {
                         c.centrality.pagerank_weighted = to_bool("centrality.pagerank_weighted", v);
                     }});
        t.push_back({"centrality.hits_tolerance",
                     [](const PipelineConfig& c) { return csv::format_number(c.centrality.hits_tolerance); },
                     [](PipelineConfig& c, std::string_view v) {
                         c.centrality.hits_tolerance = to_double("centrality.hits_tolerance", v);
                     }});
        t.push_back({"centrality.hits_iterations",
                     [](const PipelineConfig& c) { return std::to_string(c.centrality.hits_max_iterations); },
                     [](PipelineConfig& c, std::string_view v) {
                         c.centrality.hits_max_iterations = to_unsigned<int>("centrality.hits_iterations", v);
                     }});
        t.push_back({"centrality.normalize_strength",
                     [](const PipelineConfig& c) { return std::string(c.centrality.normalize_strength ? "true" : "false"); },
                     [](PipelineConfig& c, std::string_view v) {
                         c.centrality.normalize_strength = to_bool("centrality.normalize_strength", v);
                     }});
        t.push_back({"centrality.threads", [](const PipelineConfig& c) { return std::to_string(c.centrality.threads); },
                     [](PipelineConfig& c, std::string_view v) {
                         c.centrality.threads = to_unsigned<unsigned>("centrality.threads", v);
                     }});

        t.push_back(number("stability.theta", &PipelineConfig::theta));
        t.push_back({"stability.repetitions", [](const PipelineConfig& c) { return std::to_string(c.repetitions); },
                     [](PipelineConfig& c, std::string_view v) {
                         c.repetitions = to_unsigned<int>("stability.repetitions", v);
                     }});
        t.push_back({"stability.seed", [](const PipelineConfig& c) { return std::to_string(c.seed); },
                     [](PipelineConfig& c, std::string_view v) { c.seed = to_unsigned<std::uint64_t>("stability.seed", v); }});

        t.push_back(text("detection.interval_x", &PipelineConfig::interval_x));
        t.push_back(text("detection.interval_y", &PipelineConfig::interval_y));
        t.push_back({"detection.strategy", [](const PipelineConfig& c) { return std::string(to_string(c.strategy)); },
                     [](PipelineConfig& c, std::string_view v) { c.strategy = parse_selection_strategy(v); }});
        t.push_back(count("detection.k", &PipelineConfig::k));
        t.push_back(count("detection.k_pos", &PipelineConfig::k_pos));
        t.push_back(count("detection.k_neg", &PipelineConfig::k_neg));

        t.push_back(number("filter.t_hr", &PipelineConfig::t_hr));
        t.push_back(number("filter.multiplier", &PipelineConfig::multiplier));

        t.push_back(text("output.dir", &PipelineConfig::dir));
        return t;
    }();
    return table;
}

const Setting& setting(std::string_view key) {
    for (const auto& s : settings()) {
        if (s.key == key) {
            return s;
        }
    }
    throw ArgumentError(fmt::format("unknown config key '{}'", key));
}

}  // namespace

std::string_view to_string(SelectionStrategy s) { return s == SelectionStrategy::Split ? "split" : "abs"; }

SelectionStrategy parse_selection_strategy(std::string_view text) {
    if (text == "split") {
        return SelectionStrategy::Split;
    }
    if (text == "abs") {
        return SelectionStrategy::Abs;
    }
    throw ArgumentError(fmt::format("unknown selection strategy '{}' (expected split or abs)", text));
}

void PipelineConfig::validate() const {
    if (!transactions.empty() && !edges.empty()) {
        throw ArgumentError("input.transactions and input.edges are mutually exclusive");
    }
    if (metrics.empty()) {
        throw ArgumentError("centrality.metrics is empty");
    }
    if (!(centrality.alpha > 0.0 && centrality.alpha < 1.0)) {
        throw ArgumentError("centrality.alpha must lie in (0,1)");
    }
    if (!(theta > 0.0 && theta < 1.0)) {
        throw ArgumentError("stability.theta must lie in (0,1)");
    }
    if (repetitions < 1) {
        throw ArgumentError("stability.repetitions must be at least 1");
    }
    if (strategy == SelectionStrategy::Abs ? k < 1 : k_pos + k_neg < 1) {
        throw ArgumentError("detection: K must be at least 1");
    }
    if (t_hr < 0.0) {
        throw ArgumentError("filter.t_hr must be non-negative");
    }
    if (multiplier < 1.0) {
        throw ArgumentError("filter.multiplier must be at least 1");
    }
    if (dir.empty()) {
        throw ArgumentError("output.dir is empty");
    }
}

ConfigValues parse_config(std::istream& in) {
    ConfigValues out;
    std::string section;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw InputError(fmt::format("config line {}: unterminated section header", line_no));
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw InputError(fmt::format("config line {}: expected key = value", line_no));
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        out[section.empty() ? std::string(key) : section + "." + std::string(key)] = std::string(value);
    }
    if (in.bad()) {
        throw InputError("config: read error");
    }
    return out;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& s : settings()) {
            k.push_back(s.key);
        }
        return k;
    }();
    return keys;
}

void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value) {
    setting(key).set(config, trim(value));
}

void apply_settings(PipelineConfig& config, const ConfigValues& values) {
    for (const auto& [key, value] : values) {
        apply_setting(config, key, value);
    }
}

std::string get_setting(const PipelineConfig& config, std::string_view key) { return setting(key).get(config); }

void write_config(std::ostream& out, const PipelineConfig& config) {
    std::string section;
    for (const auto& s : settings()) {
        const auto dot = s.key.find('.');
        const auto sec = s.key.substr(0, dot);
        if (sec != section) {
            out << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
            section = sec;
        }
        out << s.key.substr(dot + 1) << " = " << s.get(config) << '\n';
    }
}

}  // namespace rankshift
