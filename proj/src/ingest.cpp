#include "rankshift/ingest.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <istream>
#include <limits>
#include <unordered_map>

#include "rankshift/csv.hpp"

namespace rankshift {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool parse_int(std::string_view s, int& out) {
    if (s.empty() || s.size() > 9) {
        return false;
    }
    int v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') {
            return false;
        }
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

int days_in_month(int year, int month) {
    static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return (month == 2 && leap) ? 29 : days[month - 1];
}

constexpr std::array<std::string_view, field_count> kFieldNames = {
    "date",
    "transaction_id",
    "sender_bic",
    "receiver_bic",
    "sender_iban",
    "receiver_iban",
    "sender_country_residence",
    "receiver_country_residence",
    "sender_country_bank",
    "receiver_country_bank",
    "amount",
    "currency",
    "source",
};

bool optional_field(Field f) { return f == Field::SenderIban || f == Field::ReceiverIban; }

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
    text = trim(text);
    const auto cut = text.find_first_of(" T");
    if (cut != std::string_view::npos) {
        text = text.substr(0, cut);
    }
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    Date d;
    if (!parse_int(text.substr(0, 4), d.year) || !parse_int(text.substr(5, 2), d.month) ||
        !parse_int(text.substr(8, 2), d.day)) {
        return std::nullopt;
    }
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) {
        return std::nullopt;
    }
    return d;
}

std::string format_date(const Date& d) { return fmt::format("{:04}-{:02}-{:02}", d.year, d.month, d.day); }

std::optional<std::int64_t> parse_amount_cents(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    if (text.empty()) {
        return std::nullopt;
    }
    const auto dot = text.find('.');
    const std::string_view whole = text.substr(0, dot);
    const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (whole.empty() && frac.empty()) {
        return std::nullopt;
    }
    auto digits = [](std::string_view s) {
        return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if (!digits(whole) || !digits(frac)) {
        return std::nullopt;
    }
    constexpr std::int64_t limit = std::numeric_limits<std::int64_t>::max() / 100 - 1;
    std::int64_t units = 0;
    for (char c : whole) {
        units = units * 10 + (c - '0');
        if (units > limit) {
            return std::nullopt;
        }
    }
    std::int64_t cents = units * 100;
    if (!frac.empty()) {
        cents += (frac[0] - '0') * 10;
    }
    if (frac.size() > 1) {
        cents += frac[1] - '0';
    }
    if (frac.size() > 2 && frac[2] >= '5') {
        cents += 1;
    }
    return cents;
}

std::string format_cents(std::int64_t cents) {
    return fmt::format("{}{}.{:02}", cents < 0 ? "-" : "", std::abs(cents) / 100, std::abs(cents) % 100);
}

std::string_view field_name(Field f) { return kFieldNames[static_cast<std::size_t>(f)]; }

SchemaConfig::SchemaConfig() {
    for (std::size_t i = 0; i < field_count; ++i) {
        header_names[i] = std::string(kFieldNames[i]);
    }
}

void SchemaConfig::set(std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "delimiter") {
        if (value == "\\t" || value == "tab") {
            delimiter = '\t';
        } else if (value.size() == 1) {
            delimiter = value[0];
        } else {
            throw InputError("schema: delimiter must be a single character, got '" + std::string(value) + "'");
        }
        return;
    }
    for (std::size_t i = 0; i < field_count; ++i) {
        if (kFieldNames[i] == key) {
            header_names[i] = std::string(value);
            return;
        }
    }
    throw InputError("schema: unknown role '" + std::string(key) + "'");
}

SchemaConfig load_schema_config(std::istream& in) {
    if (!in) {
        throw InputError("schema: unreadable stream");
    }
    SchemaConfig schema;
    std::string line;
    while (std::getline(in, line)) {
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw InputError("schema: expected key=value, got '" + std::string(body) + "'");
        }
        schema.set(body.substr(0, eq), body.substr(eq + 1));
    }
    return schema;
}

ParseResult parse_transactions(std::istream& in, const SchemaConfig& schema) {
    if (!in) {
        throw InputError("transactions: unreadable stream");
    }
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            have_header = true;
            break;
        }
    }
    if (!have_header) {
        throw InputError("transactions: missing header row");
    }
    const auto header = csv::split(line, schema.delimiter);
    std::array<std::optional<std::size_t>, field_count> column{};
    for (std::size_t f = 0; f < field_count; ++f) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (trim(header[c]) == schema.header_names[f]) {
                column[f] = c;
                break;
            }
        }
        if (!column[f] && !optional_field(static_cast<Field>(f))) {
            throw InputError("transactions: header lacks mandatory column '" + schema.header_names[f] + "' (" +
                             std::string(kFieldNames[f]) + ")");
        }
    }

    ParseResult result;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        ++result.data_rows;
        auto reject = [&](std::string reason) { result.rejections.push_back(Rejection{line_no, std::move(reason)}); };
        std::vector<std::string> fields;
        try {
            fields = csv::split(line, schema.delimiter);
        } catch (const InputError& e) {
            reject(e.what());
            continue;
        }
        if (fields.size() != header.size()) {
            reject(fmt::format("expected {} fields, found {}", header.size(), fields.size()));
            continue;
        }
        auto get = [&](Field f) -> std::string {
            const auto& c = column[static_cast<std::size_t>(f)];
            return c ? std::string(trim(fields[*c])) : std::string{};
        };

        Transaction t;
        const auto date = parse_date(get(Field::Date));
        if (!date) {
            reject("invalid date '" + get(Field::Date) + "'");
            continue;
        }
        t.date = *date;
        const auto amount = parse_amount_cents(get(Field::Amount));
        if (!amount) {
            reject("invalid amount '" + get(Field::Amount) + "'");
            continue;
        }
        t.amount_cents = *amount;
        const auto source = lower(get(Field::Source));
        if (source == "sepa") {
            t.source = PaymentSource::SEPA;
        } else if (source == "swift") {
            t.source = PaymentSource::SWIFT;
        } else {
            reject("invalid source '" + get(Field::Source) + "'");
            continue;
        }
        t.transaction_id = get(Field::TransactionId);
        t.sender_bic = get(Field::SenderBic);
        t.receiver_bic = get(Field::ReceiverBic);
        t.sender_iban = get(Field::SenderIban);
        t.receiver_iban = get(Field::ReceiverIban);
        t.sender_country_residence = get(Field::SenderCountryResidence);
        t.receiver_country_residence = get(Field::ReceiverCountryResidence);
        t.sender_country_bank = get(Field::SenderCountryBank);
        t.receiver_country_bank = get(Field::ReceiverCountryBank);
        t.currency = get(Field::Currency);

        std::string missing;
        for (Field f : {Field::SenderBic, Field::ReceiverBic, Field::SenderCountryResidence,
                        Field::ReceiverCountryResidence, Field::SenderCountryBank, Field::ReceiverCountryBank}) {
            if (get(f).empty()) {
                missing = std::string(kFieldNames[static_cast<std::size_t>(f)]);
                break;
            }
        }
        if (!missing.empty()) {
            reject("empty " + missing);
            continue;
        }
        if (t.currency.size() != 3) {
            reject("invalid currency '" + t.currency + "'");
            continue;
        }
        result.transactions.push_back(std::move(t));
    }
    return result;
}

std::string_view to_string(AggregationLevel level) {
    switch (level) {
        case AggregationLevel::Country:
            return "country";
        case AggregationLevel::BIC:
            return "bic";
        case AggregationLevel::IBAN:
            return "iban";
    }
    return "?";
}

AggregationLevel parse_aggregation_level(std::string_view text) {
    const auto t = lower(trim(text));
    if (t == "country") {
        return AggregationLevel::Country;
    }
    if (t == "bic") {
        return AggregationLevel::BIC;
    }
    if (t == "iban") {
        return AggregationLevel::IBAN;
    }
    throw ArgumentError("unknown aggregation level '" + std::string(text) + "'");
}

std::pair<std::string_view, std::string_view> node_ids(const Transaction& t, AggregationLevel level) {
    switch (level) {
        case AggregationLevel::Country:
            return {t.sender_country_bank, t.receiver_country_bank};
        case AggregationLevel::BIC:
            return {t.sender_bic, t.receiver_bic};
        case AggregationLevel::IBAN:
            return {t.sender_iban, t.receiver_iban};
    }
    return {};
}

std::string IntervalSpec::label(const Date& d) const {
    switch (unit) {
        case IntervalUnit::Month:
            return fmt::format("{:04}-{:02}", d.year, d.month);
        case IntervalUnit::Quarter:
            return fmt::format("{:04}-Q{}", d.year, (d.month - 1) / 3 + 1);
        case IntervalUnit::Year:
            return fmt::format("{:04}", d.year);
    }
    return {};
}

std::vector<std::string> IntervalSpec::labels_between(const Date& first, const Date& last) const {
    const int step = unit == IntervalUnit::Month ? 1 : unit == IntervalUnit::Quarter ? 3 : 12;
    auto bucket = [&](const Date& d) {
        const int m = d.year * 12 + (d.month - 1);
        return m - (unit == IntervalUnit::Month ? 0 : unit == IntervalUnit::Quarter ? (d.month - 1) % 3 : d.month - 1);
    };
    std::vector<std::string> labels;
    for (int m = bucket(first); m <= bucket(last); m += step) {
        labels.push_back(label(Date{m / 12, m % 12 + 1, 1}));
    }
    return labels;
}

IntervalSpec parse_interval_spec(std::string_view text) {
    const auto t = lower(trim(text));
    if (t == "month" || t == "monthly") {
        return {IntervalUnit::Month};
    }
    if (t == "quarter" || t == "quarterly") {
        return {IntervalUnit::Quarter};
    }
    if (t == "year" || t == "yearly") {
        return {IntervalUnit::Year};
    }
    throw ArgumentError("unknown interval unit '" + std::string(text) + "'");
}

std::vector<TemporalLayer> aggregate(std::span<const Transaction> transactions, AggregationLevel level,
                                     const IntervalSpec& intervals) {
    if (transactions.empty()) {
        return {};
    }
    std::size_t unusable = 0;
    std::vector<std::string> ids;
    Date first = transactions.front().date;
    Date last = first;
    for (const auto& t : transactions) {
        const auto [src, dst] = node_ids(t, level);
        if (src.empty() || dst.empty()) {
            ++unusable;
            continue;
        }
        ids.emplace_back(src);
        ids.emplace_back(dst);
        first = std::min(first, t.date);
        last = std::max(last, t.date);
    }
    if (unusable > 0) {
        throw InputError(fmt::format("cannot aggregate at {} level: {} row(s) lack {} identifiers", to_string(level),
                                     unusable, to_string(level)));
    }
    auto nodes = make_node_set(std::move(ids));
    const auto labels = intervals.labels_between(first, last);
    std::unordered_map<std::string, std::size_t> layer_of;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        layer_of.emplace(labels[i], i);
    }

    const std::uint64_t n = nodes->size();
    std::vector<std::unordered_map<std::uint64_t, std::int64_t>> sums(labels.size());
    for (const auto& t : transactions) {
        const auto [src, dst] = node_ids(t, level);
        const std::uint64_t key = std::uint64_t{nodes->index_of(src)} * n + nodes->index_of(dst);
        sums[layer_of.at(intervals.label(t.date))][key] += t.amount_cents;
    }

    std::vector<TemporalLayer> layers;
    layers.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::vector<Edge> edges;
        edges.reserve(sums[i].size());
        for (const auto& [key, cents] : sums[i]) {
            if (cents > 0) {
                edges.push_back(Edge{static_cast<NodeIndex>(key / n), static_cast<NodeIndex>(key % n),
                                     static_cast<double>(cents) / 100.0});
            }
        }
        layers.emplace_back(labels[i], nodes, std::move(edges));
    }
    return layers;
}

std::string_view to_string(RiskLevel level) {
    switch (level) {
        case RiskLevel::Low:
            return "low";
        case RiskLevel::Medium:
            return "medium";
        case RiskLevel::High:
            return "high";
    }
    return "?";
}

std::optional<RiskLevel> parse_risk_level(std::string_view text) {
    const auto t = lower(trim(text));
    if (t == "low") {
        return RiskLevel::Low;
    }
    if (t == "medium") {
        return RiskLevel::Medium;
    }
    if (t == "high") {
        return RiskLevel::High;
    }
    return std::nullopt;
}

RiskLevel RiskTable::lookup(std::string_view country) const {
    auto it = levels_.find(country);
    return it == levels_.end() ? default_ : it->second;
}

RiskTable load_risk_table(std::istream& in, RiskLevel default_level) {
    if (!in) {
        throw InputError("risk table: unreadable stream");
    }
    RiskTable table(default_level);
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto f = csv::split(line);
        if (f.size() < 2) {
            throw InputError(fmt::format("risk table line {}: expected id,level", line_no));
        }
        const std::string id(trim(f[0]));
        const auto token = lower(trim(f[1]));
        if (first && (token == "level" || token == "risk" || token == "risk_level")) {
            first = false;
            continue;
        }
        first = false;
        const auto level = parse_risk_level(token);
        if (!level) {
            throw InputError(fmt::format("risk table line {}: unknown risk level '{}'", line_no, trim(f[1])));
        }
        if (id == "*") {
            table.set_default(*level);
            continue;
        }
        if (table.contains(id)) {
            warn(fmt::format("risk table line {}: duplicate id '{}', last value wins", line_no, id));
        }
        table.set(id, *level);
    }
    return table;
}

void LabelSet::set(std::string id, bool relevant, std::optional<RiskLevel> risk) {
    entries_[std::move(id)] = Entry{relevant, risk};
}

std::optional<bool> LabelSet::relevant(std::string_view id) const {
    auto it = entries_.find(id);
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return it->second.relevant;
}

std::optional<RiskLevel> LabelSet::risk(std::string_view id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? std::nullopt : it->second.risk;
}

std::vector<std::string> LabelSet::relevant_ids() const {
    std::vector<std::string> out;
    for (const auto& [id, e] : entries_) {
        if (e.relevant) {
            out.push_back(id);
        }
    }
    return out;
}

LabelSet load_labels(std::istream& in) {
    if (!in) {
        throw InputError("labels: unreadable stream");
    }
    LabelSet labels;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto f = csv::split(line);
        if (f.size() < 2) {
            throw InputError(fmt::format("labels line {}: expected id,flag", line_no));
        }
        const std::string id(trim(f[0]));
        const auto token = lower(trim(f[1]));
        if (first && (token == "flag" || token == "relevant" || token == "relevance" || token == "label")) {
            first = false;
            continue;
        }
        first = false;
        bool relevant = false;
        if (token == "relevant" || token == "1" || token == "true" || token == "yes") {
            relevant = true;
        } else if (token == "not-relevant" || token == "not_relevant" || token == "0" || token == "false" ||
                   token == "no") {
            relevant = false;
        } else {
            throw InputError(fmt::format("labels line {}: unknown relevance flag '{}'", line_no, trim(f[1])));
        }
        std::optional<RiskLevel> risk;
        if (f.size() > 2 && !trim(f[2]).empty()) {
            risk = parse_risk_level(f[2]);
            if (!risk) {
                throw InputError(fmt::format("labels line {}: unknown risk level '{}'", line_no, trim(f[2])));
            }
        }
        if (labels.relevant(id)) {
            warn(fmt::format("labels line {}: duplicate id '{}', last value wins", line_no, id));
        }
        labels.set(id, relevant, risk);
    }
    return labels;
}

std::vector<std::optional<std::string>> node_countries(std::span<const Transaction> transactions,
                                                       AggregationLevel level, const NodeSet& nodes,
                                                       const RiskTable& risk) {
    std::vector<std::optional<std::string>> out(nodes.size());
    if (level == AggregationLevel::Country) {
        for (NodeIndex i = 0; i < nodes.size(); ++i) {
            out[i] = nodes.id(i);
        }
        return out;
    }
    std::vector<std::map<std::string, std::size_t, std::less<>>> votes(nodes.size());
    for (const auto& t : transactions) {
        const auto [src, dst] = node_ids(t, level);
        if (auto i = nodes.find(src)) {
            ++votes[*i][t.sender_country_bank];
        }
        if (auto j = nodes.find(dst)) {
            ++votes[*j][t.receiver_country_bank];
        }
    }
    for (NodeIndex i = 0; i < nodes.size(); ++i) {
        const std::string* best = nullptr;
        std::size_t best_count = 0;
        for (const auto& [country, count] : votes[i]) {
            // map order visits smaller codes first, so strict comparisons keep them on full ties
            if (!best || count > best_count ||
                (count == best_count && risk.lookup(country) > risk.lookup(*best))) {
                best = &country;
                best_count = count;
            }
        }
        if (best) {
            out[i] = *best;
        }
    }
    return out;
}

std::vector<std::optional<RiskLevel>> node_risk_levels(const std::vector<std::optional<std::string>>& countries,
                                                       const RiskTable& risk) {
    std::vector<std::optional<RiskLevel>> out(countries.size());
    for (std::size_t i = 0; i < countries.size(); ++i) {
        if (countries[i]) {
            out[i] = risk.lookup(*countries[i]);
        }
    }
    return out;
}

}  // namespace rankshift
