#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankshift/graph.hpp"

namespace rankshift {

/// Calendar day without time-of-day.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    friend auto operator<=>(const Date&, const Date&) = default;
};

/// Parses "YYYY-MM-DD"; anything after the day separated by ' ' or 'T' is ignored.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& d);

enum class PaymentSource { SEPA, SWIFT };

/// One money transfer. Amounts are held in euro cents; inputs with more than
/// two decimals are rounded half away from zero.
struct Transaction {
    Date date;
    std::string transaction_id;
    std::string sender_bic;
    std::string receiver_bic;
    std::string sender_iban;    // may be empty
    std::string receiver_iban;  // may be empty
    std::string sender_country_residence;
    std::string receiver_country_residence;
    std::string sender_country_bank;
    std::string receiver_country_bank;
    std::int64_t amount_cents = 0;
    std::string currency;
    PaymentSource source = PaymentSource::SEPA;

    double amount() const noexcept { return static_cast<double>(amount_cents) / 100.0; }
};

/// Parses a non-negative decimal amount into cents.
std::optional<std::int64_t> parse_amount_cents(std::string_view text);
std::string format_cents(std::int64_t cents);

/// Field roles of the transaction schema, in default column order.
enum class Field : std::size_t {
    Date,
    TransactionId,
    SenderBic,
    ReceiverBic,
    SenderIban,
    ReceiverIban,
    SenderCountryResidence,
    ReceiverCountryResidence,
    SenderCountryBank,
    ReceiverCountryBank,
    Amount,
    Currency,
    Source,
};
inline constexpr std::size_t field_count = 13;

/// Canonical role name ("date", "sender_bic", ...). These are also the
/// default header names and the keys of a schema config file.
std::string_view field_name(Field f);

/// Maps each role to the header name used in the input file.
struct SchemaConfig {
    std::array<std::string, field_count> header_names;
    char delimiter = ',';

    SchemaConfig();
    const std::string& header(Field f) const { return header_names[static_cast<std::size_t>(f)]; }
    /// Applies one key=value setting; key is a role name or "delimiter".
    void set(std::string_view key, std::string_view value);
};

/// Reads key=value lines ('#' comments allowed) into a schema config.
SchemaConfig load_schema_config(std::istream& in);

struct Rejection {
    std::size_t line = 0;  // 1-based line number in the input
    std::string reason;
};

struct ParseResult {
    std::vector<Transaction> transactions;
    std::vector<Rejection> rejections;
    std::size_t data_rows = 0;  // accepted + rejected
};

/// Parses a delimited transaction file. The header must name every mandatory
/// role (IBAN columns are optional). Malformed rows are reported, never
/// dropped silently. Throws InputError on an unreadable stream or a missing
/// mandatory column.
ParseResult parse_transactions(std::istream& in, const SchemaConfig& schema = {});

enum class AggregationLevel { Country, BIC, IBAN };

std::string_view to_string(AggregationLevel level);
AggregationLevel parse_aggregation_level(std::string_view text);

/// Sender / receiver node ids of a transaction at a level. Empty strings mean
/// the row cannot be placed at that level.
std::pair<std::string_view, std::string_view> node_ids(const Transaction& t, AggregationLevel level);

enum class IntervalUnit { Month, Quarter, Year };

struct IntervalSpec {
    IntervalUnit unit = IntervalUnit::Month;

    /// "2022-03", "2022-Q1" or "2022".
    std::string label(const Date& d) const;
    /// Every label from `first` to `last` inclusive, in calendar order.
    std::vector<std::string> labels_between(const Date& first, const Date& last) const;
};

IntervalSpec parse_interval_spec(std::string_view text);

/// Groups transactions into one layer per calendar interval between the first
/// and last date. Edge weights are the summed amounts (accumulated exactly in
/// cents, then stored in euros). Every layer shares the node set of all ids
/// seen anywhere in the input, so inactive nodes are singletons. Zero-amount
/// pairs register their nodes but produce no edge.
std::vector<TemporalLayer> aggregate(std::span<const Transaction> transactions, AggregationLevel level,
                                     const IntervalSpec& intervals = {});

enum class RiskLevel { Low = 0, Medium = 1, High = 2 };

std::string_view to_string(RiskLevel level);
std::optional<RiskLevel> parse_risk_level(std::string_view text);

class RiskTable {
public:
    explicit RiskTable(RiskLevel default_level = RiskLevel::Low) : default_(default_level) {}

    void set(std::string country, RiskLevel level) { levels_[std::move(country)] = level; }
    RiskLevel lookup(std::string_view country) const;
    bool contains(std::string_view country) const { return levels_.find(std::string(country)) != levels_.end(); }
    RiskLevel default_level() const noexcept { return default_; }
    void set_default(RiskLevel level) noexcept { default_ = level; }
    const std::map<std::string, RiskLevel, std::less<>>& entries() const noexcept { return levels_; }

private:
    std::map<std::string, RiskLevel, std::less<>> levels_;
    RiskLevel default_;
};

/// Two-column CSV country,level. A row whose id is "*" sets the default.
/// An optional header row (second column "level" or "risk") is skipped.
/// Duplicates: last one wins, with a warning. Unknown level tokens throw.
RiskTable load_risk_table(std::istream& in, RiskLevel default_level = RiskLevel::Low);

class LabelSet {
public:
    void set(std::string id, bool relevant, std::optional<RiskLevel> risk = std::nullopt);
    /// nullopt when the id was never annotated.
    std::optional<bool> relevant(std::string_view id) const;
    std::optional<RiskLevel> risk(std::string_view id) const;
    std::size_t size() const noexcept { return entries_.size(); }
    std::vector<std::string> relevant_ids() const;

private:
    struct Entry {
        bool relevant = false;
        std::optional<RiskLevel> risk;
    };
    std::map<std::string, Entry, std::less<>> entries_;
};

/// CSV id,flag[,risk]. Flags: relevant/not-relevant, 1/0, true/false, yes/no.
LabelSet load_labels(std::istream& in);

/// Country of every node in `nodes` at a level. Country nodes map to
/// themselves. BIC and IBAN nodes take the bank-country of the rows that
/// mention them, by majority vote; ties go to the higher-risk country, then
/// to the smaller code. Nodes never seen get nullopt.
std::vector<std::optional<std::string>> node_countries(std::span<const Transaction> transactions,
                                                       AggregationLevel level, const NodeSet& nodes,
                                                       const RiskTable& risk);

/// Risk level per node index, resolved through `node_countries`.
std::vector<std::optional<RiskLevel>> node_risk_levels(const std::vector<std::optional<std::string>>& countries,
                                                       const RiskTable& risk);

}  // namespace rankshift
