#include "rankshift/common.hpp"

#include <algorithm>
#include <iostream>
#include <mutex>
#include <utility>

namespace rankshift {

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::mutex& handler_mutex() {
    static std::mutex m;
    return m;
}

WarningHandler& handler_slot() {
    static WarningHandler h = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
    return h;
}

}  // namespace

bool id_less(std::string_view a, std::string_view b) noexcept {
    if (all_digits(a) && all_digits(b)) {
        auto strip = [](std::string_view s) {
            auto pos = s.find_first_not_of('0');
            return pos == std::string_view::npos ? std::string_view{"0"} : s.substr(pos);
        };
        const auto sa = strip(a);
        const auto sb = strip(b);
        if (sa.size() != sb.size()) {
            return sa.size() < sb.size();
        }
        if (sa != sb) {
            return sa < sb;
        }
        // "007" vs "7": fall through to bytewise so the order stays strict.
    }
    return a < b;
}

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(handler_mutex());
    return std::exchange(handler_slot(), std::move(handler));
}

void warn(std::string_view message) {
    std::lock_guard lock(handler_mutex());
    if (handler_slot()) {
        handler_slot()(message);
    }
}

}  // namespace rankshift
