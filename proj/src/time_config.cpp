#include <tpiet/time_config.hpp>

#include <tpiet/error.hpp>

#include <cctype>
#include <charconv>
#include <chrono>
#include <vector>

namespace tpiet {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

std::optional<long long> parse_int(std::string_view text) {
    if (text.empty()) return std::nullopt;
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

std::optional<int> parse_year(std::string_view text) {
    text = trim(text);
    if (text.size() != 4) return std::nullopt;
    auto v = parse_int(text);
    if (!v) return std::nullopt;
    return static_cast<int>(*v);
}

Instant::Tick TimeConfig::calendar_tick(int year, unsigned month, unsigned day) const {
    using namespace std::chrono;
    const year_month_day date{std::chrono::year{year}, std::chrono::month{month},
                              std::chrono::day{day}};
    if (!date.ok()) {
        throw SyntaxError("invalid calendar date " + std::to_string(month) + "/" +
                          std::to_string(day) + "/" + std::to_string(year));
    }
    Instant::Tick tick = 0;
    if (granularity == Granularity::Year) {
        tick = year - epoch_year;
    } else {
        const year_month_day epoch{std::chrono::year{epoch_year}, std::chrono::month{epoch_month},
                                   std::chrono::day{epoch_day}};
        tick = (sys_days{date} - sys_days{epoch}).count();
    }
    if (tick < 0) {
        throw InvariantError("date " + std::to_string(year) + " precedes the epoch " +
                             epoch_text());
    }
    return tick;
}

Instant::Tick TimeConfig::date_tick(std::string_view text) const {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '/') {
            parts.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    if (parts.size() != 3) throw SyntaxError("malformed date '" + std::string(text) + "'");
    auto a = parse_int(parts[0]);
    auto b = parse_int(parts[1]);
    auto y = parse_int(parts[2]);
    if (!a || !b || !y || *a <= 0 || *b <= 0) {
        throw SyntaxError("malformed date '" + std::string(text) + "'");
    }
    const auto month = date_order == DateOrder::MonthDayYear ? *a : *b;
    const auto day = date_order == DateOrder::MonthDayYear ? *b : *a;
    return calendar_tick(static_cast<int>(*y), static_cast<unsigned>(month),
                         static_cast<unsigned>(day));
}

Instant TimeConfig::parse_instant(std::string_view text) const {
    text = trim(text);
    if (iequals(text, "now")) return Instant::now();
    if (text.find('/') != std::string_view::npos) return Instant(date_tick(text));
    auto v = parse_int(text);
    if (!v || *v < 0) throw SyntaxError("invalid instant '" + std::string(text) + "'");
    return Instant(*v);
}

Interval TimeConfig::year_range(int year) const {
    if (granularity == Granularity::Year) {
        const auto t = calendar_tick(year, 1, 1);
        return Interval(t, t);
    }
    return Interval(calendar_tick(year, 1, 1), calendar_tick(year, 12, 31));
}

void TimeConfig::set_current_to_today() {
    using namespace std::chrono;
    const year_month_day today{floor<days>(system_clock::now())};
    current = calendar_tick(static_cast<int>(today.year()), static_cast<unsigned>(today.month()),
                            static_cast<unsigned>(today.day()));
}

std::string TimeConfig::epoch_text() const {
    const auto a = date_order == DateOrder::MonthDayYear ? epoch_month : epoch_day;
    const auto b = date_order == DateOrder::MonthDayYear ? epoch_day : epoch_month;
    return std::to_string(a) + "/" + std::to_string(b) + "/" + std::to_string(epoch_year);
}

}  // namespace tpiet
