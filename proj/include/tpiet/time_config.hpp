#pragma once

#include <tpiet/temporal.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace tpiet {

enum class Granularity { Day, Year };
enum class DateOrder { MonthDayYear, DayMonthYear };

/// Maps calendar notation onto the tick domain. Tick 0 is the epoch date
/// (day granularity) or the epoch year (year granularity).
struct TimeConfig {
    int epoch_year = 1990;
    unsigned epoch_month = 1;
    unsigned epoch_day = 1;
    Granularity granularity = Granularity::Day;
    DateOrder date_order = DateOrder::MonthDayYear;
    /// Current tick, reported as the value of Now.
    Instant::Tick current = 0;

    /// Integer tick, `Now` (any case), or a slash date. Throws SyntaxError.
    Instant parse_instant(std::string_view text) const;

    /// Parses "a/b/yyyy" honoring date_order. Throws SyntaxError on bad dates
    /// and InvariantError for dates before the epoch.
    Instant::Tick date_tick(std::string_view text) const;

    Instant::Tick calendar_tick(int year, unsigned month, unsigned day) const;

    /// First through last tick of a calendar year.
    Interval year_range(int year) const;

    /// Sets `current` from the system clock.
    void set_current_to_today();

    std::string epoch_text() const;
};

/// Recognizes the four-digit year labels used for Time dimension members.
std::optional<int> parse_year(std::string_view text);

}  // namespace tpiet
