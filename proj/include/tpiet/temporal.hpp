#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace tpiet {

/// A point of the discrete valid-time domain: a non-negative tick, or the
/// moving current instant Now, which compares greater than every tick.
class Instant {
public:
    using Tick = std::int64_t;

    constexpr Instant() = default;
    constexpr explicit Instant(Tick tick) : tick_(tick) {}

    static constexpr Instant now() { return Instant(kNowTick); }

    constexpr bool is_now() const { return tick_ == kNowTick; }
    constexpr bool is_finite() const { return tick_ != kNowTick; }

    /// Tick value; only meaningful for finite instants.
    constexpr Tick tick() const { return tick_; }

    /// Materializes Now to `current` and leaves finite instants alone.
    constexpr Tick resolve(Tick current) const { return is_now() ? current : tick_; }

    /// The instant immediately before this one (finite, > 0).
    Instant previous() const;
    /// The instant immediately after this one (finite).
    Instant next() const;

    constexpr auto operator<=>(const Instant&) const = default;

    std::string to_string() const;

private:
    static constexpr Tick kNowTick = std::numeric_limits<Tick>::max();
    Tick tick_ = 0;
};

std::ostream& operator<<(std::ostream& os, Instant instant);

/// Closed valid-time interval [from, to]; `from` is finite, `to` may be Now.
class Interval {
public:
    /// Throws InvariantError unless from is finite, non-negative and from <= to.
    Interval(Instant from, Instant to);
    Interval(Instant::Tick from, Instant::Tick to) : Interval(Instant(from), Instant(to)) {}

    static Interval since(Instant::Tick from) { return Interval(Instant(from), Instant::now()); }

    Instant from() const { return from_; }
    Instant to() const { return to_; }
    bool is_live() const { return to_.is_now(); }

    bool contains(Instant t) const { return from_ <= t && t <= to_; }

    auto operator<=>(const Interval&) const = default;

    std::string to_string() const;

private:
    Instant from_;
    Instant to_;
};

std::ostream& operator<<(std::ostream& os, const Interval& interval);

/// Intersection of two closed intervals, absent when they share no instant.
std::optional<Interval> intersection(const Interval& a, const Interval& b);

/// Smallest interval containing both arguments.
Interval hull(const Interval& a, const Interval& b);

/// True when the intervals overlap or are adjacent (a.to + 1 == b.from or
/// the converse), i.e. their union is again an interval.
bool mergeable(const Interval& a, const Interval& b);

// Object/instant predicates. `object` is the object's validity [FROM, TO].
bool at(const Interval& object, Instant t);
bool starts_before(const Interval& object, Instant t);
bool finishes_after(const Interval& object, Instant t);
bool begins_after(const Interval& object, Instant t);

// Object/window predicates, window = [t1, t2]. Strictness follows the
// published definitions exactly; shared endpoints are classified by meets().
bool before(const Interval& object, const Interval& window);
bool after(const Interval& object, const Interval& window);
bool during(const Interval& object, const Interval& window);
bool overlaps(const Interval& object, const Interval& window);
bool covers(const Interval& object, const Interval& window);
bool meets(const Interval& object, const Interval& window);

enum class TemporalPredicate {
    At,
    StartsBefore,
    FinishesAfter,
    BeginsAfter,
    Before,
    After,
    During,
    Overlaps,
    Covers,
    Meets,
};

inline constexpr TemporalPredicate kAllTemporalPredicates[] = {
    TemporalPredicate::At,     TemporalPredicate::StartsBefore, TemporalPredicate::FinishesAfter,
    TemporalPredicate::BeginsAfter, TemporalPredicate::Before, TemporalPredicate::After,
    TemporalPredicate::During, TemporalPredicate::Overlaps,     TemporalPredicate::Covers,
    TemporalPredicate::Meets,
};

/// Case-insensitive lookup of a predicate by its query-language name.
std::optional<TemporalPredicate> temporal_predicate_from_name(std::string_view name);
std::string_view name_of(TemporalPredicate predicate);

/// True for the predicates whose second argument is an instant.
bool takes_instant(TemporalPredicate predicate);

/// Dispatches an instant predicate (window.from() is the instant) or a
/// window predicate.
bool evaluate(TemporalPredicate predicate, const Interval& object, const Interval& window);

/// A set of non-temporal values stamped with a validity interval.
template <class Key>
struct TemporalRow {
    Key key;
    Interval interval;

    friend bool operator==(const TemporalRow&, const TemporalRow&) = default;
};

/// Merges rows with equal keys whose intervals overlap or are adjacent into
/// maximal intervals. Output is sorted by (key, from).
template <class Key>
std::vector<TemporalRow<Key>> coalesce(std::vector<TemporalRow<Key>> rows) {
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.key < b.key) return true;
        if (b.key < a.key) return false;
        return a.interval < b.interval;
    });
    std::vector<TemporalRow<Key>> out;
    out.reserve(rows.size());
    for (auto& row : rows) {
        if (!out.empty() && out.back().key == row.key &&
            mergeable(out.back().interval, row.interval)) {
            out.back().interval = hull(out.back().interval, row.interval);
        } else {
            out.push_back(std::move(row));
        }
    }
    return out;
}

/// Coalesced union of a set of intervals.
std::vector<Interval> interval_union(std::vector<Interval> intervals);

}  // namespace tpiet
