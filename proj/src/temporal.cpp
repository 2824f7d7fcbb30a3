#include <tpiet/temporal.hpp>
#include <tpiet/text.hpp>

#include <tpiet/error.hpp>

#include <cctype>

namespace tpiet {

Instant Instant::previous() const {
    if (is_now() || tick_ <= 0) {
        throw InvariantError("no instant precedes " + to_string());
    }
    return Instant(tick_ - 1);
}

Instant Instant::next() const {
    if (is_now() || tick_ + 1 == kNowTick) {
        throw InvariantError("no finite instant follows " + to_string());
    }
    return Instant(tick_ + 1);
}

std::string Instant::to_string() const {
    return is_now() ? std::string("Now") : std::to_string(tick_);
}

std::ostream& operator<<(std::ostream& os, Instant instant) {
    return os << instant.to_string();
}

Interval::Interval(Instant from, Instant to) : from_(from), to_(to) {
    if (from.is_now()) {
        throw InvariantError("interval cannot start at Now");
    }
    if (from.tick() < 0) {
        throw InvariantError("negative instant " + from.to_string());
    }
    if (to < from) {
        throw InvariantError("interval [" + from.to_string() + "," + to.to_string() +
                             "] ends before it starts");
    }
}

std::string Interval::to_string() const {
    return "[" + from_.to_string() + "," + to_.to_string() + "]";
}

std::ostream& operator<<(std::ostream& os, const Interval& interval) {
    return os << interval.to_string();
}

std::optional<Interval> intersection(const Interval& a, const Interval& b) {
    const Instant lo = std::max(a.from(), b.from());
    const Instant hi = std::min(a.to(), b.to());
    if (hi < lo) {
        return std::nullopt;
    }
    return Interval(lo, hi);
}

Interval hull(const Interval& a, const Interval& b) {
    return Interval(std::min(a.from(), b.from()), std::max(a.to(), b.to()));
}

bool mergeable(const Interval& a, const Interval& b) {
    const Interval& first = a.from() <= b.from() ? a : b;
    const Interval& second = a.from() <= b.from() ? b : a;
    if (first.to().is_now()) {
        return true;
    }
    return second.from().tick() <= first.to().tick() + 1;
}

bool at(const Interval& object, Instant t) {
    return object.from() <= t && t <= object.to();
}

bool starts_before(const Interval& object, Instant t) { return t > object.from(); }

bool finishes_after(const Interval& object, Instant t) { return t < object.to(); }

bool begins_after(const Interval& object, Instant t) { return t < object.from(); }

bool before(const Interval& object, const Interval& window) {
    return object.to() < window.from();
}

bool after(const Interval& object, const Interval& window) {
    return window.to() < object.from();
}

bool during(const Interval& object, const Interval& window) {
    return window.from() <= object.from() && window.to() >= object.to();
}

bool overlaps(const Interval& object, const Interval& window) {
    const Instant f = object.from();
    const Instant t = object.to();
    const Instant t1 = window.from();
    const Instant t2 = window.to();
    return (t1 < f && t2 > f && t2 < t) || (t1 > f && t2 > t && t1 < t);
}

bool covers(const Interval& object, const Interval& window) {
    return window.from() >= object.from() && window.to() <= object.to();
}

bool meets(const Interval& object, const Interval& window) {
    return window.from() == object.to() || window.to() == object.from();
}

namespace {

struct PredicateName {
    TemporalPredicate predicate;
    std::string_view name;
};

constexpr PredicateName kNames[] = {
    {TemporalPredicate::At, "AT"},
    {TemporalPredicate::StartsBefore, "StartsBefore"},
    {TemporalPredicate::FinishesAfter, "FinishesAfter"},
    {TemporalPredicate::BeginsAfter, "BeginsAfter"},
    {TemporalPredicate::Before, "BEFORE"},
    {TemporalPredicate::After, "AFTER"},
    {TemporalPredicate::During, "DURING"},
    {TemporalPredicate::Overlaps, "OVERLAPS"},
    {TemporalPredicate::Covers, "COVERS"},
    {TemporalPredicate::Meets, "MEETS"},
};

}  // namespace

std::optional<TemporalPredicate> temporal_predicate_from_name(std::string_view name) {
    for (const auto& entry : kNames) {
        if (iequals(entry.name, name)) return entry.predicate;
    }
    return std::nullopt;
}

std::string_view name_of(TemporalPredicate predicate) {
    for (const auto& entry : kNames) {
        if (entry.predicate == predicate) return entry.name;
    }
    return "?";
}

bool takes_instant(TemporalPredicate predicate) {
    switch (predicate) {
        case TemporalPredicate::At:
        case TemporalPredicate::StartsBefore:
        case TemporalPredicate::FinishesAfter:
        case TemporalPredicate::BeginsAfter:
            return true;
        default:
            return false;
    }
}

bool evaluate(TemporalPredicate predicate, const Interval& object, const Interval& window) {
    switch (predicate) {
        case TemporalPredicate::At: return at(object, window.from());
        case TemporalPredicate::StartsBefore: return starts_before(object, window.from());
        case TemporalPredicate::FinishesAfter: return finishes_after(object, window.from());
        case TemporalPredicate::BeginsAfter: return begins_after(object, window.from());
        case TemporalPredicate::Before: return before(object, window);
        case TemporalPredicate::After: return after(object, window);
        case TemporalPredicate::During: return during(object, window);
        case TemporalPredicate::Overlaps: return overlaps(object, window);
        case TemporalPredicate::Covers: return covers(object, window);
        case TemporalPredicate::Meets: return meets(object, window);
    }
    return false;
}

std::vector<Interval> interval_union(std::vector<Interval> intervals) {
    std::vector<TemporalRow<int>> rows;
    rows.reserve(intervals.size());
    for (const auto& i : intervals) rows.push_back({0, i});
    std::vector<Interval> out;
    for (auto& row : coalesce(std::move(rows))) out.push_back(row.interval);
    return out;
}

}  // namespace tpiet
