#pragma once

#include <tpiet/temporal.hpp>
#include <tpiet/value.hpp>

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tpiet::ql {

/// Source location of a node. Positions never take part in AST equality, so
/// a printed and re-parsed query compares equal to the original.
struct SourcePos {
    std::size_t line = 0;
    std::size_t column = 0;

    friend constexpr bool operator==(const SourcePos&, const SourcePos&) { return true; }
};

/// Owning pointer with value semantics: copies deeply, compares by pointee.
template <class T>
class Box {
public:
    Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
    Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
    Box(Box&&) noexcept = default;
    Box& operator=(const Box& other) {
        if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
        return *this;
    }
    Box& operator=(Box&&) noexcept = default;

    T& operator*() { return *ptr_; }
    const T& operator*() const { return *ptr_; }
    T* operator->() { return ptr_.get(); }
    const T* operator->() const { return ptr_.get(); }
    const T* get() const { return ptr_.get(); }

    friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

private:
    std::unique_ptr<T> ptr_;
};

/// A time literal as written: integer tick, Now, a slash date, or a
/// four-digit calendar year (which stands for the whole year).
struct TimeLiteral {
    enum class Kind { Tick, Now, Date, Year };
    Kind kind = Kind::Tick;
    std::string text;
    SourcePos pos;

    friend bool operator==(const TimeLiteral&, const TimeLiteral&) = default;
};

struct IntervalLiteral {
    TimeLiteral from;
    TimeLiteral to;
    SourcePos pos;

    friend bool operator==(const IntervalLiteral&, const IntervalLiteral&) = default;
};

using TemporalArg = std::variant<TimeLiteral, IntervalLiteral>;

/// `alias` or `alias.attribute`.
struct AttrRef {
    std::string alias;
    std::optional<std::string> attribute;
    SourcePos pos;

    friend bool operator==(const AttrRef&, const AttrRef&) = default;
};

struct NumberLit {
    double value = 0.0;
    friend bool operator==(const NumberLit&, const NumberLit&) = default;
};

struct StringLit {
    std::string value;
    friend bool operator==(const StringLit&, const StringLit&) = default;
};

enum class Function { Distance, Area };

struct Expr;

struct FuncCall {
    Function function = Function::Distance;
    std::vector<Expr> args;
    SourcePos pos;

    friend bool operator==(const FuncCall&, const FuncCall&);
};

struct Expr {
    std::variant<AttrRef, NumberLit, StringLit, FuncCall> node;

    friend bool operator==(const Expr&, const Expr&) = default;
};

inline bool operator==(const FuncCall& a, const FuncCall& b) {
    return a.function == b.function && a.args == b.args;
}

enum class SpatialPredicate { Intersects, Crosses, Contains, Touches };

struct SpatialAtom {
    SpatialPredicate predicate = SpatialPredicate::Intersects;
    Expr left;
    Expr right;
    SourcePos pos;

    friend bool operator==(const SpatialAtom&, const SpatialAtom&) = default;
};

struct TemporalAtom {
    TemporalPredicate predicate = TemporalPredicate::At;
    std::string alias;
    TemporalArg arg;
    SourcePos pos;

    friend bool operator==(const TemporalAtom&, const TemporalAtom&) = default;
};

struct CompareAtom {
    Expr lhs;
    CmpOp op = CmpOp::Eq;
    Expr rhs;
    SourcePos pos;

    friend bool operator==(const CompareAtom&, const CompareAtom&) = default;
};

struct CubeQuery;

/// `alias[.id] IN (cube subquery)` or `alias[.id] IN ("id", ...)`.
struct InAtom {
    AttrRef subject;
    std::variant<std::vector<std::string>, Box<CubeQuery>> source;
    SourcePos pos;

    friend bool operator==(const InAtom&, const InAtom&);
};

struct BoolAtom {
    bool value = true;
    friend bool operator==(const BoolAtom&, const BoolAtom&) = default;
};

struct Condition;

struct AndNode {
    std::vector<Condition> terms;
    friend bool operator==(const AndNode&, const AndNode&);
};

struct OrNode {
    std::vector<Condition> terms;
    friend bool operator==(const OrNode&, const OrNode&);
};

struct NotNode {
    Box<Condition> inner;
    friend bool operator==(const NotNode&, const NotNode&);
};

struct Condition {
    std::variant<SpatialAtom, TemporalAtom, CompareAtom, InAtom, BoolAtom, AndNode, OrNode, NotNode>
        node;

    friend bool operator==(const Condition&, const Condition&) = default;
};

struct Source {
    std::string layer;
    std::string alias;
    SourcePos pos;

    friend bool operator==(const Source&, const Source&) = default;
};

enum class Modifier { None, Snapshot, Current };

struct GisQuery {
    Modifier modifier = Modifier::None;
    std::vector<AttrRef> projection;
    bool overlap = false;
    std::vector<Source> sources;
    std::optional<Condition> where;
    SourcePos pos;

    friend bool operator==(const GisQuery&, const GisQuery&);
};

/// `[A].[B]...`, optionally followed by `.Members`.
struct MemberPath {
    std::vector<std::string> parts;
    bool members = false;
    SourcePos pos;

    friend bool operator==(const MemberPath&, const MemberPath&) = default;
};

struct FilterSelect {
    MemberPath level;
    MemberPath measure;
    CmpOp op = CmpOp::Gt;
    double threshold = 0.0;

    friend bool operator==(const FilterSelect&, const FilterSelect&) = default;
};

enum class Axis { Rows, Columns };

struct TabularSelect {
    std::vector<MemberPath> items;
    std::optional<Axis> axis;

    friend bool operator==(const TabularSelect&, const TabularSelect&) = default;
};

struct SlicerAtom {
    MemberPath path;
    std::optional<Box<GisQuery>> in;

    friend bool operator==(const SlicerAtom&, const SlicerAtom&);
};

struct CubeQuery {
    std::variant<FilterSelect, TabularSelect> select;
    std::string cube;
    std::vector<SlicerAtom> where;
    std::optional<MemberPath> slice;
    SourcePos pos;

    friend bool operator==(const CubeQuery&, const CubeQuery&) = default;
};

using Query = std::variant<GisQuery, CubeQuery>;

inline bool operator==(const InAtom& a, const InAtom& b) {
    return a.subject == b.subject && a.source == b.source;
}
inline bool operator==(const AndNode& a, const AndNode& b) { return a.terms == b.terms; }
inline bool operator==(const OrNode& a, const OrNode& b) { return a.terms == b.terms; }
inline bool operator==(const NotNode& a, const NotNode& b) { return a.inner == b.inner; }
inline bool operator==(const GisQuery& a, const GisQuery& b) {
    return a.modifier == b.modifier && a.projection == b.projection && a.overlap == b.overlap &&
           a.sources == b.sources && a.where == b.where;
}
inline bool operator==(const SlicerAtom& a, const SlicerAtom& b) {
    return a.path == b.path && a.in == b.in;
}

std::string_view name_of(SpatialPredicate predicate);
std::string_view name_of(Function function);
std::optional<SpatialPredicate> spatial_predicate_from_name(std::string_view name);
std::optional<Function> function_from_name(std::string_view name);

/// Canonical text that parses back to an equal AST.
std::string print(const Query& query);
std::string print(const GisQuery& query);
std::string print(const CubeQuery& query);
std::string print(const Condition& condition);
std::string print(const Expr& expr);

}  // namespace tpiet::ql
