#include <tpiet/value.hpp>

#include <charconv>
#include <cmath>

namespace tpiet {

ValueType type_of(const Value& value) {
    return static_cast<ValueType>(value.index());
}

std::string_view name_of(ValueType type) {
    switch (type) {
        case ValueType::Null: return "null";
        case ValueType::Number: return "number";
        case ValueType::String: return "string";
        case ValueType::Instant: return "instant";
        case ValueType::Geometry: return "geometry";
    }
    return "?";
}

namespace {

std::string render_number(double v) {
    if (v == 0.0) v = 0.0;
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

std::string render(const Value& value) {
    struct Visitor {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(double v) const { return render_number(v); }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(Instant t) const { return t.to_string(); }
        std::string operator()(const Geometry& g) const { return to_wkt(g); }
    };
    return std::visit(Visitor{}, value);
}

Value infer_scalar(std::string_view cell) {
    if (cell.empty()) return std::string();
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec == std::errc() && ptr == end && std::isfinite(v)) return v;
    return std::string(cell);
}

}  // namespace tpiet

#include <tpiet/error.hpp>

namespace tpiet {

std::string_view symbol_of(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "<>";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

namespace {

template <class T>
bool apply(const T& a, CmpOp op, const T& b) {
    switch (op) {
        case CmpOp::Eq: return a == b;
        case CmpOp::Ne: return !(a == b);
        case CmpOp::Lt: return a < b;
        case CmpOp::Le: return !(b < a);
        case CmpOp::Gt: return b < a;
        case CmpOp::Ge: return !(a < b);
    }
    return false;
}

}  // namespace

bool compare(const Value& lhs, CmpOp op, const Value& rhs) {
    if (lhs.index() != rhs.index()) {
        throw TypeError("cannot compare " + std::string(name_of(type_of(lhs))) + " with " +
                        std::string(name_of(type_of(rhs))));
    }
    if (const auto* a = std::get_if<double>(&lhs)) return apply(*a, op, std::get<double>(rhs));
    if (const auto* a = std::get_if<std::string>(&lhs)) {
        return apply(*a, op, std::get<std::string>(rhs));
    }
    if (const auto* a = std::get_if<Instant>(&lhs)) return apply(*a, op, std::get<Instant>(rhs));
    if (op == CmpOp::Eq || op == CmpOp::Ne) return apply(lhs, op, rhs);
    throw TypeError("values of type " + std::string(name_of(type_of(lhs))) + " are not ordered");
}

}  // namespace tpiet
