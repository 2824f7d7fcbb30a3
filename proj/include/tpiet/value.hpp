#pragma once

#include <tpiet/geometry.hpp>
#include <tpiet/temporal.hpp>

#include <string>
#include <variant>

namespace tpiet {

/// A scalar attribute or result cell.
using Value = std::variant<std::monostate, double, std::string, Instant, Geometry>;

enum class ValueType { Null, Number, String, Instant, Geometry };

ValueType type_of(const Value& value);
std::string_view name_of(ValueType type);

/// Text form used by table and CSV output. Geometries render as WKT.
std::string render(const Value& value);

/// Number when the whole cell parses as a finite real, otherwise a string.
Value infer_scalar(std::string_view cell);

}  // namespace tpiet

namespace tpiet {

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view symbol_of(CmpOp op);

/// Applies the comparison to two values of the same type (numbers, strings or
/// instants). Throws TypeError on mismatched or unordered types.
bool compare(const Value& lhs, CmpOp op, const Value& rhs);

}  // namespace tpiet
