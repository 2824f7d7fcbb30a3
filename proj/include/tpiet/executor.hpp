#pragma once

#include <tpiet/ast.hpp>
#include <tpiet/layer_store.hpp>
#include <tpiet/validator.hpp>
#include <tpiet/warehouse.hpp>

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace tpiet {

struct ResultRow {
    std::vector<Value> values;
    /// Present exactly when the relation is temporal.
    std::optional<Interval> interval;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct ResultRelation {
    std::vector<std::string> columns;
    std::vector<ResultRow> rows;
    bool temporal = false;
};

using QueryResult = std::variant<ResultRelation, CubeResult>;

// ---- Temporal join algebra -------------------------------------------------

enum class JoinKind { Before, Meet, Overlap };

struct JoinedRow {
    std::string left;
    std::string right;
    Interval left_interval;
    Interval right_interval;
    /// Shared interval, attached by the overlap kind only.
    std::optional<Interval> common;

    friend bool operator==(const JoinedRow&, const JoinedRow&) = default;
};

/// before: X.TO <= Y.FROM; meet: X.TO = Y.FROM; overlap: the closed
/// intervals share at least one instant.
std::vector<JoinedRow> t_join(const std::vector<TemporalRow<std::string>>& left,
                              const std::vector<TemporalRow<std::string>>& right, JoinKind kind);

struct GtJoinRow {
    std::string left;
    std::string right;
    Interval interval;

    friend auto operator<=>(const GtJoinRow&, const GtJoinRow&) = default;
};

/// Overlap join of the stages of two layers filtered by a non-temporal
/// predicate. One row per qualifying stage pair, not coalesced.
std::vector<GtJoinRow> gt_join(const Layer& left, const Layer& right,
                               const std::function<bool(const Stage&, const Stage&)>& predicate);

// ---- Query evaluation ------------------------------------------------------

/// Evaluates validated queries over a read-only catalog.
class Executor {
public:
    explicit Executor(Catalog catalog) : cat_(catalog) {}

    ResultRelation eval_gis(const ql::GisQuery& query);
    CubeResult eval_cube(const ql::CubeQuery& query);
    QueryResult run(const ql::Query& query);

    /// Human-readable plan: sources and their sizes, join kind, predicate
    /// order, subquery placement.
    std::string explain(const ql::Query& query) const;

    /// Number of IN subqueries evaluated so far.
    std::size_t subquery_evaluations() const { return subquery_evaluations_; }

private:
    friend class GisEvaluation;

    std::set<std::string> in_ids(const ql::InAtom& atom, const Layer& subject);

    Catalog cat_;
    std::size_t subquery_evaluations_ = 0;
};

}  // namespace tpiet
