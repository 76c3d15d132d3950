#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "irkit/ir.hpp"

namespace irkit {

// ---------------------------------------------------------------------------
// Single-node operations
// ---------------------------------------------------------------------------

// Whether the operand at `index` can be absorbed as an immediate: a Const at
// position 1 of a binary (or at position 0 when commutative and position 1
// is non-constant), or the SymConst address at position 1 of a Load/Store.
bool can_fold_immediate(const Graph& graph, NodeId id, std::int32_t index);

// Rewrites the node to its immediate target form when an operand is
// foldable (normalizing a commutative constant-at-0 first): the constant
// edge is deleted, its value/symbol moves into the node's attributes, and
// remaining operands close up to dense positions.
bool select_immediate(Graph& graph, NodeId id);

// Rewrites a still-unselected IR node to its register target form, keeping
// operands and attributes. Covers surviving constants (Const -> TargetConst).
bool select_plain(Graph& graph, NodeId id);

// Removes every Const/SymConst whose users were all absorbed as immediates
// and converts the survivors to their target forms. Returns the removed
// count.
std::size_t sweep_dead_constants(Graph& graph);

// ---------------------------------------------------------------------------
// Whole-graph selection
// ---------------------------------------------------------------------------

struct SelectOptions {
    bool sequential = false;  // force the single-worker path
    unsigned jobs = 0;        // worker count; 0 = hardware concurrency
};

struct SelectionReport {
    std::map<std::string, std::size_t> selected;  // source IR kind -> count
    std::size_t immediates_folded = 0;
    std::size_t constants_materialized = 0;
    std::size_t constants_eliminated = 0;
    double phase_ms[3] = {0.0, 0.0, 0.0};
    std::size_t total_target_ops = 0;  // = sum of `selected` counts
};

// Covers the graph with target operations in three phases: immediate folds
// (parallel), plain selection of the rest (parallel), then the sequential
// constant sweep. Rewrites happen in place, so node ids survive selection.
// The result has the minimal number of target operations: each fold removes
// a constant use and never blocks another fold, and a constant costs an
// operation only while it keeps a user. Requires a verifier-clean graph.
SelectionReport select(Graph& graph, const SelectOptions& options = {});

std::string selection_report_to_text(const SelectionReport& report);
std::string selection_report_to_json(const SelectionReport& report);

}  // namespace irkit
