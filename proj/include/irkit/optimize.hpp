#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "irkit/ir.hpp"

namespace irkit {

// ---------------------------------------------------------------------------
// Constant evaluation
// ---------------------------------------------------------------------------

// 32-bit two's-complement evaluation of a binary operation (not Cmp).
// Add/Sub/Mul wrap; Div/Mod truncate toward zero; shifts mask the amount to
// 0..31; Shrs shifts in sign bits. Absent means "do not fold": division by
// zero, INT32_MIN / -1, or a negative shift amount.
std::optional<std::int32_t> eval_binop(NodeKind kind, std::int32_t a, std::int32_t b);

// Signed comparison under a relation; 0 or 1.
std::int32_t eval_relation(Relation relation, std::int32_t a, std::int32_t b);

// ---------------------------------------------------------------------------
// Rewrite rules (each returns whether it changed the graph)
// ---------------------------------------------------------------------------

inline constexpr const char* kRuleFoldConst = "fold-const";
inline constexpr const char* kRuleFoldCond = "fold-cond";
inline constexpr const char* kRuleFoldPhi = "fold-phi";
inline constexpr const char* kRuleReassociate = "reassociate";
inline constexpr const char* kRuleUnreachableBlocks = "unreachable-blocks";
inline constexpr const char* kRuleEmptyBlocks = "empty-blocks";
inline constexpr const char* kRuleDeadNodes = "dead-nodes";

// Replaces a binary/Not/Cmp node whose operands are all Const by a Const
// with the computed value, reusing an equal-valued Const in the StartBlock
// when one exists.
bool fold_constant_op(Graph& graph, NodeId id);

// Replaces a Cond fed by Const 0/1 with a Jmp: the taken successor's edge is
// retargeted to the Jmp as Controlflow, the untaken side loses that
// predecessor (with Phi compaction).
bool fold_cond(Graph& graph, NodeId id);

// Removes the block's predecessor edge at position p, drops each contained
// Phi's operand at p, and closes the position gap on both.
void remove_block_predecessor(Graph& graph, NodeId block, std::int32_t position);

// Removes every block not forward-reachable from the StartBlock, cleaning up
// surviving successors' predecessor edges first. StartBlock and EndBlock are
// never removed. Returns the number of removed blocks.
std::size_t remove_unreachable_blocks(Graph& graph);

// Collapses a block that holds nothing but a Jmp and has a single
// (unconditional) predecessor, splicing its successors onto that
// predecessor. Refuses when a successor carries a Phi whose operands would
// become ambiguous (two predecessor edges into one block).
bool remove_empty_block(Graph& graph, NodeId block);

// Replaces a single-operand Phi by its operand.
bool fold_phi(Graph& graph, NodeId id);

// For an associative binary: (a) move a lone constant from position 0 to 1
// when commutative; (b) collapse Op(Op(y, c1), c2) to Op(y, c1 `op` c2) when
// the inner node has no other users.
bool reassociate(Graph& graph, NodeId id);

// Removes every node that End/EndBlock cannot reach (values last used by
// removed code, unkept dead blocks). Returns the removed count.
std::size_t remove_dead_nodes(Graph& graph);

// Shared with instruction selection: swap the operands of a commutative
// binary whose position-0 operand is Const while position 1 is not.
bool normalize_commutative(Graph& graph, NodeId id);

// ---------------------------------------------------------------------------
// Fixpoint driver
// ---------------------------------------------------------------------------

struct OptConfig {
    // Enabled rule identifiers; empty means "all".
    std::set<std::string> rules;
    std::size_t max_iterations = 100;  // >= 1
    bool verify_each_round = false;    // re-verify after every application
    bool trace_measure = false;        // record the termination measure

    bool enabled(std::string_view rule) const {
        return rules.empty() || rules.count(std::string(rule)) > 0;
    }
};

// Why every rewrite terminates: each application strictly shrinks this
// triple, compared lexicographically. Folding rules remove a non-Const node;
// Cond folding trades Cond for Jmp but deletes edges; pure normalization
// swaps reduce only the third component.
struct RewriteMeasure {
    std::size_t non_const_nodes = 0;
    std::size_t edges = 0;
    std::size_t unnormalized = 0;  // commutative binaries with Const at 0 only

    friend auto operator<=>(const RewriteMeasure&, const RewriteMeasure&) = default;
};

RewriteMeasure rewrite_measure(const Graph& graph);

struct PassReport {
    std::map<std::string, std::size_t> applications;
    std::size_t nodes_before = 0;
    std::size_t nodes_after = 0;
    std::size_t rounds = 0;
    double wall_ms = 0.0;
    bool reached_fixpoint = false;
    std::vector<RewriteMeasure> measure_trace;  // filled when trace_measure
};

// Worklist fixpoint over the local rules, with block/dead-node cleanup
// between drains. Requires a verifier-clean graph; throws Error otherwise.
PassReport optimize(Graph& graph, const OptConfig& config = {});

std::string pass_report_to_text(const PassReport& report);
std::string pass_report_to_json(const PassReport& report);

}  // namespace irkit
