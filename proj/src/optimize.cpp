#include "irkit/optimize.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <deque>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "irkit/verify.hpp"
#include "json.hpp"

namespace irkit {

// ---------------------------------------------------------------------------
// Constant evaluation
// ---------------------------------------------------------------------------

std::optional<std::int32_t> eval_binop(NodeKind kind, std::int32_t a, std::int32_t b) {
    const auto ua = static_cast<std::uint32_t>(a);
    const auto ub = static_cast<std::uint32_t>(b);
    switch (kind) {
        case NodeKind::Add: return std::bit_cast<std::int32_t>(ua + ub);
        case NodeKind::Sub: return std::bit_cast<std::int32_t>(ua - ub);
        case NodeKind::Mul: return std::bit_cast<std::int32_t>(ua * ub);
        case NodeKind::Div:
        case NodeKind::Mod:
            if (b == 0) return std::nullopt;
            if (a == INT32_MIN && b == -1) return std::nullopt;
            return kind == NodeKind::Div ? a / b : a % b;
        case NodeKind::Shl:
            if (b < 0) return std::nullopt;
            return std::bit_cast<std::int32_t>(ua << (ub & 31));
        case NodeKind::Shr:
            if (b < 0) return std::nullopt;
            return std::bit_cast<std::int32_t>(ua >> (ub & 31));
        case NodeKind::Shrs:
            if (b < 0) return std::nullopt;
            return a >> (ub & 31);  // arithmetic shift for signed operands
        case NodeKind::And: return a & b;
        case NodeKind::Or: return a | b;
        case NodeKind::Eor: return a ^ b;
        default:
            throw Error(std::string("eval_binop: not an evaluable binary kind: ") +
                        to_string(kind));
    }
}

std::int32_t eval_relation(Relation relation, std::int32_t a, std::int32_t b) {
    // Encode the actual outcome as one of the G/E/L bits, then test it
    // against the relation's bit set.
    const unsigned outcome = a > b ? 1u : (a == b ? 2u : 4u);
    return (static_cast<unsigned>(relation) & outcome) != 0 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Shared rewrite context
// ---------------------------------------------------------------------------

namespace {

constexpr bool is_control_edge_kind(EdgeKind k) {
    return k == EdgeKind::Controlflow || k == EdgeKind::True || k == EdgeKind::False;
}

// Carries the StartBlock id, a value->Const cache, and an optional sink for
// nodes a rewrite touched (so the driver can re-visit their neighborhood).
// The standalone rule entry points build a throwaway one.
struct RewriteCtx {
    NodeId start_block = kNoNode;
    bool pool_filled = false;
    std::unordered_map<std::int32_t, NodeId> const_pool;
    std::vector<NodeId>* touched = nullptr;

    void touch(NodeId n) {
        if (touched) touched->push_back(n);
    }
};

NodeId start_block_of(const Graph& g, RewriteCtx& ctx) {
    if (ctx.start_block == kNoNode) ctx.start_block = g.unique_node(NodeKind::StartBlock);
    return ctx.start_block;
}

bool pooled_const_valid(const Graph& g, NodeId id, std::int32_t value, NodeId start_block) {
    if (!g.has_node(id)) return false;
    const Node& n = g.node(id);
    if (n.kind != NodeKind::Const || !n.attrs.value || *n.attrs.value != value) return false;
    auto ce = g.containment_edge(id);
    return ce && g.edge(*ce).target == start_block;
}

// A Const with the given value in the StartBlock, reusing an existing one.
NodeId make_const(Graph& g, RewriteCtx& ctx, std::int32_t value) {
    NodeId sb = start_block_of(g, ctx);
    if (!ctx.pool_filled) {
        ctx.pool_filled = true;
        for (NodeId n : g.nodes_in_block(sb)) {
            const Node& node = g.node(n);
            if (node.kind == NodeKind::Const) ctx.const_pool.emplace(*node.attrs.value, n);
        }
    }
    if (auto it = ctx.const_pool.find(value); it != ctx.const_pool.end()) {
        // The cached node may have been swept as dead since the last round.
        if (pooled_const_valid(g, it->second, value, sb)) return it->second;
        ctx.const_pool.erase(it);
    }
    NodeAttrs attrs;
    attrs.value = value;
    NodeId c = g.add_node(NodeKind::Const, std::move(attrs));
    g.add_edge(c, sb, EdgeKind::Dataflow, kContainmentPosition);
    ctx.const_pool.emplace(value, c);
    return c;
}

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

bool fold_constant_op_impl(Graph& g, NodeId id, RewriteCtx& ctx) {
    const NodeKind kind = g.node(id).kind;
    if (!is_ir_binary(kind) && kind != NodeKind::Not) return false;

    auto ops = g.operands(id);
    const std::size_t want = kind == NodeKind::Not ? 1 : 2;
    if (ops.size() != want) return false;
    std::int32_t values[2] = {0, 0};
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const Node& operand = g.node(ops[i].second);
        if (operand.kind != NodeKind::Const) return false;
        values[i] = *operand.attrs.value;
    }

    std::int32_t result;
    if (kind == NodeKind::Not) {
        result = ~values[0];
    } else if (kind == NodeKind::Cmp) {
        result = eval_relation(*g.node(id).attrs.relation, values[0], values[1]);
    } else {
        auto folded = eval_binop(kind, values[0], values[1]);
        if (!folded) return false;
        result = *folded;
    }

    NodeId c = make_const(g, ctx, result);
    g.replace_uses(id, c);
    g.remove_node(id);
    ctx.touch(c);
    for (auto [user, e] : g.users(c)) ctx.touch(user);
    return true;
}

void remove_block_predecessor_impl(Graph& g, NodeId block, std::int32_t position) {
    if (position < 0) throw Error("remove_block_predecessor: position must be >= 0");
    auto pred = g.operand_edge_at(block, position);
    if (!pred)
        throw Error("remove_block_predecessor: block n" + std::to_string(block) +
                    " has no predecessor edge at position " + std::to_string(position));
    g.remove_edge(*pred);

    std::vector<NodeId> phis;
    for (NodeId n : g.nodes_in_block(block))
        if (g.node(n).kind == NodeKind::Phi) phis.push_back(n);
    for (NodeId phi : phis)
        if (auto e = g.operand_edge_at(phi, position)) g.remove_edge(*e);

    // Close the gap; ascending order keeps transient positions unique.
    auto shift_down = [&](NodeId n) {
        std::vector<std::pair<EdgeId, std::int32_t>> moves;
        for (EdgeId e : g.out_edges(n)) {
            std::int32_t p = g.edge(e).position;
            if (p > position) moves.emplace_back(e, p);
        }
        std::sort(moves.begin(), moves.end(),
                  [](const auto& a, const auto& b) { return a.second < b.second; });
        for (auto [e, p] : moves) g.set_edge_position(e, p - 1);
    };
    shift_down(block);
    for (NodeId phi : phis) shift_down(phi);
}

bool fold_cond_impl(Graph& g, NodeId id, RewriteCtx& ctx) {
    if (g.node(id).kind != NodeKind::Cond) return false;
    auto ops = g.operands(id);
    if (ops.size() != 1) return false;
    const Node& operand = g.node(ops.front().second);
    if (operand.kind != NodeKind::Const) return false;
    const std::int32_t value = *operand.attrs.value;
    if (value != 0 && value != 1) return false;  // the verifier warns about these
    auto containment = g.containment_edge(id);
    if (!containment) return false;
    NodeId block = g.edge(*containment).target;

    const EdgeKind taken_kind = value == 1 ? EdgeKind::True : EdgeKind::False;
    EdgeId taken = kNoEdge;
    std::vector<EdgeId> untaken;
    for (auto [user, e] : g.users(id)) {
        EdgeKind k = g.edge(e).kind;
        if (k == taken_kind) {
            if (taken != kNoEdge) return false;  // ambiguous: two taken successors
            taken = e;
        } else if (k == EdgeKind::True || k == EdgeKind::False) {
            untaken.push_back(e);
        } else {
            return false;  // unexpected user of a Cond
        }
    }
    if (taken == kNoEdge) return false;

    NodeId jmp = g.add_node(NodeKind::Jmp);
    g.add_edge(jmp, block, EdgeKind::Dataflow, kContainmentPosition);
    g.set_edge_kind(taken, EdgeKind::Controlflow);
    g.retarget_edge(taken, jmp);

    for (EdgeId e : untaken) {
        if (!g.has_edge(e)) continue;  // a prior removal may have consumed it
        NodeId losing_block = g.edge(e).source;
        remove_block_predecessor_impl(g, losing_block, g.edge(e).position);
        if (g.has_node(losing_block))
            for (NodeId n : g.nodes_in_block(losing_block))
                if (g.node(n).kind == NodeKind::Phi) ctx.touch(n);
    }
    g.remove_node(id);
    return true;
}

bool fold_phi_impl(Graph& g, NodeId id, RewriteCtx& ctx) {
    if (g.node(id).kind != NodeKind::Phi) return false;
    auto ops = g.operands(id);
    if (ops.size() != 1) return false;
    NodeId input = ops.front().second;
    if (input == id) return false;  // degenerate self-reference
    g.replace_uses(id, input);
    g.remove_node(id);
    ctx.touch(input);
    for (auto [user, e] : g.users(input)) ctx.touch(user);
    return true;
}

bool normalize_commutative_impl(Graph& g, NodeId id) {
    if (!is_ir_binary(g.node(id).kind)) return false;
    const NodeAttrs& attrs = g.node(id).attrs;
    if (!attrs.commutative.value_or(false)) return false;
    auto ops = g.operands(id);
    if (ops.size() != 2) return false;
    if (g.node(ops[0].second).kind != NodeKind::Const) return false;
    if (g.node(ops[1].second).kind == NodeKind::Const) return false;
    // Transiently both sit at position 1; uniqueness is restored immediately.
    g.set_edge_position(ops[0].first, 1);
    g.set_edge_position(ops[1].first, 0);
    return true;
}

bool reassociate_impl(Graph& g, NodeId id, RewriteCtx& ctx) {
    const NodeKind kind = g.node(id).kind;
    if (!is_ir_binary(kind)) return false;
    if (!g.node(id).attrs.associative.value_or(false)) return false;

    if (normalize_commutative_impl(g, id)) {
        ctx.touch(id);
        for (auto [user, e] : g.users(id)) ctx.touch(user);
        return true;
    }

    // Op(Op(y, c1), c2) -> Op(y, c1 op c2), legal when the inner result has
    // no other consumer.
    if (kind == NodeKind::Cmp) return false;
    auto ops = g.operands(id);
    if (ops.size() != 2) return false;
    NodeId inner = ops[0].second;
    NodeId outer_const = ops[1].second;
    if (inner == id || g.node(outer_const).kind != NodeKind::Const) return false;
    if (g.node(inner).kind != kind) return false;
    if (!g.node(inner).attrs.associative.value_or(false)) return false;
    if (g.user_count(inner) != 1) return false;
    auto inner_ops = g.operands(inner);
    if (inner_ops.size() != 2) return false;
    if (g.node(inner_ops[1].second).kind != NodeKind::Const) return false;

    const std::int32_t c1 = *g.node(inner_ops[1].second).attrs.value;
    const std::int32_t c2 = *g.node(outer_const).attrs.value;
    auto folded = eval_binop(kind, c1, c2);
    if (!folded) return false;

    NodeId y = inner_ops[0].second;
    g.retarget_edge(ops[0].first, y);
    g.retarget_edge(ops[1].first, make_const(g, ctx, *folded));
    g.remove_node(inner);
    ctx.touch(id);
    ctx.touch(y);
    for (auto [user, e] : g.users(id)) ctx.touch(user);
    return true;
}

std::size_t remove_unreachable_blocks_impl(Graph& g) {
    // Executability needs an anchor; on graphs without a unique StartBlock
    // nothing is provably unreachable.
    if (g.count_of(NodeKind::StartBlock) != 1) return 0;
    std::size_t total = 0;

    for (;;) {
        const NodeId start_block = g.unique_node(NodeKind::StartBlock);

        // succ[P] = blocks with a predecessor edge into a control node of P.
        std::unordered_map<NodeId, std::vector<NodeId>> succ;
        std::vector<NodeId> blocks;
        for (NodeId b : g.node_ids()) {
            if (!is_block_kind(g.node(b).kind)) continue;
            blocks.push_back(b);
            for (EdgeId e : g.out_edges(b)) {
                const Edge& edge = g.edge(e);
                if (edge.position < 0 || !is_control_edge_kind(edge.kind)) continue;
                if (auto ce = g.containment_edge(edge.target))
                    succ[g.edge(*ce).target].push_back(b);
            }
        }

        std::unordered_set<NodeId> executable{start_block};
        std::deque<NodeId> queue{start_block};
        while (!queue.empty()) {
            NodeId p = queue.front();
            queue.pop_front();
            auto it = succ.find(p);
            if (it == succ.end()) continue;
            for (NodeId s : it->second)
                if (executable.insert(s).second) queue.push_back(s);
        }

        std::unordered_set<NodeId> dead;
        for (NodeId b : blocks) {
            NodeKind k = g.node(b).kind;
            if (k != NodeKind::Block) continue;  // Start/EndBlock always stay
            if (!executable.count(b)) dead.insert(b);
        }
        if (dead.empty()) return total;

        std::vector<NodeId> ordered(dead.begin(), dead.end());
        std::sort(ordered.begin(), ordered.end());
        for (NodeId d : ordered) {
            std::vector<NodeId> contents = g.nodes_in_block(d);
            // Surviving successors lose their predecessor edge into this
            // block first, so their Phis compact correctly.
            for (NodeId x : contents) {
                auto uses = g.users(x);
                for (auto [s, e] : uses) {
                    if (!g.has_edge(e) || !is_control_edge_kind(g.edge(e).kind)) continue;
                    if (dead.count(s) || !is_block_kind(g.node(s).kind)) continue;
                    remove_block_predecessor_impl(g, s, g.edge(e).position);
                }
            }
            for (NodeId x : contents) g.remove_node(x);
            g.remove_node(d);
            ++total;
        }
    }
}

bool remove_empty_block_impl(Graph& g, NodeId block) {
    if (g.node(block).kind != NodeKind::Block) return false;
    std::vector<NodeId> contents = g.nodes_in_block(block);
    if (contents.size() != 1) return false;
    NodeId jmp = contents.front();
    if (g.node(jmp).kind != NodeKind::Jmp) return false;

    std::vector<EdgeId> preds;
    for (EdgeId e : g.out_edges(block))
        if (g.edge(e).position >= 0) preds.push_back(e);
    if (preds.size() != 1) return false;
    // Splicing a True/False predecessor onto successors would attach plain
    // control flow to a Cond; only unconditional entries collapse.
    if (g.edge(preds.front()).kind != EdgeKind::Controlflow) return false;
    NodeId hoist_target = g.edge(preds.front()).target;
    auto hoist_containment = g.containment_edge(hoist_target);
    if (!hoist_containment) return false;
    NodeId hoist_block = g.edge(*hoist_containment).target;
    if (hoist_block == block) return false;  // self-loop

    std::vector<EdgeId> succ_edges;
    for (auto [user, e] : g.users(jmp)) {
        if (g.edge(e).kind != EdgeKind::Controlflow || !is_block_kind(g.node(user).kind))
            return false;
        succ_edges.push_back(e);
    }

    // Guard: a successor with a Phi must not end up with two predecessor
    // edges into the hoist block, or the Phi's operands become ambiguous.
    std::unordered_map<NodeId, std::size_t> into_hoist_block;
    std::unordered_set<EdgeId> succ_set(succ_edges.begin(), succ_edges.end());
    for (EdgeId e : succ_edges) ++into_hoist_block[g.edge(e).source];
    for (auto& [s, count] : into_hoist_block) {
        bool has_phi = false;
        for (NodeId n : g.nodes_in_block(s))
            if (g.node(n).kind == NodeKind::Phi) has_phi = true;
        if (!has_phi) continue;
        for (EdgeId e : g.out_edges(s)) {
            const Edge& edge = g.edge(e);
            if (edge.position < 0 || succ_set.count(e) || !is_control_edge_kind(edge.kind))
                continue;
            if (auto ce = g.containment_edge(edge.target))
                if (g.edge(*ce).target == hoist_block) ++count;
        }
        if (count > 1) return false;
    }

    for (EdgeId e : succ_edges) g.retarget_edge(e, hoist_target);
    g.remove_node(jmp);
    g.remove_node(block);
    return true;
}

std::size_t remove_dead_nodes_impl(Graph& g) {
    auto mask = g.live_mask();
    std::vector<NodeId> dead_ops, dead_blocks;
    for (NodeId n : g.node_ids()) {
        if (mask[n]) continue;
        (is_block_kind(g.node(n).kind) ? dead_blocks : dead_ops).push_back(n);
    }
    for (NodeId n : dead_ops) g.remove_node(n);
    for (NodeId n : dead_blocks) g.remove_node(n);
    return dead_ops.size() + dead_blocks.size();
}

}  // namespace

// ---------------------------------------------------------------------------
// Public rule entry points
// ---------------------------------------------------------------------------

bool fold_constant_op(Graph& graph, NodeId id) {
    RewriteCtx ctx;
    return fold_constant_op_impl(graph, id, ctx);
}

bool fold_cond(Graph& graph, NodeId id) {
    RewriteCtx ctx;
    return fold_cond_impl(graph, id, ctx);
}

void remove_block_predecessor(Graph& graph, NodeId block, std::int32_t position) {
    remove_block_predecessor_impl(graph, block, position);
}

std::size_t remove_unreachable_blocks(Graph& graph) {
    return remove_unreachable_blocks_impl(graph);
}

bool remove_empty_block(Graph& graph, NodeId block) {
    return remove_empty_block_impl(graph, block);
}

bool fold_phi(Graph& graph, NodeId id) {
    RewriteCtx ctx;
    return fold_phi_impl(graph, id, ctx);
}

bool reassociate(Graph& graph, NodeId id) {
    RewriteCtx ctx;
    return reassociate_impl(graph, id, ctx);
}

std::size_t remove_dead_nodes(Graph& graph) { return remove_dead_nodes_impl(graph); }

bool normalize_commutative(Graph& graph, NodeId id) {
    return normalize_commutative_impl(graph, id);
}

// ---------------------------------------------------------------------------
// Measure and driver
// ---------------------------------------------------------------------------

RewriteMeasure rewrite_measure(const Graph& graph) {
    RewriteMeasure m;
    m.edges = graph.edge_count();
    for (NodeId n : graph.node_ids()) {
        const Node& node = graph.node(n);
        if (node.kind != NodeKind::Const) ++m.non_const_nodes;
        if (is_ir_binary(node.kind) && node.attrs.commutative.value_or(false)) {
            auto ops = graph.operands(n);
            if (ops.size() == 2 && graph.node(ops[0].second).kind == NodeKind::Const &&
                graph.node(ops[1].second).kind != NodeKind::Const)
                ++m.unnormalized;
        }
    }
    return m;
}

PassReport optimize(Graph& graph, const OptConfig& config) {
    if (config.max_iterations < 1) throw Error("optimize: max_iterations must be >= 1");
    {
        auto diags = verify(graph);
        if (has_errors(diags))
            throw Error("optimize: input graph fails verification:\n" +
                        diagnostics_to_text(diags));
    }

    PassReport report;
    report.nodes_before = graph.node_count();
    const auto t0 = std::chrono::steady_clock::now();

    RewriteCtx ctx;
    std::vector<NodeId> touched;
    ctx.touched = &touched;

    std::deque<NodeId> worklist;
    std::vector<std::uint8_t> queued(graph.node_id_limit(), 0);
    auto push = [&](NodeId n) {
        if (n >= queued.size()) queued.resize(graph.node_id_limit(), 0);
        if (!queued[n]) {
            queued[n] = 1;
            worklist.push_back(n);
        }
    };
    auto seed_all = [&] {
        for (NodeId n : graph.node_ids()) push(n);
    };

    auto check_clean = [&](const char* rule) {
        auto diags = verify(graph);
        if (has_errors(diags))
            throw Error(std::string("optimize: graph fails verification after ") + rule +
                        ":\n" + diagnostics_to_text(diags));
    };
    auto note = [&](const char* rule, std::size_t count) {
        report.applications[rule] += count;
        if (config.trace_measure) report.measure_trace.push_back(rewrite_measure(graph));
        if (config.verify_each_round) check_clean(rule);
    };

    if (config.trace_measure) report.measure_trace.push_back(rewrite_measure(graph));

    auto drain = [&]() -> std::size_t {
        std::size_t changes = 0;
        while (!worklist.empty()) {
            NodeId n = worklist.front();
            worklist.pop_front();
            queued[n] = 0;
            if (!graph.has_node(n)) continue;
            const NodeKind kind = graph.node(n).kind;

            touched.clear();
            const char* rule = nullptr;
            if ((is_ir_binary(kind) || kind == NodeKind::Not) &&
                config.enabled(kRuleFoldConst) && fold_constant_op_impl(graph, n, ctx))
                rule = kRuleFoldConst;
            else if (kind == NodeKind::Cond && config.enabled(kRuleFoldCond) &&
                     fold_cond_impl(graph, n, ctx))
                rule = kRuleFoldCond;
            else if (kind == NodeKind::Phi && config.enabled(kRuleFoldPhi) &&
                     fold_phi_impl(graph, n, ctx))
                rule = kRuleFoldPhi;
            else if (is_ir_binary(kind) && config.enabled(kRuleReassociate) &&
                     reassociate_impl(graph, n, ctx))
                rule = kRuleReassociate;
            if (!rule) continue;

            ++changes;
            note(rule, 1);
            for (NodeId t : touched)
                if (graph.has_node(t)) push(t);
        }
        return changes;
    };

    auto cleanup = [&]() -> std::size_t {
        std::size_t changes = 0;
        if (config.enabled(kRuleUnreachableBlocks)) {
            if (std::size_t removed = remove_unreachable_blocks_impl(graph)) {
                changes += removed;
                note(kRuleUnreachableBlocks, removed);
            }
        }
        if (config.enabled(kRuleEmptyBlocks)) {
            std::size_t removed = 0;
            for (NodeId b : graph.node_ids())
                if (graph.has_node(b) && graph.node(b).kind == NodeKind::Block &&
                    remove_empty_block_impl(graph, b))
                    ++removed;
            if (removed) {
                changes += removed;
                note(kRuleEmptyBlocks, removed);
            }
        }
        if (config.enabled(kRuleDeadNodes)) {
            if (std::size_t removed = remove_dead_nodes_impl(graph)) {
                changes += removed;
                note(kRuleDeadNodes, removed);
            }
        }
        return changes;
    };

    seed_all();
    for (std::size_t round = 0; round < config.max_iterations; ++round) {
        ++report.rounds;
        std::size_t changes = drain() + cleanup();
        if (changes == 0) {
            report.reached_fixpoint = true;
            break;
        }
        seed_all();
    }

    report.nodes_after = graph.node_count();
    report.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return report;
}

std::string pass_report_to_text(const PassReport& report) {
    std::ostringstream os;
    os << "optimize: " << report.nodes_before << " -> " << report.nodes_after << " nodes in "
       << report.rounds << " round(s), " << report.wall_ms << " ms, "
       << (report.reached_fixpoint ? "fixpoint reached" : "iteration cap hit") << '\n';
    for (const auto& [rule, count] : report.applications)
        os << "  " << rule << ": " << count << '\n';
    return os.str();
}

std::string pass_report_to_json(const PassReport& report) {
    nlohmann::json j{{"nodes_before", report.nodes_before},
                     {"nodes_after", report.nodes_after},
                     {"rounds", report.rounds},
                     {"wall_ms", report.wall_ms},
                     {"reached_fixpoint", report.reached_fixpoint},
                     {"applications", report.applications}};
    return j.dump(2);
}

}  // namespace irkit
