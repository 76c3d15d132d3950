#include "irkit/select.hpp"

#include <chrono>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "irkit/optimize.hpp"
#include "irkit/verify.hpp"
#include "json.hpp"

namespace irkit {

namespace {

// Everything a fold rewrite needs, computed up front so the apply step
// touches nothing but the op's own node and out edges (that is what makes
// the parallel phase race-free).
struct FoldPlan {
    NodeId op = kNoNode;
    NodeKind new_kind = NodeKind::Count_;
    EdgeId const_edge = kNoEdge;
    std::optional<std::int32_t> value;
    std::optional<std::string> symbol;
    EdgeId move_edge = kNoEdge;  // Store's value operand, repacked 2 -> 1
};

std::optional<FoldPlan> plan_immediate(Graph& g, NodeId id) {
    const NodeKind kind = g.node(id).kind;
    FoldPlan plan;
    plan.op = id;

    if (is_ir_binary(kind)) {
        normalize_commutative(g, id);  // move a lone constant to position 1
        auto ops = g.operands(id);
        if (ops.size() != 2) return std::nullopt;
        const Node& rhs = g.node(ops[1].second);
        if (rhs.kind != NodeKind::Const) return std::nullopt;
        plan.new_kind = *immediate_form(kind);
        plan.const_edge = ops[1].first;
        plan.value = *rhs.attrs.value;
        return plan;
    }
    if (kind == NodeKind::Load || kind == NodeKind::Store) {
        auto addr = g.operand_edge_at(id, 1);
        if (!addr) return std::nullopt;
        const Node& address = g.node(g.edge(*addr).target);
        if (address.kind != NodeKind::SymConst) return std::nullopt;
        plan.new_kind = *immediate_form(kind);
        plan.const_edge = *addr;
        plan.symbol = *address.attrs.symbol;
        if (kind == NodeKind::Store) {
            auto value_edge = g.operand_edge_at(id, 2);
            if (!value_edge) return std::nullopt;
            plan.move_edge = *value_edge;
        }
        return plan;
    }
    return std::nullopt;
}

void apply_fold_attrs(Graph& g, const FoldPlan& plan) {
    NodeAttrs& attrs = g.attrs(plan.op);
    if (plan.value) attrs.value = plan.value;
    if (plan.symbol) attrs.symbol = plan.symbol;
    // Register-level kinds carry no algebraic flags.
    attrs.associative.reset();
    attrs.commutative.reset();
}

// Runs fn(worker, begin, end) over [0, count) in contiguous chunks.
template <typename F>
void run_chunked(unsigned jobs, std::size_t count, F&& fn) {
    if (count == 0) return;
    if (jobs <= 1 || count == 1) {
        fn(0u, std::size_t{0}, count);
        return;
    }
    const std::size_t chunk = (count + jobs - 1) / jobs;
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < jobs; ++w) {
        std::size_t begin = static_cast<std::size_t>(w) * chunk;
        if (begin >= count) break;
        std::size_t end = std::min(count, begin + chunk);
        threads.emplace_back([&fn, w, begin, end] { fn(w, begin, end); });
    }
    for (auto& t : threads) t.join();
}

}  // namespace

bool can_fold_immediate(const Graph& graph, NodeId id, std::int32_t index) {
    const NodeKind kind = graph.node(id).kind;
    if (is_ir_binary(kind)) {
        auto edge = graph.operand_edge_at(id, index);
        if (!edge) return false;
        const bool operand_is_const =
            graph.node(graph.edge(*edge).target).kind == NodeKind::Const;
        if (index == 1) return operand_is_const;
        if (index != 0 || !operand_is_const) return false;
        if (!graph.node(id).attrs.commutative.value_or(false)) return false;
        auto other = graph.operand_edge_at(id, 1);
        return other && graph.node(graph.edge(*other).target).kind != NodeKind::Const;
    }
    if (kind == NodeKind::Load || kind == NodeKind::Store) {
        if (index != 1) return false;
        auto edge = graph.operand_edge_at(id, 1);
        return edge && graph.node(graph.edge(*edge).target).kind == NodeKind::SymConst;
    }
    return false;
}

bool select_immediate(Graph& graph, NodeId id) {
    auto plan = plan_immediate(graph, id);
    if (!plan) return false;
    graph.set_node_kind(plan->op, plan->new_kind);
    apply_fold_attrs(graph, *plan);
    graph.remove_edge(plan->const_edge);
    if (plan->move_edge != kNoEdge) graph.set_edge_position(plan->move_edge, 1);
    return true;
}

bool select_plain(Graph& graph, NodeId id) {
    auto target = target_form(graph.node(id).kind);
    if (!target) return false;
    graph.set_node_kind(id, *target);
    NodeAttrs& attrs = graph.attrs(id);
    attrs.associative.reset();
    attrs.commutative.reset();
    return true;
}

std::size_t sweep_dead_constants(Graph& graph) {
    std::size_t removed = 0;
    for (NodeId n : graph.node_ids()) {
        const NodeKind kind = graph.node(n).kind;
        if (kind != NodeKind::Const && kind != NodeKind::SymConst) continue;
        if (graph.user_count(n) == 0) {
            graph.remove_node(n);
            ++removed;
        } else {
            select_plain(graph, n);
        }
    }
    return removed;
}

SelectionReport select(Graph& graph, const SelectOptions& options) {
    {
        auto diags = verify(graph);
        if (has_errors(diags))
            throw Error("select: input graph fails verification:\n" +
                        diagnostics_to_text(diags));
    }

    unsigned jobs = 1;
    if (!options.sequential)
        jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());

    SelectionReport report;
    using clock = std::chrono::steady_clock;
    auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };

    // Phase 1: immediate folds. Planning is a read-mostly sweep (plus
    // commutative normalization); applying is embarrassingly parallel.
    auto t0 = clock::now();
    std::vector<FoldPlan> plans;
    for (NodeId n : graph.node_ids()) {
        const NodeKind kind = graph.node(n).kind;
        if (!is_ir_binary(kind) && kind != NodeKind::Load && kind != NodeKind::Store) continue;
        if (auto plan = plan_immediate(graph, n)) plans.push_back(std::move(*plan));
    }
    std::vector<std::vector<EdgeId>> detached(jobs);
    run_chunked(jobs, plans.size(), [&](unsigned w, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const FoldPlan& plan = plans[i];
            graph.rewrite_kind_for_worker(plan.op, plan.new_kind);
            apply_fold_attrs(graph, plan);
            graph.unlink_for_worker(plan.const_edge);
            detached[w].push_back(plan.const_edge);
            if (plan.move_edge != kNoEdge) graph.set_edge_position(plan.move_edge, 1);
        }
    });
    for (const auto& ids : detached) graph.finish_unlinked(ids);
    report.immediates_folded = plans.size();
    for (const FoldPlan& plan : plans) ++report.selected[to_string(ir_base(plan.new_kind))];
    report.phase_ms[0] = ms_since(t0);

    // Phase 2: plain selection of everything starred that is not a constant.
    t0 = clock::now();
    std::vector<std::pair<NodeId, NodeKind>> plain;
    for (NodeId n : graph.node_ids()) {
        const NodeKind kind = graph.node(n).kind;
        if (is_constant_kind(kind)) continue;
        if (auto target = target_form(kind)) plain.emplace_back(n, *target);
    }
    run_chunked(jobs, plain.size(), [&](unsigned, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto [n, target] = plain[i];
            graph.rewrite_kind_for_worker(n, target);
            NodeAttrs& attrs = graph.attrs(n);
            attrs.associative.reset();
            attrs.commutative.reset();
        }
    });
    graph.recount_kinds();
    for (auto [n, target] : plain) ++report.selected[to_string(ir_base(target))];
    report.phase_ms[1] = ms_since(t0);

    // Phase 3: constants — drop the fully absorbed, materialize the rest.
    t0 = clock::now();
    for (NodeId n : graph.node_ids()) {
        const NodeKind kind = graph.node(n).kind;
        if (kind != NodeKind::Const && kind != NodeKind::SymConst) continue;
        if (graph.user_count(n) == 0) {
            graph.remove_node(n);
            ++report.constants_eliminated;
        } else {
            select_plain(graph, n);
            ++report.constants_materialized;
            ++report.selected[to_string(kind)];
        }
    }
    report.phase_ms[2] = ms_since(t0);

    for (const auto& [kind, count] : report.selected) report.total_target_ops += count;
    return report;
}

std::string selection_report_to_text(const SelectionReport& report) {
    std::ostringstream os;
    os << "select: " << report.total_target_ops << " target op(s); immediates folded "
       << report.immediates_folded << ", constants materialized "
       << report.constants_materialized << ", eliminated " << report.constants_eliminated
       << '\n';
    os << "  phases: " << report.phase_ms[0] << " / " << report.phase_ms[1] << " / "
       << report.phase_ms[2] << " ms\n";
    for (const auto& [kind, count] : report.selected)
        os << "  " << kind << ": " << count << '\n';
    return os.str();
}

std::string selection_report_to_json(const SelectionReport& report) {
    nlohmann::json j{{"selected", report.selected},
                     {"immediates_folded", report.immediates_folded},
                     {"constants_materialized", report.constants_materialized},
                     {"constants_eliminated", report.constants_eliminated},
                     {"phase_ms", {report.phase_ms[0], report.phase_ms[1], report.phase_ms[2]}},
                     {"total_target_ops", report.total_target_ops}};
    return j.dump(2);
}

}  // namespace irkit
