#include "support/rand_graphs.hpp"

#include <random>

#include "support/builders.hpp"

namespace irkit::testing {

namespace {

struct Gen {
    std::mt19937_64 rng;
    Graph* g = nullptr;
    std::size_t budget;

    NodeId start_block = kNoNode, end_block = kNoNode, start = kNoNode;
    std::vector<NodeId> entry_vals;  // visible from every block
    NodeId memory_tail = kNoNode;    // last store, or Start

    explicit Gen(std::uint64_t seed, std::size_t size_budget) : rng(seed), budget(size_budget) {}

    std::size_t pick(std::size_t n) {  // uniform in [0, n)
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    }
    bool chance(double p) { return std::uniform_real_distribution<>(0.0, 1.0)(rng) < p; }
    bool have(std::size_t n) const { return g->node_count() + n <= budget; }

    std::int32_t const_value() {
        static const std::int32_t interesting[] = {0,  1,  2,  3,  5,   8,     31,      32,
                                                   -1, -2, -8, 10, 100, 12345, INT32_MIN, INT32_MAX};
        if (chance(0.75)) return interesting[pick(std::size(interesting))];
        return static_cast<std::int32_t>(rng());
    }

    NodeKind binary_kind() {
        // Weighted toward the foldable, flag-bearing operations.
        static const NodeKind kinds[] = {NodeKind::Add, NodeKind::Add, NodeKind::Add,
                                         NodeKind::Sub, NodeKind::Mul, NodeKind::Div,
                                         NodeKind::Mod, NodeKind::Shl, NodeKind::Shr,
                                         NodeKind::Shrs, NodeKind::And, NodeKind::Or,
                                         NodeKind::Eor, NodeKind::Eor};
        return kinds[pick(std::size(kinds))];
    }

    static NodeAttrs flags_for(NodeKind kind) {
        switch (kind) {
            case NodeKind::Add:
            case NodeKind::Mul:
            case NodeKind::And:
            case NodeKind::Or:
            case NodeKind::Eor:
                return add_like_attr();
            default:
                return {};
        }
    }

    NodeId any_of(const std::vector<NodeId>& pool) { return pool[pick(pool.size())]; }

    NodeId fresh_const() {
        return op(*g, NodeKind::Const, start_block, value_attr(const_value()));
    }

    // A value usable in `local` ∪ entry scope; biased toward constants so
    // folding and immediate selection have material to work on.
    NodeId pick_value(const std::vector<NodeId>& local) {
        if (chance(0.35) && have(1)) return fresh_const();
        if (!local.empty() && chance(0.5)) return any_of(local);
        return any_of(entry_vals);
    }

    // Appends one operation to `block`, drawing operands from `local` and
    // the entry pool; returns the new value.
    NodeId grow(NodeId block, std::vector<NodeId>& local) {
        if (chance(0.1)) {
            NodeId n = op(*g, NodeKind::Not, block);
            g->add_edge(n, pick_value(local), EdgeKind::Dataflow, 0);
            local.push_back(n);
            return n;
        }
        NodeKind kind = binary_kind();
        NodeId n = binary(*g, kind, block, pick_value(local), pick_value(local), flags_for(kind));
        local.push_back(n);
        return n;
    }

    // Combines `vals` into a single value with Add/Eor chains in `block`.
    NodeId combine(NodeId block, const std::vector<NodeId>& vals, std::vector<NodeId>& local) {
        NodeId acc = vals.front();
        for (std::size_t i = 1; i < vals.size(); ++i) {
            NodeKind kind = chance(0.5) ? NodeKind::Add : NodeKind::Eor;
            acc = binary(*g, kind, block, acc, vals[i], flags_for(kind));
        }
        local.push_back(acc);
        return acc;
    }

    // Cond selector: a fresh Cmp over visible values, or a constant 0/1.
    NodeId selector(NodeId block, std::vector<NodeId>& local) {
        if (chance(0.2)) return op(*g, NodeKind::Const, start_block, value_attr(chance(0.5)));
        static const Relation rels[] = {Relation::LESS,      Relation::LESS_EQUAL,
                                        Relation::GREATER,   Relation::GREATER_EQUAL,
                                        Relation::EQUAL,     Relation::NOT_EQUAL};
        NodeId cmp = binary(*g, NodeKind::Cmp, block, pick_value(local), pick_value(local),
                            relation_attr(rels[pick(std::size(rels))]));
        return cmp;
    }

    void entry_pool() {
        for (std::int32_t i = 0; i < 3; ++i)
            if (chance(0.6) && have(2)) entry_vals.push_back(op(*g, NodeKind::Argument,
                                                                start_block, argument_attr(i)));
        std::size_t consts = 1 + pick(3);
        for (std::size_t i = 0; i < consts && have(2); ++i) entry_vals.push_back(fresh_const());
        if (entry_vals.empty()) entry_vals.push_back(fresh_const());

        memory_tail = start;
        if (chance(0.4) && have(4)) {
            static const char* syms[] = {"a", "b"};
            NodeId sym = op(*g, NodeKind::SymConst, start_block, symbol_attr(syms[pick(2)]));
            NodeId st = op(*g, NodeKind::Store, start_block);
            g->add_edge(st, memory_tail, EdgeKind::Memory, 0);
            g->add_edge(st, sym, EdgeKind::Dataflow, 1);
            g->add_edge(st, any_of(entry_vals), EdgeKind::Dataflow, 2);
            memory_tail = st;
            if (chance(0.6) && have(1)) {
                NodeId ld = op(*g, NodeKind::Load, start_block);
                g->add_edge(ld, memory_tail, EdgeKind::Memory, 0);
                g->add_edge(ld, sym, EdgeKind::Dataflow, 1);
                entry_vals.push_back(ld);
            }
        }
    }

    Graph straight() {
        std::vector<NodeId> local;
        while (have(5) && chance(0.85)) grow(start_block, local);
        std::vector<NodeId> parts{local.empty() ? any_of(entry_vals) : local.back()};
        make_return(*g, start_block, memory_tail, combine(start_block, parts, local), end_block);
        return std::move(*g);
    }

    Graph diamond() {
        std::vector<NodeId> entry_local;
        NodeId sel = selector(start_block, entry_local);
        NodeId cond = op(*g, NodeKind::Cond, start_block);
        g->add_edge(cond, sel, EdgeKind::Dataflow, 0);

        NodeId then_block = g->add_node(NodeKind::Block);
        g->add_edge(then_block, cond, EdgeKind::True, 0);
        std::vector<NodeId> then_local;
        if (chance(0.6) && have(5)) grow(then_block, then_local);
        NodeId then_val = then_local.empty() ? any_of(entry_vals) : then_local.back();
        NodeId then_jmp = op(*g, NodeKind::Jmp, then_block);

        NodeId else_block = g->add_node(NodeKind::Block);
        g->add_edge(else_block, cond, EdgeKind::False, 0);
        std::vector<NodeId> else_local;
        if (chance(0.6) && have(5)) grow(else_block, else_local);
        NodeId else_val = else_local.empty() ? any_of(entry_vals) : else_local.back();
        NodeId else_jmp = op(*g, NodeKind::Jmp, else_block);

        NodeId join = g->add_node(NodeKind::Block);
        g->add_edge(join, then_jmp, EdgeKind::Controlflow, 0);
        g->add_edge(join, else_jmp, EdgeKind::Controlflow, 1);
        NodeId phi = op(*g, NodeKind::Phi, join);
        g->add_edge(phi, then_val, EdgeKind::Dataflow, 0);
        g->add_edge(phi, else_val, EdgeKind::Dataflow, 1);

        std::vector<NodeId> join_local{phi};
        while (have(5) && chance(0.4)) grow(join, join_local);
        make_return(*g, join, memory_tail, combine(join, {phi, join_local.back()}, join_local),
                    end_block);
        return std::move(*g);
    }

    Graph loop() {
        NodeId init = op(*g, NodeKind::Const, start_block, value_attr(0));
        NodeId bound = op(*g, NodeKind::Const, start_block,
                          value_attr(static_cast<std::int32_t>(pick(7))));
        NodeId step = op(*g, NodeKind::Const, start_block,
                         value_attr(static_cast<std::int32_t>(1 + pick(3))));
        NodeId entry_jmp = op(*g, NodeKind::Jmp, start_block);

        NodeId header = g->add_node(NodeKind::Block);
        NodeId body = g->add_node(NodeKind::Block);
        NodeId exit = g->add_node(NodeKind::Block);

        NodeId phi_i = op(*g, NodeKind::Phi, header);
        bool with_acc = chance(0.5) && have(6);
        NodeId phi_acc = with_acc ? op(*g, NodeKind::Phi, header) : kNoNode;
        NodeId cmp = binary(*g, NodeKind::Cmp, header, phi_i, bound,
                            relation_attr(Relation::LESS));
        NodeId cond = op(*g, NodeKind::Cond, header);
        g->add_edge(cond, cmp, EdgeKind::Dataflow, 0);

        std::vector<NodeId> body_local{phi_i};
        if (with_acc) body_local.push_back(phi_acc);
        NodeId inc = binary(*g, NodeKind::Add, body, phi_i, step, add_like_attr());
        NodeId next_acc = kNoNode;
        if (with_acc) {
            while (have(7) && chance(0.3)) grow(body, body_local);
            NodeKind kind = chance(0.5) ? NodeKind::Add : NodeKind::Eor;
            next_acc = binary(*g, kind, body, phi_acc, pick_value(body_local), flags_for(kind));
        }
        NodeId back_jmp = op(*g, NodeKind::Jmp, body);

        g->add_edge(header, entry_jmp, EdgeKind::Controlflow, 0);
        g->add_edge(header, back_jmp, EdgeKind::Controlflow, 1);
        g->add_edge(phi_i, init, EdgeKind::Dataflow, 0);
        g->add_edge(phi_i, inc, EdgeKind::Dataflow, 1);
        if (with_acc) {
            g->add_edge(phi_acc, any_of(entry_vals), EdgeKind::Dataflow, 0);
            g->add_edge(phi_acc, next_acc, EdgeKind::Dataflow, 1);
        }
        g->add_edge(body, cond, EdgeKind::True, 0);
        g->add_edge(exit, cond, EdgeKind::False, 0);

        std::vector<NodeId> exit_local;
        std::vector<NodeId> parts{phi_i};
        if (with_acc) parts.push_back(phi_acc);
        make_return(*g, exit, memory_tail, combine(exit, parts, exit_local), end_block);
        return std::move(*g);
    }
};

}  // namespace

Graph random_graph(std::uint64_t seed, std::size_t size_budget) {
    if (size_budget < 22) size_budget = 22;
    Gen gen(seed, size_budget);
    Skeleton s = skeleton("random_" + std::to_string(seed));
    gen.g = &s.g;
    gen.start_block = s.start_block;
    gen.end_block = s.end_block;
    gen.start = s.start;
    // Leave headroom for the largest shape's fixed nodes so the budget is a
    // hard bound on the final size.
    gen.budget = size_budget - 15;
    gen.entry_pool();
    gen.budget = size_budget;
    switch (gen.pick(3)) {
        case 0:
            return gen.straight();
        case 1:
            return gen.diamond();
        default:
            return gen.loop();
    }
}

std::vector<std::vector<std::int32_t>> sample_args(std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<std::vector<std::int32_t>> out;
    out.push_back({0, 1, 2});
    out.push_back({-3, 5, INT32_MAX});
    std::vector<std::int32_t> rnd;
    for (int i = 0; i < 3; ++i) rnd.push_back(static_cast<std::int32_t>(rng()));
    out.push_back(rnd);
    return out;
}

}  // namespace irkit::testing
