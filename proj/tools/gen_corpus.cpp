// Regenerates the committed corpus/*.gxl files. Each graph is built
// programmatically, checked against the verifier, and serialized; run with
// the target directory as the only argument (default: corpus).

#include <filesystem>
#include <functional>
#include <iostream>

#include "irkit/gxl.hpp"
#include "irkit/ir.hpp"
#include "irkit/verify.hpp"

using namespace irkit;

namespace {

NodeAttrs value_attr(std::int32_t v) {
    NodeAttrs a;
    a.value = v;
    return a;
}

NodeAttrs symbol_attr(std::string s) {
    NodeAttrs a;
    a.symbol = std::move(s);
    return a;
}

NodeAttrs relation_attr(Relation r) {
    NodeAttrs a;
    a.relation = r;
    return a;
}

NodeAttrs argument_attr(std::int32_t index) {
    NodeAttrs a;
    a.arg_position = index;
    return a;
}

NodeAttrs add_like_attr() {
    NodeAttrs a;
    a.associative = true;
    a.commutative = true;
    return a;
}

// A node placed into a block (adds the containment edge).
NodeId op(Graph& g, NodeKind kind, NodeId block, NodeAttrs attrs = {}) {
    NodeId n = g.add_node(kind, std::move(attrs));
    g.add_edge(n, block, EdgeKind::Dataflow, kContainmentPosition);
    return n;
}

NodeId binary(Graph& g, NodeKind kind, NodeId block, NodeId lhs, NodeId rhs,
              NodeAttrs attrs = {}) {
    NodeId n = op(g, kind, block, std::move(attrs));
    g.add_edge(n, lhs, EdgeKind::Dataflow, 0);
    g.add_edge(n, rhs, EdgeKind::Dataflow, 1);
    return n;
}

struct Skeleton {
    Graph g;
    NodeId start_block, end_block, start, end;
};

Skeleton skeleton(std::string name) {
    Skeleton s;
    s.g.name = std::move(name);
    s.start_block = s.g.add_node(NodeKind::StartBlock);
    s.end_block = s.g.add_node(NodeKind::EndBlock);
    s.start = op(s.g, NodeKind::Start, s.start_block);
    s.end = op(s.g, NodeKind::End, s.end_block);
    return s;
}

NodeId make_return(Graph& g, NodeId block, NodeId memory, NodeId value, NodeId end_block) {
    NodeId ret = op(g, NodeKind::Return, block);
    g.add_edge(ret, memory, EdgeKind::Memory, 0);
    g.add_edge(ret, value, EdgeKind::Dataflow, 1);
    std::int32_t slot = 0;
    for (EdgeId e : g.out_edges(end_block))
        if (g.edge(e).position >= slot) slot = g.edge(e).position + 1;
    g.add_edge(end_block, ret, EdgeKind::Controlflow, slot);
    return ret;
}

// The two-argument minimum-plus-one program: a diamond over Cmp/Cond whose
// join Phi picks the smaller argument.
Graph minplus(bool constant_arguments) {
    auto [g, sb, eb, start, end] = skeleton(constant_arguments ? "minplus_const" : "minplus");
    NodeId c1 = op(g, NodeKind::Const, sb, value_attr(1));
    NodeId a0, a1;
    if (constant_arguments) {
        a0 = op(g, NodeKind::Const, sb, value_attr(0));
        a1 = c1;  // shared with the +1 constant
    } else {
        a0 = op(g, NodeKind::Argument, sb, argument_attr(0));
        a1 = op(g, NodeKind::Argument, sb, argument_attr(1));
    }
    NodeId cmp = binary(g, NodeKind::Cmp, sb, a0, a1, relation_attr(Relation::LESS));
    NodeId cond = op(g, NodeKind::Cond, sb);
    g.add_edge(cond, cmp, EdgeKind::Dataflow, 0);

    NodeId then_block = g.add_node(NodeKind::Block);
    NodeId then_jmp = op(g, NodeKind::Jmp, then_block);
    g.add_edge(then_block, cond, EdgeKind::True, 0);
    NodeId else_block = g.add_node(NodeKind::Block);
    NodeId else_jmp = op(g, NodeKind::Jmp, else_block);
    g.add_edge(else_block, cond, EdgeKind::False, 0);

    NodeId join = g.add_node(NodeKind::Block);
    g.add_edge(join, then_jmp, EdgeKind::Controlflow, 0);
    g.add_edge(join, else_jmp, EdgeKind::Controlflow, 1);
    NodeId phi = op(g, NodeKind::Phi, join);
    g.add_edge(phi, a0, EdgeKind::Dataflow, 0);
    g.add_edge(phi, a1, EdgeKind::Dataflow, 1);
    NodeId add = binary(g, NodeKind::Add, join, phi, c1, add_like_attr());
    make_return(g, join, start, add, eb);
    return std::move(g);
}

// Twenty nested constant additions; the optimizer folds the whole chain.
Graph straightline_fold() {
    auto [g, sb, eb, start, end] = skeleton("straightline_fold");
    NodeId c1 = op(g, NodeKind::Const, sb, value_attr(1));
    NodeId chain = c1;
    for (int i = 0; i < 20; ++i)
        chain = binary(g, NodeKind::Add, sb, chain, c1, add_like_attr());
    make_return(g, sb, start, chain, eb);
    return std::move(g);
}

// (x + 1) + 2 with an opaque x: only reassociation applies.
Graph reassoc() {
    auto [g, sb, eb, start, end] = skeleton("reassoc");
    NodeId x = op(g, NodeKind::Argument, sb, argument_attr(0));
    NodeId c1 = op(g, NodeKind::Const, sb, value_attr(1));
    NodeId c2 = op(g, NodeKind::Const, sb, value_attr(2));
    NodeId inner = binary(g, NodeKind::Add, sb, x, c1, add_like_attr());
    NodeId outer = binary(g, NodeKind::Add, sb, inner, c2, add_like_attr());
    make_return(g, sb, start, outer, eb);
    return std::move(g);
}

// Two independent store chains merged by a Sync, a load over the result,
// and a value diamond behind it.
Graph diamond_memory() {
    auto [g, sb, eb, start, end] = skeleton("diamond_memory");
    NodeId sym_a = op(g, NodeKind::SymConst, sb, symbol_attr("a"));
    NodeId sym_b = op(g, NodeKind::SymConst, sb, symbol_attr("b"));
    NodeId c5 = op(g, NodeKind::Const, sb, value_attr(5));
    NodeId c10 = op(g, NodeKind::Const, sb, value_attr(10));
    NodeId x = op(g, NodeKind::Argument, sb, argument_attr(0));

    NodeId st_a = op(g, NodeKind::Store, sb);
    g.add_edge(st_a, start, EdgeKind::Memory, 0);
    g.add_edge(st_a, sym_a, EdgeKind::Dataflow, 1);
    g.add_edge(st_a, c10, EdgeKind::Dataflow, 2);
    NodeAttrs vol;
    vol.volatile_flag = true;
    NodeId st_b = op(g, NodeKind::Store, sb, std::move(vol));
    g.add_edge(st_b, start, EdgeKind::Memory, 0);
    g.add_edge(st_b, sym_b, EdgeKind::Dataflow, 1);
    g.add_edge(st_b, x, EdgeKind::Dataflow, 2);

    NodeId sync = op(g, NodeKind::Sync, sb);
    g.add_edge(sync, st_a, EdgeKind::Memory, 0);
    g.add_edge(sync, st_b, EdgeKind::Memory, 1);
    NodeId load = op(g, NodeKind::Load, sb);
    g.add_edge(load, sync, EdgeKind::Memory, 0);
    g.add_edge(load, sym_a, EdgeKind::Dataflow, 1);

    NodeId cmp = binary(g, NodeKind::Cmp, sb, x, load, relation_attr(Relation::LESS));
    NodeId cond = op(g, NodeKind::Cond, sb);
    g.add_edge(cond, cmp, EdgeKind::Dataflow, 0);

    NodeId then_block = g.add_node(NodeKind::Block);
    NodeId then_jmp = op(g, NodeKind::Jmp, then_block);
    g.add_edge(then_block, cond, EdgeKind::True, 0);
    NodeId else_block = g.add_node(NodeKind::Block);
    NodeId else_jmp = op(g, NodeKind::Jmp, else_block);
    g.add_edge(else_block, cond, EdgeKind::False, 0);

    NodeId join = g.add_node(NodeKind::Block);
    g.add_edge(join, then_jmp, EdgeKind::Controlflow, 0);
    g.add_edge(join, else_jmp, EdgeKind::Controlflow, 1);
    NodeId phi = op(g, NodeKind::Phi, join);
    g.add_edge(phi, c10, EdgeKind::Dataflow, 0);
    g.add_edge(phi, c5, EdgeKind::Dataflow, 1);
    make_return(g, join, sync, phi, eb);
    return std::move(g);
}

// for (i = 0; i < 3; i++); return i — a Phi-carried counted loop.
Graph loop_counted() {
    auto [g, sb, eb, start, end] = skeleton("loop_counted");
    NodeId c0 = op(g, NodeKind::Const, sb, value_attr(0));
    NodeId c1 = op(g, NodeKind::Const, sb, value_attr(1));
    NodeId c3 = op(g, NodeKind::Const, sb, value_attr(3));
    NodeId entry_jmp = op(g, NodeKind::Jmp, sb);

    NodeId header = g.add_node(NodeKind::Block);
    NodeId body = g.add_node(NodeKind::Block);
    NodeId exit = g.add_node(NodeKind::Block);

    NodeId phi = op(g, NodeKind::Phi, header);
    NodeId cmp = binary(g, NodeKind::Cmp, header, phi, c3, relation_attr(Relation::LESS));
    NodeId cond = op(g, NodeKind::Cond, header);
    g.add_edge(cond, cmp, EdgeKind::Dataflow, 0);

    NodeId inc = binary(g, NodeKind::Add, body, phi, c1, add_like_attr());
    NodeId back_jmp = op(g, NodeKind::Jmp, body);

    g.add_edge(header, entry_jmp, EdgeKind::Controlflow, 0);
    g.add_edge(header, back_jmp, EdgeKind::Controlflow, 1);
    g.add_edge(phi, c0, EdgeKind::Dataflow, 0);
    g.add_edge(phi, inc, EdgeKind::Dataflow, 1);
    g.add_edge(body, cond, EdgeKind::True, 0);
    g.add_edge(exit, cond, EdgeKind::False, 0);
    make_return(g, exit, start, phi, eb);
    return std::move(g);
}

// A self-looping block with no Return, pinned by a Keep edge from End.
Graph loop_forever() {
    auto [g, sb, eb, start, end] = skeleton("loop_forever");
    NodeId entry_jmp = op(g, NodeKind::Jmp, sb);
    NodeId loop = g.add_node(NodeKind::Block);
    NodeId loop_jmp = op(g, NodeKind::Jmp, loop);
    g.add_edge(loop, entry_jmp, EdgeKind::Controlflow, 0);
    g.add_edge(loop, loop_jmp, EdgeKind::Controlflow, 1);
    g.add_edge(end, loop, EdgeKind::Keep, 0);
    return std::move(g);
}

// Shift/divide corner cases: foldable shifts next to division by zero,
// INT32_MIN / -1, and a negative shift amount, which must all survive.
Graph shifty() {
    auto [g, sb, eb, start, end] = skeleton("shifty");
    NodeId cm8 = op(g, NodeKind::Const, sb, value_attr(-8));
    NodeId c1 = op(g, NodeKind::Const, sb, value_attr(1));
    NodeId c3 = op(g, NodeKind::Const, sb, value_attr(3));
    NodeId c33 = op(g, NodeKind::Const, sb, value_attr(33));
    NodeId c0 = op(g, NodeKind::Const, sb, value_attr(0));
    NodeId cm1 = op(g, NodeKind::Const, sb, value_attr(-1));
    NodeId cmin = op(g, NodeKind::Const, sb, value_attr(INT32_MIN));

    NodeId s1 = binary(g, NodeKind::Shrs, sb, cm8, c1);
    NodeId s2 = binary(g, NodeKind::Shl, sb, c1, c33);
    NodeId s3 = binary(g, NodeKind::Shr, sb, cm8, c1);
    NodeId m1 = binary(g, NodeKind::Mod, sb, cm8, c3);
    NodeId d1 = binary(g, NodeKind::Div, sb, c1, c0);     // traps at run time
    NodeId d2 = binary(g, NodeKind::Div, sb, cmin, cm1);  // overflow, unfoldable
    NodeId sneg = binary(g, NodeKind::Shl, sb, c1, cm1);  // negative amount

    NodeId acc = binary(g, NodeKind::Add, sb, s1, s2, add_like_attr());
    for (NodeId v : {s3, m1, d1, d2, sneg})
        acc = binary(g, NodeKind::Add, sb, acc, v, add_like_attr());
    make_return(g, sb, start, acc, eb);
    return std::move(g);
}

// A long jump cascade with a constant-folding chain, around two thousand
// nodes, exercising the cleanup passes at scale.
Graph big_chain() {
    auto [g, sb, eb, start, end] = skeleton("big_chain");
    NodeId c1 = op(g, NodeKind::Const, sb, value_attr(1));
    NodeId chain = c1;
    for (int i = 0; i < 1500; ++i)
        chain = binary(g, NodeKind::Add, sb, chain, c1, add_like_attr());
    NodeId prev_jmp = op(g, NodeKind::Jmp, sb);
    for (int i = 0; i < 150; ++i) {
        NodeId b = g.add_node(NodeKind::Block);
        g.add_edge(b, prev_jmp, EdgeKind::Controlflow, 0);
        prev_jmp = op(g, NodeKind::Jmp, b);
    }
    NodeId last = g.add_node(NodeKind::Block);
    g.add_edge(last, prev_jmp, EdgeKind::Controlflow, 0);
    make_return(g, last, start, chain, eb);
    return std::move(g);
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path dir = argc > 1 ? argv[1] : "corpus";
    std::filesystem::create_directories(dir);

    const std::pair<const char*, std::function<Graph()>> builders[] = {
        {"minplus", [] { return minplus(false); }},
        {"minplus_const", [] { return minplus(true); }},
        {"straightline_fold", straightline_fold},
        {"reassoc", reassoc},
        {"diamond_memory", diamond_memory},
        {"loop_counted", loop_counted},
        {"loop_forever", loop_forever},
        {"shifty", shifty},
        {"big_chain", big_chain},
    };

    for (const auto& [name, build] : builders) {
        Graph g = build();
        auto diags = verify(g);
        if (has_errors(diags)) {
            std::cerr << name << " fails verification:\n" << diagnostics_to_text(diags);
            return 1;
        }
        auto path = dir / (std::string(name) + ".gxl");
        write_gxl_file(g, path.string());
        std::cout << path.string() << ": " << g.node_count() << " nodes, " << g.edge_count()
                  << " edges\n";
    }
    return 0;
}
