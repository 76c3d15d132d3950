#include "support/builders.hpp"

namespace irkit::testing {

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

NodeId op(Graph& g, NodeKind kind, NodeId block, NodeAttrs attrs) {
    NodeId n = g.add_node(kind, std::move(attrs));
    g.add_edge(n, block, EdgeKind::Dataflow, kContainmentPosition);
    return n;
}

NodeId binary(Graph& g, NodeKind kind, NodeId block, NodeId lhs, NodeId rhs, NodeAttrs attrs) {
    NodeId n = op(g, kind, block, std::move(attrs));
    g.add_edge(n, lhs, EdgeKind::Dataflow, 0);
    g.add_edge(n, rhs, EdgeKind::Dataflow, 1);
    return n;
}

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

namespace {

Graph minplus_impl(bool constant_arguments) {
    Skeleton s = skeleton(constant_arguments ? "minplus_const" : "minplus");
    Graph& g = s.g;
    NodeId c1 = op(g, NodeKind::Const, s.start_block, value_attr(1));
    NodeId a0, a1;
    if (constant_arguments) {
        a0 = op(g, NodeKind::Const, s.start_block, value_attr(0));
        a1 = c1;
    } else {
        a0 = op(g, NodeKind::Argument, s.start_block, argument_attr(0));
        a1 = op(g, NodeKind::Argument, s.start_block, argument_attr(1));
    }
    NodeId cmp = binary(g, NodeKind::Cmp, s.start_block, a0, a1, relation_attr(Relation::LESS));
    NodeId cond = op(g, NodeKind::Cond, s.start_block);
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
    make_return(g, join, s.start, add, s.end_block);
    return std::move(g);
}

Graph minplus_const_final(bool selected) {
    Skeleton s = skeleton("minplus_const");
    Graph& g = s.g;
    NodeId c1 = op(g, selected ? NodeKind::TargetConst : NodeKind::Const, s.start_block,
                   value_attr(1));
    NodeId jmp = op(g, selected ? NodeKind::TargetJmp : NodeKind::Jmp, s.start_block);
    NodeId join = g.add_node(NodeKind::Block);
    g.add_edge(join, jmp, EdgeKind::Controlflow, 0);
    make_return(g, join, s.start, c1, s.end_block);
    return std::move(g);
}

}  // namespace

Graph minplus() { return minplus_impl(false); }

Graph minplus_const() { return minplus_impl(true); }

Graph minplus_const_optimized() { return minplus_const_final(false); }

Graph minplus_const_selected() { return minplus_const_final(true); }

}  // namespace irkit::testing
