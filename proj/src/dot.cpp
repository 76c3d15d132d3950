#include <fstream>
#include <sstream>

#include "irkit/dot.hpp"

namespace irkit {

namespace {

std::string dot_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

std::string node_label(const Node& node) {
    std::string label = to_string(node.kind);
    const NodeAttrs& a = node.attrs;
    if (a.value) label += " " + std::to_string(*a.value);
    if (a.symbol) label += " " + *a.symbol;
    if (a.relation) label += std::string(" ") + to_string(*a.relation);
    if (a.arg_position) label += " #" + std::to_string(*a.arg_position);
    if (a.volatile_flag && *a.volatile_flag) label += " volatile";
    return label;
}

void emit_node(std::string& out, const Graph& g, NodeId n, const char* indent) {
    out += indent;
    out += "n" + std::to_string(n) + " [label=\"" + dot_escape(node_label(g.node(n)));
    if (is_block_kind(g.node(n).kind)) {
        out += "\", shape=box, style=bold];\n";
    } else {
        out += "\"];\n";
    }
}

void emit_edge(std::string& out, const Graph& g, EdgeId e) {
    const Edge& edge = g.edge(e);
    out += "  n" + std::to_string(edge.source) + " -> n" + std::to_string(edge.target) +
           " [label=\"" + to_string(edge.kind) + " " + std::to_string(edge.position) + "\"";
    switch (edge.kind) {
        case EdgeKind::Controlflow:
        case EdgeKind::True:
        case EdgeKind::False: out += ", color=red"; break;
        case EdgeKind::Memory: out += ", color=blue"; break;
        case EdgeKind::Keep: out += ", style=dotted"; break;
        default: break;
    }
    if (edge.position == kContainmentPosition) out += ", style=dashed, color=gray";
    out += "];\n";
}

}  // namespace

std::string write_dot(const Graph& graph, bool cluster_blocks) {
    std::string out = "digraph \"" + dot_escape(graph.name) + "\" {\n";
    out += "  node [shape=ellipse, fontname=\"Helvetica\"];\n";

    if (!cluster_blocks) {
        for (NodeId n : graph.node_ids()) emit_node(out, graph, n, "  ");
        for (EdgeId e : graph.edge_ids()) emit_edge(out, graph, e);
        out += "}\n";
        return out;
    }

    // One cluster per block; the block node itself is drawn inside as a small
    // anchor so its predecessor edges have an endpoint.
    std::vector<NodeId> blocks;
    for (NodeId n : graph.node_ids())
        if (is_block_kind(graph.node(n).kind)) blocks.push_back(n);

    for (NodeId b : blocks) {
        out += "  subgraph cluster_n" + std::to_string(b) + " {\n";
        out += "    label=\"" + dot_escape(node_label(graph.node(b))) + " n" + std::to_string(b) +
               "\";\n";
        out += "    n" + std::to_string(b) + " [shape=point, width=0.1];\n";
        for (NodeId n : graph.nodes_in_block(b)) emit_node(out, graph, n, "    ");
        out += "  }\n";
    }
    // Nodes without a containing block (malformed input) still get drawn.
    for (NodeId n : graph.node_ids()) {
        if (is_block_kind(graph.node(n).kind) || graph.containment_edge(n)) continue;
        emit_node(out, graph, n, "  ");
    }
    for (EdgeId e : graph.edge_ids())
        if (graph.edge(e).position != kContainmentPosition) emit_edge(out, graph, e);
    out += "}\n";
    return out;
}

void write_dot_file(const Graph& graph, bool cluster_blocks, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << write_dot(graph, cluster_blocks);
    out.flush();
    if (!out) throw Error("cannot write " + path);
}

}  // namespace irkit
