#include <fstream>
#include <sstream>

#include "irkit/gxl.hpp"

namespace irkit {

namespace {

void append_escaped(std::string& out, std::string_view text) {
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
}

void append_int_attr(std::string& out, const char* name, std::int32_t value) {
    out += "      <attr name=\"";
    out += name;
    out += "\"><int>";
    out += std::to_string(value);
    out += "</int></attr>\n";
}

void append_string_attr(std::string& out, const char* name, std::string_view value) {
    out += "      <attr name=\"";
    out += name;
    out += "\"><string>";
    append_escaped(out, value);
    out += "</string></attr>\n";
}

void append_bool_attr(std::string& out, const char* name, bool value) {
    out += "      <attr name=\"";
    out += name;
    out += "\"><bool>";
    out += value ? "true" : "false";
    out += "</bool></attr>\n";
}

}  // namespace

std::string write_gxl(const Graph& graph) {
    std::string out;
    out.reserve(128 + 96 * graph.node_count() + 128 * graph.edge_count());
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<gxl xmlns:xlink=\"http://www.w3.org/1999/xlink\">\n";
    out += "  <graph id=\"";
    append_escaped(out, graph.name);
    out += "\" edgeids=\"true\" edgemode=\"directed\" hypergraph=\"false\">\n";

    for (NodeId n : graph.node_ids()) {
        const Node& node = graph.node(n);
        out += "    <node id=\"n";
        out += std::to_string(n);
        out += "\">\n      <type xlink:href=\"#";
        out += to_string(node.kind);
        out += "\"/>\n";
        const NodeAttrs& a = node.attrs;
        if (a.value) append_int_attr(out, "value", *a.value);
        if (a.symbol) append_string_attr(out, "symbol", *a.symbol);
        if (a.relation) append_string_attr(out, "relation", to_string(*a.relation));
        // False booleans are the default; omitting them keeps output minimal
        // and round-trip exact.
        if (a.volatile_flag && *a.volatile_flag) append_bool_attr(out, "volatile", true);
        if (a.associative && *a.associative) append_bool_attr(out, "associative", true);
        if (a.commutative && *a.commutative) append_bool_attr(out, "commutative", true);
        if (a.arg_position) append_int_attr(out, "position", *a.arg_position);
        out += "    </node>\n";
    }

    for (EdgeId e : graph.edge_ids()) {
        const Edge& edge = graph.edge(e);
        out += "    <edge id=\"e";
        out += std::to_string(e);
        out += "\" from=\"n";
        out += std::to_string(edge.source);
        out += "\" to=\"n";
        out += std::to_string(edge.target);
        out += "\">\n      <type xlink:href=\"#";
        out += to_string(edge.kind);
        out += "\"/>\n";
        append_int_attr(out, "position", edge.position);
        out += "    </edge>\n";
    }

    out += "  </graph>\n</gxl>\n";
    return out;
}

void write_gxl_file(const Graph& graph, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << write_gxl(graph);
    out.flush();
    if (!out) throw Error("cannot write " + path);
}

}  // namespace irkit
