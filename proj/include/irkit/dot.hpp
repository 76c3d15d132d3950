#pragma once

#include <string>

#include "irkit/ir.hpp"

namespace irkit {

// Renders the graph as Graphviz DOT. With cluster_blocks, each block becomes
// a `cluster_n<id>` subgraph holding its operations and containment edges
// are suppressed; otherwise every node and edge is drawn, containment
// included (labelled with position -1).
std::string write_dot(const Graph& graph, bool cluster_blocks);
void write_dot_file(const Graph& graph, bool cluster_blocks, const std::string& path);

}  // namespace irkit
