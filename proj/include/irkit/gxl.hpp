#pragma once

#include <string>
#include <string_view>

#include "irkit/ir.hpp"

namespace irkit {

// Reads a program graph from GXL. Node and edge kinds come from the fragment
// of the <type> href; attributes map by name (value, symbol, relation,
// volatile, associative, commutative; `position` becomes the argument index
// on Argument nodes and the operand position on edges). Errors carry the GXL
// id and source line. Throws Error.
Graph parse_gxl(std::string_view bytes);
Graph parse_gxl_file(const std::string& path);

// Serializes a graph to GXL, deterministically: nodes then edges in id
// order, fixed attribute order, UTF-8. parse_gxl(write_gxl(g)) is
// isomorphic to g.
std::string write_gxl(const Graph& graph);
void write_gxl_file(const Graph& graph, const std::string& path);

}  // namespace irkit
