#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "irkit/ir.hpp"

namespace irkit {

enum class Severity : std::uint8_t { Error, Warning };

const char* to_string(Severity severity);

// A node or edge implicated in a diagnostic, rendered "n<id>" / "e<id>".
struct Subject {
    bool is_edge = false;
    std::uint32_t id = 0;

    static Subject node(NodeId id) { return {false, id}; }
    static Subject edge(EdgeId id) { return {true, id}; }

    friend auto operator<=>(const Subject&, const Subject&) = default;
    std::string str() const { return (is_edge ? "e" : "n") + std::to_string(id); }
};

struct Diagnostic {
    int rule = 0;  // 1..10, rendered "R<rule>"
    Severity severity = Severity::Error;
    std::vector<Subject> subjects;  // may be empty for cardinality rules
    std::string message;

    std::string rule_id() const { return "R" + std::to_string(rule); }
};

// Checks the structural rules and returns all findings, sorted by rule,
// severity, subjects, message. Read-only; an empty result means the graph
// is well-formed.
//
//  R1  exactly one Start node
//  R2  exactly one End node
//  R3  containment discipline: a Dataflow edge into a block sits at
//      position -1, and every position -1 edge is such a containment edge
//  R4  constants live in the StartBlock
//  R5  Phi operand count matches its block's predecessor count
//  R6  block predecessor positions and Phi operand positions are dense from
//      0, and each Phi mirrors its block's positions exactly
//  R7  exactly one StartBlock and one EndBlock; the EndBlock contains
//      exactly one End
//  R8  every non-block node is contained in exactly one block; blocks are
//      contained in none
//  R9  node attributes match the node kind (required present, foreign absent)
//  R10 operand arity and edge-kind table per node kind, plus edge discipline
//      for Controlflow/True/False/Keep edges; a Cond fed by something other
//      than a comparison or a 0/1 constant is a warning, not an error
std::vector<Diagnostic> verify(const Graph& graph);

bool has_errors(std::span<const Diagnostic> diagnostics);

// One line per diagnostic: `R5 error n12 e3: message`.
std::string diagnostics_to_text(std::span<const Diagnostic> diagnostics);

// JSON array of {rule, severity, subjects, message}.
std::string diagnostics_to_json(std::span<const Diagnostic> diagnostics);

}  // namespace irkit
