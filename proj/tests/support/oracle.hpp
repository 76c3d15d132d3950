// Independent arithmetic oracles for the test suites. These deliberately use
// a different implementation technique (wide signed integers and explicit
// modular reduction) than the library's 32-bit wrapping code, so the two can
// check each other.

#pragma once

#include <cstdint>
#include <optional>

#include "irkit/ir.hpp"

namespace irkit::testing {

// Two's-complement result of a binary operation, or nullopt where the
// operation has no defined compile-time result (division by zero,
// INT32_MIN / -1, negative shift amounts). `kind` accepts Add..Cmp minus
// Cmp itself.
std::optional<std::int32_t> oracle_binop(NodeKind kind, std::int32_t a, std::int32_t b);

// 1 if the relation holds between a and b, else 0, written as a plain
// comparison switch rather than bit tests.
std::int32_t oracle_relation(Relation rel, std::int32_t a, std::int32_t b);

}  // namespace irkit::testing
