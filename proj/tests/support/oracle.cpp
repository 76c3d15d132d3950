#include "support/oracle.hpp"

namespace irkit::testing {

namespace {

constexpr std::int64_t kTwo32 = std::int64_t{1} << 32;

// Reduce an arbitrary 64-bit result to the int32 two's-complement
// representative of its residue mod 2^32.
std::int32_t reduce(std::int64_t wide) {
    std::int64_t r = ((wide % kTwo32) + kTwo32) % kTwo32;
    if (r >= kTwo32 / 2) r -= kTwo32;
    return static_cast<std::int32_t>(r);
}

// The unsigned 32-bit reading of a signed value, as a wide integer.
std::int64_t as_unsigned(std::int32_t v) {
    std::int64_t r = v;
    return r < 0 ? r + kTwo32 : r;
}

// Floor division by a power of two == arithmetic right shift.
std::int64_t floor_div_pow2(std::int64_t a, int s) {
    std::int64_t d = std::int64_t{1} << s;
    std::int64_t q = a / d;
    if (a % d != 0 && a < 0) --q;
    return q;
}

}  // namespace

std::optional<std::int32_t> oracle_binop(NodeKind kind, std::int32_t a, std::int32_t b) {
    const std::int64_t wa = a, wb = b;
    switch (kind) {
        case NodeKind::Add:
            return reduce(wa + wb);
        case NodeKind::Sub:
            return reduce(wa - wb);
        case NodeKind::Mul:
            return reduce(wa * wb);
        case NodeKind::Div:
            if (b == 0 || (a == INT32_MIN && b == -1)) return std::nullopt;
            return static_cast<std::int32_t>(wa / wb);
        case NodeKind::Mod:
            if (b == 0 || (a == INT32_MIN && b == -1)) return std::nullopt;
            return static_cast<std::int32_t>(wa % wb);
        case NodeKind::Shl:
            if (b < 0) return std::nullopt;
            return reduce(wa << (b & 31));
        case NodeKind::Shr:
            if (b < 0) return std::nullopt;
            return reduce(as_unsigned(a) >> (b & 31));
        case NodeKind::Shrs:
            if (b < 0) return std::nullopt;
            return reduce(floor_div_pow2(wa, b & 31));
        case NodeKind::And:
            return reduce(as_unsigned(a) & as_unsigned(b));
        case NodeKind::Or:
            return reduce(as_unsigned(a) | as_unsigned(b));
        case NodeKind::Eor:
            return reduce(as_unsigned(a) ^ as_unsigned(b));
        default:
            return std::nullopt;
    }
}

std::int32_t oracle_relation(Relation rel, std::int32_t a, std::int32_t b) {
    switch (rel) {
        case Relation::FALSE:
            return 0;
        case Relation::GREATER:
            return a > b ? 1 : 0;
        case Relation::EQUAL:
            return a == b ? 1 : 0;
        case Relation::GREATER_EQUAL:
            return a >= b ? 1 : 0;
        case Relation::LESS:
            return a < b ? 1 : 0;
        case Relation::NOT_EQUAL:
            return a != b ? 1 : 0;
        case Relation::LESS_EQUAL:
            return a <= b ? 1 : 0;
        case Relation::TRUE:
            return 1;
    }
    return 0;
}

}  // namespace irkit::testing
