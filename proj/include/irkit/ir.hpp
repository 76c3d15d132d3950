#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace irkit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Kinds
// ---------------------------------------------------------------------------

enum class NodeKind : std::uint8_t {
    // blocks
    Block,
    StartBlock,
    EndBlock,
    // program structure
    Start,
    End,
    Argument,
    Phi,
    Return,
    Sync,
    // control
    Jmp,
    Cond,
    // constants
    Const,
    SymConst,
    // memory
    Load,
    Store,
    // unary
    Not,
    // binary; the enumerators from Add through Cmp must stay contiguous
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Shl,
    Shr,
    Shrs,
    And,
    Or,
    Eor,
    Cmp,
    // target forms
    TargetJmp,
    TargetCond,
    TargetConst,
    TargetSymConst,
    TargetLoad,
    TargetLoadI,
    TargetStore,
    TargetStoreI,
    TargetNot,
    // target binaries; register/immediate pairs, contiguous
    TargetAdd,
    TargetAddI,
    TargetSub,
    TargetSubI,
    TargetMul,
    TargetMulI,
    TargetDiv,
    TargetDivI,
    TargetMod,
    TargetModI,
    TargetShl,
    TargetShlI,
    TargetShr,
    TargetShrI,
    TargetShrs,
    TargetShrsI,
    TargetAnd,
    TargetAndI,
    TargetOr,
    TargetOrI,
    TargetEor,
    TargetEorI,
    TargetCmp,
    TargetCmpI,

    Count_,
};

inline constexpr std::size_t kNodeKindCount = static_cast<std::size_t>(NodeKind::Count_);

enum class EdgeKind : std::uint8_t {
    Dataflow,
    Memory,
    Controlflow,
    True,
    False,
    Keep,

    Count_,
};

inline constexpr std::size_t kEdgeKindCount = static_cast<std::size_t>(EdgeKind::Count_);

// Comparison relations, encoded so that bit 0 = greater, bit 1 = equal,
// bit 2 = less; a relation holds iff the bit of the actual outcome is set.
enum class Relation : std::uint8_t {
    FALSE = 0,
    GREATER = 1,
    EQUAL = 2,
    GREATER_EQUAL = 3,
    LESS = 4,
    NOT_EQUAL = 5,
    LESS_EQUAL = 6,
    TRUE = 7,
};

const char* to_string(NodeKind kind);
const char* to_string(EdgeKind kind);
const char* to_string(Relation relation);

std::optional<NodeKind> node_kind_from_string(std::string_view name);
std::optional<EdgeKind> edge_kind_from_string(std::string_view name);
std::optional<Relation> relation_from_string(std::string_view name);

// Every kind falls in exactly one class.
enum class KindClass : std::uint8_t { Block, Control, Value, MemoryOp };

KindClass classify(NodeKind kind);

constexpr bool is_block_kind(NodeKind k) {
    return k == NodeKind::Block || k == NodeKind::StartBlock || k == NodeKind::EndBlock;
}

constexpr bool is_ir_binary(NodeKind k) {
    return k >= NodeKind::Add && k <= NodeKind::Cmp;
}

constexpr bool is_target_binary(NodeKind k) {
    return k >= NodeKind::TargetAdd && k <= NodeKind::TargetCmpI &&
           (static_cast<int>(k) - static_cast<int>(NodeKind::TargetAdd)) % 2 == 0;
}

constexpr bool is_target_binary_immediate(NodeKind k) {
    return k >= NodeKind::TargetAdd && k <= NodeKind::TargetCmpI &&
           (static_cast<int>(k) - static_cast<int>(NodeKind::TargetAdd)) % 2 == 1;
}

constexpr bool is_target_kind(NodeKind k) {
    return k >= NodeKind::TargetJmp && k < NodeKind::Count_;
}

constexpr bool is_constant_kind(NodeKind k) {
    return k == NodeKind::Const || k == NodeKind::SymConst || k == NodeKind::TargetConst ||
           k == NodeKind::TargetSymConst;
}

// The register-operand target form of an IR kind, when instruction selection
// applies to it (the kinds without one are pure structure: blocks, Start,
// End, Argument, Phi, Return, Sync).
std::optional<NodeKind> target_form(NodeKind kind);

// The immediate-operand target form: TargetOpI for binaries, TargetLoadI /
// TargetStoreI for memory ops.
std::optional<NodeKind> immediate_form(NodeKind kind);

// Inverse of target_form/immediate_form; identity on IR kinds.
NodeKind ir_base(NodeKind kind);

inline bool needs_selection(NodeKind k) { return target_form(k).has_value(); }

// Attribute legality per kind.
constexpr bool kind_carries_value(NodeKind k) {
    return k == NodeKind::Const || k == NodeKind::TargetConst || is_target_binary_immediate(k);
}
constexpr bool kind_carries_symbol(NodeKind k) {
    return k == NodeKind::SymConst || k == NodeKind::TargetSymConst ||
           k == NodeKind::TargetLoadI || k == NodeKind::TargetStoreI;
}
constexpr bool kind_carries_relation(NodeKind k) {
    return k == NodeKind::Cmp || k == NodeKind::TargetCmp || k == NodeKind::TargetCmpI;
}
constexpr bool kind_carries_assoc_comm(NodeKind k) { return is_ir_binary(k); }
constexpr bool kind_carries_volatile(NodeKind k) {
    return k == NodeKind::Load || k == NodeKind::Store || k == NodeKind::TargetLoad ||
           k == NodeKind::TargetLoadI || k == NodeKind::TargetStore || k == NodeKind::TargetStoreI;
}
constexpr bool kind_carries_arg_position(NodeKind k) { return k == NodeKind::Argument; }

// ---------------------------------------------------------------------------
// Nodes and edges
// ---------------------------------------------------------------------------

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr NodeId kNoNode = 0xffffffffu;
inline constexpr EdgeId kNoEdge = 0xffffffffu;

struct NodeAttrs {
    std::optional<std::int32_t> value;
    std::optional<std::string> symbol;
    std::optional<Relation> relation;
    std::optional<bool> volatile_flag;
    std::optional<bool> associative;
    std::optional<bool> commutative;
    std::optional<std::int32_t> arg_position;

    bool operator==(const NodeAttrs&) const = default;
};

struct Node {
    NodeKind kind;
    NodeAttrs attrs;
};

struct Edge {
    NodeId source;  // the dependent node
    NodeId target;  // the node depended upon
    EdgeKind kind;
    std::int32_t position;  // -1 for block containment, operands from 0
};

inline constexpr std::int32_t kContainmentPosition = -1;

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

// Mutable directed multigraph of IR/target nodes with ordered, attributed
// outgoing edges and an eagerly maintained incoming-edge index. Node and
// edge ids are never reused within one Graph lifetime. Edges point against
// the direction of flow: the source depends on the target.
class Graph {
public:
    std::string name = "g";

    // --- construction -------------------------------------------------------

    // Adds a node. Attributes must match the kind: required ones (value,
    // symbol, relation, arg_position) must be given, booleans default to
    // false where the kind carries them, and anything the kind does not
    // carry is rejected.
    NodeId add_node(NodeKind kind, NodeAttrs attrs = {});

    // Adds an edge. Position -1 is block containment (Dataflow, from a
    // non-block to a block, at most one per source); operand positions must
    // be unique among the source's outgoing edges.
    EdgeId add_edge(NodeId source, NodeId target, EdgeKind kind, std::int32_t position);

    // --- removal ------------------------------------------------------------

    void remove_edge(EdgeId id);

    // Removes the node and every incident edge; returns how many edges went.
    std::size_t remove_node(NodeId id);

    // Redirects every incoming edge of `old_node` to `new_node`, preserving
    // kind and position. Returns the number of redirected edges; 0 when the
    // two are the same node.
    std::size_t replace_uses(NodeId old_node, NodeId new_node);

    // --- queries ------------------------------------------------------------

    bool has_node(NodeId id) const noexcept;
    bool has_edge(EdgeId id) const noexcept;

    const Node& node(NodeId id) const;
    const Edge& edge(EdgeId id) const;

    std::size_t node_count() const noexcept { return node_count_; }
    std::size_t edge_count() const noexcept { return edge_count_; }
    std::size_t count_of(NodeKind kind) const noexcept {
        return kind_counts_[static_cast<std::size_t>(kind)];
    }

    // Exclusive upper bound on ids handed out so far.
    NodeId node_id_limit() const noexcept { return static_cast<NodeId>(nodes_.size()); }
    EdgeId edge_id_limit() const noexcept { return static_cast<EdgeId>(edges_.size()); }

    std::vector<NodeId> node_ids() const;
    std::vector<EdgeId> edge_ids() const;

    // Outgoing operand edges (position >= 0) in ascending position order;
    // the containment edge is excluded.
    std::vector<std::pair<EdgeId, NodeId>> operands(NodeId id) const;
    std::size_t operand_count(NodeId id) const;
    std::optional<EdgeId> operand_edge_at(NodeId id, std::int32_t position) const;

    // The block containing a non-block node.
    NodeId block_of(NodeId id) const;
    std::optional<EdgeId> containment_edge(NodeId id) const;

    // Incoming edges as (user, edge) pairs, in unspecified order.
    std::vector<std::pair<NodeId, EdgeId>> users(NodeId id) const;
    std::size_t user_count(NodeId id) const;

    // Nodes whose containment edge points at `block`, sorted by id.
    std::vector<NodeId> nodes_in_block(NodeId block) const;

    // The only node of the given kind; throws if there are zero or several.
    NodeId unique_node(NodeKind kind) const;

    // Everything reachable from the structural anchors — End and EndBlock,
    // plus Start and StartBlock when each is unique — along outgoing edges of
    // any kind, including Keep and containment. The anchors themselves are
    // required by the structural rules, so passes must never drop them.
    // Requires exactly one End and one EndBlock.
    std::unordered_set<NodeId> live_nodes() const;
    std::vector<std::uint8_t> live_mask() const;  // indexed by node id

    // Raw outgoing/incoming edge lists; out edges are sorted by position, the
    // in list is unordered.
    std::span<const EdgeId> out_edges(NodeId id) const;
    std::span<const EdgeId> in_edges(NodeId id) const;

    // --- pass-support mutation ----------------------------------------------
    // These edit structure in place and keep the adjacency indices coherent,
    // but do not re-validate kind/attribute legality; the verifier does.

    void retarget_edge(EdgeId id, NodeId new_target);
    void set_edge_kind(EdgeId id, EdgeKind kind);
    void set_edge_position(EdgeId id, std::int32_t position);
    void set_node_kind(NodeId id, NodeKind kind);
    NodeAttrs& attrs(NodeId id);

    // Two-phase edge removal for the parallel selector: unlink_for_worker
    // may run concurrently for edges with distinct sources (it touches only
    // the edge slot and the source's out list); finish_unlinked then purges
    // target in-lists and counters under exclusive access.
    void unlink_for_worker(EdgeId id);
    void finish_unlinked(std::span<const EdgeId> ids);

    // Kind rewrite without counter upkeep, safe to run concurrently for
    // distinct nodes; call recount_kinds once afterwards.
    void rewrite_kind_for_worker(NodeId id, NodeKind kind);
    void recount_kinds();

private:
    struct NodeSlot {
        Node node;
        std::vector<EdgeId> out;  // sorted by position
        std::vector<EdgeId> in;
        bool alive = false;
    };
    struct EdgeSlot {
        Edge edge;
        // Where this edge sits in its target's in list, so removal is O(1)
        // (the in list is maintained with swap-and-pop).
        std::uint32_t in_index = 0;
        bool alive = false;
    };

    std::vector<NodeSlot> nodes_;
    std::vector<EdgeSlot> edges_;
    std::size_t node_count_ = 0;
    std::size_t edge_count_ = 0;
    std::size_t kind_counts_[kNodeKindCount] = {};

    const NodeSlot& slot(NodeId id) const;
    NodeSlot& slot(NodeId id);
    const EdgeSlot& eslot(EdgeId id) const;
    EdgeSlot& eslot(EdgeId id);
    void insert_out_edge(NodeId source, EdgeId id);
    void resort_out_edges(NodeId source);
    void append_in_edge(NodeId target, EdgeId id);
    void unlink_in_edge(EdgeId id);
};

// Validates that `attrs` is legal for `kind` (shared by add_node and the
// GXL reader); returns a description of the problem or nothing.
std::optional<std::string> check_node_attrs(NodeKind kind, const NodeAttrs& attrs);

}  // namespace irkit
