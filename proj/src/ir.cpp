#include "irkit/ir.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <unordered_map>

namespace irkit {

// ---------------------------------------------------------------------------
// Kind tables
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<const char*, kNodeKindCount> kNodeKindNames = {
    "Block",       "StartBlock",  "EndBlock",     "Start",          "End",
    "Argument",    "Phi",         "Return",       "Sync",           "Jmp",
    "Cond",        "Const",       "SymConst",     "Load",           "Store",
    "Not",         "Add",         "Sub",          "Mul",            "Div",
    "Mod",         "Shl",         "Shr",          "Shrs",           "And",
    "Or",          "Eor",         "Cmp",          "TargetJmp",      "TargetCond",
    "TargetConst", "TargetSymConst", "TargetLoad", "TargetLoadI",   "TargetStore",
    "TargetStoreI", "TargetNot",  "TargetAdd",    "TargetAddI",     "TargetSub",
    "TargetSubI",  "TargetMul",   "TargetMulI",   "TargetDiv",      "TargetDivI",
    "TargetMod",   "TargetModI",  "TargetShl",    "TargetShlI",     "TargetShr",
    "TargetShrI",  "TargetShrs",  "TargetShrsI",  "TargetAnd",      "TargetAndI",
    "TargetOr",    "TargetOrI",   "TargetEor",    "TargetEorI",     "TargetCmp",
    "TargetCmpI",
};

constexpr std::array<const char*, kEdgeKindCount> kEdgeKindNames = {
    "Dataflow", "Memory", "Controlflow", "True", "False", "Keep",
};

constexpr std::array<const char*, 8> kRelationNames = {
    "FALSE",         "GREATER",   "EQUAL",      "GREATER_EQUAL",
    "LESS",          "NOT_EQUAL", "LESS_EQUAL", "TRUE",
};

}  // namespace

const char* to_string(NodeKind kind) {
    return kNodeKindNames[static_cast<std::size_t>(kind)];
}

const char* to_string(EdgeKind kind) {
    return kEdgeKindNames[static_cast<std::size_t>(kind)];
}

const char* to_string(Relation relation) {
    return kRelationNames[static_cast<std::size_t>(relation)];
}

std::optional<NodeKind> node_kind_from_string(std::string_view name) {
    static const auto table = [] {
        std::unordered_map<std::string_view, NodeKind> m;
        for (std::size_t i = 0; i < kNodeKindCount; ++i)
            m.emplace(kNodeKindNames[i], static_cast<NodeKind>(i));
        return m;
    }();
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

std::optional<EdgeKind> edge_kind_from_string(std::string_view name) {
    static const auto table = [] {
        std::unordered_map<std::string_view, EdgeKind> m;
        for (std::size_t i = 0; i < kEdgeKindCount; ++i)
            m.emplace(kEdgeKindNames[i], static_cast<EdgeKind>(i));
        return m;
    }();
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

std::optional<Relation> relation_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kRelationNames.size(); ++i)
        if (name == kRelationNames[i]) return static_cast<Relation>(i);
    return std::nullopt;
}

KindClass classify(NodeKind kind) {
    switch (kind) {
        case NodeKind::Block:
        case NodeKind::StartBlock:
        case NodeKind::EndBlock:
            return KindClass::Block;
        case NodeKind::Jmp:
        case NodeKind::Cond:
        case NodeKind::Return:
        case NodeKind::TargetJmp:
        case NodeKind::TargetCond:
            return KindClass::Control;
        case NodeKind::Load:
        case NodeKind::Store:
        case NodeKind::TargetLoad:
        case NodeKind::TargetLoadI:
        case NodeKind::TargetStore:
        case NodeKind::TargetStoreI:
            return KindClass::MemoryOp;
        default:
            return KindClass::Value;
    }
}

std::optional<NodeKind> target_form(NodeKind kind) {
    if (is_ir_binary(kind)) {
        int offset = static_cast<int>(kind) - static_cast<int>(NodeKind::Add);
        return static_cast<NodeKind>(static_cast<int>(NodeKind::TargetAdd) + 2 * offset);
    }
    switch (kind) {
        case NodeKind::Jmp: return NodeKind::TargetJmp;
        case NodeKind::Cond: return NodeKind::TargetCond;
        case NodeKind::Const: return NodeKind::TargetConst;
        case NodeKind::SymConst: return NodeKind::TargetSymConst;
        case NodeKind::Load: return NodeKind::TargetLoad;
        case NodeKind::Store: return NodeKind::TargetStore;
        case NodeKind::Not: return NodeKind::TargetNot;
        default: return std::nullopt;
    }
}

std::optional<NodeKind> immediate_form(NodeKind kind) {
    if (is_ir_binary(kind)) {
        int offset = static_cast<int>(kind) - static_cast<int>(NodeKind::Add);
        return static_cast<NodeKind>(static_cast<int>(NodeKind::TargetAdd) + 2 * offset + 1);
    }
    switch (kind) {
        case NodeKind::Load: return NodeKind::TargetLoadI;
        case NodeKind::Store: return NodeKind::TargetStoreI;
        default: return std::nullopt;
    }
}

NodeKind ir_base(NodeKind kind) {
    if (is_target_binary(kind) || is_target_binary_immediate(kind)) {
        int offset = (static_cast<int>(kind) - static_cast<int>(NodeKind::TargetAdd)) / 2;
        return static_cast<NodeKind>(static_cast<int>(NodeKind::Add) + offset);
    }
    switch (kind) {
        case NodeKind::TargetJmp: return NodeKind::Jmp;
        case NodeKind::TargetCond: return NodeKind::Cond;
        case NodeKind::TargetConst: return NodeKind::Const;
        case NodeKind::TargetSymConst: return NodeKind::SymConst;
        case NodeKind::TargetLoad:
        case NodeKind::TargetLoadI: return NodeKind::Load;
        case NodeKind::TargetStore:
        case NodeKind::TargetStoreI: return NodeKind::Store;
        case NodeKind::TargetNot: return NodeKind::Not;
        default: return kind;
    }
}

std::optional<std::string> check_node_attrs(NodeKind kind, const NodeAttrs& attrs) {
    auto reject = [&](const char* attr) {
        return std::string(to_string(kind)) + " does not carry attribute '" + attr + "'";
    };
    auto require = [&](const char* attr) {
        return std::string(to_string(kind)) + " requires attribute '" + attr + "'";
    };

    if (attrs.value && !kind_carries_value(kind)) return reject("value");
    if (!attrs.value && kind_carries_value(kind)) return require("value");
    if (attrs.symbol && !kind_carries_symbol(kind)) return reject("symbol");
    if (!attrs.symbol && kind_carries_symbol(kind)) return require("symbol");
    if (attrs.relation && !kind_carries_relation(kind)) return reject("relation");
    if (!attrs.relation && kind_carries_relation(kind)) return require("relation");
    if (attrs.volatile_flag && !kind_carries_volatile(kind)) return reject("volatile");
    if (attrs.associative && !kind_carries_assoc_comm(kind)) return reject("associative");
    if (attrs.commutative && !kind_carries_assoc_comm(kind)) return reject("commutative");
    if (attrs.arg_position && !kind_carries_arg_position(kind)) return reject("position");
    if (!attrs.arg_position && kind_carries_arg_position(kind)) return require("position");
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

const Graph::NodeSlot& Graph::slot(NodeId id) const {
    if (id >= nodes_.size() || !nodes_[id].alive)
        throw Error("no such node: n" + std::to_string(id));
    return nodes_[id];
}

Graph::NodeSlot& Graph::slot(NodeId id) {
    return const_cast<NodeSlot&>(static_cast<const Graph*>(this)->slot(id));
}

const Graph::EdgeSlot& Graph::eslot(EdgeId id) const {
    if (id >= edges_.size() || !edges_[id].alive)
        throw Error("no such edge: e" + std::to_string(id));
    return edges_[id];
}

Graph::EdgeSlot& Graph::eslot(EdgeId id) {
    return const_cast<EdgeSlot&>(static_cast<const Graph*>(this)->eslot(id));
}

NodeId Graph::add_node(NodeKind kind, NodeAttrs attrs) {
    if (kind >= NodeKind::Count_) throw Error("invalid node kind");
    // Boolean attributes default to false where the kind carries them, so a
    // stored node always has them resolved.
    if (kind_carries_assoc_comm(kind)) {
        if (!attrs.associative) attrs.associative = false;
        if (!attrs.commutative) attrs.commutative = false;
    }
    if (kind_carries_volatile(kind) && !attrs.volatile_flag) attrs.volatile_flag = false;
    if (auto problem = check_node_attrs(kind, attrs))
        throw Error("add_node: " + *problem);

    NodeId id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(NodeSlot{Node{kind, std::move(attrs)}, {}, {}, true});
    ++node_count_;
    ++kind_counts_[static_cast<std::size_t>(kind)];
    return id;
}

void Graph::insert_out_edge(NodeId source, EdgeId id) {
    auto& out = nodes_[source].out;
    std::int32_t pos = edges_[id].edge.position;
    auto it = std::lower_bound(out.begin(), out.end(), pos, [&](EdgeId e, std::int32_t p) {
        return edges_[e].edge.position < p;
    });
    out.insert(it, id);
}

void Graph::resort_out_edges(NodeId source) {
    auto& out = nodes_[source].out;
    std::sort(out.begin(), out.end(), [&](EdgeId a, EdgeId b) {
        return edges_[a].edge.position < edges_[b].edge.position;
    });
}

void Graph::append_in_edge(NodeId target, EdgeId id) {
    auto& in = nodes_[target].in;
    edges_[id].in_index = static_cast<std::uint32_t>(in.size());
    in.push_back(id);
}

// Swap-and-pop so removal cost does not grow with the target's user count
// (blocks collect one containment edge per contained node).
void Graph::unlink_in_edge(EdgeId id) {
    auto& in = nodes_[edges_[id].edge.target].in;
    std::uint32_t index = edges_[id].in_index;
    in[index] = in.back();
    edges_[in[index]].in_index = index;
    in.pop_back();
}

EdgeId Graph::add_edge(NodeId source, NodeId target, EdgeKind kind, std::int32_t position) {
    const NodeSlot& src = slot(source);
    slot(target);
    if (kind >= EdgeKind::Count_) throw Error("invalid edge kind");
    if (position < kContainmentPosition)
        throw Error("add_edge: position below -1");
    for (EdgeId e : src.out)
        if (edges_[e].edge.position == position)
            throw Error("add_edge: duplicate position " + std::to_string(position) +
                        " on source n" + std::to_string(source));
    if (position == kContainmentPosition) {
        // Containment is intrinsically well-formed; malformed shapes that the
        // verifier should be able to diagnose use ordinary positions instead.
        if (kind != EdgeKind::Dataflow)
            throw Error("add_edge: position -1 requires a Dataflow edge");
        if (!is_block_kind(nodes_[target].node.kind))
            throw Error("add_edge: position -1 must point at a block");
        if (is_block_kind(src.node.kind))
            throw Error("add_edge: blocks have no containing block");
    }

    EdgeId id = static_cast<EdgeId>(edges_.size());
    edges_.push_back(EdgeSlot{Edge{source, target, kind, position}, 0, true});
    insert_out_edge(source, id);
    append_in_edge(target, id);
    ++edge_count_;
    return id;
}

void Graph::remove_edge(EdgeId id) {
    Edge e = eslot(id).edge;
    auto& out = nodes_[e.source].out;
    out.erase(std::find(out.begin(), out.end(), id));
    unlink_in_edge(id);
    edges_[id].alive = false;
    --edge_count_;
}

std::size_t Graph::remove_node(NodeId id) {
    const NodeSlot& s = slot(id);
    std::vector<EdgeId> incident(s.out.begin(), s.out.end());
    incident.insert(incident.end(), s.in.begin(), s.in.end());
    // A self-edge would appear twice; dedup keeps removal idempotent.
    std::sort(incident.begin(), incident.end());
    incident.erase(std::unique(incident.begin(), incident.end()), incident.end());
    for (EdgeId e : incident) remove_edge(e);
    --kind_counts_[static_cast<std::size_t>(nodes_[id].node.kind)];
    nodes_[id].alive = false;
    --node_count_;
    return incident.size();
}

std::size_t Graph::replace_uses(NodeId old_node, NodeId new_node) {
    slot(old_node);
    slot(new_node);
    if (old_node == new_node) return 0;
    std::vector<EdgeId> incoming(nodes_[old_node].in.begin(), nodes_[old_node].in.end());
    for (EdgeId e : incoming) retarget_edge(e, new_node);
    return incoming.size();
}

bool Graph::has_node(NodeId id) const noexcept {
    return id < nodes_.size() && nodes_[id].alive;
}

bool Graph::has_edge(EdgeId id) const noexcept {
    return id < edges_.size() && edges_[id].alive;
}

const Node& Graph::node(NodeId id) const { return slot(id).node; }

const Edge& Graph::edge(EdgeId id) const { return eslot(id).edge; }

std::vector<NodeId> Graph::node_ids() const {
    std::vector<NodeId> ids;
    ids.reserve(node_count_);
    for (NodeId i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].alive) ids.push_back(i);
    return ids;
}

std::vector<EdgeId> Graph::edge_ids() const {
    std::vector<EdgeId> ids;
    ids.reserve(edge_count_);
    for (EdgeId i = 0; i < edges_.size(); ++i)
        if (edges_[i].alive) ids.push_back(i);
    return ids;
}

std::vector<std::pair<EdgeId, NodeId>> Graph::operands(NodeId id) const {
    const NodeSlot& s = slot(id);
    std::vector<std::pair<EdgeId, NodeId>> result;
    result.reserve(s.out.size());
    for (EdgeId e : s.out) {
        const Edge& edge = edges_[e].edge;
        if (edge.position >= 0) result.emplace_back(e, edge.target);
    }
    return result;
}

std::size_t Graph::operand_count(NodeId id) const {
    const NodeSlot& s = slot(id);
    std::size_t n = 0;
    for (EdgeId e : s.out)
        if (edges_[e].edge.position >= 0) ++n;
    return n;
}

std::optional<EdgeId> Graph::operand_edge_at(NodeId id, std::int32_t position) const {
    const NodeSlot& s = slot(id);
    for (EdgeId e : s.out)
        if (edges_[e].edge.position == position) return e;
    return std::nullopt;
}

std::optional<EdgeId> Graph::containment_edge(NodeId id) const {
    const NodeSlot& s = slot(id);
    if (!s.out.empty() && edges_[s.out.front()].edge.position == kContainmentPosition)
        return s.out.front();
    return std::nullopt;
}

NodeId Graph::block_of(NodeId id) const {
    auto e = containment_edge(id);
    if (!e) throw Error("node n" + std::to_string(id) + " has no containing block");
    return edges_[*e].edge.target;
}

std::vector<std::pair<NodeId, EdgeId>> Graph::users(NodeId id) const {
    const NodeSlot& s = slot(id);
    std::vector<std::pair<NodeId, EdgeId>> result;
    result.reserve(s.in.size());
    for (EdgeId e : s.in) result.emplace_back(edges_[e].edge.source, e);
    return result;
}

std::size_t Graph::user_count(NodeId id) const { return slot(id).in.size(); }

std::vector<NodeId> Graph::nodes_in_block(NodeId block) const {
    const NodeSlot& s = slot(block);
    std::vector<NodeId> result;
    for (EdgeId e : s.in) {
        const Edge& edge = edges_[e].edge;
        if (edge.position == kContainmentPosition) result.push_back(edge.source);
    }
    std::sort(result.begin(), result.end());
    return result;
}

NodeId Graph::unique_node(NodeKind kind) const {
    if (count_of(kind) != 1)
        throw Error(std::string("expected exactly one ") + to_string(kind) + " node, found " +
                    std::to_string(count_of(kind)));
    for (NodeId i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].alive && nodes_[i].node.kind == kind) return i;
    throw Error("kind count out of sync");  // unreachable
}

std::vector<std::uint8_t> Graph::live_mask() const {
    NodeId end = unique_node(NodeKind::End);
    NodeId end_block = unique_node(NodeKind::EndBlock);
    std::vector<std::uint8_t> mask(nodes_.size(), 0);
    std::deque<NodeId> queue{end, end_block};
    mask[end] = mask[end_block] = 1;
    // The entry anchors are structurally required even when no surviving
    // value references them (a program that never returns still starts).
    for (NodeKind anchor : {NodeKind::Start, NodeKind::StartBlock}) {
        if (count_of(anchor) != 1) continue;
        NodeId n = unique_node(anchor);
        if (!mask[n]) {
            mask[n] = 1;
            queue.push_back(n);
        }
    }
    while (!queue.empty()) {
        NodeId n = queue.front();
        queue.pop_front();
        for (EdgeId e : nodes_[n].out) {
            NodeId t = edges_[e].edge.target;
            if (!mask[t]) {
                mask[t] = 1;
                queue.push_back(t);
            }
        }
    }
    return mask;
}

std::unordered_set<NodeId> Graph::live_nodes() const {
    auto mask = live_mask();
    std::unordered_set<NodeId> live;
    for (NodeId i = 0; i < mask.size(); ++i)
        if (mask[i]) live.insert(i);
    return live;
}

std::span<const EdgeId> Graph::out_edges(NodeId id) const { return slot(id).out; }

std::span<const EdgeId> Graph::in_edges(NodeId id) const { return slot(id).in; }

void Graph::retarget_edge(EdgeId id, NodeId new_target) {
    slot(new_target);
    Edge& e = eslot(id).edge;
    if (e.target == new_target) return;
    unlink_in_edge(id);
    e.target = new_target;
    append_in_edge(new_target, id);
}

void Graph::set_edge_kind(EdgeId id, EdgeKind kind) {
    if (kind >= EdgeKind::Count_) throw Error("invalid edge kind");
    eslot(id).edge.kind = kind;
}

void Graph::set_edge_position(EdgeId id, std::int32_t position) {
    if (position < kContainmentPosition) throw Error("position below -1");
    Edge& e = eslot(id).edge;
    if (e.position == position) return;
    e.position = position;
    resort_out_edges(e.source);
}

void Graph::set_node_kind(NodeId id, NodeKind kind) {
    if (kind >= NodeKind::Count_) throw Error("invalid node kind");
    NodeSlot& s = slot(id);
    --kind_counts_[static_cast<std::size_t>(s.node.kind)];
    s.node.kind = kind;
    ++kind_counts_[static_cast<std::size_t>(kind)];
}

NodeAttrs& Graph::attrs(NodeId id) { return slot(id).node.attrs; }

void Graph::unlink_for_worker(EdgeId id) {
    EdgeSlot& es = eslot(id);
    auto& out = nodes_[es.edge.source].out;
    out.erase(std::find(out.begin(), out.end(), id));
    es.alive = false;
}

void Graph::finish_unlinked(std::span<const EdgeId> ids) {
    for (EdgeId id : ids) {
        // The slot is kept intact by unlink_for_worker, so the in-list entry
        // and its recorded index are still valid here.
        unlink_in_edge(id);
        --edge_count_;
    }
}

void Graph::rewrite_kind_for_worker(NodeId id, NodeKind kind) {
    nodes_[id].node.kind = kind;
}

void Graph::recount_kinds() {
    std::fill(std::begin(kind_counts_), std::end(kind_counts_), 0);
    for (const NodeSlot& s : nodes_)
        if (s.alive) ++kind_counts_[static_cast<std::size_t>(s.node.kind)];
}

}  // namespace irkit
