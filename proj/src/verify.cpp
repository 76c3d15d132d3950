#include "irkit/verify.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace irkit {

const char* to_string(Severity severity) {
    return severity == Severity::Error ? "error" : "warning";
}

namespace {

bool is_control_pred_edge(EdgeKind k) {
    return k == EdgeKind::Controlflow || k == EdgeKind::True || k == EdgeKind::False;
}

class Checker {
public:
    explicit Checker(const Graph& g) : g_(g) {}

    std::vector<Diagnostic> run() {
        cardinality_rules();
        for (NodeId n : g_.node_ids()) check_node(n);
        for (EdgeId e : g_.edge_ids()) check_edge(e);
        std::sort(out_.begin(), out_.end(), [](const Diagnostic& a, const Diagnostic& b) {
            return std::tie(a.rule, a.severity, a.subjects, a.message) <
                   std::tie(b.rule, b.severity, b.subjects, b.message);
        });
        return std::move(out_);
    }

private:
    const Graph& g_;
    std::vector<Diagnostic> out_;

    void report(int rule, Severity sev, std::vector<Subject> subjects, std::string message) {
        out_.push_back(Diagnostic{rule, sev, std::move(subjects), std::move(message)});
    }

    std::vector<NodeId> all_of_kind(NodeKind k) const {
        std::vector<NodeId> result;
        for (NodeId n : g_.node_ids())
            if (g_.node(n).kind == k) result.push_back(n);
        return result;
    }

    // R1, R2, R7: global cardinalities.
    void cardinality_rules() {
        auto check_one = [&](int rule, NodeKind kind) {
            auto found = all_of_kind(kind);
            if (found.size() == 1) return;
            std::vector<Subject> subjects;
            for (NodeId n : found) subjects.push_back(Subject::node(n));
            report(rule, Severity::Error, std::move(subjects),
                   std::string("expected exactly one ") + to_string(kind) + " node, found " +
                       std::to_string(found.size()));
        };
        check_one(1, NodeKind::Start);
        check_one(2, NodeKind::End);
        check_one(7, NodeKind::StartBlock);
        check_one(7, NodeKind::EndBlock);

        auto end_blocks = all_of_kind(NodeKind::EndBlock);
        if (end_blocks.size() == 1) {
            NodeId eb = end_blocks.front();
            std::vector<NodeId> ends;
            for (NodeId n : g_.nodes_in_block(eb))
                if (g_.node(n).kind == NodeKind::End) ends.push_back(n);
            if (ends.size() != 1) {
                std::vector<Subject> subjects{Subject::node(eb)};
                for (NodeId n : ends) subjects.push_back(Subject::node(n));
                report(7, Severity::Error, std::move(subjects),
                       "EndBlock must contain exactly one End node, contains " +
                           std::to_string(ends.size()));
            }
        }
    }

    // The containment edge if the node has exactly one position -1 out edge.
    std::optional<EdgeId> sole_containment(NodeId n) const {
        std::optional<EdgeId> found;
        for (EdgeId e : g_.out_edges(n)) {
            if (g_.edge(e).position != kContainmentPosition) continue;
            if (found) return std::nullopt;
            found = e;
        }
        return found;
    }

    void check_node(NodeId n) {
        const Node& node = g_.node(n);

        // R9: attribute/kind fit.
        if (auto problem = check_node_attrs(node.kind, node.attrs))
            report(9, Severity::Error, {Subject::node(n)}, *problem);

        // R8: containment cardinality.
        std::size_t containments = 0;
        for (EdgeId e : g_.out_edges(n))
            if (g_.edge(e).position == kContainmentPosition) ++containments;
        if (is_block_kind(node.kind)) {
            if (containments != 0)
                report(8, Severity::Error, {Subject::node(n)},
                       std::string(to_string(node.kind)) + " must not have a containment edge");
        } else if (containments != 1) {
            report(8, Severity::Error, {Subject::node(n)},
                   std::string(to_string(node.kind)) + " must have exactly one containment edge, has " +
                       std::to_string(containments));
        }

        // R4: constants sit in the StartBlock.
        if (is_constant_kind(node.kind)) {
            if (auto ce = sole_containment(n)) {
                NodeId block = g_.edge(*ce).target;
                if (g_.node(block).kind != NodeKind::StartBlock)
                    report(4, Severity::Error, {Subject::node(n), Subject::node(block)},
                           std::string(to_string(node.kind)) + " n" + std::to_string(n) +
                               " is contained in " + to_string(g_.node(block).kind) +
                               " n" + std::to_string(block) + ", not in the StartBlock");
            }
        }

        if (is_block_kind(node.kind))
            check_block(n);
        else
            check_arity(n);

        if (node.kind == NodeKind::Phi) check_phi(n);
    }

    // Control-flow predecessor edges of a block: out edges at position >= 0
    // whose kind is Controlflow/True/False. Foreign kinds at those positions
    // are flagged by check_block.
    std::vector<EdgeId> block_pred_edges(NodeId block) const {
        std::vector<EdgeId> preds;
        for (EdgeId e : g_.out_edges(block))
            if (g_.edge(e).position >= 0 && is_control_pred_edge(g_.edge(e).kind))
                preds.push_back(e);
        return preds;
    }

    static bool positions_dense(const std::vector<std::int32_t>& sorted) {
        for (std::size_t i = 0; i < sorted.size(); ++i)
            if (sorted[i] != static_cast<std::int32_t>(i)) return false;
        return true;
    }

    void check_block(NodeId block) {
        std::vector<std::int32_t> positions;
        for (EdgeId e : g_.out_edges(block)) {
            const Edge& edge = g_.edge(e);
            if (edge.position < 0) continue;  // R8 already reported
            if (!is_control_pred_edge(edge.kind)) {
                report(10, Severity::Error, {Subject::node(block), Subject::edge(e)},
                       std::string("block predecessor edge must be Controlflow, True or False, got ") +
                           to_string(edge.kind));
                continue;
            }
            positions.push_back(edge.position);
        }
        std::sort(positions.begin(), positions.end());
        if (!positions_dense(positions))
            report(6, Severity::Error, {Subject::node(block)},
                   "block predecessor positions must ascend from 0 without gaps");
    }

    void check_phi(NodeId phi) {
        auto ce = sole_containment(phi);
        if (!ce) return;  // R8 reported; block unknown
        NodeId block = g_.edge(*ce).target;

        std::vector<std::int32_t> block_positions;
        for (EdgeId e : block_pred_edges(block)) block_positions.push_back(g_.edge(e).position);
        std::sort(block_positions.begin(), block_positions.end());

        std::vector<std::int32_t> phi_positions;
        for (auto [e, target] : g_.operands(phi)) phi_positions.push_back(g_.edge(e).position);

        if (phi_positions.size() != block_positions.size())
            report(5, Severity::Error, {Subject::node(phi), Subject::node(block)},
                   "Phi has " + std::to_string(phi_positions.size()) +
                       " operands but its block has " + std::to_string(block_positions.size()) +
                       " predecessors");

        if (!positions_dense(phi_positions))
            report(6, Severity::Error, {Subject::node(phi)},
                   "Phi operand positions must ascend from 0 without gaps");
        else if (phi_positions.size() == block_positions.size() &&
                 phi_positions != block_positions)
            report(6, Severity::Error, {Subject::node(phi), Subject::node(block)},
                   "Phi operand positions do not mirror the block's predecessor positions");
    }

    struct ArityRule {
        int count;                          // expected operand count, -1 = at least one
        std::vector<EdgeKind> kinds;        // per position; uniform_kind when empty
        std::optional<EdgeKind> uniform_kind;
    };

    // Expected operands per kind; nullopt means no constraint (Phi is covered
    // by R5/R6, blocks by check_block).
    static std::optional<ArityRule> arity_rule(NodeKind k) {
        using EK = EdgeKind;
        if (is_ir_binary(k) || is_target_binary(k))
            return ArityRule{2, {EK::Dataflow, EK::Dataflow}, {}};
        if (is_target_binary_immediate(k)) return ArityRule{1, {EK::Dataflow}, {}};
        switch (k) {
            case NodeKind::Not:
            case NodeKind::TargetNot: return ArityRule{1, {EK::Dataflow}, {}};
            case NodeKind::Cond:
            case NodeKind::TargetCond: return ArityRule{1, {EK::Dataflow}, {}};
            case NodeKind::Jmp:
            case NodeKind::TargetJmp:
            case NodeKind::Start:
            case NodeKind::Argument:
            case NodeKind::Const:
            case NodeKind::SymConst:
            case NodeKind::TargetConst:
            case NodeKind::TargetSymConst: return ArityRule{0, {}, {}};
            case NodeKind::End: return ArityRule{0, {}, {}};  // Keep edges not counted
            case NodeKind::Return: return ArityRule{2, {EK::Memory, EK::Dataflow}, {}};
            case NodeKind::Load:
            case NodeKind::TargetLoad: return ArityRule{2, {EK::Memory, EK::Dataflow}, {}};
            case NodeKind::TargetLoadI: return ArityRule{1, {EK::Memory}, {}};
            case NodeKind::Store:
            case NodeKind::TargetStore:
                return ArityRule{3, {EK::Memory, EK::Dataflow, EK::Dataflow}, {}};
            case NodeKind::TargetStoreI: return ArityRule{2, {EK::Memory, EK::Dataflow}, {}};
            case NodeKind::Sync: return ArityRule{-1, {}, EK::Memory};
            default: return std::nullopt;
        }
    }

    void check_arity(NodeId n) {
        const NodeKind kind = g_.node(n).kind;
        auto rule = arity_rule(kind);
        if (!rule) return;

        // Keep edges are keep-alive markers, not operands.
        std::vector<EdgeId> ops;
        for (auto [e, target] : g_.operands(n))
            if (g_.edge(e).kind != EdgeKind::Keep) ops.push_back(e);

        if (rule->count >= 0 && ops.size() != static_cast<std::size_t>(rule->count)) {
            report(10, Severity::Error, {Subject::node(n)},
                   std::string(to_string(kind)) + " must have " + std::to_string(rule->count) +
                       " operand(s), has " + std::to_string(ops.size()));
            return;
        }
        if (rule->count < 0 && ops.empty()) {
            report(10, Severity::Error, {Subject::node(n)},
                   std::string(to_string(kind)) + " must have at least one operand");
            return;
        }
        for (std::size_t i = 0; i < ops.size(); ++i) {
            EdgeKind expected = rule->uniform_kind ? *rule->uniform_kind : rule->kinds[i];
            const Edge& edge = g_.edge(ops[i]);
            // Ops are position-sorted; with the count check passed and density
            // not guaranteed, match by position rather than index.
            if (!rule->uniform_kind &&
                (edge.position < 0 || edge.position >= static_cast<std::int32_t>(rule->kinds.size()))) {
                report(10, Severity::Error, {Subject::node(n), Subject::edge(ops[i])},
                       std::string(to_string(kind)) + " operand at unexpected position " +
                           std::to_string(edge.position));
                continue;
            }
            if (!rule->uniform_kind) expected = rule->kinds[static_cast<std::size_t>(edge.position)];
            if (edge.kind != expected)
                report(10, Severity::Error, {Subject::node(n), Subject::edge(ops[i])},
                       std::string(to_string(kind)) + " operand " + std::to_string(edge.position) +
                           " must be a " + to_string(expected) + " edge, got " +
                           to_string(edge.kind));
        }

        if ((kind == NodeKind::Cond || kind == NodeKind::TargetCond) && ops.size() == 1)
            check_cond_producer(n, ops.front());
    }

    void check_cond_producer(NodeId cond, EdgeId operand_edge) {
        NodeId producer = g_.edge(operand_edge).target;
        const Node& p = g_.node(producer);
        if (kind_carries_relation(p.kind)) return;  // a comparison
        if ((p.kind == NodeKind::Const || p.kind == NodeKind::TargetConst) && p.attrs.value &&
            (*p.attrs.value == 0 || *p.attrs.value == 1))
            return;
        report(10, Severity::Warning, {Subject::node(cond), Subject::node(producer)},
               std::string(to_string(g_.node(cond).kind)) +
                   " operand should be a comparison or a constant 0/1; cannot confirm for " +
                   to_string(p.kind) + " n" + std::to_string(producer));
    }

    void check_edge(EdgeId e) {
        const Edge& edge = g_.edge(e);
        const NodeKind src = g_.node(edge.source).kind;
        const NodeKind dst = g_.node(edge.target).kind;

        // R3: containment discipline, both directions.
        if (edge.kind == EdgeKind::Dataflow && is_block_kind(dst) &&
            edge.position != kContainmentPosition)
            report(3, Severity::Error, {Subject::edge(e)},
                   "Dataflow edge into a block must have position -1, has " +
                       std::to_string(edge.position));
        if (edge.position == kContainmentPosition &&
            (edge.kind != EdgeKind::Dataflow || !is_block_kind(dst) || is_block_kind(src)))
            report(3, Severity::Error, {Subject::edge(e)},
                   "position -1 is reserved for Dataflow containment edges from a non-block into a block");

        // R10: edge discipline for control and keep-alive kinds.
        switch (edge.kind) {
            case EdgeKind::Controlflow:
            case EdgeKind::True:
            case EdgeKind::False: {
                if (!is_block_kind(src)) {
                    report(10, Severity::Error, {Subject::edge(e)},
                           std::string(to_string(edge.kind)) +
                               " edge must originate at a block, got " + to_string(src));
                    break;
                }
                bool ok;
                if (edge.kind == EdgeKind::Controlflow)
                    ok = dst == NodeKind::Jmp || dst == NodeKind::TargetJmp ||
                         dst == NodeKind::Return || dst == NodeKind::Start;
                else
                    ok = dst == NodeKind::Cond || dst == NodeKind::TargetCond;
                if (!ok)
                    report(10, Severity::Error, {Subject::edge(e)},
                           std::string(to_string(edge.kind)) + " edge must target a " +
                               (edge.kind == EdgeKind::Controlflow ? "jump or return"
                                                                   : "conditional branch") +
                               ", got " + to_string(dst));
                break;
            }
            case EdgeKind::Keep:
                if (src != NodeKind::End || !is_block_kind(dst))
                    report(10, Severity::Error, {Subject::edge(e)},
                           "Keep edge must go from the End node to a block");
                break;
            default:
                break;
        }
    }
};

}  // namespace

std::vector<Diagnostic> verify(const Graph& graph) { return Checker(graph).run(); }

bool has_errors(std::span<const Diagnostic> diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string diagnostics_to_text(std::span<const Diagnostic> diagnostics) {
    std::ostringstream os;
    for (const Diagnostic& d : diagnostics) {
        os << d.rule_id() << ' ' << to_string(d.severity);
        for (const Subject& s : d.subjects) os << ' ' << s.str();
        os << ": " << d.message << '\n';
    }
    return os.str();
}

std::string diagnostics_to_json(std::span<const Diagnostic> diagnostics) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Diagnostic& d : diagnostics) {
        nlohmann::json subjects = nlohmann::json::array();
        for (const Subject& s : d.subjects) subjects.push_back(s.str());
        arr.push_back({{"rule", d.rule_id()},
                       {"severity", to_string(d.severity)},
                       {"subjects", std::move(subjects)},
                       {"message", d.message}});
    }
    return arr.dump(2);
}

}  // namespace irkit
