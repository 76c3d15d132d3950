// Python bindings for the graph IR kit: graph construction, GXL/DOT I/O,
// verification, local optimization, and instruction selection.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "irkit/dot.hpp"
#include "irkit/gxl.hpp"
#include "irkit/ir.hpp"
#include "irkit/optimize.hpp"
#include "irkit/select.hpp"
#include "irkit/verify.hpp"

namespace py = pybind11;
using namespace irkit;

namespace {

NodeKind parse_node_kind(const std::string& name) {
    auto kind = node_kind_from_string(name);
    if (!kind) throw Error("unknown node kind: " + name);
    return *kind;
}

EdgeKind parse_edge_kind(const std::string& name) {
    auto kind = edge_kind_from_string(name);
    if (!kind) throw Error("unknown edge kind: " + name);
    return *kind;
}

py::object json_to_py(const nlohmann::json& j) {
    switch (j.type()) {
        case nlohmann::json::value_t::null:
            return py::none();
        case nlohmann::json::value_t::boolean:
            return py::bool_(j.get<bool>());
        case nlohmann::json::value_t::number_integer:
            return py::int_(j.get<std::int64_t>());
        case nlohmann::json::value_t::number_unsigned:
            return py::int_(j.get<std::uint64_t>());
        case nlohmann::json::value_t::number_float:
            return py::float_(j.get<double>());
        case nlohmann::json::value_t::string:
            return py::str(j.get<std::string>());
        case nlohmann::json::value_t::array: {
            py::list out;
            for (const auto& item : j) out.append(json_to_py(item));
            return out;
        }
        default: {
            py::dict out;
            for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
            return out;
        }
    }
}

NodeId graph_add_node(Graph& g, const std::string& kind, std::optional<std::int32_t> value,
                      std::optional<std::string> symbol, std::optional<std::string> relation,
                      std::optional<bool> volatile_flag, std::optional<bool> associative,
                      std::optional<bool> commutative, std::optional<std::int32_t> position) {
    NodeAttrs attrs;
    attrs.value = value;
    attrs.symbol = std::move(symbol);
    if (relation) {
        attrs.relation = relation_from_string(*relation);
        if (!attrs.relation) throw Error("unknown relation: " + *relation);
    }
    attrs.volatile_flag = volatile_flag;
    attrs.associative = associative;
    attrs.commutative = commutative;
    attrs.arg_position = position;
    return g.add_node(parse_node_kind(kind), std::move(attrs));
}

py::dict node_attrs_dict(const Graph& g, NodeId id) {
    const NodeAttrs& a = g.node(id).attrs;
    py::dict out;
    if (a.value) out["value"] = *a.value;
    if (a.symbol) out["symbol"] = *a.symbol;
    if (a.relation) out["relation"] = to_string(*a.relation);
    if (a.volatile_flag) out["volatile"] = *a.volatile_flag;
    if (a.associative) out["associative"] = *a.associative;
    if (a.commutative) out["commutative"] = *a.commutative;
    if (a.arg_position) out["position"] = *a.arg_position;
    return out;
}

py::list verify_to_py(const Graph& g) {
    py::list out;
    for (const Diagnostic& d : verify(g)) {
        py::dict entry;
        entry["rule"] = d.rule_id();
        entry["severity"] = to_string(d.severity);
        py::list subjects;
        for (const Subject& s : d.subjects) subjects.append(s.str());
        entry["subjects"] = subjects;
        entry["message"] = d.message;
        out.append(entry);
    }
    return out;
}

py::dict optimize_py(Graph& g, std::optional<std::vector<std::string>> rules,
                     std::size_t max_iterations, bool verify_each_round) {
    OptConfig config;
    if (rules) config.rules.insert(rules->begin(), rules->end());
    config.max_iterations = max_iterations;
    config.verify_each_round = verify_each_round;
    PassReport report = optimize(g, config);
    return json_to_py(nlohmann::json::parse(pass_report_to_json(report)));
}

py::dict select_py(Graph& g, bool sequential, unsigned jobs) {
    SelectOptions options;
    options.sequential = sequential;
    options.jobs = jobs;
    SelectionReport report = select(g, options);
    return json_to_py(nlohmann::json::parse(selection_report_to_json(report)));
}

}  // namespace

PYBIND11_MODULE(_irkit, m) {
    m.doc() = "Graph-based IR kit: verification, local optimization, instruction selection";

    py::register_exception<Error>(m, "IrError", PyExc_ValueError);

    py::class_<Graph>(m, "Graph")
        .def(py::init<>())
        .def_readwrite("name", &Graph::name)
        .def("add_node", &graph_add_node, py::arg("kind"), py::kw_only(),
             py::arg("value") = std::nullopt, py::arg("symbol") = std::nullopt,
             py::arg("relation") = std::nullopt, py::arg("volatile") = std::nullopt,
             py::arg("associative") = std::nullopt, py::arg("commutative") = std::nullopt,
             py::arg("position") = std::nullopt)
        .def("add_edge",
             [](Graph& g, NodeId src, NodeId dst, const std::string& kind,
                std::int32_t position) {
                 return g.add_edge(src, dst, parse_edge_kind(kind), position);
             },
             py::arg("source"), py::arg("target"), py::arg("kind"), py::arg("position"))
        .def("remove_node", &Graph::remove_node)
        .def("remove_edge", &Graph::remove_edge)
        .def("node_count", &Graph::node_count)
        .def("edge_count", &Graph::edge_count)
        .def("node_ids", &Graph::node_ids)
        .def("node_kind", [](const Graph& g, NodeId id) { return to_string(g.node(id).kind); })
        .def("node_attrs", &node_attrs_dict)
        .def("operands", &Graph::operands)
        .def("users", &Graph::users)
        .def("block_of", &Graph::block_of)
        .def("__repr__", [](const Graph& g) {
            return "<irkit.Graph '" + g.name + "' with " + std::to_string(g.node_count()) +
                   " nodes, " + std::to_string(g.edge_count()) + " edges>";
        });

    m.def("parse_gxl", [](const std::string& text) { return parse_gxl(text); }, py::arg("text"));
    m.def("parse_gxl_file", &parse_gxl_file, py::arg("path"));
    m.def("write_gxl", &write_gxl, py::arg("graph"));
    m.def("write_gxl_file", &write_gxl_file, py::arg("graph"), py::arg("path"));
    m.def("write_dot", &write_dot, py::arg("graph"), py::arg("cluster_blocks") = true);
    m.def("verify", &verify_to_py, py::arg("graph"),
          "Structural checks; returns a list of diagnostic dicts");
    m.def("optimize", &optimize_py, py::arg("graph"), py::kw_only(),
          py::arg("rules") = std::nullopt, py::arg("max_iterations") = std::size_t{100},
          py::arg("verify_each_round") = false, "Run local rewrites to a fixpoint in place");
    m.def("select", &select_py, py::arg("graph"), py::kw_only(), py::arg("sequential") = false,
          py::arg("jobs") = 0u, "Rewrite the graph to target instructions in place");
}
