#include <expat.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "irkit/gxl.hpp"

namespace irkit {

namespace {

// ---------------------------------------------------------------------------
// Stage 1: SAX parse into flat records
// ---------------------------------------------------------------------------

struct GxlAttr {
    enum class Type { Int, String, Bool } type = Type::String;
    std::string name;
    std::int64_t int_value = 0;
    std::string string_value;
    bool bool_value = false;
    int line = 0;
};

struct GxlNode {
    std::string id;
    std::string type_name;
    std::vector<GxlAttr> attrs;
    int line = 0;
};

struct GxlEdge {
    std::string id;
    std::string from;
    std::string to;
    std::string type_name;
    std::vector<GxlAttr> attrs;
    int line = 0;
};

struct GxlDocument {
    std::string graph_id = "g";
    std::vector<GxlNode> nodes;
    std::vector<GxlEdge> edges;
};

[[noreturn]] void fail(int line, const std::string& message) {
    throw Error("GXL parse error: line " + std::to_string(line) + ": " + message);
}

std::string fragment_of(std::string_view href) {
    auto hash = href.rfind('#');
    if (hash == std::string_view::npos) return std::string(href);
    return std::string(href.substr(hash + 1));
}

std::string trimmed(const std::string& text) {
    auto begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

// SAX state. expat callbacks are C functions, so errors are stashed here and
// rethrown after XML_StopParser unwinds the parse loop.
struct SaxState {
    XML_Parser parser = nullptr;
    GxlDocument doc;

    bool in_graph = false;
    bool saw_graph = false;
    GxlNode* node = nullptr;  // element currently open, if any
    GxlEdge* edge = nullptr;
    bool in_attr = false;
    GxlAttr attr;
    bool in_value = false;  // inside <int>/<string>/<bool>
    std::string chars;

    bool failed = false;
    std::string error;
    int error_line = 0;

    int line() const { return static_cast<int>(XML_GetCurrentLineNumber(parser)); }

    void stop(const std::string& message) {
        if (failed) return;
        failed = true;
        error = message;
        error_line = line();
        XML_StopParser(parser, XML_FALSE);
    }
};

const char* find_xml_attr(const char** atts, const char* name) {
    for (int i = 0; atts[i]; i += 2)
        if (std::string_view(atts[i]) == name) return atts[i + 1];
    return nullptr;
}

void XMLCALL on_start(void* user, const char* name, const char** atts) {
    auto& s = *static_cast<SaxState*>(user);
    if (s.failed) return;
    std::string_view tag(name);

    if (tag == "graph") {
        if (s.saw_graph) return s.stop("multiple <graph> elements; expected exactly one");
        s.saw_graph = true;
        s.in_graph = true;
        if (const char* id = find_xml_attr(atts, "id")) s.doc.graph_id = id;
        return;
    }
    if (!s.in_graph) return;  // metadata outside the graph is ignored

    if (tag == "node") {
        if (s.node || s.edge) return s.stop("nested <node>");
        const char* id = find_xml_attr(atts, "id");
        if (!id) return s.stop("<node> without id");
        s.doc.nodes.push_back(GxlNode{id, "", {}, s.line()});
        s.node = &s.doc.nodes.back();
        return;
    }
    if (tag == "edge") {
        if (s.node || s.edge) return s.stop("nested <edge>");
        const char* id = find_xml_attr(atts, "id");
        const char* from = find_xml_attr(atts, "from");
        const char* to = find_xml_attr(atts, "to");
        if (!id) return s.stop("<edge> without id");
        if (!from || !to)
            return s.stop("edge \"" + std::string(id) + "\" lacks from/to");
        s.doc.edges.push_back(GxlEdge{id, from, to, "", {}, s.line()});
        s.edge = &s.doc.edges.back();
        return;
    }
    if (tag == "type") {
        const char* href = find_xml_attr(atts, "xlink:href");
        if (!href) href = find_xml_attr(atts, "href");
        if (!href) return s.stop("<type> without href");
        if (s.node)
            s.node->type_name = fragment_of(href);
        else if (s.edge)
            s.edge->type_name = fragment_of(href);
        return;
    }
    if (tag == "attr") {
        if (!s.node && !s.edge) return;  // graph-level attrs are ignored
        if (s.in_attr) return s.stop("nested <attr>");
        const char* attr_name = find_xml_attr(atts, "name");
        if (!attr_name) return s.stop("<attr> without name");
        s.in_attr = true;
        s.attr = GxlAttr{};
        s.attr.name = attr_name;
        s.attr.line = s.line();
        return;
    }
    if (s.in_attr && (tag == "int" || tag == "string" || tag == "bool")) {
        s.in_value = true;
        s.chars.clear();
        s.attr.type = tag == "int"      ? GxlAttr::Type::Int
                      : tag == "string" ? GxlAttr::Type::String
                                        : GxlAttr::Type::Bool;
        return;
    }
}

void XMLCALL on_end(void* user, const char* name) {
    auto& s = *static_cast<SaxState*>(user);
    if (s.failed) return;
    std::string_view tag(name);

    if (tag == "graph") {
        s.in_graph = false;
        return;
    }
    if (tag == "node") {
        s.node = nullptr;
        return;
    }
    if (tag == "edge") {
        s.edge = nullptr;
        return;
    }
    if (tag == "attr" && s.in_attr) {
        s.in_attr = false;
        auto& attrs = s.node ? s.node->attrs : s.edge->attrs;
        attrs.push_back(std::move(s.attr));
        return;
    }
    if (s.in_value && (tag == "int" || tag == "string" || tag == "bool")) {
        s.in_value = false;
        switch (s.attr.type) {
            case GxlAttr::Type::String:
                s.attr.string_value = s.chars;
                break;
            case GxlAttr::Type::Int: {
                // Tolerate pretty-printed whitespace around the literal.
                const std::string text = trimmed(s.chars);
                errno = 0;
                char* end = nullptr;
                long long v = std::strtoll(text.c_str(), &end, 10);
                if (text.empty() || errno != 0 || !end || *end != '\0')
                    return s.stop("attribute \"" + s.attr.name + "\" has malformed integer \"" +
                                  text + "\"");
                s.attr.int_value = v;
                break;
            }
            case GxlAttr::Type::Bool: {
                const std::string text = trimmed(s.chars);
                if (text == "true")
                    s.attr.bool_value = true;
                else if (text == "false")
                    s.attr.bool_value = false;
                else
                    return s.stop("attribute \"" + s.attr.name + "\" has malformed boolean \"" +
                                  text + "\"");
                break;
            }
        }
        return;
    }
}

void XMLCALL on_chars(void* user, const char* data, int len) {
    auto& s = *static_cast<SaxState*>(user);
    if (s.failed || !s.in_value) return;
    s.chars.append(data, static_cast<std::size_t>(len));
}

GxlDocument run_sax(std::string_view bytes) {
    SaxState state;
    XML_Parser parser = XML_ParserCreate("UTF-8");
    if (!parser) throw Error("GXL parse error: cannot create XML parser");
    state.parser = parser;
    XML_SetUserData(parser, &state);
    XML_SetElementHandler(parser, on_start, on_end);
    XML_SetCharacterDataHandler(parser, on_chars);

    XML_Status status =
        XML_Parse(parser, bytes.data(), static_cast<int>(bytes.size()), /*isFinal=*/1);
    int xml_line = static_cast<int>(XML_GetCurrentLineNumber(parser));
    XML_Error code = XML_GetErrorCode(parser);
    XML_ParserFree(parser);

    if (state.failed) fail(state.error_line, state.error);
    if (status != XML_STATUS_OK)
        fail(xml_line, std::string("malformed XML: ") + XML_ErrorString(code));
    if (!state.saw_graph) throw Error("GXL parse error: no <graph> element");
    return std::move(state.doc);
}

// ---------------------------------------------------------------------------
// Stage 2: records -> Graph
// ---------------------------------------------------------------------------

const GxlAttr* find_attr(const std::vector<GxlAttr>& attrs, std::string_view name) {
    for (const GxlAttr& a : attrs)
        if (a.name == name) return &a;
    return nullptr;
}

std::int32_t int_attr(const GxlAttr& a, const std::string& owner) {
    if (a.type != GxlAttr::Type::Int)
        fail(a.line, owner + ": attribute \"" + a.name + "\" must be an int");
    if (a.int_value < INT32_MIN || a.int_value > INT32_MAX)
        fail(a.line, owner + ": attribute \"" + a.name + "\" is out of 32-bit range");
    return static_cast<std::int32_t>(a.int_value);
}

std::string string_attr(const GxlAttr& a, const std::string& owner) {
    if (a.type != GxlAttr::Type::String)
        fail(a.line, owner + ": attribute \"" + a.name + "\" must be a string");
    return a.string_value;
}

bool bool_attr(const GxlAttr& a, const std::string& owner) {
    if (a.type != GxlAttr::Type::Bool)
        fail(a.line, owner + ": attribute \"" + a.name + "\" must be a bool");
    return a.bool_value;
}

Graph build_graph(const GxlDocument& doc) {
    Graph graph;
    graph.name = doc.graph_id;

    std::unordered_map<std::string, NodeId> by_gxl_id;
    for (const GxlNode& rec : doc.nodes) {
        const std::string owner = "node \"" + rec.id + "\"";
        if (by_gxl_id.count(rec.id)) fail(rec.line, "duplicate " + owner);
        auto kind = node_kind_from_string(trimmed(rec.type_name));
        if (!kind) fail(rec.line, owner + ": unknown node type \"" + rec.type_name + "\"");

        NodeAttrs attrs;
        for (const GxlAttr& a : rec.attrs) {
            if (a.name == "value")
                attrs.value = int_attr(a, owner);
            else if (a.name == "symbol")
                attrs.symbol = string_attr(a, owner);
            else if (a.name == "relation") {
                auto rel = relation_from_string(trimmed(string_attr(a, owner)));
                if (!rel) fail(a.line, owner + ": unknown relation \"" + a.string_value + "\"");
                attrs.relation = rel;
            } else if (a.name == "volatile")
                attrs.volatile_flag = bool_attr(a, owner);
            else if (a.name == "associative")
                attrs.associative = bool_attr(a, owner);
            else if (a.name == "commutative")
                attrs.commutative = bool_attr(a, owner);
            else if (a.name == "position" && *kind == NodeKind::Argument)
                attrs.arg_position = int_attr(a, owner);
            // Unknown attribute names are ignored for forward compatibility.
        }
        try {
            by_gxl_id.emplace(rec.id, graph.add_node(*kind, std::move(attrs)));
        } catch (const Error& e) {
            fail(rec.line, owner + ": " + e.what());
        }
    }

    for (const GxlEdge& rec : doc.edges) {
        const std::string owner = "edge \"" + rec.id + "\"";
        auto kind = edge_kind_from_string(trimmed(rec.type_name));
        if (!kind) fail(rec.line, owner + ": unknown edge type \"" + rec.type_name + "\"");
        auto from = by_gxl_id.find(rec.from);
        if (from == by_gxl_id.end())
            fail(rec.line, owner + ": references undeclared node \"" + rec.from + "\"");
        auto to = by_gxl_id.find(rec.to);
        if (to == by_gxl_id.end())
            fail(rec.line, owner + ": references undeclared node \"" + rec.to + "\"");

        std::int32_t position;
        if (const GxlAttr* a = find_attr(rec.attrs, "position")) {
            position = int_attr(*a, owner);
        } else if (*kind == EdgeKind::Keep) {
            // Keep edges are unordered; give a missing position the smallest
            // free slot so several of them can share one source.
            position = 0;
            for (EdgeId e : graph.out_edges(from->second)) {
                std::int32_t p = graph.edge(e).position;
                if (p == position) ++position;  // out edges are position-sorted
            }
        } else {
            fail(rec.line, owner + ": missing position attribute");
        }
        try {
            graph.add_edge(from->second, to->second, *kind, position);
        } catch (const Error& e) {
            fail(rec.line, owner + ": " + e.what());
        }
    }
    return graph;
}

}  // namespace

Graph parse_gxl(std::string_view bytes) { return build_graph(run_sax(bytes)); }

Graph parse_gxl_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw Error("cannot read " + path);
    return parse_gxl(buffer.str());
}

}  // namespace irkit
