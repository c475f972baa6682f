#include "loadisc/graph_io.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace loadisc {

using nlohmann::json;

std::vector<std::string> default_node_names(int n) {
    std::vector<std::string> names;
    names.reserve(n);
    for (int i = 0; i < n; ++i) names.push_back("X" + std::to_string(i));
    return names;
}

NodeId NamedGraph::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<NodeId>(i);
    throw std::invalid_argument("unknown node name: " + name);
}

Dag NamedGraph::to_dag() const {
    if (!is_dag()) throw std::invalid_argument("graph has undirected edges, not a DAG");
    return Dag(graph.num_nodes(), graph.directed_edges());
}

NamedGraph NamedGraph::from_dag(const Dag& dag, std::vector<std::string> names) {
    Cpdag g(dag.num_nodes());
    for (const auto& [p, c] : dag.edges()) g.add_directed(p, c);
    return from_cpdag(g, std::move(names));
}

NamedGraph NamedGraph::from_cpdag(const Cpdag& g, std::vector<std::string> names) {
    NamedGraph out;
    out.graph = g;
    out.names = names.empty() ? default_node_names(g.num_nodes()) : std::move(names);
    if (static_cast<int>(out.names.size()) != g.num_nodes())
        throw std::invalid_argument("name table size does not match node count");
    return out;
}

std::string graph_to_json(const NamedGraph& g) {
    json j;
    j["nodes"] = g.names;
    json dir = json::array();
    for (const auto& [a, b] : g.graph.directed_edges()) dir.push_back({a, b});
    json und = json::array();
    for (const auto& [a, b] : g.graph.undirected_edges()) und.push_back({a, b});
    j["directed"] = dir;
    j["undirected"] = und;
    return j.dump(2);
}

NamedGraph graph_from_json(const std::string& text) {
    json j = json::parse(text);
    NamedGraph out;
    out.names = j.at("nodes").get<std::vector<std::string>>();
    out.graph = Cpdag(static_cast<int>(out.names.size()));
    auto node_of = [&](const json& v) -> NodeId {
        if (v.is_string()) return out.index_of(v.get<std::string>());
        return v.get<NodeId>();
    };
    if (j.contains("directed"))
        for (const auto& e : j["directed"]) out.graph.add_directed(node_of(e.at(0)), node_of(e.at(1)));
    if (j.contains("undirected"))
        for (const auto& e : j["undirected"]) out.graph.add_undirected(node_of(e.at(0)), node_of(e.at(1)));
    return out;
}

std::string graph_to_edge_list(const NamedGraph& g) {
    std::ostringstream os;
    for (const auto& [a, b] : g.graph.directed_edges())
        os << g.names[a] << " -> " << g.names[b] << "\n";
    for (const auto& [a, b] : g.graph.undirected_edges())
        os << g.names[a] << " -- " << g.names[b] << "\n";
    return os.str();
}

NamedGraph graph_from_edge_list(const std::string& text) {
    struct RawEdge {
        std::string a, b;
        bool directed;
    };
    std::vector<RawEdge> raw;
    std::map<std::string, NodeId> ids;
    std::vector<std::string> names;
    auto intern = [&](const std::string& s) {
        auto it = ids.find(s);
        if (it != ids.end()) return it->second;
        NodeId id = static_cast<NodeId>(names.size());
        ids.emplace(s, id);
        names.push_back(s);
        return id;
    };
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string a, op, b;
        if (!(ls >> a)) continue;  // blank line
        if (a.starts_with("#")) continue;
        if (!(ls >> op >> b) || (op != "->" && op != "--"))
            throw std::invalid_argument("bad edge line: " + line);
        intern(a);
        intern(b);
        raw.push_back({a, b, op == "->"});
    }
    NamedGraph out;
    out.names = names;
    out.graph = Cpdag(static_cast<int>(names.size()));
    for (const auto& e : raw) {
        if (e.directed)
            out.graph.add_directed(ids.at(e.a), ids.at(e.b));
        else
            out.graph.add_undirected(ids.at(e.a), ids.at(e.b));
    }
    return out;
}

NamedGraph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return graph_from_json(text);
    return graph_from_edge_list(text);
}

void write_graph_file(const NamedGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open graph file for writing: " + path);
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".txt")
        out << graph_to_edge_list(g);
    else
        out << graph_to_json(g);
}

}  // namespace loadisc
