#pragma once

#include <string>
#include <vector>

#include "loadisc/graph.hpp"

namespace loadisc {

/// A mixed graph plus its node name table, as read from or written to disk.
struct NamedGraph {
    std::vector<std::string> names;
    Cpdag graph{0};

    NodeId index_of(const std::string& name) const;
    bool is_dag() const { return graph.undirected_edges().empty(); }
    /// Requires all edges directed and acyclic.
    Dag to_dag() const;

    static NamedGraph from_dag(const Dag& dag, std::vector<std::string> names = {});
    static NamedGraph from_cpdag(const Cpdag& g, std::vector<std::string> names = {});
};

/// {"nodes": [...], "directed": [[a,b],...], "undirected": [[a,b],...]}
std::string graph_to_json(const NamedGraph& g);
NamedGraph graph_from_json(const std::string& text);

/// One edge per line, "a -> b" for directed and "a -- b" for undirected.
std::string graph_to_edge_list(const NamedGraph& g);
NamedGraph graph_from_edge_list(const std::string& text);

NamedGraph read_graph_file(const std::string& path);
void write_graph_file(const NamedGraph& g, const std::string& path);

std::vector<std::string> default_node_names(int n);

}  // namespace loadisc
