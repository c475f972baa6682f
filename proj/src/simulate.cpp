#include "loadisc/simulate.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "loadisc/graph_io.hpp"

namespace loadisc {

RngSeed derive_seed(RngSeed seed, std::uint64_t stream) {
    // splitmix64 over the combined value
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Scm Scm::linear_gaussian(Dag dag, RngSeed seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(0.5, 3.0);
    std::map<Edge, double> w;
    for (const auto& e : dag.edges()) {
        double m = mag(rng);
        bool neg = (rng() & 1) != 0;
        w[e] = neg ? -m : m;
    }
    return linear_gaussian(std::move(dag), std::move(w));
}

Scm Scm::linear_gaussian(Dag dag, std::map<Edge, double> weights) {
    for (const auto& [e, w] : weights) {
        if (!dag.has_edge(e.first, e.second))
            throw std::invalid_argument("Scm: weight for a non-edge");
        double m = std::abs(w);
        if (m < 0.5 - 1e-12 || m > 3.0 + 1e-12)
            throw std::invalid_argument("Scm: |weight| outside [0.5, 3]");
    }
    if (weights.size() != static_cast<std::size_t>(dag.num_edges()))
        throw std::invalid_argument("Scm: missing edge weight");
    Scm s;
    s.kind_ = ScmKind::LinearGaussian;
    s.dag_ = std::move(dag);
    s.weights_ = std::move(weights);
    return s;
}

Scm Scm::binary_cpt(Dag dag, RngSeed seed, int max_parents) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::vector<double>> tables(dag.num_nodes());
    for (NodeId v = 0; v < dag.num_nodes(); ++v) {
        int k = static_cast<int>(dag.parents(v).size());
        if (k > max_parents)
            throw std::invalid_argument("Scm: node has too many parents for a CPT");
        tables[v].resize(std::size_t{1} << k);
        for (auto& p : tables[v]) p = unif(rng);
    }
    return binary_cpt(std::move(dag), std::move(tables));
}

Scm Scm::binary_cpt(Dag dag, std::vector<std::vector<double>> tables) {
    if (tables.size() != static_cast<std::size_t>(dag.num_nodes()))
        throw std::invalid_argument("Scm: one CPT per node required");
    for (NodeId v = 0; v < dag.num_nodes(); ++v) {
        std::size_t want = std::size_t{1} << dag.parents(v).size();
        if (tables[v].size() != want) throw std::invalid_argument("Scm: CPT size mismatch");
        for (double p : tables[v])
            if (p < 0.0 || p > 1.0) throw std::invalid_argument("Scm: CPT probability outside [0,1]");
    }
    Scm s;
    s.kind_ = ScmKind::BinaryCpt;
    s.dag_ = std::move(dag);
    s.tables_ = std::move(tables);
    return s;
}

double Scm::weight(NodeId parent, NodeId child) const {
    auto it = weights_.find({parent, child});
    if (it == weights_.end()) throw std::invalid_argument("Scm: no such edge weight");
    return it->second;
}

double Scm::cpt(NodeId v, std::uint32_t parent_bits) const {
    return tables_.at(v).at(parent_bits);
}

Eigen::MatrixXd Scm::implied_covariance() const {
    if (kind_ != ScmKind::LinearGaussian) throw std::logic_error("implied_covariance: linear model required");
    const int n = dag_.num_nodes();
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [e, w] : weights_) b(e.second, e.first) = w;
    Eigen::MatrixXd m = (Eigen::MatrixXd::Identity(n, n) - b).inverse();
    return m * m.transpose();
}

double Scm::total_effect(NodeId t, NodeId o) const {
    if (kind_ != ScmKind::LinearGaussian) throw std::logic_error("total_effect: linear model required");
    const int n = dag_.num_nodes();
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [e, w] : weights_) b(e.second, e.first) = w;
    Eigen::MatrixXd m = (Eigen::MatrixXd::Identity(n, n) - b).inverse();
    return m(o, t);
}

Dag random_dag(int n, double expected_degree, int max_degree, RngSeed seed, int max_retries,
               int* attempts) {
    if (n < 2) throw std::invalid_argument("random_dag: need at least two nodes");
    if (expected_degree > max_degree)
        throw std::invalid_argument("random_dag: expected degree exceeds the cap");
    const double p = std::min(1.0, expected_degree / (n - 1));
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        if (attempts) *attempts = attempt + 1;
        std::mt19937_64 rng(derive_seed(seed, 0x1000 + attempt));
        std::vector<NodeId> order(n);
        for (NodeId v = 0; v < n; ++v) order[v] = v;
        std::shuffle(order.begin(), order.end(), rng);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<Edge> edges;
        std::vector<int> degree(n, 0);
        bool over = false;
        for (int i = 0; i < n && !over; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (unif(rng) < p) {
                    edges.emplace_back(order[i], order[j]);
                    if (++degree[order[i]] > max_degree || ++degree[order[j]] > max_degree) {
                        over = true;
                        break;
                    }
                }
            }
        }
        if (!over) return Dag(n, edges);
    }
    throw std::runtime_error(
        "random_dag: degree cap violated in every draw; loosen expected_degree or max_degree");
}

Dataset sample_linear_gaussian(const Scm& scm, int rows, RngSeed seed) {
    if (scm.kind() != ScmKind::LinearGaussian)
        throw std::invalid_argument("sample_linear_gaussian: linear model required");
    const Dag& dag = scm.dag();
    const int n = dag.num_nodes();
    Dataset out(rows, default_node_names(n), ColumnKind::Continuous);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int r = 0; r < rows; ++r) {
        for (NodeId v : dag.topological_order()) {
            double val = noise(rng);
            for (NodeId pa : dag.parents(v)) val += scm.weight(pa, v) * out.value(r, pa);
            out.set_value(r, v, val);
        }
    }
    return out;
}

namespace {

Dataset sample_binary_impl(const Scm& scm, int rows, RngSeed seed,
                           std::optional<std::pair<NodeId, int>> intervention) {
    const Dag& dag = scm.dag();
    const int n = dag.num_nodes();
    Dataset out(rows, default_node_names(n), ColumnKind::Discrete);
    for (int c = 0; c < n; ++c) out.set_arity(c, 2);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int r = 0; r < rows; ++r) {
        for (NodeId v : dag.topological_order()) {
            if (intervention && intervention->first == v) {
                out.set_value(r, v, intervention->second);
                continue;
            }
            std::uint32_t bits = 0;
            for (NodeId pa : dag.parents(v))
                bits = (bits << 1) | (out.value(r, pa) > 0.5 ? 1u : 0u);
            out.set_value(r, v, unif(rng) < scm.cpt(v, bits) ? 1.0 : 0.0);
        }
    }
    return out;
}

}  // namespace

Dataset sample_binary_cpt(const Scm& scm, int rows, RngSeed seed) {
    if (scm.kind() != ScmKind::BinaryCpt)
        throw std::invalid_argument("sample_binary_cpt: binary model required");
    return sample_binary_impl(scm, rows, seed, std::nullopt);
}

Dataset sample_dataset(const Scm& scm, int rows, RngSeed seed) {
    return scm.kind() == ScmKind::LinearGaussian ? sample_linear_gaussian(scm, rows, seed)
                                                 : sample_binary_cpt(scm, rows, seed);
}

double binary_do_effect(const Scm& scm, NodeId t, NodeId o, int rows, RngSeed seed) {
    if (scm.kind() != ScmKind::BinaryCpt)
        throw std::invalid_argument("binary_do_effect: binary model required");
    double mean1 = 0.0, mean0 = 0.0;
    auto d1 = sample_binary_impl(scm, rows, derive_seed(seed, 1), std::make_pair(t, 1));
    auto d0 = sample_binary_impl(scm, rows, derive_seed(seed, 1), std::make_pair(t, 0));
    for (int r = 0; r < rows; ++r) {
        mean1 += d1.value(r, o);
        mean0 += d0.value(r, o);
    }
    return (mean1 - mean0) / rows;
}

std::optional<std::pair<NodeId, NodeId>> sample_target_pair(const Dag& dag, TargetMode mode,
                                                            RngSeed seed) {
    return sample_target_pair(dag, cpdag_from_dag(dag), mode, seed);
}

std::optional<std::pair<NodeId, NodeId>> sample_target_pair(const Dag& dag, const Cpdag& cpdag,
                                                            TargetMode mode, RngSeed seed) {
    std::vector<std::pair<NodeId, NodeId>> pairs;
    const int n = dag.num_nodes();
    for (NodeId x = 0; x < n; ++x) {
        for (NodeId y : explicit_descendants(cpdag, x)) {
            if (y == x) continue;
            if (mode == TargetMode::Identifiable && !is_amenable_global(cpdag, x, y)) continue;
            pairs.emplace_back(x, y);
        }
    }
    if (pairs.empty()) return std::nullopt;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
    return pairs[pick(rng)];
}

}  // namespace loadisc
