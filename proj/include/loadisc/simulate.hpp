#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "loadisc/citest.hpp"
#include "loadisc/graph.hpp"

namespace loadisc {

using RngSeed = std::uint64_t;

/// Derives an independent substream seed; identical inputs give identical
/// streams.
RngSeed derive_seed(RngSeed seed, std::uint64_t stream);

enum class ScmKind { LinearGaussian, BinaryCpt };

/// Structural model over a DAG: edge weights with unit-variance Gaussian
/// noise, or per-node conditional probability tables over binary values.
class Scm {
public:
    static Scm linear_gaussian(Dag dag, RngSeed seed);
    static Scm linear_gaussian(Dag dag, std::map<Edge, double> weights);
    static Scm binary_cpt(Dag dag, RngSeed seed, int max_parents = 16);
    static Scm binary_cpt(Dag dag, std::vector<std::vector<double>> tables);

    ScmKind kind() const { return kind_; }
    const Dag& dag() const { return dag_; }
    double weight(NodeId parent, NodeId child) const;
    /// P(v = 1 | parent configuration), parents in ascending id order with the
    /// first parent as the most significant bit.
    double cpt(NodeId v, std::uint32_t parent_bits) const;

    /// (I - B)^-1 (I - B)^-T for the linear model.
    Eigen::MatrixXd implied_covariance() const;
    /// Total effect of t on o: the (o, t) entry of (I - B)^-1.
    double total_effect(NodeId t, NodeId o) const;

private:
    Scm() = default;
    ScmKind kind_ = ScmKind::LinearGaussian;
    Dag dag_{0, {}};
    std::map<Edge, double> weights_;
    std::vector<std::vector<double>> tables_;
};

/// Random DAG over a random topological order; each forward pair is included
/// with probability expected_degree / (n - 1). Graphs violating the degree
/// cap are redrawn whole, up to max_retries; `attempts` reports the number of
/// draws used.
Dag random_dag(int n, double expected_degree, int max_degree, RngSeed seed, int max_retries = 1000,
               int* attempts = nullptr);

Dataset sample_linear_gaussian(const Scm& scm, int rows, RngSeed seed);
Dataset sample_binary_cpt(const Scm& scm, int rows, RngSeed seed);
Dataset sample_dataset(const Scm& scm, int rows, RngSeed seed);

enum class TargetMode { ExplicitAncestor, Identifiable };

/// Uniform ordered pair (x, y) with x an explicit ancestor of y in the CPDAG
/// of the DAG; Identifiable additionally requires amenability. Nullopt when
/// no pair qualifies.
std::optional<std::pair<NodeId, NodeId>> sample_target_pair(const Dag& dag, TargetMode mode,
                                                            RngSeed seed);
std::optional<std::pair<NodeId, NodeId>> sample_target_pair(const Dag& dag, const Cpdag& cpdag,
                                                            TargetMode mode, RngSeed seed);

/// Monte-Carlo interventional contrast E[o | do(t=1)] - E[o | do(t=0)] for
/// the binary model, with a fixed sample budget.
double binary_do_effect(const Scm& scm, NodeId t, NodeId o, int rows, RngSeed seed);

}  // namespace loadisc
