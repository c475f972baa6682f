#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "loadisc/citest.hpp"
#include "loadisc/graph.hpp"
#include "loadisc/simulate.hpp"

namespace loadisc {

/// Coefficient of t in the least-squares regression of o on {t} + z with an
/// intercept.
double ols_effect(const Dataset& data, NodeId t, NodeId o, const std::vector<NodeId>& z);

/// Same regression with the coefficient's standard error.
std::pair<double, double> ols_effect_with_se(const Dataset& data, NodeId t, NodeId o,
                                             const std::vector<NodeId>& z);

/// Population regression coefficient of t from the covariance matrix; equals
/// the total effect for any valid adjustment set.
double population_effect(const Eigen::MatrixXd& sigma, NodeId t, NodeId o,
                         const std::vector<NodeId>& z);

/// (o, t) entry of (I - B)^-1 for a linear model.
double true_total_effect(const Scm& scm, NodeId t, NodeId o);

/// var(o | t, z) / var(t | z) from Schur complements of sigma.
double asymptotic_variance(const Eigen::MatrixXd& sigma, NodeId t, NodeId o,
                           const std::vector<NodeId>& z);

/// Half the sum over both orderings of the mean absolute error between the
/// true effect and each member of the estimate set.
double intervention_distance(const std::vector<double>& est_xy, const std::vector<double>& est_yx,
                             double truth_xy, double truth_yx);

/// Set-overlap F1 with the existence conventions: both absent scores 1,
/// existence disagreement scores 0, two present empty sets score 1.
double f1_oset(const std::optional<std::vector<NodeId>>& estimated,
               const std::optional<std::vector<NodeId>>& truth);

}  // namespace loadisc
