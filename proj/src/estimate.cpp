#include "loadisc/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace loadisc {

namespace {

void check_adjustment_args(int cols, NodeId t, NodeId o, const std::vector<NodeId>& z) {
    if (t < 0 || t >= cols || o < 0 || o >= cols) throw std::out_of_range("target out of range");
    if (t == o) throw std::invalid_argument("t == o");
    for (NodeId v : z) {
        if (v < 0 || v >= cols) throw std::out_of_range("adjustment node out of range");
        if (v == t || v == o) throw std::invalid_argument("target inside adjustment set");
    }
}

}  // namespace

std::pair<double, double> ols_effect_with_se(const Dataset& data, NodeId t, NodeId o,
                                             const std::vector<NodeId>& z) {
    check_adjustment_args(data.cols(), t, o, z);
    const int n = data.rows();
    const int k = static_cast<int>(z.size()) + 2;  // intercept + t + z
    if (n <= k) throw std::invalid_argument("ols_effect: too few rows");
    Eigen::MatrixXd x(n, k);
    Eigen::VectorXd y(n);
    for (int r = 0; r < n; ++r) {
        x(r, 0) = 1.0;
        x(r, 1) = data.value(r, t);
        for (std::size_t j = 0; j < z.size(); ++j) x(r, 2 + static_cast<int>(j)) = data.value(r, z[j]);
        y(r) = data.value(r, o);
    }
    Eigen::MatrixXd xtx = x.transpose() * x;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
    if (!lu.isInvertible()) throw std::runtime_error("ols_effect: rank-deficient design");
    Eigen::VectorXd beta = lu.solve(x.transpose() * y);
    Eigen::VectorXd resid = y - x * beta;
    double sigma2 = resid.squaredNorm() / (n - k);
    double se = std::sqrt(sigma2 * lu.inverse()(1, 1));
    return {beta(1), se};
}

double ols_effect(const Dataset& data, NodeId t, NodeId o, const std::vector<NodeId>& z) {
    return ols_effect_with_se(data, t, o, z).first;
}

double population_effect(const Eigen::MatrixXd& sigma, NodeId t, NodeId o,
                         const std::vector<NodeId>& z) {
    check_adjustment_args(static_cast<int>(sigma.rows()), t, o, z);
    const int k = static_cast<int>(z.size()) + 1;
    Eigen::MatrixXd reg(k, k);
    Eigen::VectorXd cross(k);
    std::vector<NodeId> ix = {t};
    ix.insert(ix.end(), z.begin(), z.end());
    for (int i = 0; i < k; ++i) {
        cross(i) = sigma(o, ix[i]);
        for (int j = 0; j < k; ++j) reg(i, j) = sigma(ix[i], ix[j]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(reg);
    if (!lu.isInvertible()) throw std::runtime_error("population_effect: singular regressor block");
    Eigen::VectorXd beta = lu.solve(cross);
    return beta(0);
}

double true_total_effect(const Scm& scm, NodeId t, NodeId o) {
    return scm.total_effect(t, o);
}

namespace {

double conditional_variance(const Eigen::MatrixXd& sigma, NodeId v, const std::vector<NodeId>& cond) {
    if (cond.empty()) return sigma(v, v);
    const int k = static_cast<int>(cond.size());
    Eigen::MatrixXd block(k, k);
    Eigen::VectorXd cross(k);
    for (int i = 0; i < k; ++i) {
        cross(i) = sigma(v, cond[i]);
        for (int j = 0; j < k; ++j) block(i, j) = sigma(cond[i], cond[j]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(block);
    if (!lu.isInvertible()) throw std::runtime_error("asymptotic_variance: singular conditioning block");
    return sigma(v, v) - cross.dot(lu.solve(cross));
}

}  // namespace

double asymptotic_variance(const Eigen::MatrixXd& sigma, NodeId t, NodeId o,
                           const std::vector<NodeId>& z) {
    check_adjustment_args(static_cast<int>(sigma.rows()), t, o, z);
    std::vector<NodeId> tz = z;
    tz.push_back(t);
    std::sort(tz.begin(), tz.end());
    double num = conditional_variance(sigma, o, tz);
    double den = conditional_variance(sigma, t, z);
    if (den <= 0.0) throw std::runtime_error("asymptotic_variance: non-positive treatment variance");
    return num / den;
}

double intervention_distance(const std::vector<double>& est_xy, const std::vector<double>& est_yx,
                             double truth_xy, double truth_yx) {
    if (est_xy.empty() || est_yx.empty())
        throw std::invalid_argument("intervention_distance: empty estimate set");
    auto mean_abs_err = [](const std::vector<double>& est, double truth) {
        double acc = 0.0;
        for (double e : est) acc += std::abs(truth - e);
        return acc / static_cast<double>(est.size());
    };
    return 0.5 * (mean_abs_err(est_xy, truth_xy) + mean_abs_err(est_yx, truth_yx));
}

double f1_oset(const std::optional<std::vector<NodeId>>& estimated,
               const std::optional<std::vector<NodeId>>& truth) {
    if (!estimated && !truth) return 1.0;
    if (!estimated || !truth) return 0.0;
    if (estimated->empty() && truth->empty()) return 1.0;
    std::vector<NodeId> e = *estimated, t = *truth;
    std::sort(e.begin(), e.end());
    std::sort(t.begin(), t.end());
    std::vector<NodeId> common;
    std::set_intersection(e.begin(), e.end(), t.begin(), t.end(), std::back_inserter(common));
    return 2.0 * static_cast<double>(common.size()) / static_cast<double>(e.size() + t.size());
}

}  // namespace loadisc
