#include "loadisc/citest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

namespace loadisc {

CiQuery::CiQuery(NodeId a, NodeId b, std::vector<NodeId> cond) : x(a), y(b), s(std::move(cond)) {
    if (x == y) throw std::invalid_argument("CiQuery: x == y");
    if (x > y) std::swap(x, y);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (NodeId v : s)
        if (v == x || v == y) throw std::invalid_argument("CiQuery: target in conditioning set");
}

std::size_t CiQueryHash::operator()(const CiQuery& q) const {
    std::size_t h = std::hash<NodeId>()(q.x);
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    mix(std::hash<NodeId>()(q.y));
    for (NodeId v : q.s) mix(std::hash<NodeId>()(v));
    return h;
}

Dataset::Dataset(int rows, std::vector<std::string> names, ColumnKind kind)
    : rows_(rows), kind_(kind), names_(std::move(names)) {
    if (rows < 0) throw std::invalid_argument("Dataset: negative row count");
    data_.assign(static_cast<std::size_t>(rows_) * names_.size(), 0.0);
    arities_.assign(names_.size(), 0);
}

int Dataset::arity(int col) const {
    if (kind_ != ColumnKind::Discrete) throw std::logic_error("arity of continuous column");
    return arities_[col];
}

void Dataset::set_arity(int col, int a) {
    if (a < 2) throw std::invalid_argument("Dataset: arity must be at least 2");
    arities_[col] = a;
}

std::string Dataset::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    for (int c = 0; c < cols(); ++c) os << (c ? "," : "") << names_[c];
    os << "\n";
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols(); ++c) {
            if (c) os << ",";
            if (kind_ == ColumnKind::Discrete)
                os << static_cast<long long>(value(r, c));
            else
                os << value(r, c);
        }
        os << "\n";
    }
    return os.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        out.push_back(field);
    }
    return out;
}

}  // namespace

Dataset Dataset::from_csv(const std::string& text, ColumnKind declared) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("CSV: empty input");
    auto names = split_csv_line(line);
    std::vector<std::vector<double>> cols(names.size());
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != names.size()) throw std::invalid_argument("CSV: ragged row");
        for (std::size_t c = 0; c < fields.size(); ++c) cols[c].push_back(std::stod(fields[c]));
    }
    int rows = cols.empty() ? 0 : static_cast<int>(cols[0].size());
    Dataset d(rows, names, declared);
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (int r = 0; r < rows; ++r) d.set_value(r, static_cast<int>(c), cols[c][r]);
    if (declared == ColumnKind::Discrete) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            double mx = 1;
            for (double v : cols[c]) {
                if (v < 0 || v != std::floor(v))
                    throw std::invalid_argument("CSV: non-integer value in discrete column " + names[c]);
                mx = std::max(mx, v);
            }
            d.set_arity(static_cast<int>(c), static_cast<int>(mx) + 1);
        }
    }
    return d;
}

Dataset Dataset::from_csv_inferred(const std::string& text) {
    auto cont = from_csv(text, ColumnKind::Continuous);
    for (int c = 0; c < cont.cols(); ++c)
        for (int r = 0; r < cont.rows(); ++r) {
            double v = cont.value(r, c);
            if (v < 0 || v > 64 || v != std::floor(v)) return cont;
        }
    return from_csv(text, ColumnKind::Discrete);
}

namespace {

class DsepTester final : public CiTester {
public:
    explicit DsepTester(Dag dag) : dag_(std::move(dag)) {}

    bool independent(const CiQuery& q) override {
        ++stats_.executed;
        return d_separated(dag_, q.x, q.y, q.s);
    }
    int num_vars() const override { return dag_.num_nodes(); }
    TestStats stats() const override { return stats_; }
    void reset_stats() override { stats_ = {}; }

private:
    Dag dag_;
    TestStats stats_;
};

class FisherZTester final : public CiTester {
public:
    FisherZTester(const Dataset& data, double alpha) : n_(data.cols()), rows_(data.rows()), alpha_(alpha) {
        if (data.kind() != ColumnKind::Continuous)
            throw std::invalid_argument("fisher_z_tester: continuous data required");
        Eigen::MatrixXd x(rows_, n_);
        for (int c = 0; c < n_; ++c)
            for (int r = 0; r < rows_; ++r) x(r, c) = data.value(r, c);
        Eigen::RowVectorXd mean = x.colwise().mean();
        x.rowwise() -= mean;
        cov_ = (x.transpose() * x) / std::max(1, rows_ - 1);
    }

    bool independent(const CiQuery& q) override {
        ++stats_.executed;
        const int k = static_cast<int>(q.s.size());
        if (rows_ <= k + 3)
            throw QueryTooLargeError("fisher_z: conditioning set too large for sample size");
        Eigen::MatrixXd sub(k + 2, k + 2);
        std::vector<NodeId> ix = {q.x, q.y};
        ix.insert(ix.end(), q.s.begin(), q.s.end());
        for (int i = 0; i < k + 2; ++i)
            for (int j = 0; j < k + 2; ++j) sub(i, j) = cov_(ix[i], ix[j]);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
        if (!lu.isInvertible()) {
            // Deterministic linear dependence; report dependent.
            ++singular_;
            return false;
        }
        Eigen::MatrixXd prec = lu.inverse();
        double rho = -prec(0, 1) / std::sqrt(prec(0, 0) * prec(1, 1));
        double z = fisher_z_statistic(rho, rows_, k);
        if (!std::isfinite(z)) {
            ++singular_;
            return false;
        }
        double p = std::erfc(std::abs(z) / std::sqrt(2.0));
        return p > alpha_;
    }

    int num_vars() const override { return n_; }
    TestStats stats() const override { return stats_; }
    void reset_stats() override { stats_ = {}; }
    long long singular_queries() const { return singular_; }

private:
    int n_, rows_;
    double alpha_;
    Eigen::MatrixXd cov_;
    TestStats stats_;
    long long singular_ = 0;
};

class GSquareTester final : public CiTester {
public:
    GSquareTester(const Dataset& data, double alpha, std::int64_t max_cells)
        : data_(data), alpha_(alpha), max_cells_(max_cells) {
        if (data.kind() != ColumnKind::Discrete)
            throw std::invalid_argument("g_square_tester: discrete data required");
    }

    bool independent(const CiQuery& q) override {
        ++stats_.executed;
        const int rx = data_.arity(q.x);
        const int ry = data_.arity(q.y);
        std::int64_t strata = 1;
        for (NodeId v : q.s) {
            strata *= data_.arity(v);
            if (strata * rx * ry > max_cells_)
                throw QueryTooLargeError("g_square: contingency table exceeds cell budget");
        }
        std::vector<long long> counts(static_cast<std::size_t>(strata) * rx * ry, 0);
        for (int r = 0; r < data_.rows(); ++r) {
            std::int64_t stratum = 0;
            for (NodeId v : q.s) stratum = stratum * data_.arity(v) + static_cast<int>(data_.value(r, v));
            int xv = static_cast<int>(data_.value(r, q.x));
            int yv = static_cast<int>(data_.value(r, q.y));
            ++counts[(static_cast<std::size_t>(stratum) * rx + xv) * ry + yv];
        }

        double g2 = 0.0;
        long long df = 0;
        std::vector<long long> rowsum(rx), colsum(ry);
        for (std::int64_t k = 0; k < strata; ++k) {
            const long long* cell = counts.data() + static_cast<std::size_t>(k) * rx * ry;
            long long total = 0;
            std::fill(rowsum.begin(), rowsum.end(), 0);
            std::fill(colsum.begin(), colsum.end(), 0);
            for (int i = 0; i < rx; ++i)
                for (int j = 0; j < ry; ++j) {
                    rowsum[i] += cell[i * ry + j];
                    colsum[j] += cell[i * ry + j];
                    total += cell[i * ry + j];
                }
            if (total == 0) continue;
            int zero_rows = static_cast<int>(std::count(rowsum.begin(), rowsum.end(), 0));
            int zero_cols = static_cast<int>(std::count(colsum.begin(), colsum.end(), 0));
            df += std::max(0, rx - 1 - zero_rows) * static_cast<long long>(std::max(0, ry - 1 - zero_cols));
            for (int i = 0; i < rx; ++i)
                for (int j = 0; j < ry; ++j) {
                    long long o = cell[i * ry + j];
                    if (o == 0) continue;
                    double expected = static_cast<double>(rowsum[i]) * colsum[j] / total;
                    g2 += 2.0 * o * std::log(o / expected);
                }
        }
        if (df <= 0) return true;
        boost::math::chi_squared chi(static_cast<double>(df));
        double p = boost::math::cdf(boost::math::complement(chi, std::max(0.0, g2)));
        return p > alpha_;
    }

    int num_vars() const override { return data_.cols(); }
    TestStats stats() const override { return stats_; }
    void reset_stats() override { stats_ = {}; }

private:
    Dataset data_;
    double alpha_;
    std::int64_t max_cells_;
    TestStats stats_;
};

class CachingTester final : public CiTester {
public:
    explicit CachingTester(std::unique_ptr<CiTester> inner) : inner_(std::move(inner)) {}

    bool independent(const CiQuery& q) override {
        auto it = cache_.find(q);
        if (it != cache_.end()) {
            ++stats_.cache_hits;
            return it->second;
        }
        bool result = inner_->independent(q);
        ++stats_.executed;
        cache_.emplace(q, result);
        return result;
    }

    int num_vars() const override { return inner_->num_vars(); }
    TestStats stats() const override { return stats_; }
    void reset_stats() override {
        stats_ = {};
        cache_.clear();
        inner_->reset_stats();
    }

private:
    std::unique_ptr<CiTester> inner_;
    std::unordered_map<CiQuery, bool, CiQueryHash> cache_;
    TestStats stats_;
};

}  // namespace

double fisher_z_statistic(double rho, int n_rows, int cond_size) {
    rho = std::clamp(rho, -1.0, 1.0);
    if (std::abs(rho) >= 1.0 - 1e-14) return std::numeric_limits<double>::infinity();
    double scale = std::sqrt(std::max(0.0, static_cast<double>(n_rows) - cond_size - 3.0));
    return scale * 0.5 * std::log((1.0 + rho) / (1.0 - rho));
}

std::pair<double, int> g_square_table(const std::vector<std::vector<long long>>& counts) {
    const int rx = static_cast<int>(counts.size());
    const int ry = rx ? static_cast<int>(counts[0].size()) : 0;
    long long total = 0;
    std::vector<long long> rowsum(rx, 0), colsum(ry, 0);
    for (int i = 0; i < rx; ++i)
        for (int j = 0; j < ry; ++j) {
            rowsum[i] += counts[i][j];
            colsum[j] += counts[i][j];
            total += counts[i][j];
        }
    double g2 = 0.0;
    for (int i = 0; i < rx; ++i)
        for (int j = 0; j < ry; ++j) {
            if (counts[i][j] == 0 || total == 0) continue;
            double expected = static_cast<double>(rowsum[i]) * colsum[j] / total;
            g2 += 2.0 * counts[i][j] * std::log(counts[i][j] / expected);
        }
    int zero_rows = static_cast<int>(std::count(rowsum.begin(), rowsum.end(), 0));
    int zero_cols = static_cast<int>(std::count(colsum.begin(), colsum.end(), 0));
    int df = std::max(0, rx - 1 - zero_rows) * std::max(0, ry - 1 - zero_cols);
    return {g2, df};
}

std::unique_ptr<CiTester> dsep_tester(const Dag& dag) {
    return std::make_unique<DsepTester>(dag);
}

std::unique_ptr<CiTester> fisher_z_tester(const Dataset& data, double alpha) {
    return std::make_unique<FisherZTester>(data, alpha);
}

std::unique_ptr<CiTester> g_square_tester(const Dataset& data, double alpha, std::int64_t max_cells) {
    return std::make_unique<GSquareTester>(data, alpha, max_cells);
}

std::unique_ptr<CiTester> caching_wrapper(std::unique_ptr<CiTester> inner) {
    return std::make_unique<CachingTester>(std::move(inner));
}

}  // namespace loadisc
