#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "loadisc/graph.hpp"

namespace loadisc {

/// Raised when a query needs more data than the tester can support
/// (conditioning set too large for the sample or the cell budget).
class QueryTooLargeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Canonical symmetric query: x < y, conditioning set sorted, targets not in it.
struct CiQuery {
    NodeId x, y;
    std::vector<NodeId> s;

    CiQuery(NodeId a, NodeId b, std::vector<NodeId> cond);
    bool operator==(const CiQuery&) const = default;
};

struct CiQueryHash {
    std::size_t operator()(const CiQuery& q) const;
};

struct TestStats {
    long long executed = 0;
    long long cache_hits = 0;
};

class CiTester {
public:
    virtual ~CiTester() = default;
    virtual bool independent(const CiQuery& q) = 0;
    virtual int num_vars() const = 0;
    virtual TestStats stats() const = 0;
    virtual void reset_stats() = 0;

    bool independent(NodeId x, NodeId y, const std::vector<NodeId>& s) {
        return independent(CiQuery(x, y, s));
    }
};

enum class ColumnKind { Continuous, Discrete };

/// Column-major numeric matrix with named columns. Discrete columns hold
/// integer codes 0..arity-1.
class Dataset {
public:
    Dataset(int rows, std::vector<std::string> names, ColumnKind kind);

    int rows() const { return rows_; }
    int cols() const { return static_cast<int>(names_.size()); }
    ColumnKind kind() const { return kind_; }
    const std::vector<std::string>& names() const { return names_; }

    double value(int row, int col) const { return data_[static_cast<std::size_t>(col) * rows_ + row]; }
    void set_value(int row, int col, double v) { data_[static_cast<std::size_t>(col) * rows_ + row] = v; }
    const double* column(int col) const { return data_.data() + static_cast<std::size_t>(col) * rows_; }

    int arity(int col) const;
    void set_arity(int col, int a);

    std::string to_csv() const;
    static Dataset from_csv(const std::string& text, ColumnKind declared);
    /// Infers Discrete when every value in every column is a small non-negative
    /// integer, Continuous otherwise.
    static Dataset from_csv_inferred(const std::string& text);

private:
    int rows_ = 0;
    ColumnKind kind_ = ColumnKind::Continuous;
    std::vector<std::string> names_;
    std::vector<double> data_;
    std::vector<int> arities_;
};

/// Exact tester backed by d-separation in the given DAG.
std::unique_ptr<CiTester> dsep_tester(const Dag& dag);

/// Partial-correlation test on continuous data; the covariance matrix is
/// computed once at construction.
std::unique_ptr<CiTester> fisher_z_tester(const Dataset& data, double alpha);

/// G^2 likelihood-ratio test on discrete data. max_cells bounds the size of
/// the stratified contingency table a single query may build.
std::unique_ptr<CiTester> g_square_tester(const Dataset& data, double alpha,
                                          std::int64_t max_cells = 1 << 22);

/// Memoizes canonical queries; repeated queries are answered from cache and
/// counted separately from executed ones.
std::unique_ptr<CiTester> caching_wrapper(std::unique_ptr<CiTester> inner);

/// Fisher-Z statistic for a given partial correlation, sample size and
/// conditioning-set size.
double fisher_z_statistic(double rho, int n_rows, int cond_size);

/// G^2 statistic and degrees of freedom for a 2-way table (counts[i][j]).
std::pair<double, int> g_square_table(const std::vector<std::vector<long long>>& counts);

}  // namespace loadisc
