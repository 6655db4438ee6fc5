#pragma once

#include <string>
#include <vector>

#include <Eigen/SparseCore>
#include <memory>

namespace crmsfem {

/// Accumulates (row, col, value) contributions; duplicates are summed on
/// compression.
class TripletBuffer {
public:
    TripletBuffer(int n_rows, int n_cols) : n_rows_(n_rows), n_cols_(n_cols) {}

    void add(int row, int col, double value) {
        entries_.emplace_back(row, col, value);
    }

    int rows() const { return n_rows_; }
    int cols() const { return n_cols_; }
    const std::vector<Eigen::Triplet<double>>& entries() const { return entries_; }

private:
    int n_rows_, n_cols_;
    std::vector<Eigen::Triplet<double>> entries_;
};

/// Compressed sparse matrix with canonical (sorted, deduplicated) storage.
struct CompressedMatrix {
    Eigen::SparseMatrix<double> mat;
    bool symmetric = false;

    int rows() const { return static_cast<int>(mat.rows()); }
    int cols() const { return static_cast<int>(mat.cols()); }

    /// max |A - A^T| entrywise; 0 for an empty matrix.
    double asymmetry() const;
    double max_abs() const;

    /// MatrixMarket coordinate format, for debugging.
    void dump_matrix_market(const std::string& path) const;
};

struct SolveReport {
    double residual_norm = 0.0;  // ||Ax - b||_2 / max(||b||_2, 1)
    bool factorization_ok = false;
};

CompressedMatrix compress(const TripletBuffer& buf, bool symmetric = false);

/// Direct sparse LU solve (pivoting suitable for symmetric indefinite
/// saddle-point systems). Throws SingularMatrix on factorization failure.
std::pair<std::vector<double>, SolveReport> solve_direct(const CompressedMatrix& A,
                                                         const std::vector<double>& b);

/// A reusable factorization: one factor, many right-hand sides.
class SparseFactorization {
public:
    explicit SparseFactorization(const CompressedMatrix& A);
    ~SparseFactorization();
    SparseFactorization(SparseFactorization&&) noexcept;
    SparseFactorization& operator=(SparseFactorization&&) noexcept;

    std::vector<double> solve(const std::vector<double>& b) const;
    /// Relative residual of a computed solution.
    double residual(const std::vector<double>& b, const std::vector<double>& x) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Dense LU with partial pivoting, written out longhand so it stays an
/// independent oracle for the sparse path. Row-major n x n matrix.
std::vector<double> dense_oracle_solve(std::vector<double> A, std::vector<double> b);

/// Densify a compressed matrix (test scale only).
std::vector<double> to_dense(const CompressedMatrix& A);

}  // namespace crmsfem
