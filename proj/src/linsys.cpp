#include "crmsfem/linsys.hpp"

#include <cmath>
#include <fstream>
#include <memory>

#include <Eigen/SparseLU>

#include "crmsfem/errors.hpp"

namespace crmsfem {

namespace {

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
}

std::vector<double> from_eigen(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

double CompressedMatrix::asymmetry() const {
    Eigen::SparseMatrix<double> d = mat - Eigen::SparseMatrix<double>(mat.transpose());
    double m = 0.0;
    for (int k = 0; k < d.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it)
            m = std::max(m, std::abs(it.value()));
    return m;
}

double CompressedMatrix::max_abs() const {
    double m = 0.0;
    for (int k = 0; k < mat.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(mat, k); it; ++it)
            m = std::max(m, std::abs(it.value()));
    return m;
}

void CompressedMatrix::dump_matrix_market(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << mat.rows() << " " << mat.cols() << " " << mat.nonZeros() << "\n";
    out.precision(17);
    for (int k = 0; k < mat.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(mat, k); it; ++it)
            out << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

CompressedMatrix compress(const TripletBuffer& buf, bool symmetric) {
    CompressedMatrix out;
    out.mat.resize(buf.rows(), buf.cols());
    out.mat.setFromTriplets(buf.entries().begin(), buf.entries().end());
    out.mat.makeCompressed();
    out.symmetric = symmetric;
    if (symmetric) {
        const double scale = out.max_abs();
        if (out.asymmetry() > 1e-12 * std::max(scale, 1.0))
            throw ValidationError("compress: matrix flagged symmetric is not");
    }
    return out;
}

struct SparseFactorization::Impl {
    Eigen::SparseMatrix<double> A;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

SparseFactorization::SparseFactorization(const CompressedMatrix& A)
    : impl_(std::make_unique<Impl>()) {
    if (A.rows() != A.cols()) throw ValidationError("solve_direct: matrix not square");
    impl_->A = A.mat;
    impl_->lu.compute(impl_->A);
    if (impl_->lu.info() != Eigen::Success)
        throw SingularMatrix("sparse LU factorization failed (singular system?)");
}

SparseFactorization::~SparseFactorization() = default;
SparseFactorization::SparseFactorization(SparseFactorization&&) noexcept = default;
SparseFactorization& SparseFactorization::operator=(SparseFactorization&&) noexcept = default;

std::vector<double> SparseFactorization::solve(const std::vector<double>& b) const {
    Eigen::VectorXd x = impl_->lu.solve(to_eigen(b));
    if (impl_->lu.info() != Eigen::Success)
        throw SingularMatrix("sparse LU solve failed");
    return from_eigen(x);
}

double SparseFactorization::residual(const std::vector<double>& b,
                                     const std::vector<double>& x) const {
    Eigen::VectorXd be = to_eigen(b);
    Eigen::VectorXd r = impl_->A * to_eigen(x) - be;
    return r.norm() / std::max(be.norm(), 1.0);
}

std::pair<std::vector<double>, SolveReport> solve_direct(const CompressedMatrix& A,
                                                         const std::vector<double>& b) {
    SparseFactorization fact(A);
    std::vector<double> x = fact.solve(b);
    SolveReport report;
    report.factorization_ok = true;
    report.residual_norm = fact.residual(b, x);
    return {std::move(x), report};
}

std::vector<double> dense_oracle_solve(std::vector<double> A, std::vector<double> b) {
    const std::size_t n = b.size();
    if (A.size() != n * n) throw ValidationError("dense_oracle_solve: dimension mismatch");
    std::vector<int> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<int>(i);

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        double best = std::abs(A[perm[k] * n + k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(A[perm[i] * n + k]);
            if (v > best) {
                best = v;
                pivot = i;
            }
        }
        if (best == 0.0) throw SingularMatrix("dense_oracle_solve: zero pivot");
        std::swap(perm[k], perm[pivot]);
        const double akk = A[perm[k] * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = A[perm[i] * n + k] / akk;
            A[perm[i] * n + k] = m;
            for (std::size_t j = k + 1; j < n; ++j)
                A[perm[i] * n + j] -= m * A[perm[k] * n + j];
        }
    }

    std::vector<double> y(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[perm[i]];
        for (std::size_t j = 0; j < i; ++j) s -= A[perm[i] * n + j] * y[j];
        y[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= A[perm[ii] * n + j] * x[j];
        x[ii] = s / A[perm[ii] * n + ii];
    }
    return x;
}

std::vector<double> to_dense(const CompressedMatrix& A) {
    std::vector<double> d(static_cast<std::size_t>(A.rows()) * A.cols(), 0.0);
    for (int k = 0; k < A.mat.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A.mat, k); it; ++it)
            d[static_cast<std::size_t>(it.row()) * A.cols() + it.col()] += it.value();
    return d;
}

}  // namespace crmsfem
