#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace dissipate {

/// Small dense row-major matrix. Sizes in this library stay below 2 * 64.
template <class T>
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<const T> data() const noexcept { return data_; }

    DenseMatrix transpose() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) {
        for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] += b.data_[k];
        return a;
    }
    friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) {
        for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] -= b.data_[k];
        return a;
    }
    friend DenseMatrix operator*(T s, DenseMatrix a) {
        for (auto& v : a.data_) v *= s;
        return a;
    }

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using RealMatrix = DenseMatrix<double>;
using ComplexMatrix = DenseMatrix<std::complex<double>>;
using RealVector = std::vector<double>;

RealMatrix matmul(const RealMatrix& a, const RealMatrix& b);
RealVector matvec(const RealMatrix& a, std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double frobenius_norm(const RealMatrix& a);

/// Eigen-decomposition of a symmetric matrix. `values` ascending; column j of `vectors`
/// is the unit eigenvector of values[j].
struct SymmetricEigen {
    RealVector values;
    RealMatrix vectors;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
/// 1e-14 * ||S||_F. Only the symmetric part of `s` is used. Supports n <= 128.
SymmetricEigen jacobi_eigen(const RealMatrix& s);

double min_eigenvalue(const RealMatrix& s);

/// Sum of absolute eigenvalues of a symmetric matrix.
double trace_norm(const RealMatrix& s);

/// Moore-Penrose pseudo-inverse of a symmetric matrix; eigenvalues with
/// |value| <= rel_cutoff * max|value| are treated as zero.
RealMatrix symmetric_pseudo_inverse(const RealMatrix& s, double rel_cutoff = 1e-10);

}  // namespace dissipate
