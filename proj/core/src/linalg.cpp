#include "dissipate/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dissipate {

RealMatrix matmul(const RealMatrix& a, const RealMatrix& b) {
    RealMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

RealVector matvec(const RealMatrix& a, std::span<const double> x) {
    RealVector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double frobenius_norm(const RealMatrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

SymmetricEigen jacobi_eigen(const RealMatrix& s) {
    const std::size_t n = s.rows();
    if (s.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix must be square");
    if (n > 128) throw std::invalid_argument("jacobi_eigen: dimension above 128");

    RealMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (s(i, j) + s(j, i));
    RealMatrix v = RealMatrix::identity(n);

    const double threshold = 1e-14 * frobenius_norm(a);
    auto off_norm = [&] {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) off += a(i, j) * a(i, j);
        return std::sqrt(off);
    };

    for (int sweep = 0; sweep < 100 && off_norm() > threshold; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Symmetric Schur decomposition of the (p, q) 2x2 block.
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    SymmetricEigen out{RealVector(n), RealMatrix(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = v(k, order[j]);
    }
    return out;
}

double min_eigenvalue(const RealMatrix& s) {
    if (s.rows() == 0) return 0.0;
    if (s.rows() == 1) return s(0, 0);
    return jacobi_eigen(s).values.front();
}

double trace_norm(const RealMatrix& s) {
    double sum = 0.0;
    for (double v : jacobi_eigen(s).values) sum += std::abs(v);
    return sum;
}

RealMatrix symmetric_pseudo_inverse(const RealMatrix& s, double rel_cutoff) {
    const std::size_t n = s.rows();
    const SymmetricEigen eig = jacobi_eigen(s);
    double scale = 0.0;
    for (double v : eig.values) scale = std::max(scale, std::abs(v));
    RealMatrix pinv(n, n);
    if (scale == 0.0) return pinv;
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = eig.values[k];
        if (std::abs(lam) <= rel_cutoff * scale) continue;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) pinv(i, j) += eig.vectors(i, k) * eig.vectors(j, k) / lam;
    }
    return pinv;
}

}  // namespace dissipate
