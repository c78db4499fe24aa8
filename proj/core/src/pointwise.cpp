#include "dissipate/pointwise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dissipate/errors.hpp"

namespace dissipate {

namespace {

void require_exponent(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("exponent p must be a finite number > 1");
}

RealMatrix combine(const RealMatrix& a, double t, const RealMatrix& b) { return a + t * b; }

bool pencil_psd(const SymDecomp& d, double t, double tol) {
    if (d.n == 0) return true;
    return min_eigenvalue(combine(d.S_r, t, d.S_i)) >= -tol &&
           min_eigenvalue(combine(d.S_r, -t, d.S_i)) >= -tol;
}

}  // namespace

SymDecomp decompose(const ComplexMatrix& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("decompose: matrix must be square");
    const std::size_t n = A.rows();
    SymDecomp d;
    d.n = static_cast<int>(n);
    d.S_r = d.S_i = d.K_r = d.K_i = RealMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const Complex aij = A(i, j);
            const Complex aji = A(j, i);
            d.S_r(i, j) = 0.5 * (aij.real() + aji.real());
            d.K_r(i, j) = 0.5 * (aij.real() - aji.real());
            d.S_i(i, j) = 0.5 * (aij.imag() + aji.imag());
            d.K_i(i, j) = 0.5 * (aij.imag() - aji.imag());
        }
    }
    return d;
}

ComplexMatrix coefficient_matrix(const CoefficientSample& s) {
    const auto n = static_cast<std::size_t>(s.n());
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = s.A[i * n + j];
    return m;
}

double psd_tolerance(const SymDecomp& d) { return 1e-10 * (1.0 + (d.n > 0 ? trace_norm(d.S_r) : 0.0)); }

double exponent_ratio(double p) {
    require_exponent(p);
    return std::abs(p - 2.0) / (2.0 * std::sqrt(p - 1.0));
}

bool check_p_condition(const SymDecomp& d, double p) {
    // Dividing by 2 sqrt(p-1) keeps the test literally symmetric under p -> p'.
    return pencil_psd(d, exponent_ratio(p), psd_tolerance(d));
}

LambdaResult lambda_of(const SymDecomp& d) {
    LambdaResult out;
    if (d.n == 0) return out;
    const double tol = psd_tolerance(d);
    const double sr_min = min_eigenvalue(d.S_r);
    if (sr_min < -tol) throw NonnegativityViolated(sr_min);

    const double scale = 1.0 + frobenius_norm(d.S_r);
    if (frobenius_norm(d.S_i) <= 1e-14 * scale) return out;

    const double strict = 1e-14 * scale;
    double lo = 0.0;
    double hi = 1.0;
    while (pencil_psd(d, hi, strict)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 0x1p60) return out;
    }
    for (int it = 0; it < 4000 && hi - lo > 1e-12 * hi + 1e-300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (pencil_psd(d, mid, strict))
            lo = mid;
        else
            hi = mid;
    }
    out.lambda = lo;

    // The pencil that fails first just above lambda carries the extremal direction.
    const SymmetricEigen plus = jacobi_eigen(combine(d.S_r, hi, d.S_i));
    const SymmetricEigen minus = jacobi_eigen(combine(d.S_r, -hi, d.S_i));
    const SymmetricEigen& bind = plus.values.front() <= minus.values.front() ? plus : minus;
    out.witness.resize(static_cast<std::size_t>(d.n));
    for (std::size_t k = 0; k < out.witness.size(); ++k) out.witness[k] = bind.vectors(k, 0);
    return out;
}

PInterval p_interval(double lambda) {
    if (std::isnan(lambda) || lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
    PInterval iv;
    iv.lambda = lambda;
    if (std::isinf(lambda)) return iv;
    // q = (lambda + sqrt(lambda^2+1))^2 gives p_max = 1 + q and p_min = 1 + 1/q without cancellation.
    const double root = lambda + std::hypot(lambda, 1.0);
    const double q = root * root;
    iv.p_max = 1.0 + q;
    iv.p_min = 1.0 + 1.0 / q;
    return iv;
}

QuadraticMinimum q_minimum(const CoefficientSample& s, double p, double alpha, double beta) {
    require_exponent(p);
    const double pc = p / (p - 1.0);
    const auto n = static_cast<std::size_t>(s.n());
    const SymDecomp d = decompose(coefficient_matrix(s));

    RealMatrix im_a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) im_a(i, j) = s.A[i * n + j].imag();

    // Q(z) = z^t M z + l.z + k with z = (xi, eta).
    RealMatrix m(2 * n, 2 * n);
    const double w = 4.0 / (p * pc);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m(i, j) = w * d.S_r(i, j);
            m(n + i, n + j) = d.S_r(i, j);
            const double bij = im_a(i, j) / p - im_a(j, i) / pc;  // eta_i B_ij xi_j
            m(n + i, j) = bij;
            m(j, n + i) = bij;
        }
    }
    RealVector l(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        l[k] = -2.0 * (alpha * s.b[k].real() / p - beta * s.c[k].real() / pc);
        l[n + k] = s.b[k].imag() + s.c[k].imag();
    }
    const double k0 = (1.0 - alpha) * s.div_b.real() / p - (1.0 - beta) * s.div_c.real() / pc - s.a.real();

    QuadraticMinimum out;
    const double scale = 1.0 + trace_norm(m);
    const double tol = 1e-10 * scale;
    out.hessian_min_eigenvalue = min_eigenvalue(m);
    const RealMatrix pinv = symmetric_pseudo_inverse(m, 1e-12);
    const RealVector y = matvec(pinv, l);
    const RealVector proj = matvec(m, y);
    RealVector r(l.size());
    for (std::size_t k = 0; k < l.size(); ++k) r[k] = l[k] - proj[k];
    out.range_residual = norm2(r);

    const double lnorm = norm2(l);
    if (out.hessian_min_eigenvalue < -tol) {
        out.minimum = -std::numeric_limits<double>::infinity();
        return out;
    }
    if (out.range_residual > 1e-8 * (1.0 + lnorm)) {
        out.minimum = -std::numeric_limits<double>::infinity();
        return out;
    }
    out.minimum = k0 - 0.25 * dot(l, y);
    out.nonnegative = out.minimum >= -1e-10 * (1.0 + std::abs(k0) + 0.25 * std::abs(dot(l, y)));
    return out;
}

bool q_sufficiency(const CoefficientSample& s, double p, double alpha, double beta) {
    return q_minimum(s, p, alpha, beta).nonnegative;
}

std::string_view to_string(ConstReason r) noexcept {
    switch (r) {
        case ConstReason::ok: return "ok";
        case ConstReason::p_condition_failed: return "p_condition_failed";
        case ConstReason::system_inconsistent: return "system_inconsistent";
        case ConstReason::zero_order_positive: return "zero_order_positive";
    }
    return "ok";
}

ConstVerdict constant_coeff_verdict(const ComplexMatrix& A, const ComplexVector& b, Complex a, double p) {
    require_exponent(p);
    const std::size_t n = A.rows();
    if (A.cols() != n || b.size() != n) throw std::invalid_argument("constant_coeff_verdict: dimension mismatch");

    ComplexMatrix sym(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sym(i, j) = 0.5 * (A(i, j) + A(j, i));
    const SymDecomp d = decompose(sym);

    ConstVerdict out;
    RealVector im_b(n);
    for (std::size_t k = 0; k < n; ++k) im_b[k] = b[k].imag();
    const double bnorm = norm2(im_b);

    const RealMatrix pinv = symmetric_pseudo_inverse(d.S_r, 1e-12);
    RealVector v = matvec(pinv, im_b);
    for (double& x : v) x *= -0.5;
    const RealVector srv = matvec(d.S_r, v);
    double res2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) res2 += (srv[k] + 0.5 * im_b[k]) * (srv[k] + 0.5 * im_b[k]);
    out.residual = std::sqrt(res2);
    out.V = v;
    const double quad = dot(srv, v);
    out.zero_order = a.real() + quad;

    const SymmetricEigen eig = jacobi_eigen(d.S_r);
    double top = 0.0;
    for (double e : eig.values) top = std::max(top, std::abs(e));
    if (n > 0 && eig.values.front() > 1e-12 * std::max(top, 1.0)) {
        // S_r^+ is the inverse here.
        out.inverse_gap = 4.0 * a.real() + dot(matvec(pinv, im_b), im_b);
    }

    const double tol_zero = 1e-10 * (1.0 + std::abs(a.real()) + std::abs(quad));
    if (!check_p_condition(d, p)) {
        out.reason = ConstReason::p_condition_failed;
    } else if (out.residual > 1e-8 * (1.0 + bnorm)) {
        out.reason = ConstReason::system_inconsistent;
    } else if (out.zero_order > tol_zero) {
        out.reason = ConstReason::zero_order_positive;
    } else {
        out.reason = ConstReason::ok;
        out.dissipative = true;
    }
    return out;
}

}  // namespace dissipate
