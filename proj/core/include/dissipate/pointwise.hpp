#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "dissipate/linalg.hpp"
#include "dissipate/operator_spec.hpp"

namespace dissipate {

using ComplexVector = std::vector<Complex>;

/// Symmetric and skew parts of Re A and Im A.
struct SymDecomp {
    int n = 0;
    RealMatrix S_r, S_i;
    RealMatrix K_r, K_i;
};

SymDecomp decompose(const ComplexMatrix& A);

/// Complex matrix of the second-order coefficients held by a sample.
ComplexMatrix coefficient_matrix(const CoefficientSample& s);

/// 1e-10 * (1 + trace norm of S_r).
double psd_tolerance(const SymDecomp& d);

/// |p - 2| / (2 sqrt(p - 1)); unchanged under p -> p/(p-1).
double exponent_ratio(double p);

/// True iff S_r + r S_i and S_r - r S_i are both PSD (up to psd_tolerance) with
/// r = exponent_ratio(p), i.e. |p-2| |<S_i xi, xi>| <= 2 sqrt(p-1) <S_r xi, xi> for all real xi.
/// Throws std::invalid_argument for p <= 1.
bool check_p_condition(const SymDecomp& d, double p);

struct LambdaResult {
    double lambda = std::numeric_limits<double>::infinity();
    RealVector witness;  // unit vector; empty when lambda is infinite
};

/// inf <S_r xi, xi> / |<S_i xi, xi>| by bisection on the pencils S_r +- t S_i.
/// Throws NonnegativityViolated if S_r has an eigenvalue below -psd_tolerance.
LambdaResult lambda_of(const SymDecomp& d);

struct PInterval {
    double lambda = std::numeric_limits<double>::infinity();
    double p_min = 1.0;
    double p_max = std::numeric_limits<double>::infinity();
    RealVector witness_xi;

    bool is_unbounded() const noexcept { return !(lambda < std::numeric_limits<double>::infinity()); }
    bool contains(double p, double slack = 0.0) const noexcept {
        if (is_unbounded()) return p > 1.0;
        return p >= p_min - slack && p <= p_max + slack;
    }
};

/// p_min = 2 + 2 lambda (lambda - sqrt(lambda^2 + 1)), p_max = 2 + 2 lambda (lambda + sqrt(lambda^2 + 1)).
/// Infinite lambda yields the sentinel (1, inf). Throws std::invalid_argument for negative lambda.
PInterval p_interval(double lambda);

/// Minimum of the inhomogeneous quadratic Q(xi, eta) over R^{2n}.
struct QuadraticMinimum {
    bool nonnegative = false;
    double hessian_min_eigenvalue = 0.0;
    double range_residual = 0.0;   // |l - M M^+ l|
    double minimum = 0.0;          // -inf when unbounded below
};

/// Q(xi, eta) = 4/(pp') <S_r xi, xi> + <S_r eta, eta> + 2 <(Im A / p - Im A^t / p') xi, eta>
///            + <Im(b + c), eta> - 2 <Re(alpha b / p - beta c / p'), xi>
///            + Re[div((1 - alpha) b / p - (1 - beta) c / p') - a].
QuadraticMinimum q_minimum(const CoefficientSample& s, double p, double alpha = 0.0, double beta = 0.0);

/// True iff Q >= 0 on all of R^{2n}.
bool q_sufficiency(const CoefficientSample& s, double p, double alpha = 0.0, double beta = 0.0);

enum class ConstReason { ok, p_condition_failed, system_inconsistent, zero_order_positive };

std::string_view to_string(ConstReason r) noexcept;

struct ConstVerdict {
    bool dissipative = false;
    std::optional<RealVector> V;   // least-squares solution of 2 S_r V = -Im b
    double residual = 0.0;         // |S_r V + Im b / 2|
    double zero_order = 0.0;       // Re a + <S_r V, V>
    std::optional<double> inverse_gap;  // 4 Re a + <S_r^{-1} Im b, Im b> when S_r is invertible
    ConstReason reason = ConstReason::ok;
};

/// Verdict for constant coefficients (A symmetrized first). `b` may include a constant c,
/// which enters only through Im(b + c).
ConstVerdict constant_coeff_verdict(const ComplexMatrix& A, const ComplexVector& b, Complex a, double p);

}  // namespace dissipate
