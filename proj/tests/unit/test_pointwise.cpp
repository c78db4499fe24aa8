#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dissipate/errors.hpp"
#include "dissipate/pointwise.hpp"

using namespace dissipate;

namespace {

constexpr Complex I{0.0, 1.0};

ComplexMatrix cm(std::initializer_list<std::initializer_list<Complex>> rows) {
    ComplexMatrix m(rows.size(), rows.size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (Complex v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

RealMatrix rm(std::initializer_list<std::initializer_list<double>> rows) {
    RealMatrix m(rows.size(), rows.size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

// Random A with PSD symmetric real part (possibly singular) and arbitrary imaginary part.
ComplexMatrix random_coefficients(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g;
    RealMatrix f(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) f(i, j) = g(rng);
    if (n > 1 && g(rng) > 0.8)
        for (std::size_t i = 0; i < n; ++i) f(i, n - 1) = 0.0;
    const RealMatrix sr = matmul(f, f.transpose());
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = Complex(sr(i, i), 0.5 * g(rng));
        for (std::size_t j = 0; j < i; ++j) {
            const double skew = 0.3 * g(rng);
            a(i, j) = Complex(sr(i, j) + skew, 0.5 * g(rng));
            a(j, i) = Complex(sr(j, i) - skew, 0.5 * g(rng));
        }
    }
    return a;
}

CoefficientSample sample_1d(Complex A, Complex b, Complex a) {
    CoefficientSample s;
    s.x = {0.0};
    s.A = {A};
    s.b = {b};
    s.c = {Complex{}};
    s.a = a;
    return s;
}

}  // namespace

TEST(Pointwise, DecomposeExamples) {
    const SymDecomp d1 = decompose(cm({{1.0, 2.0 * I}, {-2.0 * I, 1.0}}));
    EXPECT_EQ(d1.S_i, RealMatrix(2, 2));
    EXPECT_EQ(d1.K_i, rm({{0, 2}, {-2, 0}}));
    EXPECT_EQ(d1.S_r, RealMatrix::identity(2));

    const SymDecomp d2 = decompose(cm({{1.0 + I, 0.0}, {0.0, 1.0 + I}}));
    EXPECT_EQ(d2.S_r, RealMatrix::identity(2));
    EXPECT_EQ(d2.S_i, RealMatrix::identity(2));

    const SymDecomp d3 = decompose(cm({{1.0, 2.0 + 3.0 * I}, {0.0, 1.0}}));
    EXPECT_EQ(d3.S_r, rm({{1, 1}, {1, 1}}));
    EXPECT_EQ(d3.S_i, rm({{0, 1.5}, {1.5, 0}}));
    EXPECT_EQ(d3.K_r, rm({{0, 1}, {-1, 0}}));
}

TEST(Pointwise, DecomposeReconstructsAndIsExactlySymmetric) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 5);
        const ComplexMatrix a = random_coefficients(rng, n);
        const SymDecomp d = decompose(a);
        EXPECT_EQ(d.S_r, d.S_r.transpose());
        EXPECT_EQ(d.K_r, -1.0 * d.K_r.transpose());
        EXPECT_EQ(d.S_i, d.S_i.transpose());
        EXPECT_EQ(d.K_i, -1.0 * d.K_i.transpose());
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                EXPECT_NEAR(d.S_r(i, j) + d.K_r(i, j), a(i, j).real(), 1e-14);
                EXPECT_NEAR(d.S_i(i, j) + d.K_i(i, j), a(i, j).imag(), 1e-14);
            }
        }
    }
}

TEST(Pointwise, CheckPConditionExamples) {
    const SymDecomp real_a = decompose(cm({{2.0, 1.0}, {0.5, 1.0}}));
    for (double p : {1.01, 1.5, 2.0, 3.0, 100.0}) EXPECT_TRUE(check_p_condition(real_a, p));

    const SymDecomp one_plus_i = decompose(cm({{1.0 + I, 0.0}, {0.0, 1.0 + I}}));
    EXPECT_TRUE(check_p_condition(one_plus_i, 4.0 - 2.0 * std::sqrt(2.0)));
    EXPECT_TRUE(check_p_condition(one_plus_i, 4.0 + 2.0 * std::sqrt(2.0)));
    EXPECT_FALSE(check_p_condition(one_plus_i, 1.1));

    for (double gamma : {0.0, 1.0, 3.0, 50.0}) {
        const SymDecomp ex1 = decompose(cm({{1.0, gamma * I}, {-gamma * I, 1.0}}));
        for (double p : {1.05, 1.5, 2.0, 4.0, 30.0}) EXPECT_TRUE(check_p_condition(ex1, p));
    }
    EXPECT_THROW(check_p_condition(real_a, 1.0), std::invalid_argument);
    EXPECT_THROW(check_p_condition(real_a, 0.5), std::invalid_argument);
}

TEST(Pointwise, LambdaExamples) {
    EXPECT_TRUE(std::isinf(lambda_of(decompose(cm({{1.0, 0.0}, {0.0, 2.0}}))).lambda));

    const LambdaResult l1 = lambda_of(decompose(cm({{1.0 + I, 0.0}, {0.0, 1.0 + I}})));
    EXPECT_NEAR(l1.lambda, 1.0, 1e-12);
    EXPECT_NEAR(norm2(l1.witness), 1.0, 1e-12);

    const LambdaResult l2 = lambda_of(decompose(cm({{1.0 + 2.0 * I, 0.0}, {0.0, 1.0}})));
    EXPECT_NEAR(l2.lambda, 0.5, 1e-12);
    ASSERT_EQ(l2.witness.size(), 2u);
    EXPECT_NEAR(std::abs(l2.witness[0]), 1.0, 1e-6);
    EXPECT_NEAR(l2.witness[1], 0.0, 1e-6);

    EXPECT_THROW(lambda_of(decompose(cm({{-1.0, 0.0}, {0.0, 1.0}}))), NonnegativityViolated);
}

TEST(Pointwise, PIntervalExamples) {
    const PInterval one = p_interval(1.0);
    EXPECT_NEAR(one.p_min, 4.0 - 2.0 * std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(one.p_max, 4.0 + 2.0 * std::sqrt(2.0), 1e-12);

    const PInterval zero = p_interval(0.0);
    EXPECT_EQ(zero.p_min, 2.0);
    EXPECT_EQ(zero.p_max, 2.0);
    EXPECT_TRUE(zero.contains(2.0));
    EXPECT_FALSE(zero.contains(2.001));

    const PInterval all = p_interval(std::numeric_limits<double>::infinity());
    EXPECT_TRUE(all.is_unbounded());
    EXPECT_EQ(all.p_min, 1.0);
    EXPECT_TRUE(std::isinf(all.p_max));
    EXPECT_TRUE(all.contains(1.0001));
    EXPECT_FALSE(all.contains(1.0));

    EXPECT_THROW(p_interval(-0.1), std::invalid_argument);
}

TEST(Pointwise, ExponentRatioIsConjugateInvariant) {
    for (double p : {1.1, 1.5, 3.0, 7.0}) {
        EXPECT_NEAR(exponent_ratio(p), exponent_ratio(p / (p - 1.0)), 1e-14);
    }
    EXPECT_EQ(exponent_ratio(2.0), 0.0);
}

TEST(Pointwise, SelfDualityOnRandomMatrices) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> up(1.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const SymDecomp d = decompose(random_coefficients(rng, 1 + static_cast<std::size_t>(trial % 4)));
        const double p = std::nextafter(up(rng), 11.0);
        EXPECT_EQ(check_p_condition(d, p), check_p_condition(d, p / (p - 1.0))) << trial << " p=" << p;
    }
}

TEST(Pointwise, ExponentTwoReducesToPositivity) {
    std::mt19937_64 rng(19);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 4);
        ComplexMatrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) = Complex(g(rng) + (i == j ? 1.0 : 0.0), g(rng));
        const SymDecomp d = decompose(a);
        EXPECT_EQ(check_p_condition(d, 2.0), min_eigenvalue(d.S_r) >= -psd_tolerance(d));
    }
}

TEST(Pointwise, IntervalMatchesConditionAndHasConjugateEndpoints) {
    std::mt19937_64 rng(23);
    int finite = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const SymDecomp d = decompose(random_coefficients(rng, 1 + static_cast<std::size_t>(trial % 4)));
        const LambdaResult l = lambda_of(d);
        if (std::isinf(l.lambda)) continue;
        ++finite;
        const PInterval iv = p_interval(l.lambda);
        EXPECT_NEAR(1.0 / iv.p_min + 1.0 / iv.p_max, 1.0, 1e-9);
        EXPECT_LE(iv.p_min, 2.0);
        EXPECT_GE(iv.p_max, 2.0);
        if (iv.p_max - iv.p_min > 2e-6) {
            for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                const double p = iv.p_min + 1e-6 + s * (iv.p_max - iv.p_min - 2e-6);
                EXPECT_TRUE(check_p_condition(d, p)) << trial << " p=" << p;
            }
        }
        if (iv.p_min - 1e-3 > 1.0) EXPECT_FALSE(check_p_condition(d, iv.p_min - 1e-3)) << trial;
        EXPECT_FALSE(check_p_condition(d, iv.p_max + 1e-3)) << trial;
    }
    EXPECT_GT(finite, 150);
}

TEST(Pointwise, PositiveScalingLeavesConditionAndLambdaUnchanged) {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> uc(0.01, 100.0);
    for (int trial = 0; trial < 60; ++trial) {
        const ComplexMatrix a = random_coefficients(rng, 1 + static_cast<std::size_t>(trial % 3));
        const double c = uc(rng);
        const SymDecomp d = decompose(a);
        const SymDecomp dc = decompose(Complex(c) * a);
        const double l = lambda_of(d).lambda;
        const double lc = lambda_of(dc).lambda;
        if (std::isinf(l)) {
            EXPECT_TRUE(std::isinf(lc));
        } else {
            EXPECT_NEAR(lc, l, 1e-9 * (1.0 + l));
            for (double p : {1.3, 2.5, 6.0}) {
                // Exact agreement away from the boundary of the interval.
                const PInterval iv = p_interval(l);
                if (std::abs(p - iv.p_min) > 1e-6 && std::abs(p - iv.p_max) > 1e-6)
                    EXPECT_EQ(check_p_condition(d, p), check_p_condition(dc, p));
            }
        }
    }
}

TEST(Pointwise, SufficiencyExamples) {
    CoefficientSample id;
    id.x = {0.0, 0.0};
    id.A = {1.0, 0.0, 0.0, 1.0};
    id.b = id.c = {Complex{}, Complex{}};
    for (double p : {1.2, 2.0, 5.0}) EXPECT_TRUE(q_sufficiency(id, p));

    CoefficientSample ex1 = id;
    ex1.A = {1.0, 3.0 * I, -3.0 * I, 1.0};
    EXPECT_FALSE(q_sufficiency(ex1, 2.0));

    const CoefficientSample ex3 = sample_1d(1.0 + I * std::sqrt(3.0), 2.0 * I, -1.0);
    const QuadraticMinimum q = q_minimum(ex3, 4.0);
    EXPECT_FALSE(q.nonnegative);
    EXPECT_THROW(q_sufficiency(id, 1.0), std::invalid_argument);
}

TEST(Pointwise, SufficiencyReportsUnboundedLinearPart) {
    // Singular Hessian with the drift outside its range: Q is unbounded below.
    CoefficientSample s;
    s.x = {0.0, 0.0};
    s.A = {1.0, 0.0, 0.0, 0.0};
    s.b = {Complex{}, 2.0 * I};
    s.c = {Complex{}, Complex{}};
    const QuadraticMinimum q = q_minimum(s, 2.0);
    EXPECT_FALSE(q.nonnegative);
    EXPECT_GT(q.range_residual, 1.0);
    EXPECT_TRUE(std::isinf(q.minimum) && q.minimum < 0);
}

TEST(Pointwise, ConstantCoefficientExamples) {
    const double p = 4.0;
    const ComplexMatrix a3 = cm({{1.0 + I * 2.0 * std::sqrt(p - 1.0) / (p - 2.0)}});
    const ConstVerdict v = constant_coeff_verdict(a3, {2.0 * I}, -1.0, p);
    EXPECT_TRUE(v.dissipative);
    EXPECT_EQ(v.reason, ConstReason::ok);
    ASSERT_TRUE(v.V.has_value());
    EXPECT_NEAR((*v.V)[0], -1.0, 1e-12);
    EXPECT_NEAR(v.residual, 0.0, 1e-9);
    EXPECT_NEAR(v.zero_order, 0.0, 1e-9);
    ASSERT_TRUE(v.inverse_gap.has_value());
    EXPECT_NEAR(*v.inverse_gap, 0.0, 1e-9);
    EXPECT_FALSE(constant_coeff_verdict(a3, {2.0 * I}, -0.99, p).dissipative);
    EXPECT_EQ(constant_coeff_verdict(a3, {2.0 * I}, -0.99, p).reason, ConstReason::zero_order_positive);
    EXPECT_EQ(constant_coeff_verdict(a3, {2.0 * I}, -1.0, 5.0).reason, ConstReason::p_condition_failed);

    const ConstVerdict v2 = constant_coeff_verdict(cm({{1.0, 0.0}, {0.0, 1.0}}), {2.0 * I, 0.0}, -0.9, 2.0);
    EXPECT_FALSE(v2.dissipative);
    EXPECT_EQ(v2.reason, ConstReason::zero_order_positive);
    ASSERT_TRUE(v2.inverse_gap.has_value());
    EXPECT_NEAR(*v2.inverse_gap, 4.0 * -0.9 + 4.0, 1e-12);

    const ConstVerdict v3 = constant_coeff_verdict(cm({{1.0, 0.0}, {0.0, 0.0}}), {0.0, 2.0 * I}, 0.0, 2.0);
    EXPECT_FALSE(v3.dissipative);
    EXPECT_EQ(v3.reason, ConstReason::system_inconsistent);
    EXPECT_NEAR(v3.residual, 1.0, 1e-12);
    EXPECT_FALSE(v3.inverse_gap.has_value());
    EXPECT_EQ(to_string(ConstReason::system_inconsistent), "system_inconsistent");
}

TEST(Pointwise, InverseFormulaAgreesWithDriftCriterion) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
        ComplexMatrix a(n, n);
        for (std::size_t i = 0; i < n; ++i) a(i, i) = Complex(1.0 + std::abs(g(rng)), 0.0);
        ComplexVector b(n);
        for (auto& bk : b) bk = Complex(g(rng), g(rng));
        const Complex a0(g(rng), g(rng));
        const ConstVerdict v = constant_coeff_verdict(a, b, a0, 2.0);
        ASSERT_TRUE(v.inverse_gap.has_value());
        if (std::abs(*v.inverse_gap) > 1e-9) EXPECT_EQ(v.dissipative, *v.inverse_gap <= 0.0) << trial;
    }
}

TEST(Pointwise, DriftEnergyIsConstantOnTheSolutionSet) {
    std::mt19937_64 rng(37);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial) {
        // S_r of rank 2 in R^3 with Im b in its range.
        RealMatrix f(3, 2);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 2; ++j) f(i, j) = g(rng);
        const RealMatrix sr = matmul(f, f.transpose());
        const RealVector w{g(rng), g(rng), g(rng)};
        const RealVector im_b = matvec(sr, w);
        ComplexMatrix a(3, 3);
        ComplexVector b(3);
        for (std::size_t i = 0; i < 3; ++i) {
            b[i] = Complex(0.0, im_b[i]);
            for (std::size_t j = 0; j < 3; ++j) a(i, j) = sr(i, j);
        }
        const ConstVerdict v = constant_coeff_verdict(a, b, 0.0, 2.0);
        ASSERT_TRUE(v.V.has_value());
        EXPECT_LT(v.residual, 1e-8 * (1.0 + norm2(im_b)));
        // Kernel direction of S_r.
        const SymmetricEigen e = jacobi_eigen(sr);
        RealVector shifted = *v.V;
        for (std::size_t i = 0; i < 3; ++i) shifted[i] += 2.5 * e.vectors(i, 0);
        const double base = dot(*v.V, matvec(sr, *v.V));
        const double moved = dot(shifted, matvec(sr, shifted));
        EXPECT_NEAR(base, moved, 1e-10 * (1.0 + std::abs(base)));
    }
}
