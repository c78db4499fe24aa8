#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dissipate/grid.hpp"
#include "dissipate/operator_spec.hpp"

namespace dissipate {

/// Relative threshold below which |v| counts as zero in the transformed functional.
inline constexpr double kMaskEps = 1e-12;

/// Central-difference gradient at every node, zero boundary values. Entry [i * n + k] is d_k v at node i.
std::vector<Complex> gradient(const GridFunction& v);

/// X = Re(conj(v) grad v) / |v| and Y = Im(conj(v) grad v) / |v| at unmasked nodes.
struct GradientSplit {
    int n = 0;
    std::vector<double> X, Y;   // node-major, n entries per node
    std::vector<bool> masked;   // |v| <= kMaskEps * max|v|
};

GradientSplit split_gradient(const GridFunction& v, const std::vector<Complex>& grad);

/// Coefficients sampled on a grid, reusable across functional evaluations.
class FormContext {
public:
    FormContext(const OperatorSpec& spec, const Grid& grid);
    explicit FormContext(const OperatorSpec& spec) : FormContext(spec, Grid::from_spec(spec)) {}

    const OperatorSpec& spec() const noexcept { return spec_; }
    const Grid& grid() const noexcept { return samples_.grid; }
    const SampledCoefficients& samples() const noexcept { return samples_; }

    /// Quadrature of the transformed functional
    ///   Re[<A grad v, grad v> - (1-2/p) <(A - A^*) grad|v|, |v|^{-1} conj(v) grad v>
    ///      - (1-2/p)^2 <A grad|v|, grad|v|>] + <Im(b+c), Im(conj(v) grad v)>
    ///   + Re(div(b/p - c/p') - a) |v|^2.
    /// Masked nodes keep only the terms that do not involve grad|v|. Boundary nodes enter
    /// with half weight through their one-sided normal differences.
    double transformed(const GridFunction& v, double p) const;

    /// Re L(u, |u|^{p-2} u) for p >= 2, Re L(|u|^{p'-2} u, u) for p < 2, with
    /// L(u, w) = int <A grad u, grad w> - (b.grad u) conj(w) + u <c, conj(grad w)> - a u conj(w).
    double direct(const GridFunction& u, double p) const;

private:
    struct BoundaryFace {
        std::size_t node;  // adjacent interior node
        std::size_t axis;  // normal direction
        Complex a_nn;      // A[axis][axis] on the boundary
    };
    /// Re sum over boundary faces of A_nn (du/dn) conj(dw/dn) with trapezoid weight.
    double boundary_layer(const GridFunction& u, const GridFunction& w) const;

    OperatorSpec spec_;
    SampledCoefficients samples_;
    std::vector<BoundaryFace> boundary_;
};

double form_transformed(const OperatorSpec& spec, const Grid& grid, const GridFunction& v, double p);
double form_direct(const OperatorSpec& spec, const Grid& grid, const GridFunction& u, double p);

/// Re sum (A_h u)_j conj(u_j) |u_j|^{p-2} h with A_h from discretize().
double operator_form(const OperatorSpec& spec, const Grid& grid, const GridFunction& u, double p);

/// |direct(u) - transformed(|u|^{(p-2)/2} u)| / (1 + |direct(u)|). Requires p >= 2.
double equivalence_gap(const OperatorSpec& spec, const Grid& grid, const GridFunction& u, double p);

/// Candidate families of the falsifier.
enum class Family : int { phase_log = 0, plane_wave = 1, trig_mixture = 2 };

std::string to_string(Family f);

struct FalsifyOptions {
    double tol_neg = 1e-6;
    double search_fraction = 0.6;  // share of the budget spent on random starts
    unsigned workers = 0;          // 0 = worker_count()
};

struct FalsifyResult {
    bool found = false;
    double value = 0.0;       // most negative normalized functional value
    double threshold = 0.0;   // -tol_neg * (1 + int |grad v|^2) at the witness
    GridFunction witness;     // unit discrete L^2 norm
    Family family = Family::phase_log;
    std::uint64_t start_index = 0;
    std::map<std::string, double> params;
    std::uint64_t evaluations = 0;
};

/// Randomized search for v with transformed(v, p) < 0: seeded random starts over three
/// families, then coordinate descent on the best candidate's parameters. Results do not
/// depend on the worker count.
FalsifyResult falsify(const OperatorSpec& spec, double p, std::uint64_t budget, std::uint64_t seed,
                      const FalsifyOptions& options = {});

}  // namespace dissipate
