#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dissipate/grid.hpp"
#include "dissipate/operator_spec.hpp"

namespace dissipate {

/// Square complex band matrix with `kl` sub- and `ku` super-diagonals.
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku);

    std::size_t size() const noexcept { return n_; }
    std::size_t lower() const noexcept { return kl_; }
    std::size_t upper() const noexcept { return ku_; }

    bool in_band(std::size_t i, std::size_t j) const noexcept { return j + kl_ >= i && j <= i + ku_; }
    /// Zero outside the band.
    Complex get(std::size_t i, std::size_t j) const noexcept;
    /// Throws std::out_of_range outside the band.
    Complex& at(std::size_t i, std::size_t j);

    std::vector<Complex> apply(std::span<const Complex> x) const;

    bool operator==(const BandedMatrix&) const = default;

private:
    std::size_t n_ = 0, kl_ = 0, ku_ = 0;
    std::vector<Complex> data_;  // row i holds columns [i - kl, i + ku]
};

/// LU factorization with partial pivoting of a band matrix, computed once at construction.
class BandedLU {
public:
    /// Throws NumericError on an exactly zero pivot.
    explicit BandedLU(const BandedMatrix& m);

    /// Solves M x = rhs in place.
    void solve(std::span<Complex> rhs) const;
    std::size_t size() const noexcept { return n_; }

private:
    std::size_t n_ = 0, kl_ = 0, width_ = 0;
    std::vector<Complex> rows_;         // row i holds columns [i - kl, i + kl + ku]
    std::vector<Complex> multipliers_;  // kl per column
    std::vector<std::size_t> pivots_;

    Complex& cell(std::size_t i, std::size_t j) { return rows_[i * width_ + (j + kl_ - i)]; }
    const Complex& cell(std::size_t i, std::size_t j) const { return rows_[i * width_ + (j + kl_ - i)]; }
};

/// Finite-difference discretization of  div(A grad u) + b.grad u + div(c u) + a u  with
/// Dirichlet zero boundary on the interior nodes of `grid`.
struct DiscreteOperator {
    Grid grid;
    BandedMatrix matrix;
    std::vector<std::string> stencils;  // one entry per assembled term

    std::vector<Complex> apply(std::span<const Complex> u) const { return matrix.apply(u); }
};

/// Flux differencing with A at cell-face midpoints; mixed derivatives average the two
/// adjacent central differences; b.grad u and div(c u) by central differences; a on the
/// diagonal. Supports n <= 3. Evaluation failures carry coordinates.
DiscreteOperator discretize(const OperatorSpec& spec);
DiscreteOperator discretize(const OperatorSpec& spec, const Grid& grid);

/// Weighted discrete norm (sum |u_j|^p h)^(1/p). Throws std::invalid_argument for p < 1.
double lp_norm(const GridFunction& u, double p);
double lp_norm(std::span<const Complex> values, double weight, double p);

struct NormTrace {
    double p = 2.0;
    double dt = 0.0;
    std::vector<double> times;  // starts at 0
    std::vector<double> norms;
    std::optional<double> growth_rate;
};

/// Largest simulated problem: n <= 2 and at most this many nodes.
inline constexpr std::size_t kMaxSimulationNodes = 16384;

/// Implicit Euler for u' = A_h u, factoring (I - dt A_h) once; records the L^p norm at t = 0
/// and after every step. Throws NumericError for a singular system or non-finite norms.
NormTrace evolve(const DiscreteOperator& op, const GridFunction& u0, double dt, double t_end, double p,
                 GridFunction* final_state = nullptr);

struct OmegaEstimate {
    double omega = 0.0;
    bool degenerate = false;  // all-zero trace
};

/// max(0, largest least-squares slope of log norm over 10-point sliding windows).
/// Throws std::invalid_argument with fewer than 10 points.
OmegaEstimate estimate_omega(const NormTrace& trace);

/// Least-squares slope of log norm against time over the whole trace.
double fit_log_slope(const NormTrace& trace);

/// CSV with header "t,norm_p" and 17 significant digits.
void write_trace_csv(const NormTrace& trace, std::ostream& out);
void write_trace_csv(const NormTrace& trace, const std::filesystem::path& path);

}  // namespace dissipate
