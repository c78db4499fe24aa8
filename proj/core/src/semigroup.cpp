#include "dissipate/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "dissipate/errors.hpp"

namespace dissipate {

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), data_(n * (kl + ku + 1)) {}

Complex BandedMatrix::get(std::size_t i, std::size_t j) const noexcept {
    if (i >= n_ || j >= n_ || !in_band(i, j)) return {};
    return data_[i * (kl_ + ku_ + 1) + (j + kl_ - i)];
}

Complex& BandedMatrix::at(std::size_t i, std::size_t j) {
    if (i >= n_ || j >= n_ || !in_band(i, j)) throw std::out_of_range("banded matrix index outside the band");
    return data_[i * (kl_ + ku_ + 1) + (j + kl_ - i)];
}

std::vector<Complex> BandedMatrix::apply(std::span<const Complex> x) const {
    if (x.size() != n_) throw std::invalid_argument("banded apply: size mismatch");
    std::vector<Complex> y(n_);
    const std::size_t w = kl_ + ku_ + 1;
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = i >= kl_ ? i - kl_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + ku_);
        Complex s{};
        for (std::size_t j = j0; j <= j1; ++j) s += data_[i * w + (j + kl_ - i)] * x[j];
        y[i] = s;
    }
    return y;
}

BandedLU::BandedLU(const BandedMatrix& m)
    : n_(m.size()), kl_(m.lower()), width_(2 * m.lower() + m.upper() + 1) {
    const std::size_t ku = m.upper();
    rows_.assign(n_ * width_, Complex{});
    multipliers_.assign(n_ * kl_, Complex{});
    pivots_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = i >= kl_ ? i - kl_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + ku);
        for (std::size_t j = j0; j <= j1; ++j) cell(i, j) = m.get(i, j);
    }

    const std::size_t reach = kl_ + ku;  // fill-in extent to the right of the diagonal
    for (std::size_t k = 0; k < n_; ++k) {
        const std::size_t last_row = std::min(n_ - 1, k + kl_);
        const std::size_t last_col = std::min(n_ - 1, k + reach);
        std::size_t piv = k;
        double best = std::abs(cell(k, k));
        for (std::size_t i = k + 1; i <= last_row; ++i) {
            const double v = std::abs(cell(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best == 0.0) throw NumericError("singular banded factorization at row " + std::to_string(k));
        pivots_[k] = piv;
        if (piv != k)
            for (std::size_t j = k; j <= last_col; ++j) std::swap(cell(k, j), cell(piv, j));

        const Complex inv = 1.0 / cell(k, k);
        for (std::size_t i = k + 1; i <= last_row; ++i) {
            const Complex mult = cell(i, k) * inv;
            multipliers_[k * kl_ + (i - k - 1)] = mult;
            cell(i, k) = Complex{};
            if (mult == Complex{}) continue;
            for (std::size_t j = k + 1; j <= last_col; ++j) cell(i, j) -= mult * cell(k, j);
        }
    }
}

void BandedLU::solve(std::span<Complex> rhs) const {
    if (rhs.size() != n_) throw std::invalid_argument("banded solve: size mismatch");
    const std::size_t reach = width_ - kl_ - 1;
    for (std::size_t k = 0; k < n_; ++k) {
        if (pivots_[k] != k) std::swap(rhs[k], rhs[pivots_[k]]);
        const std::size_t last_row = std::min(n_ - 1, k + kl_);
        for (std::size_t i = k + 1; i <= last_row; ++i) rhs[i] -= multipliers_[k * kl_ + (i - k - 1)] * rhs[k];
    }
    for (std::size_t k = n_; k-- > 0;) {
        Complex s = rhs[k];
        const std::size_t last_col = std::min(n_ - 1, k + reach);
        for (std::size_t j = k + 1; j <= last_col; ++j) s -= cell(k, j) * rhs[j];
        rhs[k] = s / cell(k, k);
    }
}

namespace {

struct Assembler {
    const OperatorSpec& spec;
    const Grid& grid;
    std::vector<int> multi;
    std::vector<double> x;

    Complex eval(const ComplexExpr& e, std::span<const double> at) const {
        try {
            return e.eval(at);
        } catch (const EvalError& err) {
            std::string where = "(";
            for (std::size_t k = 0; k < at.size(); ++k) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", at[k]);
                where += (k ? ", " : "");
                where += buf;
            }
            throw EvalError(std::string(err.what()) + " at x = " + where + ")");
        }
    }

    // Linear index of the node at multi + offsets, or npos outside the interior.
    std::size_t shifted(std::span<const int> offsets) const {
        std::size_t idx = 0;
        for (int k = 0; k < grid.dim(); ++k) {
            const int m = multi[static_cast<std::size_t>(k)] + offsets[static_cast<std::size_t>(k)];
            if (m < 0 || m >= grid.count(k)) return npos;
            idx += static_cast<std::size_t>(m) * grid.stride(k);
        }
        return idx;
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

bool is_zero(const ComplexExpr& e) { return e.is_constant() && e.eval(std::vector<double>(3, 0.0)) == Complex{}; }

}  // namespace

DiscreteOperator discretize(const OperatorSpec& spec) { return discretize(spec, Grid::from_spec(spec)); }

DiscreteOperator discretize(const OperatorSpec& spec, const Grid& grid) {
    const int n = spec.n;
    if (grid.dim() != n) throw std::invalid_argument("discretize: grid dimension does not match the spec");

    std::size_t half = 0;
    for (int j = 0; j < n; ++j) {
        half = std::max(half, grid.stride(j));
        for (int k = 0; k < n; ++k)
            if (j != k && !is_zero(spec.A[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]))
                half = std::max(half, grid.stride(j) + grid.stride(k));
    }

    DiscreteOperator op;
    op.grid = grid;
    op.matrix = BandedMatrix(grid.size(), half, half);
    BandedMatrix cross(grid.size(), half, half);

    bool has_cross = false, has_b = false, has_c = false, has_a = !is_zero(spec.a);
    for (int k = 0; k < n; ++k) {
        has_b = has_b || !is_zero(spec.b[static_cast<std::size_t>(k)]);
        has_c = has_c || !is_zero(spec.c[static_cast<std::size_t>(k)]);
        for (int j = 0; j < n; ++j)
            if (j != k && !is_zero(spec.A[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)])) has_cross = true;
    }

    Assembler as{spec, grid, std::vector<int>(static_cast<std::size_t>(n)), std::vector<double>(static_cast<std::size_t>(n))};
    std::vector<double> probe(static_cast<std::size_t>(n));
    std::vector<int> off(static_cast<std::size_t>(n));

    auto add = [&](BandedMatrix& m, std::size_t row, std::size_t col, Complex v) {
        if (col == Assembler::npos || v == Complex{}) return;
        m.at(row, col) += v;
    };

    for (std::size_t row = 0; row < grid.size(); ++row) {
        grid.multi_index(row, as.multi);
        grid.coordinates(as.multi, as.x);

        for (int j = 0; j < n; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            const double hj = grid.spacing(j);
            const double inv_h2 = 1.0 / (hj * hj);

            // div(A grad u), diagonal part: flux differences with A_jj at the two faces.
            probe = as.x;
            probe[ju] = as.x[ju] + 0.5 * hj;
            const Complex a_plus = as.eval(spec.A[ju][ju], probe);
            probe[ju] = as.x[ju] - 0.5 * hj;
            const Complex a_minus = as.eval(spec.A[ju][ju], probe);
            std::fill(off.begin(), off.end(), 0);
            off[ju] = 1;
            add(op.matrix, row, as.shifted(off), a_plus * inv_h2);
            op.matrix.at(row, row) -= (a_plus + a_minus) * inv_h2;
            off[ju] = -1;
            add(op.matrix, row, as.shifted(off), a_minus * inv_h2);

            // Mixed terms d_j (A_jk d_k u): A_jk at the j-faces, d_k u averaged over the two nodes.
            for (int k = 0; k < n; ++k) {
                const auto ku = static_cast<std::size_t>(k);
                if (k == j || is_zero(spec.A[ju][ku])) continue;
                const double w = 1.0 / (4.0 * hj * grid.spacing(k));
                for (int side : {1, -1}) {
                    probe = as.x;
                    probe[ju] = as.x[ju] + 0.5 * side * hj;
                    const Complex face = as.eval(spec.A[ju][ku], probe) * (side * w);
                    for (int dj : {0, side}) {
                        std::fill(off.begin(), off.end(), 0);
                        off[ju] = dj;
                        off[ku] = 1;
                        add(cross, row, as.shifted(off), face);
                        off[ku] = -1;
                        add(cross, row, as.shifted(off), -face);
                    }
                }
            }

            // b.grad u and div(c u), central differences.
            const double inv_2h = 1.0 / (2.0 * hj);
            const Complex bj = as.eval(spec.b[ju], as.x);
            std::fill(off.begin(), off.end(), 0);
            for (int side : {1, -1}) {
                off[ju] = side;
                const std::size_t col = as.shifted(off);
                add(op.matrix, row, col, bj * (side * inv_2h));
                if (col != Assembler::npos && !is_zero(spec.c[ju])) {
                    probe = as.x;
                    probe[ju] = as.x[ju] + side * hj;
                    add(op.matrix, row, col, as.eval(spec.c[ju], probe) * (side * inv_2h));
                }
            }
        }
        add(op.matrix, row, row, as.eval(spec.a, as.x));
    }

    // Cross contributions are summed separately so that cancelling pairs leave the
    // second-order stencil untouched.
    if (has_cross) {
        for (std::size_t row = 0; row < grid.size(); ++row) {
            const std::size_t j0 = row >= half ? row - half : 0;
            const std::size_t j1 = std::min(grid.size() - 1, row + half);
            for (std::size_t col = j0; col <= j1; ++col) {
                const Complex v = cross.get(row, col);
                if (v != Complex{}) op.matrix.at(row, col) += v;
            }
        }
    }

    op.stencils.push_back("div(A grad u): flux form, A at face midpoints");
    if (has_cross) op.stencils.push_back("mixed derivatives: face-averaged central differences");
    if (has_b) op.stencils.push_back("b.grad u: central differences");
    if (has_c) op.stencils.push_back("div(c u): central differences");
    if (has_a) op.stencils.push_back("a u: diagonal");
    return op;
}

double lp_norm(std::span<const Complex> values, double weight, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    double m = 0.0;
    for (const Complex& z : values) m = std::max(m, std::abs(z));
    if (m == 0.0) return 0.0;
    if (!std::isfinite(m)) throw NumericError("lp_norm: non-finite value");
    double s = 0.0;
    if (p == 2.0) {
        for (const Complex& z : values) s += std::norm(z / m);
        return m * std::sqrt(s * weight);
    }
    for (const Complex& z : values) s += std::pow(std::abs(z) / m, p);
    return m * std::pow(s * weight, 1.0 / p);
}

double lp_norm(const GridFunction& u, double p) { return lp_norm(u.values, u.grid.weight(), p); }

NormTrace evolve(const DiscreteOperator& op, const GridFunction& u0, double dt, double t_end, double p,
                 GridFunction* final_state) {
    if (!(dt > 0.0) || !(t_end >= dt)) throw std::invalid_argument("evolve: need dt > 0 and t_end >= dt");
    if (!(p > 1.0)) throw std::invalid_argument("evolve: p must be > 1");
    if (op.grid.dim() > 2) throw std::invalid_argument("evolve: simulation is limited to n <= 2");
    if (op.grid.size() > kMaxSimulationNodes) throw std::invalid_argument("evolve: more than 16384 nodes");
    if (!(u0.grid == op.grid)) throw std::invalid_argument("evolve: initial state lives on a different grid");

    const BandedMatrix& a = op.matrix;
    BandedMatrix m(a.size(), a.lower(), a.upper());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::size_t j0 = i >= a.lower() ? i - a.lower() : 0;
        const std::size_t j1 = std::min(a.size() - 1, i + a.upper());
        for (std::size_t j = j0; j <= j1; ++j) m.at(i, j) = (i == j ? 1.0 : 0.0) - dt * a.get(i, j);
    }
    const BandedLU lu(m);

    const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(t_end / dt)));
    NormTrace trace;
    trace.p = p;
    trace.dt = dt;
    trace.times.reserve(steps + 1);
    trace.norms.reserve(steps + 1);

    std::vector<Complex> u = u0.values;
    const double w = op.grid.weight();
    trace.times.push_back(0.0);
    trace.norms.push_back(lp_norm(u, w, p));
    for (std::size_t k = 1; k <= steps; ++k) {
        lu.solve(u);
        const double norm = lp_norm(u, w, p);
        if (!std::isfinite(norm)) throw NumericError("evolve: norm overflow at step " + std::to_string(k));
        trace.times.push_back(static_cast<double>(k) * dt);
        trace.norms.push_back(norm);
    }
    if (trace.norms.size() >= 2 && trace.norms.back() > 0.0 && trace.norms.front() > 0.0)
        trace.growth_rate = fit_log_slope(trace);
    if (final_state) {
        *final_state = GridFunction(op.grid);
        final_state->values = std::move(u);
    }
    return trace;
}

namespace {

// Least-squares slope of log(norm) on [first, last); nullopt if a norm is not positive.
std::optional<double> window_slope(const NormTrace& trace, std::size_t first, std::size_t last) {
    const double count = static_cast<double>(last - first);
    double tm = 0.0, ym = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        if (!(trace.norms[i] > 0.0)) return std::nullopt;
        tm += trace.times[i];
        ym += std::log(trace.norms[i]);
    }
    tm /= count;
    ym /= count;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        const double dt = trace.times[i] - tm;
        sxy += dt * (std::log(trace.norms[i]) - ym);
        sxx += dt * dt;
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

}  // namespace

OmegaEstimate estimate_omega(const NormTrace& trace) {
    constexpr std::size_t window = 10;
    if (trace.times.size() != trace.norms.size() || trace.norms.size() < window)
        throw std::invalid_argument("estimate_omega: need at least 10 trace points");
    OmegaEstimate out;
    if (std::all_of(trace.norms.begin(), trace.norms.end(), [](double v) { return v == 0.0; })) {
        out.degenerate = true;
        return out;
    }
    double best = 0.0;
    for (std::size_t i = 0; i + window <= trace.norms.size(); ++i)
        if (auto s = window_slope(trace, i, i + window)) best = std::max(best, *s);
    out.omega = best;
    return out;
}

double fit_log_slope(const NormTrace& trace) {
    if (trace.norms.size() < 2) throw std::invalid_argument("fit_log_slope: need at least 2 trace points");
    auto s = window_slope(trace, 0, trace.norms.size());
    if (!s) throw NumericError("fit_log_slope: trace contains a zero norm");
    return *s;
}

void write_trace_csv(const NormTrace& trace, std::ostream& out) {
    out << "t,norm_p\n";
    char buf[64];
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", trace.times[i], trace.norms[i]);
        out << buf;
    }
}

void write_trace_csv(const NormTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_trace_csv(trace, out);
}

}  // namespace dissipate
