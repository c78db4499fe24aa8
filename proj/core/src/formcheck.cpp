#include "dissipate/formcheck.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dissipate/errors.hpp"

#include "dissipate/semigroup.hpp"

namespace dissipate {

namespace {

void require_exponent(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("exponent p must be a finite number > 1");
}

void require_grid(const Grid& expected, const GridFunction& v) {
    if (!(v.grid == expected)) throw std::invalid_argument("grid function does not live on the context grid");
}

// |u|^e u with 0 at u = 0.
GridFunction power_map(const GridFunction& u, double e) {
    GridFunction out(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double m = std::abs(u[i]);
        out[i] = m == 0.0 ? Complex{} : u[i] * std::pow(m, e);
    }
    return out;
}

}  // namespace

std::vector<Complex> gradient(const GridFunction& v) {
    const Grid& g = v.grid;
    const auto n = static_cast<std::size_t>(g.dim());
    std::vector<Complex> grad(g.size() * n);
    std::vector<int> multi(n);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.multi_index(i, multi);
        for (std::size_t k = 0; k < n; ++k) {
            const int axis = static_cast<int>(k);
            const std::size_t s = g.stride(axis);
            const Complex up = multi[k] + 1 < g.count(axis) ? v[i + s] : Complex{};
            const Complex down = multi[k] > 0 ? v[i - s] : Complex{};
            grad[i * n + k] = (up - down) / (2.0 * g.spacing(axis));
        }
    }
    return grad;
}

GradientSplit split_gradient(const GridFunction& v, const std::vector<Complex>& grad) {
    GradientSplit out;
    out.n = v.grid.dim();
    const auto n = static_cast<std::size_t>(out.n);
    out.X.assign(v.size() * n, 0.0);
    out.Y.assign(v.size() * n, 0.0);
    out.masked.assign(v.size(), true);
    const double cut = kMaskEps * v.max_abs();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double m = std::abs(v[i]);
        if (!(m > cut) || m == 0.0) continue;
        out.masked[i] = false;
        const Complex unit = std::conj(v[i]) / m;
        for (std::size_t k = 0; k < n; ++k) {
            const Complex z = unit * grad[i * n + k];
            out.X[i * n + k] = z.real();
            out.Y[i * n + k] = z.imag();
        }
    }
    return out;
}

FormContext::FormContext(const OperatorSpec& spec, const Grid& grid)
    : spec_(spec), samples_(sample_on_grid(spec, grid)) {
    // Boundary faces: the only nonzero gradient component there is the one-sided normal
    // difference to the adjacent interior node. Corner and edge nodes see zeros only.
    const auto n = static_cast<std::size_t>(grid.dim());
    std::vector<int> multi(n);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.multi_index(i, multi);
        for (std::size_t k = 0; k < n; ++k) {
            const int axis = static_cast<int>(k);
            for (int side : {-1, 1}) {
                const int original = multi[k];
                if (side < 0 ? original != 0 : original != grid.count(axis) - 1) continue;
                multi[k] = original + side;
                grid.coordinates(multi, x);
                multi[k] = original;
                try {
                    boundary_.push_back({i, k, spec.A[k][k].eval(x)});
                } catch (const EvalError& err) {
                    throw EvalError(std::string(err.what()) + " at a boundary node");
                }
            }
        }
    }
}

double FormContext::boundary_layer(const GridFunction& u, const GridFunction& w) const {
    // Trapezoid weight: half a cell in the normal direction.
    double total = 0.0;
    for (const BoundaryFace& f : boundary_) {
        const double h = grid().spacing(static_cast<int>(f.axis));
        total += (f.a_nn * u[f.node] * std::conj(w[f.node])).real() / (h * h);
    }
    return 0.5 * total * grid().weight();
}

double FormContext::transformed(const GridFunction& v, double p) const {
    require_exponent(p);
    require_grid(grid(), v);
    const double pc = p / (p - 1.0);
    const double kappa = 1.0 - 2.0 / p;
    const auto n = static_cast<std::size_t>(grid().dim());
    const std::vector<Complex> grad = gradient(v);
    const GradientSplit split = split_gradient(v, grad);

    double total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const CoefficientSample& s = samples_.nodes[i];
        const Complex* g = &grad[i * n];
        double term = 0.0;
        Complex agg{};
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) agg += s.A[j * n + k] * g[k] * std::conj(g[j]);
        term += agg.real();

        if (!split.masked[i]) {
            const double* X = &split.X[i * n];
            const double* Y = &split.Y[i * n];
            Complex skew{};
            Complex ax{};
            for (std::size_t j = 0; j < n; ++j) {
                Complex dx{};
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex d = s.A[j * n + k] - std::conj(s.A[k * n + j]);
                    dx += d * X[k];
                    ax += s.A[j * n + k] * X[k] * X[j];
                }
                skew += dx * Complex(X[j], -Y[j]);
            }
            term -= kappa * skew.real();
            term -= kappa * kappa * ax.real();
        }

        const Complex vbar = std::conj(v[i]);
        for (std::size_t k = 0; k < n; ++k) term += (s.b[k].imag() + s.c[k].imag()) * (vbar * g[k]).imag();
        term += (s.div_b / p - s.div_c / pc - s.a).real() * std::norm(v[i]);
        total += term;
    }
    return total * grid().weight() + boundary_layer(v, v);
}

namespace {

double sesquilinear_re(const SampledCoefficients& samples, const GridFunction& u, const GridFunction& w) {
    const auto n = static_cast<std::size_t>(u.grid.dim());
    const std::vector<Complex> gu = gradient(u);
    const std::vector<Complex> gw = gradient(w);
    double total = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const CoefficientSample& s = samples.nodes[i];
        const Complex* du = &gu[i * n];
        const Complex* dw = &gw[i * n];
        Complex acc{};
        Complex bgrad{};
        Complex cgrad{};
        for (std::size_t j = 0; j < n; ++j) {
            Complex row{};
            for (std::size_t k = 0; k < n; ++k) row += s.A[j * n + k] * du[k];
            acc += row * std::conj(dw[j]);
            bgrad += s.b[j] * du[j];
            cgrad += s.c[j] * std::conj(dw[j]);
        }
        acc -= bgrad * std::conj(w[i]);
        acc += u[i] * cgrad;
        acc -= s.a * u[i] * std::conj(w[i]);
        total += acc.real();
    }
    return total * u.grid.weight();
}

}  // namespace

double FormContext::direct(const GridFunction& u, double p) const {
    require_exponent(p);
    require_grid(grid(), u);
    if (p >= 2.0) {
        const GridFunction w = power_map(u, p - 2.0);
        return sesquilinear_re(samples_, u, w) + boundary_layer(u, w);
    }
    const double pc = p / (p - 1.0);
    const GridFunction w = power_map(u, pc - 2.0);
    return sesquilinear_re(samples_, w, u) + boundary_layer(w, u);
}

double form_transformed(const OperatorSpec& spec, const Grid& grid, const GridFunction& v, double p) {
    return FormContext(spec, grid).transformed(v, p);
}

double form_direct(const OperatorSpec& spec, const Grid& grid, const GridFunction& u, double p) {
    return FormContext(spec, grid).direct(u, p);
}

double operator_form(const OperatorSpec& spec, const Grid& grid, const GridFunction& u, double p) {
    require_exponent(p);
    require_grid(grid, u);
    const DiscreteOperator op = discretize(spec, grid);
    const std::vector<Complex> au = op.apply(u.values);
    double total = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double m = std::abs(u[i]);
        if (m == 0.0) continue;
        total += (au[i] * std::conj(u[i])).real() * std::pow(m, p - 2.0);
    }
    return total * grid.weight();
}

double equivalence_gap(const OperatorSpec& spec, const Grid& grid, const GridFunction& u, double p) {
    if (!(p >= 2.0) || !std::isfinite(p)) throw std::invalid_argument("equivalence_gap requires p >= 2");
    const FormContext ctx(spec, grid);
    const double direct = ctx.direct(u, p);
    const double transformed = ctx.transformed(power_map(u, (p - 2.0) / 2.0), p);
    return std::abs(direct - transformed) / (1.0 + std::abs(direct));
}

}  // namespace dissipate
