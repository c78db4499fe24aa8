#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "dissipate/expr.hpp"
#include "dissipate/formcheck.hpp"
#include "dissipate/parallel.hpp"

namespace dissipate {

std::string to_string(Family f) {
    switch (f) {
        case Family::phase_log: return "phase_log";
        case Family::plane_wave: return "plane_wave";
        case Family::trig_mixture: return "trig_mixture";
    }
    return "phase_log";
}

namespace {

constexpr int kBumps = 3;
constexpr int kModes = 3;
constexpr double kTwoPi = 6.283185307179586;

// One tunable scalar of a candidate.
struct Param {
    std::string name;
    double value;
    double lo, hi;
    bool integer;
};

struct Candidate {
    Family family = Family::phase_log;
    std::uint64_t index = 0;
    std::vector<Param> params;
    double value = std::numeric_limits<double>::infinity();
};

class Draw {
public:
    Draw(std::uint64_t seed, std::uint64_t index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
        rng_.seed(seq);
    }
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }
    double sign() { return uniform() < 0.5 ? -1.0 : 1.0; }

private:
    std::mt19937_64 rng_;
};

std::string axis_name(const char* base, int k) { return std::string(base) + std::to_string(k + 1); }

// Sub-box bump: centre in [0.25, 0.75], radius a fraction of the distance to the nearest face.
void push_box(std::vector<Param>& ps, Draw& d, int n, const std::string& prefix) {
    for (int k = 0; k < n; ++k) ps.push_back({prefix + axis_name("c", k), d.uniform(0.25, 0.75), 0.25, 0.75, false});
    for (int k = 0; k < n; ++k) ps.push_back({prefix + axis_name("r", k), d.uniform(0.3, 1.0), 0.3, 1.0, false});
}

Candidate draw_candidate(Family family, std::uint64_t index, std::uint64_t seed, int n) {
    Draw d(seed, index);
    Candidate c;
    c.family = family;
    c.index = index;
    auto& ps = c.params;
    switch (family) {
        case Family::phase_log: {
            ps.push_back({"mu", d.uniform(-50.0, 50.0), -50.0, 50.0, false});
            ps.push_back({"log10_eps", d.uniform(-6.0, 0.0), -6.0, 0.0, false});
            for (int m = 0; m < kBumps; ++m) {
                const std::string pre = "b" + std::to_string(m + 1) + "_";
                ps.push_back({pre + "w", d.uniform(0.2, 1.0), 0.05, 1.0, false});
                push_box(ps, d, n, pre);
            }
            break;
        }
        case Family::plane_wave: {
            const bool full = d.uniform() < 0.5;
            ps.push_back({"full_box", full ? 1.0 : 0.0, 0.0, 1.0, true});
            push_box(ps, d, n, "");
            std::vector<int> k(static_cast<std::size_t>(n), 0);
            if (d.uniform() < 0.5) {
                k[static_cast<std::size_t>(d.integer(0, n - 1))] = d.sign() > 0 ? 1 : -1;
            } else {
                for (;;) {
                    int norm2 = 0;
                    for (auto& kk : k) {
                        kk = d.integer(-8, 8);
                        norm2 += kk * kk;
                    }
                    if (norm2 > 0 && norm2 <= 64) break;
                }
            }
            for (int a = 0; a < n; ++a)
                ps.push_back({axis_name("k", a), static_cast<double>(k[static_cast<std::size_t>(a)]), -8, 8, true});
            const double mag = std::pow(10.0, d.uniform(-1.0, 2.0));
            ps.push_back({"t", d.sign() * mag, -100.0, 100.0, false});
            break;
        }
        case Family::trig_mixture: {
            push_box(ps, d, n, "");
            for (int m = 0; m < kModes; ++m) {
                const std::string pre = "m" + std::to_string(m + 1) + "_";
                ps.push_back({pre + "re", d.uniform(-1.0, 1.0), -1.0, 1.0, false});
                ps.push_back({pre + "im", d.uniform(-1.0, 1.0), -1.0, 1.0, false});
                for (int a = 0; a < n; ++a)
                    ps.push_back({pre + axis_name("k", a), static_cast<double>(d.integer(-4, 4)), -4, 4, true});
            }
            break;
        }
    }
    return c;
}

struct ParamView {
    const std::vector<Param>& ps;
    std::size_t pos = 0;
    double next() { return ps[pos++].value; }
};

// Tensor bump in normalized coordinates; reads n centres then n radius fractions.
struct Box {
    std::vector<double> centre, radius;
    static Box read(ParamView& v, int n) {
        Box b;
        for (int k = 0; k < n; ++k) b.centre.push_back(v.next());
        for (int k = 0; k < n; ++k) {
            const double c = b.centre[static_cast<std::size_t>(k)];
            b.radius.push_back(v.next() * std::min(c, 1.0 - c));
        }
        return b;
    }
    static Box full(int n) { return {std::vector<double>(static_cast<std::size_t>(n), 0.5), std::vector<double>(static_cast<std::size_t>(n), 0.5)}; }
    double operator()(std::span<const double> s) const {
        double v = 1.0;
        for (std::size_t k = 0; k < s.size(); ++k) v *= bump((s[k] - centre[k]) / radius[k]);
        return v;
    }
};

GridFunction build(const Candidate& c, const Grid& g) {
    const int n = g.dim();
    GridFunction v(g);
    std::vector<double> s(static_cast<std::size_t>(n));
    auto normalized = [&](std::size_t i, std::vector<double>& x) {
        x = g.node(i);
        for (int k = 0; k < n; ++k) {
            const Interval& iv = g.interval(k);
            s[static_cast<std::size_t>(k)] = (x[static_cast<std::size_t>(k)] - iv.lo) / iv.length();
        }
    };
    std::vector<double> x;
    ParamView view{c.params};
    switch (c.family) {
        case Family::phase_log: {
            const double mu = view.next();
            const double eps = std::pow(10.0, view.next());
            std::array<double, kBumps> w{};
            std::vector<Box> boxes;
            for (int m = 0; m < kBumps; ++m) {
                w[static_cast<std::size_t>(m)] = view.next();
                boxes.push_back(Box::read(view, n));
            }
            for (std::size_t i = 0; i < g.size(); ++i) {
                normalized(i, x);
                double rho = 0.0;
                for (int m = 0; m < kBumps; ++m) rho += w[static_cast<std::size_t>(m)] * boxes[static_cast<std::size_t>(m)](s);
                v[i] = rho * std::polar(1.0, 0.5 * mu * std::log(rho * rho + eps));
            }
            break;
        }
        case Family::plane_wave: {
            const bool full = view.next() > 0.5;
            Box box = Box::read(view, n);
            if (full) box = Box::full(n);
            std::vector<double> k;
            for (int a = 0; a < n; ++a) k.push_back(view.next());
            const double t = view.next();
            for (std::size_t i = 0; i < g.size(); ++i) {
                normalized(i, x);
                double phase = 0.0;
                for (int a = 0; a < n; ++a) phase += k[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
                v[i] = box(s) * std::polar(1.0, t * phase);
            }
            break;
        }
        case Family::trig_mixture: {
            const Box box = Box::read(view, n);
            std::vector<Complex> z;
            std::vector<std::vector<double>> k;
            for (int m = 0; m < kModes; ++m) {
                const double re = view.next();
                z.emplace_back(re, view.next());
                k.emplace_back();
                for (int a = 0; a < n; ++a) k.back().push_back(view.next());
            }
            for (std::size_t i = 0; i < g.size(); ++i) {
                normalized(i, x);
                Complex sum{};
                for (int m = 0; m < kModes; ++m) {
                    double phase = 0.0;
                    for (int a = 0; a < n; ++a) phase += k[static_cast<std::size_t>(m)][static_cast<std::size_t>(a)] * s[static_cast<std::size_t>(a)];
                    sum += z[static_cast<std::size_t>(m)] * std::polar(1.0, kTwoPi * phase);
                }
                v[i] = box(s) * sum;
            }
            break;
        }
    }
    return v;
}

double dirichlet_energy(const GridFunction& v) {
    double s = 0.0;
    for (const Complex& z : gradient(v)) s += std::norm(z);
    return s * v.grid.weight();
}

// Functional value of the L^2-normalized candidate; +inf for a vanishing candidate.
double evaluate(const FormContext& ctx, const Candidate& c, double p, GridFunction* out = nullptr) {
    GridFunction v = build(c, ctx.grid());
    const double norm = v.l2_norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) return std::numeric_limits<double>::infinity();
    v.scale(1.0 / norm);
    const double value = ctx.transformed(v, p);
    if (out) *out = std::move(v);
    return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
}

bool better(const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.family != b.family) return static_cast<int>(a.family) < static_cast<int>(b.family);
    return a.index < b.index;
}

}  // namespace

FalsifyResult falsify(const OperatorSpec& spec, double p, std::uint64_t budget, std::uint64_t seed,
                      const FalsifyOptions& options) {
    if (budget < 1) throw std::invalid_argument("falsify: budget must be at least 1");
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("exponent p must be a finite number > 1");
    const FormContext ctx(spec);
    const int n = spec.n;

    const auto starts = std::max<std::uint64_t>(
        1, std::min<std::uint64_t>(budget, static_cast<std::uint64_t>(std::floor(options.search_fraction * static_cast<double>(budget)))));
    std::vector<Candidate> pool(starts);
    parallel_for(
        starts,
        [&](std::size_t i) {
            Candidate c = draw_candidate(static_cast<Family>(i % 3), i, seed, n);
            c.value = evaluate(ctx, c, p);
            pool[i] = std::move(c);
        },
        options.workers);

    Candidate best = pool.front();
    for (const Candidate& c : pool)
        if (better(c, best)) best = c;
    std::uint64_t used = starts;

    // Coordinate descent on the continuous parameters of the best start.
    std::vector<double> step;
    for (const Param& prm : best.params) step.push_back(prm.integer ? 0.0 : 0.1 * (prm.hi - prm.lo));
    while (used < budget && std::isfinite(best.value)) {
        bool improved = false;
        for (std::size_t j = 0; j < best.params.size() && used < budget; ++j) {
            if (step[j] == 0.0) continue;
            for (double dir : {1.0, -1.0}) {
                if (used >= budget) break;
                Candidate trial = best;
                Param& prm = trial.params[j];
                prm.value = std::clamp(prm.value + dir * step[j], prm.lo, prm.hi);
                if (prm.value == best.params[j].value) continue;
                trial.value = evaluate(ctx, trial, p);
                ++used;
                if (trial.value < best.value) {
                    best.params = std::move(trial.params);
                    best.value = trial.value;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) {
            double largest = 0.0;
            for (double& s : step) {
                s *= 0.5;
                largest = std::max(largest, s);
            }
            if (largest < 1e-9) break;
        }
    }

    FalsifyResult out;
    out.evaluations = used;
    out.family = best.family;
    out.start_index = best.index;
    out.value = best.value;
    evaluate(ctx, best, p, &out.witness);
    for (const Param& prm : best.params) {
        if (prm.name == "log10_eps")
            out.params["eps"] = std::pow(10.0, prm.value);
        else
            out.params[prm.name] = prm.value;
    }
    const double energy = out.witness.size() ? dirichlet_energy(out.witness) : 0.0;
    out.threshold = -options.tol_neg * (1.0 + energy);
    out.found = std::isfinite(out.value) && out.value < out.threshold;
    return out;
}

}  // namespace dissipate
