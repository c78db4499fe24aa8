#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "dissipate/errors.hpp"
#include "dissipate/expr.hpp"
#include "dissipate/formcheck.hpp"
#include "dissipate/grid.hpp"
#include "dissipate/operator_spec.hpp"
#include "dissipate/parallel.hpp"
#include "dissipate/pointwise.hpp"
#include "dissipate/semigroup.hpp"
#include "presets.hpp"
#include "report.hpp"

namespace dissipate::cli {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Bad command-line value; exit code 2.
struct InputError : Error {
    InputError(const std::string& field, const std::string& what) : Error(field + ": " + what) {}
};

struct Analysis {
    Verdict verdict;
    json numeric = json::object();
    json witness = json::object();
};

struct LoadedSpec {
    std::string source;
    std::string digest;
    OperatorSpec spec;
};

LoadedSpec load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("spec", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    return {path, content_digest(text), parse_spec(text)};
}

LoadedSpec preset(int id) {
    const std::string_view text = id == 1 ? kPresetExample1 : id == 2 ? kPresetExample2 : kPresetExample3;
    return {"preset:example" + std::to_string(id), content_digest(text), parse_spec(text)};
}

void require_p(double p, const char* field = "--p") {
    if (!std::isfinite(p) || !(p > 1.0)) throw InputError(field, "exponent must be a finite number > 1");
}

double conjugate(double p) { return p / (p - 1.0); }

// True when every node's skew parts match the first node's.
bool skew_parts_constant(const std::vector<SymDecomp>& ds) {
    if (ds.empty()) return true;
    const SymDecomp& ref = ds.front();
    double scale = 1.0 + frobenius_norm(ref.K_r) + frobenius_norm(ref.K_i);
    for (const SymDecomp& d : ds)
        if (frobenius_norm(d.K_r - ref.K_r) + frobenius_norm(d.K_i - ref.K_i) > 1e-12 * scale) return false;
    return true;
}

bool lower_order_vanish(const SampledCoefficients& sc) {
    for (const CoefficientSample& s : sc.nodes) {
        if (s.a != Complex{} || s.div_b != Complex{} || s.div_c != Complex{}) return false;
        for (std::size_t k = 0; k < s.b.size(); ++k)
            if (s.b[k] != Complex{} || s.c[k] != Complex{}) return false;
    }
    return true;
}

struct FieldLambda {
    double lambda = kInf;
    std::size_t node = 0;
    RealVector xi;
    std::optional<std::size_t> nonnegativity_violation;
    double violation_eigenvalue = 0.0;
};

FieldLambda field_lambda(const std::vector<SymDecomp>& ds) {
    std::vector<LambdaResult> per(ds.size());
    std::vector<std::optional<double>> bad(ds.size());
    parallel_for(ds.size(), [&](std::size_t i) {
        try {
            per[i] = lambda_of(ds[i]);
        } catch (const NonnegativityViolated& e) {
            bad[i] = e.min_eigenvalue();
        }
    });
    FieldLambda out;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (bad[i]) {
            if (!out.nonnegativity_violation) {
                out.nonnegativity_violation = i;
                out.violation_eigenvalue = *bad[i];
            }
            continue;
        }
        if (per[i].lambda < out.lambda) {
            out.lambda = per[i].lambda;
            out.node = i;
            out.xi = per[i].witness;
        }
    }
    return out;
}

std::vector<SymDecomp> decompositions(const SampledCoefficients& sc) {
    std::vector<SymDecomp> ds(sc.nodes.size());
    parallel_for(sc.nodes.size(), [&](std::size_t i) { ds[i] = decompose(coefficient_matrix(sc.nodes[i])); });
    return ds;
}

void add_interval(json& numeric, const FieldLambda& fl) {
    const PInterval iv = p_interval(fl.lambda);
    numeric["lambda"] = number(iv.lambda);
    numeric["p_min"] = number(iv.p_min);
    numeric["p_max"] = number(iv.p_max);
}

Analysis analyse_check(const OperatorSpec& spec, double p) {
    require_p(p);
    const SampledCoefficients sc = sample_on_grid(spec, Grid::from_spec(spec));
    const std::vector<SymDecomp> ds = decompositions(sc);

    std::vector<char> ok(ds.size());
    parallel_for(ds.size(), [&](std::size_t i) { ok[i] = check_p_condition(ds[i], p) ? 1 : 0; });
    const auto failing = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 0));

    Analysis a;
    const bool iff = lower_order_vanish(sc) && skew_parts_constant(ds);
    a.verdict.decision = failing == 0;
    if (iff) {
        a.verdict.criterion = Criterion::eq24_pointwise;
    } else {
        a.verdict.criterion = Criterion::w0_quasi;
        a.verdict.property = "quasi_dissipative";
        a.verdict.notes.push_back(
            "lower-order terms or a variable skew part are present: the pointwise condition is necessary-only for "
            "dissipativity and decides quasi-dissipativity");
    }

    a.numeric["p"] = p;
    a.numeric["p_conjugate"] = conjugate(p);
    a.numeric["nodes"] = ds.size();
    a.numeric["failing_nodes"] = failing;
    const FieldLambda fl = field_lambda(ds);
    if (fl.nonnegativity_violation) {
        a.numeric["lambda"] = nullptr;
        a.numeric["min_eigenvalue_re_a"] = fl.violation_eigenvalue;
        a.witness["nonnegativity_violated_at"] = vector_json(sc.nodes[*fl.nonnegativity_violation].x);
        a.verdict.notes.push_back("symmetric part of Re A is not positive semidefinite at some node");
    } else {
        add_interval(a.numeric, fl);
        if (!fl.xi.empty()) {
            a.witness["lambda_node"] = vector_json(sc.nodes[fl.node].x);
            a.witness["xi"] = vector_json(fl.xi);
        }
    }
    if (failing > 0) {
        const auto it = std::find(ok.begin(), ok.end(), 0);
        a.witness["first_failing_node"] = vector_json(sc.nodes[static_cast<std::size_t>(it - ok.begin())].x);
    }
    return a;
}

Analysis analyse_interval(const OperatorSpec& spec) {
    const SampledCoefficients sc = sample_on_grid(spec, Grid::from_spec(spec));
    const std::vector<SymDecomp> ds = decompositions(sc);
    const FieldLambda fl = field_lambda(ds);
    Analysis a;
    a.verdict.criterion = lower_order_vanish(sc) && skew_parts_constant(ds) ? Criterion::eq24_pointwise : Criterion::w0_quasi;
    if (a.verdict.criterion == Criterion::w0_quasi) a.verdict.property = "quasi_dissipative";
    a.numeric["nodes"] = ds.size();
    if (fl.nonnegativity_violation) {
        a.verdict.decision = false;
        a.verdict.notes.push_back("symmetric part of Re A is not positive semidefinite: no exponent is admissible");
        a.numeric["lambda"] = nullptr;
        a.numeric["min_eigenvalue_re_a"] = fl.violation_eigenvalue;
        a.witness["nonnegativity_violated_at"] = vector_json(sc.nodes[*fl.nonnegativity_violation].x);
        return a;
    }
    add_interval(a.numeric, fl);
    if (!fl.xi.empty()) {
        a.witness["lambda_node"] = vector_json(sc.nodes[fl.node].x);
        a.witness["xi"] = vector_json(fl.xi);
    }
    a.verdict.notes.push_back("the condition holds exactly for p in [p_min, p_max]");
    return a;
}

void require_constant(const OperatorSpec& spec) {
    auto check = [](const ComplexExpr& e, const std::string& base) {
        if (!e.re.is_constant()) throw InputError(base + ".re", "constant command needs constant coefficients");
        if (!e.im.is_constant()) throw InputError(base + ".im", "constant command needs constant coefficients");
    };
    const auto n = static_cast<std::size_t>(spec.n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            check(spec.A[i][j], "$.A[" + std::to_string(i) + "][" + std::to_string(j) + "]");
        check(spec.b[i], "$.b[" + std::to_string(i) + "]");
        check(spec.c[i], "$.c[" + std::to_string(i) + "]");
    }
    check(spec.a, "$.a");
}

Analysis analyse_constant(const OperatorSpec& spec, double p, std::optional<Complex> a_override = std::nullopt) {
    require_p(p);
    require_constant(spec);
    const auto n = static_cast<std::size_t>(spec.n);
    std::vector<double> centre;
    for (const Interval& iv : spec.domain) centre.push_back(0.5 * (iv.lo + iv.hi));
    ComplexMatrix A(n, n);
    ComplexVector drift(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) A(i, j) = spec.A[i][j].eval(centre);
        drift[i] = spec.b[i].eval(centre) + spec.c[i].eval(centre);
    }
    const Complex a0 = a_override ? *a_override : spec.a.eval(centre);
    const ConstVerdict v = constant_coeff_verdict(A, drift, a0, p);

    Analysis a;
    a.verdict.criterion = Criterion::const_coeff;
    a.verdict.decision = v.dissipative;
    a.verdict.notes.push_back("whole-space criterion for constant coefficients; the box only fixes the dimension");
    a.numeric["p"] = p;
    a.numeric["reason"] = std::string(to_string(v.reason));
    a.numeric["residual"] = v.residual;
    a.numeric["zero_order"] = v.zero_order;
    a.numeric["a_re"] = a0.real();
    if (v.inverse_gap) a.numeric["inverse_gap"] = *v.inverse_gap;
    if (v.V) a.witness["V"] = vector_json(*v.V);
    return a;
}

Analysis analyse_sufficiency(const OperatorSpec& spec, double p, double alpha, double beta) {
    require_p(p);
    if (!std::isfinite(alpha)) throw InputError("--alpha", "must be finite");
    if (!std::isfinite(beta)) throw InputError("--beta", "must be finite");
    const SampledCoefficients sc = sample_on_grid(spec, Grid::from_spec(spec));
    std::vector<QuadraticMinimum> per(sc.nodes.size());
    parallel_for(sc.nodes.size(), [&](std::size_t i) { per[i] = q_minimum(sc.nodes[i], p, alpha, beta); });

    std::size_t worst = 0;
    std::size_t failing = 0;
    for (std::size_t i = 0; i < per.size(); ++i) {
        if (!per[i].nonnegative) ++failing;
        if (per[i].minimum < per[worst].minimum) worst = i;
    }
    Analysis a;
    a.verdict.criterion = Criterion::q_sufficient;
    const bool holds = failing == 0;
    if (holds) {
        a.verdict.decision = true;
    } else {
        a.verdict.notes.push_back("the sufficient condition fails; this does not decide dissipativity");
    }
    a.numeric["p"] = p;
    a.numeric["alpha"] = alpha;
    a.numeric["beta"] = beta;
    a.numeric["condition_holds"] = holds;
    a.numeric["failing_nodes"] = failing;
    a.numeric["min_value"] = number(per[worst].minimum);
    a.numeric["hessian_min_eigenvalue"] = per[worst].hessian_min_eigenvalue;
    a.witness["worst_node"] = vector_json(sc.nodes[worst].x);
    return a;
}

std::string family_label(Family f) {
    switch (f) {
        case Family::phase_log: return "i";
        case Family::plane_wave: return "ii";
        case Family::trig_mixture: return "iii";
    }
    return "i";
}

Analysis analyse_falsify(const OperatorSpec& spec, double p, long long budget, long long seed) {
    require_p(p);
    if (budget < 1) throw InputError("--budget", "must be at least 1");
    if (seed < 0) throw InputError("--seed", "must be nonnegative");
    const FalsifyResult r = falsify(spec, p, static_cast<std::uint64_t>(budget), static_cast<std::uint64_t>(seed));
    Analysis a;
    a.verdict.criterion = Criterion::falsified;
    if (r.found) {
        a.verdict.decision = false;
    } else {
        a.verdict.notes.push_back("no counterexample found; the search cannot certify dissipativity");
    }
    a.numeric["p"] = p;
    a.numeric["budget"] = budget;
    a.numeric["seed"] = seed;
    a.numeric["evaluations"] = r.evaluations;
    a.numeric["found"] = r.found;
    a.numeric["value"] = number(r.value);
    a.numeric["threshold"] = number(r.threshold);
    a.witness["family"] = to_string(r.family);
    a.witness["family_id"] = family_label(r.family);
    a.witness["start_index"] = r.start_index;
    json params = json::object();
    for (const auto& [k, v] : r.params) params[k] = number(v);
    a.witness["params"] = params;
    return a;
}

struct SimOptions {
    double p = 2.0;
    double dt = 1e-4;
    double t_end = 0.01;
    std::string trace_csv;
    double init_t = 0.0;
    std::vector<double> init_k;
};

Analysis analyse_simulate(const OperatorSpec& spec, const SimOptions& o) {
    require_p(o.p);
    if (!(o.dt > 0.0) || !std::isfinite(o.dt)) throw InputError("--dt", "must be a positive number");
    if (!(o.t_end >= o.dt) || !std::isfinite(o.t_end)) throw InputError("--t-end", "must be at least --dt");
    if (spec.n > 2) throw InputError("$.n", "simulation supports n <= 2");
    const Grid grid = Grid::from_spec(spec);
    if (grid.size() > kMaxSimulationNodes) throw InputError("$.grid", "simulation supports at most 16384 nodes");
    std::vector<double> k = o.init_k;
    if (k.empty()) {
        k.assign(static_cast<std::size_t>(spec.n), 0.0);
        k.back() = 1.0;
    }
    if (k.size() != static_cast<std::size_t>(spec.n)) throw InputError("--init-k", "needs one entry per dimension");

    const DiscreteOperator op = discretize(spec, grid);
    const GridFunction u0 = GridFunction::from_function(grid, [&](std::span<const double> x) {
        double env = 1.0;
        double phase = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) {
            const Interval& iv = spec.domain[a];
            env *= bump(2.0 * (x[a] - iv.lo) / iv.length() - 1.0);
            phase += k[a] * x[a];
        }
        return env * std::polar(1.0, o.init_t * phase);
    });
    const NormTrace trace = evolve(op, u0, o.dt, o.t_end, o.p);
    if (!o.trace_csv.empty()) write_trace_csv(trace, o.trace_csv);

    double max_increase = -kInf;
    for (std::size_t i = 1; i < trace.norms.size(); ++i)
        max_increase = std::max(max_increase, (trace.norms[i] - trace.norms[i - 1]) / trace.norms.front());
    Analysis a;
    a.verdict.criterion = Criterion::simulated;
    a.verdict.decision = max_increase <= 1e-10;
    a.verdict.notes.push_back("observation of the discretized semigroup, not a proof");
    a.numeric["p"] = o.p;
    a.numeric["dt"] = o.dt;
    a.numeric["t_end"] = o.t_end;
    a.numeric["steps"] = trace.norms.size() - 1;
    a.numeric["nodes"] = grid.size();
    a.numeric["initial_norm"] = trace.norms.front();
    a.numeric["final_norm"] = trace.norms.back();
    a.numeric["max_relative_step_increase"] = number(max_increase);
    if (trace.norms.size() >= 10) {
        const OmegaEstimate om = estimate_omega(trace);
        a.numeric["omega"] = om.omega;
        a.numeric["omega_degenerate"] = om.degenerate;
    }
    if (trace.growth_rate) a.numeric["growth_rate"] = *trace.growth_rate;
    a.witness["init_t"] = o.init_t;
    a.witness["init_k"] = vector_json(k);
    return a;
}

Analysis analyse_example(int id) {
    const LoadedSpec ls = preset(id);
    Analysis a;
    json parts = json::object();
    auto pack = [](const Analysis& x) {
        return json{{"decision", x.verdict.decision ? json(*x.verdict.decision) : json(nullptr)},
                    {"criterion", to_string(x.verdict.criterion)},
                    {"numeric", x.numeric},
                    {"witness", x.witness}};
    };
    if (id == 1) {
        bool all = true;
        for (double p : {1.5, 2.0, 4.0}) {
            const Analysis c = analyse_check(ls.spec, p);
            all = all && c.verdict.decision.value_or(false);
            char key[32];
            std::snprintf(key, sizeof key, "check_p%g", p);
            parts[key] = pack(c);
        }
        parts["sufficiency_p2"] = pack(analyse_sufficiency(ls.spec, 2.0, 0.0, 0.0));
        parts["falsify_p2"] = pack(analyse_falsify(ls.spec, 2.0, 2000, 7));
        SimOptions so;
        so.p = 2.0;
        so.dt = 1e-5;
        so.t_end = 500 * 1e-5;
        parts["simulate_p2"] = pack(analyse_simulate(ls.spec, so));
        a.verdict.criterion = Criterion::eq24_pointwise;
        a.verdict.decision = all;
    } else if (id == 2) {
        parts["check_p2"] = pack(analyse_check(ls.spec, 2.0));
        const Analysis f = analyse_falsify(ls.spec, 2.0, 5000, 7);
        parts["falsify_p2"] = pack(f);
        SimOptions so;
        so.p = 2.0;
        so.dt = 1e-4;
        so.t_end = 0.01;
        so.init_t = 8.457;
        so.init_k = {0.0, 1.0};
        parts["simulate_p2"] = pack(analyse_simulate(ls.spec, so));
        a.verdict = f.verdict;
    } else {
        const Analysis c = analyse_constant(ls.spec, 4.0);
        parts["constant_p4"] = pack(c);
        parts["constant_p4_a_perturbed"] = pack(analyse_constant(ls.spec, 4.0, Complex(-0.99, 0.0)));
        parts["falsify_p4"] = pack(analyse_falsify(ls.spec, 4.0, 2000, 7));
        a.verdict = c.verdict;
    }
    a.numeric = parts;
    return a;
}

Report make_report(const std::vector<std::string>& args, const LoadedSpec& ls, Analysis a) {
    Report r;
    r.command.push_back("dissipate");
    r.command.insert(r.command.end(), args.begin(), args.end());
    r.spec = ls.source;
    r.spec_digest = ls.digest;
    r.verdict = std::move(a.verdict);
    r.numeric = std::move(a.numeric);
    r.witness = std::move(a.witness);
    return r;
}

}  // namespace

CommandResult run_command(const std::vector<std::string>& args) {
    CLI::App app{"Decide L^p-dissipativity of complex-coefficient elliptic operators", "dissipate"};
    app.require_subcommand(1);
    std::string format = "json";
    bool strict = false;
    bool timing = false;
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
    app.add_flag("--strict", strict, "Exit 1 when the verdict is negative");
    app.add_flag("--timing", timing, "Include wall-clock time in the report");

    std::string spec_path;
    double p = 0.0, alpha = 0.0, beta = 0.0;
    long long budget = 0, seed = 0;
    int example_id = 0;
    SimOptions sim;
    std::string init_k;

    auto with_spec = [&](CLI::App* sub) {
        sub->add_option("spec", spec_path, "Operator spec (JSON)")->required();
        sub->fallthrough();
        return sub;
    };
    auto* check = with_spec(app.add_subcommand("check", "Pointwise p-condition at every grid node"));
    check->add_option("--p", p, "Exponent")->required();
    auto* interval = with_spec(app.add_subcommand("interval", "Exact admissible exponent interval"));
    auto* constant = with_spec(app.add_subcommand("constant", "Constant-coefficient criterion"));
    constant->add_option("--p", p, "Exponent")->required();
    auto* sufficiency = with_spec(app.add_subcommand("sufficiency", "Quadratic-polynomial sufficient condition"));
    sufficiency->add_option("--p", p, "Exponent")->required();
    sufficiency->add_option("--alpha", alpha, "Integration-by-parts weight for b");
    sufficiency->add_option("--beta", beta, "Integration-by-parts weight for c");
    auto* fals = with_spec(app.add_subcommand("falsify", "Randomized counterexample search"));
    fals->add_option("--p", p, "Exponent")->required();
    fals->add_option("--budget", budget, "Functional evaluations")->required();
    fals->add_option("--seed", seed, "Random seed")->required();
    auto* simulate = with_spec(app.add_subcommand("simulate", "Implicit Euler simulation of u' = Au"));
    simulate->add_option("--p", sim.p, "Exponent of the tracked norm")->required();
    simulate->add_option("--dt", sim.dt, "Time step")->required();
    simulate->add_option("--t-end", sim.t_end, "Final time")->required();
    simulate->add_option("--trace-csv", sim.trace_csv, "Write the norm trace as CSV");
    simulate->add_option("--init-t", sim.init_t, "Initial phase speed t in u0 = bump * exp(i t <k, x>)");
    simulate->add_option("--init-k", init_k, "Initial wave vector, comma separated");
    auto* examples = app.add_subcommand("examples", "Reproduce the bundled worked examples");
    examples->add_option("--id", example_id, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
    examples->fallthrough();

    CommandResult result;
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    std::ostringstream out, err;
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        result.exit_code = app.exit(e, out, err);
        result.out = out.str();
        return result;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        result.exit_code = kInputError;
        result.err = err.str();
        return result;
    }

    try {
        if (!init_k.empty()) {
            std::stringstream ss(init_k);
            std::string item;
            while (std::getline(ss, item, ',')) {
                try {
                    std::size_t used = 0;
                    sim.init_k.push_back(std::stod(item, &used));
                    if (used != item.size()) throw std::invalid_argument(item);
                } catch (const std::logic_error&) {
                    throw InputError("--init-k", "expected comma-separated numbers");
                }
            }
        }

        const auto start = std::chrono::steady_clock::now();
        LoadedSpec ls;
        Analysis analysis;
        if (*examples) {
            ls = preset(example_id);
            analysis = analyse_example(example_id);
        } else {
            ls = load(spec_path);
            if (*check) analysis = analyse_check(ls.spec, p);
            else if (*interval) analysis = analyse_interval(ls.spec);
            else if (*constant) analysis = analyse_constant(ls.spec, p);
            else if (*sufficiency) analysis = analyse_sufficiency(ls.spec, p, alpha, beta);
            else if (*fals) analysis = analyse_falsify(ls.spec, p, budget, seed);
            else analysis = analyse_simulate(ls.spec, sim);
        }
        Report report = make_report(args, ls, std::move(analysis));
        if (timing)
            report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.out = render_report(report, format == "text" ? Format::text : Format::json);
        if (strict && report.verdict.decision == false) result.exit_code = kNotDissipative;
    } catch (const SpecError& e) {
        result.exit_code = kInputError;
        result.err = std::string("spec error at ") + e.what() + "\n";
    } catch (const ParseError& e) {
        result.exit_code = kInputError;
        result.err = std::string("expression error: ") + e.what() + "\n";
    } catch (const EvalError& e) {
        result.exit_code = kInputError;
        result.err = std::string("evaluation error: ") + e.what() + "\n";
    } catch (const InputError& e) {
        result.exit_code = kInputError;
        result.err = std::string("input error: ") + e.what() + "\n";
    } catch (const std::invalid_argument& e) {
        result.exit_code = kInputError;
        result.err = std::string("input error: ") + e.what() + "\n";
    } catch (const NumericError& e) {
        result.exit_code = kInputError;
        result.err = std::string("numeric failure: ") + e.what() + "\n";
    }
    return result;
}

}  // namespace dissipate::cli
