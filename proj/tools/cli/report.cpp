#include "report.hpp"

#include <cmath>
#include <sstream>

namespace dissipate::cli {

std::string to_string(Criterion c) {
    switch (c) {
        case Criterion::eq24_pointwise: return "eq24_pointwise";
        case Criterion::w0_quasi: return "w0_quasi";
        case Criterion::const_coeff: return "const_coeff";
        case Criterion::q_sufficient: return "q_sufficient";
        case Criterion::falsified: return "falsified";
        case Criterion::simulated: return "simulated";
    }
    return "eq24_pointwise";
}

std::string anchor_for(Criterion c) {
    switch (c) {
        case Criterion::eq24_pointwise:
            return "|p-2| |<Im A(x) xi, xi>| <= 2 sqrt(p-1) <Re A(x) xi, xi> for every real xi and every node x";
        case Criterion::w0_quasi:
            return "|p-2| |<Im A(x) xi, xi>| <= 2 sqrt(p-1) <Re A(x) xi, xi> for every real xi and node x "
                   "<=> A - omega I is L^p-dissipative for some omega >= 0";
        case Criterion::const_coeff:
            return "exists real V: 2 Re A V + Im b = 0, Re a + <Re A V, V> <= 0, and the p-condition on A";
        case Criterion::q_sufficient:
            return "Q(xi, eta) >= 0 for all xi, eta in R^n at every node implies L^p-dissipativity";
        case Criterion::falsified:
            return "a test function v with negative transformed functional disproves L^p-dissipativity";
        case Criterion::simulated:
            return "||u(t)||_p nonincreasing under implicit Euler for u' = A_h u";
    }
    return "";
}

nlohmann::json number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

nlohmann::json vector_json(const std::vector<double>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

nlohmann::json to_json(const Report& r) {
    nlohmann::json j;
    j["command"] = r.command;
    j["spec"] = {{"source", r.spec}, {"digest", r.spec_digest}};
    nlohmann::json verdict;
    verdict["decision"] = r.verdict.decision ? nlohmann::json(*r.verdict.decision) : nlohmann::json(nullptr);
    verdict["criterion"] = to_string(r.verdict.criterion);
    verdict["anchor"] = anchor_for(r.verdict.criterion);
    verdict["property"] = r.verdict.property;
    verdict["notes"] = r.verdict.notes;
    j["verdict"] = verdict;
    j["numeric"] = r.numeric;
    j["witness"] = r.witness;
    if (r.seconds) j["timing"] = {{"seconds", *r.seconds}};
    return j;
}

namespace {

void render_text_value(std::ostringstream& out, const nlohmann::json& v, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    for (const auto& [key, value] : v.items()) {
        if (value.is_object()) {
            out << pad << key << ":\n";
            render_text_value(out, value, indent + 2);
        } else {
            out << pad << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
        }
    }
}

std::string decision_text(const Verdict& v) {
    if (!v.decision) return "undetermined";
    const std::string prop = v.property == "quasi_dissipative" ? "quasi-dissipative" : "dissipative";
    return *v.decision ? prop : "not " + prop;
}

}  // namespace

std::string render_report(const Report& r, Format format) {
    if (format == Format::json) return to_json(r).dump(2) + "\n";

    std::ostringstream out;
    out << "command: ";
    for (std::size_t i = 0; i < r.command.size(); ++i) out << (i ? " " : "") << r.command[i];
    out << "\nspec: " << r.spec << " (digest " << r.spec_digest << ")\n";
    out << "decision: " << decision_text(r.verdict) << "\n";
    out << "criterion: " << to_string(r.verdict.criterion) << "\n";
    out << "anchor: " << anchor_for(r.verdict.criterion) << "\n";
    for (const auto& note : r.verdict.notes) out << "note: " << note << "\n";
    out << "numeric:\n";
    render_text_value(out, r.numeric, 2);
    out << "witness:\n";
    render_text_value(out, r.witness, 2);
    if (r.seconds) out << "timing: " << *r.seconds << " s\n";
    return out.str();
}

}  // namespace dissipate::cli
