#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dissipate::cli {

enum class Criterion { eq24_pointwise, w0_quasi, const_coeff, q_sufficient, falsified, simulated };

std::string to_string(Criterion c);

/// Mathematical statement behind a criterion, printed verbatim in text reports.
std::string anchor_for(Criterion c);

enum class Format { json, text };

struct Verdict {
    std::optional<bool> decision;  // empty = undetermined
    Criterion criterion = Criterion::eq24_pointwise;
    std::string property = "dissipative";  // or "quasi_dissipative"
    std::vector<std::string> notes;
};

struct Report {
    std::vector<std::string> command;
    std::string spec;         // path or preset name
    std::string spec_digest;  // content hash
    Verdict verdict;
    nlohmann::json numeric = nlohmann::json::object();
    nlohmann::json witness = nlohmann::json::object();
    std::optional<double> seconds;  // only with --timing
};

/// JSON-safe number: non-finite values become the strings "inf", "-inf", "nan".
nlohmann::json number(double v);
nlohmann::json vector_json(const std::vector<double>& v);

nlohmann::json to_json(const Report& r);

/// Deterministic rendering; JSON keys are sorted.
std::string render_report(const Report& r, Format format);

}  // namespace dissipate::cli
