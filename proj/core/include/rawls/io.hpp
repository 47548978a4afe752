#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rawls/eval.hpp"
#include "rawls/moments.hpp"
#include "rawls/oracle.hpp"
#include "rawls/stats.hpp"
#include "rawls/types.hpp"

namespace rawls::io {

inline constexpr const char* kToolVersion = "0.1.0";

// Malformed input content (bad header, bad row, bad JSON shape).
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Filesystem-level failure (missing file, unwritable path).
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Dataset CSV: header "z,y,f1,...,fd" (or "z,y,score"), '.' decimals.
stats::LabeledDataset read_dataset_csv(const std::string& path);
void write_dataset_csv(const stats::LabeledDataset& data, const std::string& path);

// Stats file: {"tool_version", "p", "d", "subpops": [{y, z, count, mean, cov}]}.
nlohmann::json stats_to_json(const MomentTable& table);
MomentTable stats_from_json(const nlohmann::json& j);

// Model file: {"tool_version", "type": "threshold"|"linear", "w", "b",
// "r_star", "j_star", "method"}.
nlohmann::json model_to_json(const eval::AnyModel& model, const std::string& method);
std::pair<eval::AnyModel, std::string> model_from_json(const nlohmann::json& j);

// Finite distribution: {"points", "p", "mass": [{"x", "y", "z", "prob"}]}.
oracle::FiniteDistribution distribution_from_json(const nlohmann::json& j);
nlohmann::json distribution_to_json(const oracle::FiniteDistribution& dist);

nlohmann::json report_to_json(const EvaluationReport& report);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const nlohmann::json& j, const std::string& path);
void write_text_file(const std::string& text, const std::string& path);

// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double v);

}  // namespace rawls::io
