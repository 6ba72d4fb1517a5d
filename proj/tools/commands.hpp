#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfound/experiments.hpp"

namespace qfound::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

// Bad flags or config content; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { kCsv, kJson };

struct RunConfig {
  ExperimentSpec experiment;
  std::string device = "ideal";
  std::int64_t shots = 8192;
  std::uint64_t seed = 1;
  bool mitigation = false;
  bool exact = false;  // exact probabilities instead of sampled shots
  std::string output = "-";
  Format format = Format::kJson;
};

struct SweepConfig {
  RunConfig run;
  std::vector<int> n_values;                // general bomb
  std::vector<double> theta_over_pi;        // general bomb θN, or the Hardy diagonal
  std::vector<double> theta0_over_pi;       // Hardy grid
  std::vector<double> theta1_over_pi;
  int repeats = 1;
  int threads = 1;
};

// Column order of every CSV table.
const std::vector<std::string>& csv_columns();

struct Row {
  std::string experiment;
  std::optional<int> n;
  std::optional<double> theta_over_pi;
  std::optional<double> theta0_over_pi;
  std::optional<double> theta1_over_pi;
  std::optional<std::int64_t> shots;  // empty for exact probabilities
  std::uint64_t seed = 0;
  std::string observable;
  std::optional<double> value;
  std::optional<double> theory;
  std::optional<double> std_dev;
  std::string device;
  bool mitigated = false;
};

std::string to_csv(const std::vector<Row>& rows);
nlohmann::ordered_json to_json(const std::vector<Row>& rows);

RunConfig run_config_from_json(const nlohmann::json& doc);
SweepConfig sweep_config_from_json(const nlohmann::json& doc);
void validate(const RunConfig& config);
void validate(const SweepConfig& config);

// Full result document of one run.
nlohmann::ordered_json run_document(const RunConfig& config);
// The same run flattened into table rows.
std::vector<Row> run_rows(const nlohmann::ordered_json& doc, const RunConfig& config);

// Rows in grid order: for each point, the exact ideal row, then one row per
// repeat for the configured device, then mitigated rows when enabled.
std::vector<Row> sweep_rows(const SweepConfig& config);

// Parses "a:b:step" (inclusive) or "a,b,c".
std::vector<double> parse_grid(const std::string& text);

// Entry point shared by the executable and the tests.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qfound::cli
