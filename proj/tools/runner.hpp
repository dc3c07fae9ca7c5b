#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qelab/measures.hpp"

namespace qe::cli {

enum class Experiment { identities, eisenstein_check, mu_scan, quasimode_scan, ehrenfest, rankin_selberg };

const char* experiment_name(Experiment e);
std::optional<Experiment> parse_experiment(const std::string& s);

enum class ProfileShape { bump, gaussian };
enum class Route { unfolded, quadrature, both };

struct ProfileConfig {
  ProfileShape shape = ProfileShape::gaussian;
  std::vector<double> widths;
  int nodes = 128;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::identities;
  std::vector<double> r_values;
  std::vector<double> delta_r_values;
  std::vector<double> log_r_values;  // ehrenfest windows L
  std::vector<std::pair<double, double>> pairs;  // rankin-selberg (r1, r2)
  std::optional<cplx> s;                         // rankin-selberg Mellin parameter
  ProfileConfig profile;
  BumpSpec psi;
  int k = 0;
  Route route = Route::both;
  bool direct_quasimode = false;
  MeasurePolicy policy;
  std::string output_path;
  std::uint64_t seed = 1;
  bool timing_column = false;
  nlohmann::json source;  // the config as given, echoed into the manifest
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Defaults for the experiment, then overridden by the JSON document. Unknown
// keys and wrong types raise ConfigError naming the field.
ExperimentConfig default_config(Experiment e);
ExperimentConfig parse_config(const std::string& text, std::optional<Experiment> expected = {});
ExperimentConfig load_config(const std::string& path, std::optional<Experiment> expected = {});
// Envelope checks; the message names the violated bound.
void validate_config(const ExperimentConfig& c);

struct ResultRow {
  std::vector<std::string> params;
  cplx computed, predicted;
  bool has_prediction = true;
  double tail_bound = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::vector<std::string> extra;
  double wall_seconds = 0.0;
};

struct ResultTable {
  std::string experiment;
  std::vector<std::string> param_names;
  std::vector<std::string> extra_names;
  std::vector<std::string> notes;  // '#' metadata lines
  std::vector<ResultRow> rows;

  bool all_pass() const;
};

// Runs the sweep with up to `threads` workers; rows come back in grid order.
ResultTable run_experiment(const ExperimentConfig& c, int threads);

std::string format_table(const ResultTable& t, bool timing_column);
nlohmann::json make_manifest(const ExperimentConfig& c, const ResultTable& t, int threads);

// Output directory: the env var QELAB_OUTPUT_DIR if set, else the working directory.
std::string default_output_path(Experiment e);

// print_prediction
struct PredictionArgs {
  double rj = 1e4;
  std::vector<double> delta_r{0.0};
  double width = 0.0;  // 0: no profile, mass column omitted
  ProfileShape shape = ProfileShape::gaussian;
  BumpSpec psi;
  int nodes = 128;
};
std::string format_prediction(const PredictionArgs& a);

}  // namespace qe::cli
