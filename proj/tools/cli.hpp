#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "craftmaps/craftmap.hpp"

namespace craftmaps::cli {

/// Every knob of every command. Defaults here; a --config file overrides
/// them; flags override the file.
struct RunConfig {
  std::string command;

  // data
  std::string data;
  std::string format = "csv";  // csv | libsvm | synth:<kind>
  int label_column = -1;
  bool header = false;
  std::string delimiter = ",";
  bool normalize = true;
  std::size_t synth_n = 1000;
  std::size_t synth_k = 2;
  double noise = 0.1;

  // feature map
  int q = 1;
  int r = 7;
  std::string method = "craftmap";
  std::size_t dim_d = 0;  // 0: taken from the data
  std::size_t dim_D = 0;  // 0: 8 * E
  std::vector<std::size_t> dim_E{256};
  double p = 2.0;
  bool untruncated = false;
  std::string down_kind;  // empty: method default

  // learner
  std::size_t ecoc_c = 0;  // 0: max(15, ceil(log2 k))
  std::size_t folds = 5;
  std::vector<double> lambda_grid;  // empty: default grid

  // experiment
  std::size_t n = 1000;
  std::size_t trials = 10;
  std::size_t repeats = 3;
  std::size_t bins = 20;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  std::string model;
  std::string out = ".";
};

/// Files produced by a command, keyed by name relative to RunConfig::out.
using Outputs = std::map<std::string, std::string>;

/// Parses argv-style arguments (without the program name) and runs the
/// command. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Throws on inconsistent configuration; called before any computation.
void validate(const RunConfig& config);

Outputs cmd_reconstruct(const RunConfig& config);
Outputs cmd_train(const RunConfig& config);
Outputs cmd_eval(const RunConfig& config);
Outputs cmd_bench(const RunConfig& config);
Outputs cmd_scree(const RunConfig& config);

/// Writes all outputs under `dir`, each through a temporary file and rename.
void write_outputs(const std::string& dir, const Outputs& outputs);

/// Canonical JSON text of the config (without output locations or thread count).
std::string config_json(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);

/// Feature map spec for the config at output dimension E.
FeatureMapSpec map_spec(const RunConfig& config, std::size_t input_dim, std::size_t output_dim,
                        std::uint64_t seed);

}  // namespace craftmaps::cli
