#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "craftmaps/data.hpp"
#include "craftmaps/error.hpp"
#include "craftmaps/random.hpp"

namespace craftmaps::cli {

namespace fs = std::filesystem;

std::string config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = c.command;
  j["data"] = c.data;
  j["format"] = c.format;
  j["label_column"] = c.label_column;
  j["header"] = c.header;
  j["delimiter"] = c.delimiter;
  j["normalize"] = c.normalize;
  j["synth_n"] = c.synth_n;
  j["synth_k"] = c.synth_k;
  j["noise"] = c.noise;
  j["q"] = c.q;
  j["r"] = c.r;
  j["method"] = c.method;
  j["dim_d"] = c.dim_d;
  j["dim_D"] = c.dim_D;
  j["dim_E"] = c.dim_E;
  j["p"] = c.p;
  j["untruncated"] = c.untruncated;
  j["down_kind"] = c.down_kind;
  j["ecoc_c"] = c.ecoc_c;
  j["folds"] = c.folds;
  j["lambda_grid"] = c.lambda_grid;
  j["n"] = c.n;
  j["trials"] = c.trials;
  j["repeats"] = c.repeats;
  j["bins"] = c.bins;
  j["seed"] = c.seed;
  j["model"] = c.model;
  return j.dump();
}

std::uint64_t config_hash(const RunConfig& config) { return fnv1a64(config_json(config)); }

FeatureMapSpec map_spec(const RunConfig& c, std::size_t input_dim, std::size_t output_dim,
                        std::uint64_t seed) {
  FeatureMapSpec spec;
  spec.method = parse_method(c.method);
  spec.input_dim = input_dim;
  spec.output_dim = output_dim;
  spec.up_dim = is_craftmap(spec.method) ? (c.dim_D ? c.dim_D : 8 * output_dim) : 0;
  spec.q = c.q;
  spec.r = c.r;
  spec.p = c.p;
  spec.sampling = c.untruncated ? DegreeSampling::kUntruncated : DegreeSampling::kTruncated;
  if (!c.down_kind.empty()) spec.down_kind = parse_projector_kind(c.down_kind);
  spec.seed = seed;
  return spec;
}

void validate(const RunConfig& c) {
  static const std::vector<std::string> commands{"reconstruct", "train", "eval", "bench", "scree"};
  if (std::find(commands.begin(), commands.end(), c.command) == commands.end())
    throw InvalidArgument("unknown command '" + c.command + "'");

  PolyKernelParams params(c.q, c.r);
  DegreeSampler sampler(c.p, c.r,
                        c.untruncated ? DegreeSampling::kUntruncated : DegreeSampling::kTruncated);
  Method method = parse_method(c.method);
  if (!c.down_kind.empty()) parse_projector_kind(c.down_kind);

  const bool file_format = c.format == "csv" || c.format == "libsvm";
  if (!file_format) {
    if (c.format.rfind("synth:", 0) != 0)
      throw InvalidArgument("unknown --format '" + c.format + "' (csv, libsvm or synth:<kind>)");
    parse_synth_kind(c.format.substr(6));
    if (c.dim_d == 0) throw InvalidArgument("synthetic data needs --dim-d");
  } else {
    if (c.data.empty()) throw InvalidArgument("--data is required for --format " + c.format);
    if (!fs::exists(c.data)) throw InvalidArgument("dataset '" + c.data + "' does not exist");
  }
  if (c.delimiter.size() != 1) throw InvalidArgument("--delimiter must be a single character");

  if (c.command != "eval") {
    if (c.dim_E.empty()) throw InvalidArgument("--dim-E needs at least one value");
    for (std::size_t E : c.dim_E) {
      if (E == 0) throw InvalidArgument("--dim-E values must be positive");
      if (is_craftmap(method)) {
        std::size_t D = c.dim_D ? c.dim_D : 8 * E;
        if (E >= D)
          throw InvalidArgument("CRAFTMap methods need E < D (E = " + std::to_string(E) +
                                ", D = " + std::to_string(D) + ")");
      }
    }
  }
  if (c.command == "train" && c.dim_E.size() != 1)
    throw InvalidArgument("train takes a single --dim-E value");
  if (c.command == "train" && c.folds < 2) throw InvalidArgument("--folds must be >= 2");
  for (double v : c.lambda_grid) {
    if (!(v > 0.0)) throw InvalidArgument("--lambda-grid values must be positive");
  }
  if (c.command == "eval") {
    if (c.model.empty()) throw InvalidArgument("eval needs --model");
    if (!fs::exists(c.model)) throw InvalidArgument("model file '" + c.model + "' does not exist");
  }
  if (c.trials == 0) throw InvalidArgument("--trials must be >= 1");
  if (c.n == 0) throw InvalidArgument("--n must be >= 1");
  if (c.repeats == 0) throw InvalidArgument("--repeats must be >= 1");
  if (c.bins == 0) throw InvalidArgument("--bins must be >= 1");
  if (c.threads == 0) throw InvalidArgument("--threads must be >= 1");
}

void write_outputs(const std::string& dir, const Outputs& outputs) {
  fs::create_directories(dir);
  for (const auto& [name, content] : outputs) {
    fs::path target = fs::path(dir) / name;
    fs::path tmp = target;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw Error("cannot write '" + tmp.string() + "'");
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      if (!out) throw Error("failed writing '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Compact random feature maps for polynomial kernels"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI file of option values (flags take precedence)");

  app.add_option("--data", c.data, "Dataset path");
  app.add_option("--format", c.format, "csv | libsvm | synth:<annuli|gaussian-blobs|xor-grid>");
  app.add_option("--label-column", c.label_column, "CSV label column, negative counts from the end");
  app.add_flag("--header,!--no-header", c.header, "CSV has a header row");
  app.add_option("--delimiter", c.delimiter, "CSV delimiter");
  app.add_flag("--normalize,!--no-normalize", c.normalize, "Scale rows to unit length");
  app.add_option("--synth-n", c.synth_n, "Synthetic dataset size");
  app.add_option("--synth-k", c.synth_k, "Synthetic class count");
  app.add_option("--noise", c.noise, "Synthetic noise level");
  app.add_option("--q", c.q, "Kernel offset q");
  app.add_option("--r", c.r, "Kernel degree r");
  app.add_option("--method", c.method, "rfm | rfm-srht | craftmap | craftmap-srht");
  app.add_option("--dim-d", c.dim_d, "Input dimension (synthetic data, or a check on file data)");
  app.add_option("--dim-D", c.dim_D, "Up-projection dimension (default 8 E)");
  app.add_option("--dim-E", c.dim_E, "Output dimension(s), comma separated")->delimiter(',');
  app.add_option("--p", c.p, "Degree sampling parameter p > 1");
  app.add_flag("--untruncated", c.untruncated, "Untruncated geometric degree sampling (p = 2)");
  app.add_option("--down-kind", c.down_kind, "dense-rademacher | dense-gaussian | srht");
  app.add_option("--ecoc-c", c.ecoc_c, "ECOC code length (0: automatic)");
  app.add_option("--folds", c.folds, "Cross-validation folds");
  app.add_option("--lambda-grid", c.lambda_grid, "Ridge lambda grid, comma separated")->delimiter(',');
  app.add_option("--n", c.n, "Points per trial / rows per benchmark");
  app.add_option("--trials", c.trials, "Independent trials");
  app.add_option("--repeats", c.repeats, "Benchmark repetitions (best time kept)");
  app.add_option("--bins", c.bins, "Weight histogram bins");
  app.add_option("--seed", c.seed, "Root seed");
  app.add_option("--threads", c.threads, "Worker threads");
  app.add_option("--model", c.model, "Model file for eval");
  app.add_option("--out", c.out, "Output directory");

  app.add_subcommand("reconstruct", "Kernel reconstruction error (nrms) over trials");
  app.add_subcommand("train", "Single-pass ECOC ridge training");
  app.add_subcommand("eval", "Classification metrics of a trained model");
  app.add_subcommand("bench", "Projection and Hessian timings");
  app.add_subcommand("scree", "Spectra of exact, direct and CRAFTMap Gram matrices");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int status = app.exit(e, out, err);
    return status == 0 ? 0 : 2;
  }
  c.command = app.get_subcommands().front()->get_name();

  try {
    validate(c);
  } catch (const std::exception& e) {
    err << "craftmaps " << c.command << ": " << e.what() << '\n';
    return 2;
  }
  try {
    Outputs outputs;
    if (c.command == "reconstruct") outputs = cmd_reconstruct(c);
    else if (c.command == "train") outputs = cmd_train(c);
    else if (c.command == "eval") outputs = cmd_eval(c);
    else if (c.command == "bench") outputs = cmd_bench(c);
    else outputs = cmd_scree(c);
    write_outputs(c.out, outputs);
    for (const auto& [name, content] : outputs) out << (fs::path(c.out) / name).string() << '\n';
  } catch (const std::exception& e) {
    err << "craftmaps " << c.command << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace craftmaps::cli
