#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "craftmaps/craftmaps.hpp"
#include "craftmaps/parallel.hpp"

namespace craftmaps::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string wall_clock() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

Json provenance(const RunConfig& c) {
  Json j;
  j["config"] = Json::parse(config_json(c));
  j["seed"] = c.seed;
  j["config_hash"] = config_hash(c);
  j["version"] = kVersion;
  j["wall_clock"] = wall_clock();
  return j;
}

std::string csv_header(const RunConfig& c) {
  std::ostringstream out;
  out << "# config: " << config_json(c) << '\n';
  out << "# seed: " << c.seed << '\n';
  out << "# config_hash: " << config_hash(c) << '\n';
  out << "# version: " << kVersion << '\n';
  out << "# wall_clock: " << wall_clock() << '\n';
  return out.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

Dataset load_data(const RunConfig& c, std::size_t* zero_rows = nullptr) {
  Dataset data;
  if (c.format == "csv") {
    CsvOptions options;
    options.label_column = c.label_column;
    options.has_header = c.header;
    options.delimiter = c.delimiter.front();
    data = load_csv(c.data, options);
  } else if (c.format == "libsvm") {
    data = load_libsvm(c.data);
  } else {
    data = synth(parse_synth_kind(c.format.substr(6)), c.synth_n, c.dim_d, c.synth_k, c.noise,
                 derive_seed(c.seed, "data"));
  }
  if (c.dim_d != 0 && data.dim() != c.dim_d)
    throw DimensionMismatch("dataset dimension vs --dim-d", c.dim_d, data.dim());
  if (c.normalize) {
    NormalizeResult normalized = unit_normalize(std::move(data));
    if (zero_rows) *zero_rows = normalized.zero_rows;
    data = std::move(normalized.data);
  }
  return data;
}

std::size_t default_code_length(std::size_t k) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < k) ++bits;
  return std::max<std::size_t>(15, bits);
}

RidgeAccumulator accumulate_sharded(const Matrix& Z, std::span<const int> labels,
                                    const CodeBook& codebook, unsigned threads) {
  const std::size_t n = static_cast<std::size_t>(Z.rows());
  const std::size_t shards = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  std::vector<RidgeAccumulator> parts(shards, RidgeAccumulator(Z.cols(), codebook));
  const std::size_t chunk = (n + shards - 1) / shards;
  parallel_blocks(shards, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      std::size_t lo = std::min(n, s * chunk), hi = std::min(n, lo + chunk);
      if (lo == hi) continue;
      Matrix block = Z.middleRows(lo, hi - lo);
      parts[s].accumulate(block, labels.subspan(lo, hi - lo));
    }
  });
  for (std::size_t s = 1; s < shards; ++s) parts[0].merge(parts[s]);
  return std::move(parts[0]);
}

}  // namespace

Outputs cmd_reconstruct(const RunConfig& c) {
  const Dataset data = load_data(c);
  const PolyKernelParams params(c.q, c.r);
  const Method method = parse_method(c.method);

  std::ostringstream csv;
  csv << csv_header(c) << "method,D,E,trial,trial_seed,nrms\n";
  Json summary = provenance(c);
  Json rows = Json::array();
  for (std::size_t E : c.dim_E) {
    std::vector<double> errors;
    for (std::size_t t = 0; t < c.trials; ++t) {
      const std::uint64_t trial_seed = derive_seed(c.seed, "trial", t);
      auto idx = sample_rows(data.rows(), c.n, derive_seed(trial_seed, "points"));
      Matrix X = subset(data, idx).X;
      FeatureMap map = FeatureMap::build(map_spec(c, data.dim(), E, derive_seed(trial_seed, "map", E)));
      double err = nrms_error(gram_matrix(X, params), feature_gram(map.apply_batch(X, c.threads)));
      errors.push_back(err);
      std::size_t D = is_craftmap(method) ? map.spec().up_dim : E;
      csv << c.method << ',' << D << ',' << E << ',' << t << ',' << trial_seed << ',' << fmt(err)
          << '\n';
    }
    Json row;
    row["E"] = E;
    row["D"] = is_craftmap(method) ? (c.dim_D ? c.dim_D : 8 * E) : E;
    row["points"] = std::min(c.n, data.rows());
    row["median_nrms"] = median(errors);
    row["min_nrms"] = *std::min_element(errors.begin(), errors.end());
    row["max_nrms"] = *std::max_element(errors.begin(), errors.end());
    row["per_trial"] = errors;
    rows.push_back(row);
  }
  summary["method"] = c.method;
  summary["rows"] = rows;
  return {{"reconstruct_trials.csv", csv.str()}, {"reconstruct_summary.json", dump(summary)}};
}

Outputs cmd_train(const RunConfig& c) {
  Json timings;
  Stopwatch load_clock;
  std::size_t zero_rows = 0;
  const Dataset data = load_data(c, &zero_rows);
  timings["load_seconds"] = load_clock.seconds();
  if (data.num_classes < 2)
    throw InvalidArgument("training needs at least 2 classes, dataset has " +
                          std::to_string(data.num_classes));

  const std::size_t E = c.dim_E.front();
  const std::size_t code_length = c.ecoc_c ? c.ecoc_c : default_code_length(data.num_classes);
  CodeBook codebook = make_codebook(data.num_classes, code_length, derive_seed(c.seed, "codebook"));

  Stopwatch build_clock;
  FeatureMap map = FeatureMap::build(map_spec(c, data.dim(), E, derive_seed(c.seed, "map")));
  timings["build_seconds"] = build_clock.seconds();

  Stopwatch feature_clock;
  Matrix Z = map.apply_batch(data.X, c.threads);
  timings["featurize_seconds"] = feature_clock.seconds();

  Stopwatch hessian_clock;
  RidgeAccumulator acc = accumulate_sharded(Z, data.y, codebook, c.threads);
  timings["hessian_seconds"] = hessian_clock.seconds();

  Stopwatch cv_clock;
  std::vector<double> grid = c.lambda_grid.empty() ? default_lambda_grid() : c.lambda_grid;
  LambdaSelection selection = select_lambda(Z, data.y, codebook, c.folds, grid,
                                            derive_seed(c.seed, "folds"));
  timings["cv_seconds"] = cv_clock.seconds();

  Stopwatch solve_clock;
  EcocModel ecoc = solve(acc, selection.lambda);
  timings["solve_seconds"] = solve_clock.seconds();

  std::vector<int> predicted = ecoc.predict_batch(Z);
  const double train_error = classification_error(predicted, data.y);

  ClassifierModel model{map.spec(), ecoc, data.label_names, c.seed, config_hash(c)};
  std::ostringstream bin(std::ios::binary);
  write_classifier(bin, model);

  Json log = provenance(c);
  log["rows"] = data.rows();
  log["input_dim"] = data.dim();
  log["up_dim"] = map.spec().up_dim;
  log["output_dim"] = E;
  log["classes"] = data.num_classes;
  log["code_length"] = code_length;
  log["min_hamming_distance"] = codebook.min_hamming_distance();
  log["zero_rows"] = zero_rows;
  log["lambda"] = selection.lambda;
  log["lambda_grid"] = selection.grid;
  log["cv_error"] = selection.cv_error;
  log["train_error"] = train_error;
  log["relative_residual"] = relative_residual(acc, ecoc);
  log["timings"] = timings;
  return {{"model.bin", bin.str()}, {"train_log.json", dump(log)}};
}

Outputs cmd_eval(const RunConfig& c) {
  const ClassifierModel model = load_classifier(c.model);
  const Dataset data = load_data(c);
  if (data.dim() != model.map.input_dim)
    throw DimensionMismatch("test set dimension vs model input dimension", model.map.input_dim,
                            data.dim());

  std::vector<int> truth(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const std::string& name = data.label_names.at(static_cast<std::size_t>(data.y[i]));
    auto it = std::find(model.label_names.begin(), model.label_names.end(), name);
    if (it == model.label_names.end())
      throw InvalidArgument("test label '" + name + "' is unknown to the model");
    truth[i] = static_cast<int>(it - model.label_names.begin());
  }

  FeatureMap map = FeatureMap::build(model.map);
  std::vector<int> predicted = model.ecoc.predict_batch(map.apply_batch(data.X, c.threads));
  const std::size_t k = model.ecoc.codebook().num_classes();
  Histogram hist = weight_histogram(model.ecoc.weights(), c.bins);

  Json metrics = provenance(c);
  metrics["model_seed"] = model.root_seed;
  metrics["model_config_hash"] = model.config_hash;
  metrics["rows"] = data.rows();
  metrics["error"] = classification_error(predicted, truth);
  metrics["labels"] = model.label_names;
  metrics["confusion"] = confusion_matrix(predicted, truth, k);
  metrics["lambda"] = model.ecoc.lambda();
  metrics["weight_histogram"] = {{"min", hist.min}, {"max", hist.max}, {"counts", hist.counts}};

  std::ostringstream csv;
  csv << csv_header(c) << "bin,lower,upper,count\n";
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    double lo = hist.min + hist.bin_width() * static_cast<double>(b);
    double hi = b + 1 == hist.counts.size() ? hist.max : lo + hist.bin_width();
    csv << b << ',' << fmt(lo) << ',' << fmt(hi) << ',' << hist.counts[b] << '\n';
  }
  return {{"eval_metrics.json", dump(metrics)}, {"weight_histogram.csv", csv.str()}};
}

Outputs cmd_bench(const RunConfig& c) {
  const Dataset data = load_data(c);
  auto idx = sample_rows(data.rows(), c.n, derive_seed(c.seed, "points"));
  const Matrix X = subset(data, idx).X;
  const Method method = parse_method(c.method);
  CodeBook codebook = make_codebook(2, 1, derive_seed(c.seed, "codebook"));
  std::vector<int> labels(static_cast<std::size_t>(X.rows()));
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 2);

  std::ostringstream csv;
  csv << csv_header(c) << "method,d,D,E,n,up_seconds,down_seconds,hessian_seconds\n";
  for (std::size_t E : c.dim_E) {
    FeatureMap map = FeatureMap::build(map_spec(c, data.dim(), E, derive_seed(c.seed, "map", E)));
    double up = INFINITY, down = 0.0, hessian = INFINITY;
    if (is_craftmap(method)) down = INFINITY;
    for (std::size_t rep = 0; rep < c.repeats; ++rep) {
      Matrix Z;
      if (const auto* cm = std::get_if<CraftMapModel>(&map.model())) {
        Stopwatch up_clock;
        Matrix U = apply_up_batch(cm->up(), X, c.threads);
        up = std::min(up, up_clock.seconds());
        Stopwatch down_clock;
        Z = apply_down_batch(cm->down(), U, c.threads);
        down = std::min(down, down_clock.seconds());
      } else {
        Stopwatch up_clock;
        Z = map.apply_batch(X, c.threads);
        up = std::min(up, up_clock.seconds());
      }
      Stopwatch hessian_clock;
      RidgeAccumulator acc = accumulate_sharded(Z, labels, codebook, c.threads);
      hessian = std::min(hessian, hessian_clock.seconds());
    }
    const std::size_t D = is_craftmap(method) ? map.spec().up_dim : E;
    csv << c.method << ',' << data.dim() << ',' << D << ',' << E << ',' << X.rows() << ','
        << fmt(up) << ',' << fmt(down) << ',' << fmt(hessian) << '\n';
  }
  Json meta = provenance(c);
  meta["rows"] = X.rows();
  meta["input_dim"] = data.dim();
  meta["timing"] = "best of repeats, seconds";
  return {{"bench.csv", csv.str()}, {"bench_meta.json", dump(meta)}};
}

Outputs cmd_scree(const RunConfig& c) {
  const Dataset data = load_data(c);
  const PolyKernelParams params(c.q, c.r);
  const bool srht = parse_method(c.method) == Method::kRfmSrht ||
                    parse_method(c.method) == Method::kCraftMapSrht;
  auto idx = sample_rows(data.rows(), c.n, derive_seed(c.seed, "points"));
  const Matrix X = subset(data, idx).X;
  const std::vector<double> exact = symmetric_spectrum(gram_matrix(X, params));

  std::ostringstream csv;
  csv << csv_header(c) << "E,series,index,value\n";
  Json summary = provenance(c);
  Json rows = Json::array();
  for (std::size_t E : c.dim_E) {
    const std::uint64_t seed = derive_seed(c.seed, "map", E);
    RunConfig direct = c;
    direct.method = srht ? "rfm-srht" : "rfm";
    RunConfig compact = c;
    compact.method = srht ? "craftmap-srht" : "craftmap";
    SpectrumReport rfm = scree(FeatureMap::build(map_spec(direct, data.dim(), E, seed))
                                   .apply_batch(X, c.threads));
    SpectrumReport craft = scree(FeatureMap::build(map_spec(compact, data.dim(), E, seed))
                                     .apply_batch(X, c.threads));
    const std::size_t len = std::min<std::size_t>(static_cast<std::size_t>(X.rows()), E);
    auto emit = [&](const char* series, const std::vector<double>& values, bool square) {
      for (std::size_t i = 0; i < len; ++i) {
        double v = i < values.size() ? values[i] : 0.0;
        csv << E << ',' << series << ',' << i << ',' << fmt(square ? v * v : v) << '\n';
      }
    };
    emit("exact", exact, false);
    emit("rfm", rfm.singular_values, true);
    emit("craftmap", craft.singular_values, true);

    std::size_t exact_rank = 0;
    for (double v : exact) exact_rank += v > exact.front() * 1e-8;
    Json row;
    row["E"] = E;
    row["D"] = c.dim_D ? c.dim_D : 8 * E;
    row["exact_rank"] = exact_rank;
    row["rfm_rank"] = rfm.numerical_rank;
    row["craftmap_rank"] = craft.numerical_rank;
    rows.push_back(row);
  }
  summary["points"] = X.rows();
  summary["threshold_factor"] = 1e-8;
  summary["rows"] = rows;
  return {{"scree.csv", csv.str()}, {"scree_summary.json", dump(summary)}};
}

}  // namespace craftmaps::cli
