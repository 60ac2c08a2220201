#include "craftmaps/eval.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "craftmaps/error.hpp"
#include "craftmaps/random.hpp"

namespace craftmaps {

double nrms_error(const Matrix& exact, const Matrix& approx) {
  if (exact.rows() != approx.rows() || exact.cols() != approx.cols())
    throw DimensionMismatch("nrms_error", exact.size(), approx.size());
  const double denom = exact.norm();
  if (denom == 0.0) throw InvalidArgument("nrms_error: exact Gram matrix has zero norm");
  return (approx - exact).norm() / denom;
}

Matrix feature_gram(const Matrix& features) {
  Matrix G(features.rows(), features.rows());
  G.setZero();
  G.selfadjointView<Eigen::Lower>().rankUpdate(features);
  Matrix full = G.selfadjointView<Eigen::Lower>();
  return full;
}

SpectrumReport scree(const Matrix& features, double threshold_factor) {
  if (features.size() == 0) throw InvalidArgument("scree: empty matrix");
  if (!features.allFinite()) throw InvalidArgument("scree: non-finite entries");
  Eigen::MatrixXd F = features;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(F);
  const auto& sv = svd.singularValues();
  SpectrumReport report;
  report.threshold_factor = threshold_factor;
  report.singular_values.assign(sv.data(), sv.data() + sv.size());
  std::sort(report.singular_values.begin(), report.singular_values.end(), std::greater<>());
  const double cutoff = report.singular_values.empty() ? 0.0 : report.singular_values[0] * threshold_factor;
  for (double s : report.singular_values) report.numerical_rank += s > cutoff;
  if (!report.singular_values.empty() && report.singular_values[0] == 0.0) report.numerical_rank = 0;
  return report;
}

std::vector<double> symmetric_spectrum(const Matrix& gram) {
  if (gram.rows() != gram.cols()) throw DimensionMismatch("symmetric_spectrum", gram.rows(), gram.cols());
  Eigen::MatrixXd G = gram;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(G, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric_spectrum: eigensolver failed");
  const auto& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

Histogram weight_histogram(const Eigen::MatrixXd& weights, std::size_t bins) {
  if (bins < 1) throw InvalidArgument("weight_histogram: bins must be >= 1");
  Histogram h;
  h.counts.assign(bins, 0);
  if (weights.size() == 0) return h;
  h.min = weights.minCoeff();
  h.max = weights.maxCoeff();
  if (h.min == h.max) {
    h.min -= 0.5;
    h.max += 0.5;
  }
  const double width = h.bin_width();
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    double v = weights.data()[i];
    auto b = static_cast<std::size_t>(std::floor((v - h.min) / width));
    h.counts[std::min(b, bins - 1)] += 1;
  }
  return h;
}

double classification_error(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size())
    throw DimensionMismatch("classification_error", truth.size(), predicted.size());
  if (truth.empty()) throw InvalidArgument("classification_error: empty test set");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) wrong += predicted[i] != truth[i];
  return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

double classification_error(const FeatureMap& map, const EcocModel& model, const Dataset& test,
                            unsigned threads) {
  if (test.rows() == 0) throw InvalidArgument("classification_error: empty test set");
  if (test.dim() != map.input_dim()) throw DimensionMismatch("test set", map.input_dim(), test.dim());
  if (test.num_classes > model.codebook().num_classes())
    throw InvalidArgument("test set has more classes than the model");
  Matrix Z = map.apply_batch(test.X, threads);
  return classification_error(model.predict_batch(Z), test.y);
}

std::vector<std::vector<std::size_t>> confusion_matrix(std::span<const int> predicted,
                                                       std::span<const int> truth,
                                                       std::size_t num_classes) {
  if (predicted.size() != truth.size())
    throw DimensionMismatch("confusion_matrix", truth.size(), predicted.size());
  std::vector<std::vector<std::size_t>> counts(num_classes, std::vector<std::size_t>(num_classes, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || predicted[i] < 0 || static_cast<std::size_t>(truth[i]) >= num_classes ||
        static_cast<std::size_t>(predicted[i]) >= num_classes)
      throw InvalidArgument("confusion_matrix: label out of range");
    counts[truth[i]][predicted[i]] += 1;
  }
  return counts;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of empty list");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

std::vector<DecayRow> decay_study(std::size_t input_dim, const PolyKernelParams& params,
                                  std::span<const std::size_t> dims, std::size_t n,
                                  std::size_t trials, std::uint64_t seed,
                                  const RfmOptions& options) {
  if (dims.empty() || n == 0 || trials == 0)
    throw InvalidArgument("decay_study: dims, n and trials must be non-empty");
  for (std::size_t i = 1; i < dims.size(); ++i) {
    if (dims[i] <= dims[i - 1]) throw InvalidArgument("decay_study: dims must be strictly ascending");
  }
  Matrix points = random_unit_rows(n, input_dim, derive_seed(seed, "decay-points"));
  Matrix exact = gram_matrix(points, params);
  std::vector<DecayRow> rows;
  for (std::size_t D : dims) {
    DecayRow row;
    row.dim = D;
    for (std::size_t t = 0; t < trials; ++t) {
      RfmModel model = build_rfm(input_dim, D, params, derive_seed(seed, "decay-trial", D * 1000003 + t), options);
      row.per_trial.push_back(nrms_error(exact, feature_gram(apply_rfm_batch(model, points))));
    }
    row.median_nrms = median(row.per_trial);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace craftmaps
