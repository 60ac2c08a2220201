#include "craftmaps/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include <Eigen/Cholesky>

#include "craftmaps/error.hpp"
#include "craftmaps/random.hpp"

namespace craftmaps {

namespace {

bool rows_distinct(const Eigen::MatrixXd& codes) {
  std::set<std::vector<double>> seen;
  for (Eigen::Index i = 0; i < codes.rows(); ++i) {
    std::vector<double> row(codes.cols());
    for (Eigen::Index j = 0; j < codes.cols(); ++j) row[j] = codes(i, j);
    if (!seen.insert(std::move(row)).second) return false;
  }
  return true;
}

bool columns_mixed(const Eigen::MatrixXd& codes) {
  for (Eigen::Index j = 0; j < codes.cols(); ++j) {
    bool pos = false, neg = false;
    for (Eigen::Index i = 0; i < codes.rows(); ++i) (codes(i, j) > 0 ? pos : neg) = true;
    if (!pos || !neg) return false;
  }
  return true;
}

void check_labels(std::span<const int> labels, std::size_t k, std::size_t rows) {
  if (labels.size() != rows) throw DimensionMismatch("labels", rows, labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k)
      throw InvalidArgument("label " + std::to_string(labels[i]) + " at row " + std::to_string(i) +
                            " is outside [0, " + std::to_string(k) + ")");
  }
}

}  // namespace

CodeBook::CodeBook(Eigen::MatrixXd codes) : codes_(std::move(codes)) {
  if (codes_.rows() < 1 || codes_.cols() < 1) throw InvalidArgument("codebook must be non-empty");
  for (Eigen::Index i = 0; i < codes_.size(); ++i) {
    double v = codes_.data()[i];
    if (v != 1.0 && v != -1.0) throw InvalidArgument("codebook entries must be +1 or -1");
  }
  if (!rows_distinct(codes_)) throw InvalidArgument("codebook rows must be distinct");
  if (codes_.rows() >= 2 && !columns_mixed(codes_))
    throw InvalidArgument("codebook columns must contain both signs");
}

std::size_t CodeBook::min_hamming_distance() const {
  std::size_t best = code_length();
  for (Eigen::Index a = 0; a < codes_.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < codes_.rows(); ++b) {
      std::size_t dist = (codes_.row(a).array() != codes_.row(b).array()).count();
      best = std::min(best, dist);
    }
  }
  return best;
}

CodeBook make_codebook(std::size_t k, std::size_t c, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("ECOC needs at least 2 classes, got " + std::to_string(k));
  if (c == 0 || (c < 63 && (std::uint64_t{1} << c) < k))
    throw InvalidArgument("code length " + std::to_string(c) + " cannot give " + std::to_string(k) +
                          " distinct codewords");
  Rng rng(derive_seed(seed, "codebook"));
  Eigen::MatrixXd codes(k, c);
  constexpr int kAttempts = 1000;

  // Balanced columns: floor(k/2) or ceil(k/2) positive entries per column.
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    for (std::size_t j = 0; j < c; ++j) {
      std::size_t positives = k / 2 + ((k % 2) ? rng.uniform_below(2) : 0);
      std::vector<double> column(k, -1.0);
      std::fill(column.begin(), column.begin() + positives, 1.0);
      rng.shuffle(column);
      for (std::size_t i = 0; i < k; ++i) codes(i, j) = column[i];
    }
    if (rows_distinct(codes) && columns_mixed(codes)) return CodeBook(codes);
  }
  // Dense codes (k close to 2^c) rarely come out balanced; sample distinct rows instead.
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::set<std::vector<double>> used;
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<double> row(c);
      do {
        for (auto& v : row) v = static_cast<double>(rng.rademacher());
      } while (!used.insert(row).second);
      for (std::size_t j = 0; j < c; ++j) codes(i, j) = row[j];
    }
    if (columns_mixed(codes)) return CodeBook(codes);
  }
  throw InvalidArgument("could not construct a valid codebook for k = " + std::to_string(k) +
                        ", c = " + std::to_string(c));
}

int nearest_codeword(const CodeBook& codebook, std::span<const double> scores) {
  const auto& codes = codebook.codes();
  if (scores.size() != codebook.code_length())
    throw DimensionMismatch("codeword scores", codebook.code_length(), scores.size());
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < codes.rows(); ++i) {
    double dist = 0.0;
    for (Eigen::Index j = 0; j < codes.cols(); ++j) {
      double diff = scores[j] - codes(i, j);
      dist += diff * diff;
    }
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<int>(i);
    }
  }
  return best;
}

RidgeAccumulator::RidgeAccumulator(std::size_t dim, CodeBook codebook)
    : dim_(dim),
      codebook_(std::move(codebook)),
      lower_(Eigen::MatrixXd::Zero(dim, dim)),
      gradient_(Eigen::MatrixXd::Zero(dim, codebook_.code_length())) {
  if (dim == 0) throw InvalidArgument("RidgeAccumulator: dimension must be >= 1");
}

void RidgeAccumulator::accumulate(const Matrix& Z, std::span<const int> labels) {
  if (Z.rows() == 0 && labels.empty()) return;
  if (static_cast<std::size_t>(Z.cols()) != dim_)
    throw DimensionMismatch("RidgeAccumulator::accumulate", dim_, Z.cols());
  check_labels(labels, codebook_.num_classes(), Z.rows());
  if (!Z.allFinite()) throw NumericalError("RidgeAccumulator: non-finite features");

  lower_.selfadjointView<Eigen::Lower>().rankUpdate(Z.transpose());
  Eigen::MatrixXd targets(Z.rows(), codebook_.code_length());
  for (Eigen::Index i = 0; i < Z.rows(); ++i) targets.row(i) = codebook_.codes().row(labels[i]);
  gradient_.noalias() += Z.transpose() * targets;
  count_ += static_cast<std::size_t>(Z.rows());
}

void RidgeAccumulator::merge(const RidgeAccumulator& other) {
  if (other.dim_ != dim_) throw DimensionMismatch("RidgeAccumulator::merge", dim_, other.dim_);
  if (!(other.codebook_ == codebook_))
    throw InvalidArgument("RidgeAccumulator::merge: accumulators are bound to different codebooks");
  lower_.triangularView<Eigen::Lower>() += other.lower_;
  gradient_ += other.gradient_;
  count_ += other.count_;
}

Eigen::MatrixXd RidgeAccumulator::hessian() const {
  Eigen::MatrixXd full = lower_.selfadjointView<Eigen::Lower>();
  return full;
}

RidgeAccumulator merge(const RidgeAccumulator& a, const RidgeAccumulator& b) {
  RidgeAccumulator out = a;
  out.merge(b);
  return out;
}

EcocModel::EcocModel(CodeBook codebook, Eigen::MatrixXd weights, double lambda)
    : codebook_(std::move(codebook)), weights_(std::move(weights)), lambda_(lambda) {
  if (static_cast<std::size_t>(weights_.cols()) != codebook_.code_length())
    throw DimensionMismatch("EcocModel weights", codebook_.code_length(), weights_.cols());
}

Eigen::VectorXd EcocModel::scores(std::span<const double> z) const {
  if (z.size() != feature_dim()) throw DimensionMismatch("EcocModel::scores", feature_dim(), z.size());
  Eigen::Map<const Eigen::VectorXd> zv(z.data(), z.size());
  return weights_.transpose() * zv;
}

int EcocModel::predict(std::span<const double> z) const {
  Eigen::VectorXd s = scores(z);
  return nearest_codeword(codebook_, std::span<const double>(s.data(), s.size()));
}

std::vector<int> EcocModel::predict_batch(const Matrix& Z) const {
  if (static_cast<std::size_t>(Z.cols()) != feature_dim())
    throw DimensionMismatch("EcocModel::predict_batch", feature_dim(), Z.cols());
  Matrix S = Z * weights_;
  std::vector<int> out(Z.rows());
  for (Eigen::Index i = 0; i < Z.rows(); ++i)
    out[i] = nearest_codeword(codebook_, std::span<const double>(S.row(i).data(), S.cols()));
  return out;
}

EcocModel solve(const RidgeAccumulator& acc, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("ridge lambda must be positive and finite");
  Eigen::MatrixXd A = acc.hessian();
  if (!A.allFinite() || !acc.gradient().allFinite())
    throw NumericalError("ridge solve: non-finite entries in the accumulated statistics");
  A.diagonal().array() += lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw NumericalError("ridge solve: Cholesky factorization failed");
  Eigen::MatrixXd W = llt.solve(acc.gradient());
  if (!W.allFinite()) throw NumericalError("ridge solve: non-finite solution");
  return EcocModel(acc.codebook(), std::move(W), lambda);
}

double relative_residual(const RidgeAccumulator& acc, const EcocModel& model) {
  Eigen::MatrixXd A = acc.hessian();
  A.diagonal().array() += model.lambda();
  double denom = acc.gradient().norm();
  double num = (A * model.weights() - acc.gradient()).norm();
  return denom > 0.0 ? num / denom : num;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid(8);
  for (int i = 0; i < 8; ++i) grid[i] = std::pow(10.0, -6.0 + 8.0 * i / 7.0);
  return grid;
}

LambdaSelection select_lambda(const Matrix& features, std::span<const int> labels,
                              const CodeBook& codebook, std::size_t folds,
                              std::span<const double> grid, std::uint64_t seed) {
  const std::size_t n = features.rows();
  const std::size_t k = codebook.num_classes();
  if (folds < 2) throw InvalidArgument("cross validation needs at least 2 folds");
  if (grid.empty()) throw InvalidArgument("lambda grid is empty");
  for (double v : grid) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("lambda grid values must be positive");
  }
  check_labels(labels, k, n);

  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  // Stratified assignment: shuffle each class, deal round-robin.
  std::vector<std::vector<std::size_t>> by_class(k);
  for (std::size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(i);
  Rng rng(derive_seed(seed, "folds"));
  std::vector<std::vector<std::size_t>> fold_rows(folds);
  std::size_t dealer = 0;
  for (auto& members : by_class) {
    rng.shuffle(members);
    for (std::size_t idx : members) fold_rows[dealer++ % folds].push_back(idx);
  }
  for (std::size_t f = 0; f < folds; ++f) {
    if (fold_rows[f].empty())
      throw InvalidArgument("degenerate folds: fold " + std::to_string(f) + " of " +
                            std::to_string(folds) + " is empty (" + std::to_string(n) +
                            " examples)");
    std::sort(fold_rows[f].begin(), fold_rows[f].end());
  }
  for (std::size_t cls = 0; cls < k; ++cls) {
    if (by_class[cls].size() == 1)
      throw InvalidArgument("degenerate folds: class " + std::to_string(cls) +
                            " has a single example, so one training split never sees it");
  }

  std::vector<RidgeAccumulator> per_fold;
  std::vector<Matrix> held_out(folds);
  std::vector<std::vector<int>> held_labels(folds);
  per_fold.reserve(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    const auto& rows = fold_rows[f];
    held_out[f].resize(rows.size(), features.cols());
    held_labels[f].resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      held_out[f].row(i) = features.row(rows[i]);
      held_labels[f][i] = labels[rows[i]];
    }
    per_fold.emplace_back(features.cols(), codebook);
    per_fold.back().accumulate(held_out[f], held_labels[f]);
  }

  std::vector<double> error_sum(sorted.size(), 0.0);
  for (std::size_t f = 0; f < folds; ++f) {
    RidgeAccumulator train(features.cols(), codebook);
    for (std::size_t g = 0; g < folds; ++g) {
      if (g != f) train.merge(per_fold[g]);
    }
    for (std::size_t li = 0; li < sorted.size(); ++li) {
      EcocModel model = solve(train, sorted[li]);
      std::vector<int> pred = model.predict_batch(held_out[f]);
      std::size_t wrong = 0;
      for (std::size_t i = 0; i < pred.size(); ++i) wrong += pred[i] != held_labels[f][i];
      error_sum[li] += static_cast<double>(wrong) / static_cast<double>(pred.size());
    }
  }

  LambdaSelection result;
  result.grid = sorted;
  result.cv_error.resize(sorted.size());
  std::size_t best = 0;
  for (std::size_t li = 0; li < sorted.size(); ++li) {
    result.cv_error[li] = error_sum[li] / static_cast<double>(folds);
    if (result.cv_error[li] < result.cv_error[best]) best = li;
  }
  result.lambda = sorted[best];
  return result;
}

}  // namespace craftmaps
