#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "craftmaps/types.hpp"

namespace craftmaps {

/// k x c matrix of +-1 codewords, one row per class.
/// Rows are pairwise distinct and, for k >= 2, every column has both signs.
class CodeBook {
 public:
  explicit CodeBook(Eigen::MatrixXd codes);

  std::size_t num_classes() const { return static_cast<std::size_t>(codes_.rows()); }
  std::size_t code_length() const { return static_cast<std::size_t>(codes_.cols()); }
  const Eigen::MatrixXd& codes() const { return codes_; }

  std::size_t min_hamming_distance() const;

  friend bool operator==(const CodeBook& a, const CodeBook& b) { return a.codes_ == b.codes_; }

 private:
  Eigen::MatrixXd codes_;
};

/// Random codebook with balanced columns, resampled until the invariants
/// hold. Requires k >= 2 and 2^c >= k.
CodeBook make_codebook(std::size_t num_classes, std::size_t code_length, std::uint64_t seed);

/// Index of the codeword closest (Euclidean) to `scores`; ties go to the lowest index.
int nearest_codeword(const CodeBook& codebook, std::span<const double> scores);

/// Streaming sufficient statistics for ridge regression onto codewords:
///   H = sum z z^T  (E x E, shared by every code bit)
///   B = sum z codeword(y)^T  (E x c)
class RidgeAccumulator {
 public:
  RidgeAccumulator(std::size_t dim, CodeBook codebook);

  /// Adds the rows of Z (m x E) with their labels.
  void accumulate(const Matrix& Z, std::span<const int> labels);
  void merge(const RidgeAccumulator& other);

  std::size_t dim() const { return dim_; }
  std::size_t count() const { return count_; }
  const CodeBook& codebook() const { return codebook_; }

  /// Full symmetric H.
  Eigen::MatrixXd hessian() const;
  const Eigen::MatrixXd& gradient() const { return gradient_; }

 private:
  std::size_t dim_;
  CodeBook codebook_;
  Eigen::MatrixXd lower_;  // only the lower triangle is maintained
  Eigen::MatrixXd gradient_;
  std::size_t count_ = 0;
};

RidgeAccumulator merge(const RidgeAccumulator& a, const RidgeAccumulator& b);

/// c linear regressors sharing one regularizer, decoded through a codebook.
class EcocModel {
 public:
  EcocModel(CodeBook codebook, Eigen::MatrixXd weights, double lambda);

  const CodeBook& codebook() const { return codebook_; }
  /// E x c.
  const Eigen::MatrixXd& weights() const { return weights_; }
  double lambda() const { return lambda_; }
  std::size_t feature_dim() const { return static_cast<std::size_t>(weights_.rows()); }

  Eigen::VectorXd scores(std::span<const double> z) const;
  int predict(std::span<const double> z) const;
  std::vector<int> predict_batch(const Matrix& Z) const;

 private:
  CodeBook codebook_;
  Eigen::MatrixXd weights_;
  double lambda_;
};

/// W = (H + lambda I)^-1 B with one Cholesky factorization for all code bits.
EcocModel solve(const RidgeAccumulator& acc, double lambda);

/// ||(H + lambda I) W - B||_F / ||B||_F.
double relative_residual(const RidgeAccumulator& acc, const EcocModel& model);

/// 8 values log-spaced over [1e-6, 1e2].
std::vector<double> default_lambda_grid();

struct LambdaSelection {
  double lambda = 0.0;
  std::vector<double> grid;      // ascending, deduplicated
  std::vector<double> cv_error;  // mean held-out error per grid value
};

/// Stratified k-fold cross validation over a lambda grid. One lambda is
/// shared by all code bits; ties go to the smaller lambda.
LambdaSelection select_lambda(const Matrix& features, std::span<const int> labels,
                              const CodeBook& codebook, std::size_t folds,
                              std::span<const double> grid, std::uint64_t seed);

}  // namespace craftmaps
