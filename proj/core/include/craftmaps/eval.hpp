#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "craftmaps/craftmap.hpp"
#include "craftmaps/data.hpp"
#include "craftmaps/kernel.hpp"
#include "craftmaps/learner.hpp"
#include "craftmaps/rfm.hpp"
#include "craftmaps/types.hpp"

namespace craftmaps {

/// ||approx - exact||_F / ||exact||_F.
double nrms_error(const Matrix& exact, const Matrix& approx);

/// F F^T.
Matrix feature_gram(const Matrix& features);

struct SpectrumReport {
  std::vector<double> singular_values;  // descending
  std::size_t numerical_rank = 0;
  double threshold_factor = 0.0;
};

/// Singular values of F and the count of those above threshold_factor * sigma_1.
/// The nonzero squared singular values of an n x m feature matrix are the
/// nonzero eigenvalues of its n x n Gram matrix, so the spectrum is taken on
/// F directly.
SpectrumReport scree(const Matrix& features, double threshold_factor = 1e-8);

/// Eigenvalues of a symmetric matrix, descending.
std::vector<double> symmetric_spectrum(const Matrix& gram);

struct Histogram {
  double min = 0.0;
  double max = 0.0;
  std::vector<std::size_t> counts;

  double bin_width() const { return (max - min) / static_cast<double>(counts.size()); }
};

/// Uniform bins over [min W, max W]; a constant W gets the range [w - 0.5, w + 0.5].
Histogram weight_histogram(const Eigen::MatrixXd& weights, std::size_t bins);

double classification_error(std::span<const int> predicted, std::span<const int> truth);

/// Featurize, predict, compare.
double classification_error(const FeatureMap& map, const EcocModel& model, const Dataset& test,
                            unsigned threads = 1);

/// counts[truth][predicted].
std::vector<std::vector<std::size_t>> confusion_matrix(std::span<const int> predicted,
                                                       std::span<const int> truth,
                                                       std::size_t num_classes);

struct GramApproxReport {
  std::string method;
  std::size_t up_dim = 0;
  std::size_t output_dim = 0;
  double nrms = 0.0;  // median over trials
  std::size_t trials = 0;
  std::vector<double> per_trial;
  std::vector<std::uint64_t> trial_seeds;
};

struct DecayRow {
  std::size_t dim = 0;
  double median_nrms = 0.0;
  std::vector<double> per_trial;
};

/// Median nrms of independent dense random feature maps against the exact
/// Gram matrix of n fixed random unit points, for each D in `dims`.
std::vector<DecayRow> decay_study(std::size_t input_dim, const PolyKernelParams& params,
                                  std::span<const std::size_t> dims, std::size_t n,
                                  std::size_t trials, std::uint64_t seed,
                                  const RfmOptions& options = {});

double median(std::vector<double> values);

}  // namespace craftmaps
