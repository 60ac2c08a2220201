#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "craftmaps/kernel.hpp"
#include "craftmaps/random.hpp"
#include "craftmaps/types.hpp"

namespace craftmaps {

enum class DegreeSampling {
  // Support {0..r}, P[N=n] proportional to p^-(n+1).
  kTruncated,
  // P[N=n] = p^-(n+1) on all n >= 0; only p = 2 is a distribution.
  kUntruncated,
};

/// Distribution of the monomial degree N estimated by one random feature.
class DegreeSampler {
 public:
  DegreeSampler(double p, int max_degree, DegreeSampling mode);

  double p() const { return p_; }
  int max_degree() const { return max_degree_; }
  DegreeSampling mode() const { return mode_; }

  /// P[N = n] for n = 0..max_degree.
  const std::vector<double>& probs() const { return probs_; }
  /// P[N = n] for any n >= 0.
  double probability(int n) const;

  int sample(Rng& rng) const;

 private:
  double p_;
  int max_degree_;
  DegreeSampling mode_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
};

struct RfmOptions {
  double p = 2.0;
  DegreeSampling sampling = DegreeSampling::kTruncated;
  // Keep the Rademacher weights in memory. When false they are regenerated
  // from the seed on every application; both paths give identical output.
  bool materialize = true;
};

/// D i.i.d. degrees drawn from the sampler; same stream for dense and SRHT maps.
std::vector<int> sample_degrees(const DegreeSampler& sampler, std::size_t count,
                                std::uint64_t seed);

/// sqrt(a_N / P[N]) per feature.
std::vector<double> feature_scales(std::span<const int> degrees, const DegreeSampler& sampler,
                                   const MaclaurinCoeffs& coeffs);

/// Random feature map x -> (1/sqrt(D)) (Z_1(x), ..., Z_D(x)) with
/// Z_i(x) = scale_i * prod_{j<N_i} <w_ij, x> and Rademacher w_ij.
class RfmModel {
 public:
  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return degrees_.size(); }
  const PolyKernelParams& kernel() const { return kernel_; }
  const RfmOptions& options() const { return options_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<int>& degrees() const { return degrees_; }
  const std::vector<double>& scales() const { return scales_; }

  /// Total number of Rademacher rows, sum_i N_i.
  std::size_t total_rows() const { return total_rows_; }
  /// Index of w_{i,0} among all rows.
  std::size_t row_offset(std::size_t feature) const { return offsets_[feature]; }

  /// Entry k of w_{feature, factor}, in {-1, +1}.
  int weight(std::size_t feature, std::size_t factor, std::size_t coord) const;

  /// total_rows x input_dim matrix of all weight rows (cached copy if materialized).
  Matrix weight_rows() const;

  void materialize();
  void release();
  bool materialized() const { return weights_.has_value(); }
  /// The materialized weights, or nullptr.
  const Matrix* cached_weights() const { return weights_ ? &*weights_ : nullptr; }

 private:
  friend RfmModel build_rfm(std::size_t, std::size_t, const PolyKernelParams&, std::uint64_t,
                            const RfmOptions&);
  RfmModel(std::size_t d, PolyKernelParams kernel, RfmOptions options, std::uint64_t seed);

  int weight_at(std::size_t row, std::size_t coord) const;

  std::size_t input_dim_;
  PolyKernelParams kernel_;
  RfmOptions options_;
  std::uint64_t seed_;
  std::uint64_t weight_key_;
  std::vector<int> degrees_;
  std::vector<double> scales_;
  std::vector<std::size_t> offsets_;
  std::size_t total_rows_ = 0;
  std::optional<Matrix> weights_;
};

RfmModel build_rfm(std::size_t input_dim, std::size_t output_dim, const PolyKernelParams& params,
                   std::uint64_t seed, const RfmOptions& options = {});

std::vector<double> apply_rfm(const RfmModel& model, std::span<const double> x);
Matrix apply_rfm_batch(const RfmModel& model, const Matrix& X, unsigned threads = 1);

/// Random feature map whose Rademacher rows are rows of T sign-randomized
/// Hadamard blocks, concatenated and randomly permuted.
class SrhtRfmModel {
 public:
  /// Validates and assembles a model from explicit parts. Scales are derived
  /// from the degrees and options.
  static SrhtRfmModel from_parts(std::size_t input_dim, const PolyKernelParams& params,
                                 const RfmOptions& options, std::vector<int> degrees,
                                 std::vector<std::int8_t> block_signs,
                                 std::vector<std::uint32_t> permutation, std::uint64_t seed);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t padded_dim() const { return padded_dim_; }
  std::size_t output_dim() const { return degrees_.size(); }
  const PolyKernelParams& kernel() const { return kernel_; }
  const RfmOptions& options() const { return options_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<int>& degrees() const { return degrees_; }
  const std::vector<double>& scales() const { return scales_; }
  std::size_t total_rows() const { return total_rows_; }
  std::size_t num_blocks() const { return num_blocks_; }
  /// num_blocks x padded_dim signs, block-major.
  const std::vector<std::int8_t>& block_signs() const { return block_signs_; }
  /// Bijection on num_blocks * padded_dim slots; slot s reads row permutation[s].
  const std::vector<std::uint32_t>& permutation() const { return permutation_; }

 private:
  SrhtRfmModel(PolyKernelParams kernel) : kernel_(kernel) {}

  std::size_t input_dim_ = 0;
  std::size_t padded_dim_ = 0;
  PolyKernelParams kernel_;
  RfmOptions options_;
  std::uint64_t seed_ = 0;
  std::vector<int> degrees_;
  std::vector<double> scales_;
  std::size_t total_rows_ = 0;
  std::size_t num_blocks_ = 0;
  std::vector<std::int8_t> block_signs_;
  std::vector<std::uint32_t> permutation_;
};

SrhtRfmModel build_srht_rfm(std::size_t input_dim, std::size_t output_dim,
                            const PolyKernelParams& params, std::uint64_t seed,
                            const RfmOptions& options = {});

std::vector<double> apply_srht_rfm(const SrhtRfmModel& model, std::span<const double> x);
Matrix apply_srht_rfm_batch(const SrhtRfmModel& model, const Matrix& X, unsigned threads = 1);

}  // namespace craftmaps
