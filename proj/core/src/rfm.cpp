#include "craftmaps/rfm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "craftmaps/error.hpp"
#include "craftmaps/hadamard.hpp"
#include "craftmaps/parallel.hpp"

namespace craftmaps {

DegreeSampler::DegreeSampler(double p, int max_degree, DegreeSampling mode)
    : p_(p), max_degree_(max_degree), mode_(mode) {
  if (!std::isfinite(p) || !(p > 1.0))
    throw InvalidArgument("degree sampler: p must be finite and > 1, got " + std::to_string(p));
  if (max_degree < 0) throw InvalidArgument("degree sampler: max degree must be >= 0");
  if (mode == DegreeSampling::kUntruncated && p != 2.0)
    throw InvalidArgument("degree sampler: untruncated sampling requires p = 2");

  probs_.resize(max_degree + 1);
  for (int n = 0; n <= max_degree; ++n) probs_[n] = std::pow(p, -(n + 1));
  if (mode == DegreeSampling::kTruncated) {
    double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
    for (auto& v : probs_) v /= total;
    cdf_.resize(probs_.size());
    std::partial_sum(probs_.begin(), probs_.end(), cdf_.begin());
  }
}

double DegreeSampler::probability(int n) const {
  if (n < 0) return 0.0;
  if (mode_ == DegreeSampling::kUntruncated) return std::ldexp(1.0, -(n + 1));
  return n <= max_degree_ ? probs_[n] : 0.0;
}

int DegreeSampler::sample(Rng& rng) const {
  if (mode_ == DegreeSampling::kUntruncated) {
    // Leading zeros of a uniform word: P[N = n] = 2^-(n+1).
    return std::countl_zero(rng.next_u64());
  }
  double u = rng.uniform01();
  for (int n = 0; n < max_degree_; ++n) {
    if (u < cdf_[n]) return n;
  }
  return max_degree_;
}

std::vector<int> sample_degrees(const DegreeSampler& sampler, std::size_t count,
                                std::uint64_t seed) {
  Rng rng(derive_seed(seed, "degrees"));
  std::vector<int> degrees(count);
  for (auto& n : degrees) n = sampler.sample(rng);
  return degrees;
}

std::vector<double> feature_scales(std::span<const int> degrees, const DegreeSampler& sampler,
                                   const MaclaurinCoeffs& coeffs) {
  std::vector<double> scales(degrees.size());
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    const int n = degrees[i];
    const double a = coeffs[static_cast<std::size_t>(n)];
    scales[i] = a == 0.0 ? 0.0 : std::sqrt(a / sampler.probability(n));
  }
  return scales;
}

namespace {

void products_to_features(const double* values, std::span<const int> degrees,
                          std::span<const double> scales, double inv_sqrt_dim, double* out) {
  std::size_t pos = 0;
  for (std::size_t f = 0; f < degrees.size(); ++f) {
    double prod = 1.0;
    for (int j = 0; j < degrees[f]; ++j) prod *= values[pos++];
    out[f] = scales[f] == 0.0 ? 0.0 : inv_sqrt_dim * scales[f] * prod;
  }
}

constexpr std::size_t kRowChunk = 256;

}  // namespace

RfmModel::RfmModel(std::size_t d, PolyKernelParams kernel, RfmOptions options, std::uint64_t seed)
    : input_dim_(d),
      kernel_(kernel),
      options_(options),
      seed_(seed),
      weight_key_(derive_seed(seed, "rfm-weights")) {}

int RfmModel::weight_at(std::size_t row, std::size_t coord) const {
  const std::size_t words = (input_dim_ + 63) / 64;
  std::uint64_t bits = counter_bits(weight_key_, row * words + coord / 64);
  return ((bits >> (coord % 64)) & 1U) ? 1 : -1;
}

int RfmModel::weight(std::size_t feature, std::size_t factor, std::size_t coord) const {
  if (feature >= degrees_.size() || factor >= static_cast<std::size_t>(degrees_[feature]) ||
      coord >= input_dim_)
    throw InvalidArgument("RfmModel::weight: index out of range");
  return weight_at(offsets_[feature] + factor, coord);
}

Matrix RfmModel::weight_rows() const {
  if (weights_) return *weights_;
  Matrix W(total_rows_, input_dim_);
  const std::size_t words = (input_dim_ + 63) / 64;
  for (std::size_t r = 0; r < total_rows_; ++r) {
    double* row = W.row(r).data();
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t bits = counter_bits(weight_key_, r * words + w);
      const std::size_t end = std::min(input_dim_, (w + 1) * 64);
      for (std::size_t k = w * 64; k < end; ++k) row[k] = ((bits >> (k % 64)) & 1U) ? 1.0 : -1.0;
    }
  }
  return W;
}

void RfmModel::materialize() {
  if (!weights_) weights_ = weight_rows();
}

void RfmModel::release() { weights_.reset(); }

RfmModel build_rfm(std::size_t input_dim, std::size_t output_dim, const PolyKernelParams& params,
                   std::uint64_t seed, const RfmOptions& options) {
  if (input_dim == 0 || output_dim == 0)
    throw InvalidArgument("build_rfm: input and output dimensions must be >= 1");
  DegreeSampler sampler(options.p, params.degree(), options.sampling);
  RfmModel model(input_dim, params, options, seed);
  model.degrees_ = sample_degrees(sampler, output_dim, seed);
  model.scales_ = feature_scales(model.degrees_, sampler, maclaurin_coeffs(params));
  model.offsets_.resize(output_dim);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < output_dim; ++i) {
    model.offsets_[i] = offset;
    offset += static_cast<std::size_t>(model.degrees_[i]);
  }
  model.total_rows_ = offset;
  if (options.materialize) model.materialize();
  return model;
}

Matrix apply_rfm_batch(const RfmModel& model, const Matrix& X, unsigned threads) {
  if (static_cast<std::size_t>(X.cols()) != model.input_dim())
    throw DimensionMismatch("apply_rfm", model.input_dim(), X.cols());
  const std::size_t n = X.rows();
  const std::size_t D = model.output_dim();
  Matrix regenerated;
  const Matrix* W = model.cached_weights();
  if (W == nullptr) {
    regenerated = model.weight_rows();
    W = &regenerated;
  }
  const double inv_sqrt_dim = 1.0 / std::sqrt(static_cast<double>(D));
  Matrix out(n, D);
  const std::size_t chunks = (n + kRowChunk - 1) / kRowChunk;
  parallel_blocks(chunks, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const std::size_t r0 = c * kRowChunk;
      const std::size_t len = std::min(kRowChunk, n - r0);
      Matrix proj = X.middleRows(r0, len) * W->transpose();
      for (std::size_t i = 0; i < len; ++i)
        products_to_features(proj.row(i).data(), model.degrees(), model.scales(), inv_sqrt_dim,
                             out.row(r0 + i).data());
    }
  });
  return out;
}

std::vector<double> apply_rfm(const RfmModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim()) throw DimensionMismatch("apply_rfm", model.input_dim(), x.size());
  Matrix row = Eigen::Map<const Matrix>(x.data(), 1, x.size());
  Matrix out = apply_rfm_batch(model, row);
  return std::vector<double>(out.data(), out.data() + out.size());
}

SrhtRfmModel SrhtRfmModel::from_parts(std::size_t input_dim, const PolyKernelParams& params,
                                      const RfmOptions& options, std::vector<int> degrees,
                                      std::vector<std::int8_t> block_signs,
                                      std::vector<std::uint32_t> permutation,
                                      std::uint64_t seed) {
  if (input_dim == 0 || degrees.empty())
    throw InvalidArgument("SRHT feature map: input and output dimensions must be >= 1");
  DegreeSampler sampler(options.p, params.degree(), options.sampling);
  SrhtRfmModel model(params);
  model.input_dim_ = input_dim;
  model.padded_dim_ = next_pow2(input_dim);
  model.options_ = options;
  model.seed_ = seed;
  std::size_t total = 0;
  for (int n : degrees) {
    if (n < 0) throw InvalidArgument("SRHT feature map: negative degree");
    total += static_cast<std::size_t>(n);
  }
  model.total_rows_ = total;
  model.num_blocks_ = (total + model.padded_dim_ - 1) / model.padded_dim_;
  const std::size_t slots = model.num_blocks_ * model.padded_dim_;
  if (block_signs.size() != slots) throw DimensionMismatch("SRHT block signs", slots, block_signs.size());
  for (auto s : block_signs) {
    if (s != 1 && s != -1) throw InvalidArgument("SRHT feature map: signs must be +1 or -1");
  }
  if (permutation.size() != slots) throw DimensionMismatch("SRHT permutation", slots, permutation.size());
  std::vector<bool> seen(slots, false);
  for (auto v : permutation) {
    if (v >= slots || seen[v]) throw InvalidArgument("SRHT feature map: permutation is not a bijection");
    seen[v] = true;
  }
  model.scales_ = feature_scales(degrees, sampler, maclaurin_coeffs(params));
  model.degrees_ = std::move(degrees);
  model.block_signs_ = std::move(block_signs);
  model.permutation_ = std::move(permutation);
  return model;
}

SrhtRfmModel build_srht_rfm(std::size_t input_dim, std::size_t output_dim,
                            const PolyKernelParams& params, std::uint64_t seed,
                            const RfmOptions& options) {
  if (input_dim == 0 || output_dim == 0)
    throw InvalidArgument("build_srht_rfm: input and output dimensions must be >= 1");
  DegreeSampler sampler(options.p, params.degree(), options.sampling);
  std::vector<int> degrees = sample_degrees(sampler, output_dim, seed);
  const std::size_t total = std::accumulate(degrees.begin(), degrees.end(), std::size_t{0});
  const std::size_t padded = next_pow2(input_dim);
  const std::size_t blocks = (total + padded - 1) / padded;
  const std::size_t slots = blocks * padded;

  Rng sign_rng(derive_seed(seed, "srht-signs"));
  std::vector<std::int8_t> signs(slots);
  for (auto& s : signs) s = static_cast<std::int8_t>(sign_rng.rademacher());

  Rng perm_rng(derive_seed(seed, "srht-permutation"));
  std::vector<std::uint32_t> permutation(slots);
  std::iota(permutation.begin(), permutation.end(), 0U);
  perm_rng.shuffle(permutation);

  return SrhtRfmModel::from_parts(input_dim, params, options, std::move(degrees), std::move(signs),
                                  std::move(permutation), seed);
}

Matrix apply_srht_rfm_batch(const SrhtRfmModel& model, const Matrix& X, unsigned threads) {
  if (static_cast<std::size_t>(X.cols()) != model.input_dim())
    throw DimensionMismatch("apply_srht_rfm", model.input_dim(), X.cols());
  const std::size_t n = X.rows();
  const std::size_t d = model.input_dim();
  const std::size_t padded = model.padded_dim();
  const std::size_t blocks = model.num_blocks();
  const std::size_t rows = model.total_rows();
  const double inv_sqrt_dim = 1.0 / std::sqrt(static_cast<double>(model.output_dim()));
  const auto& signs = model.block_signs();
  const auto& perm = model.permutation();
  Matrix out(n, model.output_dim());
  parallel_blocks(n, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> stacked(blocks * padded);
    std::vector<double> values(rows);
    for (std::size_t i = begin; i < end; ++i) {
      const double* x = X.row(i).data();
      for (std::size_t t = 0; t < blocks; ++t) {
        double* block = stacked.data() + t * padded;
        const std::int8_t* s = signs.data() + t * padded;
        std::size_t k = 0;
        for (; k < d; ++k) block[k] = s[k] * x[k];
        for (; k < padded; ++k) block[k] = 0.0;
        fwht_in_place(std::span<double>(block, padded));
      }
      for (std::size_t r = 0; r < rows; ++r) values[r] = stacked[perm[r]];
      products_to_features(values.data(), model.degrees(), model.scales(), inv_sqrt_dim,
                           out.row(i).data());
    }
  });
  return out;
}

std::vector<double> apply_srht_rfm(const SrhtRfmModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim())
    throw DimensionMismatch("apply_srht_rfm", model.input_dim(), x.size());
  Matrix row = Eigen::Map<const Matrix>(x.data(), 1, x.size());
  Matrix out = apply_srht_rfm_batch(model, row);
  return std::vector<double>(out.data(), out.data() + out.size());
}

}  // namespace craftmaps
