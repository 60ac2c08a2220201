#include "craftmaps/hadamard.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "craftmaps/error.hpp"
#include "craftmaps/random.hpp"

namespace craftmaps {

void fwht_in_place(std::span<double> v) {
  const std::size_t n = v.size();
  if (!is_pow2(n))
    throw InvalidArgument("fwht: length must be a power of two, got " + std::to_string(n));
  double* a = v.data();
  for (std::size_t half = 1; half < n; half <<= 1) {
    for (std::size_t block = 0; block < n; block += 2 * half) {
      double* lo = a + block;
      double* hi = lo + half;
      for (std::size_t j = 0; j < half; ++j) {
        double u = lo[j];
        double w = hi[j];
        lo[j] = u + w;
        hi[j] = u - w;
      }
    }
  }
}

std::vector<double> pad_pow2(std::span<const double> x) {
  std::vector<double> out(next_pow2(std::max<std::size_t>(x.size(), 1)), 0.0);
  std::copy(x.begin(), x.end(), out.begin());
  return out;
}

SrhtOperator::SrhtOperator(std::size_t dim_in_padded, std::vector<std::int8_t> signs,
                           std::vector<std::uint32_t> sample_indices, double scale)
    : dim_in_padded_(dim_in_padded),
      signs_(std::move(signs)),
      sample_indices_(std::move(sample_indices)),
      scale_(scale) {
  if (!is_pow2(dim_in_padded_))
    throw InvalidArgument("SRHT: padded dimension must be a power of two");
  if (signs_.size() != dim_in_padded_)
    throw DimensionMismatch("SRHT signs", dim_in_padded_, signs_.size());
  for (auto s : signs_) {
    if (s != 1 && s != -1) throw InvalidArgument("SRHT: signs must be +1 or -1");
  }
  std::vector<bool> seen(dim_in_padded_, false);
  for (auto idx : sample_indices_) {
    if (idx >= dim_in_padded_) throw InvalidArgument("SRHT: sample index out of range");
    if (seen[idx]) throw InvalidArgument("SRHT: sample indices must be distinct");
    seen[idx] = true;
  }
  if (!(scale_ > 0.0) || !std::isfinite(scale_))
    throw InvalidArgument("SRHT: scale must be positive and finite");
}

SrhtOperator SrhtOperator::random(std::size_t dim_in, std::size_t num_samples,
                                  std::uint64_t seed) {
  if (dim_in == 0 || num_samples == 0)
    throw InvalidArgument("SRHT: dimensions must be positive");
  const std::size_t padded = next_pow2(dim_in);
  Rng rng(seed);
  std::vector<std::int8_t> signs(padded);
  for (auto& s : signs) s = static_cast<std::int8_t>(rng.rademacher());
  auto indices = sample_without_replacement(padded, num_samples, rng);
  std::sort(indices.begin(), indices.end());
  return SrhtOperator(padded, std::move(signs), std::move(indices),
                      1.0 / std::sqrt(static_cast<double>(num_samples)));
}

void SrhtOperator::apply_into(std::span<const double> x, std::span<double> out,
                              std::span<double> scratch) const {
  if (x.size() > dim_in_padded_) throw DimensionMismatch("SRHT input", dim_in_padded_, x.size());
  if (out.size() != sample_indices_.size())
    throw DimensionMismatch("SRHT output", sample_indices_.size(), out.size());
  if (scratch.size() < dim_in_padded_)
    throw DimensionMismatch("SRHT scratch", dim_in_padded_, scratch.size());
  auto buf = scratch.first(dim_in_padded_);
  std::size_t i = 0;
  for (; i < x.size(); ++i) buf[i] = signs_[i] * x[i];
  for (; i < dim_in_padded_; ++i) buf[i] = 0.0;
  fwht_in_place(buf);
  for (std::size_t s = 0; s < sample_indices_.size(); ++s) out[s] = scale_ * buf[sample_indices_[s]];
}

std::vector<double> srht_apply(const SrhtOperator& op, std::span<const double> x) {
  if (x.size() != op.dim_in_padded())
    throw DimensionMismatch("srht_apply", op.dim_in_padded(), x.size());
  std::vector<double> out(op.dim_out());
  std::vector<double> scratch(op.dim_in_padded());
  op.apply_into(x, out, scratch);
  return out;
}

}  // namespace craftmaps
