#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace craftmaps {

constexpr bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

constexpr std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// v <- H v with H the unnormalized Sylvester Hadamard matrix of order v.size().
/// Applying twice multiplies by v.size().
void fwht_in_place(std::span<double> v);

/// Zero-pads x to the next power of two (unchanged if already one).
std::vector<double> pad_pow2(std::span<const double> x);

/// Subsampled randomized Hadamard transform:
///   x -> scale * S H M x
/// with M = diag(signs), H unnormalized, S selecting sample_indices.
class SrhtOperator {
 public:
  SrhtOperator(std::size_t dim_in_padded, std::vector<std::int8_t> signs,
               std::vector<std::uint32_t> sample_indices, double scale);

  /// Random signs and `num_samples` distinct indices over next_pow2(dim_in),
  /// scale 1/sqrt(num_samples) so that E||Sx||^2 = ||x||^2.
  static SrhtOperator random(std::size_t dim_in, std::size_t num_samples, std::uint64_t seed);

  std::size_t dim_in_padded() const { return dim_in_padded_; }
  std::size_t dim_out() const { return sample_indices_.size(); }
  const std::vector<std::int8_t>& signs() const { return signs_; }
  const std::vector<std::uint32_t>& sample_indices() const { return sample_indices_; }
  double scale() const { return scale_; }

  /// x may be shorter than dim_in_padded (implicit zero padding).
  /// `scratch` must hold dim_in_padded doubles; `out` dim_out().
  void apply_into(std::span<const double> x, std::span<double> out,
                  std::span<double> scratch) const;

  friend bool operator==(const SrhtOperator&, const SrhtOperator&) = default;

 private:
  std::size_t dim_in_padded_;
  std::vector<std::int8_t> signs_;
  std::vector<std::uint32_t> sample_indices_;
  double scale_;
};

/// x must have length op.dim_in_padded().
std::vector<double> srht_apply(const SrhtOperator& op, std::span<const double> x);

}  // namespace craftmaps
