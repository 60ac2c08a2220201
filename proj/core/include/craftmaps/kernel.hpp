#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "craftmaps/types.hpp"

namespace craftmaps {

/// The polynomial kernel K(x, y) = (<x, y> + q)^r with integer q >= 0, r >= 1.
class PolyKernelParams {
 public:
  PolyKernelParams(int offset, int degree);

  int offset() const { return offset_; }
  int degree() const { return degree_; }

  friend bool operator==(const PolyKernelParams&, const PolyKernelParams&) = default;

 private:
  int offset_;
  int degree_;
};

/// a[n] is the coefficient of <x, y>^n in the kernel's Maclaurin expansion.
class MaclaurinCoeffs {
 public:
  explicit MaclaurinCoeffs(std::vector<double> coeffs);

  double operator[](std::size_t n) const { return n < a_.size() ? a_[n] : 0.0; }
  std::size_t size() const { return a_.size(); }
  const std::vector<double>& values() const { return a_; }

  /// sum_n a[n] t^n (Horner).
  double evaluate(double t) const;

 private:
  std::vector<double> a_;
};

MaclaurinCoeffs maclaurin_coeffs(const PolyKernelParams& params);

double eval_kernel(std::span<const double> x, std::span<const double> y,
                   const PolyKernelParams& params);

/// n x n exact Gram matrix of the rows of X.
Matrix gram_matrix(const Matrix& X, const PolyKernelParams& params);

}  // namespace craftmaps
