#include "craftmaps/kernel.hpp"

#include <cmath>
#include <string>

#include "craftmaps/error.hpp"

namespace craftmaps {

PolyKernelParams::PolyKernelParams(int offset, int degree) : offset_(offset), degree_(degree) {
  if (offset < 0) throw InvalidArgument("kernel offset q must be >= 0, got " + std::to_string(offset));
  if (degree < 1) throw InvalidArgument("kernel degree r must be >= 1, got " + std::to_string(degree));
}

MaclaurinCoeffs::MaclaurinCoeffs(std::vector<double> coeffs) : a_(std::move(coeffs)) {
  for (double v : a_) {
    if (!std::isfinite(v) || v < 0.0)
      throw InvalidArgument("Maclaurin coefficients must be finite and nonnegative");
  }
}

double MaclaurinCoeffs::evaluate(double t) const {
  long double acc = 0.0L;
  for (std::size_t n = a_.size(); n-- > 0;) acc = acc * t + a_[n];
  return static_cast<double>(acc);
}

MaclaurinCoeffs maclaurin_coeffs(const PolyKernelParams& params) {
  const int r = params.degree();
  const long double q = params.offset();
  // a[r] = 1, a[n-1] = a[n] * q * n / (r - n + 1)
  std::vector<long double> a(r + 1, 0.0L);
  a[r] = 1.0L;
  for (int n = r; n >= 1; --n) a[n - 1] = a[n] * q * n / static_cast<long double>(r - n + 1);
  std::vector<double> out(a.begin(), a.end());
  return MaclaurinCoeffs(std::move(out));
}

namespace {

long double dot_extended(const double* x, const double* y, std::size_t d) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < d; ++i) acc += static_cast<long double>(x[i]) * y[i];
  return acc;
}

long double int_pow(long double base, int exp) {
  long double result = 1.0L;
  while (exp > 0) {
    if (exp & 1) result *= base;
    base *= base;
    exp >>= 1;
  }
  return result;
}

}  // namespace

double eval_kernel(std::span<const double> x, std::span<const double> y,
                   const PolyKernelParams& params) {
  if (x.size() != y.size()) throw DimensionMismatch("eval_kernel", x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw InvalidArgument("eval_kernel: non-finite input at index " + std::to_string(i));
  }
  long double base = dot_extended(x.data(), y.data(), x.size()) + params.offset();
  return static_cast<double>(int_pow(base, params.degree()));
}

Matrix gram_matrix(const Matrix& X, const PolyKernelParams& params) {
  const auto n = static_cast<std::size_t>(X.rows());
  const auto d = static_cast<std::size_t>(X.cols());
  if (n == 0) throw InvalidArgument("gram_matrix: empty input");
  if (!X.allFinite()) throw InvalidArgument("gram_matrix: non-finite input");
  Matrix G(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = X.row(i).data();
    for (std::size_t j = 0; j <= i; ++j) {
      long double base = dot_extended(xi, X.row(j).data(), d) + params.offset();
      double v = static_cast<double>(int_pow(base, params.degree()));
      G(i, j) = v;
      G(j, i) = v;
    }
  }
  return G;
}

}  // namespace craftmaps
