#pragma once

namespace widelab {

/// Standard normal CDF via the libm complementary error function,
/// Phi(x) = erfc(-x / sqrt(2)) / 2. Absolute error at the 1e-16 level.
double normal_cdf(double x) noexcept;

/// Standard normal quantile, Wichura's AS241 (PPND16) rational
/// approximation, relative accuracy about 1e-16. p must lie in (0, 1);
/// returns -inf / +inf at 0 / 1 and NaN outside.
double normal_quantile(double p) noexcept;

}  // namespace widelab
