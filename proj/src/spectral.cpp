#include "orthant/diagnostics.hpp"

#include "orthant/errors.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace orthant {

SpectralGapResult spectral_gap_1d(const std::function<double(double)>& log_density, double a,
                                  double b, std::size_t grid_points) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) throw ConfigError("spectral gap needs a < b");
  if (grid_points < 100) throw ConfigError("spectral gap needs at least 100 grid points");
  const std::size_t n = grid_points;
  const double dx = (b - a) / static_cast<double>(n);

  // log of the cell masses mu(x_i) dx and face weights mu(x_{i+1/2}) / dx,
  // shifted by a common constant so the largest is O(1).
  std::vector<double> lm(n), lw(n - 1);
  for (std::size_t i = 0; i < n; ++i) lm[i] = log_density(a + (static_cast<double>(i) + 0.5) * dx);
  for (std::size_t i = 0; i + 1 < n; ++i) lw[i] = log_density(a + static_cast<double>(i + 1) * dx);
  const double shift = *std::max_element(lm.begin(), lm.end());
  for (double& v : lm) {
    if (!std::isfinite(v)) throw ConfigError("log density is not finite on the interval");
    v += std::log(dx) - shift;
  }
  for (double& v : lw) {
    if (!std::isfinite(v)) throw ConfigError("log density is not finite on the interval");
    v -= std::log(dx) + shift;
  }

  // S = M^{-1/2} K M^{-1/2}
  std::vector<double> diag(n, 0.0), off(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    diag[i] += std::exp(lw[i] - lm[i]);
    diag[i + 1] += std::exp(lw[i] - lm[i + 1]);
    off[i] = -std::exp(lw[i] - 0.5 * (lm[i] + lm[i + 1]));
  }

  lapack_int found = 0;
  lapack_int nsplit = 0;
  std::vector<double> w(n);
  std::vector<lapack_int> iblock(n), isplit(n);
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  const lapack_int info =
      LAPACKE_dstebz('I', 'E', static_cast<lapack_int>(n), 0.0, 0.0, 2, 2, abstol, diag.data(),
                     off.data(), &found, &nsplit, w.data(), iblock.data(), isplit.data());
  if (info != 0 || found != 1) {
    throw NumericalError("tridiagonal eigensolve failed (info " + std::to_string(info) + ")");
  }
  SpectralGapResult r;
  r.gap = w[0];
  if (!(r.gap > 0.0)) throw NumericalError("spectral gap estimate is not positive");
  r.grid_points = n;
  r.a = a;
  r.b = b;
  r.implied_C_PI = 1.0 / r.gap;
  return r;
}

}  // namespace orthant
