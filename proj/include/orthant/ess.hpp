#pragma once

#include "orthant/types.hpp"

#include <vector>

namespace orthant {

// Rank-normalized split-chain bulk ESS. Chains must share one length >= 8.
// Clipped to 1.5 times the total draw count. Throws DegenerateChainError when
// every draw is equal.
double bulk_ess(const std::vector<Vector>& chains);
double bulk_ess(const Vector& chain);

// Split-chain ESS of the raw values (no rank normalization); the ESS that
// governs the Monte Carlo error of a sample mean.
double mean_ess(const std::vector<Vector>& chains);

// Biased autocovariance (lag 0..n-1, normalized by n) computed with FFTs.
Vector autocovariance(const Vector& x);

// z-scores Phi^{-1}((r - 3/8) / (N + 1/4)) of the pooled average ranks r.
std::vector<Vector> rank_normalize(const std::vector<Vector>& chains);

}  // namespace orthant
