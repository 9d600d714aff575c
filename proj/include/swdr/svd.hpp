#pragma once

#include <cstddef>
#include <vector>

#include "swdr/image_io.hpp"

namespace swdr {

/// Thin SVD A = U diag(sigma) V^T with r = min(m, n) columns in U and V.
/// sigma is nonincreasing; the first entry of each u_i whose magnitude exceeds
/// 1e-12 is nonnegative (v_i flipped with it).
struct SvdFactors {
  RealMatrix u;               // m x r
  std::vector<double> sigma;  // r
  RealMatrix v;               // n x r
  std::size_t sweeps = 0;     // Jacobi sweeps used

  std::size_t rank_capacity() const noexcept { return sigma.size(); }
};

struct SvdOptions {
  // 0 selects the default cap of 100 * min(m, n) sweeps.
  std::size_t max_sweeps = 0;
};

/// One-sided (Hestenes) Jacobi SVD. Throws Error{convergence_failure} when
/// the sweep cap is exceeded and Error{non_finite_input} on NaN/Inf input.
SvdFactors svd_decompose(const RealMatrix& mat, SvdOptions options = {});

/// Sum of the first k rank-one terms sigma_i * u_i * v_i^T.
RealMatrix truncate_reconstruct(const SvdFactors& factors, std::size_t k);

struct RankBudget {
  std::size_t k = 1;
  std::size_t m = 0;
  std::size_t n = 0;
};

/// (m*n) / (k*(1+m+n)): uncompressed samples over stored factor entries.
double svd_compression_ratio(RankBudget budget);

struct RankChoice {
  std::size_t k = 1;
  bool ratio_unreachable = false;
};

/// Largest k >= 1 whose svd_compression_ratio reaches target; k = 1 with the
/// unreachable flag when even rank one falls short.
RankChoice rank_for_ratio(std::size_t m, std::size_t n, double target);

}  // namespace swdr
