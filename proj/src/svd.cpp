#include "swdr/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "swdr/error.hpp"

namespace swdr {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double dot(const double* a, const double* b, std::size_t len) {
  double s = 0.0;
  for (std::size_t i = 0; i < len; ++i) s += a[i] * b[i];
  return s;
}

void rotate(double* a, double* b, std::size_t len, double c, double s) {
  for (std::size_t i = 0; i < len; ++i) {
    const double x = a[i];
    const double y = b[i];
    a[i] = c * x - s * y;
    b[i] = s * x + c * y;
  }
}

// Column-major m x n working copy; columns are orthogonalized in place.
struct TallResult {
  std::vector<double> w;  // m x n, column-major
  std::vector<double> v;  // n x n, column-major
  std::size_t sweeps = 0;
};

TallResult hestenes_jacobi(const RealMatrix& a, std::size_t max_sweeps) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  TallResult res;
  res.w.resize(m * n);
  res.v.assign(n * n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) res.w[c * m + r] = a(r, c);
  }
  for (std::size_t c = 0; c < n; ++c) res.v[c * n + c] = 1.0;

  const double tol = kEps * static_cast<double>(m);
  std::vector<double> norms(n);

  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double largest = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      norms[c] = dot(&res.w[c * m], &res.w[c * m], m);
      largest = std::max(largest, norms[c]);
    }
    // Columns at rounding-noise level are reported as zero singular values
    // anyway; rotating them against large columns only churns the noise and
    // can keep the sweep from ever settling.
    const double noise = kEps * static_cast<double>(std::max(m, n));
    const double negligible = noise * noise * largest;
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double* wi = &res.w[i * m];
        double* wj = &res.w[j * m];
        const double alpha = norms[i];
        const double beta = norms[j];
        if (alpha <= negligible || beta <= negligible) continue;
        const double gamma = dot(wi, wj, m);
        if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t =
            std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        rotate(wi, wj, m, cs, sn);
        rotate(&res.v[i * n], &res.v[j * n], n, cs, sn);
        norms[i] = alpha - t * gamma;
        norms[j] = beta + t * gamma;
      }
    }
    res.sweeps = sweep + 1;
    if (!rotated) return res;
  }
  throw Error(ErrorCode::convergence_failure,
              "Jacobi SVD did not converge in " + std::to_string(max_sweeps) + " sweeps");
}

// Completes column `col` of a column-major basis to be orthonormal to the
// columns before it. Starts from the unit vector least covered by the
// existing columns (lowest index on ties), so one projection always suffices.
void complete_column(std::vector<double>& basis, std::size_t len, std::size_t col,
                     const std::vector<bool>& filled) {
  const std::size_t cols = basis.size() / len;
  std::vector<double> coverage(len, 0.0);
  for (std::size_t prev = 0; prev < cols; ++prev) {
    if (!filled[prev]) continue;
    const double* q = &basis[prev * len];
    for (std::size_t i = 0; i < len; ++i) coverage[i] += q[i] * q[i];
  }
  const std::size_t e = static_cast<std::size_t>(
      std::min_element(coverage.begin(), coverage.end()) - coverage.begin());
  std::vector<double> cand(len, 0.0);
  cand[e] = 1.0;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t prev = 0; prev < cols; ++prev) {
      if (!filled[prev]) continue;
      const double* q = &basis[prev * len];
      const double proj = dot(q, cand.data(), len);
      for (std::size_t i = 0; i < len; ++i) cand[i] -= proj * q[i];
    }
  }
  const double norm = std::sqrt(dot(cand.data(), cand.data(), len));
  for (std::size_t i = 0; i < len; ++i) basis[col * len + i] = cand[i] / norm;
}

}  // namespace

SvdFactors svd_decompose(const RealMatrix& mat, SvdOptions options) {
  if (mat.rows() == 0 || mat.cols() == 0) {
    throw Error(ErrorCode::shape_mismatch, "SVD of an empty matrix");
  }
  for (double x : mat.values()) {
    if (!std::isfinite(x)) throw Error(ErrorCode::non_finite_input, "SVD input not finite");
  }
  // Jacobi works on the columns of a tall matrix; wide inputs go through A^T.
  const bool wide = mat.rows() < mat.cols();
  const RealMatrix tall = wide ? mat.transposed() : mat;
  const std::size_t m = tall.rows();
  const std::size_t n = tall.cols();
  const std::size_t cap = options.max_sweeps ? options.max_sweeps : 100 * n;

  TallResult jac = hestenes_jacobi(tall, cap);

  std::vector<double> sigma(n);
  for (std::size_t c = 0; c < n; ++c) {
    sigma[c] = std::sqrt(dot(&jac.w[c * m], &jac.w[c * m], m));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  const double sigma_max = sigma[order[0]];
  const double zero_cut = sigma_max * kEps * static_cast<double>(std::max(m, n));

  std::vector<double> ucols(m * n, 0.0);
  std::vector<double> vcols(n * n, 0.0);
  std::vector<double> sorted_sigma(n);
  for (std::size_t dst = 0; dst < n; ++dst) {
    const std::size_t src = order[dst];
    std::copy_n(&jac.v[src * n], n, &vcols[dst * n]);
    if (sigma[src] > zero_cut) {
      sorted_sigma[dst] = sigma[src];
      for (std::size_t i = 0; i < m; ++i) ucols[dst * m + i] = jac.w[src * m + i] / sigma[src];
    } else {
      sorted_sigma[dst] = 0.0;
    }
  }
  // Null-space directions of U are filled in after all nonzero ones are set.
  std::vector<bool> filled(n);
  for (std::size_t dst = 0; dst < n; ++dst) filled[dst] = sorted_sigma[dst] != 0.0;
  for (std::size_t dst = 0; dst < n; ++dst) {
    if (filled[dst]) continue;
    complete_column(ucols, m, dst, filled);
    filled[dst] = true;
  }

  for (std::size_t c = 0; c < n; ++c) {
    double* u = &ucols[c * m];
    const auto first = std::find_if(u, u + m, [](double x) { return std::abs(x) > 1e-12; });
    if (first != u + m && *first < 0.0) {
      for (std::size_t i = 0; i < m; ++i) u[i] = -u[i];
      for (std::size_t i = 0; i < n; ++i) vcols[c * n + i] = -vcols[c * n + i];
    }
  }

  RealMatrix left(m, n);
  RealMatrix right(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < m; ++i) left(i, c) = ucols[c * m + i];
    for (std::size_t i = 0; i < n; ++i) right(i, c) = vcols[c * n + i];
  }

  SvdFactors out;
  out.sigma = std::move(sorted_sigma);
  out.sweeps = jac.sweeps;
  if (wide) {
    // A^T = W S Q^T  =>  A = Q S W^T; re-apply the sign rule to the new U.
    out.u = std::move(right);
    out.v = std::move(left);
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t first = 0;
      while (first < out.u.rows() && std::abs(out.u(first, c)) <= 1e-12) ++first;
      if (first < out.u.rows() && out.u(first, c) < 0.0) {
        for (std::size_t i = 0; i < out.u.rows(); ++i) out.u(i, c) = -out.u(i, c);
        for (std::size_t i = 0; i < out.v.rows(); ++i) out.v(i, c) = -out.v(i, c);
      }
    }
  } else {
    out.u = std::move(left);
    out.v = std::move(right);
  }
  return out;
}

RealMatrix truncate_reconstruct(const SvdFactors& factors, std::size_t k) {
  const std::size_t r = factors.rank_capacity();
  if (k < 1 || k > r) {
    throw Error(ErrorCode::rank_out_of_range,
                "rank " + std::to_string(k) + " outside [1, " + std::to_string(r) + "]");
  }
  const std::size_t m = factors.u.rows();
  const std::size_t n = factors.v.rows();
  // V^T rows for the retained terms, contiguous for the inner loop.
  std::vector<double> vt(k * n);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t c = 0; c < n; ++c) vt[i * n + c] = factors.v(c, i);
  }
  RealMatrix out(m, n);
  for (std::size_t row = 0; row < m; ++row) {
    auto dst = out.row(row);
    for (std::size_t i = 0; i < k; ++i) {
      const double s = factors.sigma[i] * factors.u(row, i);
      if (s == 0.0) continue;
      const double* v = &vt[i * n];
      for (std::size_t c = 0; c < n; ++c) dst[c] += s * v[c];
    }
  }
  return out;
}

double svd_compression_ratio(RankBudget budget) {
  const double stored = static_cast<double>(budget.k) *
                        static_cast<double>(1 + budget.m + budget.n);
  return static_cast<double>(budget.m) * static_cast<double>(budget.n) / stored;
}

RankChoice rank_for_ratio(std::size_t m, std::size_t n, double target) {
  if (!(target > 0.0)) throw Error(ErrorCode::invalid_config, "target ratio must be positive");
  const std::size_t r = std::min(m, n);
  if (svd_compression_ratio({1, m, n}) < target) return {1, true};
  // The ratio is strictly decreasing in k, so the estimate only needs a
  // one-step correction in either direction.
  const double estimate =
      static_cast<double>(m) * static_cast<double>(n) / (target * static_cast<double>(1 + m + n));
  std::size_t k = static_cast<std::size_t>(std::clamp(std::floor(estimate), 1.0, static_cast<double>(r)));
  while (k < r && svd_compression_ratio({k + 1, m, n}) >= target) ++k;
  while (k > 1 && svd_compression_ratio({k, m, n}) < target) --k;
  return {k, false};
}

}  // namespace swdr
