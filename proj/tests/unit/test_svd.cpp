#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "swdr/error.hpp"
#include "swdr/svd.hpp"

using namespace swdr;

namespace {

double frobenius(const RealMatrix& a) {
  double s = 0.0;
  for (double x : a.values()) s += x * x;
  return std::sqrt(s);
}

RealMatrix minus(const RealMatrix& a, const RealMatrix& b) {
  RealMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out.values()[i] = a.values()[i] - b.values()[i];
  return out;
}

// max |Q^T Q - I| over the first r columns.
double orthogonality_error(const RealMatrix& q, std::size_t r) {
  double worst = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      double dot = 0.0;
      for (std::size_t row = 0; row < q.rows(); ++row) dot += q(row, i) * q(row, j);
      worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

Eigen::MatrixXd to_eigen(const RealMatrix& a) {
  Eigen::MatrixXd out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected swdr::Error");
  return ErrorCode::invalid_config;
}

}  // namespace

TEST_CASE("diagonal 2x2") {
  const RealMatrix a(2, 2, {3, 0, 0, 1});
  const auto f = svd_decompose(a);
  CHECK(f.sigma[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.sigma[1] == doctest::Approx(1.0).epsilon(1e-12));
  const RealMatrix rank1 = truncate_reconstruct(f, 1);
  CHECK(rank1(0, 0) == doctest::Approx(3.0));
  CHECK(std::abs(rank1(0, 1)) < 1e-12);
  CHECK(std::abs(rank1(1, 0)) < 1e-12);
  CHECK(std::abs(rank1(1, 1)) < 1e-12);
}

TEST_CASE("rank-deficient 2x2") {
  const RealMatrix a(2, 2, {1, 2, 2, 4});
  const auto f = svd_decompose(a);
  CHECK(f.sigma[0] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(std::abs(f.sigma[1]) < 1e-12);
  CHECK(frobenius(minus(truncate_reconstruct(f, 1), a)) < 1e-12);
  CHECK(orthogonality_error(f.u, 2) < 1e-12);
  CHECK(orthogonality_error(f.v, 2) < 1e-12);
}

TEST_CASE("random matrices: reconstruction, orthonormality, ordering, sign rule") {
  std::mt19937 rng(41);
  for (auto [m, n] : {std::pair{8, 8}, {17, 5}, {5, 17}, {40, 31}, {1, 6}, {6, 1}, {64, 64}}) {
    const RealMatrix a = test::random_matrix(rng, m, n, -3.0, 3.0);
    const auto f = svd_decompose(a);
    const std::size_t r = std::min<std::size_t>(m, n);
    REQUIRE(f.sigma.size() == r);
    CHECK(f.u.rows() == static_cast<std::size_t>(m));
    CHECK(f.v.rows() == static_cast<std::size_t>(n));
    CHECK(frobenius(minus(truncate_reconstruct(f, r), a)) <= 1e-10 * frobenius(a));
    CHECK(orthogonality_error(f.u, r) < 1e-10);
    CHECK(orthogonality_error(f.v, r) < 1e-10);
    for (std::size_t i = 1; i < r; ++i) CHECK(f.sigma[i - 1] >= f.sigma[i]);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t row = 0; row < f.u.rows(); ++row) {
        if (std::abs(f.u(row, i)) > 1e-12) {
          CHECK(f.u(row, i) > 0.0);
          break;
        }
      }
    }
  }
}

TEST_CASE("singular values agree with an independent solver") {
  std::mt19937 rng(43);
  for (auto [m, n] : {std::pair{12, 12}, {30, 9}, {9, 30}}) {
    const RealMatrix a = test::random_matrix(rng, m, n);
    const auto f = svd_decompose(a);
    const Eigen::JacobiSVD<Eigen::MatrixXd> ref(to_eigen(a));
    const auto& s = ref.singularValues();
    for (std::size_t i = 0; i < f.sigma.size(); ++i) {
      CHECK(f.sigma[i] == doctest::Approx(s(static_cast<Eigen::Index>(i))).epsilon(1e-10));
    }
  }
}

TEST_CASE("truncation error matches the tail of the spectrum") {
  std::mt19937 rng(47);
  const RealMatrix a = test::random_matrix(rng, 25, 20);
  const auto f = svd_decompose(a);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= 20; ++k) {
    double tail = 0.0;
    for (std::size_t i = k; i < 20; ++i) tail += f.sigma[i] * f.sigma[i];
    const double err = frobenius(minus(a, truncate_reconstruct(f, k)));
    CHECK(std::abs(err - std::sqrt(tail)) <= 1e-10 * frobenius(a));
    CHECK(err <= previous + 1e-12);
    previous = err;
  }
}

TEST_CASE("rank-k truncation beats random rank-k competitors") {
  std::mt19937 rng(53);
  const RealMatrix a = test::random_matrix(rng, 16, 12);
  const auto f = svd_decompose(a);
  for (std::size_t k : {1, 3, 6}) {
    const double best = frobenius(minus(a, truncate_reconstruct(f, k)));
    for (int trial = 0; trial < 20; ++trial) {
      const RealMatrix x = test::random_matrix(rng, 16, k);
      const RealMatrix y = test::random_matrix(rng, k, 12);
      RealMatrix b(16, 12);
      for (std::size_t r = 0; r < 16; ++r)
        for (std::size_t c = 0; c < 12; ++c)
          for (std::size_t i = 0; i < k; ++i) b(r, c) += x(r, i) * y(i, c);
      CHECK(frobenius(minus(a, b)) >= best);
    }
  }
}

TEST_CASE("zero and constant matrices") {
  const auto z = svd_decompose(RealMatrix(4, 3, 0.0));
  for (double s : z.sigma) CHECK(s == 0.0);
  CHECK(orthogonality_error(z.u, 3) < 1e-12);
  const auto c = svd_decompose(RealMatrix(6, 4, 2.0));
  CHECK(c.sigma[0] == doctest::Approx(2.0 * std::sqrt(24.0)));
  CHECK(std::abs(c.sigma[1]) < 1e-12);
}

TEST_CASE("errors") {
  RealMatrix bad(2, 2, 1.0);
  bad(0, 1) = std::nan("");
  CHECK(code_of([&] { svd_decompose(bad); }) == ErrorCode::non_finite_input);
  const auto f = svd_decompose(RealMatrix(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 10}));
  CHECK(code_of([&] { truncate_reconstruct(f, 0); }) == ErrorCode::rank_out_of_range);
  CHECK(code_of([&] { truncate_reconstruct(f, 4); }) == ErrorCode::rank_out_of_range);
  std::mt19937 rng(59);
  const RealMatrix a = test::random_matrix(rng, 30, 30);
  CHECK(code_of([&] { svd_decompose(a, SvdOptions{1}); }) == ErrorCode::convergence_failure);
}

TEST_CASE("compression ratio and rank selection") {
  CHECK(svd_compression_ratio({12, 512, 512}) == doctest::Approx(262144.0 / 12300.0));
  CHECK(svd_compression_ratio({12, 512, 512}) == doctest::Approx(21.3125).epsilon(1e-4));

  auto choice = rank_for_ratio(512, 512, 20.0);
  CHECK(choice.k == 12);
  CHECK_FALSE(choice.ratio_unreachable);
  choice = rank_for_ratio(512, 512, 1.0);
  CHECK(choice.k == 255);
  choice = rank_for_ratio(4, 4, 10.0);
  CHECK(choice.k == 1);
  CHECK(choice.ratio_unreachable);

  // Brute-force oracle over a spread of shapes and targets.
  for (std::size_t m : {3, 17, 100, 512}) {
    for (std::size_t n : {5, 64, 333}) {
      for (double t : {0.5, 1.0, 2.0, 3.7, 10.0, 20.0, 80.0}) {
        std::size_t best = 0;
        for (std::size_t k = 1; k <= std::min(m, n); ++k) {
          if (svd_compression_ratio({k, m, n}) >= t) best = k;
        }
        const auto got = rank_for_ratio(m, n, t);
        if (best == 0) {
          CHECK(got.k == 1);
          CHECK(got.ratio_unreachable);
        } else {
          CHECK(got.k == best);
          CHECK_FALSE(got.ratio_unreachable);
        }
      }
    }
  }
}
