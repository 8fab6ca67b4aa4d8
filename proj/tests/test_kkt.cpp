#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nmf/additive.hpp"
#include "nmf/kkt.hpp"
#include "nmf/solve.hpp"
#include "oracles.hpp"

using nmf::DenseMatrix;

namespace {

// Independent evaluation of the stationarity residual, entry by entry,
// with its own gradients.
nmf::KktReport brute_force_kkt(const DenseMatrix& v, const DenseMatrix& w,
                               const DenseMatrix& h) {
  DenseMatrix diff = oracles::naive_matmul(w, h);
  for (std::size_t i = 0; i < diff.rows(); ++i) {
    for (std::size_t j = 0; j < diff.cols(); ++j) diff(i, j) -= v(i, j);
  }
  const DenseMatrix gw = oracles::naive_matmul(diff, nmf::transpose(h));
  const DenseMatrix gh = oracles::naive_matmul(nmf::transpose(w), diff);

  nmf::KktReport report{0.0, 0, 0, 0.0, oracles::naive_objective(v, w, h)};
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t a = 0; a < w.cols(); ++a) {
      const double t = std::min(w(i, a), gw(i, a));
      if (t != 0.0) {
        ++report.count_w;
        report.delta_raw += std::abs(t);
      }
    }
  }
  for (std::size_t b = 0; b < h.rows(); ++b) {
    for (std::size_t j = 0; j < h.cols(); ++j) {
      const double t = std::min(h(b, j), gh(b, j));
      if (t != 0.0) {
        ++report.count_h;
        report.delta_raw += std::abs(t);
      }
    }
  }
  const std::size_t count = report.count_w + report.count_h;
  report.delta_normalized = count > 0 ? report.delta_raw / static_cast<double>(count) : 0.0;
  return report;
}

}  // namespace

TEST_CASE("kkt_residual is zero at an exact positive factorization", "[kkt]") {
  std::mt19937_64 rng(401);
  const DenseMatrix w = oracles::rand_matrix(rng, 4, 2, 0.1, 2.0);
  const DenseMatrix h = oracles::rand_matrix(rng, 2, 5, 0.1, 2.0);
  const DenseMatrix v = nmf::matmul(w, h);
  const auto report = nmf::kkt_residual(v, w, h);
  REQUIRE(report.delta_raw == 0.0);
  REQUIRE(report.count_w == 0);
  REQUIRE(report.count_h == 0);
  REQUIRE(report.delta_normalized == 0.0);
  REQUIRE(report.objective == 0.0);
}

TEST_CASE("kkt_residual matches the hand-evaluated scalar case", "[kkt]") {
  const auto one = DenseMatrix::from_rows({{1}});
  const auto three = DenseMatrix::from_rows({{3}});
  const auto report = nmf::kkt_residual(three, one, one);
  REQUIRE(report.delta_raw == 4.0);
  REQUIRE(report.count_w == 1);
  REQUIRE(report.count_h == 1);
  REQUIRE(report.delta_normalized == 2.0);
}

TEST_CASE("kkt_residual matches an independent per-entry evaluation", "[kkt]") {
  std::mt19937_64 rng(402);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix v = oracles::rand_matrix(rng, 6, 5, 0.0, 10.0);
    const DenseMatrix w = oracles::rand_matrix(rng, 6, 3, 0.0, 1.0);
    const DenseMatrix h = oracles::rand_matrix(rng, 3, 5, 0.0, 1.0);
    const auto fast = nmf::kkt_residual(v, w, h);
    const auto ref = brute_force_kkt(v, w, h);
    REQUIRE(fast.count_w == ref.count_w);
    REQUIRE(fast.count_h == ref.count_h);
    REQUIRE_THAT(fast.delta_raw, Catch::Matchers::WithinAbs(ref.delta_raw, 1e-12));
    REQUIRE_THAT(fast.delta_normalized,
                 Catch::Matchers::WithinAbs(ref.delta_normalized, 1e-12));
  }
}

TEST_CASE("delta_raw is zero exactly when no term counts", "[kkt]") {
  std::mt19937_64 rng(403);
  for (int trial = 0; trial < 30; ++trial) {
    const DenseMatrix v = oracles::rand_matrix(rng, 4, 4, 0.0, 5.0);
    const DenseMatrix w = oracles::rand_matrix(rng, 4, 2, 0.0, 1.0);
    const DenseMatrix h = oracles::rand_matrix(rng, 2, 4, 0.0, 1.0);
    const auto report = nmf::kkt_residual(v, w, h);
    REQUIRE((report.delta_raw == 0.0) == (report.count_w + report.count_h == 0));
    REQUIRE(report.delta_normalized >= 0.0);
  }
}

TEST_CASE("is_kkt_point thresholds the normalized residual", "[kkt]") {
  std::mt19937_64 rng(404);
  const DenseMatrix w = oracles::rand_matrix(rng, 3, 2, 0.1, 2.0);
  const DenseMatrix h = oracles::rand_matrix(rng, 2, 4, 0.1, 2.0);
  const DenseMatrix v = nmf::matmul(w, h);
  REQUIRE(nmf::is_kkt_point(v, w, h, 0.0));

  const auto one = DenseMatrix::from_rows({{1}});
  const auto three = DenseMatrix::from_rows({{3}});
  REQUIRE_FALSE(nmf::is_kkt_point(three, one, one, 1e-6));
}

TEST_CASE("a converged additive run passes the KKT check", "[kkt]") {
  std::mt19937_64 rng(405);
  const DenseMatrix v = oracles::rand_matrix(rng, 10, 8, 0.0, 50.0);
  const DenseMatrix w0 = oracles::rand_matrix(rng, 10, 2, 0.0, 2.0);
  const DenseMatrix h0 = oracles::rand_matrix(rng, 2, 8, 0.0, 2.0);
  nmf::SolverConfig config;
  config.max_sweeps = 5000;
  config.tol_delta = 1e-4;
  const auto result = nmf::solve_additive(v, w0, h0, config);
  REQUIRE(nmf::is_kkt_point(v, result.factors.w, result.factors.h, 1e-3));
}

TEST_CASE("transform_t fixed points coincide with zero residual", "[kkt]") {
  std::mt19937_64 rng(406);
  // Stationary instance with positive curvatures: fixed and delta = 0.
  const DenseMatrix w = oracles::rand_matrix(rng, 4, 2, 0.1, 2.0);
  const DenseMatrix h = oracles::rand_matrix(rng, 2, 5, 0.1, 2.0);
  const DenseMatrix v = nmf::matmul(w, h);
  REQUIRE(nmf::kkt_residual(v, w, h).delta_normalized == 0.0);
  auto s = nmf::ResidualState::init(v, w, h);
  nmf::transform_t(s);
  REQUIRE(s.w == w);
  REQUIRE(s.h == h);

  // Non-stationary instance: delta > 0 and the sweep moves the state.
  DenseMatrix v2;
  const DenseMatrix w2 = oracles::rand_matrix(rng, 5, 2, 0.0, 1.0);
  const DenseMatrix h2 = oracles::rand_matrix(rng, 2, 6, 0.0, 1.0);
  v2 = oracles::rand_matrix(rng, 5, 6, 0.0, 5.0);
  REQUIRE(nmf::kkt_residual(v2, w2, h2).delta_normalized > 0.0);
  auto s2 = nmf::ResidualState::init(v2, w2, h2);
  nmf::transform_t(s2);
  REQUIRE((s2.w == w2 && s2.h == h2) == false);
}

TEST_CASE("kkt_residual rejects nonconforming shapes", "[kkt]") {
  REQUIRE_THROWS_AS(nmf::kkt_residual(DenseMatrix(3, 3), DenseMatrix(3, 2), DenseMatrix(2, 4)),
                    nmf::DimensionError);
}
