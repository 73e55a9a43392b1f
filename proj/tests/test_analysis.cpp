#include "helpers.hpp"
#include "oracles.hpp"
#include "perdyn/analysis.hpp"
#include "perdyn/per.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace perdyn;
using testing_util::sdof;

namespace {

// printed closed form for m = 2
std::complex<double> mu2_closed(double tau, int sign) {
  const double t2 = tau * tau;
  const double d = 300.0 + 2.0 * t2 * t2 - 60.0 * t2;
  const std::complex<double> root = d >= 0 ? std::complex<double>(0, std::sqrt(d))
                                           : std::complex<double>(std::sqrt(-d), 0);
  return (-30.0 + static_cast<double>(sign) * root) / 120.0;
}

double rho2x2(const Eigen::Matrix2d& s) {
  Eigen::EigenSolver<Eigen::Matrix2d> es(s, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("sigma_0 eigenvalues") {
  for (double tau : {0.0, 1.0, 5.0}) {
    const SigmaEigen e = sigma_eigenvalues(0, tau);
    CHECK(std::abs(std::abs(e.mu1) - kSigmaLimit) <= 1e-12);
    CHECK(std::abs(std::abs(e.mu2) - kSigmaLimit) <= 1e-12);
    CHECK(std::abs(e.mu1.real() + 0.25) <= 1e-12);
    CHECK(std::abs(std::abs(e.mu1.imag()) - std::sqrt(3.0) / 12) <= 1e-12);
    CHECK(e.modulus_max == std::max(std::abs(e.mu1), std::abs(e.mu2)));
  }
}

TEST_CASE("sigma_2 matrix and eigenvalues match the closed form") {
  for (double tau : {0.0, 0.5, 2.0, std::sqrt(30.0), 6.0}) {
    const double t2 = tau * tau, dt = 0.7;
    Eigen::Matrix2d e;
    e << -0.5 + t2 / 30, (1.0 / 12 - t2 / 120) * dt, (-1 + 3 * t2 / 20) / dt, -t2 / 30;
    CHECK((sigma_matrix(2, tau, dt) - e).cwiseAbs().maxCoeff() <= 1e-13 * (1 + t2));
    Eigen::EigenSolver<Eigen::Matrix2d> es(e, false);
    const auto ev = es.eigenvalues();
    const auto c1 = mu2_closed(tau, 1), c2 = mu2_closed(tau, -1);
    const double err = std::min(std::abs(ev[0] - c1) + std::abs(ev[1] - c2),
                                std::abs(ev[0] - c2) + std::abs(ev[1] - c1));
    CHECK(err <= 1e-12 * (1 + t2));
    const SigmaEigen s = sigma_eigenvalues(2, tau);
    CHECK(std::abs(s.modulus_max - std::max(std::abs(c1), std::abs(c2))) <= 1e-12 * (1 + t2));
  }
  CHECK(std::abs(sigma_eigenvalues(2, 0.0).modulus_max - kSigmaLimit) <= 1e-15);
}

TEST_CASE("sigma moduli do not depend on the dt placeholder") {
  for (int m : {2, 4, 8, 20}) {
    for (double tau : {0.3, 2.0, 7.5}) {
      const double ref = sigma_eigenvalues(m, tau, 1.0).modulus_max;
      for (double dt : {0.1, 10.0})
        CHECK(std::abs(sigma_eigenvalues(m, tau, dt).modulus_max - ref) <= 1e-12 * std::max(1.0, ref));
    }
  }
}

TEST_CASE("sigma is the scalar reduction of (T+alpha+beta) structure") {
  // sigma_m(tau) equals beta_j scaled by 1/(dt c) for an SDOF with c = 1
  for (int m : {2, 6}) {
    const double w = 3.0, dt = 0.4;
    const SystemModel s(Mat::Identity(1, 1), Mat::Identity(1, 1), Mat::Constant(1, 1, w * w));
    const Mat be = assemble_series(s, dt, m, SeriesKind::beta);
    Eigen::Matrix2d sig = sigma_matrix(m, w * dt, dt);
    CHECK((be / dt - Mat(sig)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("tau_limit reference values where the crossing is unambiguous") {
  CHECK(std::abs(tau_limit(2) - 2.64303) <= 1e-4);
  CHECK(std::abs(tau_limit(6) - 5.48854) <= 1e-4);
  CHECK(std::abs(tau_limit(8) - 6.68027) <= 1e-4);
  CHECK(std::abs(tau_limit(10) - 7.38332) <= 1e-4);
  CHECK(std::abs(tau_limit(20) - 11.3105) <= 1e-3);
  const double t30 = tau_limit(30), t40 = tau_limit(40);
  CHECK(tau_limit(10) < tau_limit(20));
  CHECK(tau_limit(20) < t30);
  CHECK(t30 < t40);
  CHECK(std::abs(t30 - 15.17) <= 1e-2);
  CHECK(std::abs(t40 - 19.02) <= 1e-2);
}

TEST_CASE("tau_limit is the first upward crossing") {
  for (int m : {2, 4, 6, 8, 12}) {
    const double t = tau_limit(m);
    CHECK(std::abs(sigma_eigenvalues(m, t).modulus_max - kSigmaLimit) <= 1e-7);
    for (double tau = 0.01; tau < t - 1e-3; tau += 0.01)
      CHECK(sigma_eigenvalues(m, tau).modulus_max <= kSigmaLimit + 1e-12);
    CHECK(sigma_eigenvalues(m, t + 1e-3).modulus_max > kSigmaLimit);
  }
}

TEST_CASE("m = 4 branch crossing") {
  CHECK(std::abs(tau_limit_branch_crossing(4) / (2 * M_PI) - 1.52683) <= 1e-4);
  CHECK(tau_limit(4) < tau_limit_branch_crossing(4));
}

TEST_CASE("tau_limit input validation") {
  CHECK_THROWS_AS(tau_limit(0), ValidationError);
  CHECK_THROWS_AS(tau_limit(3), ValidationError);
  CHECK_THROWS_AS(tau_limit(62), ValidationError);
  CHECK_THROWS_AS(sigma_eigenvalues(1, 0.3), ValidationError);
}

TEST_CASE("dt_bound") {
  const double w = 2 * M_PI;
  const SystemModel m(Mat::Identity(1, 1), Mat::Identity(1, 1), Mat::Constant(1, 1, w * w));
  const DtBound b = dt_bound(m, 2);
  CHECK(b.damping_bound == doctest::Approx(2 * std::sqrt(3.0)).epsilon(1e-12));
  CHECK(std::abs(b.truncation_bound - 0.42065) <= 1e-5);
  CHECK(b.dt_max == std::min(b.damping_bound, b.truncation_bound));

  const DtBound u = dt_bound(sdof(w, 0.0), 2);
  CHECK(std::isinf(u.damping_bound));
  CHECK(u.dt_max == u.truncation_bound);
  CHECK(dt_bound(sdof(w, 0.0), 4).dt_max == doctest::Approx(tau_limit(4) / (2 * M_PI)));

  const SystemModel free_body(Mat::Identity(1, 1), Mat::Zero(1, 1), Mat::Zero(1, 1));
  CHECK_THROWS_AS(dt_bound(free_body, 2), ValidationError);
}

TEST_CASE("stability map reference intervals") {
  struct Row {
    double zeta;
    int m_a;
    std::vector<StabilityInterval> expected;
  };
  const std::vector<Row> rows = {
      {0.0, 2, {{0.0, 0.2757}}},
      {0.005, 2, {{0.0, 0.2791}}},
      {0.05, 2, {{0.0, 0.3024}}},
      {0.5, 2, {{0.0, 0.3871}}},
      {0.0, 4, {{0.2964, 0.5405}}},
      {0.0, 8, {{0.2749, 0.7279}}},
  };
  for (const Row& r : rows) {
    CAPTURE(r.zeta);
    CAPTURE(r.m_a);
    const StabilityRecord rec = sdof_stability_map(r.zeta, r.m_a, 2, 20, 1.0, 0.001);
    REQUIRE(rec.boundaries.size() == r.expected.size());
    for (std::size_t i = 0; i < r.expected.size(); ++i) {
      CHECK(std::abs(rec.boundaries[i].lower - r.expected[i].lower) <= 5e-4);
      CHECK(std::abs(rec.boundaries[i].upper - r.expected[i].upper) <= 5e-4);
    }
  }
}

TEST_CASE("stability upper bound grows with damping for m_a = 2") {
  double prev = 0.0;
  for (double zeta : {0.0, 0.005, 0.05, 0.5}) {
    const StabilityRecord rec = sdof_stability_map(zeta, 2, 2, 20, 1.0, 0.002);
    REQUIRE(!rec.boundaries.empty());
    CHECK(rec.boundaries.front().upper >= prev);
    prev = rec.boundaries.front().upper;
  }
}

TEST_CASE("stability map structure and serial/parallel agreement") {
  const StabilityRecord s = sdof_stability_map(0.05, 4, 2, 20, 1.0, 0.005, Execution::serial);
  const StabilityRecord p = sdof_stability_map(0.05, 4, 2, 20, 1.0, 0.005, Execution::parallel);
  REQUIRE(s.grid.size() == p.grid.size());
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    CHECK(s.grid[i] == p.grid[i]);
    if (i) CHECK(s.grid[i].first > s.grid[i - 1].first);
  }
  for (std::size_t i = 0; i < s.boundaries.size(); ++i) {
    CHECK(s.boundaries[i].lower <= s.boundaries[i].upper);
    if (i) CHECK(s.boundaries[i].lower > s.boundaries[i - 1].upper);
  }
}

TEST_CASE("stability map amplification agrees with a direct double-precision evaluation") {
  // a(dt0) = (I + beta + beta^2)(I + dT + alpha) for a unit-mass SDOF, T = 1
  for (double x : {0.05, 0.2, 0.35}) {
    for (double zeta : {0.05, 0.5}) {
      const double w = 2 * M_PI;
      const SystemModel m = sdof(w, zeta);
      const Mat dtm = assemble_delta_t(m, x, 2);
      const Mat al = assemble_series(m, x, 2, SeriesKind::alpha);
      const Mat be = assemble_series(m, x, 2, SeriesKind::beta);
      const Mat a = (Mat::Identity(2, 2) + be + be * be) * (Mat::Identity(2, 2) + dtm + al);
      const double lam = oracle::spectral_radius(a);
      const double excess = sdof_amplification_excess(zeta, 2, 2, x);
      CHECK(std::abs(excess - (lam * lam - 1.0)) <= 1e-10);
    }
  }
}

TEST_CASE("beta radius map") {
  const SystemModel undamped = build_chain(4, 1.0, 100.0, {});
  for (const auto& [dt, rho] : beta_radius_map(undamped, {0.01, 0.1, 1.0}, 8)) CHECK(rho == 0.0);

  const SystemModel m = substitute_chain(0.7);
  const std::vector<double> dts = {0.01, 0.05, 0.2};
  const auto a = beta_radius_map(m, dts, 8);
  const auto b = beta_radius_map(m.scaled_damping(2.0), dts, 8);
  for (std::size_t i = 0; i < dts.size(); ++i) {
    CHECK(a[i].first == dts[i]);
    CHECK(std::abs(b[i].second - 2.0 * a[i].second) <= 1e-9 * b[i].second);
  }

  const auto s = beta_radius_map(m, dts, 8, Execution::serial);
  for (std::size_t i = 0; i < dts.size(); ++i) CHECK(s[i] == a[i]);
}

TEST_CASE("beta radius bound for classically damped SDOF") {
  const int m_b = 8;
  const double tl = tau_limit(m_b);
  for (double zeta : {0.01, 0.2, 1.0}) {
    const double w = 2.0;
    const SystemModel s = sdof(w, zeta);
    std::vector<double> dts;
    for (double tau = 0.05; tau <= tl; tau += 0.1) dts.push_back(tau / w);
    for (const auto& [dt, rho] : beta_radius_map(s, dts, m_b))
      CHECK(rho <= dt * 2 * zeta * w / (2 * std::sqrt(3.0)) * (1 + 1e-12));
  }
}

TEST_CASE("asymptotic partial sums converge below rho 0.9 and grow above 1.1") {
  const SystemModel base = sdof(1.0, 2.0);
  PerConfig c;
  c.m_b = 8;
  c.propagator = Propagator::direct;
  int checked_low = 0, checked_high = 0;
  for (double dt : {0.2, 0.5, 1.0, 1.5, 2.5}) {
    c.dt = dt;
    const AsymptoticResult r = integrate_asymptotic(base, c, 10 * dt, 150);
    if (r.rho_beta_b < 0.9) {
      ++checked_low;
      CHECK(!r.growing);
      CHECK(r.term_norms.back() < 1e-12 * r.term_norms[0]);
    } else if (r.rho_beta_b > 1.1) {
      ++checked_high;
      CHECK(r.growing);
    }
  }
  CHECK(checked_low > 0);
  CHECK(checked_high > 0);
}
