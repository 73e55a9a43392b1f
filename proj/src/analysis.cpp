#include "perdyn/analysis.hpp"

#include "perdyn/linalg.hpp"
#include "perdyn/per.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace perdyn {

namespace {

void check_sigma_order(int m) {
  if (m < 0 || m % 2 || m > kMaxSeriesOrder)
    throw ValidationError("m must be even and in [0, " + std::to_string(kMaxSeriesOrder) + "]");
}

std::pair<std::complex<double>, std::complex<double>> eig2(const Eigen::Matrix2d& s) {
  const double tr = s.trace(), det = s.determinant();
  const std::complex<double> root = std::sqrt(std::complex<double>(tr * tr / 4.0 - det, 0.0));
  return {tr / 2.0 + root, tr / 2.0 - root};
}

template <class Fn>
double bisect(Fn&& f, double lo, double hi, double tol) {
  double flo = f(lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

template <class Fn>
double first_upward_crossing(Fn&& f, int m) {
  double prev = f(kTauScanStep);
  const int n = static_cast<int>(std::lround(kTauScanMax / kTauScanStep));
  for (int i = 2; i <= n; ++i) {
    const double tau = i * kTauScanStep;
    const double cur = f(tau);
    if (prev <= 0.0 && cur > 0.0) return bisect(f, tau - kTauScanStep, tau, kTauTolerance);
    prev = cur;
  }
  throw NumericalError("no crossing below tau = " + std::to_string(kTauScanMax) + " for m = " +
                       std::to_string(m) + " (unbounded)");
}

}  // namespace

Eigen::Matrix2d sigma_matrix(int m, double tau, double dt) {
  check_sigma_order(m);
  if (!(tau >= 0.0)) throw ValidationError("tau must be >= 0");
  if (!(dt > 0.0)) throw ValidationError("dt placeholder must be > 0");
  Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
  double scale = 1.0 / 24.0;
  for (int j = 0; j <= m / 2; ++j) {
    if (j > 0) scale *= -(tau * tau) / ((2.0 * j + 3) * (2.0 * j + 4));
    const double jj = j;
    Eigen::Matrix2d c;
    c << -12 * (jj + 1), 2 * (2 * jj + 1) * dt,
         -12 * (2 * jj + 1) * (jj + 2) / dt, 8 * jj * (jj + 2);
    s += scale * c;
  }
  return s;
}

SigmaEigen sigma_eigenvalues(int m, double tau, double dt) {
  const auto [a, b] = eig2(sigma_matrix(m, tau, dt));
  SigmaEigen e{m, tau, a, b, std::max(std::abs(a), std::abs(b))};
  return e;
}

double tau_limit(int m) {
  if (m < 2) throw ValidationError("tau_limit needs m >= 2 (rho(sigma_0) is constant)");
  check_sigma_order(m);
  return first_upward_crossing(
      [m](double tau) { return sigma_eigenvalues(m, tau).modulus_max - kSigmaLimit; }, m);
}

double tau_limit_branch_crossing(int m) {
  if (m < 2) throw ValidationError("tau_limit needs m >= 2");
  check_sigma_order(m);
  return first_upward_crossing(
      [m](double tau) {
        const SigmaEigen e = sigma_eigenvalues(m, tau);
        const auto& low = e.mu1.real() <= e.mu2.real() ? e.mu1 : e.mu2;
        return std::abs(low) - kSigmaLimit;
      },
      m);
}

DtBound dt_bound(double rho_c, double omega_max, int m) {
  if (!(omega_max > 0.0)) throw ValidationError("zero stiffness: no omega_max");
  DtBound b;
  b.damping_bound = rho_c > 0.0 ? 2.0 * std::sqrt(3.0) / rho_c
                                : std::numeric_limits<double>::infinity();
  b.truncation_bound = tau_limit(m) / omega_max;
  b.dt_max = std::min(b.damping_bound, b.truncation_bound);
  return b;
}

DtBound dt_bound(const SystemModel& model, int m) {
  return dt_bound(rho_minv_c(model), modal_analysis(model).omega_max(), m);
}

namespace {

// Binary128 keeps the |lambda| - 1 cancellation resolvable down to small dt0/T.
using LD = __float128;

LD sqrt_ld(LD x) {
  if (x <= 0) return 0;
  LD r = std::sqrt(static_cast<long double>(x));
  for (int i = 0; i < 3; ++i) r = 0.5 * (r + x / r);
  return r;
}

LD abs_ld(LD x) { return x < 0 ? -x : x; }

constexpr LD kPi = 3.14159265358979323846264338327950288Q;
constexpr LD kEps = 1.92592994438723585305597794258492732e-34Q;

struct M2 {
  LD a = 0, b = 0, c = 0, d = 0;
  M2 operator+(const M2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  M2 operator*(const M2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  M2 operator*(LD s) const { return {a * s, b * s, c * s, d * s}; }
};

// SDOF series with A = omega^2 and M^{-1}C = 2 omega zeta, T = 1.
M2 sdof_series(SeriesKind kind, LD dt, LD omega2, int m) {
  const int k = series_factorial_offset(kind);
  LD scale = 1;
  for (int i = 2; i <= k; ++i) scale /= i;
  M2 out;
  for (int j = 0; j <= m / 2; ++j) {
    if (j > 0) scale *= -(dt * dt * omega2) / ((2 * j + k - 1) * static_cast<LD>(2 * j + k));
    auto s = series_shape<LD>(kind, j, dt);
    out = out + M2{s[0], s[1], s[2], s[3]} * scale;
  }
  return out;
}

}  // namespace

double sdof_amplification_excess(double zeta, int m_a, int r_a, double x) {
  if (x == 0.0) return 0.0;
  const LD omega = 2 * kPi;
  const LD omega2 = omega * omega;
  const LD d = 2 * omega * static_cast<LD>(zeta);
  const LD dt = x;
  LD h = 0, dg = 0, pj = 1;
  for (int j = 0; j <= m_a / 2; ++j) {
    if (j > 0) pj *= -(dt * dt * omega2) / ((2 * j) * static_cast<LD>(2 * j + 1));
    h += pj;
    if (j > 0) dg += (2 * j + 1) * pj;
  }
  h *= dt;
  const M2 dtm{dg, h, -omega2 * h, dg};
  const M2 al = sdof_series(SeriesKind::alpha, dt, omega2, m_a) * d;
  const M2 be = sdof_series(SeriesKind::beta, dt, omega2, m_a) * d;
  M2 dbeta = be;
  for (int n = 2; n <= r_a; ++n) dbeta = be + be * dbeta;
  const M2 base = dtm + al;
  const M2 da = base + dbeta + dbeta * base;

  const LD tr = da.a + da.d;
  const LD det = da.a * da.d - da.b * da.c;
  const LD disc = tr * tr - 4 * det;
  const LD eps = kEps;
  LD excess;
  LD noise;
  if (disc < 0) {
    // |1 + nu|^2 - 1 = tr + det for a complex pair nu, conj(nu)
    excess = tr + det;
    noise = 64 * eps * (abs_ld(tr) + abs_ld(det) + abs_ld(da.b * da.c));
  } else {
    const LD r = sqrt_ld(disc);
    const LD n1 = (tr + r) / 2, n2 = (tr - r) / 2;
    excess = std::max(n1 * (2 + n1), n2 * (2 + n2));
    noise = 64 * eps * (abs_ld(tr) + r);
  }
  if (abs_ld(excess) <= noise) excess = 0;
  return static_cast<double>(excess);
}

StabilityRecord sdof_stability_map(double zeta, int m_a, int r_a, int p, double grid_max,
                                   double grid_step, Execution exec) {
  if (!(zeta >= 0.0)) throw ValidationError("zeta must be >= 0");
  if (m_a < 2 || m_a % 2 || m_a > kMaxSeriesOrder) throw ValidationError("invalid m_a");
  if (r_a < 2 || r_a % 2) throw ValidationError("invalid r_a");
  if (p < 1) throw ValidationError("p must be >= 1");
  if (!(grid_max > 0.0) || !(grid_step > 0.0) || grid_step > grid_max)
    throw ValidationError("grid parameters must be positive with step <= max");

  const auto n = static_cast<std::size_t>(std::floor(grid_max / grid_step + 1e-9));
  auto excess = [&](double x) { return sdof_amplification_excess(zeta, m_a, r_a, x); };
  const std::vector<double> values = map_indexed<double>(
      n, [&](std::size_t i) { return excess(static_cast<double>(i + 1) * grid_step); }, exec);

  StabilityRecord rec;
  rec.zeta = zeta;
  rec.m_a = m_a;
  rec.r_a = r_a;
  rec.grid.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    rec.grid.emplace_back(static_cast<double>(i + 1) * grid_step,
                          std::sqrt(std::max(0.0, 1.0 + values[i])));

  bool stable = values.empty() ? false : values[0] <= 0.0;
  double start = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const bool s = values[i] <= 0.0;
    if (s == stable) continue;
    const double lo = static_cast<double>(i) * grid_step;
    const double edge = bisect(excess, lo, lo + grid_step, kStabilityBisectionTol);
    if (stable)
      rec.boundaries.push_back({start, edge});
    else
      start = edge;
    stable = s;
  }
  if (stable) rec.boundaries.push_back({start, static_cast<double>(n) * grid_step});
  return rec;
}

std::vector<std::pair<double, double>> beta_radius_map(const SystemModel& model,
                                                       const std::vector<double>& dt_values,
                                                       int m_b, Execution exec) {
  for (double dt : dt_values)
    if (!(dt > 0.0)) throw ValidationError("dt values must be > 0");
  return map_indexed<std::pair<double, double>>(
      dt_values.size(),
      [&](std::size_t i) {
        const Mat be =
            assemble_series(model, dt_values[i], m_b, SeriesKind::beta, Execution::serial);
        return std::make_pair(dt_values[i], spectral_radius(be));
      },
      exec);
}

}  // namespace perdyn
