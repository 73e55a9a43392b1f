#include "perdyn/per.hpp"

#include <string>

namespace perdyn {

int series_factorial_offset(SeriesKind kind) { return kind == SeriesKind::T ? 0 : 4; }

namespace {

// (-1)^j dt^{2j} / (2j + k)!
double series_scale(int j, double dt, int k) {
  double s = 1.0;
  for (int i = 2; i <= k; ++i) s /= i;
  for (int i = 1; i <= j; ++i) s *= -(dt * dt) / ((2.0 * i + k - 1) * (2.0 * i + k));
  return s;
}

Mat shape_matrix(SeriesKind kind, int j, double dt) {
  const auto s = series_shape<double>(kind, j, dt);
  const int cols = series_cols(kind);
  Mat m(2, cols);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = s[static_cast<std::size_t>(r * cols + c)];
  return m;
}

Mat coeff(SeriesKind kind, int j, double dt) {
  if (j < 0) throw ValidationError("series index must be >= 0");
  if (kind == SeriesKind::T && dt == 0.0) {
    Mat m = Mat::Zero(2, 2);
    if (j == 0) m.setIdentity();
    return m;
  }
  return series_scale(j, dt, series_factorial_offset(kind)) * shape_matrix(kind, j, dt);
}

void check_order(int m) {
  if (m < 0 || m % 2) throw ValidationError("series order must be even and >= 0");
  if (m > kMaxSeriesOrder)
    throw ValidationError("series order " + std::to_string(m) + " exceeds the cap of " +
                          std::to_string(kMaxSeriesOrder));
}

// Shapes P_j and scaled powers S_j = (-dt^2 A)^j / (2j + k)!.
void series_terms(const SystemModel& model, double dt, int m, SeriesKind kind,
                  std::vector<Mat>& shapes, std::vector<Mat>& powers) {
  check_order(m);
  const int k = series_factorial_offset(kind);
  const Eigen::Index n = model.dof();
  const Mat step = -(dt * dt) * model.minv_k();
  double k_fact = 1.0;
  for (int i = 2; i <= k; ++i) k_fact *= i;
  shapes.clear();
  powers.clear();
  powers.push_back(Mat::Identity(n, n) / k_fact);
  shapes.push_back(shape_matrix(kind, 0, dt));
  for (int j = 1; j <= m / 2; ++j) {
    powers.push_back(powers.back() * step / ((2.0 * j + k - 1) * (2.0 * j + k)));
    shapes.push_back(shape_matrix(kind, j, dt));
  }
}

}  // namespace

Mat coeff_t(int j, double dt) { return coeff(SeriesKind::T, j, dt); }
Mat coeff_l(int j, double dt) { return coeff(SeriesKind::L, j, dt); }
Mat coeff_alpha(int j, double dt) { return coeff(SeriesKind::alpha, j, dt); }
Mat coeff_beta(int j, double dt) { return coeff(SeriesKind::beta, j, dt); }

std::array<double, 4> lagrange_cubic(double xi) {
  return {-0.5 * (3 * xi - 1) * (3 * xi - 2) * (xi - 1),
          4.5 * xi * (3 * xi - 2) * (xi - 1),
          -4.5 * xi * (3 * xi - 1) * (xi - 1),
          0.5 * xi * (3 * xi - 1) * (3 * xi - 2)};
}

Mat assemble_series(const SystemModel& model, double dt, int m, SeriesKind kind,
                    Execution exec) {
  const Eigen::Index n = model.dof();
  if (kind == SeriesKind::T && dt == 0.0) {
    check_order(m);
    return Mat::Identity(2 * n, 2 * n);
  }
  if ((kind == SeriesKind::alpha || kind == SeriesKind::beta) && model.is_undamped()) {
    check_order(m);
    return Mat::Zero(2 * n, 2 * n);
  }
  std::vector<Mat> shapes, powers;
  series_terms(model, dt, m, kind, shapes, powers);
  Mat out = kron_accumulate(shapes, powers, exec);
  if (kind == SeriesKind::alpha || kind == SeriesKind::beta) {
    const Mat& d = model.minv_c();
    Mat left = out.leftCols(n) * d;
    out.rightCols(n) = out.rightCols(n) * d;
    out.leftCols(n) = left;
  }
  return out;
}

Mat assemble_delta_t(const SystemModel& model, double dt, int m, Execution exec) {
  (void)exec;
  check_order(m);
  const Eigen::Index n = model.dof();
  if (dt == 0.0) return Mat::Zero(2 * n, 2 * n);
  // P_j = (-dt^2 A)^j / (2j + 1)!; H = dt sum P_j, G - I = sum_{j>=1} (2j + 1) P_j
  const Mat step = -(dt * dt) * model.minv_k();
  Mat pj = Mat::Identity(n, n);
  Mat h = pj;
  Mat dg = Mat::Zero(n, n);
  for (int j = 1; j <= m / 2; ++j) {
    pj = pj * step / ((2.0 * j) * (2.0 * j + 1));
    h += pj;
    dg += (2.0 * j + 1) * pj;
  }
  h *= dt;
  Mat out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = dg;
  out.topRightCorner(n, n) = h;
  out.bottomLeftCorner(n, n) = -model.minv_k() * h;
  out.bottomRightCorner(n, n) = dg;
  return out;
}

}  // namespace perdyn
