#include "perdyn/kernels.hpp"

#include <omp.h>

namespace perdyn {

namespace {

void check_shapes(const std::vector<Mat>& coeffs, const std::vector<Mat>& blocks) {
  if (coeffs.size() != blocks.size() || coeffs.empty())
    throw ValidationError("kron_accumulate: coefficient/block count mismatch");
  for (std::size_t j = 1; j < coeffs.size(); ++j) {
    if (coeffs[j].rows() != coeffs[0].rows() || coeffs[j].cols() != coeffs[0].cols() ||
        blocks[j].rows() != blocks[0].rows() || blocks[j].cols() != blocks[0].cols())
      throw ValidationError("kron_accumulate: inconsistent shapes");
  }
}

}  // namespace

Mat kron_accumulate_serial(const std::vector<Mat>& coeffs, const std::vector<Mat>& blocks) {
  check_shapes(coeffs, blocks);
  const Eigen::Index r = coeffs[0].rows(), c = coeffs[0].cols();
  const Eigen::Index n = blocks[0].rows(), nc = blocks[0].cols();
  Mat out = Mat::Zero(r * n, c * nc);
  for (std::size_t j = 0; j < coeffs.size(); ++j)
    for (Eigen::Index bc = 0; bc < c; ++bc)
      for (Eigen::Index br = 0; br < r; ++br) {
        const double s = coeffs[j](br, bc);
        if (s != 0.0) out.block(br * n, bc * nc, n, nc) += s * blocks[j];
      }
  return out;
}

// Each thread owns whole output columns, summed over j in the same order as
// the serial loop, so both versions agree bit for bit.
Mat kron_accumulate_parallel(const std::vector<Mat>& coeffs, const std::vector<Mat>& blocks) {
  check_shapes(coeffs, blocks);
  const Eigen::Index r = coeffs[0].rows(), c = coeffs[0].cols();
  const Eigen::Index n = blocks[0].rows(), nc = blocks[0].cols();
  Mat out = Mat::Zero(r * n, c * nc);
  const long long total_cols = static_cast<long long>(c * nc);
#pragma omp parallel for schedule(static)
  for (long long col = 0; col < total_cols; ++col) {
    const Eigen::Index bc = static_cast<Eigen::Index>(col) / nc;
    const Eigen::Index k = static_cast<Eigen::Index>(col) % nc;
    for (std::size_t j = 0; j < coeffs.size(); ++j)
      for (Eigen::Index br = 0; br < r; ++br) {
        const double s = coeffs[j](br, bc);
        if (s != 0.0) out.col(col).segment(br * n, n) += s * blocks[j].col(k);
      }
  }
  return out;
}

Mat kron_accumulate(const std::vector<Mat>& coeffs, const std::vector<Mat>& blocks,
                    Execution exec) {
  return exec == Execution::serial ? kron_accumulate_serial(coeffs, blocks)
                                   : kron_accumulate_parallel(coeffs, blocks);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace perdyn
