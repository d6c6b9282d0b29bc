#include <cmath>
#include <cstdint>
#include <cstring>

#include "equipart/kernels.hpp"
#include "exp_constants.hpp"
#include "kernels_impl.hpp"

namespace equipart::kernels {

double exp_approx(double x) {
  using namespace detail;
  x = x > kExpLo ? x : kExpLo;
  x = x < kExpHi ? x : kExpHi;
  const double n = std::nearbyint(x * kLog2e);
  double r = x - n * kLn2Hi;
  r = r - n * kLn2Lo;
  // Estrin's scheme; avx2::exp4 performs the same operations in the same order.
  const double r2 = r * r;
  const double r4 = r2 * r2;
  const double q0 = kExpCoeff[0] + kExpCoeff[1] * r;
  const double q1 = kExpCoeff[2] + kExpCoeff[3] * r;
  const double q2 = kExpCoeff[4] + kExpCoeff[5] * r;
  const double q3 = kExpCoeff[6] + kExpCoeff[7] * r;
  const double q4 = kExpCoeff[8] + kExpCoeff[9] * r;
  const double q5 = kExpCoeff[10] + kExpCoeff[11] * r;
  const double s0 = q0 + r2 * q1;
  const double s1 = q2 + r2 * q3;
  const double s2 = q4 + r2 * q5;
  const double p = s0 + r4 * (s1 + r4 * s2);
  const std::int64_t bits = (static_cast<std::int64_t>(n) + 1023) << 52;
  double scale;
  std::memcpy(&scale, &bits, sizeof scale);
  return p * scale;
}

namespace scalar {

void affine(const double* const* coords, std::size_t dim, const double* grad, double offset, std::size_t n,
            double* out) {
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      acc = acc + coords[j][k] * grad[j];
    }
    out[k] = acc + offset;
  }
}

void logistic(const double* in, double shift, double inv_tau, std::size_t n, double* out) {
  for (std::size_t k = 0; k < n; ++k) {
    const double z = (in[k] - shift) * inv_tau;
    out[k] = 1.0 / (1.0 + exp_approx(-z));
  }
}

void softmax(double* const* rows, std::size_t r, double inv_tau, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    double m = rows[0][k];
    for (std::size_t i = 1; i < r; ++i) {
      m = m > rows[i][k] ? m : rows[i][k];
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      const double e = exp_approx((rows[i][k] - m) * inv_tau);
      rows[i][k] = e;
      sum = sum + e;
    }
    for (std::size_t i = 0; i < r; ++i) {
      rows[i][k] = rows[i][k] / sum;
    }
  }
}

void exp(const double* in, std::size_t n, double* out) {
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = exp_approx(in[k]);
  }
}

}  // namespace scalar
}  // namespace equipart::kernels
