// Compiled with -mavx2 (and without -mfma); only called after a CPUID check.

#include <immintrin.h>

#include "equipart/kernels.hpp"
#include "exp_constants.hpp"
#include "kernels_impl.hpp"

namespace equipart::kernels::avx2 {

namespace {

inline __m256d exp4(__m256d x) {
  using namespace detail;
  x = _mm256_max_pd(x, _mm256_set1_pd(kExpLo));
  x = _mm256_min_pd(x, _mm256_set1_pd(kExpHi));
  const __m256d n =
      _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(n, _mm256_set1_pd(kLn2Hi)));
  r = _mm256_sub_pd(r, _mm256_mul_pd(n, _mm256_set1_pd(kLn2Lo)));
  auto c = [](int k) { return _mm256_set1_pd(kExpCoeff[k]); };
  auto lin = [&](int k) { return _mm256_add_pd(c(k), _mm256_mul_pd(c(k + 1), r)); };
  const __m256d r2 = _mm256_mul_pd(r, r);
  const __m256d r4 = _mm256_mul_pd(r2, r2);
  const __m256d s0 = _mm256_add_pd(lin(0), _mm256_mul_pd(r2, lin(2)));
  const __m256d s1 = _mm256_add_pd(lin(4), _mm256_mul_pd(r2, lin(6)));
  const __m256d s2 = _mm256_add_pd(lin(8), _mm256_mul_pd(r2, lin(10)));
  const __m256d p = _mm256_add_pd(s0, _mm256_mul_pd(r4, _mm256_add_pd(s1, _mm256_mul_pd(r4, s2))));
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m256i n64 = _mm256_add_epi64(_mm256_cvtepi32_epi64(n32), _mm256_set1_epi64x(1023));
  const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(n64, 52));
  return _mm256_mul_pd(p, scale);
}

}  // namespace

void affine(const double* const* coords, std::size_t dim, const double* grad, double offset, std::size_t n,
            double* out) {
  const __m256d off = _mm256_set1_pd(offset);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < dim; ++j) {
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(coords[j] + k), _mm256_set1_pd(grad[j])));
    }
    _mm256_storeu_pd(out + k, _mm256_add_pd(acc, off));
  }
  for (; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      acc = acc + coords[j][k] * grad[j];
    }
    out[k] = acc + offset;
  }
}

void logistic(const double* in, double shift, double inv_tau, std::size_t n, double* out) {
  const __m256d s = _mm256_set1_pd(shift);
  const __m256d it = _mm256_set1_pd(inv_tau);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d z = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(in + k), s), it);
    const __m256d e = exp4(_mm256_xor_pd(z, sign));
    _mm256_storeu_pd(out + k, _mm256_div_pd(one, _mm256_add_pd(one, e)));
  }
  for (; k < n; ++k) {
    const double z = (in[k] - shift) * inv_tau;
    out[k] = 1.0 / (1.0 + exp_approx(-z));
  }
}

void softmax(double* const* rows, std::size_t r, double inv_tau, std::size_t n) {
  const __m256d it = _mm256_set1_pd(inv_tau);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d m = _mm256_loadu_pd(rows[0] + k);
    for (std::size_t i = 1; i < r; ++i) {
      m = _mm256_max_pd(m, _mm256_loadu_pd(rows[i] + k));
    }
    __m256d sum = _mm256_setzero_pd();
    for (std::size_t i = 0; i < r; ++i) {
      const __m256d e = exp4(_mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(rows[i] + k), m), it));
      _mm256_storeu_pd(rows[i] + k, e);
      sum = _mm256_add_pd(sum, e);
    }
    for (std::size_t i = 0; i < r; ++i) {
      _mm256_storeu_pd(rows[i] + k, _mm256_div_pd(_mm256_loadu_pd(rows[i] + k), sum));
    }
  }
  for (; k < n; ++k) {
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
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(out + k, exp4(_mm256_loadu_pd(in + k)));
  }
  for (; k < n; ++k) {
    out[k] = exp_approx(in[k]);
  }
}

}  // namespace equipart::kernels::avx2
