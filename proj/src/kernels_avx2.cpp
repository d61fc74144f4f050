// AVX2 variant of the complex axpy that powers cgemv and rank1_accumulate.
// This translation unit is the only one compiled with -mavx2 -mfma; it must
// not be entered unless the dispatcher verified cpu support.

#include <complex>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define OPENRES_HAVE_AVX2_BUILD 1
#endif

namespace openres::kernels {

bool avx2_available() {
#if defined(OPENRES_HAVE_AVX2_BUILD)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

#if defined(OPENRES_HAVE_AVX2_BUILD)

void caxpy_avx2(std::complex<double> alpha, const std::complex<double>* x,
                std::complex<double>* y, int n) {
  const double* xs = reinterpret_cast<const double*>(x);
  double* ys = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  int i = 0;
  // Two complex doubles per 256-bit lane, layout (re0, im0, re1, im1).
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xs + 2 * i);
    const __m256d xswap = _mm256_permute_pd(xv, 0x5);  // (im0, re0, im1, re1)
    const __m256d t = _mm256_mul_pd(xswap, ai);
    // even lanes: re*ar - im*ai, odd lanes: im*ar + re*ai
    const __m256d prod = _mm256_fmaddsub_pd(xv, ar, t);
    const __m256d yv = _mm256_loadu_pd(ys + 2 * i);
    _mm256_storeu_pd(ys + 2 * i, _mm256_add_pd(yv, prod));
  }
  for (; i < n; ++i) {
    const double xr = xs[2 * i];
    const double xi = xs[2 * i + 1];
    ys[2 * i] += alpha.real() * xr - alpha.imag() * xi;
    ys[2 * i + 1] += alpha.real() * xi + alpha.imag() * xr;
  }
}

#else

void caxpy_avx2(std::complex<double>, const std::complex<double>*,
                std::complex<double>*, int) {}

#endif

}  // namespace openres::kernels
