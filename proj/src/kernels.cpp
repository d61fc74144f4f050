#include "openres/kernels.hpp"

#include <atomic>

#include "openres/types.hpp"

namespace openres::kernels {

void caxpy_avx2(std::complex<double> alpha, const std::complex<double>* x,
                std::complex<double>* y, int n);  // kernels_avx2.cpp
bool avx2_available();

namespace {

void caxpy_scalar(std::complex<double> alpha, const std::complex<double>* x,
                  std::complex<double>* y, int n) {
  const double ar = alpha.real();
  const double ai = alpha.imag();
  const double* xs = reinterpret_cast<const double*>(x);
  double* ys = reinterpret_cast<double*>(y);
  for (int i = 0; i < n; ++i) {
    const double xr = xs[2 * i];
    const double xi = xs[2 * i + 1];
    ys[2 * i] += ar * xr - ai * xi;
    ys[2 * i + 1] += ar * xi + ai * xr;
  }
}

using CaxpyFn = void (*)(std::complex<double>, const std::complex<double>*,
                         std::complex<double>*, int);

std::atomic<CaxpyFn> g_caxpy{nullptr};
std::atomic<Level> g_level{Level::scalar};

CaxpyFn fn_for(Level level) {
  return level == Level::avx2 ? &caxpy_avx2 : &caxpy_scalar;
}

struct Init {
  Init() {
    Level level = avx2_available() ? Level::avx2 : Level::scalar;
    g_level.store(level);
    g_caxpy.store(fn_for(level));
  }
};
Init g_init;

}  // namespace

Level detected_level() { return avx2_available() ? Level::avx2 : Level::scalar; }

Level active_level() { return g_level.load(); }

void set_level(Level level) {
  if (level == Level::avx2 && !avx2_available()) {
    throw InvalidParameter("kernel level avx2 not supported on this host");
  }
  g_level.store(level);
  g_caxpy.store(fn_for(level));
}

const char* level_name(Level level) {
  return level == Level::avx2 ? "avx2" : "scalar";
}

void caxpy(std::complex<double> alpha, const std::complex<double>* x,
           std::complex<double>* y, int n) {
  g_caxpy.load()(alpha, x, y, n);
}

void cgemv(const std::complex<double>* m, int n, const std::complex<double>* x,
           std::complex<double>* y) {
  for (int i = 0; i < n; ++i) y[i] = 0.0;
  CaxpyFn axpy = g_caxpy.load();
  for (int j = 0; j < n; ++j) {
    axpy(x[j], m + static_cast<std::size_t>(j) * n, y, n);
  }
}

void rank1_accumulate(std::complex<double>* c, const std::complex<double>* a, int n) {
  CaxpyFn axpy = g_caxpy.load();
  for (int j = 0; j < n; ++j) {
    axpy(std::conj(a[j]), a, c + static_cast<std::size_t>(j) * n, n);
  }
}

}  // namespace openres::kernels
