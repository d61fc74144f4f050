#pragma once

#include <complex>

namespace openres::kernels {

// Runtime-dispatched inner loops for the Monte-Carlo propagator.  The scalar
// versions are the reference; the AVX2 versions must agree with them to
// rounding error (covered by the equivalence tests).  Everything else in the
// project goes through Eigen.
enum class Level { scalar, avx2 };

Level detected_level();
Level active_level();
// Select an implementation explicitly (tests force `scalar` to compare
// against `avx2`).  Throws InvalidParameter if the host lacks the level.
void set_level(Level level);
const char* level_name(Level level);

// y += alpha * x over n complex elements.
void caxpy(std::complex<double> alpha, const std::complex<double>* x,
           std::complex<double>* y, int n);

// y = m * x for a column-major n-by-n complex matrix.
void cgemv(const std::complex<double>* m, int n, const std::complex<double>* x,
           std::complex<double>* y);

// c += a * a^dagger, c column-major n-by-n (all entries, not just a triangle:
// downstream code reads the full Hermitian matrix).
void rank1_accumulate(std::complex<double>* c, const std::complex<double>* a, int n);

}  // namespace openres::kernels
