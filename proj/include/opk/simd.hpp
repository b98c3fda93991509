#pragma once

// Hot reduction loops with a scalar reference path and an AVX2+FMA path.
// The active path is picked once at startup from CPUID; setting the
// environment variable OPK_SIMD=scalar forces the reference path.
// Each path has a fixed summation order, so results are reproducible per path.

#include <complex>
#include <cstddef>

namespace opk::simd {

using cplx = std::complex<double>;

enum class Path { Scalar, Avx2 };

bool avx2_available();
Path active_path();
void set_path(Path p);  // throws ValidationError if AVX2 is requested but missing
const char* path_name(Path p);

// sum_k v[k]
cplx sum(const cplx* v, std::size_t n);
// sum_k a[k] * conj(b[k])
cplx dot_conj(const cplx* a, const cplx* b, std::size_t n);
// y[k] += alpha * x[k]
void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
// sum_k f[k] * exp(-i * omega * (t0 + k*dt))
cplx phase_sum(const cplx* f, std::size_t n, double t0, double dt, double omega);
// y[k] += c * exp(i * s * (t0 + k*dt))
void phase_axpy(cplx c, double s, double t0, double dt, cplx* y, std::size_t n);

namespace scalar {
cplx sum(const cplx* v, std::size_t n);
cplx dot_conj(const cplx* a, const cplx* b, std::size_t n);
void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
cplx phase_sum(const cplx* f, std::size_t n, double t0, double dt, double omega);
void phase_axpy(cplx c, double s, double t0, double dt, cplx* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
cplx sum(const cplx* v, std::size_t n);
cplx dot_conj(const cplx* a, const cplx* b, std::size_t n);
void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
cplx phase_sum(const cplx* f, std::size_t n, double t0, double dt, double omega);
void phase_axpy(cplx c, double s, double t0, double dt, cplx* y, std::size_t n);
}  // namespace avx2

}  // namespace opk::simd
