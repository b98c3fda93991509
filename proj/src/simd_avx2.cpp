#include "opk/simd.hpp"

#include <cmath>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define OPK_HAVE_X86 1
#endif

namespace opk::simd::avx2 {

#ifdef OPK_HAVE_X86

namespace {

constexpr std::size_t kBlock = 32;  // phases are re-seeded exactly every kBlock points

// [ar, ai, ...] x [br, bi, ...] -> complex product per lane pair
__attribute__((target("avx2,fma"))) inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d a_re = _mm256_movedup_pd(a);
  const __m256d a_im = _mm256_permute_pd(a, 0xF);
  const __m256d b_sw = _mm256_permute_pd(b, 0x5);
  return _mm256_fmaddsub_pd(a_re, b, _mm256_mul_pd(a_im, b_sw));
}

__attribute__((target("avx2,fma"))) inline __m256d seed_pair(double th0, double th1, double cr, double ci) {
  const double c0 = std::cos(th0), s0 = std::sin(th0);
  const double c1 = std::cos(th1), s1 = std::sin(th1);
  // (cr + i ci) * (c + i s)
  return _mm256_setr_pd(cr * c0 - ci * s0, cr * s0 + ci * c0, cr * c1 - ci * s1, cr * s1 + ci * c1);
}

__attribute__((target("avx2,fma"))) inline void hsum_pair(__m256d v, double& re, double& im) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  re += t[0] + t[2];
  im += t[1] + t[3];
}

}  // namespace

__attribute__((target("avx2,fma"))) cplx sum(const cplx* v, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(v);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) acc = _mm256_add_pd(acc, _mm256_loadu_pd(p + 2 * k));
  double re = 0.0, im = 0.0;
  hsum_pair(acc, re, im);
  for (; k < n; ++k) {
    re += p[2 * k];
    im += p[2 * k + 1];
  }
  return {re, im};
}

__attribute__((target("avx2,fma"))) cplx dot_conj(const cplx* a, const cplx* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc_d = _mm256_setzero_pd();  // [ar br, ai bi]
  __m256d acc_x = _mm256_setzero_pd();  // [ar bi, ai br]
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * k);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * k);
    acc_d = _mm256_fmadd_pd(va, vb, acc_d);
    acc_x = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0x5), acc_x);
  }
  alignas(32) double d[4], x[4];
  _mm256_store_pd(d, acc_d);
  _mm256_store_pd(x, acc_x);
  double re = (d[0] + d[1]) + (d[2] + d[3]);
  double im = (x[1] - x[0]) + (x[3] - x[2]);
  for (; k < n; ++k) {
    const double ar = pa[2 * k], ai = pa[2 * k + 1];
    const double br = pb[2 * k], bi = pb[2 * k + 1];
    re += ar * br + ai * bi;
    im += ai * br - ar * bi;
  }
  return {re, im};
}

__attribute__((target("avx2,fma"))) void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  const double ar = alpha.real(), ai = alpha.imag();
  const __m256d va_re = _mm256_set1_pd(ar);
  const __m256d va_im = _mm256_set1_pd(ai);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d vx = _mm256_loadu_pd(px + 2 * k);
    const __m256d prod = _mm256_fmaddsub_pd(va_re, vx, _mm256_mul_pd(va_im, _mm256_permute_pd(vx, 0x5)));
    _mm256_storeu_pd(py + 2 * k, _mm256_add_pd(_mm256_loadu_pd(py + 2 * k), prod));
  }
  for (; k < n; ++k) {
    const double xr = px[2 * k], xi = px[2 * k + 1];
    py[2 * k] += ar * xr - ai * xi;
    py[2 * k + 1] += ar * xi + ai * xr;
  }
}

__attribute__((target("avx2,fma"))) cplx phase_sum(const cplx* f, std::size_t n, double t0, double dt,
                                                   double omega) {
  const double* pf = reinterpret_cast<const double*>(f);
  const double step = -2.0 * omega * dt;
  const __m256d rot = _mm256_setr_pd(std::cos(step), std::sin(step), std::cos(step), std::sin(step));
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  while (k + 2 <= n) {
    const std::size_t stop = (n - k) / 2 * 2 < kBlock ? k + (n - k) / 2 * 2 : k + kBlock;
    const double th0 = -omega * (t0 + static_cast<double>(k) * dt);
    const double th1 = -omega * (t0 + static_cast<double>(k + 1) * dt);
    __m256d ph = seed_pair(th0, th1, 1.0, 0.0);
    for (; k < stop; k += 2) {
      acc = _mm256_add_pd(acc, cmul(_mm256_loadu_pd(pf + 2 * k), ph));
      ph = cmul(ph, rot);
    }
  }
  double re = 0.0, im = 0.0;
  hsum_pair(acc, re, im);
  for (; k < n; ++k) {
    const double th = omega * (t0 + static_cast<double>(k) * dt);
    const double c = std::cos(th), s = std::sin(th);
    re += pf[2 * k] * c + pf[2 * k + 1] * s;
    im += pf[2 * k + 1] * c - pf[2 * k] * s;
  }
  return {re, im};
}

__attribute__((target("avx2,fma"))) void phase_axpy(cplx c, double s, double t0, double dt, cplx* y,
                                                    std::size_t n) {
  double* py = reinterpret_cast<double*>(y);
  const double step = 2.0 * s * dt;
  const __m256d rot = _mm256_setr_pd(std::cos(step), std::sin(step), std::cos(step), std::sin(step));
  std::size_t k = 0;
  while (k + 2 <= n) {
    const std::size_t stop = (n - k) / 2 * 2 < kBlock ? k + (n - k) / 2 * 2 : k + kBlock;
    const double th0 = s * (t0 + static_cast<double>(k) * dt);
    const double th1 = s * (t0 + static_cast<double>(k + 1) * dt);
    __m256d ph = seed_pair(th0, th1, c.real(), c.imag());
    for (; k < stop; k += 2) {
      _mm256_storeu_pd(py + 2 * k, _mm256_add_pd(_mm256_loadu_pd(py + 2 * k), ph));
      ph = cmul(ph, rot);
    }
  }
  for (; k < n; ++k) {
    const double th = s * (t0 + static_cast<double>(k) * dt);
    const double cs = std::cos(th), sn = std::sin(th);
    py[2 * k] += c.real() * cs - c.imag() * sn;
    py[2 * k + 1] += c.real() * sn + c.imag() * cs;
  }
}

#else  // no x86: the dispatcher never selects this path

cplx sum(const cplx* v, std::size_t n) { return scalar::sum(v, n); }
cplx dot_conj(const cplx* a, const cplx* b, std::size_t n) { return scalar::dot_conj(a, b, n); }
void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) { scalar::axpy(alpha, x, y, n); }
cplx phase_sum(const cplx* f, std::size_t n, double t0, double dt, double omega) {
  return scalar::phase_sum(f, n, t0, dt, omega);
}
void phase_axpy(cplx c, double s, double t0, double dt, cplx* y, std::size_t n) {
  scalar::phase_axpy(c, s, t0, dt, y, n);
}

#endif

}  // namespace opk::simd::avx2
