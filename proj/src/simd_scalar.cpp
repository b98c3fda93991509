#include "opk/simd.hpp"

#include <cmath>

namespace opk::simd::scalar {

cplx sum(const cplx* v, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    re += v[k].real();
    im += v[k].imag();
  }
  return {re, im};
}

cplx dot_conj(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double ar = a[k].real(), ai = a[k].imag();
    const double br = b[k].real(), bi = b[k].imag();
    re += ar * br + ai * bi;
    im += ai * br - ar * bi;
  }
  return {re, im};
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

cplx phase_sum(const cplx* f, std::size_t n, double t0, double dt, double omega) {
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double th = omega * (t0 + static_cast<double>(k) * dt);
    const double c = std::cos(th), s = std::sin(th);
    // f * (c - i s)
    re += f[k].real() * c + f[k].imag() * s;
    im += f[k].imag() * c - f[k].real() * s;
  }
  return {re, im};
}

void phase_axpy(cplx c, double s, double t0, double dt, cplx* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double th = s * (t0 + static_cast<double>(k) * dt);
    y[k] += c * cplx(std::cos(th), std::sin(th));
  }
}

}  // namespace opk::simd::scalar
