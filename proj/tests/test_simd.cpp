#include <cmath>
#include <vector>

#include "doctest.h"
#include "opk/core.hpp"
#include "opk/simd.hpp"

using namespace opk;

namespace {

std::vector<cplx> random_vec(Rng& rng, std::size_t n) {
  std::vector<cplx> v(n);
  for (auto& z : v) z = rng.complex_gaussian(1.0);
  return v;
}

double rel(cplx a, cplx b, double scale) { return std::abs(a - b) / std::max(scale, 1e-300); }

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("both paths match naive loops") {
    Rng rng(17);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 31u, 32u, 33u, 65u, 1000u, 4099u}) {
      const auto a = random_vec(rng, n), b = random_vec(rng, n);
      cplx s = 0.0, d = 0.0, ps = 0.0;
      double mass = 0.0;
      const double t0 = -2.3, dt = 0.013, om = 7.7;
      for (std::size_t k = 0; k < n; ++k) {
        s += a[k];
        d += a[k] * std::conj(b[k]);
        ps += a[k] * std::polar(1.0, -om * (t0 + k * dt));
        mass += std::abs(a[k]) * (1.0 + std::abs(b[k]));
      }
      const double tol = 1e-13;
      CHECK(rel(simd::scalar::sum(a.data(), n), s, mass) < tol);
      CHECK(rel(simd::scalar::dot_conj(a.data(), b.data(), n), d, mass) < tol);
      CHECK(rel(simd::scalar::phase_sum(a.data(), n, t0, dt, om), ps, mass) < 1e-12);
      if (simd::avx2_available()) {
        CHECK(rel(simd::avx2::sum(a.data(), n), s, mass) < tol);
        CHECK(rel(simd::avx2::dot_conj(a.data(), b.data(), n), d, mass) < tol);
        CHECK(rel(simd::avx2::phase_sum(a.data(), n, t0, dt, om), ps, mass) < 1e-12);
      }
    }
  }

  TEST_CASE("axpy and phase_axpy agree across paths") {
    Rng rng(19);
    for (std::size_t n : {1u, 5u, 32u, 100u, 2049u}) {
      const auto x = random_vec(rng, n), y0 = random_vec(rng, n);
      const cplx c(0.7, -1.3);
      auto ys = y0, yv = y0, ps = y0, pv = y0;
      simd::scalar::axpy(c, x.data(), ys.data(), n);
      simd::scalar::phase_axpy(c, 3.1, -1.0, 0.01, ps.data(), n);
      if (simd::avx2_available()) {
        simd::avx2::axpy(c, x.data(), yv.data(), n);
        simd::avx2::phase_axpy(c, 3.1, -1.0, 0.01, pv.data(), n);
      } else {
        yv = ys;
        pv = ps;
      }
      for (std::size_t k = 0; k < n; ++k) {
        CHECK(std::abs(ys[k] - (y0[k] + c * x[k])) < 1e-14);
        CHECK(std::abs(ys[k] - yv[k]) < 1e-14);
        CHECK(std::abs(ps[k] - (y0[k] + c * std::polar(1.0, 3.1 * (-1.0 + k * 0.01)))) < 1e-12);
        CHECK(std::abs(ps[k] - pv[k]) < 1e-12);
      }
    }
  }

  TEST_CASE("long phase recurrences stay accurate") {
    // large omega * dt and many points: the periodic re-seeding bounds drift
    const std::size_t n = 200000;
    std::vector<cplx> ones(n, 1.0);
    const double t0 = -100.0, dt = 0.001, om = 31.0;
    cplx ref = 0.0;
    for (std::size_t k = 0; k < n; ++k) ref += std::polar(1.0, -om * (t0 + k * dt));
    CHECK(std::abs(simd::scalar::phase_sum(ones.data(), n, t0, dt, om) - ref) < 1e-9);
    if (simd::avx2_available()) CHECK(std::abs(simd::avx2::phase_sum(ones.data(), n, t0, dt, om) - ref) < 1e-9);
  }

  TEST_CASE("path selection") {
    const simd::Path before = simd::active_path();
    simd::set_path(simd::Path::Scalar);
    CHECK(simd::active_path() == simd::Path::Scalar);
    CHECK(std::string(simd::path_name(simd::Path::Scalar)) == "scalar");
    if (!simd::avx2_available()) CHECK_THROWS_AS(simd::set_path(simd::Path::Avx2), ValidationError);
    simd::set_path(before);
    CHECK(simd::active_path() == before);
  }
}
