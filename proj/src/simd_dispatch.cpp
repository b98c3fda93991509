#include <cstdlib>
#include <cstring>

#include "opk/errors.hpp"
#include "opk/simd.hpp"

namespace opk::simd {

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

namespace {

Path initial_path() {
  const char* env = std::getenv("OPK_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Path::Scalar;
  return avx2_available() ? Path::Avx2 : Path::Scalar;
}

Path& current() {
  static Path p = initial_path();
  return p;
}

}  // namespace

Path active_path() { return current(); }

void set_path(Path p) {
  if (p == Path::Avx2 && !avx2_available()) throw ValidationError("AVX2/FMA not supported on this CPU");
  current() = p;
}

const char* path_name(Path p) { return p == Path::Avx2 ? "avx2" : "scalar"; }

cplx sum(const cplx* v, std::size_t n) {
  return current() == Path::Avx2 ? avx2::sum(v, n) : scalar::sum(v, n);
}

cplx dot_conj(const cplx* a, const cplx* b, std::size_t n) {
  return current() == Path::Avx2 ? avx2::dot_conj(a, b, n) : scalar::dot_conj(a, b, n);
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  if (current() == Path::Avx2)
    avx2::axpy(alpha, x, y, n);
  else
    scalar::axpy(alpha, x, y, n);
}

cplx phase_sum(const cplx* f, std::size_t n, double t0, double dt, double omega) {
  return current() == Path::Avx2 ? avx2::phase_sum(f, n, t0, dt, omega) : scalar::phase_sum(f, n, t0, dt, omega);
}

void phase_axpy(cplx c, double s, double t0, double dt, cplx* y, std::size_t n) {
  if (current() == Path::Avx2)
    avx2::phase_axpy(c, s, t0, dt, y, n);
  else
    scalar::phase_axpy(c, s, t0, dt, y, n);
}

}  // namespace opk::simd
