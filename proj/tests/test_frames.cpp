#include <cmath>

#include "doctest.h"
#include "opk/frames.hpp"
#include "opk/spaces.hpp"

using namespace opk;

namespace {

std::vector<Index> integers(int lo, int hi) {
  std::vector<Index> v;
  for (int j = lo; j <= hi; ++j) v.push_back(Index::integer(j));
  return v;
}

std::vector<Index> reals(int lo, int hi) {
  std::vector<Index> v;
  for (int j = lo; j <= hi; ++j) v.push_back(Index::real(j));
  return v;
}

SampleSet samples_of(const std::vector<KernelSection>& secs, const CVec& values) {
  SampleSet s;
  for (std::size_t j = 0; j < secs.size(); ++j) s.entries.push_back({secs[j].alpha, {values[j]}});
  return s;
}

GridFunction combine(const std::vector<KernelSection>& secs, const CVec& c) {
  GridFunction f(secs[0].h_repr.grid, secs[0].h_repr.dim);
  for (std::size_t j = 0; j < secs.size(); ++j) f.add_scaled(c[j], secs[j].h_repr);
  return f;
}

double rel_err(const GridFunction& a, const GridFunction& b) { return norm(a - b) / norm(b); }

}  // namespace

TEST_SUITE("frames") {
  TEST_CASE("frame operator on an orthonormal family") {
    const KernelSpace s = fourier_space();
    const auto secs = s.sections(integers(-3, 3));
    const TruncatedFrame fr = make_frame(secs);
    Rng rng(51);
    const GridFunction f = combine(secs, random_coefficients(rng, 7));
    CHECK(rel_err(frame_operator_apply(fr, f), f) < 1e-10);
    const GridFunction g = s(Index::integer(5), {1.0}).h_repr;
    CHECK(norm(frame_operator_apply(fr, g)) < 1e-10);
    CHECK_THROWS_AS(frame_operator_apply(fr, GridFunction(Grid(0.0, 1.0, 5), 1)), ShapeError);
  }

  TEST_CASE("frame operator agrees with the coefficient-space oracle") {
    const KernelSpace s = pw_point_space(8);
    const auto secs = s.sections(reals(-8, 8));
    const TruncatedFrame fr = make_frame(secs);
    Rng rng(53);
    const CVec c = random_coefficients(rng, 17);
    const GridFunction f = combine(secs, c);
    // grid Gram M(k, j) = <K_k, K_j>; <f, K_j> = sum_k c_k M(k, j)
    const int n = 17;
    CVec tc(n, 0.0);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) tc[j] += c[k] * inner_product(secs[k].h_repr, secs[j].h_repr);
    CHECK(norm(frame_operator_apply(fr, f) - combine(secs, tc)) < 1e-8 * norm(f));
  }

  TEST_CASE("dual of an orthonormal family is itself, and scaling inverts") {
    const KernelSpace s = fourier_space();
    auto secs = s.sections(integers(-2, 2));
    const DualFrame d = dual_frame(make_frame(secs));
    for (std::size_t j = 0; j < secs.size(); ++j) CHECK(norm(d.dual_sections[j] - secs[j].h_repr) < 1e-10);
    CHECK(d.rank == 5);
    for (auto& k : secs) k.h_repr *= 2.0;
    const DualFrame d2 = dual_frame(make_frame(secs));
    for (std::size_t j = 0; j < secs.size(); ++j) CHECK(norm(2.0 * d2.dual_sections[j] - d.dual_sections[j]) < 1e-10);
    CHECK_THROWS_AS(dual_frame(make_frame(secs), 0.0), ValidationError);
    CHECK_THROWS_AS(dual_frame(make_frame(secs), 1.0), ValidationError);
  }

  TEST_CASE("all-zero family is degenerate") {
    const KernelSpace s = fourier_space();
    auto secs = s.sections(integers(0, 1));
    for (auto& k : secs) k.h_repr *= 0.0;
    CHECK_THROWS_AS(dual_frame(make_frame(secs)), DegenerateFrameError);
  }

  TEST_CASE("biorthogonality of the sinc-average dual") {
    const KernelSpace s = pw_average_space(0.1, Profile::Box, 8);
    const auto secs = s.sections(reals(-8, 8));
    const DualFrame d = dual_frame(make_frame(secs));
    const ComplexMatrix b = biorthogonality_matrix(d);
    CHECK((b - ComplexMatrix::Identity(17, 17)).cwiseAbs().maxCoeff() < 1e-7);
    // oracle by direct Gram multiplication
    const ComplexMatrix& m = d.source->gram.matrix;
    CHECK((d.coeffs * m - ComplexMatrix::Identity(17, 17)).cwiseAbs().maxCoeff() < 1e-7);
  }

  TEST_CASE("Fourier reconstruction and zero samples") {
    const KernelSpace s = fourier_space();
    const auto secs = s.sections(integers(-2, 2));
    const DualFrame d = dual_frame(make_frame(secs));
    Rng rng(57);
    const CVec c = random_coefficients(rng, 5);
    const GridFunction f = combine(secs, c);
    CHECK(rel_err(reconstruct(d, samples_of(secs, c)), f) < 1e-10);
    CHECK(norm(reconstruct(d, samples_of(secs, CVec(5, 0.0)))) == 0.0);
    SampleSet bad = samples_of(secs, c);
    std::swap(bad.entries[0], bad.entries[1]);
    CHECK_THROWS_AS(reconstruct(d, bad), AlignmentError);
    bad.entries.pop_back();
    CHECK_THROWS_AS(reconstruct(d, bad), AlignmentError);
  }

  TEST_CASE("average sampling reconstruction in the band-limited space") {
    const int m = 16;
    const KernelSpace s = pw_average_space(0.2, Profile::Box, m);
    const auto secs = s.sections(reals(-m, m));
    const DualFrame d = dual_frame(make_frame(secs));
    Rng rng(59);
    const BandlimitedSignal sig = random_bandlimited(8, s.h_grid, rng);
    SampleSet samples;
    for (const auto& k : secs)
      samples.entries.push_back(
          {k.alpha, average_sample_fn([&](double y) { return sig.value(y); }, AverageFunctional(k.alpha.x, 0.2))});
    const GridFunction rec = reconstruct(d, samples);
    CHECK(interior_relative_error(rec, synthesize(sig, s.h_grid), -8.0, 8.0) < 1e-2);
    // on W the same expansion is the signal's feature
    const GridFunction rw = reconstruct_features(d, samples);
    const GridFunction fw = pw_feature_of_signal(sig, rw.grid);
    CHECK(rel_err(rw, fw) < 1e-4);
  }

  TEST_CASE("reconstruction on the span of a non-orthogonal family") {
    const KernelSpace s = pw_average_space(0.15, Profile::Triangle, 6);
    const auto secs = s.sections(reals(-6, 6));
    const DualFrame d = dual_frame(make_frame(secs));
    Rng rng(61);
    for (int t = 0; t < 5; ++t) {
      const CVec c = random_coefficients(rng, 13);
      const GridFunction f = combine(secs, c);
      // exact samples: L_k f = sum_j c_j M(j, k)
      const ComplexMatrix& mm = d.source->gram.matrix;
      CVec v(13, 0.0);
      for (int k = 0; k < 13; ++k)
        for (int j = 0; j < 13; ++j) v[k] += c[j] * mm(j, k);
      CHECK(rel_err(reconstruct(d, samples_of(secs, v)), f) < 1e-7);
    }
  }

  TEST_CASE("frame bound estimates") {
    const KernelSpace fs = fourier_space();
    auto secs = fs.sections(integers(-3, 3));
    FrameBounds b = frame_bounds_estimate(make_frame(secs));
    CHECK(b.A_est == doctest::Approx(1.0));
    CHECK(b.B_est == doctest::Approx(1.0));
    secs.push_back(secs[2]);
    b = frame_bounds_estimate(make_frame(secs));
    CHECK(b.rank == 7);
    CHECK(b.A_est == doctest::Approx(1.0));
    CHECK(b.B_est == doctest::Approx(2.0));

    // integer sinc shifts: exactly orthonormal on W, approaching it on
    // truncated grids as the window grows
    const FrameBounds e = frame_bounds_estimate(make_frame(pw_point_space(6).sections(reals(-6, 6))));
    CHECK(std::abs(e.A_est - 1.0) < 1e-12);
    CHECK(std::abs(e.B_est - 1.0) < 1e-12);
    double prev = 1e300;
    for (int mr : {6, 24, 96}) {
      std::vector<GridFunction> hs;
      for (const auto& k : pw_point_space(mr).sections(reals(-6, 6))) hs.push_back(k.h_repr);
      const ComplexMatrix mg = feature_gram(hs).matrix;
      const auto ev = hermitian_eig(mg).values;
      const double dev = std::max(std::abs(ev(0) - 1.0), std::abs(ev(ev.size() - 1) - 1.0));
      CHECK(dev < prev);
      // the missing tail Gram is PSD, so its norm is at most its trace
      const double tail_trace = 13.0 - mg.trace().real();
      CHECK(dev <= tail_trace * (1 + 1e-6) + 1e-8);
      prev = dev;
    }
  }

  TEST_CASE("norm equivalence on random span elements") {
    const KernelSpace s = pw_average_space(0.2, Profile::RaisedCosine, 6);
    const auto secs = s.sections(reals(-6, 6));
    const TruncatedFrame fr = make_frame(secs);
    const FrameBounds b = frame_bounds_estimate(fr);
    Rng rng(67);
    const ComplexMatrix& m = fr.gram.matrix;
    for (int t = 0; t < 30; ++t) {
      const ComplexVector c = to_eigen(random_coefficients(rng, 13));
      // ||f||^2 = c^T M conj(c); <Tf, f> = sum_j |<f, K_j>|^2 = ||M^T c||^2
      const double n2 = (c.transpose() * m * c.conjugate())(0, 0).real();
      const double q = (m.transpose() * c).squaredNorm();
      CHECK(q >= b.A_est * n2 * (1 - 1e-10));
      CHECK(q <= b.B_est * n2 * (1 + 1e-10));
    }
  }

  TEST_CASE("dual inner product makes the duals orthonormal") {
    const KernelSpace fs = fourier_space();
    const DualFrame d0 = dual_frame(make_frame(fs.sections(integers(-2, 2))));
    CVec e1(5, 0.0), e2(5, 0.0);
    e1[1] = 1.0;
    e2[2] = 1.0;
    CHECK(std::abs(dual_inner_product(d0, e1, e1) - 1.0) < 1e-10);
    CHECK(std::abs(dual_inner_product(d0, e1, e2)) < 1e-10);
    CHECK_THROWS_AS(dual_inner_product(d0, CVec(4), e1), ShapeError);

    const KernelSpace s = pw_average_space(0.2, Profile::Box, 5);
    const DualFrame d = dual_frame(make_frame(s.sections(reals(-5, 5))));
    double worst = 0.0;
    for (int j = 0; j < 11; ++j)
      for (int k = 0; k < 11; ++k) {
        CVec a(11, 0.0), c(11, 0.0);
        a[j] = 1.0;
        c[k] = 1.0;
        worst = std::max(worst, std::abs(dual_inner_product(d, a, c) - (j == k ? 1.0 : 0.0)));
      }
    CHECK(worst < 1e-7);
  }

  TEST_CASE("dual of the dual recovers the sections") {
    const KernelSpace s = pw_average_space(0.1, Profile::Box, 6);
    const auto secs = s.sections(reals(-6, 6));
    const DualFrame d = dual_frame(make_frame(secs));
    const DualFrame dd = dual_frame(frame_of_dual(d));
    for (std::size_t j = 0; j < secs.size(); ++j) CHECK(rel_err(dd.dual_sections[j], secs[j].h_repr) < 1e-6);
  }

  TEST_CASE("section Gram and feature Gram have the same spectrum") {
    const KernelSpace s = pw_average_space(0.2, Profile::Triangle, 10);
    const auto secs = s.sections(reals(-10, 10));
    std::vector<GridFunction> feats;
    for (const auto& k : secs) feats.push_back(*k.w_repr);
    const auto a = hermitian_eig(make_frame(secs).gram.matrix).values;
    const auto b = hermitian_eig(gram(secs, *s.family).matrix).values;
    const auto c = hermitian_eig(feature_gram(feats).matrix).values;
    CHECK(std::abs(a(0) - c(0)) < 1e-6);
    CHECK(std::abs(a(20) - c(20)) < 1e-6);
    CHECK(std::abs(b(0) - c(0)) < 1e-6);
    CHECK(std::abs(b(20) - c(20)) < 1e-6);
  }

  TEST_CASE("boundary diagnostics") {
    SampleSet s;
    for (int j = 0; j < 10; ++j) s.entries.push_back({Index::integer(j), {j == 0 ? 0.5 : (j == 5 ? 2.0 : 0.1)}});
    CHECK(boundary_coefficient_ratio(s, 2) == doctest::Approx(0.25));
    const Grid g(-2.0, 2.0, 401);
    const GridFunction e = sample(g, [](double x) { return cplx(1.0 + x * x); });
    GridFunction a = e;
    a.at(0) += 100.0;  // outside the window: ignored
    CHECK(interior_relative_error(a, e, -1.0, 1.0) < 1e-15);
  }
}
