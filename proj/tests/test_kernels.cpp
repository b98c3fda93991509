#include <cmath>

#include "doctest.h"
#include "opk/kernels.hpp"
#include "opk/paley_wiener.hpp"
#include "opk/spaces.hpp"

using namespace opk;

namespace {

// on-grid point evaluation as a feature: <F, delta_x> = F(x) at grid nodes
FeatureMap node_delta_map(const Grid& w) {
  FeatureMap fm;
  fm.w_grid = w;
  fm.evaluate = [w](const Index& a, const CVec& xi) {
    GridFunction d(w, 1);
    const int i = static_cast<int>(std::lround((a.position() - w.a) / w.h()));
    d.at(i) = xi[0] / w.weight(i);
    return d;
  };
  return fm;
}

FeatureMap fourier_feature_map(const Grid& w) {
  FeatureMap fm;
  fm.w_grid = w;
  fm.evaluate = [w](const Index& a, const CVec& xi) {
    GridFunction f(w, 1);
    for (int i = 0; i < w.n; ++i) f.at(i) = xi[0] * std::polar(1.0 / std::sqrt(kTwoPi), a.position() * w.x(i));
    return f;
  };
  return fm;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("index labels and equality") {
    CHECK(Index::integer(3) == Index::integer(3));
    CHECK_FALSE(Index::integer(3) == Index::real(3.0));
    CHECK(Index::real(0.5) == Index::real(0.5 + 1e-14));
    CHECK(Index::pair(1.0, {1.0, 0.0}) == Index::pair(1.0, {1.0, 0.0}));
    CHECK_FALSE(Index::pair(1.0, {1.0, 0.0}) == Index::pair(1.0, {0.0, 1.0}));
    CHECK(Index::integer(-2).label() == "-2");
  }

  TEST_CASE("kernel from Fourier features reproduces the exponential") {
    const Grid w(0.0, kTwoPi, 257);
    const KernelSection s = kernel_from_features(node_delta_map(w), fourier_feature_map(w), Index::integer(3), {1.0}, w);
    double err = 0.0;
    for (int i = 0; i < w.n; ++i)
      err = std::max(err, std::abs(s.h_repr.at(i) - std::polar(1.0 / std::sqrt(kTwoPi), 3.0 * w.x(i))));
    CHECK(err < 1e-8);
    const KernelSection z = kernel_from_features(node_delta_map(w), fourier_feature_map(w), Index::integer(3), {0.0}, w);
    CHECK(norm(z.h_repr) == 0.0);
  }

  TEST_CASE("sinc section from point features") {
    const Grid w = default_w_grid(4097);
    const FeatureMap phi = pw_point_feature_map(w);
    const Grid h(-2.0, 2.0, 81);
    const KernelSection s = kernel_from_features(phi, phi, Index::real(0.0), {1.0}, h);
    double err = 0.0;
    for (int i = 0; i < h.n; ++i) err = std::max(err, std::abs(s.h_repr.at(i) - sinc(h.x(i))));
    CHECK(err < 1e-6);
  }

  TEST_CASE("feature grid mismatch is a shape error") {
    const FeatureMap a = pw_point_feature_map(default_w_grid(513));
    const FeatureMap b = pw_point_feature_map(default_w_grid(1025));
    CHECK_THROWS_AS(kernel_from_features(a, b, Index::real(0.0), {1.0}, Grid(-1, 1, 5)), ShapeError);
  }

  TEST_CASE("feature maps are linear in xi") {
    Rng rng(21);
    const Grid w = default_w_grid();
    const FeatureMap v = pw_vector_feature_map(w, 3);
    const FeatureMap p = pw_point_feature_map(w, 2);
    const FeatureMap u = pw_average_feature_map(0.3, Profile::Triangle, w);
    for (int t = 0; t < 5; ++t) {
      const double x = rng.uniform(-5, 5);
      const CVec a{rng.complex_gaussian(1)}, b{rng.complex_gaussian(1)};
      const CVec ab{a[0] + b[0]};
      const Index pi = Index::pair(x, {rng.complex_gaussian(1), rng.complex_gaussian(1), rng.complex_gaussian(1)});
      CHECK(norm(v(pi, ab) - v(pi, a) - v(pi, b)) < 1e-10);
      CHECK(norm(u(Index::real(x), ab) - u(Index::real(x), a) - u(Index::real(x), b)) < 1e-10);
      const CVec c{rng.complex_gaussian(1), rng.complex_gaussian(1)}, d{rng.complex_gaussian(1), rng.complex_gaussian(1)};
      const CVec cd{c[0] + d[0], c[1] + d[1]};
      CHECK(norm(p(Index::real(x), cd) - p(Index::real(x), c) - p(Index::real(x), d)) < 1e-10);
    }
  }

  TEST_CASE("Fourier Gram is the identity") {
    const KernelSpace s = fourier_space();
    std::vector<Index> idx;
    for (int j = -2; j <= 2; ++j) idx.push_back(Index::integer(j));
    const GramMatrix g = gram(s.sections(idx), *s.family);
    CHECK((g.matrix - ComplexMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(g.indices.size() == 5u);
    const PsdReport r = psd_check(g);
    CHECK(r.pass);
    CHECK(r.min_eig == doctest::Approx(1.0));
  }

  TEST_CASE("sinc Gram at 0, 0.5, 1") {
    const KernelSpace s = pw_point_space(4, 4097);
    const GramMatrix g = gram(s.sections({Index::real(0.0), Index::real(0.5), Index::real(1.0)}), *s.family);
    const double c = 2.0 / kPi;
    ComplexMatrix ref(3, 3);
    ref << 1.0, c, 0.0, c, 1.0, c, 0.0, c, 1.0;
    CHECK((g.matrix - ref).cwiseAbs().maxCoeff() < 1e-6);
    const PsdReport r = psd_check(g);
    CHECK(r.pass);
    // eigenvalues of the tridiagonal oracle: 1 and 1 +- sqrt(2) c
    CHECK(r.min_eig == doctest::Approx(1.0 - std::sqrt(2.0) * c).epsilon(1e-5));
    CHECK(r.max_eig == doctest::Approx(1.0 + std::sqrt(2.0) * c).epsilon(1e-5));
  }

  TEST_CASE("psd_check examples") {
    CHECK(psd_check(ComplexMatrix::Identity(3, 3)).pass);
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = -1.0;
    CHECK_FALSE(psd_check(d).pass);
  }

  TEST_CASE("inconsistent sections raise a kernel-consistency error") {
    const KernelSpace s = fourier_space();
    KernelSection a = s(Index::integer(0), {1.0});
    const KernelSection b = s(Index::integer(1), {1.0});
    a.h_repr += b.h_repr;  // no longer the kernel at 0
    CHECK_THROWS_AS(gram({a, b}, *s.family), KernelConsistencyError);
  }

  TEST_CASE("gram matches the feature-side Gram for feature-built sections") {
    const Grid w = default_w_grid();
    const FeatureMap phi = pw_point_feature_map(w, 2);
    auto fam = point_inner_family();
    auto psi = std::make_shared<FeatureMap>(pw_vector_feature_map(w, 2));
    const Grid h = pw_window_grid(4);
    Rng rng(23);
    std::vector<KernelSection> secs;
    std::vector<GridFunction> feats;
    for (int j = -3; j <= 3; ++j) {
      const Index a = Index::pair(j, {rng.complex_gaussian(1), rng.complex_gaussian(1)});
      secs.push_back(kernel_from_features(phi, *psi, a, {1.0}, h));
      feats.push_back(*secs.back().w_repr);
    }
    // grid path: point_inner by interpolation at integer nodes of h
    const GramMatrix grid_path = gram(secs, *fam);
    fam->set_feature(psi);
    const GramMatrix feat_path = gram(secs, *fam);
    const GramMatrix direct = feature_gram(feats);
    CHECK((grid_path.matrix - direct.matrix).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((feat_path.matrix - direct.matrix).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(psd_check(direct).pass);
    // the vector space's one-pass synthesis agrees with the generic route
    const KernelSpace vs = pw_vector_space(2, 4);
    const KernelSection fast = vs(secs[2].alpha, {1.0});
    CHECK(norm(fast.h_repr - secs[2].h_repr) < 1e-10);
  }

  TEST_CASE("finite-dimensional kernel: orthonormal and one-element bases") {
    const Grid g(0.0, kTwoPi, 201);
    std::vector<GridFunction> on;
    for (int k = 0; k < 3; ++k)
      on.push_back(sample(g, [k](double x) { return std::polar(1.0 / std::sqrt(kTwoPi), double(k) * x); }));
    auto fam = point_family();
    const Index a = Index::real(g.x(37));
    const KernelSection s = finite_dim_kernel(on, fam, a, {cplx(0.5, 1.0)});
    GridFunction ref(g, 1);
    // basis Gram is the identity up to the periodic trapezoid, so B = I
    for (const auto& p : on) ref.add_scaled(cplx(0.5, 1.0) * std::conj(p.at(37)), p);
    CHECK(norm(s.h_repr - ref) < 1e-12);

    const GridFunction phi = sample(g, [](double x) { return cplx(1.0 + 0.3 * std::cos(x), 0.2); });
    const double c = std::pow(norm(phi), 2);
    const KernelSection one = finite_dim_kernel({phi}, fam, a, {1.0});
    CHECK(norm(one.h_repr - (std::conj(phi.at(37)) / c) * phi) < 1e-13);
  }

  TEST_CASE("finite-dimensional kernel with hat functions and integral functionals") {
    const Grid g(0.0, 3.0, 301);
    const GridFunction h1 = sample(g, [](double x) { return cplx(std::max(0.0, 1.0 - std::abs(x - 1.0))); });
    const GridFunction h2 = sample(g, [](double x) { return cplx(std::max(0.0, 1.0 - std::abs(x - 1.5))); });
    const GridFunction u0 = sample(g, [](double x) { return cplx(x < 1.5 ? 1.0 : 0.0); });
    const GridFunction u1 = sample(g, [](double x) { return cplx(std::exp(-x), x); });
    FamilyPtr fam = integral_family({u0, u1});
    const FiniteDimKernel k({h1, h2}, fam);
    Rng rng(29);
    for (int t = 0; t < 10; ++t) {
      const cplx a = rng.complex_gaussian(1), b = rng.complex_gaussian(1), eta = rng.complex_gaussian(1);
      const GridFunction f = a * h1 + b * h2;
      for (int j = 0; j < 2; ++j) {
        const Index al = Index::integer(j);
        const cplx lhs = fam->apply(al, f)[0] * std::conj(eta);
        const cplx rhs = inner_product(f, k.section(al, {eta}).h_repr);
        CHECK(std::abs(lhs - rhs) < 1e-9);
      }
    }
    CHECK_THROWS_AS(FiniteDimKernel({h1, 2.0 * h1}, fam), IndependenceError);
  }

  TEST_CASE("translation-invariant section with a narrow average") {
    const Grid t(-6.0, 6.0, 2401);
    const GridFunction varphi = sample(t, [](double s) { return cplx(std::exp(-s * s)); });
    const double x0 = 0.7, eps = 0.005;
    const Grid ug(x0 - eps, x0 + eps, 201);
    const GridFunction u = sample(ug, [&](double s) { return cplx((1.0 - std::abs(s - x0) / eps) / eps); });
    const Grid out(-3.0, 3.0, 61);
    const KernelSection k = translation_invariant_section(varphi, u, out);
    double err = 0.0, top = 0.0;
    for (int i = 0; i < out.n; ++i) {
      // direct quadrature of the translation-invariant kernel e^{-i(x - x0)t} varphi(t)
      const cplx ref = dft(varphi, {out.x(i) - x0})[0];
      err = std::max(err, std::abs(k.h_repr.at(i) - ref));
      top = std::max(top, std::abs(ref));
    }
    CHECK(err < 1e-4 * top);
    const KernelSection z = translation_invariant_section(varphi, GridFunction(ug, 1), out);
    CHECK(norm(z.h_repr) == 0.0);
  }

  TEST_CASE("translation-invariant section reduces to sinc") {
    const Grid t(-kPi, kPi, 4097);
    const GridFunction varphi = sample(t, [](double) { return cplx(1.0 / kTwoPi); });
    const Grid ug(-0.002, 0.002, 101);
    const GridFunction u = sample(ug, [](double) { return cplx(1.0 / 0.004); });
    const Grid out(-2.0, 2.0, 41);
    const KernelSection k = translation_invariant_section(varphi, u, out);
    for (int i = 0; i < out.n; ++i) CHECK(std::abs(k.h_repr.at(i) - sinc(out.x(i))) < 1e-5);
  }

  TEST_CASE("double-integral PSD test") {
    const Grid g(-1.0, 1.0, 81);
    std::vector<GridFunction> us;
    for (int j = 0; j < 4; ++j)
      us.push_back(sample(g, [j](double s) { return cplx(std::max(0.0, 1.0 - std::abs(4.0 * s - (j - 1.5)))); }));
    CHECK(integral_kernel_psd_test([](double, double) { return cplx(1.0); }, us, 50).pass);
    CHECK(integral_kernel_psd_test([](double s, double t) { return cplx(sinc_kernel(3.0 * s, 3.0 * t)); }, us, 50).pass);
    CHECK_FALSE(integral_kernel_psd_test([](double, double) { return cplx(-1.0); }, us, 50).pass);
  }
}
