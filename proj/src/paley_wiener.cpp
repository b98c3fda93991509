#include "opk/paley_wiener.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "opk/simd.hpp"

namespace opk {

namespace {
const double kSqrt2Pi = std::sqrt(kTwoPi);
}

double sinc(double t) {
  const double x = kPi * t;
  if (std::abs(x) < 1e-6) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

double sinc_kernel(double x, double y) { return sinc(x - y); }

CVec BandlimitedSignal::value(double x) const {
  CVec out(dim, 0.0);
  for (int k = -m; k <= m; ++k) {
    const double s = sinc(x - k);
    for (int c = 0; c < dim; ++c) out[c] += coeff(k, c) * s;
  }
  return out;
}

GridFunction synthesize(const BandlimitedSignal& signal, const Grid& grid) {
  if (signal.coeffs.size() != static_cast<std::size_t>(signal.dim) * (2 * signal.m + 1))
    throw ShapeError("bandlimited signal coefficient count does not match m and dim");
  GridFunction f(grid, signal.dim);
  for (int i = 0; i < grid.n; ++i) {
    const CVec v = signal.value(grid.x(i));
    for (int c = 0; c < signal.dim; ++c) f.at(i, c) = v[c];
  }
  return f;
}

BandlimitedSignal random_bandlimited(int m, const Grid& window, Rng& rng, int dim) {
  return {m, random_coefficients(rng, dim * (2 * m + 1)), window, dim};
}

Profile parse_profile(const std::string& name) {
  if (name == "box") return Profile::Box;
  if (name == "triangle") return Profile::Triangle;
  if (name == "raised_cosine" || name == "raised-cosine") return Profile::RaisedCosine;
  throw ValidationError("unknown profile '" + name + "'");
}

std::string profile_name(Profile p) {
  switch (p) {
    case Profile::Box:
      return "box";
    case Profile::Triangle:
      return "triangle";
    case Profile::RaisedCosine:
      return "raised_cosine";
  }
  return "box";
}

AverageFunctional::AverageFunctional(double c, double d, Profile p) : center(c), delta(d), profile(p) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ValidationError("average functional needs delta > 0");
  if (!std::isfinite(center)) throw ValidationError("average functional center is not finite");
}

double AverageFunctional::weight(double t) const {
  const double r = std::abs(t - center);
  if (r > delta * (1.0 + 1e-14)) return 0.0;
  switch (profile) {
    case Profile::Box:
      return 0.5 / delta;
    case Profile::Triangle:
      return std::max(0.0, 1.0 - r / delta) / delta;
    case Profile::RaisedCosine:
      return (1.0 + std::cos(kPi * std::min(r, delta) / delta)) / (2.0 * delta);
  }
  return 0.0;
}

namespace {

std::vector<double> support_breaks(const AverageFunctional& u, const std::vector<double>& extra) {
  std::vector<double> br{u.lo(), u.center, u.hi()};
  for (double b : extra)
    if (b > u.lo() && b < u.hi()) br.push_back(b);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end(), [](double p, double q) { return std::abs(p - q) < 1e-14; }), br.end());
  return br;
}

}  // namespace

LocalRule local_rule(const AverageFunctional& u, int n_sub, const std::vector<double>& breaks) {
  if (n_sub < 1) throw ValidationError("local rule needs at least one subdivision");
  const std::vector<double> br = support_breaks(u, breaks);
  LocalRule r;
  for (std::size_t p = 0; p + 1 < br.size(); ++p) {
    const double a = br[p], b = br[p + 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil(n_sub * (b - a) / (2.0 * u.delta) - 1e-9)));
    const double h = (b - a) / pieces;
    for (int i = 0; i <= pieces; ++i) {
      const double s = (i == pieces) ? b : a + i * h;
      const double w = (i == 0 || i == pieces) ? 0.5 * h : h;
      // profile value taken from inside the piece so jumps at its ends are handled
      const double inside = std::clamp(s, a + 1e-15 * std::max(1.0, std::abs(a)), b - 1e-15 * std::max(1.0, std::abs(b)));
      r.nodes.push_back(s);
      r.weights.push_back(w * u.weight(inside));
    }
  }
  return r;
}

CVec average_sample(const GridFunction& f, const AverageFunctional& u, int refine) {
  const Grid& g = f.grid;
  const double tol = 1e-12 * std::max(1.0, g.b - g.a);
  if (u.lo() < g.a - tol || u.hi() > g.b + tol) throw DomainError("average support escapes the grid");
  if (refine < 1) throw ValidationError("refinement factor must be >= 1");
  std::vector<double> nodes;
  const int i0 = std::max(0, static_cast<int>(std::floor((u.lo() - g.a) / g.h())));
  const int i1 = std::min(g.n - 1, static_cast<int>(std::ceil((u.hi() - g.a) / g.h())));
  for (int i = i0; i <= i1; ++i) nodes.push_back(g.x(i));
  const std::vector<double> br = support_breaks(u, nodes);
  CVec acc(f.dim, 0.0);
  for (std::size_t p = 0; p + 1 < br.size(); ++p) {
    const double a = br[p], b = br[p + 1];
    const double h = (b - a) / refine;
    const double inner_lo = a + 1e-15 * std::max(1.0, std::abs(a));
    const double inner_hi = b - 1e-15 * std::max(1.0, std::abs(b));
    for (int i = 0; i <= refine; ++i) {
      const double s = (i == refine) ? b : a + i * h;
      const double w = ((i == 0 || i == refine) ? 0.5 * h : h) * u.weight(std::clamp(s, inner_lo, inner_hi));
      if (w == 0.0) continue;
      const CVec v = f.eval(std::clamp(s, g.a, g.b));
      for (int c = 0; c < f.dim; ++c) acc[c] += w * v[c];
    }
  }
  return acc;
}

CVec average_sample_fn(const std::function<CVec(double)>& f, const AverageFunctional& u, int n_sub) {
  const LocalRule r = local_rule(u, n_sub);
  CVec acc;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    if (r.weights[i] == 0.0) continue;
    const CVec v = f(r.nodes[i]);
    if (acc.empty()) acc.assign(v.size(), 0.0);
    for (std::size_t c = 0; c < v.size(); ++c) acc[c] += r.weights[i] * v[c];
  }
  if (acc.empty()) acc.assign(1, 0.0);
  return acc;
}

cplx u_check(const AverageFunctional& u, double t, int n_sub) {
  const LocalRule r = local_rule(u, n_sub);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * std::polar(1.0, r.nodes[i] * t);
  return acc / kTwoPi;
}

GridFunction u_check_grid(const AverageFunctional& u, const Grid& t_grid, int n_sub) {
  const LocalRule r = local_rule(u, n_sub);
  GridFunction out(t_grid, 1);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    if (r.weights[i] == 0.0) continue;
    simd::phase_axpy(r.weights[i] / kTwoPi, r.nodes[i], t_grid.a, t_grid.h(), out.values.data(), t_grid.n);
  }
  return out;
}

Grid default_w_grid(int n) { return Grid(-kPi, kPi, n); }

void require_pw_grid(const Grid& w) {
  if (std::abs(w.a + kPi) > 1e-12 || std::abs(w.b - kPi) > 1e-12)
    throw DomainError("feature grid must span exactly [-pi, pi]");
}

Grid pw_window_grid(int m_range, int points_per_unit) {
  if (m_range < 0 || points_per_unit < 1) throw ValidationError("window needs m_range >= 0 and points_per_unit >= 1");
  const int T = m_range + kWindowPad;
  return Grid(-T, T, 2 * T * points_per_unit + 1);
}

GridFunction psi_feature(const AverageFunctional& u, const Grid& w_grid, int n_sub) {
  require_pw_grid(w_grid);
  GridFunction f = u_check_grid(u, w_grid, n_sub);
  f *= kSqrt2Pi;
  return f;
}

GridFunction phi_point(double y, const Grid& w_grid) {
  require_pw_grid(w_grid);
  GridFunction f(w_grid, 1);
  for (int i = 0; i < w_grid.n; ++i) f.at(i) = std::polar(1.0 / kSqrt2Pi, y * w_grid.x(i));
  return f;
}

KernelSection pw_kernel_section(const AverageFunctional& u, const Grid& out_grid, const Grid& w_grid, int n_sub) {
  require_pw_grid(w_grid);
  const GridFunction uc = u_check_grid(u, w_grid, n_sub);
  GridFunction w = uc;
  w *= kSqrt2Pi;
  return {Index::real(u.center), CVec{1.0}, dft_grid(uc, out_grid), std::move(w)};
}

KernelSection pw_point_section(double x, const Grid& out_grid, const Grid& w_grid) {
  GridFunction w = phi_point(x, w_grid);
  GridFunction h = pw_synthesize(w, out_grid);
  return {Index::real(x), CVec{1.0}, std::move(h), std::move(w)};
}

CVec pw_evaluate(const GridFunction& F, double y) {
  CVec out(F.dim);
  for (int c = 0; c < F.dim; ++c) out[c] = dft(F, {y}, c)[0] / kSqrt2Pi;
  return out;
}

GridFunction pw_synthesize(const GridFunction& F, const Grid& out_grid) {
  GridFunction f = dft_grid(F, out_grid);
  f *= 1.0 / kSqrt2Pi;
  return f;
}

GridFunction pw_feature_of_signal(const BandlimitedSignal& s, const Grid& w_grid) {
  require_pw_grid(w_grid);
  GridFunction F(w_grid, s.dim);
  for (int c = 0; c < s.dim; ++c)
    for (int k = -s.m; k <= s.m; ++k)
      simd::phase_axpy(s.coeff(k, c) / kSqrt2Pi, static_cast<double>(k), w_grid.a, w_grid.h(), F.component(c),
                       w_grid.n);
  return F;
}

FeatureMap pw_point_feature_map(const Grid& w_grid, int dim) {
  require_pw_grid(w_grid);
  FeatureMap fm;
  fm.w_grid = w_grid;
  fm.w_dim = dim;
  fm.dim_y = dim;
  fm.evaluate = [w_grid, dim](const Index& a, const CVec& xi) {
    if (a.kind == Index::Kind::RealVector) throw DomainError("point feature needs a scalar location");
    if (static_cast<int>(xi.size()) != dim) throw ShapeError("xi has the wrong dimension");
    const GridFunction e = phi_point(a.position(), w_grid);
    GridFunction out(w_grid, dim);
    for (int c = 0; c < dim; ++c)
      for (int i = 0; i < w_grid.n; ++i) out.at(i, c) = xi[c] * e.at(i);
    return out;
  };
  return fm;
}

FeatureMap pw_average_feature_map(double delta, Profile p, const Grid& w_grid, int n_sub) {
  require_pw_grid(w_grid);
  FeatureMap fm;
  fm.w_grid = w_grid;
  fm.evaluate = [=](const Index& a, const CVec& xi) {
    if (a.kind == Index::Kind::RealVector) throw DomainError("average feature needs a scalar location");
    if (xi.size() != 1) throw ShapeError("average feature has a scalar output space");
    GridFunction f = psi_feature(AverageFunctional(a.position(), delta, p), w_grid, n_sub);
    f *= xi[0];
    return f;
  };
  return fm;
}

FeatureMap pw_vector_feature_map(const Grid& w_grid, int n) {
  require_pw_grid(w_grid);
  FeatureMap fm;
  fm.w_grid = w_grid;
  fm.w_dim = n;
  fm.dim_y = 1;
  fm.evaluate = [w_grid, n](const Index& a, const CVec& c) {
    if (a.kind != Index::Kind::RealVector || static_cast<int>(a.v.size()) != n)
      throw DomainError("vector feature needs (location, C^n vector) indices");
    if (c.size() != 1) throw ShapeError("vector feature has a scalar output space");
    const GridFunction e = phi_point(a.x, w_grid);
    GridFunction out(w_grid, n);
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < w_grid.n; ++i) out.at(i, l) = c[0] * a.v[l] * e.at(i);
    return out;
  };
  return fm;
}

namespace {

class AverageFamily : public FunctionalFamily {
 public:
  AverageFamily(double delta, Profile p, int refine) : delta_(delta), profile_(p), refine_(refine) {
    AverageFunctional(0.0, delta, p);  // validates delta
  }
  std::string name() const override { return "average"; }
  nlohmann::json params() const override {
    return {{"delta", delta_}, {"profile", profile_name(profile_)}, {"refine", refine_}};
  }
  void check_index(const Index& a) const override {
    if (a.kind == Index::Kind::RealVector) throw DomainError("average functional needs a scalar center");
  }
  CVec apply(const Index& a, const GridFunction& f) const override {
    check_index(a);
    return average_sample(f, AverageFunctional(a.position(), delta_, profile_), refine_);
  }

 private:
  double delta_;
  Profile profile_;
  int refine_;
};

}  // namespace

std::shared_ptr<FunctionalFamily> average_family(double delta, Profile p, int refine) {
  return std::make_shared<AverageFamily>(delta, p, refine);
}

KadecBounds kadec_bounds(double delta) {
  if (!(delta >= 0.0) || !(delta < 0.25)) throw AdmissibilityError("Kadec bounds need 0 <= delta < 1/4");
  const double c = std::cos(delta * kPi), s = std::sin(delta * kPi);
  return {kTwoPi * (c - s) * (c - s), kTwoPi * (2.0 - c + s) * (2.0 - c + s)};
}

KadecCheck generalized_kadec_check(double A, double B, double delta) {
  if (!(A >= 0.0) || !(B > 0.0) || A > B) throw ValidationError("frame bounds must satisfy 0 <= A <= B, B > 0");
  if (!(delta >= 0.0) || !(delta < 0.5)) throw ValidationError("perturbation delta must lie in [0, 1/2)");
  // 1 - cos(d pi) + sin(d pi) written so that d = 1/4 lands exactly on 1
  const double lhs = 1.0 + std::sqrt(2.0) * std::sin((delta - 0.25) * kPi);
  KadecCheck r;
  r.margin = std::sqrt(A / B) - lhs;
  r.pass = r.margin > 0.0;
  return r;
}

SeparationReport separation_frame_check(const std::vector<double>& x, double alpha_sep, double L, double eps,
                                        double delta, std::optional<long long> j0) {
  if (!(delta < alpha_sep / 2.0)) throw ValidationError("separation check needs delta < alpha / 2");
  SeparationReport r;
  std::vector<double> s = x;
  std::sort(s.begin(), s.end());
  r.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < s.size(); ++j) r.min_gap = std::min(r.min_gap, s[j] - s[j - 1]);
  const long long first = j0 ? *j0 : -static_cast<long long>(x.size()) / 2;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double ideal = static_cast<double>(first + static_cast<long long>(j)) * eps;
    r.max_deviation = std::max(r.max_deviation, std::abs(x[j] - ideal));
  }
  // positions carry rounding, so boundary cases such as j + 0.4(-1)^j compare with a small slack
  double scale = 1.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * scale;
  r.pass = r.min_gap >= alpha_sep - tol && r.max_deviation <= L + tol;
  r.perturbed_alpha = alpha_sep - 2.0 * delta;
  r.perturbed_L = L + delta;
  return r;
}

ShiftedAverageReport shifted_average_frame_check(const GridFunction& u, double c_floor, int n_fine) {
  const Grid t(-kPi, kPi, n_fine);
  std::vector<double> neg(t.n);
  for (int i = 0; i < t.n; ++i) neg[i] = -t.x(i);
  const CVec uh = dft(u, neg);
  ShiftedAverageReport r;
  r.min_abs = std::numeric_limits<double>::infinity();
  for (const auto& v : uh) r.min_abs = std::min(r.min_abs, std::abs(v) / kTwoPi);
  r.pass = c_floor > 0.0 && r.min_abs >= c_floor;
  return r;
}

PerturbationSpotCheck perturbation_spot_check(const std::vector<double>& x, double delta, int random_draws,
                                              std::uint64_t seed, const Grid& w_grid) {
  require_pw_grid(w_grid);
  PerturbationSpotCheck r;
  r.min_lower = std::numeric_limits<double>::infinity();
  Rng rng(seed);
  const int total = random_draws + 2;
  for (int d = 0; d < total; ++d) {
    std::vector<GridFunction> feats;
    for (double xj : x) {
      const double shift = d == 0 ? -delta : d == 1 ? delta : rng.uniform(-delta, delta);
      feats.push_back(phi_point(xj + shift, w_grid));
    }
    const auto ed = hermitian_eig(feature_gram(feats).matrix);
    r.min_lower = std::min(r.min_lower, ed.values(0));
    r.max_upper = std::max(r.max_upper, ed.values(ed.values.size() - 1));
    ++r.draws;
  }
  r.pass = r.min_lower > 1e-10 * r.max_upper;
  return r;
}

CVec VectorSamplingSet::xi(std::size_t j) const {
  const int l = l_of(j);
  CVec v(n);
  for (int p = 0; p < n; ++p) v[p] = U(p, l);
  return v;
}

ComplexMatrix dft_unitary(int n) {
  if (n < 1) throw ValidationError("DFT size must be >= 1");
  ComplexMatrix U(n, n);
  for (int p = 0; p < n; ++p)
    for (int l = 0; l < n; ++l) {
      const int r = (p * l) % n;
      // exact entries for the real cases keep e.g. n = 2 free of roundoff
      if (r == 0)
        U(p, l) = 1.0;
      else if (2 * r == n)
        U(p, l) = -1.0;
      else
        U(p, l) = std::polar(1.0, -kTwoPi * r / n);
    }
  return U / std::sqrt(static_cast<double>(n));
}

VectorSamplingSet build_vector_sampling_set(int n, int m_range,
                                            const std::function<std::vector<double>(int)>& perturb,
                                            const std::optional<ComplexMatrix>& U) {
  if (n < 1 || m_range < 0) throw ValidationError("vector sampling set needs n >= 1 and m_range >= 0");
  VectorSamplingSet s;
  s.n = n;
  s.m_range = m_range;
  s.U = U ? *U : dft_unitary(n);
  if (s.U.rows() != n || s.U.cols() != n) throw ValidationError("U must be n x n");
  const double defect = (s.U * s.U.adjoint() - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (defect > 1e-10) {
    std::ostringstream os;
    os << "U is not unitary (max |U U* - I| = " << defect << ")";
    throw ValidationError(os.str());
  }
  for (int m = -m_range; m <= m_range; ++m) {
    std::vector<double> p = perturb ? perturb(m) : std::vector<double>(n, 0.0);
    if (static_cast<int>(p.size()) != n) throw ShapeError("perturbation must return n offsets");
    for (int l = 0; l < n; ++l) s.x.push_back(m + p[l]);
  }
  return s;
}

std::vector<GridFunction> vector_sampling_features(const VectorSamplingSet& set, const Grid& w_grid) {
  const FeatureMap fm = pw_vector_feature_map(w_grid, set.n);
  std::vector<GridFunction> out;
  for (std::size_t j = 0; j < set.size(); ++j) out.push_back(fm(Index::pair(set.x[j], set.xi(j)), CVec{1.0}));
  return out;
}

}  // namespace opk
