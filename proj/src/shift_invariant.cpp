#include "opk/shift_invariant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opk/simd.hpp"

namespace opk {

std::string Generator::name() const {
  switch (order) {
    case 1:
      return "box";
    case 2:
      return "hat";
    default:
      return "cubic";
  }
}

double Generator::eval(double t) const {
  const double a = std::abs(t);
  switch (order) {
    case 1:
      return a < 0.5 ? 1.0 : (a == 0.5 ? 0.5 : 0.0);
    case 2:
      return std::max(0.0, 1.0 - a);
    default:
      if (a < 1.0) return 2.0 / 3.0 - a * a + 0.5 * a * a * a;
      if (a < 2.0) return (2.0 - a) * (2.0 - a) * (2.0 - a) / 6.0;
      return 0.0;
  }
}

double Generator::fourier(double w) const { return std::pow(sinc(w / kTwoPi), order); }

std::vector<double> Generator::kinks() const {
  switch (order) {
    case 1:
      return {-0.5, 0.5};
    case 2:
      return {-1.0, 0.0, 1.0};
    default:
      return {-2.0, -1.0, 0.0, 1.0, 2.0};
  }
}

Generator make_generator(const std::string& name, int samples_per_unit, int j_trunc) {
  Generator g;
  if (name == "box")
    g.order = 1, g.support_radius = 1;
  else if (name == "hat")
    g.order = 2, g.support_radius = 1;
  else if (name == "cubic")
    g.order = 4, g.support_radius = 2;
  else
    throw ValidationError("unknown generator '" + name + "' (expected box, hat or cubic)");
  if (samples_per_unit < 1 || j_trunc < 0) throw ValidationError("generator needs samples_per_unit >= 1, J >= 0");
  g.samples_per_unit = samples_per_unit;
  g.j_trunc = j_trunc;
  const int R = g.support_radius;
  g.phi = GridFunction(Grid(-R, R, 2 * R * samples_per_unit + 1), 1);
  for (int i = 0; i < g.phi.grid.n; ++i) g.phi.at(i) = g.eval(g.phi.grid.x(i));
  return g;
}

namespace {

// sum_{j > J} (c + 2 pi j)^{-p} by Euler-Maclaurin from j = J + 1
double power_tail(double c, int J, int p) {
  const double s0 = c + kTwoPi * (J + 1);
  const double integral = std::pow(s0, 1 - p) / (kTwoPi * (p - 1));
  const double g0 = std::pow(s0, -p);
  const double dg0 = -kTwoPi * p * std::pow(s0, -p - 1);
  return integral + 0.5 * g0 - dg0 / 12.0;
}

}  // namespace

BracketValues bracket_function(const Generator& gen, const std::vector<double>& xi) {
  BracketValues r;
  r.values.resize(xi.size());
  const int J = gen.j_trunc;
  const int p = 2 * gen.order;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    double s = 0.0;
    for (int j = -J; j <= J; ++j) {
      const double v = gen.fourier(xi[i] + kTwoPi * j);
      s += v * v;
    }
    // every term beyond J is sin^{2r}(xi/2) (2 / (xi + 2 pi j))^{2r}
    const double lead = std::pow(2.0 * std::sin(0.5 * xi[i]), p);
    const double tail = lead * (power_tail(xi[i], J, p) + power_tail(-xi[i], J, p));
    s += tail;
    r.tail_estimate = std::max(r.tail_estimate, tail);
    if (!(s > 0.0) || !std::isfinite(s)) {
      std::ostringstream os;
      os << "bracket is not positive at xi = " << xi[i];
      throw RieszError(os.str());
    }
    r.values[i] = s;
  }
  return r;
}

cplx DualGenerator::eval(const Generator& gen, double t) const {
  const int R = gen.support_radius;
  const int k0 = std::max(-k_max, static_cast<int>(std::ceil(t - R)));
  const int k1 = std::min(k_max, static_cast<int>(std::floor(t + R)));
  cplx s = 0.0;
  for (int k = k0; k <= k1; ++k) s += coeff(k) * gen.eval(t - k);
  return s;
}

DualGenerator dual_generator(const Generator& gen, int k_max, int n_quad) {
  if (k_max < 0) throw ValidationError("k_max must be >= 0");
  const Grid xg(-kPi, kPi, n_quad);
  std::vector<double> xi(xg.n);
  for (int i = 0; i < xg.n; ++i) xi[i] = xg.x(i);
  const BracketValues br = bracket_function(gen, xi);
  GridFunction inv(xg, 1);
  for (int i = 0; i < xg.n; ++i) inv.at(i) = 1.0 / br.values[i];
  DualGenerator d;
  d.k_max = k_max;
  std::vector<double> ks;
  for (int k = -k_max; k <= k_max; ++k) ks.push_back(k);
  d.b_coeffs = dft(inv, ks);
  for (auto& b : d.b_coeffs) b /= kTwoPi;
  const int L = k_max + gen.support_radius;
  d.phi_tilde = GridFunction(Grid(-L, L, 2 * L * gen.samples_per_unit + 1), 1);
  for (int i = 0; i < d.phi_tilde.grid.n; ++i) d.phi_tilde.at(i) = d.eval(gen, d.phi_tilde.grid.x(i));
  return d;
}

double biorthogonality_residual(const Generator& gen, const DualGenerator& dual, int j_max) {
  const Grid& g = dual.phi_tilde.grid;
  double worst = 0.0;
  for (int j = -j_max; j <= j_max; ++j) {
    GridFunction shifted(g, 1);
    for (int i = 0; i < g.n; ++i) shifted.at(i) = gen.eval(g.x(i) - j);
    const cplx v = inner_product(shifted, dual.phi_tilde) - (j == 0 ? 1.0 : 0.0);
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

namespace {

// out += c * phi_tilde(. - k); copies stored nodes when the grids line up
void add_shifted_dual(GridFunction& out, const Generator& gen, const DualGenerator& dual, int k, double c) {
  const Grid& og = out.grid;
  const Grid& pg = dual.phi_tilde.grid;
  const double off = (og.a - k - pg.a) / pg.h();
  const long long shift = std::llround(off);
  if (std::abs(og.h() - pg.h()) <= 1e-13 * pg.h() && std::abs(off - shift) <= 1e-9) {
    const long long lo = std::max(0LL, -shift), hi = std::min<long long>(og.n - 1, pg.n - 1 - shift);
    for (long long i = lo; i <= hi; ++i) out.at(static_cast<int>(i)) += c * dual.phi_tilde.at(static_cast<int>(i + shift));
    return;
  }
  for (int i = 0; i < og.n; ++i) out.at(i) += c * dual.eval(gen, og.x(i) - k);
}

}  // namespace

GridFunction si_reproducing_kernel(const Generator& gen, const DualGenerator& dual, double x, const Grid& out_grid) {
  const int R = gen.support_radius;
  const double margin = R + dual.k_max;
  if (x - margin < out_grid.a - 1e-12 || x + margin > out_grid.b + 1e-12)
    throw DomainError("kernel location too close to the edge of the output grid");
  GridFunction out(out_grid, 1);
  const int k0 = static_cast<int>(std::ceil(x - R)), k1 = static_cast<int>(std::floor(x + R));
  for (int k = k0; k <= k1; ++k) {
    const double w = gen.eval(x - k);
    if (w == 0.0) continue;
    add_shifted_dual(out, gen, dual, k, w);
  }
  return out;
}

double si_coefficient(const Generator& gen, const AverageFunctional& u, int k, int n_sub) {
  std::vector<double> breaks = gen.kinks();
  for (auto& b : breaks) b += k;
  const LocalRule r = local_rule(u, n_sub, breaks);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * gen.eval(r.nodes[i] - k);
  return s;
}

KernelSection si_functional_kernel(const Generator& gen, const DualGenerator& dual, const AverageFunctional& u,
                                   const Grid& out_grid, int n_sub) {
  const int R = gen.support_radius;
  const int k0 = std::max(-dual.k_max, static_cast<int>(std::floor(u.lo() - R)));
  const int k1 = std::min(dual.k_max, static_cast<int>(std::ceil(u.hi() + R)));
  KernelSection s{Index::real(u.center), CVec{1.0}, GridFunction(out_grid, 1), std::nullopt};
  for (int k = k0; k <= k1; ++k) {
    const double c = si_coefficient(gen, u, k, n_sub);
    if (c == 0.0) continue;
    add_shifted_dual(s.h_repr, gen, dual, k, c);
  }
  return s;
}

std::vector<GridFunction> density_functions(const Generator& gen, const std::vector<AverageFunctional>& u_family,
                                            const Grid& xi_grid, int n_sub) {
  std::vector<GridFunction> out;
  const int J = gen.j_trunc;
  CVec tmp(xi_grid.n);
  for (const auto& u : u_family) {
    const LocalRule r = local_rule(u, n_sub);
    GridFunction g(xi_grid, 1);
    for (int l = -J; l <= J; ++l) {
      std::fill(tmp.begin(), tmp.end(), cplx(0.0));
      const double t0 = xi_grid.a + kTwoPi * l;
      for (std::size_t i = 0; i < r.nodes.size(); ++i)
        if (r.weights[i] != 0.0) simd::phase_axpy(r.weights[i], -r.nodes[i], t0, xi_grid.h(), tmp.data(), xi_grid.n);
      for (int k = 0; k < xi_grid.n; ++k) g.at(k) += tmp[k] * gen.fourier(xi_grid.x(k) + kTwoPi * l);
    }
    out.push_back(std::move(g));
  }
  return out;
}

DensityReport density_diagnostic(const Generator& gen, const std::vector<AverageFunctional>& u_family,
                                 const Grid& xi_grid, int n_sub) {
  DensityReport r;
  r.size = static_cast<int>(u_family.size());
  if (u_family.empty()) return r;
  const auto g = density_functions(gen, u_family, xi_grid, n_sub);
  const auto gm = feature_gram(g);
  const auto ed = hermitian_eig(gm.matrix);
  r.eigenvalues = ed.values;
  r.max_singular = std::max(0.0, ed.values(ed.values.size() - 1));
  r.min_singular = std::max(0.0, ed.values(0));
  for (Eigen::Index k = 0; k < ed.values.size(); ++k)
    if (ed.values(k) > 1e-10 * r.max_singular) ++r.rank;
  r.rank_deficient = r.rank < r.size;
  return r;
}

double fourier_coefficient_identity_check(const Generator& gen, const AverageFunctional& u, int k_range, int level) {
  if (level < 0 || level > 8) throw ValidationError("resolution level must lie in [0, 8]");
  const int scale = 1 << level;
  Generator g = gen;
  g.j_trunc = gen.j_trunc * scale;
  const int n_sub = kDefaultSubdivisions * scale;
  // the truncated sum is already resolved on a fixed xi grid; J and the
  // local rule carry the error
  const Grid xg(-kPi, kPi, 257);
  const GridFunction ga = density_functions(g, {u}, xg, n_sub)[0];
  double worst = 0.0;
  for (int k = -k_range; k <= k_range; ++k) {
    const double time_side = si_coefficient(gen, u, k, n_sub);
    const cplx freq_side = dft(ga, {-static_cast<double>(k)})[0] / kTwoPi;
    worst = std::max(worst, std::abs(freq_side - time_side));
  }
  return worst;
}

}  // namespace opk
