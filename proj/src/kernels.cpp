#include "opk/kernels.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace opk {

Index Index::integer(long long k) {
  Index a;
  a.kind = Kind::Integer;
  a.k = k;
  return a;
}

Index Index::real(double x) {
  Index a;
  a.kind = Kind::Real;
  a.x = x;
  return a;
}

Index Index::pair(double x, CVec v) {
  Index a;
  a.kind = Kind::RealVector;
  a.x = x;
  a.v = std::move(v);
  return a;
}

std::string Index::label() const {
  std::ostringstream os;
  os << std::setprecision(15);
  switch (kind) {
    case Kind::Integer:
      os << k;
      break;
    case Kind::Real:
      os << x;
      break;
    case Kind::RealVector:
      os << x << ":";
      for (std::size_t l = 0; l < v.size(); ++l) os << (l ? ";" : "") << v[l].real() << "+" << v[l].imag() << "i";
      break;
  }
  return os.str();
}

bool Index::operator==(const Index& o) const {
  if (kind != o.kind) return false;
  if (kind == Kind::Integer) return k == o.k;
  if (std::abs(x - o.x) > 1e-12 * std::max(1.0, std::abs(x))) return false;
  if (v.size() != o.v.size()) return false;
  for (std::size_t l = 0; l < v.size(); ++l)
    if (std::abs(v[l] - o.v[l]) > 1e-12) return false;
  return true;
}

CVec unit_vector(int dim, int l) {
  CVec e(dim, 0.0);
  e[l] = 1.0;
  return e;
}

cplx y_inner(const CVec& a, const CVec& b) {
  if (a.size() != b.size()) throw ShapeError("output-space vectors differ in length");
  cplx s = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) s += a[l] * std::conj(b[l]);
  return s;
}

double y_norm(const CVec& a) { return std::sqrt(y_inner(a, a).real()); }

void FunctionalFamily::check_index(const Index&) const {}

CVec FunctionalFamily::apply_section(const Index& alpha, const KernelSection& s) const {
  if (feature_ && s.w_repr && s.w_repr->grid.same_as(feature_->w_grid)) {
    check_index(alpha);
    CVec out(feature_->dim_y);
    for (int l = 0; l < feature_->dim_y; ++l)
      out[l] = inner_product(*s.w_repr, feature_->evaluate(alpha, unit_vector(feature_->dim_y, l)));
    return out;
  }
  return apply(alpha, s.h_repr);
}

namespace {

class FourierFamily : public FunctionalFamily {
 public:
  std::string name() const override { return "fourier"; }
  void check_index(const Index& a) const override {
    if (a.kind != Index::Kind::Integer) throw DomainError("Fourier coefficients need integer indices");
  }
  CVec apply(const Index& a, const GridFunction& f) const override {
    check_index(a);
    CVec out(f.dim);
    for (int c = 0; c < f.dim; ++c) out[c] = dft(f, {a.position()}, c)[0] / std::sqrt(kTwoPi);
    return out;
  }
};

class PointFamily : public FunctionalFamily {
 public:
  std::string name() const override { return "point"; }
  void check_index(const Index& a) const override {
    if (a.kind == Index::Kind::RealVector) throw DomainError("point evaluation needs a scalar location");
  }
  CVec apply(const Index& a, const GridFunction& f) const override {
    check_index(a);
    return f.eval(a.position());
  }
};

class PointInnerFamily : public FunctionalFamily {
 public:
  std::string name() const override { return "point_inner"; }
  void check_index(const Index& a) const override {
    if (a.kind != Index::Kind::RealVector) throw DomainError("point_inner needs (location, vector) indices");
  }
  CVec apply(const Index& a, const GridFunction& f) const override {
    check_index(a);
    const CVec v = f.eval(a.x);
    return {y_inner(v, a.v)};
  }
};

class IntegralFamily : public FunctionalFamily {
 public:
  explicit IntegralFamily(std::vector<GridFunction> w) : weights_(std::move(w)) {}
  std::string name() const override { return "integral"; }
  void check_index(const Index& a) const override {
    if (a.kind != Index::Kind::Integer || a.k < 0 || a.k >= static_cast<long long>(weights_.size()))
      throw DomainError("integral functional index out of range");
  }
  CVec apply(const Index& a, const GridFunction& f) const override {
    check_index(a);
    const GridFunction& u = weights_[a.k];
    if (!u.grid.same_as(f.grid)) throw ShapeError("integral weight and function on different grids");
    CVec out(f.dim);
    for (int c = 0; c < f.dim; ++c) {
      GridFunction prod(f.grid, 1);
      for (int i = 0; i < f.grid.n; ++i) prod.at(i) = f.at(i, c) * u.at(i);
      out[c] = quadrature(prod)[0];
    }
    return out;
  }

 private:
  std::vector<GridFunction> weights_;
};

}  // namespace

std::shared_ptr<FunctionalFamily> fourier_family() { return std::make_shared<FourierFamily>(); }
std::shared_ptr<FunctionalFamily> point_family() { return std::make_shared<PointFamily>(); }
std::shared_ptr<FunctionalFamily> point_inner_family() { return std::make_shared<PointInnerFamily>(); }
std::shared_ptr<FunctionalFamily> integral_family(std::vector<GridFunction> weights) {
  return std::make_shared<IntegralFamily>(std::move(weights));
}

KernelSection kernel_from_features(const FeatureMap& phi, const FeatureMap& psi, const Index& alpha, const CVec& xi,
                                   const Grid& h_grid) {
  if (!phi.w_grid.same_as(psi.w_grid) || phi.w_dim != psi.w_dim) throw ShapeError("feature maps use different W");
  if (static_cast<int>(xi.size()) != psi.dim_y) throw ShapeError("xi has the wrong dimension");
  KernelSection s{alpha, xi, GridFunction(h_grid, phi.dim_y), psi(alpha, xi)};
  for (int i = 0; i < h_grid.n; ++i) {
    const Index at = Index::real(h_grid.x(i));
    for (int l = 0; l < phi.dim_y; ++l) s.h_repr.at(i, l) = inner_product(*s.w_repr, phi(at, unit_vector(phi.dim_y, l)));
  }
  return s;
}

std::vector<std::vector<CVec>> functional_table(const std::vector<KernelSection>& sections,
                                                const std::vector<Index>& alphas, const FunctionalFamily& functionals) {
  const FeatureMap* fm = functionals.feature();
  bool via_features = fm != nullptr;
  for (const auto& s : sections) via_features = via_features && s.w_repr && s.w_repr->grid.same_as(fm->w_grid);
  std::vector<std::vector<CVec>> table(sections.size(), std::vector<CVec>(alphas.size()));
  if (!via_features) {
    for (std::size_t j = 0; j < sections.size(); ++j)
      for (std::size_t k = 0; k < alphas.size(); ++k) table[j][k] = functionals.apply_section(alphas[k], sections[j]);
    return table;
  }
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    functionals.check_index(alphas[k]);
    std::vector<GridFunction> feats;
    for (int l = 0; l < fm->dim_y; ++l) feats.push_back(fm->evaluate(alphas[k], unit_vector(fm->dim_y, l)));
    for (std::size_t j = 0; j < sections.size(); ++j) {
      CVec v(fm->dim_y);
      for (int l = 0; l < fm->dim_y; ++l) v[l] = inner_product(*sections[j].w_repr, feats[l]);
      table[j][k] = std::move(v);
    }
  }
  return table;
}

GramMatrix gram(const std::vector<KernelSection>& sections, const FunctionalFamily& functionals) {
  const int m = static_cast<int>(sections.size());
  GramMatrix g;
  g.matrix = ComplexMatrix::Zero(m, m);
  std::vector<Index> alphas;
  for (int j = 0; j < m; ++j) {
    if (j > 0) require_compatible(sections[0].h_repr, sections[j].h_repr);
    g.indices.emplace_back(sections[j].alpha, sections[j].xi);
    alphas.push_back(sections[j].alpha);
  }
  const auto table = functional_table(sections, alphas, functionals);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) g.matrix(j, k) = y_inner(table[j][k], sections[k].xi);
  const double scale = g.matrix.norm();
  g.asymmetry = scale > 0.0 ? (g.matrix - g.matrix.adjoint()).norm() / scale : 0.0;
  if (g.asymmetry > 1e-6) {
    std::ostringstream os;
    os << "Gram asymmetry " << g.asymmetry << " exceeds 1e-6 relative";
    throw KernelConsistencyError(os.str(), g.asymmetry);
  }
  g.matrix = 0.5 * (g.matrix + g.matrix.adjoint()).eval();
  return g;
}

GramMatrix feature_gram(const std::vector<GridFunction>& features) {
  const int m = static_cast<int>(features.size());
  GramMatrix g;
  g.matrix = ComplexMatrix::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    g.indices.emplace_back(Index::integer(j), CVec{1.0});
    for (int k = j; k < m; ++k) {
      g.matrix(j, k) = inner_product(features[j], features[k]);
      g.matrix(k, j) = std::conj(g.matrix(j, k));
    }
    g.matrix(j, j) = g.matrix(j, j).real();
  }
  return g;
}

PsdReport psd_check(const ComplexMatrix& m) {
  PsdReport r;
  if (m.rows() == 0) {
    r.pass = true;
    return r;
  }
  const auto ed = hermitian_eig(m);
  r.min_eig = ed.values(0);
  r.max_eig = ed.values(ed.values.size() - 1);
  r.pass = r.min_eig >= -1e-8 * std::max(std::abs(r.max_eig), 1.0);
  return r;
}

PsdReport psd_check(const GramMatrix& g) { return psd_check(g.matrix); }

FiniteDimKernel::FiniteDimKernel(std::vector<GridFunction> basis, FamilyPtr functionals)
    : basis_(std::move(basis)), family_(std::move(functionals)) {
  const int n = static_cast<int>(basis_.size());
  if (n == 0) throw ValidationError("finite-dimensional kernel needs a nonempty basis");
  a_ = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) a_(j, k) = inner_product(basis_[k], basis_[j]);
  a_ = 0.5 * (a_ + a_.adjoint()).eval();
  const auto ed = hermitian_eig(a_);
  const double lo = ed.values(0), hi = ed.values(n - 1);
  if (!(hi > 0.0) || lo <= 1e-12 * hi) {
    std::ostringstream os;
    os << "basis is numerically dependent (basis Gram eigenvalues " << lo << " .. " << hi << ")";
    throw IndependenceError(os.str());
  }
  Eigen::VectorXd inv = ed.values.cwiseInverse();
  b_ = ed.vectors * inv.asDiagonal() * ed.vectors.adjoint();
}

KernelSection FiniteDimKernel::section(const Index& alpha, const CVec& xi) const {
  const int n = static_cast<int>(basis_.size());
  ComplexVector proj(n);  // <xi, L_alpha(phi_k)>
  for (int k = 0; k < n; ++k) proj(k) = y_inner(xi, family_->apply(alpha, basis_[k]));
  const ComplexVector coef = b_ * proj;
  KernelSection s{alpha, xi, GridFunction(basis_[0].grid, basis_[0].dim), std::nullopt};
  for (int j = 0; j < n; ++j) s.h_repr.add_scaled(coef(j), basis_[j]);
  return s;
}

KernelSection finite_dim_kernel(const std::vector<GridFunction>& basis, FamilyPtr functionals, const Index& alpha,
                                const CVec& xi) {
  return FiniteDimKernel(basis, std::move(functionals)).section(alpha, xi);
}

KernelSection translation_invariant_section(const GridFunction& varphi, const GridFunction& u_alpha,
                                            const Grid& out_grid) {
  const Grid& tg = varphi.grid;
  std::vector<double> neg_t(tg.n);
  for (int i = 0; i < tg.n; ++i) neg_t[i] = -tg.x(i);
  const CVec uhat = dft(u_alpha, neg_t);
  GridFunction g(tg, 1);
  for (int i = 0; i < tg.n; ++i) g.at(i) = varphi.at(i) * uhat[i] / kTwoPi;
  GridFunction k = dft_grid(g, out_grid);
  k *= kTwoPi;
  return {Index::integer(0), CVec{1.0}, std::move(k), std::nullopt};
}

IntegralPsdReport integral_kernel_psd_test(const std::function<cplx(double, double)>& kappa,
                                           const std::vector<GridFunction>& u_family, int trials, std::uint64_t seed) {
  IntegralPsdReport r;
  if (u_family.empty() || trials <= 0) return r;
  const Grid& g = u_family[0].grid;
  for (const auto& u : u_family)
    if (!u.grid.same_as(g)) throw ShapeError("u_family members live on different grids");
  const int n = g.n;
  ComplexMatrix kw(n, n);  // w_s w_t kappa(s, t)
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) kw(s, t) = g.weight(s) * g.weight(t) * kappa(g.x(s), g.x(t));
  Rng rng(seed);
  r.worst_real = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    ComplexVector u = ComplexVector::Zero(n);
    for (const auto& uj : u_family) {
      const cplx c = rng.unit_disc();
      for (int i = 0; i < n; ++i) u(i) += c * uj.at(i);
    }
    double l1 = 0.0;
    for (int i = 0; i < n; ++i) l1 += g.weight(i) * std::abs(u(i));
    if (l1 == 0.0) continue;
    const cplx q = u.transpose() * kw * u.conjugate();
    const double re = q.real() / (l1 * l1), im = std::abs(q.imag()) / (l1 * l1);
    r.worst_real = std::min(r.worst_real, re);
    r.worst_imag = std::max(r.worst_imag, im);
    ++r.trials;
  }
  if (r.trials == 0) r.worst_real = 0.0;
  r.pass = r.worst_real >= -1e-8 && r.worst_imag <= 1e-8;
  return r;
}

}  // namespace opk
