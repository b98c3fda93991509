#include "opk/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "opk/simd.hpp"

namespace opk {

Grid::Grid(double a_, double b_, int n_) : a(a_), b(b_), n(n_) {
  if (!(a < b)) throw ValidationError("grid requires a < b");
  if (n < 2) throw ValidationError("grid requires n >= 2");
}

bool Grid::same_as(const Grid& o, double tol) const {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return n == o.n && std::abs(a - o.a) <= tol * scale && std::abs(b - o.b) <= tol * scale;
}

GridFunction::GridFunction(const Grid& g, int d) : grid(g), dim(d), values(static_cast<std::size_t>(g.n) * d) {
  if (d < 1) throw ValidationError("grid function dim must be >= 1");
}

GridFunction::GridFunction(const Grid& g, int d, CVec vals) : grid(g), dim(d), values(std::move(vals)) {
  if (d < 1) throw ValidationError("grid function dim must be >= 1");
  if (values.size() != static_cast<std::size_t>(g.n) * d) throw ShapeError("values length != n * dim");
}

CVec GridFunction::eval(double x) const {
  const double tol = 1e-12 * std::max(1.0, std::abs(grid.b - grid.a));
  if (x < grid.a - tol || x > grid.b + tol) throw DomainError("evaluation point outside grid");
  const double u = std::clamp((x - grid.a) / grid.h(), 0.0, static_cast<double>(grid.n - 1));
  int i = std::min(static_cast<int>(std::floor(u)), grid.n - 2);
  const double w = u - i;
  CVec out(dim);
  for (int c = 0; c < dim; ++c) out[c] = (1.0 - w) * at(i, c) + w * at(i + 1, c);
  return out;
}

void require_compatible(const GridFunction& f, const GridFunction& g) {
  if (!f.grid.same_as(g.grid)) throw ShapeError("grid functions live on different grids");
  if (f.dim != g.dim) throw ShapeError("grid functions have different dims");
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_compatible(*this, o);
  for (std::size_t k = 0; k < values.size(); ++k) values[k] += o.values[k];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_compatible(*this, o);
  for (std::size_t k = 0; k < values.size(); ++k) values[k] -= o.values[k];
  return *this;
}

GridFunction& GridFunction::operator*=(cplx s) {
  for (auto& v : values) v *= s;
  return *this;
}

void GridFunction::add_scaled(cplx s, const GridFunction& o) {
  require_compatible(*this, o);
  simd::axpy(s, o.values.data(), values.data(), values.size());
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(cplx s, GridFunction a) { return a *= s; }

CVec quadrature(const GridFunction& f) {
  const int n = f.grid.n;
  const double h = f.grid.h();
  CVec out(f.dim);
  for (int c = 0; c < f.dim; ++c) {
    const cplx* v = f.component(c);
    out[c] = h * (simd::sum(v, n) - 0.5 * (v[0] + v[n - 1]));
  }
  return out;
}

cplx inner_product(const GridFunction& f, const GridFunction& g) {
  require_compatible(f, g);
  const int n = f.grid.n;
  const double h = f.grid.h();
  cplx total = 0.0;
  for (int c = 0; c < f.dim; ++c) {
    const cplx* a = f.component(c);
    const cplx* b = g.component(c);
    const cplx ends = a[0] * std::conj(b[0]) + a[n - 1] * std::conj(b[n - 1]);
    total += h * (simd::dot_conj(a, b, n) - 0.5 * ends);
  }
  return total;
}

double norm(const GridFunction& f) { return std::sqrt(std::max(0.0, inner_product(f, f).real())); }

namespace {

cplx dft_one(const cplx* v, const Grid& g, double omega) {
  const int n = g.n;
  const double h = g.h();
  const cplx ends = 0.5 * (v[0] * std::polar(1.0, -omega * g.a) + v[n - 1] * std::polar(1.0, -omega * g.b));
  return h * (simd::phase_sum(v, n, g.a, h, omega) - ends);
}

}  // namespace

CVec dft(const GridFunction& f, const std::vector<double>& freqs, int component) {
  if (component < 0 || component >= f.dim) throw ShapeError("dft component out of range");
  CVec out(freqs.size());
  for (std::size_t k = 0; k < freqs.size(); ++k) out[k] = dft_one(f.component(component), f.grid, freqs[k]);
  return out;
}

GridFunction dft_grid(const GridFunction& f, const Grid& freq_grid) {
  GridFunction out(freq_grid, f.dim);
  for (int c = 0; c < f.dim; ++c)
    for (int k = 0; k < freq_grid.n; ++k) out.at(k, c) = dft_one(f.component(c), f.grid, freq_grid.x(k));
  return out;
}

double hermitian_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("matrix is not square");
  const double scale = m.norm();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).norm() / scale;
}

EigenDecomposition hermitian_eig(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("matrix is not square");
  if (!m.allFinite()) throw ValidationError("matrix has non-finite entries");
  const double defect = hermitian_defect(m);
  if (defect > 1e-12) {
    std::ostringstream os;
    os << "matrix is not Hermitian (relative defect " << defect << ")";
    throw ValidationError(os.str());
  }
  if (m.rows() == 0) return {};
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
  if (es.info() != Eigen::Success) throw ConditioningError("eigensolver did not converge", 0.0, 0.0);
  return {es.eigenvalues(), es.eigenvectors()};
}

ComplexVector solve_hermitian(const ComplexMatrix& m, const ComplexVector& rhs) {
  if (rhs.size() != m.rows()) throw ShapeError("rhs length does not match matrix");
  const auto ed = hermitian_eig(m);
  const double lo = ed.values.size() ? ed.values(0) : 0.0;
  const double hi = ed.values.size() ? ed.values(ed.values.size() - 1) : 0.0;
  if (!(hi > 0.0) || !(lo > 1e-12 * hi)) {
    std::ostringstream os;
    os << "matrix is not positive definite (min eig " << lo << ", max eig " << hi << ")";
    throw ConditioningError(os.str(), lo, hi);
  }
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::LLT<ComplexMatrix> llt(sym);
  if (llt.info() != Eigen::Success) {
    // Cholesky can still fail near the threshold; the eigenbasis solve cannot.
    ComplexVector y = ed.vectors.adjoint() * rhs;
    for (Eigen::Index k = 0; k < y.size(); ++k) y(k) /= ed.values(k);
    return ed.vectors * y;
  }
  ComplexVector x = llt.solve(rhs);
  // one step of iterative refinement keeps the residual at roundoff level
  x += llt.solve(rhs - sym * x);
  return x;
}

ComplexVector pseudoinverse_apply(const ComplexMatrix& m, const ComplexVector& rhs, double rel_cutoff) {
  if (!(rel_cutoff > 0.0 && rel_cutoff < 1.0)) throw ValidationError("rel_cutoff must lie in (0, 1)");
  if (rhs.size() != m.rows()) throw ShapeError("rhs length does not match matrix");
  if (m.size() == 0) return ComplexVector::Zero(m.cols());
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  ComplexVector y = svd.matrixU().adjoint() * rhs;
  for (Eigen::Index k = 0; k < s.size(); ++k) y(k) = (smax > 0.0 && s(k) > rel_cutoff * smax) ? y(k) / s(k) : 0.0;
  return svd.matrixV() * y;
}

ComplexMatrix hermitian_pseudoinverse(const ComplexMatrix& m, double rel_cutoff, int* rank) {
  if (!(rel_cutoff > 0.0 && rel_cutoff < 1.0)) throw ValidationError("rel_cutoff must lie in (0, 1)");
  const auto ed = hermitian_eig(m);
  const double top = ed.values.size() ? ed.values.cwiseAbs().maxCoeff() : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ed.values.size());
  int kept = 0;
  for (Eigen::Index k = 0; k < ed.values.size(); ++k) {
    if (top > 0.0 && std::abs(ed.values(k)) > rel_cutoff * top) {
      inv(k) = 1.0 / ed.values(k);
      ++kept;
    }
  }
  if (rank) *rank = kept;
  return ed.vectors * inv.asDiagonal() * ed.vectors.adjoint();
}

ComplexVector to_eigen(const CVec& v) {
  ComplexVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) out(static_cast<Eigen::Index>(k)) = v[k];
  return out;
}

CVec from_eigen(const ComplexVector& v) { return CVec(v.data(), v.data() + v.size()); }

double Rng::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }

int Rng::integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

cplx Rng::unit_disc() {
  const double r = std::sqrt(uniform());
  const double th = uniform(0.0, kTwoPi);
  return std::polar(r, th);
}

cplx Rng::complex_gaussian(double sigma) {
  const double s = sigma / std::sqrt(2.0);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

std::vector<int> Rng::permutation(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(p[i], p[integer(0, i)]);
  return p;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 finaliser
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CVec random_coefficients(Rng& rng, int n, double scale) {
  CVec c(n);
  for (auto& v : c) {
    const double re = rng.uniform(-scale, scale);
    const double im = rng.uniform(-scale, scale);
    v = {re, im};
  }
  return c;
}

GridFunction random_trig_poly(const Grid& g, int kmax, Rng& rng) {
  const CVec c = random_coefficients(rng, 2 * kmax + 1);
  GridFunction f(g, 1);
  for (int i = 0; i < g.n; ++i) {
    cplx v = 0.0;
    for (int k = -kmax; k <= kmax; ++k) v += c[k + kmax] * std::polar(1.0, k * g.x(i));
    f.at(i) = v;
  }
  return f;
}

}  // namespace opk
