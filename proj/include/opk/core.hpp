#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "opk/errors.hpp"

namespace opk {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Grid {
  double a = 0.0;
  double b = 1.0;
  int n = 2;

  Grid() = default;
  Grid(double a, double b, int n);  // validates a < b, n >= 2

  double h() const { return (b - a) / (n - 1); }
  double x(int i) const { return i == n - 1 ? b : a + i * h(); }
  // trapezoid weight of node i
  double weight(int i) const { return (i == 0 || i == n - 1) ? 0.5 * h() : h(); }
  bool same_as(const Grid& o, double tol = 1e-12) const;
};

// Values are stored component-major: component c of node i lives at c*n + i.
struct GridFunction {
  Grid grid;
  int dim = 1;
  CVec values;

  GridFunction() = default;
  GridFunction(const Grid& g, int dim);  // zero-initialised
  GridFunction(const Grid& g, int dim, CVec vals);

  cplx& at(int i, int c = 0) { return values[static_cast<std::size_t>(c) * grid.n + i]; }
  const cplx& at(int i, int c = 0) const { return values[static_cast<std::size_t>(c) * grid.n + i]; }
  const cplx* component(int c) const { return values.data() + static_cast<std::size_t>(c) * grid.n; }
  cplx* component(int c) { return values.data() + static_cast<std::size_t>(c) * grid.n; }

  // piecewise-linear interpolation of every component; x must lie in [a, b]
  CVec eval(double x) const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(cplx s);
  // this += s * o
  void add_scaled(cplx s, const GridFunction& o);
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(cplx s, GridFunction a);

template <class F>
GridFunction sample(const Grid& g, F&& f) {
  GridFunction out(g, 1);
  for (int i = 0; i < g.n; ++i) out.at(i) = f(g.x(i));
  return out;
}

void require_compatible(const GridFunction& f, const GridFunction& g);

// composite trapezoid rule, one entry per component
CVec quadrature(const GridFunction& f);
// sum over components of the trapezoid integral of f * conj(g)
cplx inner_product(const GridFunction& f, const GridFunction& g);
double norm(const GridFunction& f);
// entry k: integral of f(t) exp(-i t freqs[k]) dt for one component of f
CVec dft(const GridFunction& f, const std::vector<double>& freqs, int component = 0);
// same transform evaluated on a uniform frequency grid, returned as a grid function
GridFunction dft_grid(const GridFunction& f, const Grid& freq_grid);

struct EigenDecomposition {
  Eigen::VectorXd values;  // ascending
  ComplexMatrix vectors;   // columns
};

double hermitian_defect(const ComplexMatrix& m);  // ||m - m*|| / max(||m||, tiny)
EigenDecomposition hermitian_eig(const ComplexMatrix& m);
ComplexVector solve_hermitian(const ComplexMatrix& m, const ComplexVector& rhs);
ComplexVector pseudoinverse_apply(const ComplexMatrix& m, const ComplexVector& rhs, double rel_cutoff);
// Hermitian pseudoinverse from the eigen-decomposition; eigenvalues at or below
// rel_cutoff * max|eig| are dropped. rank receives the number kept.
ComplexMatrix hermitian_pseudoinverse(const ComplexMatrix& m, double rel_cutoff, int* rank = nullptr);

ComplexVector to_eigen(const CVec& v);
CVec from_eigen(const ComplexVector& v);

// Seeded generator for test signals and random trials.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0);
  double normal();
  int integer(int lo, int hi);  // inclusive
  cplx unit_disc();             // uniform in the closed unit disc
  cplx complex_gaussian(double sigma);  // circular, E|z|^2 = sigma^2
  std::vector<int> permutation(int n);
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

// deterministic per-stream seed derived from a master seed
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

CVec random_coefficients(Rng& rng, int n, double scale = 1.0);
// trigonometric polynomial sum_{|k|<=kmax} c_k e^{ikx} with random c_k
GridFunction random_trig_poly(const Grid& g, int kmax, Rng& rng);

}  // namespace opk
