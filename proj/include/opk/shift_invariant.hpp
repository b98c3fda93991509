#pragma once

#include <string>
#include <vector>

#include "opk/core.hpp"
#include "opk/kernels.hpp"
#include "opk/paley_wiener.hpp"

namespace opk {

inline constexpr int kDefaultJTrunc = 64;
inline constexpr int kDefaultSamplesPerUnit = 2048;

// Centered B-spline generator of order 1 (box), 2 (hat) or 4 (cubic).
struct Generator {
  int order = 2;
  int support_radius = 1;  // phi vanishes outside [-R, R]
  int samples_per_unit = kDefaultSamplesPerUnit;
  int j_trunc = kDefaultJTrunc;
  GridFunction phi;  // sampled on [-R, R]

  std::string name() const;
  double eval(double t) const;     // closed form
  double fourier(double w) const;  // integral of phi(t) e^{-iwt} dt, real for these splines
  std::vector<double> kinks() const;  // break points of the piecewise polynomial, relative to 0
};

Generator make_generator(const std::string& name, int samples_per_unit = kDefaultSamplesPerUnit,
                         int j_trunc = kDefaultJTrunc);

struct BracketValues {
  std::vector<double> values;
  double tail_estimate = 0.0;  // largest tail correction added beyond |j| <= J
};

// sum_j |phi_hat(xi + 2 pi j)|^2: explicit terms |j| <= J plus an
// Euler-Maclaurin estimate of the remaining spline tail
BracketValues bracket_function(const Generator& gen, const std::vector<double>& xi);

struct DualGenerator {
  int k_max = 0;
  CVec b_coeffs;            // k in [-k_max, k_max]
  GridFunction phi_tilde;   // on [-(k_max + R), k_max + R]

  cplx coeff(int k) const { return b_coeffs[k + k_max]; }
  cplx eval(const Generator& gen, double t) const;  // sum_k b_k phi(t - k), closed form
};

DualGenerator dual_generator(const Generator& gen, int k_max, int n_quad = 1025);

// max over |j| <= j_max of |<phi(. - j), phi_tilde> - delta_{j0}|, by grid quadrature
double biorthogonality_residual(const Generator& gen, const DualGenerator& dual, int j_max);

// K(x, y) = sum_k phi(x - k) phi_tilde(y - k)
GridFunction si_reproducing_kernel(const Generator& gen, const DualGenerator& dual, double x, const Grid& out_grid);

// coefficients integral of u * phi(. - k), then synthesis with the dual generator
KernelSection si_functional_kernel(const Generator& gen, const DualGenerator& dual, const AverageFunctional& u,
                                   const Grid& out_grid, int n_sub = kDefaultSubdivisions);

// integral of u * phi(. - k) on the local rule of u, split at the kinks of phi(. - k)
double si_coefficient(const Generator& gen, const AverageFunctional& u, int k, int n_sub = kDefaultSubdivisions);

struct DensityReport {
  int size = 0;
  int rank = 0;
  double min_singular = 0.0;
  double max_singular = 0.0;
  bool rank_deficient = false;
  Eigen::VectorXd eigenvalues;
};

// g_alpha(xi) = sum_{|l| <= J} u_hat(xi + 2 pi l) conj(phi_hat(xi + 2 pi l)) on xi_grid
std::vector<GridFunction> density_functions(const Generator& gen, const std::vector<AverageFunctional>& u_family,
                                            const Grid& xi_grid, int n_sub = kDefaultSubdivisions);
DensityReport density_diagnostic(const Generator& gen, const std::vector<AverageFunctional>& u_family,
                                 const Grid& xi_grid, int n_sub = kDefaultSubdivisions);

// max over |k| <= k_range of |time-side coefficient - frequency-side coefficient|.
// `level` doubles J and the local rule once per step.
double fourier_coefficient_identity_check(const Generator& gen, const AverageFunctional& u, int k_range,
                                          int level = 0);

}  // namespace opk
