#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "opk/core.hpp"
#include "opk/kernels.hpp"

namespace opk {

inline constexpr int kDefaultWPoints = 1025;
inline constexpr int kDefaultRefine = 8;
inline constexpr int kDefaultSubdivisions = 512;
inline constexpr int kWindowPad = 16;

double sinc(double t);  // sin(pi t) / (pi t)
double sinc_kernel(double x, double y);

// f(x) = sum_k coeffs_k sinc(x - k), k in [-m, m]; coefficients stored
// component-major: component c, shift k at c*(2m+1) + (k+m).
struct BandlimitedSignal {
  int m = 0;
  CVec coeffs;
  Grid window;
  int dim = 1;

  CVec value(double x) const;
  cplx coeff(int k, int c = 0) const { return coeffs[static_cast<std::size_t>(c) * (2 * m + 1) + (k + m)]; }
};

GridFunction synthesize(const BandlimitedSignal& signal, const Grid& grid);
BandlimitedSignal random_bandlimited(int m, const Grid& window, Rng& rng, int dim = 1);

enum class Profile { Box, Triangle, RaisedCosine };
Profile parse_profile(const std::string& name);
std::string profile_name(Profile p);

// Nonnegative unit-mass weight supported in [center - delta, center + delta].
struct AverageFunctional {
  double center = 0.0;
  double delta = 0.1;
  Profile profile = Profile::Box;

  AverageFunctional() = default;
  AverageFunctional(double center, double delta, Profile p = Profile::Box);
  double lo() const { return center - delta; }
  double hi() const { return center + delta; }
  double weight(double t) const;
};

// Nodes and weights (trapezoid weight times profile value) over the support,
// split at the center and at any extra break points inside the support.
struct LocalRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
LocalRule local_rule(const AverageFunctional& u, int n_sub = kDefaultSubdivisions,
                     const std::vector<double>& breaks = {});

// integral of f * u with f piecewise-linear on its grid; every grid cell met
// by the support is subdivided `refine` times
CVec average_sample(const GridFunction& f, const AverageFunctional& u, int refine = kDefaultRefine);
// the same integral for a pointwise-evaluable f, on local_rule(u, n_sub)
CVec average_sample_fn(const std::function<CVec(double)>& f, const AverageFunctional& u,
                       int n_sub = kDefaultSubdivisions);

// u_check(t) = (1/2pi) * integral of u(s) e^{ist} ds
cplx u_check(const AverageFunctional& u, double t, int n_sub = kDefaultSubdivisions);
GridFunction u_check_grid(const AverageFunctional& u, const Grid& t_grid, int n_sub = kDefaultSubdivisions);

Grid default_w_grid(int n = kDefaultWPoints);
void require_pw_grid(const Grid& w_grid);  // throws DomainError unless the grid spans [-pi, pi]
Grid pw_window_grid(int m_range, int points_per_unit = 16);

// feature of the average functional: sqrt(2 pi) * u_check restricted to [-pi, pi]
GridFunction psi_feature(const AverageFunctional& u, const Grid& w_grid, int n_sub = kDefaultSubdivisions);
// feature of point evaluation at y: e^{iyt} / sqrt(2 pi)
GridFunction phi_point(double y, const Grid& w_grid);

// K(x)(y) = integral over [-pi, pi] of e^{-iyt} u_check(t) dt; carries Psi(x) as w_repr
KernelSection pw_kernel_section(const AverageFunctional& u, const Grid& out_grid, const Grid& w_grid,
                                int n_sub = kDefaultSubdivisions);
// sinc section at x through the point feature
KernelSection pw_point_section(double x, const Grid& out_grid, const Grid& w_grid);

// an element of B_pi given by its W coordinates F: f(y) = <F, Phi_point(y)>_W
CVec pw_evaluate(const GridFunction& F, double y);
GridFunction pw_synthesize(const GridFunction& F, const Grid& out_grid);
// W coordinates of sum_k c_k sinc(. - k)
GridFunction pw_feature_of_signal(const BandlimitedSignal& s, const Grid& w_grid);

FeatureMap pw_point_feature_map(const Grid& w_grid, int dim = 1);
FeatureMap pw_average_feature_map(double delta, Profile p, const Grid& w_grid, int n_sub = kDefaultSubdivisions);
// Phi(x, xi) = e^{ix.} xi / sqrt(2 pi) in L2([-pi, pi], C^n), scalar output space
FeatureMap pw_vector_feature_map(const Grid& w_grid, int n);

std::shared_ptr<FunctionalFamily> average_family(double delta, Profile p = Profile::Box, int refine = kDefaultRefine);

struct KadecBounds {
  double A = 0.0;
  double B = 0.0;
};
KadecBounds kadec_bounds(double delta);

struct KadecCheck {
  bool pass = false;
  double margin = 0.0;
};
KadecCheck generalized_kadec_check(double A, double B, double delta);

struct SeparationReport {
  bool pass = false;
  double min_gap = 0.0;
  double max_deviation = 0.0;
  double perturbed_alpha = 0.0;  // alpha - 2 delta
  double perturbed_L = 0.0;      // L + delta
};
// x[i] is compared with (j0 + i) * eps; j0 defaults to centring the list on 0
SeparationReport separation_frame_check(const std::vector<double>& x, double alpha_sep, double L, double eps,
                                        double delta, std::optional<long long> j0 = std::nullopt);

struct ShiftedAverageReport {
  bool pass = false;
  double min_abs = 0.0;
};
ShiftedAverageReport shifted_average_frame_check(const GridFunction& u, double c_floor, int n_fine = 2049);

// Spot check over perturbations t_j in [x_j - delta, x_j + delta]: random
// draws plus the two extreme shifts. Reports Gram eigenvalue extremes of the
// exponentials e^{i t_j .} / sqrt(2 pi) in W. Refutes, never certifies.
struct PerturbationSpotCheck {
  int draws = 0;
  double min_lower = 0.0;
  double max_upper = 0.0;
  bool pass = false;
};
PerturbationSpotCheck perturbation_spot_check(const std::vector<double>& x, double delta, int random_draws,
                                              std::uint64_t seed, const Grid& w_grid);

struct VectorSamplingSet {
  int n = 1;
  int m_range = 0;
  std::vector<double> x;  // position (m + m_range) * n + l
  ComplexMatrix U;        // unitary, columns eta_l

  std::size_t size() const { return x.size(); }
  int l_of(std::size_t j) const { return static_cast<int>(j % n); }
  int m_of(std::size_t j) const { return static_cast<int>(j / n) - m_range; }
  CVec xi(std::size_t j) const;
};

ComplexMatrix dft_unitary(int n);
VectorSamplingSet build_vector_sampling_set(int n, int m_range,
                                            const std::function<std::vector<double>(int)>& perturb = nullptr,
                                            const std::optional<ComplexMatrix>& U = std::nullopt);
std::vector<GridFunction> vector_sampling_features(const VectorSamplingSet& set, const Grid& w_grid);

}  // namespace opk
