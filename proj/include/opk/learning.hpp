#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "opk/frames.hpp"
#include "opk/kernels.hpp"
#include "opk/spaces.hpp"

namespace opk {

// Regularization network data. Sections are K(alpha_k) e_q flattened as
// k * dim_y + q; gram_L((j, p), (k, q)) = [L_{alpha_j}(K(alpha_k) e_q)]_p.
struct LearningProblem {
  std::vector<Index> alphas;
  std::vector<KernelSection> sections;
  FamilyPtr family;
  int dim_y = 1;
  ComplexMatrix gram_L;
  SampleSet samples;
  double lambda = 1.0;

  int size() const { return static_cast<int>(alphas.size()); }
  ComplexVector xi() const;  // samples flattened like the sections
};

LearningProblem make_problem(std::vector<KernelSection> sections, FamilyPtr family, const SampleSet& samples,
                             double lambda, int dim_y = 1);
LearningProblem make_problem(const KernelSpace& space, const SampleSet& samples, double lambda);

struct RepresenterSolution {
  std::vector<CVec> eta;
  ComplexVector eta_flat;
  GridFunction f0;                     // sum_k K(alpha_k) eta_k on the section grid
  std::optional<GridFunction> f0_w;    // the same element in feature coordinates
  double residual = 0.0;               // ||(G + lambda) eta - xi||
};

// sum_k K(alpha_k) eta_k for flattened coefficients
GridFunction synthesize_span(const std::vector<KernelSection>& sections, const ComplexVector& eta);
std::optional<GridFunction> synthesize_span_features(const std::vector<KernelSection>& sections,
                                                     const ComplexVector& eta);

RepresenterSolution regnet_solve(const LearningProblem& problem);

// sum_j ||L_j(f) - xi_j||^2 + lambda ||f||^2 with quadrature functionals and the grid norm
double objective_value(const LearningProblem& problem, const GridFunction& f);
// the same objective for f = sum_k K(alpha_k) eta_k: ||G eta - xi||^2 + lambda eta* G eta
double objective_value(const LearningProblem& problem, const ComplexVector& eta);

struct InterpolationResult {
  SampleSet residual;       // L_j(f0) - xi_j
  double max_residual = 0.0;
  RepresenterSolution solution;
};
InterpolationResult interpolation_limit(const LearningProblem& problem);

SampleSet sampling_operator(const FunctionalFamily& family, const std::vector<Index>& indices, const GridFunction& f);

// Loss Q on the predictions p = G eta. gradient returns 2 dQ / d conj(p).
struct ReducedLoss {
  std::function<double(const ComplexVector& p, const ComplexVector& xi)> value;
  std::function<ComplexVector(const ComplexVector& p, const ComplexVector& xi)> gradient;
};
ReducedLoss squared_loss();

struct MinimizeOptions {
  int max_iter = 100000;
  double tol = 1e-12;  // stop once the step direction is below tol * ||xi||
  std::function<void(ComplexVector&)> project;  // optional projection onto a convex set of coefficients
};
struct MinimizeResult {
  ComplexVector eta;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Q(G eta, xi) + lambda eta* G eta minimised over the span by gradient steps
// in the H metric with Armijo backtracking.
MinimizeResult reduced_space_minimize(const LearningProblem& problem, const ReducedLoss& loss,
                                      const MinimizeOptions& opts = {},
                                      const std::optional<ComplexVector>& start = std::nullopt);

struct StabilityReport {
  std::vector<int> sizes;
  std::vector<double> max_ratio;  // per size
  double c_emp = 0.0;
  double bound = 0.0;             // pass threshold (0 when the rule has no bound)
  double A_est = 0.0;
  double B_est = 0.0;
  int trials = 0;
  bool pass = false;
  bool empirical = true;          // sampled subsets only, never a certificate
};

// ||sum_{j in S} L_j(f) dual_j|| / ||f|| over random f in the span and random S
StabilityReport truncated_reconstruction_stability(const TruncatedFrame& frame, const DualFrame& dual, int trials,
                                                   const std::vector<int>& subset_sizes, std::uint64_t seed);

// Tikhonov minimiser on the given index list: f0 = sum K(alpha_j) eta_j, (G + lambda) eta = xi
GridFunction tikhonov_operator_apply(const FunctionalFamily& family, const std::vector<Index>& indices, double lambda,
                                     const SampleSet& samples, const std::vector<KernelSection>& sections);

// ||A_lambda(I_S f)|| / ||f|| over nested random subsets; pass iff the global
// maximum stays within twice the maximum at the largest size
StabilityReport stability_sweep(const TruncatedFrame& frame, double lambda, int trials, std::uint64_t seed,
                                const std::vector<int>& sizes = {4, 8, 16});
StabilityReport stability_sweep(const KernelSpace& space, const std::vector<Index>& superset, double lambda,
                                int trials, std::uint64_t seed, const std::vector<int>& sizes = {4, 8, 16});

// adds circular complex Gaussian noise of standard deviation sigma to every sample value
SampleSet add_noise(const SampleSet& s, double sigma, std::uint64_t seed);

}  // namespace opk
