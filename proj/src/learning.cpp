#include "opk/learning.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace opk {

ComplexVector LearningProblem::xi() const {
  ComplexVector v(static_cast<Eigen::Index>(alphas.size()) * dim_y);
  for (std::size_t j = 0; j < alphas.size(); ++j)
    for (int p = 0; p < dim_y; ++p) v(j * dim_y + p) = samples.entries[j].value[p];
  return v;
}

LearningProblem make_problem(std::vector<KernelSection> sections, FamilyPtr family, const SampleSet& samples,
                             double lambda, int dim_y) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be positive");
  if (!family) throw ValidationError("learning problem needs a functional family");
  if (dim_y < 1) throw ValidationError("dim_y must be >= 1");
  const std::size_t m = samples.entries.size();
  if (m == 0) throw ValidationError("learning problem needs at least one sample");
  if (sections.size() != m * dim_y) throw AlignmentError("expected one section per sample and output direction");
  LearningProblem p;
  p.family = std::move(family);
  p.dim_y = dim_y;
  p.samples = samples;
  p.lambda = lambda;
  for (std::size_t j = 0; j < m; ++j) {
    const auto& e = samples.entries[j];
    if (static_cast<int>(e.value.size()) != dim_y) throw ShapeError("sample value has the wrong dimension");
    for (int q = 0; q < dim_y; ++q)
      if (!(sections[j * dim_y + q].alpha == e.alpha))
        throw AlignmentError("section " + std::to_string(j * dim_y + q) + " does not match sample index " +
                             e.alpha.label());
    p.family->check_index(e.alpha);
    p.alphas.push_back(e.alpha);
  }
  const auto table = functional_table(sections, p.alphas, *p.family);
  const Eigen::Index n = static_cast<Eigen::Index>(m) * dim_y;
  p.gram_L.resize(n, n);
  for (std::size_t j = 0; j < m; ++j)
    for (int pp = 0; pp < dim_y; ++pp)
      for (Eigen::Index s = 0; s < n; ++s) p.gram_L(j * dim_y + pp, s) = table[s][j][pp];
  const double asym = hermitian_defect(p.gram_L);
  if (asym > 1e-6) {
    std::ostringstream os;
    os << "sampled Gram is not Hermitian (defect " << asym << ")";
    throw KernelConsistencyError(os.str(), asym);
  }
  p.gram_L = 0.5 * (p.gram_L + p.gram_L.adjoint()).eval();
  const PsdReport psd = psd_check(p.gram_L);
  if (!psd.pass) throw KernelConsistencyError("sampled Gram is not positive semidefinite", psd.min_eig);
  p.sections = std::move(sections);
  return p;
}

LearningProblem make_problem(const KernelSpace& space, const SampleSet& samples, double lambda) {
  std::vector<Index> alphas;
  for (const auto& e : samples.entries) alphas.push_back(e.alpha);
  return make_problem(space.sections(alphas), space.family, samples, lambda, space.dim_y);
}

GridFunction synthesize_span(const std::vector<KernelSection>& sections, const ComplexVector& eta) {
  if (sections.empty() || static_cast<Eigen::Index>(sections.size()) != eta.size())
    throw ShapeError("coefficient count does not match the sections");
  GridFunction f(sections[0].h_repr.grid, sections[0].h_repr.dim);
  for (std::size_t k = 0; k < sections.size(); ++k) f.add_scaled(eta(k), sections[k].h_repr);
  return f;
}

std::optional<GridFunction> synthesize_span_features(const std::vector<KernelSection>& sections,
                                                     const ComplexVector& eta) {
  for (const auto& s : sections)
    if (!s.w_repr) return std::nullopt;
  GridFunction f(sections[0].w_repr->grid, sections[0].w_repr->dim);
  for (std::size_t k = 0; k < sections.size(); ++k) f.add_scaled(eta(k), *sections[k].w_repr);
  return f;
}

namespace {

RepresenterSolution solve_with(const LearningProblem& p, double lambda) {
  const ComplexVector xi = p.xi();
  const Eigen::Index n = xi.size();
  const ComplexMatrix a = p.gram_L + lambda * ComplexMatrix::Identity(n, n);
  RepresenterSolution s;
  s.eta_flat = solve_hermitian(a, xi);
  s.residual = (a * s.eta_flat - xi).norm();
  for (int j = 0; j < p.size(); ++j) {
    CVec e(p.dim_y);
    for (int q = 0; q < p.dim_y; ++q) e[q] = s.eta_flat(j * p.dim_y + q);
    s.eta.push_back(std::move(e));
  }
  s.f0 = synthesize_span(p.sections, s.eta_flat);
  s.f0_w = synthesize_span_features(p.sections, s.eta_flat);
  return s;
}

}  // namespace

RepresenterSolution regnet_solve(const LearningProblem& problem) { return solve_with(problem, problem.lambda); }

double objective_value(const LearningProblem& p, const GridFunction& f) {
  double q = 0.0;
  for (int j = 0; j < p.size(); ++j) {
    const CVec v = p.family->apply(p.alphas[j], f);
    for (int c = 0; c < p.dim_y; ++c) q += std::norm(v[c] - p.samples.entries[j].value[c]);
  }
  const double nf = norm(f);
  return q + p.lambda * nf * nf;
}

double objective_value(const LearningProblem& p, const ComplexVector& eta) {
  if (eta.size() != p.gram_L.rows()) throw ShapeError("coefficient vector has the wrong size");
  const ComplexVector ge = p.gram_L * eta;
  return (ge - p.xi()).squaredNorm() + p.lambda * eta.dot(ge).real();
}

InterpolationResult interpolation_limit(const LearningProblem& p) {
  const EigenDecomposition ed = hermitian_eig(p.gram_L);
  const double lo = ed.values(0), hi = ed.values(ed.values.size() - 1);
  if (!(lo > 1e-8 * hi)) {
    std::ostringstream os;
    os << "sampled Gram is singular for interpolation (min eig " << lo << ", max eig " << hi << ")";
    throw ConditioningError(os.str(), lo, hi);
  }
  InterpolationResult r;
  r.solution = solve_with(p, 1e-12);
  const ComplexVector res = p.gram_L * r.solution.eta_flat - p.xi();
  r.residual.family = p.samples.family;
  for (int j = 0; j < p.size(); ++j) {
    SampleEntry e{p.alphas[j], CVec(p.dim_y)};
    for (int q = 0; q < p.dim_y; ++q) e.value[q] = res(j * p.dim_y + q);
    r.max_residual = std::max(r.max_residual, y_norm(e.value));
    r.residual.entries.push_back(std::move(e));
  }
  return r;
}

SampleSet sampling_operator(const FunctionalFamily& family, const std::vector<Index>& indices, const GridFunction& f) {
  SampleSet s;
  s.family = family.descriptor();
  for (const auto& a : indices) {
    family.check_index(a);
    s.entries.push_back({a, family.apply(a, f)});
  }
  return s;
}

ReducedLoss squared_loss() {
  return {[](const ComplexVector& p, const ComplexVector& xi) { return (p - xi).squaredNorm(); },
          [](const ComplexVector& p, const ComplexVector& xi) { return ComplexVector(2.0 * (p - xi)); }};
}

MinimizeResult reduced_space_minimize(const LearningProblem& p, const ReducedLoss& loss, const MinimizeOptions& opts,
                                      const std::optional<ComplexVector>& start) {
  const ComplexMatrix& g = p.gram_L;
  const ComplexVector xi = p.xi();
  const double scale = std::max(xi.norm(), 1e-300);
  auto objective = [&](const ComplexVector& eta, ComplexVector& pred) {
    pred = g * eta;
    return loss.value(pred, xi) + p.lambda * eta.dot(pred).real();
  };
  MinimizeResult r;
  r.eta = start ? *start : ComplexVector::Zero(xi.size());
  if (opts.project) opts.project(r.eta);
  ComplexVector pred;
  double j = objective(r.eta, pred);
  // 1 / (2 (trace + lambda)) is a safe first step for the quadratic part
  const double t_init = 1.0 / std::max(2.0 * (g.diagonal().real().sum() + p.lambda), 1e-300);
  double t = t_init;
  for (r.iterations = 0; r.iterations < opts.max_iter; ++r.iterations) {
    // H-metric gradient of the span element
    const ComplexVector d = loss.gradient(pred, xi) + 2.0 * p.lambda * r.eta;
    if (d.norm() <= opts.tol * scale) {
      r.converged = true;
      break;
    }
    const double slope = d.dot(g * d).real();
    ComplexVector trial, tpred;
    double jt = 0.0;
    bool ok = false;
    t = std::max(2.0 * t, t_init);
    const double resolution = 1e-13 * std::max(std::abs(j), 1e-300);
    for (int back = 0; back < 60 && !ok; ++back) {
      trial = r.eta - t * d;
      if (opts.project) opts.project(trial);
      jt = objective(trial, tpred);
      // once the predicted decrease is below what J resolves, judge the step by the gradient
      if (t * slope >= resolution)
        ok = jt <= j - 1e-4 * t * slope;
      else
        ok = (loss.gradient(tpred, xi) + 2.0 * p.lambda * trial).norm() < d.norm();
      if (!ok) t *= 0.5;
    }
    if (!ok) {
      r.converged = true;  // stalled at roundoff
      break;
    }
    r.eta = std::move(trial);
    pred = std::move(tpred);
    j = jt;
  }
  r.objective = j;
  return r;
}

namespace {

ComplexVector random_span(Rng& rng, int n) {
  ComplexVector c(n);
  for (int k = 0; k < n; ++k) c(k) = rng.complex_gaussian(1.0);
  return c;
}

// c^T M conj(c) for f = sum c_k K_k with M(j, k) = <K_j, K_k>
double span_norm(const ComplexMatrix& m, const ComplexVector& c) {
  return std::sqrt(std::max(0.0, (c.transpose() * m * c.conjugate())(0).real()));
}

void check_sizes(const std::vector<int>& sizes, int n) {
  if (sizes.empty()) throw ValidationError("need at least one subset size");
  for (int s : sizes)
    if (s < 1 || s > n) throw ValidationError("subset size " + std::to_string(s) + " outside [1, frame size]");
}

}  // namespace

StabilityReport truncated_reconstruction_stability(const TruncatedFrame& frame, const DualFrame& dual, int trials,
                                                   const std::vector<int>& subset_sizes, std::uint64_t seed) {
  const ComplexMatrix& m = frame.gram.matrix;
  const int n = static_cast<int>(m.rows());
  if (dual.coeffs.rows() != n) throw AlignmentError("dual frame does not belong to this frame");
  if (trials < 1) throw ValidationError("trials must be >= 1");
  check_sizes(subset_sizes, n);
  const FrameBounds fb = frame_bounds_estimate(frame, dual.rel_cutoff);
  StabilityReport r;
  r.sizes = subset_sizes;
  r.max_ratio.assign(subset_sizes.size(), 0.0);
  r.A_est = fb.A_est;
  r.B_est = fb.B_est;
  r.trials = trials;
  r.bound = fb.B_est / fb.A_est * 1.1;
  const ComplexMatrix pt = dual.coeffs.transpose();
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    const ComplexVector c = random_span(rng, n);
    const double nf = span_norm(m, c);
    if (!(nf > 0.0)) continue;
    const ComplexVector samples = m.transpose() * c;  // <f, K_j>
    const std::vector<int> perm = rng.permutation(n);
    for (std::size_t si = 0; si < subset_sizes.size(); ++si) {
      ComplexVector s = ComplexVector::Zero(n);
      for (int i = 0; i < subset_sizes[si]; ++i) s(perm[i]) = samples(perm[i]);
      const double ratio = span_norm(m, pt * s) / nf;
      r.max_ratio[si] = std::max(r.max_ratio[si], ratio);
    }
  }
  r.c_emp = *std::max_element(r.max_ratio.begin(), r.max_ratio.end());
  r.pass = r.c_emp <= r.bound;
  return r;
}

GridFunction tikhonov_operator_apply(const FunctionalFamily& family, const std::vector<Index>& indices, double lambda,
                                     const SampleSet& samples, const std::vector<KernelSection>& sections) {
  if (indices.size() != samples.entries.size()) throw AlignmentError("index list and samples differ in length");
  for (std::size_t j = 0; j < indices.size(); ++j)
    if (!(indices[j] == samples.entries[j].alpha)) throw AlignmentError("samples do not follow the index list");
  const int dim_y = samples.entries.empty() ? 1 : static_cast<int>(samples.entries[0].value.size());
  // non-owning handle; the problem does not outlive this call
  FamilyPtr fam(std::shared_ptr<const FunctionalFamily>(), &family);
  return regnet_solve(make_problem(sections, fam, samples, lambda, dim_y)).f0;
}

StabilityReport stability_sweep(const TruncatedFrame& frame, double lambda, int trials, std::uint64_t seed,
                                const std::vector<int>& sizes) {
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
  if (trials < 1) throw ValidationError("trials must be >= 1");
  const ComplexMatrix& m = frame.gram.matrix;
  const int n = static_cast<int>(m.rows());
  check_sizes(sizes, n);
  StabilityReport r;
  r.sizes = sizes;
  r.max_ratio.assign(sizes.size(), 0.0);
  r.trials = trials;
  const FrameBounds fb = frame_bounds_estimate(frame);
  r.A_est = fb.A_est;
  r.B_est = fb.B_est;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    const ComplexVector c = random_span(rng, n);
    const double nf = span_norm(m, c);
    if (!(nf > 0.0)) continue;
    const ComplexVector samples = m.transpose() * c;
    const std::vector<int> perm = rng.permutation(n);
    for (std::size_t si = 0; si < sizes.size(); ++si) {
      const int s = sizes[si];
      ComplexMatrix ms(s, s);
      ComplexVector xs(s);
      for (int a = 0; a < s; ++a) {
        xs(a) = samples(perm[a]);
        for (int b = 0; b < s; ++b) ms(a, b) = m(perm[a], perm[b]);
      }
      const ComplexMatrix gs = ms.transpose();  // L_j(K_k) = <K_k, K_j>
      const ComplexVector eta = solve_hermitian(gs + lambda * ComplexMatrix::Identity(s, s), xs);
      const double ratio = span_norm(ms, eta) / nf;
      r.max_ratio[si] = std::max(r.max_ratio[si], ratio);
    }
  }
  r.c_emp = *std::max_element(r.max_ratio.begin(), r.max_ratio.end());
  const std::size_t largest = std::max_element(sizes.begin(), sizes.end()) - sizes.begin();
  r.bound = 2.0 * r.max_ratio[largest];
  r.pass = std::isfinite(r.c_emp) && r.c_emp <= r.bound;
  return r;
}

StabilityReport stability_sweep(const KernelSpace& space, const std::vector<Index>& superset, double lambda,
                                int trials, std::uint64_t seed, const std::vector<int>& sizes) {
  if (space.dim_y != 1) throw ValidationError("stability sweep expects a scalar output space");
  return stability_sweep(make_frame(space.sections(superset)), lambda, trials, seed, sizes);
}

SampleSet add_noise(const SampleSet& s, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ValidationError("noise sigma must be >= 0");
  Rng rng(seed);
  SampleSet out = s;
  for (auto& e : out.entries)
    for (auto& v : e.value) v += rng.complex_gaussian(sigma);
  return out;
}

}  // namespace opk
