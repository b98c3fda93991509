#include "opk/frames.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace opk {

namespace {

bool all_have_features(const std::vector<KernelSection>& s) {
  if (s.empty()) return false;
  for (const auto& k : s)
    if (!k.w_repr || !k.w_repr->grid.same_as(s[0].w_repr->grid) || k.w_repr->dim != s[0].w_repr->dim) return false;
  return true;
}

void check_frame(const TruncatedFrame& f) {
  if (f.sections.empty()) throw ValidationError("frame needs at least one section");
  if (f.gram.matrix.rows() != static_cast<Eigen::Index>(f.sections.size()))
    throw ShapeError("frame Gram does not match the number of sections");
}

}  // namespace

TruncatedFrame make_frame(std::vector<KernelSection> sections) {
  if (sections.empty()) throw ValidationError("frame needs at least one section");
  for (std::size_t j = 1; j < sections.size(); ++j) require_compatible(sections[0].h_repr, sections[j].h_repr);
  TruncatedFrame f;
  if (all_have_features(sections)) {
    std::vector<GridFunction> feats;
    for (const auto& s : sections) feats.push_back(*s.w_repr);
    f.gram = feature_gram(feats);
    f.w_features = std::move(feats);
  } else {
    std::vector<GridFunction> hs;
    for (const auto& s : sections) hs.push_back(s.h_repr);
    f.gram = feature_gram(hs);
  }
  f.gram.indices.clear();
  for (const auto& s : sections) f.gram.indices.emplace_back(s.alpha, s.xi);
  f.sections = std::move(sections);
  return f;
}

GridFunction frame_operator_apply(const TruncatedFrame& frame, const GridFunction& f) {
  check_frame(frame);
  GridFunction out(frame.sections[0].h_repr.grid, frame.sections[0].h_repr.dim);
  require_compatible(out, f);
  for (const auto& s : frame.sections) out.add_scaled(inner_product(f, s.h_repr), s.h_repr);
  return out;
}

DualFrame dual_frame(std::shared_ptr<const TruncatedFrame> frame, double rel_cutoff) {
  check_frame(*frame);
  if (!(rel_cutoff > 0.0 && rel_cutoff < 1.0)) throw ValidationError("rel_cutoff must lie in (0, 1)");
  const ComplexMatrix& m = frame->gram.matrix;
  if (!(m.cwiseAbs().maxCoeff() > 0.0)) throw DegenerateFrameError("frame Gram is identically zero");
  DualFrame d;
  d.source = frame;
  d.rel_cutoff = rel_cutoff;
  d.coeffs = hermitian_pseudoinverse(m, rel_cutoff, &d.rank);
  if (d.rank == 0) throw DegenerateFrameError("every Gram eigenvalue falls below the cutoff");
  const int n = static_cast<int>(frame->sections.size());
  for (int j = 0; j < n; ++j) {
    GridFunction g(frame->sections[0].h_repr.grid, frame->sections[0].h_repr.dim);
    for (int k = 0; k < n; ++k) g.add_scaled(d.coeffs(j, k), frame->sections[k].h_repr);
    d.dual_sections.push_back(std::move(g));
  }
  if (frame->w_features) {
    const auto& w = *frame->w_features;
    std::vector<GridFunction> df;
    for (int j = 0; j < n; ++j) {
      GridFunction g(w[0].grid, w[0].dim);
      for (int k = 0; k < n; ++k) g.add_scaled(d.coeffs(j, k), w[k]);
      df.push_back(std::move(g));
    }
    d.dual_features = std::move(df);
  }
  return d;
}

DualFrame dual_frame(const TruncatedFrame& frame, double rel_cutoff) {
  return dual_frame(std::make_shared<const TruncatedFrame>(frame), rel_cutoff);
}

namespace {

void check_alignment(const DualFrame& dual, const SampleSet& samples) {
  const auto& secs = dual.source->sections;
  if (samples.entries.size() != secs.size()) {
    std::ostringstream os;
    os << "sample count " << samples.entries.size() << " does not match frame size " << secs.size();
    throw AlignmentError(os.str());
  }
  for (std::size_t j = 0; j < secs.size(); ++j) {
    if (!(samples.entries[j].alpha == secs[j].alpha))
      throw AlignmentError("sample " + std::to_string(j) + " has index " + samples.entries[j].alpha.label() +
                           ", frame expects " + secs[j].alpha.label());
    if (samples.entries[j].value.size() != 1) throw ShapeError("frame reconstruction expects scalar samples");
  }
}

GridFunction expand(const std::vector<GridFunction>& basis, const SampleSet& samples) {
  GridFunction out(basis[0].grid, basis[0].dim);
  for (std::size_t j = 0; j < basis.size(); ++j) out.add_scaled(samples.entries[j].value[0], basis[j]);
  return out;
}

}  // namespace

GridFunction reconstruct(const DualFrame& dual, const SampleSet& samples) {
  check_alignment(dual, samples);
  return expand(dual.dual_sections, samples);
}

GridFunction reconstruct_features(const DualFrame& dual, const SampleSet& samples) {
  check_alignment(dual, samples);
  if (!dual.dual_features) throw ValidationError("dual frame carries no feature representation");
  return expand(*dual.dual_features, samples);
}

FrameBounds frame_bounds_estimate(const TruncatedFrame& frame, double rel_cutoff) {
  check_frame(frame);
  const auto ed = hermitian_eig(frame.gram.matrix);
  const double top = ed.values.cwiseAbs().maxCoeff();
  FrameBounds b;
  b.A_est = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < ed.values.size(); ++k) {
    const double v = ed.values(k);
    if (top > 0.0 && v > rel_cutoff * top) {
      b.A_est = std::min(b.A_est, v);
      b.B_est = std::max(b.B_est, v);
      ++b.rank;
    }
  }
  if (b.rank == 0) b.A_est = 0.0;
  return b;
}

cplx dual_inner_product(const DualFrame& dual, const CVec& f_coeffs, const CVec& g_coeffs) {
  const Eigen::Index n = dual.coeffs.rows();
  if (static_cast<Eigen::Index>(f_coeffs.size()) != n || static_cast<Eigen::Index>(g_coeffs.size()) != n)
    throw ShapeError("coefficient arrays must match the frame size");
  const ComplexMatrix& m = dual.source->gram.matrix;
  // coefficients on the original sections: f = sum_k c_k K_k with c = P^T a
  const ComplexVector c = dual.coeffs.transpose() * to_eigen(f_coeffs);
  const ComplexVector e = dual.coeffs.transpose() * to_eigen(g_coeffs);
  // T K_k = sum_i M(k, i) K_i
  const ComplexVector tc = m.transpose() * c;
  return (tc.transpose() * m * e.conjugate())(0, 0);
}

ComplexMatrix biorthogonality_matrix(const DualFrame& dual) {
  const auto& secs = dual.source->sections;
  const Eigen::Index n = static_cast<Eigen::Index>(secs.size());
  ComplexMatrix b(n, n);
  const bool w = dual.dual_features && dual.source->w_features;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      b(j, k) = w ? inner_product((*dual.dual_features)[j], (*dual.source->w_features)[k])
                  : inner_product(dual.dual_sections[j], secs[k].h_repr);
  return b;
}

TruncatedFrame frame_of_dual(const DualFrame& dual) {
  std::vector<KernelSection> secs;
  for (std::size_t j = 0; j < dual.dual_sections.size(); ++j) {
    KernelSection s{dual.source->sections[j].alpha, dual.source->sections[j].xi, dual.dual_sections[j], std::nullopt};
    if (dual.dual_features) s.w_repr = (*dual.dual_features)[j];
    secs.push_back(std::move(s));
  }
  return make_frame(std::move(secs));
}

double interior_relative_error(const GridFunction& approx, const GridFunction& exact, double lo, double hi) {
  require_compatible(approx, exact);
  const Grid& g = exact.grid;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    if (x < lo - 1e-12 || x > hi + 1e-12) continue;
    // trapezoid weights on the sub-window
    const bool edge = (i == 0 || x - g.h() < lo - 1e-12) || (i == g.n - 1 || x + g.h() > hi + 1e-12);
    const double w = edge ? 0.5 : 1.0;
    for (int c = 0; c < exact.dim; ++c) {
      num += w * std::norm(approx.at(i, c) - exact.at(i, c));
      den += w * std::norm(exact.at(i, c));
    }
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

double boundary_coefficient_ratio(const SampleSet& samples, int edge) {
  const int n = static_cast<int>(samples.entries.size());
  double top = 0.0, bnd = 0.0;
  for (int j = 0; j < n; ++j) {
    const double v = y_norm(samples.entries[j].value);
    top = std::max(top, v);
    if (j < edge || j >= n - edge) bnd = std::max(bnd, v);
  }
  return top > 0.0 ? bnd / top : 0.0;
}

}  // namespace opk
