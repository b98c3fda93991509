#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "opk/core.hpp"
#include "opk/kernels.hpp"

namespace opk {

inline constexpr double kDefaultPinvCutoff = 1e-10;

// gram.matrix(j, k) = <K_j, K_k>_H. With feature representations on every
// section the H inner product is evaluated in W.
struct TruncatedFrame {
  std::vector<KernelSection> sections;
  GramMatrix gram;
  std::optional<std::vector<GridFunction>> w_features;
};

TruncatedFrame make_frame(std::vector<KernelSection> sections);

GridFunction frame_operator_apply(const TruncatedFrame& frame, const GridFunction& f);

// dual_sections[j] = sum_k coeffs(j, k) K_k with coeffs the Gram pseudoinverse
struct DualFrame {
  std::vector<GridFunction> dual_sections;
  std::optional<std::vector<GridFunction>> dual_features;
  std::shared_ptr<const TruncatedFrame> source;
  double rel_cutoff = kDefaultPinvCutoff;
  int rank = 0;
  ComplexMatrix coeffs;
};

DualFrame dual_frame(std::shared_ptr<const TruncatedFrame> frame, double rel_cutoff = kDefaultPinvCutoff);
DualFrame dual_frame(const TruncatedFrame& frame, double rel_cutoff = kDefaultPinvCutoff);

// sum_j value_j * dual_j; samples must follow the frame's index order
GridFunction reconstruct(const DualFrame& dual, const SampleSet& samples);
// the same expansion on the W side (needs dual features)
GridFunction reconstruct_features(const DualFrame& dual, const SampleSet& samples);

struct FrameBounds {
  double A_est = 0.0;
  double B_est = 0.0;
  int rank = 0;
};
FrameBounds frame_bounds_estimate(const TruncatedFrame& frame, double rel_cutoff = kDefaultPinvCutoff);

// <T f, g>_H for f = sum a_j dual_j and g = sum b_j dual_j
cplx dual_inner_product(const DualFrame& dual, const CVec& f_coeffs, const CVec& g_coeffs);

// B(j, k) = <dual_j, K_k>_H evaluated directly from the stored functions
ComplexMatrix biorthogonality_matrix(const DualFrame& dual);

// frame built from the dual family itself
TruncatedFrame frame_of_dual(const DualFrame& dual);

double interior_relative_error(const GridFunction& approx, const GridFunction& exact, double lo, double hi);
// largest |value| among the `edge` outermost samples on each side, relative to the largest |value|
double boundary_coefficient_ratio(const SampleSet& samples, int edge = 2);

}  // namespace opk
