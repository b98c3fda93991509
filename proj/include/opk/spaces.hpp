#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "opk/kernels.hpp"
#include "opk/paley_wiener.hpp"
#include "opk/shift_invariant.hpp"

namespace opk {

// A concrete kernel space: its functional family together with the kernel
// sections K(alpha) xi, realised on h_grid.
struct KernelSpace {
  std::string name;
  FamilyPtr family;
  int dim_y = 1;
  Grid h_grid;
  std::function<KernelSection(const Index&, const CVec&)> section;
  nlohmann::json config;

  KernelSection operator()(const Index& a, const CVec& xi) const { return section(a, xi); }
  std::vector<KernelSection> sections(const std::vector<Index>& alphas) const;  // xi = e_q for every q
};

// <a, b>_H: on W when both carry feature coordinates, otherwise grid quadrature
cplx h_inner(const KernelSection& a, const KernelSection& b);
double h_norm(const KernelSection& a);

// L2([0, 2 pi]) with the orthonormal Fourier coefficients; K(j) = e^{ij.} / sqrt(2 pi)
KernelSpace fourier_space(int grid_n = 257);
// B_pi with local-average functionals of width delta centred on real locations
KernelSpace pw_average_space(double delta, Profile p, int m_range, int w_n = kDefaultWPoints,
                             int points_per_unit = 16);
// B_pi with point evaluations (sinc kernel)
KernelSpace pw_point_space(int m_range, int w_n = kDefaultWPoints, int points_per_unit = 16);
// B_pi(C^n) with indices (x, v) and functionals <f(x), v>
KernelSpace pw_vector_space(int n, int m_range, int w_n = kDefaultWPoints, int points_per_unit = 16);

// V2(phi) with local-average functionals; sections are synthesised with the
// truncated dual generator on [-half_width, half_width]
struct SiSpaceData {
  Generator gen;
  DualGenerator dual;
  double delta = 0.25;
  Profile profile = Profile::Box;
};
KernelSpace si_average_space(const std::string& generator, int k_max, double delta, Profile p, double half_width,
                             int samples_per_unit = kDefaultSamplesPerUnit);
std::shared_ptr<const SiSpaceData> si_space_data(const KernelSpace& s);

// span{phi_1..phi_n} with the inherited L2 structure
KernelSpace finite_dim_space(std::vector<GridFunction> basis, FamilyPtr family);

// {"family": name, "params": {...}}; params.space == "pw" attaches the B_pi feature
std::shared_ptr<FunctionalFamily> family_from_json(const nlohmann::json& desc);
// {"space": "fourier" | "pw" | "pw_point" | "pw_vector" | "si", ...}
KernelSpace space_from_json(const nlohmann::json& cfg);

}  // namespace opk
