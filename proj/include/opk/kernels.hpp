#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "opk/core.hpp"

namespace opk {

// Index of a functional: an integer (Fourier coefficient, basis index), a
// real location (point or local average) or a location paired with a
// direction in the output space.
struct Index {
  enum class Kind { Integer, Real, RealVector };
  Kind kind = Kind::Integer;
  long long k = 0;
  double x = 0.0;
  CVec v;

  static Index integer(long long k);
  static Index real(double x);
  static Index pair(double x, CVec v);

  double position() const { return kind == Kind::Integer ? static_cast<double>(k) : x; }
  std::string label() const;
  bool operator==(const Index& o) const;
};

CVec unit_vector(int dim, int l);
cplx y_inner(const CVec& a, const CVec& b);  // standard inner product on C^n
double y_norm(const CVec& a);

// Phi(alpha) xi as an element of the discretised feature space W.
struct FeatureMap {
  Grid w_grid;
  int w_dim = 1;  // components of W-valued grid functions
  int dim_y = 1;
  std::function<GridFunction(const Index&, const CVec&)> evaluate;

  GridFunction operator()(const Index& a, const CVec& xi) const { return evaluate(a, xi); }
};

struct KernelSection {
  Index alpha;
  CVec xi;
  GridFunction h_repr;
  // Psi(alpha) xi in W when the section came from a feature representation
  std::optional<GridFunction> w_repr;
};

struct SampleEntry {
  Index alpha;
  CVec value;
};

struct SampleSet {
  nlohmann::json family;
  std::vector<SampleEntry> entries;
};

class FunctionalFamily {
 public:
  virtual ~FunctionalFamily() = default;
  virtual std::string name() const = 0;
  virtual nlohmann::json params() const { return nlohmann::json::object(); }
  nlohmann::json descriptor() const { return {{"family", name()}, {"params", params()}}; }

  // L_alpha(f), a vector in Y
  virtual CVec apply(const Index& alpha, const GridFunction& f) const = 0;
  // L_alpha(K) for a kernel section. When both the family and the section
  // carry the feature representation this is <w_repr, Psi(alpha) e_l>_W.
  virtual CVec apply_section(const Index& alpha, const KernelSection& s) const;
  virtual void check_index(const Index& alpha) const;

  void set_feature(std::shared_ptr<const FeatureMap> psi) { feature_ = std::move(psi); }
  const FeatureMap* feature() const { return feature_.get(); }

 protected:
  std::shared_ptr<const FeatureMap> feature_;
};

using FamilyPtr = std::shared_ptr<const FunctionalFamily>;

// L_j(f) = integral of f(x) e^{-ijx} / sqrt(2 pi) over the grid of f
std::shared_ptr<FunctionalFamily> fourier_family();
// L_x(f) = f(x), piecewise-linear between grid nodes
std::shared_ptr<FunctionalFamily> point_family();
// L_(x, xi)(f) = <f(x), xi>
std::shared_ptr<FunctionalFamily> point_inner_family();
// L_j(f) = integral of f * weights[j]
std::shared_ptr<FunctionalFamily> integral_family(std::vector<GridFunction> weights);

KernelSection kernel_from_features(const FeatureMap& phi, const FeatureMap& psi, const Index& alpha, const CVec& xi,
                                   const Grid& h_grid);

struct GramMatrix {
  ComplexMatrix matrix;
  std::vector<std::pair<Index, CVec>> indices;
  double asymmetry = 0.0;  // ||M - M*|| / ||M|| before symmetrisation
};

// table[j][k] = L_{alphas[k]}(K_j); the feature of each alpha is built once
std::vector<std::vector<CVec>> functional_table(const std::vector<KernelSection>& sections,
                                                const std::vector<Index>& alphas, const FunctionalFamily& functionals);

GramMatrix gram(const std::vector<KernelSection>& sections, const FunctionalFamily& functionals);
// Gram of W-side features: M[j][k] = <F_j, F_k>_W
GramMatrix feature_gram(const std::vector<GridFunction>& features);

struct PsdReport {
  double min_eig = 0.0;
  double max_eig = 0.0;
  bool pass = false;
};

PsdReport psd_check(const ComplexMatrix& m);
PsdReport psd_check(const GramMatrix& g);

// Kernel of span{phi_1..phi_n} with the inherited L2 inner product.
class FiniteDimKernel {
 public:
  FiniteDimKernel(std::vector<GridFunction> basis, FamilyPtr functionals);
  KernelSection section(const Index& alpha, const CVec& xi) const;
  const ComplexMatrix& basis_gram() const { return a_; }
  const std::vector<GridFunction>& basis() const { return basis_; }

 private:
  std::vector<GridFunction> basis_;
  FamilyPtr family_;
  ComplexMatrix a_;  // a_(j, k) = <phi_k, phi_j>
  ComplexMatrix b_;  // inverse of a_
};

KernelSection finite_dim_kernel(const std::vector<GridFunction>& basis, FamilyPtr functionals, const Index& alpha,
                                const CVec& xi);

// K(alpha)(x) = 2 pi * integral of e^{-ixt} varphi(t) u_check(t) dt, where
// u_check(t) = (1/2pi) * integral of u_alpha(s) e^{ist} ds.
KernelSection translation_invariant_section(const GridFunction& varphi, const GridFunction& u_alpha,
                                            const Grid& out_grid);

struct IntegralPsdReport {
  bool pass = true;
  int trials = 0;
  double worst_real = 0.0;  // min over draws of Re Q / ||u||_1^2
  double worst_imag = 0.0;  // max over draws of |Im Q| / ||u||_1^2
};

IntegralPsdReport integral_kernel_psd_test(const std::function<cplx(double, double)>& kappa,
                                           const std::vector<GridFunction>& u_family, int trials,
                                           std::uint64_t seed = 1);

}  // namespace opk
