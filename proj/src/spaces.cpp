#include "opk/spaces.hpp"

#include <cmath>

namespace opk {

namespace {

KernelSection scaled(KernelSection s, const CVec& xi) {
  if (xi.size() != 1) throw ShapeError("scalar space expects a one-component xi");
  s.h_repr *= xi[0];
  if (s.w_repr) *s.w_repr *= xi[0];
  s.xi = xi;
  return s;
}

}  // namespace

std::vector<KernelSection> KernelSpace::sections(const std::vector<Index>& alphas) const {
  std::vector<KernelSection> out;
  out.reserve(alphas.size() * dim_y);
  for (const auto& a : alphas)
    for (int q = 0; q < dim_y; ++q) out.push_back(section(a, unit_vector(dim_y, q)));
  return out;
}

cplx h_inner(const KernelSection& a, const KernelSection& b) {
  if (a.w_repr && b.w_repr) return inner_product(*a.w_repr, *b.w_repr);
  return inner_product(a.h_repr, b.h_repr);
}

double h_norm(const KernelSection& a) { return std::sqrt(std::max(0.0, h_inner(a, a).real())); }

KernelSpace fourier_space(int grid_n) {
  if (grid_n < 3) throw ValidationError("Fourier grid needs at least 3 points");
  KernelSpace s;
  s.name = "fourier";
  s.family = fourier_family();
  s.h_grid = Grid(0.0, kTwoPi, grid_n);
  s.config = {{"space", "fourier"}, {"grid_n", grid_n}};
  const Grid g = s.h_grid;
  s.section = [g](const Index& a, const CVec& xi) {
    if (a.kind != Index::Kind::Integer) throw DomainError("Fourier sections need integer indices");
    if (xi.size() != 1) throw ShapeError("Fourier space has a scalar output space");
    GridFunction h(g, 1);
    const double inv = 1.0 / std::sqrt(kTwoPi);
    for (int i = 0; i < g.n; ++i) h.at(i) = xi[0] * std::polar(inv, static_cast<double>(a.k) * g.x(i));
    return KernelSection{a, xi, std::move(h), std::nullopt};
  };
  return s;
}

KernelSpace pw_average_space(double delta, Profile p, int m_range, int w_n, int ppu) {
  if (m_range < 0) throw ValidationError("m_range must be >= 0");
  KernelSpace s;
  s.name = "pw";
  auto fam = average_family(delta, p);
  const Grid w = default_w_grid(w_n);
  fam->set_feature(std::make_shared<FeatureMap>(pw_average_feature_map(delta, p, w)));
  s.family = fam;
  s.h_grid = pw_window_grid(m_range, ppu);
  s.config = {{"space", "pw"}, {"delta", delta}, {"profile", profile_name(p)}, {"m", m_range},
              {"w_n", w_n}, {"ppu", ppu}};
  const Grid g = s.h_grid;
  s.section = [=](const Index& a, const CVec& xi) {
    if (a.kind == Index::Kind::RealVector) throw DomainError("average sections need a scalar center");
    return scaled(pw_kernel_section(AverageFunctional(a.position(), delta, p), g, w), xi);
  };
  return s;
}

KernelSpace pw_point_space(int m_range, int w_n, int ppu) {
  KernelSpace s;
  s.name = "pw_point";
  auto fam = point_family();
  const Grid w = default_w_grid(w_n);
  fam->set_feature(std::make_shared<FeatureMap>(pw_point_feature_map(w)));
  s.family = fam;
  s.h_grid = pw_window_grid(m_range, ppu);
  s.config = {{"space", "pw_point"}, {"m", m_range}, {"w_n", w_n}, {"ppu", ppu}};
  const Grid g = s.h_grid;
  s.section = [=](const Index& a, const CVec& xi) {
    if (a.kind == Index::Kind::RealVector) throw DomainError("point sections need a scalar location");
    return scaled(pw_point_section(a.position(), g, w), xi);
  };
  return s;
}

KernelSpace pw_vector_space(int n, int m_range, int w_n, int ppu) {
  if (n < 1) throw ValidationError("vector dimension must be >= 1");
  KernelSpace s;
  s.name = "pw_vector";
  auto fam = point_inner_family();
  const Grid w = default_w_grid(w_n);
  auto psi = std::make_shared<FeatureMap>(pw_vector_feature_map(w, n));
  fam->set_feature(psi);
  s.family = fam;
  s.h_grid = pw_window_grid(m_range, ppu);
  s.config = {{"space", "pw_vector"}, {"n", n}, {"m", m_range}, {"w_n", w_n}, {"ppu", ppu}};
  const Grid g = s.h_grid;
  // same as kernel_from_features with the point feature, synthesised in one pass
  s.section = [=](const Index& a, const CVec& xi) {
    GridFunction f = (*psi)(a, xi);
    GridFunction h = pw_synthesize(f, g);
    return KernelSection{a, xi, std::move(h), std::move(f)};
  };
  return s;
}

namespace {

// keeps the generator data reachable from the space
class SiFamily : public FunctionalFamily {
 public:
  SiFamily(std::shared_ptr<const SiSpaceData> d) : data_(std::move(d)), avg_(average_family(data_->delta, data_->profile)) {}
  std::string name() const override { return "average"; }
  nlohmann::json params() const override { return avg_->params(); }
  void check_index(const Index& a) const override { avg_->check_index(a); }
  CVec apply(const Index& a, const GridFunction& f) const override { return avg_->apply(a, f); }
  std::shared_ptr<const SiSpaceData> data() const { return data_; }

 private:
  std::shared_ptr<const SiSpaceData> data_;
  FamilyPtr avg_;
};

}  // namespace

KernelSpace si_average_space(const std::string& generator, int k_max, double delta, Profile p, double half_width,
                             int spu) {
  auto data = std::make_shared<SiSpaceData>();
  data->gen = make_generator(generator, spu);
  data->dual = dual_generator(data->gen, k_max);
  data->delta = delta;
  data->profile = p;
  KernelSpace s;
  s.name = "si";
  s.family = std::make_shared<SiFamily>(data);
  const int n = static_cast<int>(std::lround(2.0 * half_width * spu)) + 1;
  s.h_grid = Grid(-half_width, half_width, n);
  s.config = {{"space", "si"}, {"generator", generator}, {"k_max", k_max}, {"delta", delta},
              {"profile", profile_name(p)}, {"half_width", half_width}, {"samples_per_unit", spu}};
  const Grid g = s.h_grid;
  std::shared_ptr<const SiSpaceData> cd = data;
  s.section = [cd, g](const Index& a, const CVec& xi) {
    if (a.kind == Index::Kind::RealVector) throw DomainError("average sections need a scalar center");
    const AverageFunctional u(a.position(), cd->delta, cd->profile);
    return scaled(si_functional_kernel(cd->gen, cd->dual, u, g), xi);
  };
  return s;
}

std::shared_ptr<const SiSpaceData> si_space_data(const KernelSpace& s) {
  auto fam = std::dynamic_pointer_cast<const SiFamily>(s.family);
  if (!fam) throw ValidationError("not a shift-invariant space");
  return fam->data();
}

KernelSpace finite_dim_space(std::vector<GridFunction> basis, FamilyPtr family) {
  if (basis.empty()) throw ValidationError("finite-dimensional space needs a basis");
  KernelSpace s;
  s.name = "finite_dim";
  s.family = family;
  s.dim_y = basis.front().dim;
  s.h_grid = basis.front().grid;
  s.config = {{"space", "finite_dim"}, {"size", basis.size()}};
  auto k = std::make_shared<FiniteDimKernel>(std::move(basis), family);
  s.section = [k](const Index& a, const CVec& xi) { return k->section(a, xi); };
  return s;
}

std::shared_ptr<FunctionalFamily> family_from_json(const nlohmann::json& desc) {
  const std::string name = desc.at("family").get<std::string>();
  const nlohmann::json params = desc.value("params", nlohmann::json::object());
  const bool pw = params.value("space", std::string()) == "pw";
  const Grid w = default_w_grid(params.value("w_n", kDefaultWPoints));
  if (name == "fourier") return fourier_family();
  if (name == "average") {
    const double delta = params.value("delta", 0.2);
    const Profile p = parse_profile(params.value("profile", std::string("box")));
    auto fam = average_family(delta, p, params.value("refine", kDefaultRefine));
    if (pw) fam->set_feature(std::make_shared<FeatureMap>(pw_average_feature_map(delta, p, w)));
    return fam;
  }
  if (name == "point") {
    auto fam = point_family();
    if (pw) fam->set_feature(std::make_shared<FeatureMap>(pw_point_feature_map(w, params.value("dim", 1))));
    return fam;
  }
  if (name == "point_inner") {
    auto fam = point_inner_family();
    if (pw) fam->set_feature(std::make_shared<FeatureMap>(pw_vector_feature_map(w, params.value("dim", 1))));
    return fam;
  }
  throw ValidationError("unknown functional family '" + name + "'");
}

KernelSpace space_from_json(const nlohmann::json& c) {
  const std::string kind = c.value("space", std::string("fourier"));
  const int w_n = c.value("w_n", kDefaultWPoints);
  const int ppu = c.value("ppu", 16);
  if (kind == "fourier") return fourier_space(c.value("grid_n", 257));
  if (kind == "pw")
    return pw_average_space(c.value("delta", 0.2), parse_profile(c.value("profile", std::string("box"))),
                            c.value("m", 16), w_n, ppu);
  if (kind == "pw_point") return pw_point_space(c.value("m", 16), w_n, ppu);
  if (kind == "pw_vector") return pw_vector_space(c.value("n", 2), c.value("m", 16), w_n, ppu);
  if (kind == "si")
    return si_average_space(c.value("generator", std::string("hat")), c.value("k_max", 20), c.value("delta", 0.25),
                            parse_profile(c.value("profile", std::string("box"))), c.value("half_width", 30.0),
                            c.value("samples_per_unit", kDefaultSamplesPerUnit));
  throw ValidationError("unknown space '" + kind + "'");
}

}  // namespace opk
