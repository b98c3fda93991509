#include "opk/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "opk/frames.hpp"
#include "opk/io.hpp"
#include "opk/learning.hpp"
#include "opk/paley_wiener.hpp"
#include "opk/shift_invariant.hpp"
#include "opk/spaces.hpp"

namespace opk {

namespace {

namespace fs = std::filesystem;

struct Param {
  std::string key;
  std::string flag;
  json def;
  std::string help;
};

struct Command {
  std::string name;
  std::string help;
  std::vector<Param> params;
  std::function<void(const json& cfg, const fs::path& out, std::ostream& log)> run;
};

json convert(const Param& p, const std::string& raw) {
  try {
    if (p.def.is_number_integer()) {
      std::size_t pos = 0;
      const long long v = std::stoll(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument(raw);
      return v;
    }
    if (p.def.is_number()) {
      std::size_t pos = 0;
      const double v = std::stod(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument(raw);
      return v;
    }
  } catch (const std::logic_error&) {
    throw ValidationError("--" + p.flag + " expects a number, got '" + raw + "'");
  }
  return raw;
}

// "-2..2" or "0,1.5,3"
std::vector<double> parse_indices(const std::string& s, bool* all_integer) {
  std::vector<double> out;
  *all_integer = true;
  const auto dots = s.find("..");
  try {
    if (dots != std::string::npos) {
      const long long a = std::stoll(s.substr(0, dots)), b = std::stoll(s.substr(dots + 2));
      if (b < a) throw ValidationError("index range '" + s + "' is empty");
      if (b - a > 100000) throw ValidationError("index range '" + s + "' is too long");
      for (long long k = a; k <= b; ++k) out.push_back(static_cast<double>(k));
      return out;
    }
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      if (tok.find_first_of(".eE") != std::string::npos) *all_integer = false;
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    }
  } catch (const std::logic_error&) {
    throw ValidationError("cannot parse index list '" + s + "'");
  }
  if (out.empty()) throw ValidationError("index list is empty");
  return out;
}

std::vector<Index> make_indices(const std::vector<double>& v, bool integer) {
  std::vector<Index> out;
  for (double x : v) out.push_back(integer ? Index::integer(static_cast<long long>(x)) : Index::real(x));
  return out;
}

std::vector<std::string> labels_of(const std::vector<KernelSection>& s) {
  std::vector<std::string> l;
  for (const auto& k : s) l.push_back(k.alpha.label());
  return l;
}

void write_csv(const fs::path& p, const std::function<void(std::ostream&)>& body) {
  std::ostringstream os;
  body(os);
  write_text_file(p.string(), os.str());
}

int geti(const json& c, const char* k) { return c.at(k).get<int>(); }
double getd(const json& c, const char* k) { return c.at(k).get<double>(); }
std::string gets(const json& c, const char* k) { return c.at(k).get<std::string>(); }

void require_positive(const json& c, const char* k) {
  if (!(c.at(k).get<double>() > 0.0)) throw ValidationError(std::string(k) + " must be positive");
}

// space for gram / psd / regnet, keyed by the functional family name
KernelSpace space_for_family(const json& c) {
  const std::string fam = gets(c, "family");
  if (fam == "fourier") return fourier_space(geti(c, "grid_n"));
  if (fam == "average") return pw_average_space(getd(c, "delta"), parse_profile(gets(c, "profile")), geti(c, "m"));
  if (fam == "point") return pw_point_space(geti(c, "m"));
  if (fam == "si")
    return si_average_space(gets(c, "generator"), geti(c, "k_max"), getd(c, "delta"), parse_profile(gets(c, "profile")),
                            getd(c, "window"));
  throw ValidationError("unknown family '" + fam + "' (expected fourier, average, point or si)");
}

std::vector<Index> space_indices(const json& c) {
  bool integer = false;
  const auto v = parse_indices(gets(c, "indices"), &integer);
  if (gets(c, "family") == "fourier") {
    if (!integer) throw ValidationError("Fourier indices must be integers");
    return make_indices(v, true);
  }
  return make_indices(v, false);
}

std::vector<Param> space_params(const std::string& default_family, const std::string& default_indices) {
  return {{"family", "family", default_family, "functional family: fourier, average, point or si"},
          {"indices", "indices", default_indices, "index range a..b or comma list"},
          {"grid_n", "grid-n", 257, "grid points for the Fourier space"},
          {"delta", "delta", 0.2, "half-width of the averaging profile"},
          {"profile", "profile", "box", "averaging profile: box, triangle or raised_cosine"},
          {"m", "m", 16, "half-range of the sampling set (sets the time window)"},
          {"generator", "generator", "hat", "shift-invariant generator: box, hat or cubic"},
          {"k_max", "k-max", 20, "dual generator truncation"},
          {"window", "window", 30.0, "half-width of the shift-invariant grid"}};
}

void cmd_gram(const json& c, const fs::path& out, std::ostream& log) {
  const KernelSpace space = space_for_family(c);
  const auto sections = space.sections(space_indices(c));
  const GramMatrix g = gram(sections, *space.family);
  const PsdReport psd = psd_check(g);
  write_csv(out / "gram.csv", [&](std::ostream& os) { write_matrix_csv(os, g.matrix, labels_of(sections)); });
  const json rep = {{"size", sections.size()}, {"asymmetry", g.asymmetry}, {"min_eig", psd.min_eig},
                    {"max_eig", psd.max_eig}, {"psd", psd.pass}};
  write_json_file((out / "gram.json").string(), rep);
  log << rep.dump() << "\n";
}

void cmd_psd(const json& c, const fs::path& out, std::ostream& log) {
  const KernelSpace space = space_for_family(c);
  const auto sections = space.sections(space_indices(c));
  const GramMatrix g = gram(sections, *space.family);
  const auto ed = hermitian_eig(g.matrix);
  const PsdReport psd = psd_check(g);
  write_csv(out / "eigenvalues.csv", [&](std::ostream& os) {
    std::vector<std::vector<double>> rows;
    for (Eigen::Index k = 0; k < ed.values.size(); ++k) rows.push_back({static_cast<double>(k), ed.values(k)});
    write_table_csv(os, {"k", "eigenvalue"}, rows);
  });
  const json rep = {{"min_eig", psd.min_eig}, {"max_eig", psd.max_eig}, {"pass", psd.pass}, {"asymmetry", g.asymmetry}};
  write_json_file((out / "psd.json").string(), rep);
  log << rep.dump() << "\n";
}

BandlimitedSignal load_or_draw_signal(const json& c, const Grid& window) {
  const std::string path = gets(c, "signal");
  if (!path.empty()) return signal_from_json(read_json_file(path));
  Rng rng(derive_seed(c.at("seed").get<std::uint64_t>(), 1));
  return random_bandlimited(geti(c, "signal_m"), window, rng);
}

void cmd_reconstruct(const json& c, const fs::path& out, std::ostream& log) {
  const std::string kind = gets(c, "space");
  const int m = geti(c, "m");
  if (m < 0) throw ValidationError("m must be >= 0");
  json rep;
  GridFunction recon, exact;
  SampleSet samples;
  std::vector<KernelSection> sections;
  double lo = 0.0, hi = 0.0;
  if (kind == "pw") {
    require_positive(c, "delta");
    const KernelSpace space = pw_average_space(getd(c, "delta"), parse_profile(gets(c, "profile")), m, kDefaultWPoints,
                                                geti(c, "ppu"));
    std::vector<Index> idx;
    for (int j = -m; j <= m; ++j) idx.push_back(Index::real(j));
    sections = space.sections(idx);
    const BandlimitedSignal sig = load_or_draw_signal(c, space.h_grid);
    samples.family = space.family->descriptor();
    for (const auto& a : idx)
      samples.entries.push_back(
          {a, average_sample_fn([&](double t) { return sig.value(t); },
                                AverageFunctional(a.x, getd(c, "delta"), parse_profile(gets(c, "profile"))))});
    exact = synthesize(sig, space.h_grid);
    hi = getd(c, "window");
    lo = -hi;
  } else if (kind == "fourier") {
    const KernelSpace space = fourier_space(geti(c, "grid_n"));
    std::vector<Index> idx;
    for (int j = -m; j <= m; ++j) idx.push_back(Index::integer(j));
    sections = space.sections(idx);
    Rng rng(derive_seed(c.at("seed").get<std::uint64_t>(), 1));
    const int km = std::min(geti(c, "signal_m"), m);
    exact = GridFunction(space.h_grid, 1);
    for (int k = -km; k <= km; ++k) exact.add_scaled(rng.complex_gaussian(1.0), space.section(Index::integer(k), {1.0}).h_repr);
    samples = sampling_operator(*space.family, idx, exact);
    lo = space.h_grid.a;
    hi = space.h_grid.b;
  } else {
    throw ValidationError("unknown space '" + kind + "' (expected pw or fourier)");
  }
  auto frame = std::make_shared<const TruncatedFrame>(make_frame(sections));
  const DualFrame dual = dual_frame(frame);
  recon = reconstruct(dual, samples);
  const FrameBounds fb = frame_bounds_estimate(*frame);
  rep = {{"space", kind}, {"size", sections.size()}, {"rank", dual.rank}, {"A_est", fb.A_est}, {"B_est", fb.B_est},
         {"interior_relative_error", interior_relative_error(recon, exact, lo, hi)}, {"interior", {lo, hi}}};
  write_csv(out / "reconstruction.csv", [&](std::ostream& os) { write_grid_function_csv(os, recon); });
  write_json_file((out / "samples.json").string(), sample_set_to_json(samples));
  write_json_file((out / "summary.json").string(), rep);
  log << rep.dump() << "\n";
}

void cmd_avg_sample(const json& c, const fs::path& out, std::ostream& log) {
  require_positive(c, "delta");
  bool integer = false;
  const auto centers = parse_indices(gets(c, "indices"), &integer);
  const BandlimitedSignal sig = load_or_draw_signal(c, pw_window_grid(geti(c, "signal_m")));
  const Profile p = parse_profile(gets(c, "profile"));
  SampleSet s;
  s.family = average_family(getd(c, "delta"), p)->descriptor();
  std::vector<std::vector<double>> rows;
  for (double x : centers) {
    const CVec v = average_sample_fn([&](double t) { return sig.value(t); }, AverageFunctional(x, getd(c, "delta"), p),
                                     geti(c, "n_sub"));
    s.entries.push_back({Index::real(x), v});
    rows.push_back({x, v[0].real(), v[0].imag()});
  }
  write_csv(out / "samples.csv", [&](std::ostream& os) { write_table_csv(os, {"x", "re", "im"}, rows); });
  write_json_file((out / "samples.json").string(), sample_set_to_json(s));
  write_json_file((out / "signal.json").string(), signal_to_json(sig));
  log << json{{"samples", s.entries.size()}}.dump() << "\n";
}

void cmd_regnet(const json& c, const fs::path& out, std::ostream& log) {
  json cfg = c;
  std::optional<ProblemSpec> spec;
  if (!gets(c, "problem").empty()) {
    spec = problem_spec_from_json(read_json_file(gets(c, "problem")));
    const json& fam = spec->family;
    cfg["family"] = fam.at("family");
    const json params = fam.value("params", json::object());
    for (const char* k : {"delta", "profile", "m", "grid_n", "generator", "k_max", "window"})
      if (params.contains(k)) cfg[k] = params[k];
    cfg["lambda"] = spec->lambda;
  }
  require_positive(cfg, "lambda");
  const KernelSpace space = space_for_family(cfg);
  std::vector<Index> idx = spec ? spec->indices : space_indices(cfg);
  SampleSet samples;
  if (spec && spec->samples) {
    samples = *spec->samples;
  } else {
    // data generated from a random element of the sampled span
    const auto secs = space.sections(idx);
    samples.family = space.family->descriptor();
    for (const auto& a : idx) samples.entries.push_back({a, CVec(space.dim_y)});
    // exact samples through the Gram: L_j(sum c_k K_k) = sum_k c_k L_j(K_k)
    Rng rng(derive_seed(cfg.at("seed").get<std::uint64_t>(), 2));
    ComplexVector coef(secs.size());
    for (std::size_t k = 0; k < secs.size(); ++k) coef(k) = rng.complex_gaussian(1.0);
    const auto table = functional_table(secs, idx, *space.family);
    for (std::size_t j = 0; j < idx.size(); ++j)
      for (std::size_t k = 0; k < secs.size(); ++k)
        for (int p = 0; p < space.dim_y; ++p) samples.entries[j].value[p] += coef(k) * table[k][j][p];
  }
  const double sigma = spec && spec->noise_sigma ? *spec->noise_sigma : getd(cfg, "noise");
  const std::uint64_t nseed = spec && spec->noise_sigma ? spec->noise_seed : derive_seed(cfg.at("seed").get<std::uint64_t>(), 3);
  if (sigma > 0.0) samples = add_noise(samples, sigma, nseed);
  const LearningProblem prob = make_problem(space, samples, getd(cfg, "lambda"));
  const RepresenterSolution sol = regnet_solve(prob);
  const json rep = {{"objective", objective_value(prob, sol.eta_flat)}, {"residual", sol.residual},
                    {"lambda", prob.lambda}, {"size", prob.size()}};
  write_csv(out / "eta.csv", [&](std::ostream& os) {
    std::vector<std::vector<double>> rows;
    for (int k = 0; k < prob.size(); ++k)
      rows.push_back({prob.alphas[k].position(), sol.eta_flat(k).real(), sol.eta_flat(k).imag()});
    write_table_csv(os, {"index", "re", "im"}, rows);
  });
  write_csv(out / "f0.csv", [&](std::ostream& os) { write_grid_function_csv(os, sol.f0); });
  ProblemSpec resolved;
  resolved.family = {{"family", gets(cfg, "family")}, {"params", json::object()}};
  for (const char* k : {"delta", "profile", "m", "grid_n", "generator", "k_max", "window"}) resolved.family["params"][k] = cfg[k];
  resolved.indices = idx;
  resolved.lambda = prob.lambda;
  resolved.samples = samples;
  write_json_file((out / "problem.json").string(), problem_spec_to_json(resolved));
  write_json_file((out / "regnet.json").string(), rep);
  log << rep.dump() << "\n";
}

void cmd_kadec(const json& c, const fs::path& out, std::ostream& log) {
  const double delta = getd(c, "delta");
  const KadecCheck chk = generalized_kadec_check(getd(c, "A"), getd(c, "B"), delta);
  json rep;
  if (delta >= 0.0 && delta < 0.25) {
    rep = kadec_to_json(kadec_bounds(delta), chk);
  } else {
    rep = {{"A", nullptr}, {"B", nullptr}, {"pass", chk.pass}, {"margin", chk.margin}};
  }
  rep["delta"] = delta;
  write_json_file((out / "kadec.json").string(), rep);
  log << rep.dump() << "\n";
}

void cmd_si(const json& c, const fs::path& out, std::ostream& log) {
  require_positive(c, "delta");
  const Generator gen = make_generator(gets(c, "generator"), geti(c, "samples_per_unit"));
  const DualGenerator dual = dual_generator(gen, geti(c, "k_max"));
  const Profile p = parse_profile(gets(c, "profile"));
  bool integer = false;
  std::vector<AverageFunctional> us;
  for (double x : parse_indices(gets(c, "indices"), &integer)) us.emplace_back(x, getd(c, "delta"), p);
  const Grid xg(-kPi, kPi, 257);
  std::vector<double> xi(xg.n);
  for (int i = 0; i < xg.n; ++i) xi[i] = xg.x(i);
  const BracketValues br = bracket_function(gen, xi);
  const DensityReport dr = density_diagnostic(gen, us, xg);
  const double id0 = fourier_coefficient_identity_check(gen, us.front(), geti(c, "k_range"), 0);
  const double id1 = fourier_coefficient_identity_check(gen, us.front(), geti(c, "k_range"), 1);
  const json rep = {{"generator", gen.name()},
                    {"biorthogonality_residual", biorthogonality_residual(gen, dual, geti(c, "j_max"))},
                    {"bracket_min", *std::min_element(br.values.begin(), br.values.end())},
                    {"bracket_max", *std::max_element(br.values.begin(), br.values.end())},
                    {"bracket_tail", br.tail_estimate},
                    {"identity_deviation", {id0, id1}},
                    {"density", {{"size", dr.size}, {"rank", dr.rank}, {"min_singular", dr.min_singular},
                                 {"max_singular", dr.max_singular}, {"rank_deficient", dr.rank_deficient},
                                 {"empirical", true}}}};
  write_csv(out / "bracket.csv", [&](std::ostream& os) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < xg.n; ++i) rows.push_back({xi[i], br.values[i]});
    write_table_csv(os, {"xi", "bracket"}, rows);
  });
  write_csv(out / "dual_coefficients.csv", [&](std::ostream& os) {
    std::vector<std::vector<double>> rows;
    for (int k = -dual.k_max; k <= dual.k_max; ++k) rows.push_back({double(k), dual.coeff(k).real(), dual.coeff(k).imag()});
    write_table_csv(os, {"k", "re", "im"}, rows);
  });
  write_json_file((out / "si.json").string(), rep);
  log << rep.dump() << "\n";
}

std::vector<int> parse_sizes(const std::string& s) {
  bool integer = false;
  std::vector<int> out;
  for (double v : parse_indices(s, &integer)) out.push_back(static_cast<int>(v));
  if (!integer) throw ValidationError("subset sizes must be integers");
  return out;
}

void cmd_stability(const json& c, const fs::path& out, std::ostream& log) {
  require_positive(c, "lambda");
  const int trials = geti(c, "trials");
  if (trials < 1) throw ValidationError("trials must be >= 1");
  const std::string kind = gets(c, "space");
  const int m = geti(c, "m");
  KernelSpace space;
  std::vector<Index> idx;
  if (kind == "pw") {
    require_positive(c, "delta");
    space = pw_average_space(getd(c, "delta"), parse_profile(gets(c, "profile")), m);
    for (int j = -m; j <= m; ++j) idx.push_back(Index::real(j));
  } else if (kind == "fourier") {
    space = fourier_space(geti(c, "grid_n"));
    for (int j = -m; j <= m; ++j) idx.push_back(Index::integer(j));
  } else {
    throw ValidationError("unknown space '" + kind + "' (expected pw or fourier)");
  }
  const std::vector<int> sizes = parse_sizes(gets(c, "sizes"));
  const std::uint64_t seed = c.at("seed").get<std::uint64_t>();
  auto frame = std::make_shared<const TruncatedFrame>(make_frame(space.sections(idx)));
  const DualFrame dual = dual_frame(frame);
  const StabilityReport tr = truncated_reconstruction_stability(*frame, dual, trials, sizes, seed);
  const StabilityReport tk = stability_sweep(*frame, getd(c, "lambda"), trials, derive_seed(seed, 7), sizes);
  write_csv(out / "stability.csv", [&](std::ostream& os) {
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < sizes.size(); ++k) rows.push_back({double(sizes[k]), tr.max_ratio[k], tk.max_ratio[k]});
    write_table_csv(os, {"size", "truncated_max_ratio", "tikhonov_max_ratio"}, rows);
  });
  const json rep = {{"A_est", tr.A_est}, {"B_est", tr.B_est},
                    {"truncated", {{"c_emp", tr.c_emp}, {"bound", tr.bound}, {"pass", tr.pass}}},
                    {"tikhonov", {{"c_emp", tk.c_emp}, {"bound", tk.bound}, {"pass", tk.pass}}},
                    {"empirical", true}};
  write_json_file((out / "stability.json").string(), rep);
  log << rep.dump() << "\n";
}

void cmd_vector_sampling(const json& c, const fs::path& out, std::ostream& log) {
  const int n = geti(c, "n"), m = geti(c, "m");
  const double amp = getd(c, "perturb");
  if (!(amp >= 0.0)) throw ValidationError("perturb must be >= 0");
  Rng rng(derive_seed(c.at("seed").get<std::uint64_t>(), 4));
  std::function<std::vector<double>(int)> pert;
  if (amp > 0.0)
    pert = [&](int) {
      std::vector<double> v(n);
      for (auto& x : v) x = rng.uniform(-amp, amp);
      return v;
    };
  const VectorSamplingSet set = build_vector_sampling_set(n, m, pert);
  const GramMatrix g = feature_gram(vector_sampling_features(set, default_w_grid(geti(c, "w_n"))));
  double off = 0.0, top = 0.0;
  for (std::size_t a = 0; a < set.size(); ++a)
    for (std::size_t b = 0; b < set.size(); ++b) {
      const double v = std::abs(g.matrix(a, b));
      top = std::max(top, v);
      if (set.l_of(a) != set.l_of(b)) off = std::max(off, v);
    }
  const PsdReport psd = psd_check(g);
  const json rep = {{"size", set.size()}, {"max_offblock", off}, {"max_abs", top}, {"min_eig", psd.min_eig},
                    {"max_eig", psd.max_eig}};
  write_json_file((out / "sampling_set.json").string(), vector_sampling_set_to_json(set));
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < set.size(); ++j) labels.push_back(std::to_string(set.m_of(j)) + ":" + std::to_string(set.l_of(j)));
  write_csv(out / "gram.csv", [&](std::ostream& os) { write_matrix_csv(os, g.matrix, labels); });
  write_json_file((out / "vector_sampling.json").string(), rep);
  log << rep.dump() << "\n";
}

std::vector<Command> commands() {
  std::vector<Command> cs;
  cs.push_back({"gram", "Gram matrix of kernel sections", space_params("fourier", "-2..2"), cmd_gram});
  cs.push_back({"psd", "eigenvalue check of a Gram matrix", space_params("fourier", "-2..2"), cmd_psd});
  cs.push_back({"reconstruct",
                "dual-frame reconstruction from samples",
                {{"space", "space", "pw", "pw (local averages in B_pi) or fourier"},
                 {"delta", "delta", 0.2, "averaging half-width"},
                 {"profile", "profile", "box", "averaging profile"},
                 {"m", "m", 16, "sampling set -m..m"},
                 {"signal", "signal", "", "signal JSON; drawn at random when empty"},
                 {"signal_m", "signal-m", 8, "coefficient range of the random signal"},
                 {"window", "window", 8.0, "half-width of the error window"},
                 {"ppu", "ppu", 16, "time-grid points per unit"},
                 {"grid_n", "grid-n", 257, "grid points for the Fourier space"}},
                cmd_reconstruct});
  cs.push_back({"avg-sample",
                "local-average samples of a bandlimited signal",
                {{"delta", "delta", 0.2, "averaging half-width"},
                 {"profile", "profile", "box", "averaging profile"},
                 {"indices", "indices", "-8..8", "sample centres"},
                 {"signal", "signal", "", "signal JSON; drawn at random when empty"},
                 {"signal_m", "signal-m", 8, "coefficient range of the random signal"},
                 {"n_sub", "n-sub", kDefaultSubdivisions, "quadrature sub-intervals per support"}},
                cmd_avg_sample});
  {
    auto ps = space_params("fourier", "-2..2");
    ps.push_back({"lambda", "lambda", 0.1, "regularization weight"});
    ps.push_back({"noise", "noise", 0.0, "complex Gaussian noise level added to generated samples"});
    ps.push_back({"problem", "problem", "", "problem JSON (family, indices, lambda, samples, noise)"});
    cs.push_back({"regnet", "regularization network solve", ps, cmd_regnet});
  }
  cs.push_back({"kadec",
                "perturbed-exponential frame bounds",
                {{"delta", "delta", 0.1, "maximal perturbation"},
                 {"A", "A", kTwoPi, "lower frame bound of the unperturbed family"},
                 {"B", "B", kTwoPi, "upper frame bound of the unperturbed family"}},
                cmd_kadec});
  cs.push_back({"si-diagnose",
                "shift-invariant space diagnostics",
                {{"generator", "generator", "hat", "box, hat or cubic"},
                 {"k_max", "k-max", 20, "dual generator truncation"},
                 {"delta", "delta", 0.25, "averaging half-width"},
                 {"profile", "profile", "box", "averaging profile"},
                 {"indices", "indices", "-4..4", "average centres for the density diagnostic"},
                 {"j_max", "j-max", 5, "shifts checked for biorthogonality"},
                 {"k_range", "k-range", 3, "coefficients checked in the identity"},
                 {"samples_per_unit", "samples-per-unit", kDefaultSamplesPerUnit, "generator grid density"}},
                cmd_si});
  cs.push_back({"stability",
                "truncated and Tikhonov reconstruction stability sweep",
                {{"space", "space", "pw", "pw or fourier"},
                 {"delta", "delta", 0.1, "averaging half-width"},
                 {"profile", "profile", "box", "averaging profile"},
                 {"m", "m", 16, "index superset -m..m"},
                 {"lambda", "lambda", 0.1, "Tikhonov weight"},
                 {"trials", "trials", 200, "random trials"},
                 {"sizes", "sizes", "4,8,16", "subset sizes"},
                 {"grid_n", "grid-n", 257, "grid points for the Fourier space"}},
                cmd_stability});
  cs.push_back({"vector-sampling",
                "vector-valued sampling set and its Gram structure",
                {{"n", "n", 2, "output dimension"},
                 {"m", "m", 16, "shift range"},
                 {"perturb", "perturb", 0.0, "largest random position offset"},
                 {"w_n", "grid-n", kDefaultWPoints, "feature grid points"}},
                cmd_vector_sampling});
  for (auto& c : cs) c.params.push_back({"seed", "seed", 1, "master seed"});
  return cs;
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& cls, const std::string& msg) {
  err << json{{"error", kind}, {"class", cls}, {"message", msg}}.dump() << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const std::vector<Command> cs = commands();
  CLI::App app{"opk: operator reproducing kernel experiments"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, std::string> out_dir, config_path;
  std::map<std::string, CLI::App*> subs;
  for (const auto& c : cs) {
    CLI::App* s = app.add_subcommand(c.name, c.help);
    subs[c.name] = s;
    s->add_option("--out", out_dir[c.name], "output directory")->default_str("opk_out");
    s->add_option("--config", config_path[c.name], "JSON config or manifest; its values override flags");
    for (const auto& p : c.params) s->add_option("--" + p.flag, raw[c.name][p.key], p.help);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", "validation", e.what());
    return 2;
  }
  const Command* cmd = nullptr;
  for (const auto& c : cs)
    if (subs[c.name]->parsed()) cmd = &c;
  try {
    json cfg = json::object();
    for (const auto& p : cmd->params) {
      const CLI::Option* o = subs[cmd->name]->get_option("--" + p.flag);
      cfg[p.key] = o->count() ? convert(p, raw[cmd->name][p.key]) : p.def;
    }
    if (!config_path[cmd->name].empty()) {
      json file = read_json_file(config_path[cmd->name]);
      if (file.contains("config") && file["config"].is_object()) {
        if (file.value("command", cmd->name) != cmd->name)
          throw ValidationError("manifest belongs to '" + file.value("command", std::string()) + "'");
        file = file["config"];
      }
      if (!file.is_object()) throw ValidationError("config must be a JSON object");
      for (auto it = file.begin(); it != file.end(); ++it) {
        if (!cfg.contains(it.key())) throw ValidationError("unknown config key '" + it.key() + "'");
        const json& def = cfg[it.key()];
        const bool ok = (def.is_number() && it.value().is_number()) || (def.is_string() && it.value().is_string());
        if (!ok) throw ValidationError("config key '" + it.key() + "' has the wrong type");
        if (def.is_number_integer() && !it.value().is_number_integer())
          throw ValidationError("config key '" + it.key() + "' must be an integer");
        cfg[it.key()] = it.value();
      }
    }
    const fs::path dir = out_dir[cmd->name].empty() ? fs::path("opk_out") : fs::path(out_dir[cmd->name]);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory '" + dir.string() + "': " + ec.message());
    write_json_file((dir / "manifest.json").string(),
                    {{"tool", "opk"}, {"version", kToolVersion}, {"command", cmd->name}, {"config", cfg}});
    cmd->run(cfg, dir, out);
    return 0;
  } catch (const Error& e) {
    const bool num = e.error_class() == ErrorClass::Numerical;
    emit_error(err, e.kind(), num ? "numerical" : "validation", e.what());
    return num ? 3 : 2;
  } catch (const json::exception& e) {
    emit_error(err, "validation", "validation", e.what());
    return 2;
  } catch (const std::exception& e) {
    emit_error(err, "internal", "numerical", e.what());
    return 3;
  }
}

}  // namespace opk
