#include "opk/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace opk {

namespace {

template <class F>
auto parse_guard(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw ValidationError("complex value must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json cvec_to_json(const CVec& v) {
  json a = json::array();
  for (auto z : v) a.push_back(complex_to_json(z));
  return a;
}

CVec cvec_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("expected an array of complex values");
  CVec v;
  for (const auto& e : j) v.push_back(complex_from_json(e));
  return v;
}

json grid_function_to_json(const GridFunction& f) {
  return {{"a", f.grid.a}, {"b", f.grid.b}, {"dim", f.dim}, {"values", cvec_to_json(f.values)}};
}

GridFunction grid_function_from_json(const json& j) {
  return parse_guard("grid function", [&] {
    const int dim = j.at("dim").get<int>();
    if (dim < 1) throw ValidationError("grid function dim must be >= 1");
    CVec vals = cvec_from_json(j.at("values"));
    if (vals.size() % dim != 0) throw ShapeError("value count is not a multiple of dim");
    const int n = static_cast<int>(vals.size() / dim);
    return GridFunction(Grid(j.at("a").get<double>(), j.at("b").get<double>(), n), dim, std::move(vals));
  });
}

json index_to_json(const Index& a) {
  switch (a.kind) {
    case Index::Kind::Integer:
      return a.k;
    case Index::Kind::Real:
      return a.x;
    default:
      return {{"x", a.x}, {"xi", cvec_to_json(a.v)}};
  }
}

Index index_from_json(const json& j) {
  return parse_guard("index", [&] {
    if (j.is_number_integer()) return Index::integer(j.get<long long>());
    if (j.is_number()) return Index::real(j.get<double>());
    if (j.is_object()) return Index::pair(j.at("x").get<double>(), cvec_from_json(j.at("xi")));
    throw ValidationError("index must be an integer, a real or {x, xi}");
  });
}

json sample_set_to_json(const SampleSet& s) {
  json arr = json::array();
  for (const auto& e : s.entries) arr.push_back({{"index", index_to_json(e.alpha)}, {"value", cvec_to_json(e.value)}});
  return {{"family", s.family}, {"samples", arr}};
}

SampleSet sample_set_from_json(const json& j) {
  return parse_guard("sample set", [&] {
    SampleSet s;
    s.family = j.value("family", json::object());
    for (const auto& e : j.at("samples")) s.entries.push_back({index_from_json(e.at("index")), cvec_from_json(e.at("value"))});
    return s;
  });
}

json vector_sampling_set_to_json(const VectorSamplingSet& s) {
  json u = json::array();
  for (Eigen::Index r = 0; r < s.U.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < s.U.cols(); ++c) row.push_back(complex_to_json(s.U(r, c)));
    u.push_back(row);
  }
  return {{"n", s.n}, {"m_range", s.m_range}, {"x", s.x}, {"U", u}};
}

VectorSamplingSet vector_sampling_set_from_json(const json& j) {
  return parse_guard("vector sampling set", [&] {
    VectorSamplingSet s;
    s.n = j.at("n").get<int>();
    s.m_range = j.value("m_range", 0);
    s.x = j.at("x").get<std::vector<double>>();
    const auto& u = j.at("U");
    if (static_cast<int>(u.size()) != s.n) throw ShapeError("U must be n x n");
    s.U.resize(s.n, s.n);
    for (int r = 0; r < s.n; ++r) {
      if (static_cast<int>(u[r].size()) != s.n) throw ShapeError("U must be n x n");
      for (int c = 0; c < s.n; ++c) s.U(r, c) = complex_from_json(u[r][c]);
    }
    if (s.x.size() != static_cast<std::size_t>(s.n) * (2 * s.m_range + 1))
      throw ShapeError("x must hold n * (2 m_range + 1) positions");
    return s;
  });
}

json kadec_to_json(const KadecBounds& b, const KadecCheck& c) {
  return {{"A", b.A}, {"B", b.B}, {"pass", c.pass}, {"margin", c.margin}};
}

json signal_to_json(const BandlimitedSignal& s) {
  return {{"m", s.m},
          {"dim", s.dim},
          {"window", {{"a", s.window.a}, {"b", s.window.b}, {"n", s.window.n}}},
          {"coeffs", cvec_to_json(s.coeffs)}};
}

BandlimitedSignal signal_from_json(const json& j) {
  return parse_guard("signal", [&] {
    BandlimitedSignal s;
    s.m = j.at("m").get<int>();
    s.dim = j.value("dim", 1);
    if (s.m < 0 || s.dim < 1) throw ValidationError("signal needs m >= 0 and dim >= 1");
    s.coeffs = cvec_from_json(j.at("coeffs"));
    if (s.coeffs.size() != static_cast<std::size_t>(s.dim) * (2 * s.m + 1))
      throw ShapeError("signal needs dim * (2m + 1) coefficients");
    if (j.contains("window")) {
      const auto& w = j.at("window");
      s.window = Grid(w.at("a").get<double>(), w.at("b").get<double>(), w.at("n").get<int>());
    } else {
      s.window = pw_window_grid(s.m);
    }
    return s;
  });
}

json problem_spec_to_json(const ProblemSpec& p) {
  json idx = json::array();
  for (const auto& a : p.indices) idx.push_back(index_to_json(a));
  json j = {{"family", p.family}, {"indices", idx}, {"lambda", p.lambda}};
  if (p.samples) j["samples"] = sample_set_to_json(*p.samples)["samples"];
  if (p.noise_sigma) j["noise"] = {{"sigma", *p.noise_sigma}, {"seed", p.noise_seed}};
  return j;
}

ProblemSpec problem_spec_from_json(const json& j) {
  return parse_guard("problem", [&] {
    ProblemSpec p;
    p.family = j.at("family");
    if (p.family.is_string()) p.family = {{"family", p.family}};
    for (const auto& a : j.at("indices")) p.indices.push_back(index_from_json(a));
    p.lambda = j.at("lambda").get<double>();
    if (j.contains("samples")) {
      p.samples = sample_set_from_json({{"family", p.family}, {"samples", j.at("samples")}});
      if (p.samples->entries.size() != p.indices.size()) throw AlignmentError("samples and indices differ in length");
      for (std::size_t k = 0; k < p.indices.size(); ++k)
        if (!(p.samples->entries[k].alpha == p.indices[k])) throw AlignmentError("samples do not follow the indices");
    }
    if (j.contains("noise")) {
      p.noise_sigma = j.at("noise").at("sigma").get<double>();
      p.noise_seed = j.at("noise").value("seed", std::uint64_t{0});
    }
    return p;
  });
}

std::string format_real(double x) {
  if (x == 0.0) x = 0.0;  // drops the sign of -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

std::string format_complex(cplx z) {
  if (z.imag() == 0.0) return format_real(z.real());
  const std::string im = format_real(std::abs(z.imag()));
  return format_real(z.real()) + (z.imag() < 0 ? "-" : "+") + im + "i";
}

void write_matrix_csv(std::ostream& os, const ComplexMatrix& m, const std::vector<std::string>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != m.cols()) throw ShapeError("one label per column expected");
  os << "index";
  for (const auto& l : labels) os << ',' << l;
  os << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    os << labels[r];
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << ',' << format_complex(m(r, c));
    os << '\n';
  }
}

void write_grid_function_csv(std::ostream& os, const GridFunction& f) {
  os << 'x';
  for (int c = 0; c < f.dim; ++c) os << ",re_" << c << ",im_" << c;
  os << '\n';
  for (int i = 0; i < f.grid.n; ++i) {
    os << format_real(f.grid.x(i));
    for (int c = 0; c < f.dim; ++c) os << ',' << format_real(f.at(i, c).real()) << ',' << format_real(f.at(i, c).imag());
    os << '\n';
  }
}

void write_table_csv(std::ostream& os, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << '\n';
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw ShapeError("table row width differs from the header");
    for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << format_real(r[k]);
    os << '\n';
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
}

}  // namespace opk
