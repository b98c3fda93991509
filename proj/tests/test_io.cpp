#include <sstream>

#include "doctest.h"
#include "opk/io.hpp"

using namespace opk;

TEST_SUITE("io") {
  TEST_CASE("complex values and vectors") {
    const cplx z(1.25, -3.5);
    CHECK(complex_from_json(complex_to_json(z)) == z);
    CHECK(complex_from_json(json(2.0)) == cplx(2.0, 0.0));
    const CVec v{cplx(0.1, 0.2), cplx(-1e-300, 7.0)};
    CHECK(cvec_from_json(cvec_to_json(v)) == v);
    CHECK_THROWS_AS(complex_from_json(json("x")), ValidationError);
  }

  TEST_CASE("grid functions round-trip exactly") {
    Rng rng(3);
    GridFunction f(Grid(-1.5, 2.0, 17), 2);
    for (auto& x : f.values) x = rng.complex_gaussian(1.0);
    const GridFunction g = grid_function_from_json(json::parse(grid_function_to_json(f).dump()));
    CHECK(g.grid.same_as(f.grid, 0.0));
    CHECK(g.dim == 2);
    CHECK(g.values == f.values);
  }

  TEST_CASE("indices of every kind") {
    for (const Index& a : {Index::integer(-7), Index::real(0.5), Index::pair(1.5, {cplx(0, 1), cplx(2, 0)})}) {
      const Index b = index_from_json(json::parse(index_to_json(a).dump()));
      CHECK(b == a);
      CHECK(b.kind == a.kind);
    }
    CHECK(index_from_json(json(3)).kind == Index::Kind::Integer);
    CHECK(index_from_json(json(3.0)).kind == Index::Kind::Real);
  }

  TEST_CASE("sample sets") {
    SampleSet s;
    s.family = {{"family", "average"}, {"params", {{"delta", 0.2}}}};
    s.entries.push_back({Index::real(-1.0), {cplx(0.5, 0.25)}});
    s.entries.push_back({Index::real(2.5), {cplx(-1.0, 0.0)}});
    const SampleSet t = sample_set_from_json(json::parse(sample_set_to_json(s).dump()));
    CHECK(t.family == s.family);
    REQUIRE(t.entries.size() == 2u);
    CHECK(t.entries[1].alpha == s.entries[1].alpha);
    CHECK(t.entries[0].value == s.entries[0].value);
    CHECK_THROWS_AS(sample_set_from_json(json::object()), ValidationError);
  }

  TEST_CASE("vector sampling sets and signals") {
    Rng rng(5);
    const VectorSamplingSet v = build_vector_sampling_set(3, 2, [&](int) {
      return std::vector<double>{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)};
    });
    const VectorSamplingSet w = vector_sampling_set_from_json(json::parse(vector_sampling_set_to_json(v).dump()));
    CHECK(w.n == 3);
    CHECK(w.x == v.x);
    CHECK((w.U - v.U).cwiseAbs().maxCoeff() == 0.0);

    const BandlimitedSignal s = random_bandlimited(4, pw_window_grid(4), rng, 2);
    const BandlimitedSignal t = signal_from_json(json::parse(signal_to_json(s).dump()));
    CHECK(t.m == 4);
    CHECK(t.dim == 2);
    CHECK(t.coeffs == s.coeffs);
    CHECK(t.window.same_as(s.window, 0.0));
  }

  TEST_CASE("Kadec report layout") {
    const json j = kadec_to_json(kadec_bounds(0.1), generalized_kadec_check(1.0, 1.0, 0.1));
    for (const char* k : {"A", "B", "pass", "margin"}) CHECK(j.contains(k));
    CHECK(j["A"].get<double>() == doctest::Approx(2.590021646198673));
  }

  TEST_CASE("problem files") {
    ProblemSpec p;
    p.family = {{"family", "fourier"}, {"params", json::object()}};
    p.indices = {Index::integer(-1), Index::integer(2)};
    p.lambda = 0.25;
    p.noise_sigma = 0.01;
    p.noise_seed = 9;
    const ProblemSpec q = problem_spec_from_json(json::parse(problem_spec_to_json(p).dump()));
    CHECK(q.family == p.family);
    CHECK(q.indices.size() == 2u);
    CHECK(q.indices[1] == p.indices[1]);
    CHECK(q.lambda == 0.25);
    REQUIRE(q.noise_sigma.has_value());
    CHECK(*q.noise_sigma == 0.01);
    CHECK(q.noise_seed == 9u);
    CHECK_FALSE(q.samples.has_value());
  }

  TEST_CASE("number formatting") {
    CHECK(format_real(-0.0) == "0");
    CHECK(format_real(0.1) == "0.1");
    CHECK(std::stod(format_real(1.0 / 3.0)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(format_complex(cplx(1.5, 0.0)) == "1.5");
    CHECK(format_complex(cplx(1.0, -2.0)) == "1-2i");
    CHECK(format_complex(cplx(0.0, 0.5)) == "0+0.5i");
  }

  TEST_CASE("CSV writers") {
    std::ostringstream m;
    ComplexMatrix a(2, 2);
    a << 1.0, cplx(0, 1), cplx(0, -1), 2.0;
    write_matrix_csv(m, a, {"p", "q"});
    CHECK(m.str() == "index,p,q\np,1,0+1i\nq,0-1i,2\n");

    std::ostringstream g;
    GridFunction f(Grid(0.0, 1.0, 2), 1);
    f.at(1) = cplx(0.5, -0.25);
    write_grid_function_csv(g, f);
    CHECK(g.str() == "x,re_0,im_0\n0,0,0\n1,0.5,-0.25\n");

    std::ostringstream t;
    write_table_csv(t, {"a", "b"}, {{1.0, 2.5}});
    CHECK(t.str() == "a,b\n1,2.5\n");
  }

  TEST_CASE("files") {
    const std::string path = "opk_io_test.json";
    const json j = {{"k", {1, 2, 3}}};
    write_json_file(path, j);
    CHECK(read_json_file(path) == j);
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_json_file("no_such_file.json"), ValidationError);
  }
}
