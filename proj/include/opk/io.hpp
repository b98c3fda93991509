#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "opk/core.hpp"
#include "opk/kernels.hpp"
#include "opk/paley_wiener.hpp"

namespace opk {

using nlohmann::json;

json complex_to_json(cplx z);  // [re, im]
cplx complex_from_json(const json& j);
json cvec_to_json(const CVec& v);
CVec cvec_from_json(const json& j);

json grid_function_to_json(const GridFunction& f);
GridFunction grid_function_from_json(const json& j);

// integer -> number without fraction, real -> float, pair -> {"x": .., "xi": [[re, im], ..]}
json index_to_json(const Index& a);
Index index_from_json(const json& j);

// {"family": descriptor, "samples": [{"index": .., "value": [[re, im], ..]}, ..]}
json sample_set_to_json(const SampleSet& s);
SampleSet sample_set_from_json(const json& j);

json vector_sampling_set_to_json(const VectorSamplingSet& s);
VectorSamplingSet vector_sampling_set_from_json(const json& j);

json kadec_to_json(const KadecBounds& b, const KadecCheck& c);

// {"m": int, "dim": int, "window": {"a", "b", "n"}, "coeffs": [[re, im], ..]}
json signal_to_json(const BandlimitedSignal& s);
BandlimitedSignal signal_from_json(const json& j);

// learning problem file: family descriptor, indices, lambda, optional samples and noise
struct ProblemSpec {
  json family;
  std::vector<Index> indices;
  double lambda = 1.0;
  std::optional<SampleSet> samples;
  std::optional<double> noise_sigma;
  std::uint64_t noise_seed = 0;
};
json problem_spec_to_json(const ProblemSpec& p);
ProblemSpec problem_spec_from_json(const json& j);

// "%.15g" with negative zero printed as 0
std::string format_real(double x);
// "re" when the imaginary part is zero, otherwise "re+imi" / "re-imi"
std::string format_complex(cplx z);

void write_matrix_csv(std::ostream& os, const ComplexMatrix& m, const std::vector<std::string>& labels);
void write_grid_function_csv(std::ostream& os, const GridFunction& f);
// rows of named real columns
void write_table_csv(std::ostream& os, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace opk
