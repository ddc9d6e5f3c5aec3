#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "freeprob/cumulants.hpp"
#include "freeprob/distributions.hpp"
#include "freeprob/integration.hpp"
#include "freeprob/limits.hpp"
#include "freeprob/ncpart.hpp"
#include "freeprob/processes.hpp"
#include "freeprob/rmt.hpp"

/// JSON encodings for every input and report type.  Readers throw ParseError
/// naming the offending field; docs/schemas.md has the full layout.
namespace freeprob::io {

using nlohmann::json;

/// Rational fields accept "p/q" strings, integers and decimal literals
/// (0.1 reads as exactly 1/10).
Rational read_rational(const json& j, std::string_view field);
double read_double(const json& j, std::string_view field);
const json& require(const json& obj, std::string_view key);

/// Exact values become "p/q" strings, floats stay IEEE doubles.
inline json scalar_json(const Rational& q) { return to_string(q); }
inline json scalar_json(double x) { return x; }

json partition_json(const nc::SetPartition& p);
nc::SetPartition read_partition(const json& j);

template <class Tag, Scalar T>
json sequence_json(const Sequence<Tag, T>& s) {
  json values = json::array();
  for (const auto& v : s.values()) values.push_back(scalar_json(v));
  return {{"order", s.order()}, {"mode", mode_name(mode_of<T>)}, {"values", std::move(values)}};
}

/// Reads {"order","mode","values"}; "order" must match the value count.
std::vector<Rational> read_exact_values(const json& j, std::string_view field);

json atomic_json(const AtomicMeasure& m);
AtomicMeasure read_atomic(const json& j);

/// {"atoms": ...} or a moment sequence object.
json jump_json(const JumpLaw& jump);
JumpLaw read_jump(const json& j);

json distribution_json(const DistributionSpec& spec);
DistributionSpec read_distribution(const json& j);

json process_json(const ProcessSpec& p);
ProcessSpec read_process(const json& j);

json triangular_json(const TriangularArraySpec& spec);
TriangularArraySpec read_triangular(const json& j);

template <Scalar T>
json step_json(const StepFunction<T>& s) {
  json pieces = json::array();
  for (const auto& p : s.pieces()) {
    pieces.push_back({{"lo", scalar_json(p.interval.lo)},
                      {"hi", scalar_json(p.interval.hi)},
                      {"c", scalar_json(p.coefficient)}});
  }
  return {{"pieces", std::move(pieces)}};
}
StepFunction<Rational> read_step(const json& j);

template <Scalar T>
json poly_json(const PiecewisePoly<T>& f) {
  json pieces = json::array();
  for (const auto& p : f.pieces()) {
    json coeffs = json::array();
    for (const auto& c : p.coeffs) coeffs.push_back(scalar_json(c));
    pieces.push_back(
        {{"lo", scalar_json(p.interval.lo)}, {"hi", scalar_json(p.interval.hi)}, {"coeffs", std::move(coeffs)}});
  }
  return {{"pieces", std::move(pieces)}};
}
PiecewisePoly<Rational> read_poly(const json& j);

json kl_json(const KLEigenSystem& sys);

template <Scalar T>
json convergence_json(const std::vector<ConvergenceRow<T>>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"N", r.N}, {"n", r.n}, {"kappa", scalar_json(r.kappa)}, {"error", scalar_json(r.error)}});
  }
  return {{"mode", mode_name(mode_of<T>)}, {"rows", std::move(out)}};
}

json report_json(const rmt::SimulationReport& r);

/// Round-trip decimal for CSV cells and file output.
std::string format_double(double x);

json parse_text(std::string_view text);
json load_file(const std::string& path);

}  // namespace freeprob::io
