#include "freeprob/json_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "freeprob/error.hpp"

namespace freeprob::io {
namespace {

std::string quoted(std::string_view field) { return "'" + std::string(field) + "'"; }

std::string type_tag(const json& j) {
  const auto& t = require(j, "type");
  if (!t.is_string()) throw ParseError("field 'type' must be a string");
  return t.get<std::string>();
}

const json& require_array(const json& obj, std::string_view key) {
  const auto& a = require(obj, key);
  if (!a.is_array()) throw ParseError("field " + quoted(key) + " must be an array");
  return a;
}

template <class Fn>
auto with_field(std::string_view field, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ParseError(std::string(field) + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(std::string(field) + ": " + e.what());
  }
}

}  // namespace

const json& require(const json& obj, std::string_view key) {
  if (!obj.is_object()) throw ParseError("expected an object holding " + quoted(key));
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) throw ParseError("missing field " + quoted(key));
  return *it;
}

Rational read_rational(const json& j, std::string_view field) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return parse_rational(j.dump());
    if (j.is_number_float()) return parse_rational(j.dump());
  } catch (const ParseError& e) {
    throw ParseError("field " + quoted(field) + ": " + e.what());
  }
  throw ParseError("field " + quoted(field) + " must be a number or a \"p/q\" string");
}

double read_double(const json& j, std::string_view field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return to_double(read_rational(j, field));
  throw ParseError("field " + quoted(field) + " must be a number");
}

json partition_json(const nc::SetPartition& p) { return p.blocks(); }

nc::SetPartition read_partition(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("partition must be a non-empty array of blocks");
  std::vector<std::vector<int>> blocks;
  int n = 0;
  for (const auto& b : j) {
    if (!b.is_array()) throw ParseError("partition block must be an array of integers");
    auto& block = blocks.emplace_back();
    for (const auto& e : b) {
      if (!e.is_number_integer()) throw ParseError("partition element must be an integer");
      block.push_back(e.get<int>());
      n += 1;
    }
  }
  return nc::SetPartition(n, blocks);
}

std::vector<Rational> read_exact_values(const json& j, std::string_view field) {
  return with_field(field, [&] {
    const auto& values = require_array(j, "values");
    std::vector<Rational> out;
    for (const auto& v : values) out.push_back(read_rational(v, "values"));
    if (const auto it = j.find("order"); it != j.end()) {
      if (!it->is_number_integer() || it->get<long long>() != static_cast<long long>(out.size())) {
        throw ParseError("field 'order' does not match the number of values");
      }
    }
    if (out.empty()) throw ParseError("field 'values' is empty");
    return out;
  });
}

json atomic_json(const AtomicMeasure& m) {
  json atoms = json::array();
  for (const auto& a : m.atoms()) atoms.push_back({to_string(a.location), to_string(a.weight)});
  return {{"atoms", std::move(atoms)}};
}

AtomicMeasure read_atomic(const json& j) {
  return with_field("atoms", [&] {
    std::vector<Atom> atoms;
    for (const auto& pair : require_array(j, "atoms")) {
      if (!pair.is_array() || pair.size() != 2) throw ParseError("each atom must be a [location, weight] pair");
      atoms.push_back({read_rational(pair[0], "location"), read_rational(pair[1], "weight")});
    }
    return AtomicMeasure(std::move(atoms));
  });
}

json jump_json(const JumpLaw& jump) {
  if (const auto* a = std::get_if<AtomicMeasure>(&jump)) return atomic_json(*a);
  return sequence_json(std::get<MomentSequence<Rational>>(jump));
}

JumpLaw read_jump(const json& j) {
  if (j.is_object() && j.contains("atoms")) return read_atomic(j);
  return MomentSequence<Rational>(read_exact_values(j, "jump"));
}

json distribution_json(const DistributionSpec& spec) {
  return std::visit(
      [](const auto& d) -> json {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, FreePoisson>) {
          return {{"type", "free_poisson"}, {"lambda", to_string(d.lambda)}, {"alpha", to_string(d.alpha)}};
        } else if constexpr (std::is_same_v<D, CompoundFreePoisson>) {
          return {{"type", "compound_free_poisson"}, {"lambda", to_string(d.lambda)}, {"jump", jump_json(d.jump)}};
        } else if constexpr (std::is_same_v<D, Semicircle>) {
          return {{"type", "semicircle"}, {"radius", to_string(d.radius)}};
        } else if constexpr (std::is_same_v<D, FreeBernoulli>) {
          return {{"type", "free_bernoulli"},
                  {"alpha", to_string(d.alpha)},
                  {"beta", to_string(d.beta)},
                  {"p", to_string(d.p)}};
        } else {
          return {{"type", "point_mass"}, {"c", to_string(d.c)}};
        }
      },
      spec);
}

DistributionSpec read_distribution(const json& j) {
  const auto type = type_tag(j);
  auto field = [&](std::string_view key) { return read_rational(require(j, key), key); };
  DistributionSpec spec = [&]() -> DistributionSpec {
    if (type == "free_poisson") return FreePoisson{field("lambda"), field("alpha")};
    if (type == "compound_free_poisson") return CompoundFreePoisson{field("lambda"), read_jump(require(j, "jump"))};
    if (type == "semicircle") return Semicircle{field("radius")};
    if (type == "free_bernoulli") return FreeBernoulli{field("alpha"), field("beta"), field("p")};
    if (type == "point_mass") return PointMass{field("c")};
    throw ParseError("field 'type': unknown distribution \"" + type + "\"");
  }();
  validate(spec);
  return spec;
}

json process_json(const ProcessSpec& p) {
  if (const auto* fp = std::get_if<FreePoissonProcess>(&p)) {
    return {{"type", "free_poisson_process"}, {"rate", fp->rate}, {"alpha", to_string(fp->alpha)}};
  }
  const auto& c = std::get<CompoundFreePoissonProcess>(p);
  return {{"type", "compound_free_poisson_process"}, {"rate", c.rate}, {"jump", jump_json(c.jump)}};
}

ProcessSpec read_process(const json& j) {
  const auto type = type_tag(j);
  int rate = 1;
  if (const auto it = j.find("rate"); it != j.end()) {
    if (!it->is_number_integer()) throw ParseError("field 'rate' must be a positive integer");
    rate = it->get<int>();
  }
  ProcessSpec p = [&]() -> ProcessSpec {
    if (type == "free_poisson_process") return FreePoissonProcess{rate, read_rational(require(j, "alpha"), "alpha")};
    if (type == "compound_free_poisson_process") return CompoundFreePoissonProcess{rate, read_jump(require(j, "jump"))};
    throw ParseError("field 'type': unknown process \"" + type + "\"");
  }();
  with_field("rate", [&] { validate(p); });
  return p;
}

json triangular_json(const TriangularArraySpec& spec) {
  json families = json::array();
  for (const auto& f : spec.families) families.push_back({{"alpha", to_string(f.alpha)}, {"lambda", to_string(f.lambda)}});
  return {{"families", std::move(families)}, {"orthogonal", spec.orthogonal}};
}

TriangularArraySpec read_triangular(const json& j) {
  TriangularArraySpec spec;
  for (const auto& f : require_array(j, "families")) {
    spec.families.push_back({read_rational(require(f, "alpha"), "alpha"), read_rational(require(f, "lambda"), "lambda")});
  }
  if (spec.families.empty()) throw ParseError("field 'families' is empty");
  if (const auto it = j.find("orthogonal"); it != j.end()) {
    if (!it->is_boolean()) throw ParseError("field 'orthogonal' must be a boolean");
    spec.orthogonal = it->get<bool>();
  }
  return spec;
}

StepFunction<Rational> read_step(const json& j) {
  std::vector<StepPiece<Rational>> pieces;
  for (const auto& p : require_array(j, "pieces")) {
    auto lo = read_rational(require(p, "lo"), "lo");
    auto hi = read_rational(require(p, "hi"), "hi");
    auto c = read_rational(require(p, "c"), "c");
    pieces.push_back({with_field("pieces", [&] { return Interval<Rational>(lo, hi); }), c});
  }
  return StepFunction<Rational>(std::move(pieces));
}

PiecewisePoly<Rational> read_poly(const json& j) {
  std::vector<PolyPiece<Rational>> pieces;
  for (const auto& p : require_array(j, "pieces")) {
    auto lo = read_rational(require(p, "lo"), "lo");
    auto hi = read_rational(require(p, "hi"), "hi");
    std::vector<Rational> coeffs;
    for (const auto& c : require_array(p, "coeffs")) coeffs.push_back(read_rational(c, "coeffs"));
    pieces.push_back({with_field("pieces", [&] { return Interval<Rational>(lo, hi); }), std::move(coeffs)});
  }
  return PiecewisePoly<Rational>(std::move(pieces));
}

json kl_json(const KLEigenSystem& sys) {
  return {{"T", sys.horizon()}, {"alpha", sys.alpha()}, {"eigenvalues", sys.eigenvalues()}};
}

json report_json(const rmt::SimulationReport& r) {
  return {{"predicted", r.predicted}, {"empirical", r.empirical}, {"abs_error", r.abs_error}};
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

json parse_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_text(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace freeprob::io
