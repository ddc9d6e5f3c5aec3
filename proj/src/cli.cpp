#include "freeprob/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "freeprob/error.hpp"
#include "freeprob/json_io.hpp"

namespace freeprob::cli {
namespace {

using io::json;

struct Report {
  json doc;
  std::vector<std::string> csv_header;  // empty: no CSV form
  std::vector<std::vector<std::string>> csv_rows;
};

std::string cell(const Rational& q) { return to_string(q); }
std::string cell(double x) { return io::format_double(x); }

struct Common {
  std::string out;
  std::string mode = "exact";
  int threads = 1;
  int max_order = kDefaultMaxOrder;
};

void add_common(CLI::App* sub, Common& c, bool with_mode) {
  sub->add_option("--out", c.out, "Report path; .json or .csv (default: JSON on stdout)");
  sub->add_option("--max-order", c.max_order, "Largest transform order allowed")->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker thread cap")->check(CLI::PositiveNumber)->capture_default_str();
  if (with_mode) {
    sub->add_option("--mode", c.mode, "Arithmetic: exact or float")
        ->check(CLI::IsMember({"exact", "float"}))
        ->capture_default_str();
  }
}

template <class Tag, Scalar T>
void sequence_csv(Report& r, const std::string& name, const Sequence<Tag, T>& s) {
  r.csv_header = {"k", name};
  for (int k = 1; k <= s.order(); ++k) r.csv_rows.push_back({std::to_string(k), cell(s[k])});
}

void write_report(const Report& r, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << r.doc.dump(2) << '\n';
    return;
  }
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext != ".json" && ext != ".csv") throw ParseError("--out: extension must be .json or .csv");
  if (ext == ".csv" && r.csv_header.empty()) throw ParseError("--out: this report has no CSV form");
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write " + path);
  if (ext == ".json") {
    file << r.doc.dump(2) << '\n';
  } else {
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) file << (i ? "," : "") << cells[i];
      file << '\n';
    };
    line(r.csv_header);
    for (const auto& row : r.csv_rows) line(row);
  }
  if (!file) throw std::runtime_error("write to " + path + " failed");
}

Rational rational_option(const std::string& text, const std::string& flag) {
  try {
    return parse_rational(text);
  } catch (const ParseError& e) {
    throw ParseError(flag + ": " + e.what());
  }
}

// nc ------------------------------------------------------------------------

struct NcArgs {
  Common common;
  std::optional<int> count;
  std::optional<int> list;
  std::optional<std::string> mobius;
  std::optional<std::string> to;
};

Report run_nc(const NcArgs& a) {
  Report r;
  const int max_n = std::max(a.common.max_order, nc::kDefaultMaxN);
  if (a.count) {
    const auto parts = nc::enumerate_noncrossing(*a.count, max_n);
    r.doc = {{"n", *a.count}, {"count", parts.size()}};
    r.csv_header = {"n", "count"};
    r.csv_rows.push_back({std::to_string(*a.count), std::to_string(parts.size())});
  } else if (a.list) {
    json parts = json::array();
    for (const auto& p : nc::enumerate_noncrossing(*a.list, max_n)) parts.push_back(io::partition_json(p));
    r.doc = {{"n", *a.list}, {"partitions", std::move(parts)}};
  } else if (a.mobius) {
    if (!a.to) throw ParseError("--mobius needs --to");
    const auto p = io::read_partition(io::parse_text(*a.mobius));
    const auto q = io::read_partition(io::parse_text(*a.to));
    if (!nc::is_noncrossing(p) || !nc::is_noncrossing(q) || p.size() != q.size() || !nc::leq(p, q)) {
      throw DomainError("--mobius: need noncrossing partitions p <= q of the same set");
    }
    r.doc = {{"p", io::partition_json(p)}, {"q", io::partition_json(q)}, {"mobius", nc::mobius(p, q).str()}};
  } else {
    throw ParseError("nc: give one of --count, --list or --mobius");
  }
  return r;
}

// cumulants -----------------------------------------------------------------

struct CumulantArgs {
  Common common;
  std::string in;
  std::string from = "moments";
};

template <Scalar T>
std::vector<T> read_values(const json& j) {
  if constexpr (std::same_as<T, Rational>) {
    return io::read_exact_values(j, "in");
  } else {
    std::vector<T> out;
    for (const auto& v : io::require(j, "values")) out.push_back(io::read_double(v, "values"));
    return out;
  }
}

template <Scalar T>
Report run_cumulants_mode(const CumulantArgs& a, const json& input) {
  Report r;
  std::optional<MomentSequence<T>> m;
  std::optional<CumulantSequence<T>> k;
  if (a.from == "moments") {
    m.emplace(read_values<T>(input));
    k.emplace(moments_to_cumulants(*m, a.common.max_order));
  } else {
    k.emplace(read_values<T>(input));
    m.emplace(cumulants_to_moments(*k, a.common.max_order));
  }
  r.doc = {{"moments", io::sequence_json(*m)}, {"cumulants", io::sequence_json(*k)}};
  r.csv_header = {"k", "moment", "cumulant"};
  for (int i = 1; i <= m->order(); ++i) r.csv_rows.push_back({std::to_string(i), cell((*m)[i]), cell((*k)[i])});
  return r;
}

Report run_cumulants(const CumulantArgs& a) {
  const auto input = io::load_file(a.in);
  std::string mode = "exact";
  if (const auto it = input.find("mode"); input.is_object() && it != input.end()) {
    if (!it->is_string() || (*it != "exact" && *it != "float")) throw ParseError("field 'mode' must be exact or float");
    mode = it->get<std::string>();
  }
  return mode == "exact" ? run_cumulants_mode<Rational>(a, input) : run_cumulants_mode<double>(a, input);
}

// dist ----------------------------------------------------------------------

struct DistArgs {
  Common common;
  std::string spec;
  std::vector<std::string> add;
  int order = 6;
  std::string emit = "moments";
  double tol = kDefaultClassifyTolerance;
};

template <Scalar T>
Report run_dist_mode(const DistArgs& a) {
  std::vector<DistributionSpec> specs{io::read_distribution(io::load_file(a.spec))};
  for (const auto& path : a.add) specs.push_back(io::read_distribution(io::load_file(path)));
  auto kappa = cumulant_sequence<T>(specs.front(), a.order, a.common.max_order);
  for (std::size_t i = 1; i < specs.size(); ++i) {
    kappa = free_convolve(kappa, cumulant_sequence<T>(specs[i], a.order, a.common.max_order));
  }
  json spec_list = json::array();
  for (const auto& s : specs) spec_list.push_back(io::distribution_json(s));

  Report r;
  r.doc = {{"specs", std::move(spec_list)}};
  if (a.emit == "cumulants") {
    r.doc["cumulants"] = io::sequence_json(kappa);
    sequence_csv(r, "cumulant", kappa);
  } else if (a.emit == "moments") {
    const auto m = cumulants_to_moments(kappa, a.common.max_order);
    r.doc["moments"] = io::sequence_json(m);
    sequence_csv(r, "moment", m);
  } else {
    const auto fit = classify_free_poisson(kappa, from_double<T>(a.tol));
    r.doc["cumulants"] = io::sequence_json(kappa);
    r.doc["free_poisson"] = fit.has_value();
    if (fit) {
      r.doc["lambda"] = io::scalar_json(fit->lambda);
      r.doc["alpha"] = io::scalar_json(fit->alpha);
    }
  }
  return r;
}

// limit ---------------------------------------------------------------------

struct LimitArgs {
  Common common;
  std::string spec;
  std::string lambda = "1";
  std::string alpha = "1";
  std::vector<std::int64_t> Ns;
  int n = 2;
  bool upto = false;
  std::size_t family = 0;
  std::vector<int> word;
};

template <Scalar T>
Report run_limit_mode(const LimitArgs& a) {
  TriangularArraySpec spec;
  if (!a.spec.empty()) {
    spec = io::read_triangular(io::load_file(a.spec));
  } else {
    spec.families.push_back({rational_option(a.alpha, "--alpha"), rational_option(a.lambda, "--lambda")});
  }
  if (a.Ns.empty()) throw ParseError("--Ns: give at least one row length");
  Report r;
  if (!a.word.empty()) {
    json rows = json::array();
    r.csv_header = {"N", "kappa"};
    for (auto N : a.Ns) {
      const T kappa = joint_mixed_cumulant<T>(spec, Word(a.word.begin(), a.word.end()), N, a.common.max_order);
      rows.push_back({{"N", N}, {"kappa", io::scalar_json(kappa)}});
      r.csv_rows.push_back({std::to_string(N), cell(kappa)});
    }
    r.doc = {{"spec", io::triangular_json(spec)}, {"word", a.word}, {"mode", mode_name(mode_of<T>)},
             {"rows", std::move(rows)}};
    return r;
  }
  auto rows = convergence_table<T>(spec, a.family, a.Ns, a.n, a.common.max_order);
  if (!a.upto) std::erase_if(rows, [&](const auto& row) { return row.n != a.n; });
  r.doc = io::convergence_json(rows);
  r.doc["spec"] = io::triangular_json(spec);
  r.doc["family"] = a.family;
  r.csv_header = {"N", "n", "kappa", "error"};
  for (const auto& row : rows) {
    r.csv_rows.push_back({std::to_string(row.N), std::to_string(row.n), cell(row.kappa), cell(row.error)});
  }
  return r;
}

// process -------------------------------------------------------------------

struct ProcessArgs {
  Common common;
  std::vector<std::string> specs;
  std::string s = "0";
  std::string t = "1";
  int order = 4;
};

template <Scalar T>
Report run_process_mode(const ProcessArgs& a) {
  std::vector<ProcessSpec> specs;
  for (const auto& path : a.specs) specs.push_back(io::read_process(io::load_file(path)));
  const ProcessSpec process = specs.size() == 1 ? specs.front() : ProcessSpec(sum_processes(specs));
  const T s = from_rational<T>(rational_option(a.s, "--s"));
  const T t = from_rational<T>(rational_option(a.t, "--t"));
  const auto kappa = increment_cumulants<T>(process, s, t, a.order);
  Report r;
  r.doc = {{"process", io::process_json(process)},
           {"s", io::scalar_json(s)},
           {"t", io::scalar_json(t)},
           {"cumulants", io::sequence_json(kappa)}};
  sequence_csv(r, "cumulant", kappa);
  return r;
}

// kl ------------------------------------------------------------------------

struct KlArgs {
  Common common;
  double alpha = 1.0;
  double horizon = 1.0;
  int count = 10;
  std::vector<int> mercer;
  int grid = 201;
};

Report run_kl(const KlArgs& a) {
  int count = a.count;
  for (int N : a.mercer) count = std::max(count, N);
  const auto sys = kl_eigensystem(a.alpha, a.horizon, count);
  Report r;
  if (a.mercer.empty()) {
    r.doc = io::kl_json(sys);
    r.csv_header = {"n", "eigenvalue"};
    for (int n = 1; n <= count; ++n) r.csv_rows.push_back({std::to_string(n), cell(sys.eigenvalue(n))});
    return r;
  }
  json rows = json::array();
  r.csv_header = {"N", "error"};
  for (int N : a.mercer) {
    const double e = mercer_truncation_error(sys, N, a.grid);
    rows.push_back({{"N", N}, {"error", e}});
    r.csv_rows.push_back({std::to_string(N), cell(e)});
  }
  r.doc = {{"T", a.horizon}, {"alpha", a.alpha}, {"grid", a.grid}, {"rows", std::move(rows)}};
  return r;
}

// integrate -----------------------------------------------------------------

struct IntegrateArgs {
  Common common;
  std::string f;
  int order = 4;
  double tol = 1e-8;
};

bool is_step_json(const json& j) {
  const auto& pieces = io::require(j, "pieces");
  return pieces.is_array() && !pieces.empty() && pieces.front().is_object() && pieces.front().contains("c");
}

template <Scalar T>
Report run_integrate_mode(const IntegrateArgs& a, const json& input) {
  Report r;
  if (is_step_json(input)) {
    const auto exact = io::read_step(input);
    const auto kappa = [&] {
      if constexpr (std::same_as<T, Rational>) {
        return integrate_step(exact, a.order);
      } else {
        return integrate_step(to_floating(exact), a.order);
      }
    }();
    r.doc = {{"kind", "step"}, {"cumulants", io::sequence_json(kappa)}};
    sequence_csv(r, "cumulant", kappa);
    return r;
  }
  const auto exact = io::read_poly(input);
  const auto kappa = [&] {
    if constexpr (std::same_as<T, Rational>) {
      return integral_cumulants(exact, a.order, a.tol);
    } else {
      return integral_cumulants(to_floating(exact), a.order, a.tol);
    }
  }();
  r.doc = {{"kind", "poly"}, {"tol", a.tol}, {"cumulants", io::sequence_json(kappa)}};
  sequence_csv(r, "cumulant", kappa);
  return r;
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
  Common common;
  std::string step;
  int d = 2000;
  std::uint64_t seed = kDefaultSeed;
  int samples = 1;
  int order = 4;
};

std::uint64_t effective_seed(std::uint64_t flag_value) {
  const char* env = std::getenv("FREEPROB_SEED");
  if (env == nullptr || *env == '\0') return flag_value;
  std::uint64_t value = 0;
  const std::string_view text(env);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("FREEPROB_SEED must be an unsigned 64-bit integer");
  }
  return value;
}

Report run_simulate(const SimulateArgs& a) {
  const auto s = to_floating(io::read_step(io::load_file(a.step)));
  const rmt::EnsembleConfig cfg{a.d, effective_seed(a.seed), a.samples};
  const auto report = rmt::simulate_report(s, cfg, a.order, a.common.threads);
  Report r;
  r.doc = io::report_json(report);
  r.doc["d"] = cfg.dimension;
  r.doc["seed"] = cfg.seed;
  r.doc["samples"] = cfg.samples;
  r.csv_header = {"k", "predicted", "empirical", "abs_error"};
  for (int k = 0; k < a.order; ++k) {
    r.csv_rows.push_back({std::to_string(k + 1), cell(report.predicted[k]), cell(report.empirical[k]),
                          cell(report.abs_error[k])});
  }
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Free Poisson calculus toolkit", "freeprob"};
  app.require_subcommand(1);

  NcArgs nc_args;
  auto* nc_cmd = app.add_subcommand("nc", "Noncrossing partitions");
  add_common(nc_cmd, nc_args.common, false);
  auto* count_opt = nc_cmd->add_option("--count", nc_args.count, "Count NC(n)");
  auto* list_opt = nc_cmd->add_option("--list", nc_args.list, "List NC(n)");
  auto* mobius_opt = nc_cmd->add_option("--mobius", nc_args.mobius, "mu(p, q): JSON partition p");
  nc_cmd->add_option("--to", nc_args.to, "JSON partition q for --mobius")->needs(mobius_opt);
  count_opt->excludes(list_opt)->excludes(mobius_opt);
  list_opt->excludes(mobius_opt);

  CumulantArgs cum_args;
  auto* cum_cmd = app.add_subcommand("cumulants", "Moment <-> free cumulant transforms");
  add_common(cum_cmd, cum_args.common, false);
  cum_cmd->add_option("--in", cum_args.in, "Sequence JSON file")->required();
  cum_cmd->add_option("--from", cum_args.from, "What the input holds")
      ->check(CLI::IsMember({"moments", "cumulants"}))
      ->capture_default_str();

  DistArgs dist_args;
  auto* dist_cmd = app.add_subcommand("dist", "Distribution cumulants, moments and classification");
  add_common(dist_cmd, dist_args.common, true);
  dist_cmd->add_option("--spec", dist_args.spec, "Distribution JSON file")->required();
  dist_cmd->add_option("--add", dist_args.add, "Further distributions to free-convolve");
  dist_cmd->add_option("--order", dist_args.order, "Sequence order")->capture_default_str();
  dist_cmd->add_option("--emit", dist_args.emit, "moments, cumulants or classify")
      ->check(CLI::IsMember({"moments", "cumulants", "classify"}))
      ->capture_default_str();
  dist_cmd->add_option("--tol", dist_args.tol, "Classifier tolerance")->capture_default_str();

  LimitArgs limit_args;
  auto* limit_cmd = app.add_subcommand("limit", "Triangular-array convergence tables");
  add_common(limit_cmd, limit_args.common, true);
  limit_cmd->add_option("--spec", limit_args.spec, "Triangular array JSON file");
  limit_cmd->add_option("--lambda", limit_args.lambda, "Rate of a single family")->capture_default_str();
  limit_cmd->add_option("--alpha", limit_args.alpha, "Jump size of a single family")->capture_default_str();
  limit_cmd->add_option("--Ns", limit_args.Ns, "Row lengths, comma separated")->delimiter(',')->required();
  limit_cmd->add_option("--n", limit_args.n, "Cumulant order")->capture_default_str();
  limit_cmd->add_flag("--upto", limit_args.upto, "Report every order 1..n");
  limit_cmd->add_option("--family", limit_args.family, "Family index")->capture_default_str();
  limit_cmd->add_option("--word", limit_args.word, "Family indices of a joint cumulant, comma separated")
      ->delimiter(',');

  ProcessArgs proc_args;
  auto* proc_cmd = app.add_subcommand("process", "Increment cumulants of free Poisson processes");
  add_common(proc_cmd, proc_args.common, true);
  proc_cmd->add_option("--spec", proc_args.specs, "Process JSON files; several are summed")->required();
  proc_cmd->add_option("--s", proc_args.s, "Increment start")->capture_default_str();
  proc_cmd->add_option("--t", proc_args.t, "Increment end")->capture_default_str();
  proc_cmd->add_option("--order", proc_args.order, "Sequence order")->capture_default_str();

  KlArgs kl_args;
  auto* kl_cmd = app.add_subcommand("kl", "Karhunen-Loeve eigensystem and Mercer truncation");
  add_common(kl_cmd, kl_args.common, false);
  kl_cmd->add_option("--alpha", kl_args.alpha, "Jump size")->capture_default_str();
  kl_cmd->add_option("--T", kl_args.horizon, "Horizon")->capture_default_str();
  kl_cmd->add_option("--count", kl_args.count, "Number of eigenpairs")->capture_default_str();
  kl_cmd->add_option("--mercer", kl_args.mercer, "Truncation levels, comma separated")->delimiter(',');
  kl_cmd->add_option("--grid", kl_args.grid, "Grid points per axis")->capture_default_str();

  IntegrateArgs int_args;
  auto* int_cmd = app.add_subcommand("integrate", "Cumulants of X(f)");
  add_common(int_cmd, int_args.common, true);
  int_cmd->add_option("--f", int_args.f, "Step function or piecewise polynomial JSON file")->required();
  int_cmd->add_option("--order", int_args.order, "Largest cumulant order")->capture_default_str();
  int_cmd->add_option("--tol", int_args.tol, "Refinement tolerance")->capture_default_str();

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Random-matrix check of step-function integrals");
  add_common(sim_cmd, sim_args.common, false);
  sim_cmd->add_option("--step", sim_args.step, "Step function JSON file")->required();
  sim_cmd->add_option("--d", sim_args.d, "Matrix dimension")->capture_default_str();
  sim_cmd->add_option("--seed", sim_args.seed, "Seed (FREEPROB_SEED overrides)")->capture_default_str();
  sim_cmd->add_option("--samples", sim_args.samples, "Independent draws")->capture_default_str();
  sim_cmd->add_option("--order", sim_args.order, "Moment order")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return invalid_input;
  }

  try {
    Report report;
    auto exact = [](const Common& c) { return c.mode == "exact"; };
    if (*nc_cmd) {
      report = run_nc(nc_args);
    } else if (*cum_cmd) {
      report = run_cumulants(cum_args);
    } else if (*dist_cmd) {
      report = exact(dist_args.common) ? run_dist_mode<Rational>(dist_args) : run_dist_mode<double>(dist_args);
    } else if (*limit_cmd) {
      report = exact(limit_args.common) ? run_limit_mode<Rational>(limit_args) : run_limit_mode<double>(limit_args);
    } else if (*proc_cmd) {
      report = exact(proc_args.common) ? run_process_mode<Rational>(proc_args) : run_process_mode<double>(proc_args);
    } else if (*kl_cmd) {
      report = run_kl(kl_args);
    } else if (*int_cmd) {
      const auto input = io::load_file(int_args.f);
      report = exact(int_args.common) ? run_integrate_mode<Rational>(int_args, input)
                                      : run_integrate_mode<double>(int_args, input);
    } else {
      report = run_simulate(sim_args);
    }
    const std::string& path = nc_cmd->parsed()     ? nc_args.common.out
                              : cum_cmd->parsed()  ? cum_args.common.out
                              : dist_cmd->parsed() ? dist_args.common.out
                              : limit_cmd->parsed() ? limit_args.common.out
                              : proc_cmd->parsed() ? proc_args.common.out
                              : kl_cmd->parsed()   ? kl_args.common.out
                              : int_cmd->parsed()  ? int_args.common.out
                                                   : sim_args.common.out;
    write_report(report, path, out);
    return ok;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return invalid_input;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return invalid_input;
  } catch (const io::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return invalid_input;
  } catch (const ResourceLimitError& e) {
    err << "error: " << e.what() << '\n';
    return resource_limit;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return failure;
  }
}

}  // namespace freeprob::cli
