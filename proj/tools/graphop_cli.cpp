// Experiment driver: builds operators from a JSON config, runs distance
// estimates, bound sweeps, network comparisons, and assumption checks, and
// writes machine-readable reports. Every run is a deterministic function of
// (config, seed, and the explicit flags); thread count never changes output
// bytes.
//
// Exit codes: 0 success, 2 config error, 3 violated hypothesis or domain
// error, 4 filter coefficients outside [-1, 1].

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <graphop/io.hpp>

namespace {

using nlohmann::json;
using namespace graphop;

// A config that parses fine but asks for an experiment outside the stated
// hypotheses (strict sweeps, mismatched paired estimates).
struct HypothesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::string out_path;
  std::string format;  // empty = config / command default
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool strict = false;
};

json load_config(const Options& opt) {
  if (opt.config_path.empty()) throw std::invalid_argument("--config is required");
  std::ifstream in(opt.config_path);
  if (!in) throw std::invalid_argument("config: cannot open '" + opt.config_path + "'");
  json j;
  in >> j;
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  return j;
}

// Paths inside the config resolve against the config file's directory.
std::string resolve_path(const Options& opt, const std::string& p) {
  const std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (std::filesystem::path(opt.config_path).parent_path() / path).string();
}

Kernel kernel_from_spec(const json& spec) {
  const std::string id = spec.at("kernel").get<std::string>();
  if (id == "constant") return kernel_constant(spec.at("w").get<double>());
  if (id == "product") return kernel_product();
  if (id == "gaussian-bump") return kernel_gaussian_bump(spec.at("sigma").get<double>());
  if (id == "min") return kernel_min();
  throw std::invalid_argument("operator: unknown kernel '" + id + "'");
}

POperator operator_from_spec(const json& spec, const Options& opt) {
  if (!spec.is_object()) throw std::invalid_argument("operator: spec must be an object");
  const std::string kind = spec.at("kind").get<std::string>();
  const bool normalize = spec.value("normalize", false);
  POperator A = [&] {
    if (kind == "graphon") return make_graphon_op("graphon-" + spec.at("kernel").get<std::string>(),
                                                  kernel_from_spec(spec));
    if (kind == "shift") return make_shift_op(spec.at("a").get<double>(), normalize);
    if (kind == "copies")
      return make_copies_op(spec.at("N").get<int>(), spec.at("a").get<double>(), normalize);
    if (kind == "hypercube") return make_hypercube_op(spec.at("N").get<int>());
    if (kind == "matrix") {
      const std::string file = resolve_path(opt, spec.at("file").get<std::string>());
      std::ifstream in(file);
      if (!in) throw std::invalid_argument("operator: cannot open matrix file '" + file + "'");
      return make_matrix_op("matrix", load_matrix_csv(in));
    }
    throw std::invalid_argument("operator: unknown kind '" + kind + "'");
  }();
  if (spec.contains("resolution")) {
    if (A.domain() == Domain::Finite)
      throw std::invalid_argument("operator: 'resolution' needs a continuum kind");
    return discretize(A, spec.at("resolution").get<int>());
  }
  return A;
}

// The continuum base required by sweeps and network comparisons.
POperator continuum_operator(const json& cfg, const Options& opt) {
  const json& spec = cfg.at("operator");
  if (spec.contains("resolution"))
    throw std::invalid_argument("operator: sweeps discretize internally; drop 'resolution'");
  POperator A = operator_from_spec(spec, opt);
  if (A.domain() != Domain::Continuum)
    throw std::invalid_argument("operator: this command needs a continuum operator");
  return A;
}

BoundVariant variant_from_name(const std::string& s) {
  if (s == "constant-to-lipschitz") return BoundVariant::ConstantToLipschitz;
  if (s == "constant-to-lipschitz-whp") return BoundVariant::ConstantToLipschitzWhp;
  if (s == "lipschitz-to-lipschitz") return BoundVariant::LipschitzToLipschitz;
  throw std::invalid_argument("variant: unknown '" + s + "'");
}

Theorem theorem_from_name(const std::string& s) {
  for (Theorem t : {Theorem::Thm41, Theorem::Cor42, Theorem::Thm43Approx, Theorem::Thm43Transfer,
                    Theorem::GeneralD1, Theorem::LemmaE3})
    if (s == theorem_name(t)) return t;
  throw std::invalid_argument("theorem: unknown '" + s + "'");
}

struct RunSettings {
  ProfileConfig profile;
  int k_max = 4;
};

RunSettings settings_from_config(const json& cfg, const Options& opt) {
  RunSettings s;
  const json p = cfg.value("profile", json::object());
  s.k_max = p.value("k_max", 4);
  s.profile.C_v = p.value("C_v", 1.0);
  s.profile.num_tuples = p.value("num_tuples", 64);
  s.profile.q_atoms = p.value("q_atoms", 512);
  const std::string est = p.value("estimator", "paired");
  if (est == "paired")
    s.profile.estimator = ProfileConfig::Estimator::Paired;
  else if (est == "cross")
    s.profile.estimator = ProfileConfig::Estimator::Cross;
  else
    throw std::invalid_argument("profile.estimator: must be 'paired' or 'cross'");
  const std::string fam = p.value("family", "piecewise-linear");
  if (fam == "piecewise-linear")
    s.profile.family = SignalFamily::PiecewiseLinear;
  else if (fam == "mollified-noise")
    s.profile.family = SignalFamily::MollifiedNoise;
  else
    throw std::invalid_argument("profile.family: must be 'piecewise-linear' or 'mollified-noise'");
  s.profile.seed = opt.seed ? *opt.seed : cfg.value("seed", std::uint64_t{0});
  int threads = opt.threads ? *opt.threads : cfg.value("threads", 0);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads < 1) throw std::invalid_argument("threads: must be >= 1");
  s.profile.threads = threads;
  s.profile.validate();
  if (s.k_max < 1) throw std::invalid_argument("profile.k_max: must be >= 1");
  return s;
}

std::vector<int> resolutions_from_config(const json& cfg) {
  const std::vector<int> rs = cfg.at("resolutions").get<std::vector<int>>();
  for (int r : rs)
    if (r < 1) throw std::invalid_argument("resolutions: entries must be >= 1");
  return rs;
}

GnnParams gnn_from_config(const json& cfg, const Options& opt) {
  if (!cfg.contains("gnn")) throw std::invalid_argument("gnn: params file path is required");
  const std::string file = resolve_path(opt, cfg.at("gnn").get<std::string>());
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("gnn: cannot open params file '" + file + "'");
  json j;
  in >> j;
  return gnn_params_from_json(j);
}

struct OutputSpec {
  std::string path;
  std::string format;
};

OutputSpec output_spec(const json& cfg, const Options& opt, const char* default_format,
                       bool required) {
  OutputSpec o;
  const json out = cfg.value("output", json::object());
  o.path = !opt.out_path.empty() ? opt.out_path : out.value("path", "");
  o.format = !opt.format.empty() ? opt.format : out.value("format", default_format);
  if (o.format != "csv" && o.format != "json")
    throw std::invalid_argument("output.format: must be 'csv' or 'json'");
  if (required && o.path.empty())
    throw std::invalid_argument("output.path (or --out) is required for this command");
  return o;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("output: cannot open '" + path + "'");
  out << body;
}

std::string report_body(const std::vector<BoundReport>& rows, const std::string& format) {
  if (format == "csv") return bound_reports_to_csv(rows);
  return bound_reports_to_json(rows).dump(2) + "\n";
}

int count_pass(const std::vector<BoundReport>& rows) {
  int n = 0;
  for (const BoundReport& r : rows) n += r.pass.has_value() && *r.pass;
  return n;
}

// Two specs describe discretizations of one operator iff they agree up to the
// resolution key; the paired estimator is meaningless otherwise.
bool same_base_spec(json a, json b) {
  a.erase("resolution");
  b.erase("resolution");
  return a == b;
}

int cmd_distance(const json& cfg, const Options& opt) {
  const RunSettings s = settings_from_config(cfg, opt);
  const json& spec_a = cfg.at("operator");
  if (!cfg.contains("operator_b"))
    throw std::invalid_argument("operator_b: distance needs two operator specs");
  const json& spec_b = cfg.at("operator_b");
  if (s.profile.estimator == ProfileConfig::Estimator::Paired && !same_base_spec(spec_a, spec_b))
    throw HypothesisError(
        "paired estimator needs two discretizations of one operator spec; use estimator=cross");
  const POperator A = operator_from_spec(spec_a, opt);
  const POperator B = operator_from_spec(spec_b, opt);
  const OutputSpec out = output_spec(cfg, opt, "json", true);
  if (out.format != "json") throw std::invalid_argument("output.format: distance reports are json");
  const DmReport rep = dm_estimate(A, B, s.k_max, s.profile);
  write_file(out.path, dm_report_to_json(rep).dump(2) + "\n");
  std::printf("distance %s vs %s: total %.17g, remainder bound %.17g -> %s\n", A.name().c_str(),
              B.name().c_str(), rep.total, rep.remainder_bound, out.path.c_str());
  return 0;
}

int cmd_sweep(const json& cfg, const Options& opt) {
  const RunSettings s = settings_from_config(cfg, opt);
  const POperator A = continuum_operator(cfg, opt);
  const std::vector<int> resolutions = resolutions_from_config(cfg);
  const Theorem theorem = theorem_from_name(cfg.at("theorem").get<std::string>());
  SweepConfig sweep;
  sweep.profile = s.profile;
  sweep.k_max = s.k_max;
  sweep.variant = variant_from_name(
      cfg.value("variant", std::string("lipschitz-to-lipschitz")));
  if (theorem == Theorem::Thm43Approx || theorem == Theorem::Thm43Transfer ||
      theorem == Theorem::LemmaE3)
    sweep.gnn = gnn_from_config(cfg, opt);
  if (opt.strict)
    for (int r : resolutions)
      if (!A.constants().resolutions.contains(r))
        throw HypothesisError("resolution " + std::to_string(r) +
                              " is outside the declared set of " + A.name());
  const std::vector<BoundReport> rows = run_resolution_sweep(A, resolutions, sweep, theorem);
  const OutputSpec out = output_spec(cfg, opt, "csv", true);
  write_file(out.path, report_body(rows, out.format));
  std::printf("sweep %s over %s: %zu rows, %d pass -> %s\n", theorem_name(theorem),
              A.name().c_str(), rows.size(), count_pass(rows), out.path.c_str());
  return 0;
}

int cmd_gnn_compare(const json& cfg, const Options& opt) {
  const RunSettings s = settings_from_config(cfg, opt);
  const POperator A = continuum_operator(cfg, opt);
  const std::vector<int> resolutions = resolutions_from_config(cfg);
  SweepConfig sweep;
  sweep.profile = s.profile;
  sweep.k_max = s.k_max;
  sweep.variant = variant_from_name(
      cfg.value("variant", std::string("lipschitz-to-lipschitz")));
  sweep.gnn = gnn_from_config(cfg, opt);
  std::vector<BoundReport> rows = run_resolution_sweep(A, resolutions, sweep, Theorem::LemmaE3);
  const std::vector<BoundReport> net =
      run_resolution_sweep(A, resolutions, sweep, Theorem::Thm43Approx);
  rows.insert(rows.end(), net.begin(), net.end());
  const OutputSpec out = output_spec(cfg, opt, "csv", true);
  write_file(out.path, report_body(rows, out.format));
  std::printf("gnn-compare over %s: %zu rows, %d pass -> %s\n", A.name().c_str(), rows.size(),
              count_pass(rows), out.path.c_str());
  return 0;
}

struct CheckRow {
  std::string check;
  int resolution = 0;  // 0 when not tied to a resolution
  CheckReport rep;
};

std::string check_rows_to_csv(const std::vector<CheckRow>& rows) {
  std::string out = "check,resolution,pass,measured,threshold,trials,witness\n";
  for (const CheckRow& r : rows) {
    out += r.check + ',' + std::to_string(r.resolution) + ',';
    out += r.rep.pass ? "true" : "false";
    out += ',' + format_double(r.rep.measured) + ',' + format_double(r.rep.threshold);
    out += ',' + std::to_string(r.rep.trials) + ',' + r.rep.witness + '\n';
  }
  return out;
}

json check_rows_to_json(const std::vector<CheckRow>& rows) {
  json arr = json::array();
  for (const CheckRow& r : rows)
    arr.push_back({{"check", r.check},
                   {"resolution", r.resolution},
                   {"pass", r.rep.pass},
                   {"measured", r.rep.measured},
                   {"threshold", r.rep.threshold},
                   {"trials", r.rep.trials},
                   {"witness", r.rep.witness}});
  return arr;
}

int cmd_check(const json& cfg, const Options& opt) {
  const RunSettings s = settings_from_config(cfg, opt);
  const POperator A = operator_from_spec(cfg.at("operator"), opt);
  const int trials = s.profile.num_tuples;
  const std::uint64_t seed = s.profile.seed;
  std::vector<CheckRow> rows;

  rows.push_back(
      {"lipschitz-map", 0, check_lipschitz_map(A, A.constants().C_A, trials, split_seed(seed, 1))});

  if (A.is_self_adjoint()) {
    const SymmetryReport sym = check_self_adjoint(A, trials, split_seed(seed, 2));
    CheckReport rep;
    rep.pass = sym.pass;
    rep.measured = sym.max_asymmetry;
    rep.threshold = 1e-9;
    rep.trials = trials;
    if (!sym.pass) rep.witness = "inner-product asymmetry " + format_double(sym.max_asymmetry);
    rows.push_back({"self-adjoint", 0, rep});
  }

  if (A.domain() == Domain::Continuum && cfg.contains("resolutions")) {
    const PieceFlags flags = A.constants().flags;
    int tag = 3;
    for (int r : resolutions_from_config(cfg)) {
      if (flags.constant_to_constant)
        rows.push_back({"constant-to-constant", r,
                        check_piece_structure(A, r, PieceMode::ConstantToConstant, trials,
                                              split_seed(seed, tag++))});
      if (flags.constant_to_lipschitz && A.constants().C_c)
        rows.push_back({"constant-to-lipschitz", r,
                        check_piece_structure(A, r, PieceMode::ConstantToLipschitz, trials,
                                              split_seed(seed, tag++), *A.constants().C_c)});
      if (flags.lipschitz_to_lipschitz)
        rows.push_back({"lipschitz-to-lipschitz", r,
                        check_piece_structure(A, r, PieceMode::LipschitzToLipschitz, trials,
                                              split_seed(seed, tag++), s.profile.C_v)});
    }
  }

  int pass = 0;
  for (const CheckRow& r : rows) pass += r.rep.pass;
  const OutputSpec out = output_spec(cfg, opt, "csv", true);
  write_file(out.path, out.format == "csv" ? check_rows_to_csv(rows)
                                           : check_rows_to_json(rows).dump(2) + "\n");
  std::printf("check %s: %d of %zu assumptions pass -> %s\n", A.name().c_str(), pass, rows.size(),
              out.path.c_str());
  if (opt.strict && pass != static_cast<int>(rows.size()))
    throw HypothesisError("strict: an assumption check failed");
  return 0;
}

// Pure formula evaluation, no measurement.
int cmd_bound(const json& cfg, const Options& opt) {
  const json b = cfg.value("bound", json::object());
  const Theorem theorem = theorem_from_name(b.at("theorem").get<std::string>());
  const BoundVariant variant =
      variant_from_name(b.value("variant", std::string("lipschitz-to-lipschitz")));
  BoundReport row;
  row.theorem = theorem;
  BoundConstants& c = row.constants;
  c.C_A = b.value("C_A", 1.0);
  c.C_v = b.value("C_v", 1.0);
  c.C_c = b.value("C_c", 0.0);
  c.K = b.value("K", 1);
  c.L = b.value("L", 1);
  c.n_max = b.value("n_max", 1);
  c.n = b.at("n").get<int>();
  c.m = b.value("m", 0);
  switch (theorem) {
    case Theorem::Thm41:
      row.bound_value = thm41_bound(c.C_A, c.C_v, c.n);
      break;
    case Theorem::Cor42:
      row.bound_value = cor42_bound(c.C_A, c.C_v, b.at("m").get<int>(), c.n);
      break;
    case Theorem::Thm43Approx:
      row.variant = variant;
      row.bound_value = thm43_bound(c.C_A, c.C_v, c.K, c.L, c.n_max, c.n, variant, c.C_c);
      break;
    case Theorem::Thm43Transfer:
      row.bound_value = thm43_transfer_bound(c.C_A, c.C_v, c.K, c.L, c.n_max, b.at("m").get<int>(), c.n);
      break;
    case Theorem::GeneralD1:
      row.variant = variant;
      row.bound_value = general_approx_bound(c.C_A, c.C_v, c.C_c, c.n, variant);
      break;
    case Theorem::LemmaE3:
      row.variant = variant;
      row.bound_value = lemma_e3_bound(c.C_A, c.C_v, c.C_c, c.K, c.L, c.n_max, c.n, variant);
      break;
  }
  const OutputSpec out = output_spec(cfg, opt, "csv", false);
  if (!out.path.empty()) write_file(out.path, report_body({row}, out.format));
  std::printf("%s bound at n=%d: %.17g\n", theorem_name(theorem), c.n, row.bound_value);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"operator-limit experiments: distances, bounds, and assumption checks"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON experiment config")->required();
    sub->add_option("--out", opt.out_path, "report path (overrides config output.path)");
    sub->add_option("--format", opt.format, "csv or json (overrides config output.format)");
    sub->add_option("--seed", opt.seed, "root seed (overrides config seed)");
    sub->add_option("--threads", opt.threads, "worker threads (overrides config threads)");
    sub->add_flag("--strict", opt.strict, "fail on hypothesis violations");
    return sub;
  };

  CLI::App* dist = add_common(app.add_subcommand("distance", "estimate the operator metric"));
  CLI::App* sweep = add_common(app.add_subcommand("sweep", "bound vs estimate per resolution"));
  CLI::App* gnnc =
      add_common(app.add_subcommand("gnn-compare", "network gap and metric bounds"));
  CLI::App* check = add_common(app.add_subcommand("check", "statistical assumption checks"));
  CLI::App* bound = add_common(app.add_subcommand("bound", "evaluate a bound formula"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  try {
    const json cfg = load_config(opt);
    if (*dist) return cmd_distance(cfg, opt);
    if (*sweep) return cmd_sweep(cfg, opt);
    if (*gnnc) return cmd_gnn_compare(cfg, opt);
    if (*check) return cmd_check(cfg, opt);
    if (*bound) return cmd_bound(cfg, opt);
    throw std::logic_error("no subcommand");
  } catch (const CoefficientBoundError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const HypothesisError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
