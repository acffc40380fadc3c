#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <thread>

#include "rfim/contour_enum.hpp"
#include "rfim/contours.hpp"
#include "rfim/csv.hpp"
#include "rfim/disorder.hpp"
#include "rfim/energy_bounds.hpp"
#include "rfim/metropolis.hpp"
#include "rfim/triangles.hpp"

namespace rfim::cli {
namespace {

using json = nlohmann::json;

struct Options {
  double alpha = 0.55;
  double beta = 1.0;
  double theta = 0.05;
  double j1 = 10.0;
  std::size_t size = 512;
  std::size_t sweeps = 10'000;
  std::size_t burnin = 1'000;
  std::uint64_t seed = 0;
  std::size_t realizations = 64;
  std::string boundary = "+";
  std::optional<double> c;
  double gamma = 0.1;
  int mmax = 0;
  std::optional<std::size_t> n;
  std::string out;
  std::string format;
  unsigned jobs = 0;
  bool deterministic = false;
  std::string betas;
  std::string thetas;
  std::string distribution = "bernoulli";
  std::size_t samples = 0;
};

struct Validation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int parse_boundary(const std::string& s) {
  if (s == "+" || s == "+1" || s == "1") return 1;
  if (s == "-" || s == "-1") return -1;
  throw Validation("--boundary must be + or -");
}

void require_zeta_range(double alpha) {
  if (!(alpha >= 0.0 && alpha < alpha_critical())) {
    std::ostringstream msg;
    msg << "--alpha " << alpha << " is outside [0, " << alpha_critical()
        << "): the energy bounds need zeta(alpha) > 0";
    throw Validation(msg.str());
  }
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Validation(std::string(flag) + ": not a number: '" + item + "'");
    }
  }
  if (v.empty()) throw Validation(std::string(flag) + ": empty list");
  return v;
}

unsigned jobs_of(const Options& o) {
  if (o.jobs > 0) return o.jobs;
  return std::max(1U, std::thread::hardware_concurrency());
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Output sink: file named by --out or the caller's stream.
class Sink {
 public:
  Sink(const Options& o, std::ostream& fallback) : stream_(&fallback) {
    if (!o.out.empty()) {
      file_.open(o.out, std::ios::binary | std::ios::trunc);
      if (!file_) throw Validation("cannot open --out file '" + o.out + "'");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string format_of(const Options& o, const char* fallback) {
  if (!o.format.empty()) return o.format;
  const auto ends = [&](std::string_view ext) {
    return o.out.size() >= ext.size() && o.out.compare(o.out.size() - ext.size(), ext.size(), ext) == 0;
  };
  if (ends(".json")) return "json";
  if (ends(".csv")) return "csv";
  return fallback;
}

/// Config echoed into every artifact.
json describe(const std::string& command, json extra) {
  json cfg = std::move(extra);
  cfg["command"] = command;
  return cfg;
}

void write_json(std::ostream& out, json body, const json& config, const Options& o) {
  body["config"] = config;
  body["schema"] = 1;
  if (!o.deterministic) body["timestamp"] = timestamp();
  out << body.dump(2) << '\n';
}

/// Header comment lines after the schema line.
void csv_preamble(std::ostream& out, const json& config, const Options& o) {
  out << csv::kSchemaLine << '\n';
  out << "# config=" << config.dump() << '\n';
  if (!o.deterministic) out << "# timestamp=" << timestamp() << '\n';
}

/// Writes a CSV produced by a library writer (which emits its own schema line)
/// after the preamble.
template <class Writer>
void csv_body(std::ostream& out, const json& config, const Options& o, Writer&& write) {
  std::ostringstream body;
  write(body);
  std::string text = body.str();
  const std::string schema = std::string(csv::kSchemaLine) + "\n";
  if (text.rfind(schema, 0) == 0) text.erase(0, schema.size());
  csv_preamble(out, config, o);
  out << text;
}

json chain_json(const ChainEstimate& e) {
  return {{"field_seed", e.field_seed},
          {"chain_seed", e.chain_seed},
          {"estimate", e.estimate},
          {"stderr", e.standard_error},
          {"samples", e.samples},
          {"minus_at_origin", e.minus_at_origin},
          {"contour_at_origin", e.contour_at_origin},
          {"basic1_violations", e.basic1_violations},
          {"acceptance", e.acceptance},
          {"max_drift", e.max_drift},
          {"drift_checks", e.drift_checks}};
}

RunConfig run_config(const Options& o) {
  RunConfig rc;
  rc.alpha = o.alpha;
  rc.beta = o.beta;
  rc.theta = o.theta;
  rc.j1 = o.j1;
  rc.size = o.size;
  rc.sweeps = o.sweeps;
  rc.burnin = o.burnin;
  rc.seed = o.seed;
  rc.boundary = parse_boundary(o.boundary);
  rc.realizations = o.realizations;
  rc.distribution = parse_field_distribution(o.distribution);
  rc.c = o.c.value_or(3.0);
  rc.jobs = jobs_of(o);
  rc.validate();
  return rc;
}

json run_config_json(const RunConfig& rc) {
  return {{"alpha", rc.alpha},       {"beta", rc.beta},
          {"theta", rc.theta},       {"j1", rc.j1},
          {"size", rc.size},         {"sweeps", rc.sweeps},
          {"burnin", rc.burnin},     {"seed", rc.seed},
          {"boundary", rc.boundary}, {"realizations", rc.realizations},
          {"distribution", std::string(to_string(rc.distribution))},
          {"c", rc.c}};
}

json report_json(const RunReport& rep) {
  json chains = json::array();
  for (const auto& e : rep.realizations) chains.push_back(chain_json(e));
  return {{"mean", rep.mean},
          {"stderr", rep.standard_error},
          {"contour_fraction", rep.contour_fraction},
          {"basic1_violations", rep.basic1_violations},
          {"max_drift", rep.max_drift},
          {"b_bar", rep.b_bar},
          {"reference_100", rep.reference_100},
          {"reference_200", rep.reference_200},
          {"realizations", chains}};
}

int cmd_simulate(const Options& o, std::ostream& out) {
  require_zeta_range(o.alpha);
  const RunConfig rc = run_config(o);
  const RunReport rep = disorder_sweep(rc);
  const json config = describe("simulate", run_config_json(rc));
  Sink sink(o, out);
  if (format_of(o, "json") == "json") {
    write_json(sink.get(), report_json(rep), config, o);
  } else {
    csv_body(sink.get(), config, o, [&](std::ostream& s) { write_run_csv(s, rep); });
  }
  return rep.basic1_violations == 0 && rep.max_drift <= kDriftTolerance ? kOk : kFailed;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  require_zeta_range(o.alpha);
  const auto betas = o.betas.empty() ? std::vector<double>{o.beta} : parse_list(o.betas, "--beta");
  const auto thetas =
      o.thetas.empty() ? std::vector<double>{o.theta} : parse_list(o.thetas, "--theta");
  RunConfig base = run_config(o);
  json cfg = run_config_json(base);
  cfg["betas"] = betas;
  cfg["thetas"] = thetas;
  cfg.erase("beta");
  cfg.erase("theta");
  const json config = describe("sweep", cfg);

  json rows = json::array();
  std::vector<RunReport> reports;
  bool ok = true;
  for (double b : betas)
    for (double t : thetas) {
      RunConfig rc = base;
      rc.beta = b;
      rc.theta = t;
      rc.validate();
      reports.push_back(disorder_sweep(rc));
      const auto& rep = reports.back();
      ok = ok && rep.basic1_violations == 0 && rep.max_drift <= kDriftTolerance;
      json row = report_json(rep);
      row.erase("realizations");
      row["beta"] = b;
      row["theta"] = t;
      rows.push_back(row);
    }
  Sink sink(o, out);
  if (format_of(o, "csv") == "json") {
    write_json(sink.get(), {{"points", rows}}, config, o);
  } else {
    auto& s = sink.get();
    csv_preamble(s, config, o);
    s << "beta,theta,mean,stderr,contour_fraction,b_bar,reference_100,reference_200,"
         "basic1_violations\n";
    for (const auto& rep : reports)
      s << csv::number(rep.config.beta) << ',' << csv::number(rep.config.theta) << ','
        << csv::number(rep.mean) << ',' << csv::number(rep.standard_error) << ','
        << csv::number(rep.contour_fraction) << ',' << csv::number(rep.b_bar) << ','
        << csv::number(rep.reference_100) << ',' << csv::number(rep.reference_200) << ','
        << rep.basic1_violations << '\n';
  }
  return ok ? kOk : kFailed;
}

int cmd_verify_energy(const Options& o, std::ostream& out) {
  require_zeta_range(o.alpha);
  const std::size_t n = o.n.value_or(12);
  const CouplingSpec spec{o.alpha, o.j1, 1e-10};
  spec.validate();
  const SeparationConstant c = o.c ? SeparationConstant{*o.c} : choose_C();
  const EnergySweep sweep = verify_energy_exhaustive(spec, n, c, true, jobs_of(o));
  const bool ok = sweep.all_pass() && sweep.max_telescoping_residual <= kBoundTolerance;
  const json config = describe("verify-energy",
                               {{"alpha", o.alpha}, {"j1", o.j1}, {"n", n}, {"c", c.value}});
  Sink sink(o, out);
  if (format_of(o, "csv") == "json") {
    json reports = json::array();
    for (const auto& r : sweep.reports)
      reports.push_back({{"instance", r.instance}, {"check", r.check}, {"level", r.level},
                         {"lhs", r.lhs}, {"rhs", r.rhs}, {"margin", r.margin}, {"pass", r.pass}});
    write_json(sink.get(),
               {{"configurations", sweep.configurations},
                {"checks", sweep.checks},
                {"failures", sweep.failures},
                {"min_margin_smallest", sweep.min_margin_smallest},
                {"min_margin_prefix", sweep.min_margin_prefix},
                {"min_margin_contour", sweep.min_margin_contour},
                {"max_telescoping_residual", sweep.max_telescoping_residual},
                {"pass", ok},
                {"reports", reports}},
               config, o);
  } else {
    csv_body(sink.get(), config, o,
             [&](std::ostream& s) { write_bound_csv(s, sweep.reports); });
  }
  return ok ? kOk : kFailed;
}

int cmd_verify_disorder(const Options& o, std::ostream& out) {
  require_zeta_range(o.alpha);
  const std::size_t n = o.n.value_or(10);
  const CouplingSpec spec{o.alpha, o.j1, 1e-10};
  spec.validate();
  if (!(o.beta > 0.0)) throw Validation("--beta must be positive for verify-disorder");
  if (!(o.theta >= 0.0)) throw Validation("--theta must be >= 0");
  const Contour gamma(nested_two_class_example());
  const ConstrainedEnsemble ens(spec, gamma, Volume::centered(n));

  json levels = json::array();
  bool ok = true;
  for (int j = 0; j < ens.levels(); ++j) {
    const auto anti = check_antisymmetry(ens, j, o.theta, o.beta);
    const auto zero = check_antisymmetry(ens, j, 0.0, o.beta);
    // theta = 0 must give F_j = 0 exactly, not just to tolerance.
    const bool degenerate = zero.max_abs_sum == 0.0 && zero.mean == 0.0;
    ok = ok && anti.pass && degenerate;
    levels.push_back({{"j", j},
                      {"flip_set_size", ens.flips(j).size()},
                      {"antisymmetry_max_abs", anti.max_abs_sum},
                      {"mean_F", anti.mean},
                      {"antisymmetry_pass", anti.pass},
                      {"theta_zero_exact", degenerate}});
  }
  const auto fd = parse_field_distribution(o.distribution);
  const EventReport events =
      estimate_event_probabilities(ens, o.theta, o.beta, o.samples, fd, o.seed);
  const bool partition = events.partition_failures == 0 &&
                         std::abs(events.total_probability - 1.0) <= 1e-9;
  ok = ok && partition;

  json cfg{{"alpha", o.alpha}, {"j1", o.j1},   {"beta", o.beta},
           {"theta", o.theta}, {"n", n},       {"seed", o.seed},
           {"samples", events.realizations},   {"distribution", o.distribution}};
  json tri = json::array();
  for (const auto& t : gamma.triangles()) tri.push_back({t.left, t.right});
  cfg["contour"] = tri;
  const json config = describe("verify-disorder", cfg);

  Sink sink(o, out);
  if (format_of(o, "csv") == "json") {
    json ev = json::array();
    for (const auto& e : events.events)
      ev.push_back({{"j", e.j}, {"estimate", e.estimate}, {"stderr", e.standard_error},
                    {"bound", e.bound}, {"pass", e.pass}});
    write_json(sink.get(),
               {{"levels", levels},
                {"events", ev},
                {"exhaustive", events.exhaustive},
                {"partition_failures", events.partition_failures},
                {"total_probability", events.total_probability},
                {"b_bar", b_bar(o.beta, o.theta, o.alpha)},
                {"pass", ok}},
               config, o);
  } else {
    const std::vector<EventReport> one{events};
    csv_body(sink.get(), config, o, [&](std::ostream& s) { write_event_csv(s, one); });
  }
  return ok ? kOk : kFailed;
}

std::string family_text(const TriangleFamily& f) {
  std::string s;
  for (const auto& t : f) {
    if (!s.empty()) s += ' ';
    s += std::to_string(t.left) + ':' + std::to_string(t.right);
  }
  return s;
}

int cmd_enumerate(const Options& o, std::ostream& out) {
  const int mmax = o.mmax > 0 ? o.mmax : 3;
  const SeparationConstant c = o.c ? SeparationConstant{*o.c} : choose_C();
  ContourEnumerator en(c, std::max(kEnumerationCap, mmax), jobs_of(o));
  if (mmax > kEnumerationCap)
    throw Validation("--mmax above the enumeration cap of " + std::to_string(kEnumerationCap));
  const json config = describe("enumerate-contours", {{"mmax", mmax}, {"c", c.value}});
  Sink sink(o, out);
  auto& s = sink.get();
  if (format_of(o, "csv") == "json") {
    json per_m = json::array();
    for (int m = 1; m <= mmax; ++m) {
      json list = json::array();
      for (const auto& g : en.origin_contours(m)) list.push_back(family_text(g.triangles()));
      per_m.push_back({{"m", m}, {"count", list.size()}, {"contours", list}});
    }
    write_json(s, {{"masses", per_m}}, config, o);
  } else {
    csv_preamble(s, config, o);
    s << "m,index,triangles,classes\n";
    for (int m = 1; m <= mmax; ++m) {
      const auto list = en.origin_contours(m);
      for (std::size_t i = 0; i < list.size(); ++i)
        s << m << ',' << i << ',' << family_text(list[i].triangles()) << ','
          << list[i].classes().size() << '\n';
    }
  }
  return kOk;
}

int cmd_certify(const Options& o, std::ostream& out, std::ostream& err) {
  const int mmax = o.mmax > 0 ? o.mmax : 6;
  if (mmax > kEnumerationCap)
    throw Validation("--mmax above the enumeration cap of " + std::to_string(kEnumerationCap));
  WeightSpec{1.0, o.gamma}.validate();
  const SeparationConstant c = o.c ? SeparationConstant{*o.c} : choose_C();
  const auto grid = default_b_grid();
  const C0Certificate cert = certify_C0(o.gamma, mmax, grid, c, kEnumerationCap, jobs_of(o));
  json cfg{{"gamma", o.gamma}, {"mmax", mmax}, {"c", c.value}, {"b_grid", grid}};
  const json config = describe("certify-c0", cfg);
  const std::string star = cert.b_star ? csv::number(*cert.b_star) : "none";

  Sink sink(o, out);
  if (format_of(o, "csv") == "json") {
    json rows = json::array();
    for (const auto& r : cert.rows)
      rows.push_back({{"m", r.m}, {"b", r.b}, {"gamma", r.gamma}, {"weight_sum", r.weight_sum},
                      {"bound", r.bound}, {"pass", r.pass}});
    json body{{"rows", rows}, {"contour_counts", cert.contour_counts}};
    body["b_star"] = cert.b_star ? json(*cert.b_star) : json(nullptr);
    write_json(sink.get(), body, config, o);
  } else {
    csv_body(sink.get(), config, o, [&](std::ostream& s) {
      write_certificate_csv(s, cert);
      s << "# b_star=" << star << '\n';
    });
  }
  if (!o.out.empty()) out << "b_star=" << star << '\n';
  if (!cert.b_star) err << "no grid value certifies the bound\n";
  return cert.b_star ? kOk : kFailed;
}

int cmd_roundtrip(const Options& o, std::ostream& out) {
  const std::size_t n = o.n.value_or(14);
  if (n < 1 || n > 24) throw Validation("--n must be in [1, 24]");
  const Volume vol = Volume::centered(n);
  std::size_t roundtrip_failures = 0, separation_failures = 0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t bits = 0; bits < count; ++bits) {
    const auto sigma = SpinConfiguration::from_bits(vol, bits);
    const auto family = spins_to_triangles(sigma);
    if (triangles_to_spins(family, vol) != sigma) ++roundtrip_failures;
    if (!satisfies_separation_rule(family)) ++separation_failures;
  }
  const bool ok = roundtrip_failures == 0 && separation_failures == 0;
  const json config = describe("roundtrip-test", {{"n", n}});
  Sink sink(o, out);
  if (format_of(o, "csv") == "json") {
    write_json(sink.get(),
               {{"configurations", count},
                {"roundtrip_failures", roundtrip_failures},
                {"separation_failures", separation_failures},
                {"pass", ok}},
               config, o);
  } else {
    auto& s = sink.get();
    csv_preamble(s, config, o);
    s << "n,configurations,roundtrip_failures,separation_failures,pass\n"
      << n << ',' << count << ',' << roundtrip_failures << ',' << separation_failures << ','
      << csv::boolean(ok) << '\n';
  }
  return ok ? kOk : kFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Long-range random-field Ising model: contour geometry, bound checks, sampling"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file (TOML/INI); command-line flags take precedence");

  app.add_option("--alpha", o.alpha, "Decay exponent: J(n) = n^(alpha-2) for n >= 2");
  app.add_option("--beta", o.betas, "Inverse temperature (comma list for sweep)");
  app.add_option("--theta", o.thetas, "Field strength (comma list for sweep)");
  app.add_option("--j1", o.j1, "Nearest-neighbour coupling J(1)");
  app.add_option("--size", o.size, "Volume size for sampling");
  app.add_option("--sweeps", o.sweeps, "Sweeps per chain including burn-in");
  app.add_option("--burnin", o.burnin, "Burn-in sweeps");
  app.add_option("--seed", o.seed, "Master seed")->envname("RFIM_SEED");
  app.add_option("--realizations", o.realizations, "Disorder realizations");
  app.add_option("--boundary", o.boundary, "Boundary condition")->check(CLI::IsMember({"+", "-", "+1", "-1"}));
  app.add_option("--c", o.c, "Separation constant override");
  app.add_option("--gamma", o.gamma, "Weight exponent for certify-c0");
  app.add_option("--mmax", o.mmax, "Largest contour mass");
  app.add_option("--n", o.n, "Exhaustive volume size");
  app.add_option("--out", o.out, "Write the result to this file");
  app.add_option("--format", o.format, "Output encoding")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--jobs", o.jobs, "Worker threads (0: all cores)");
  app.add_flag("--deterministic", o.deterministic, "Omit the timestamp");
  app.add_option("--distribution", o.distribution, "Field law")
      ->check(CLI::IsMember({"bernoulli", "gaussian", "subgaussian"}));
  app.add_option("--samples", o.samples, "Field samples for verify-disorder (0: exhaustive)");

  auto* simulate = app.add_subcommand("simulate", "Disorder-averaged Metropolis estimate");
  auto* verify_energy = app.add_subcommand("verify-energy", "Exhaustive deterministic bounds");
  auto* verify_disorder = app.add_subcommand("verify-disorder", "Antisymmetry and event checks");
  auto* enumerate = app.add_subcommand("enumerate-contours", "List contours through the origin");
  auto* certify = app.add_subcommand("certify-c0", "Entropy certificate and empirical b*");
  auto* sweep = app.add_subcommand("sweep", "Metropolis over a beta x theta grid");
  auto* roundtrip = app.add_subcommand("roundtrip-test", "Spin/triangle bijection check");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }

  try {
    if (!o.betas.empty() && o.betas.find(',') == std::string::npos)
      o.beta = parse_list(o.betas, "--beta").front();
    if (!o.thetas.empty() && o.thetas.find(',') == std::string::npos)
      o.theta = parse_list(o.thetas, "--theta").front();
    const bool list_given = o.betas.find(',') != std::string::npos ||
                            o.thetas.find(',') != std::string::npos;
    if (list_given && !sweep->parsed())
      throw Validation("comma-separated --beta/--theta lists are only accepted by sweep");
    if (sweep->parsed()) return cmd_sweep(o, out);
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (verify_energy->parsed()) return cmd_verify_energy(o, out);
    if (verify_disorder->parsed()) return cmd_verify_disorder(o, out);
    if (enumerate->parsed()) return cmd_enumerate(o, out);
    if (certify->parsed()) return cmd_certify(o, out, err);
    if (roundtrip->parsed()) return cmd_roundtrip(o, out);
  } catch (const Validation& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}

}  // namespace rfim::cli
