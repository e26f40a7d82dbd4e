// imgeo: command-line front end (gff, flow, sle, spacefill, verify).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "imgeo/error.hpp"
#include "imgeo/flow.hpp"
#include "imgeo/gff.hpp"
#include "imgeo/io.hpp"
#include "imgeo/loewner.hpp"
#include "imgeo/params.hpp"
#include "imgeo/rng.hpp"
#include "imgeo/spacefill.hpp"
#include "imgeo/stats.hpp"

#ifndef IMGEO_GOLDEN_DIR
#define IMGEO_GOLDEN_DIR "golden"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace imgeo;

namespace {

constexpr const char* kVersion = "1.0.0";

// Thrown for bad user input; main maps it to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Params {
  double kappa = 2.0;
  std::vector<double> rho;
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<double> theta = {0.0};
  int mesh = 16;
  int n = 129;
  double dt = 1e-4;
  double t0 = 0.0;
  double horizon = 1.0;
  double burn_in = 0.0;
  long resolution = 50;
  int starts = 1;
  std::vector<double> at;  // x,y of a single start
  std::vector<double> eps;
  std::string kind = "chordal";
  bool reverse = false;
  bool estimate_beta = false;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::vector<std::string> tests;
  std::string golden = IMGEO_GOLDEN_DIR;
};

json params_json(const Params& p) {
  return {{"kappa", p.kappa},        {"rho", p.rho},
          {"alpha", p.alpha},        {"beta", p.beta},
          {"theta", p.theta},        {"mesh", p.mesh},
          {"n", p.n},                {"dt", p.dt},
          {"t0", p.t0},              {"horizon", p.horizon},
          {"burn-in", p.burn_in},    {"resolution", p.resolution},
          {"starts", p.starts},      {"at", p.at},
          {"eps", p.eps},            {"kind", p.kind},
          {"reverse", p.reverse},    {"estimate-beta", p.estimate_beta},
          {"seed", p.seed},          {"test", p.tests},
          {"golden", p.golden}};
}

// Config values fill every option not given on the command line. A run
// manifest is accepted too: its "params" object is used.
void apply_config(Params& p, const std::string& path, const CLI::App& cmd) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw UsageError("invalid --config " + path + ": " + e.what());
  } catch (const Error& e) {
    throw UsageError(std::string("invalid --config: ") + e.what());
  }
  if (j.contains("params")) j = j["params"];
  if (!j.is_object()) throw UsageError("invalid --config: expected a JSON object");
  auto given = [&](const std::string& name) {
    const CLI::Option* o = cmd.get_option_no_throw("--" + name);
    return o && o->count() > 0;
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (given(k)) continue;
    try {
      if (k == "kappa") p.kappa = it->get<double>();
      else if (k == "rho") p.rho = it->get<std::vector<double>>();
      else if (k == "alpha") p.alpha = it->get<double>();
      else if (k == "beta") p.beta = it->get<double>();
      else if (k == "theta") p.theta = it->get<std::vector<double>>();
      else if (k == "mesh") p.mesh = it->get<int>();
      else if (k == "n") p.n = it->get<int>();
      else if (k == "dt") p.dt = it->get<double>();
      else if (k == "t0") p.t0 = it->get<double>();
      else if (k == "horizon") p.horizon = it->get<double>();
      else if (k == "burn-in") p.burn_in = it->get<double>();
      else if (k == "resolution") p.resolution = it->get<long>();
      else if (k == "starts") p.starts = it->get<int>();
      else if (k == "at") p.at = it->get<std::vector<double>>();
      else if (k == "eps") p.eps = it->get<std::vector<double>>();
      else if (k == "kind") p.kind = it->get<std::string>();
      else if (k == "reverse") p.reverse = it->get<bool>();
      else if (k == "estimate-beta") p.estimate_beta = it->get<bool>();
      else if (k == "seed") p.seed = it->get<std::uint64_t>();
      else if (k == "test") p.tests = it->get<std::vector<std::string>>();
      else if (k == "golden") p.golden = it->get<std::string>();
      else if (k == "out") {
        if (!given("out")) p.out = it->get<std::string>();
      } else
        throw UsageError("invalid --config: unknown key '" + k + "'");
    } catch (const json::exception&) {
      throw UsageError("invalid --config: wrong type for '" + k + "'");
    }
  }
}

void require(bool ok, const std::string& param, const std::string& why) {
  if (!ok) throw UsageError("invalid --" + param + ": " + why);
}

// Collects output files and writes the manifest last.
class Outputs {
 public:
  Outputs(std::string sub, const Params& p) : sub_(std::move(sub)), p_(p) {
    fs::create_directories(p.out);
  }

  std::string path(const std::string& name) const { return (fs::path(p_.out) / name).string(); }

  template <class F>
  void write(const std::string& name, F&& body, bool binary = false) {
    {
      std::ofstream os(path(name), binary ? std::ios::binary : std::ios::out);
      if (!os) throw InputError("cannot write " + path(name));
      body(os);
    }
    files_.push_back(name);
  }

  void add(const std::string& name) { files_.push_back(name); }

  void manifest(const json& extra = json::object()) const {
    json m;
    m["tool"] = "imgeo";
    m["version"] = kVersion;
    m["compiler"] = __VERSION__;
    m["subcommand"] = sub_;
    m["params"] = params_json(p_);
    m["params"]["out"] = p_.out;
    m["seed_scheme"] = "trial seed = split_seed(run seed, stream)";
    json hashes = json::object();
    for (const auto& f : files_) hashes[f] = file_sha256(path(f));
    m["outputs"] = hashes;
    if (!extra.empty()) m["results"] = extra;
    std::ofstream os(path("manifest.json"));
    os << m.dump(2) << '\n';
  }

 private:
  std::string sub_;
  const Params& p_;
  std::vector<std::string> files_;
};

FieldGrid sample_field(const Params& p) {
  require(p.n >= 3, "n", "grid needs at least 3 vertices per side");
  FieldGrid g = sample_zero_boundary(p.n, default_spacing(p.n), split_seed(p.seed, 0));
  if (p.alpha != 0.0 || p.beta != 0.0) g = add_singularity(std::move(g), g.window.center(), p.alpha, p.beta);
  return g;
}

void check_kappa_flow(double kappa) { require(kappa > 0 && kappa < 4, "kappa", "flow lines need kappa in (0,4)"); }

int cmd_gff(const Params& p) {
  check_kappa_flow(p.kappa);
  const FieldGrid g = sample_field(p);
  Outputs out("gff", p);
  write_grid(g, out.path("field.grid"));
  out.add("field.grid");
  out.write("field.json", [&](std::ostream& os) { os << grid_sidecar(g).dump(2) << '\n'; });
  out.write("field.ppm", [&](std::ostream& os) { write_field_ppm(os, g); }, true);
  out.manifest();
  std::cout << "wrote field n=" << g.n << " to " << p.out << '\n';
  return 0;
}

int cmd_flow(const Params& p) {
  check_kappa_flow(p.kappa);
  require(p.starts >= 1, "starts", "need at least one start");
  require(p.at.empty() || p.at.size() == 2, "at", "expected x,y");
  require(!p.theta.empty(), "theta", "need at least one angle");
  const Constants c = derive_constants(p.kappa);
  const FieldGrid g = sample_field(p);
  std::vector<Point> starts;
  if (!p.at.empty()) {
    const Point z(p.at[0], p.at[1]);
    require(g.window.contains(z), "at", "start lies outside the window");
    starts.push_back(z);
  } else {
    CounterRng rng(split_seed(p.seed, 1));
    const Rect inner = g.window.scaled(0.9);
    for (int i = 0; i < p.starts; ++i)
      starts.emplace_back(inner.x0 + rng.uniform() * inner.width(), inner.y0 + rng.uniform() * inner.height());
  }
  std::vector<FlowLine> lines;
  int id = 0;
  for (double th : p.theta) {
    Forest f = build_forest(g, c, starts, th);
    for (auto& l : f.lines) {
      l.id = id++;
      lines.push_back(std::move(l));
    }
  }
  Outputs out("flow", p);
  out.write("lines.csv", [&](std::ostream& os) { write_polylines_csv(os, lines); });
  out.write("lines.ppm", [&](std::ostream& os) { write_lines_ppm(os, g.window, lines); }, true);
  long merged = 0;
  for (const auto& l : lines) merged += l.status == FlowStatus::merged;
  out.manifest({{"lines", lines.size()}, {"merged", merged}});
  std::cout << "traced " << lines.size() << " lines (" << merged << " merged) to " << p.out << '\n';
  return 0;
}

int cmd_sle(const Params& p) {
  require(p.kappa > 0, "kappa", "must be positive");
  require(p.resolution >= 1, "resolution", "must be >= 1");
  DriverSpec s;
  if (p.kind == "chordal") s.kind = DriverKind::chordal;
  else if (p.kind == "radial") s.kind = DriverKind::radial;
  else if (p.kind == "whole-plane") s.kind = DriverKind::whole_plane;
  else throw UsageError("invalid --kind: expected chordal, radial or whole-plane");
  s.kappa = p.kappa;
  for (double r : p.rho) s.weights.push_back(ForcePoint{r});
  s.mu = mu_from_beta(p.kappa, p.beta);
  s.dt = p.dt;
  s.t0 = p.t0;
  s.horizon = p.horizon;
  s.burn_in = p.burn_in;
  s.seed = split_seed(p.seed, 0);
  Driver d;
  try {
    d = drive(s);
  } catch (const SpecError& e) {
    throw UsageError(std::string("invalid configuration: ") + e.what());
  }
  const Trace tr = loewner_trace(d, p.resolution);
  Outputs out("sle", p);
  out.write("driver.csv", [&](std::ostream& os) { write_driver_csv(os, d); });
  out.write("trace.csv", [&](std::ostream& os) { write_trace_csv(os, tr); });
  json res = {{"points", tr.points.size()}};
  if (d.threshold_time) res["continuation_threshold"] = *d.threshold_time;
  if (p.estimate_beta) {
    require(s.kind == DriverKind::whole_plane, "estimate-beta", "needs a whole-plane trace");
    const double est = winding_beta_estimate(tr, derive_constants(p.kappa), p.alpha);
    res["beta_estimate"] = est;
    std::cout << "beta estimate " << est << '\n';
  }
  if (!p.eps.empty()) {
    require(s.kind == DriverKind::radial, "eps", "twisting needs a radial trace");
    json tw = json::array();
    for (double e : p.eps) {
      const Twisting t = twisting(d, tr, e);
      tw.push_back({{"eps", e}, {"winding", t.winding}, {"twisting", t.twisting}, {"tau", t.tau}});
      std::cout << "eps " << e << ": winding " << t.winding << ", twisting " << t.twisting << '\n';
    }
    res["twisting"] = tw;
    out.write("twisting.json", [&](std::ostream& os) { os << tw.dump(2) << '\n'; });
  }
  out.manifest(res);
  std::cout << "wrote " << tr.points.size() << " trace points to " << p.out << '\n';
  return 0;
}

int cmd_spacefill(const Params& p) {
  require(p.kappa > 4, "kappa", "space-filling needs kappa' > 4");
  require(p.mesh >= 1, "mesh", "must be >= 1");
  require(p.rho.empty() || p.rho.size() == 2, "rho", "expected rho1,rho2");
  const double r1 = p.rho.empty() ? 0.0 : p.rho[0], r2 = p.rho.empty() ? 0.0 : p.rho[1];
  SpaceFillConfig cfg;
  try {
    cfg = make_spacefill_config(p.kappa, r1, r2, p.mesh);
  } catch (const Error& e) {
    throw UsageError(std::string("invalid --rho: ") + e.what());
  }
  const Constants c = derive_constants_dual(p.kappa);
  auto field = [&](std::uint64_t stream) {
    return add_harmonic_boundary(sample_zero_boundary(p.n, default_spacing(p.n), split_seed(p.seed, stream)),
                                 spacefill_boundary(cfg));
  };
  const SpaceFillOrder F = order_points(field(0), c, cfg);
  Outputs out("spacefill", p);
  out.write("curve.csv", [&](std::ostream& os) { write_curve_csv(os, F); });
  out.write("order.ppm", [&](std::ostream& os) { write_order_ppm(os, F); }, true);
  json res = {{"points", F.size()},
              {"pairs_decided", F.pairs_decided},
              {"violations", F.violations},
              {"lr_agreement", F.lr_both ? static_cast<double>(F.lr_agree) / F.lr_both : 1.0},
              {"total_time", space_filling_curve(F).total_time()}};
  if (p.mesh >= 2) res["islands"] = island_count(F, p.mesh);
  if (p.reverse) {
    // reversed run: independent field, same weights, compared after the pi rotation
    const SpaceFillOrder R = order_points(field(1), c, cfg);
    out.write("order_reversed.ppm", [&](std::ostream& os) { write_order_ppm(os, R); }, true);
    const KsResult ks = reversal_symmetry_stat(F, R, quadrant_probes(p.mesh));
    res["reversal_ks_d"] = ks.d;
    res["reversal_ks_p"] = ks.p;
    std::cout << "reversal KS distance " << ks.d << " (p " << ks.p << ")\n";
  }
  out.manifest(res);
  std::cout << "ordered " << F.size() << " cells to " << p.out << '\n';
  return 0;
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const std::exception& e) {
    throw InputError("cannot read " + path + ": " + e.what());
  }
}

int cmd_verify(const Params& p, bool seed_given) {
  const auto& names = suite_names();
  std::vector<std::string> selected = p.tests.empty() ? names : p.tests;
  for (const auto& t : selected)
    if (std::find(names.begin(), names.end(), t) == names.end()) throw UsageError("invalid --test: unknown test '" + t + "'");
  Thresholds th;
  const json tj = read_json_file((fs::path(p.golden) / "thresholds.json").string());
  from_json(tj, th);
  const json sj = read_json_file((fs::path(p.golden) / "seeds.json").string());
  std::map<std::string, std::uint64_t> seeds;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (seed_given) seeds[names[i]] = split_seed(p.seed, i + 1);
    else if (sj.contains("tests") && sj["tests"].contains(names[i])) seeds[names[i]] = sj["tests"][names[i]].get<std::uint64_t>();
    else throw InputError("seed manifest has no entry for " + names[i]);
  }
  Outputs out("verify", p);
  std::vector<TestReport> reports;
  std::ostringstream timing;
  timing << "name,runtime_s\n";
  bool all = true;
  for (const auto& t : selected) {
    std::cout << std::left << std::setw(22) << t << std::flush;
    TestReport r = run_suite_test(t, seeds[t], th);
    std::cout << (r.passed() ? "PASS" : "FAIL") << "  statistic " << r.statistic << ' ' << r.rule << ' ' << r.threshold
              << "  (" << std::fixed << std::setprecision(1) << r.runtime << " s)" << std::defaultfloat
              << std::setprecision(6) << '\n';
    timing << r.name << ',' << r.runtime << '\n';
    all = all && r.passed();
    reports.push_back(std::move(r));
  }
  out.write("report.jsonl", [&](std::ostream& os) { write_reports_jsonl(os, reports); });
  out.write("summary.csv", [&](std::ostream& os) { write_summary_csv(os, reports); });
  {
    std::ofstream os(out.path("timing.csv"));
    os << timing.str();
  }
  out.manifest({{"thresholds_version", th.version}, {"all_pass", all}});
  std::cout << (all ? "all selected tests passed" : "some tests failed") << '\n';
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"imgeo: imaginary geometry simulation and verification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Params p;
  std::string config;

  auto common = [&](CLI::App* c) {
    c->add_option("--config", config, "JSON file mirroring the flags (or a run manifest)");
    c->add_option("--seed", p.seed, "run seed (IMGEO_SEED overrides)");
    c->add_option("--out", p.out, "output directory");
  };
  auto field_opts = [&](CLI::App* c) {
    c->add_option("--n", p.n, "grid vertices per side");
    c->add_option("--alpha", p.alpha, "conical singularity strength at the window centre");
    c->add_option("--beta", p.beta, "log singularity strength");
  };

  auto* gff = app.add_subcommand("gff", "sample a discrete GFF and render it");
  common(gff);
  field_opts(gff);
  gff->add_option("--kappa", p.kappa, "kappa in (0,4); validated, the field itself does not depend on it");

  auto* flow = app.add_subcommand("flow", "trace flow lines of a sampled field");
  common(flow);
  field_opts(flow);
  flow->add_option("--kappa", p.kappa, "kappa in (0,4)");
  flow->add_option("--theta", p.theta, "angles, comma separated")->delimiter(',');
  flow->add_option("--starts", p.starts, "number of random starts");
  flow->add_option("--at", p.at, "single start x,y")->delimiter(',');

  auto* sle = app.add_subcommand("sle", "simulate a Loewner driver and its trace");
  common(sle);
  sle->add_option("--kind", p.kind, "chordal, radial or whole-plane");
  sle->add_option("--kappa", p.kappa, "kappa > 0");
  sle->add_option("--rho", p.rho, "force-point weights, comma separated")->delimiter(',');
  sle->add_option("--alpha", p.alpha, "alpha for the beta estimate");
  sle->add_option("--beta", p.beta, "beta; sets the drift mu = beta/sqrt(kappa)");
  sle->add_option("--dt", p.dt, "time step");
  sle->add_option("--t0", p.t0, "first recorded time");
  sle->add_option("--horizon", p.horizon, "last recorded time");
  sle->add_option("--burn-in", p.burn_in, "whole-plane burn-in time");
  sle->add_option("--resolution", p.resolution, "driver steps per trace point");
  sle->add_option("--eps", p.eps, "radii for the twisting report (radial)")->delimiter(',');
  sle->add_flag("--estimate-beta", p.estimate_beta, "estimate beta from the winding (whole-plane)");

  auto* sf = app.add_subcommand("spacefill", "order mesh cells along space-filling SLE");
  common(sf);
  sf->add_option("--kappa", p.kappa, "kappa' > 4");
  sf->add_option("--rho", p.rho, "rho1,rho2")->delimiter(',');
  sf->add_option("--mesh", p.mesh, "mesh cells per side");
  sf->add_option("--n", p.n, "grid vertices per side");
  sf->add_flag("--reverse", p.reverse, "also order an independent reversed run and emit the KS distance");

  auto* verify = app.add_subcommand("verify", "run the statistical test suite");
  common(verify);
  verify->add_option("--test", p.tests, "test name (repeatable); default all");
  verify->add_option("--golden", p.golden, "directory holding thresholds.json and seeds.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    if (!config.empty()) apply_config(p, config, *cmd);
    bool seed_given = cmd->count("--seed") > 0;
    if (const char* env = std::getenv("IMGEO_SEED")) {
      try {
        std::size_t used = 0;
        p.seed = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument(env);
      } catch (const std::exception&) {
        throw UsageError("invalid IMGEO_SEED: expected an unsigned integer");
      }
      seed_given = true;
    }
    if (cmd == gff) return cmd_gff(p);
    if (cmd == flow) return cmd_flow(p);
    if (cmd == sle) return cmd_sle(p);
    if (cmd == sf) return cmd_spacefill(p);
    return cmd_verify(p, seed_given);
  } catch (const UsageError& e) {
    std::cerr << "imgeo: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "imgeo: " << e.what() << '\n';
    return 1;
  }
}
