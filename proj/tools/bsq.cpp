#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "bsq/acceptance.hpp"
#include "bsq/errors.hpp"
#include "bsq/functional.hpp"
#include "bsq/report.hpp"
#include "bsq/resonance.hpp"
#include "bsq/simulator.hpp"
#include "bsq/witness.hpp"

namespace fs = std::filesystem;
using namespace bsq;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitBudget = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string out_dir = ".";
  bool deterministic = false;
};

std::vector<std::int64_t> n_list(const std::vector<std::int64_t>& explicit_list, int lo_exp, int hi_exp) {
  if (!explicit_list.empty()) return explicit_list;
  if (lo_exp < 0 || hi_exp < lo_exp || hi_exp > 40) throw ValidationError("bad N exponent range");
  std::vector<std::int64_t> v;
  for (int e = lo_exp; e <= hi_exp; ++e) v.push_back(std::int64_t{1} << e);
  return v;
}

// Numbers stay numbers in the manifest; anything else is kept as typed.
nlohmann::json param_value(const std::string& v) {
  std::int64_t i = 0;
  if (auto [e, ec] = std::from_chars(v.data(), v.data() + v.size(), i); ec == std::errc{} && e == v.data() + v.size())
    return i;
  double d = 0.0;
  if (auto [e, ec] = std::from_chars(v.data(), v.data() + v.size(), d); ec == std::errc{} && e == v.data() + v.size())
    return d;
  return v;
}

nlohmann::json params_of(const CLI::App* app) {
  nlohmann::json j = nlohmann::json::object();
  for (const CLI::Option* o : app->get_options()) {
    const std::string key = o->get_lnames().empty() ? o->get_name() : o->get_lnames().front();
    if (key == "help" || key == "config") continue;
    auto res = o->results();
    if (o->get_expected_max() == 0) {
      j[key] = o->count() > 0;
    } else if (res.empty()) {
      const std::string def = o->get_default_str();
      j[key] = def.empty() ? nlohmann::json(nullptr) : param_value(def);
    } else if (res.size() == 1) {
      j[key] = param_value(res.front());
    } else {
      auto arr = nlohmann::json::array();
      for (const auto& v : res) arr.push_back(param_value(v));
      j[key] = arr;
    }
  }
  return j;
}

class Run {
public:
  Run(std::string command, const CLI::App* app, const Common& c) : common_(c), t0_(std::chrono::steady_clock::now()) {
    m_.command = std::move(command);
    m_.params = params_of(app);
    m_.deterministic = c.deterministic;
    if (const CLI::Option* cfg = app->get_option_no_throw("--config"); cfg && cfg->count() > 0)
      for (const auto& f : cfg->results()) input(f);
  }
  void input(const std::string& path) { m_.inputs[path] = file_blob_sha1(path); }
  fs::path path(const std::string& name) const { return fs::path(common_.out_dir) / name; }
  void write(const std::string& name, std::string_view content) { write_output(m_, path(name), content); }
  void finish(const std::string& stem) {
    m_.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    const auto mp = write_manifest(m_, common_.out_dir, stem);
    for (const auto& o : m_.outputs) std::cout << "wrote " << o.path << '\n';
    std::cout << "wrote " << mp.string() << '\n';
  }

private:
  Common common_;
  RunManifest m_;
  std::chrono::steady_clock::time_point t0_;
};

void add_common(CLI::App* sub, Common& c) {
  sub->set_config("--config", "", "flat key = value file; command-line flags take precedence");
  sub->add_option("--out-dir", c.out_dir, "directory for outputs and the manifest")->capture_default_str();
  sub->add_flag("--deterministic", c.deterministic, "leave wall time out of the manifest");
}

// CLI11 only reads config files for the top-level app, so subcommand files are applied here.
// Options already given on the command line are left alone.
void apply_config(CLI::App* sub) {
  const CLI::Option* cfg = sub->get_option_no_throw("--config");
  if (cfg == nullptr || cfg->count() == 0) return;
  for (const auto& file : cfg->results()) {
    std::ifstream in(file);
    if (!in) throw CLI::FileError::Missing(file);
    for (const auto& item : CLI::ConfigINI().from_config(in)) {
      if (!item.parents.empty()) throw CLI::ConfigError::Extras(item.fullname());
      CLI::Option* opt = sub->get_option_no_throw("--" + item.name);
      if (opt == nullptr || item.name == "config") throw CLI::ConfigError::Extras(item.name);
      if (opt->count() > 0) continue;
      opt->add_result(item.inputs);
      opt->run_callback();
    }
  }
}

Domain domain_of(const std::string& s) { return parse_domain(s); }

std::string tag(double x) {
  std::string s = format_double(x);
  for (auto& ch : s)
    if (ch == '.') ch = 'p';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier-side experiments for flow-map smoothness of the good Boussinesq equation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  Common common;

  // witness ---------------------------------------------------------------
  auto* wit = app.add_subcommand("witness", "build witness data and write it as JSON");
  std::string w_domain = "torus";
  int w_p = 2, w_npu = 64;
  std::int64_t w_N = 16;
  double w_s = -1.0;
  std::optional<double> w_sigma;
  wit->add_option("--domain", w_domain, "line or torus")->check(CLI::IsMember({"line", "torus"}))->capture_default_str();
  wit->add_option("--p", w_p, "nonlinearity degree")->capture_default_str();
  wit->add_option("--N", w_N, "frequency scale")->capture_default_str();
  wit->add_option("--s", w_s, "Sobolev index")->capture_default_str();
  wit->add_option("--sigma", w_sigma, "amplitude decay exponent (default s+1)");
  wit->add_option("--nodes-per-unit", w_npu, "line quadrature nodes per unit length")->capture_default_str();
  add_common(wit, common);

  // resonance -------------------------------------------------------------
  auto* res = app.add_subcommand("resonance", "check the sign-definite resonance windows");
  std::string r_domain = "torus";
  int r_p = 2, r_lo = 3, r_hi = 10;
  std::vector<std::int64_t> r_list;
  res->add_option("--domain", r_domain, "line or torus")->check(CLI::IsMember({"line", "torus"}))->capture_default_str();
  res->add_option("--p", r_p, "nonlinearity degree")->capture_default_str();
  res->add_option("--N-list", r_list, "explicit N values")->delimiter(',');
  res->add_option("--N-min-exp", r_lo, "smallest N = 2^e")->capture_default_str();
  res->add_option("--N-max-exp", r_hi, "largest N = 2^e")->capture_default_str();
  add_common(res, common);

  // diophantine -----------------------------------------------------------
  auto* dio = app.add_subcommand("diophantine", "solve the class-count system for odd p");
  int d_p = 3;
  dio->add_option("--p", d_p, "odd nonlinearity degree")->capture_default_str();
  add_common(dio, common);

  // growth ----------------------------------------------------------------
  auto* gro = app.add_subcommand("growth", "sweep N and fit the growth exponent of |A_p| / |data|^p");
  std::string g_domain = "torus", g_method = "auto";
  int g_p = 2, g_lo = 4, g_hi = 9, g_window = 32, g_nodes = 0, g_npu = 64;
  double g_s = -1.0, g_t = 1.0;
  std::optional<double> g_sigma;
  std::uint64_t g_mc = 20000, g_seed = 0x5eed, g_budget = 2'000'000'000;
  std::vector<std::int64_t> g_list;
  bool g_no_side = false;
  gro->add_option("--domain", g_domain, "line or torus")->check(CLI::IsMember({"line", "torus"}))->capture_default_str();
  gro->add_option("--p", g_p, "nonlinearity degree")->capture_default_str();
  gro->add_option("--s", g_s, "Sobolev index")->capture_default_str();
  gro->add_option("--sigma", g_sigma, "amplitude decay exponent (default s+1)");
  gro->add_option("--t", g_t, "time")->capture_default_str();
  gro->add_option("--N-list", g_list, "explicit N values")->delimiter(',');
  gro->add_option("--N-min-exp", g_lo, "smallest N = 2^e")->capture_default_str();
  gro->add_option("--N-max-exp", g_hi, "largest N = 2^e")->capture_default_str();
  gro->add_option("--method", g_method, "line integrator")
      ->check(CLI::IsMember({"auto", "tensor", "montecarlo"}))
      ->capture_default_str();
  gro->add_option("--nodes-per-dim", g_nodes, "tensor nodes per dimension (0: automatic)")->capture_default_str();
  gro->add_option("--window-nodes", g_window, "output window nodes (line)")->capture_default_str();
  gro->add_option("--data-nodes-per-unit", g_npu, "line data nodes per unit length")->capture_default_str();
  gro->add_option("--mc-samples", g_mc, "Monte Carlo samples per pattern and node")->capture_default_str();
  gro->add_option("--seed", g_seed, "Monte Carlo seed")->capture_default_str();
  gro->add_option("--budget", g_budget, "line integrand evaluations allowed per A_p")->capture_default_str();
  gro->add_flag("--no-time-check", g_no_side, "skip the fits at 0.7t and 1.3t");
  add_common(gro, common);

  // simulate --------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "integrate the equation on the torus");
  int s_p = 2, s_K = 64, s_every = 1, s_wlo = 1, s_whi = 2;
  std::string s_sign = "+", s_init, s_out = "traj.csv";
  double s_dt = 0.0, s_tend = 1.0, s_scale = 1.0, s_ws = 0.0;
  std::vector<double> s_svals{0.0};
  bool s_linear = false;
  sim->add_option("--p", s_p, "nonlinearity degree")->capture_default_str();
  sim->add_option("--sign", s_sign, "f(u) = +u^p or -u^p")->check(CLI::IsMember({"+", "-"}))->capture_default_str();
  sim->add_option("--K", s_K, "retained modes |k| <= K")->capture_default_str();
  sim->add_option("--dt", s_dt, "step (0: 0.5/lambda(K))")->capture_default_str();
  sim->add_option("--t-end", s_tend, "final time")->capture_default_str();
  sim->add_option("--init", s_init, "witness or {u0, u1} JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--scale", s_scale, "multiply the initial data")->capture_default_str();
  sim->add_option("--out", s_out, "trajectory CSV name")->capture_default_str();
  sim->add_option("--s-values", s_svals, "Sobolev indices for full norms")->delimiter(',');
  sim->add_option("--window-s", s_ws, "Sobolev index of the windowed norm")->capture_default_str();
  sim->add_option("--window-lo", s_wlo, "lowest |k| in the window")->capture_default_str();
  sim->add_option("--window-hi", s_whi, "highest |k| in the window")->capture_default_str();
  sim->add_option("--every", s_every, "record every n-th step")->capture_default_str();
  sim->add_flag("--linear", s_linear, "switch the nonlinearity off");
  add_common(sim, common);

  // inflate ---------------------------------------------------------------
  auto* inf = app.add_subcommand("inflate", "norm-inflation sweep for p = 2 on the torus");
  int i_p = 2, i_lo = 4, i_hi = 7;
  double i_s = -0.6, i_delta = 1e-2, i_tend = 1.0, i_dtf = 0.25;
  std::vector<std::int64_t> i_list;
  inf->add_option("--p", i_p, "nonlinearity degree")->capture_default_str();
  inf->add_option("--s", i_s, "Sobolev index")->capture_default_str();
  inf->add_option("--delta", i_delta, "H^s x H^{s-2} size of the data")->capture_default_str();
  inf->add_option("--t-end", i_tend, "sup is taken over (0, t-end]")->capture_default_str();
  inf->add_option("--dt-factor", i_dtf, "dt = factor / (p lambda(max data frequency))")->capture_default_str();
  inf->add_option("--N-list", i_list, "explicit N values")->delimiter(',');
  inf->add_option("--N-min-exp", i_lo, "smallest N = 2^e")->capture_default_str();
  inf->add_option("--N-max-exp", i_hi, "largest N = 2^e")->capture_default_str();
  add_common(inf, common);

  // reproduce-all ---------------------------------------------------------
  auto* rep = app.add_subcommand("reproduce-all", "run every acceptance check and print a summary");
  std::vector<int> a_ids;
  rep->add_option("--only", a_ids, "criterion ids")->delimiter(',');
  add_common(rep, common);

  try {
    app.parse(argc, argv);
    for (CLI::App* sub : app.get_subcommands()) apply_config(sub);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*wit) {
      const Domain d = domain_of(w_domain);
      const WitnessConfig cfg{d, w_p, w_N, w_sigma.value_or(w_s + 1.0), w_s};
      const auto w = build_witness(cfg, w_npu);
      Run run("witness", wit, common);
      const std::string stem = "witness_" + w_domain + "_p" + std::to_string(w_p) + "_N" + std::to_string(w_N);
      run.write(stem + ".json", to_json(w).dump(2) + "\n");
      std::cout << "data norm H^s x H^{s-2}: " << format_double(w.data_norm(w_s)) << '\n';
      run.finish(stem);
    } else if (*res) {
      const auto Ns = n_list(r_list, r_lo, r_hi);
      const auto rep_ = verify_resonance_bounds(r_p, domain_of(r_domain), Ns);
      Run run("resonance", res, common);
      const std::string stem = "resonance_" + r_domain + "_p" + std::to_string(r_p);
      run.write(stem + ".json", to_json(rep_).dump(2) + "\n");
      std::cout << "N0 = " << (rep_.N0 ? std::to_string(*rep_.N0) : "none") << ", violations from N0: "
                << rep_.violations_from_N0() << '\n';
      run.finish(stem);
    } else if (*dio) {
      const auto j = diophantine_json(d_p);
      Run run("diophantine", dio, common);
      const std::string stem = "diophantine_p" + std::to_string(d_p);
      run.write(stem + ".json", j.dump(2) + "\n");
      std::cout << j["solutions"].dump() << '\n';
      run.finish(stem);
    } else if (*gro) {
      const Domain d = domain_of(g_domain);
      const double sigma = g_sigma.value_or(g_s + 1.0);
      if (!(sigma > g_s))
        throw ValidationError("sigma must exceed s so the data shrinks in H^s; try --sigma " +
                              format_double(g_s + 1.0));
      const auto Ns = n_list(g_list, g_lo, g_hi);
      GrowthOptions opt;
      opt.data_nodes_per_unit = g_npu;
      opt.line.method = g_method == "tensor" ? LineMethod::Tensor
                        : g_method == "montecarlo" ? LineMethod::MonteCarlo
                                                   : LineMethod::Auto;
      opt.line.nodes_per_dim = g_nodes;
      opt.line.window_nodes = g_window;
      opt.line.mc_samples = g_mc;
      opt.line.seed = g_seed;
      opt.line.budget = g_budget;
      const auto g = growth_table(g_p, d, g_s, sigma, g_t, Ns, opt);
      nlohmann::json summary = to_json(g);
      std::cout << "slope " << format_double(g.slope) << " (predicted " << format_double(g.predicted_slope) << ")\n";
      if (!g_no_side) {
        for (double f : {0.7, 1.3}) {
          const auto gs = growth_table(g_p, d, g_s, sigma, f * g_t, Ns, opt);
          summary["slope_at_t"][format_double(f * g_t)] = gs.slope;
          std::cout << "slope at t=" << format_double(f * g_t) << ": " << format_double(gs.slope) << '\n';
        }
      }
      for (const auto& w : g.warnings) std::cerr << "warning: " << w << '\n';
      Run run("growth", gro, common);
      const std::string stem = "growth_" + g_domain + "_p" + std::to_string(g_p) + "_s" + tag(g_s);
      run.write(stem + ".csv", growth_csv(g));
      run.write(stem + ".json", summary.dump(2) + "\n");
      run.finish(stem);
    } else if (*sim) {
      std::ifstream in(s_init);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("cannot parse --init: ") + e.what());
      }
      if (!j.contains("u0") || !j.contains("u1")) throw ValidationError("--init needs u0 and u1");
      const SpectralData u0 = spectral_from_json(j["u0"]).scaled(s_scale);
      const SpectralData u1 = spectral_from_json(j["u1"]).scaled(s_scale);
      double fmax = 0.0;
      for (const auto& n : u0.nodes())
        if (n.value != cplx{}) fmax = std::max(fmax, std::abs(n.xi));
      for (const auto& n : u1.nodes())
        if (n.value != cplx{}) fmax = std::max(fmax, std::abs(n.xi));
      if (s_K < 4 * fmax)
        throw ValidationError("K must be at least 4x the largest data frequency; try --K " +
                              std::to_string(static_cast<long>(4 * fmax)));
      SimConfig cfg;
      cfg.p = s_p;
      cfg.sign = s_sign == "-" ? -1 : 1;
      cfg.K = s_K;
      cfg.dt = s_dt;
      cfg.t_end = s_tend;
      cfg.nonlinear = !s_linear;
      Simulator simu(cfg);
      SimState st = state_from_spectral(u0, u1, s_K);
      TrajectoryCsv traj(s_svals, s_ws, s_wlo, s_whi);
      Run run("simulate", sim, common);
      run.input(s_init);
      int rc = 0;
      try {
        simu.run(st, s_tend, [&](const SimState& x) { traj.record(x); }, s_every);
      } catch (const NumericalBlowup& e) {
        std::cerr << "error: " << e.what() << '\n';
        rc = kExitNumerical;
      }
      run.write(s_out, traj.str());
      run.finish(fs::path(s_out).stem().string());
      return rc;
    } else if (*inf) {
      const auto Ns = n_list(i_list, i_lo, i_hi);
      InflationOptions opt;
      opt.dt_factor = i_dtf;
      if (i_s >= -0.5) std::cerr << "note: s >= -1/2, this is a negative control\n";
      const auto t = inflation_experiment(i_p, i_s, Ns, i_delta, i_tend, opt);
      Run run("inflate", inf, common);
      const std::string stem = "inflate_p" + std::to_string(i_p) + "_s" + tag(i_s);
      run.write(stem + ".csv", inflation_csv(t));
      run.write(stem + ".json", to_json(t).dump(2) + "\n");
      std::cout << "strictly increasing: " << (t.strictly_increasing() ? "yes" : "no")
                << ", max ratio to first N: " << format_double(t.max_ratio_to_first()) << '\n';
      run.finish(stem);
    } else if (*rep) {
      Run run("reproduce-all", rep, common);
      CsvWriter csv({"id", "title", "pass", "seconds", "detail"});
      bool all = true;
      run_acceptance(a_ids, [&](const CriterionResult& r) {
        std::cout << format_result_line(r) << std::endl;
        all = all && r.pass;
        std::ostringstream secs;
        secs << std::fixed << std::setprecision(1) << r.seconds;
        csv.row({std::to_string(r.id), r.title, r.pass ? "true" : "false", common.deterministic ? "" : secs.str(),
                 r.detail});
      });
      run.write("acceptance_summary.csv", csv.str());
      run.finish("acceptance_summary");
      std::cout << (all ? "all criteria passed" : "some criteria FAILED") << '\n';
      return all ? 0 : kExitNumerical;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const NumericalBlowup& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
