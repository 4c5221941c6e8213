// fiducial: command-line driver for the Gibbs sampler, compatibility checks,
// data simulation and re-diagnosis of stored samples.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fiducial/fiducial.hpp"

namespace fs = std::filesystem;
using namespace fiducial;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitStructural = 2;
// Stream id reserved for simulated data so it never collides with chain streams.
constexpr std::uint64_t kDataStream = 0xFFFFFFFFull;
constexpr const char* kOutEnv = "FIDUCIAL_OUT_DIR";

struct DataOptions {
  std::string model;
  std::string data;
  std::string data_y;
  std::string simulate;
  std::uint64_t data_seed = 0;
  bool data_seed_set = false;
};

struct Simulated {
  std::vector<double> theta;
  std::size_t n = 0;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::map<std::string, double> parse_assignments(const std::string& spec, const std::string& what) {
  std::map<std::string, double> out;
  for (const auto& item : split(spec, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw DomainError(what + ": expected name=value, got '" + item + "'");
    out[item.substr(0, eq)] = io::parse_double(item.substr(eq + 1), what);
  }
  return out;
}

std::vector<double> theta_from(const ModelSpec& model, std::map<std::string, double> kv, const std::string& what) {
  std::vector<double> theta;
  for (const auto& p : model.params) {
    auto it = kv.find(p.name);
    if (it == kv.end()) throw DomainError(what + ": missing value for '" + p.name + "'");
    theta.push_back(it->second);
    kv.erase(it);
  }
  if (!kv.empty()) throw DomainError(what + ": unknown parameter '" + kv.begin()->first + "'");
  return theta;
}

Simulated parse_simulate(const ModelSpec& model, const std::string& spec) {
  auto kv = parse_assignments(spec, "--simulate");
  auto n_it = kv.find("n");
  if (n_it == kv.end() || !(n_it->second >= 1.0)) throw DomainError("--simulate: needs n=<count>");
  Simulated s;
  s.n = static_cast<std::size_t>(n_it->second);
  kv.erase(n_it);
  s.theta = theta_from(model, kv, "--simulate");
  for (std::size_t j = 0; j < model.k(); ++j) {
    if (!model.params[j].domain.contains(s.theta[j])) {
      throw DomainError("--simulate: " + model.params[j].name + " is outside its domain");
    }
  }
  return s;
}

Dataset obtain_data(const ModelSpec& model, const DataOptions& opt, std::uint64_t seed, nlohmann::ordered_json& meta) {
  if (opt.data.empty() == opt.simulate.empty()) throw DomainError("give exactly one of --data or --simulate");
  if (!opt.data.empty()) {
    meta["data"] = opt.data;
    if (!opt.data_y.empty()) meta["data_y"] = opt.data_y;
    return io::load_dataset(model.layout, opt.data, opt.data_y);
  }
  const Simulated sim = parse_simulate(model, opt.simulate);
  const std::uint64_t data_seed = opt.data_seed_set ? opt.data_seed : seed;
  RngStream rng(data_seed, kDataStream);
  meta["simulate"] = {{"spec", opt.simulate}, {"theta", sim.theta}, {"n", sim.n}, {"data_seed", data_seed}};
  return model.simulate(sim.theta, sim.n, rng);
}

std::string output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutEnv); env && *env) return env;
  return "fiducial_out";
}

void add_data_options(CLI::App* cmd, DataOptions& opt) {
  cmd->add_option("--model", opt.model, "Model family")
      ->required()
      ->check(CLI::IsMember(model_names()));
  cmd->add_option("--data", opt.data, "Headered CSV with column x (and y, or group)");
  cmd->add_option("--data-y", opt.data_y, "Second sample for behrens_fisher (column x)");
  cmd->add_option("--simulate", opt.simulate, "Simulate data: <param>=<value>,...,n=<count>");
  cmd->add_option_function<std::uint64_t>(
      "--data-seed",
      [&opt](const std::uint64_t& v) {
        opt.data_seed = v;
        opt.data_seed_set = true;
      },
      "Seed for simulated data (defaults to --seed)");
}

void write_diagnostics(const std::string& dir, const SampleMatrix& s, const DiagnosticsReport& rep,
                       nlohmann::ordered_json report) {
  report["diagnostics"] = io::to_json(rep);
  io::write_text((fs::path(dir) / "report.json").string(), report.dump(2) + "\n");
  for (std::size_t j = 0; j < s.k(); ++j) {
    const std::string& label = s.labels()[j];
    io::write_histogram((fs::path(dir) / ("hist_" + label + ".csv")).string(), rep.params[j].hist);
    io::write_trace((fs::path(dir) / ("trace_" + label + ".csv")).string(), s, j);
  }
}

void print_summary(const DiagnosticsReport& rep) {
  std::cout << "param          mean            sd              q2.5            q97.5           rhat     ess\n";
  for (const auto& p : rep.params) {
    std::printf("%-14s %-15.6g %-15.6g %-15.6g %-15.6g %-8.4f %.0f\n", p.label.c_str(), p.mean, p.sd, p.q025, p.q975,
                p.rhat, p.ess);
  }
  for (const auto& w : rep.warnings) std::cout << "warning: " << w << '\n';
  std::cout << (rep.converged ? "converged" : "NOT converged") << " (R-hat < " << rep.thresholds.max_rhat
            << ", ESS > " << rep.thresholds.min_ess << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multivariate subjective fiducial inference via Gibbs sampling"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file with option values");

  DataOptions run_data;
  ChainConfig cfg;
  cfg.chains = 4;
  std::string scan, init, out_flag;
  std::size_t bins = 60;
  ConvergenceThresholds thresholds;
  auto* run_cmd = app.add_subcommand("run", "Run the Gibbs sampler and write samples and diagnostics");
  add_data_options(run_cmd, run_data);
  run_cmd->add_option("--m", cfg.m, "Cycles per chain (burn-in included)")->required()->check(CLI::PositiveNumber);
  run_cmd->add_option("--b", cfg.b, "Burn-in cycles")->capture_default_str();
  run_cmd->add_option("--chains", cfg.chains, "Number of chains")->capture_default_str()->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  run_cmd->add_option("--scan-order", scan, "Comma-separated parameter order");
  run_cmd->add_option("--init", init, "Initial state shared by all chains: <param>=<value>,...");
  run_cmd->add_option("--threads", cfg.threads, "Chains run in parallel")->capture_default_str();
  run_cmd->add_option("--bins", bins, "Histogram bins")->capture_default_str()->check(CLI::PositiveNumber);
  run_cmd->add_option("--max-rhat", thresholds.max_rhat, "Convergence threshold")->capture_default_str();
  run_cmd->add_option("--min-ess", thresholds.min_ess, "Convergence threshold")->capture_default_str();
  run_cmd->add_option("--out", out_flag, std::string("Output directory (default $") + kOutEnv + " or fiducial_out)");

  DataOptions compat_data;
  std::uint64_t compat_seed = 0;
  CompatOptions copt;
  std::string compat_out;
  auto* compat_cmd = app.add_subcommand("check-compat", "Ratio-constancy check against the model's joint density");
  add_data_options(compat_cmd, compat_data);
  compat_cmd->add_option("--seed", compat_seed, "Seed for simulated data")->capture_default_str();
  compat_cmd->add_option("--slices", copt.slices, "Slices per parameter")->capture_default_str();
  compat_cmd->add_option("--points", copt.points, "Grid points per slice")->capture_default_str();
  compat_cmd->add_option("--tol", copt.closed_form_tol, "Tolerance for closed-form conditionals")
      ->capture_default_str();
  compat_cmd->add_option("--approx-tol", copt.approximate_tol, "Tolerance for approximate conditionals")
      ->capture_default_str();
  compat_cmd->add_option("--out", compat_out, "Directory for compat.json");

  DataOptions sim_data;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  auto* sim_cmd = app.add_subcommand("simulate", "Write a simulated data set as CSV");
  sim_cmd->add_option("--model", sim_data.model, "Model family")->required()->check(CLI::IsMember(model_names()));
  sim_cmd->add_option("--simulate", sim_data.simulate, "<param>=<value>,...,n=<count>")->required();
  sim_cmd->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("--out", sim_out, "Output CSV (stdout when omitted)");

  std::string diag_samples, diag_report, diag_out;
  std::size_t diag_b = 500;
  std::size_t diag_bins = 60;
  auto* diag_cmd = app.add_subcommand("diag", "Re-diagnose an existing samples.csv");
  diag_cmd->add_option("--samples", diag_samples, "samples.csv from a previous run")->required();
  auto* diag_b_opt = diag_cmd->add_option("--b", diag_b, "Burn-in (default: from report.json, else 500)");
  diag_cmd->add_option("--report", diag_report, "report.json of the run (default: next to samples.csv)");
  diag_cmd->add_option("--bins", diag_bins, "Histogram bins")->capture_default_str();
  diag_cmd->add_option("--out", diag_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) {
      const ModelSpec model = make_model(run_data.model);
      nlohmann::ordered_json report;
      report["model"] = model.name;
      const Dataset data = obtain_data(model, run_data, cfg.seed, report);
      if (!scan.empty()) cfg.scan_order = split(scan, ',');
      if (!init.empty()) cfg.init = {theta_from(model, parse_assignments(init, "--init"), "--init")};
      const SampleMatrix samples = run(model, data, cfg);
      const ChainConfig& used = samples.config();
      report["config"] = {{"m", used.m},         {"b", used.b},       {"chains", used.chains},
                          {"seed", used.seed},   {"scan_order", used.scan_order},
                          {"init", used.init},   {"bins", bins}};
      const DiagnosticsReport rep = summarize(samples, bins, thresholds);
      const std::string dir = output_dir(out_flag);
      fs::create_directories(dir);
      if (!run_data.simulate.empty()) io::write_dataset((fs::path(dir) / "data.csv").string(), data);
      io::write_samples((fs::path(dir) / "samples.csv").string(), samples);
      write_diagnostics(dir, samples, rep, report);
      print_summary(rep);
      std::cout << "outputs written to " << dir << '\n';
    } else if (*compat_cmd) {
      const ModelSpec model = make_model(compat_data.model);
      nlohmann::ordered_json report;
      report["model"] = model.name;
      const Dataset data = obtain_data(model, compat_data, compat_seed, report);
      const auto reports = check_model(model, data, copt);
      auto& arr = report["reports"] = nlohmann::ordered_json::array();
      Verdict overall = Verdict::compatible;
      for (const auto& r : reports) {
        arr.push_back(io::to_json(r));
        if (overall == Verdict::compatible) overall = r.verdict;
      }
      report["verdict"] = to_string(overall);
      const std::string text = report.dump(2) + "\n";
      if (!compat_out.empty()) {
        fs::create_directories(compat_out);
        io::write_text((fs::path(compat_out) / "compat.json").string(), text);
      }
      std::cout << text;
    } else if (*sim_cmd) {
      const ModelSpec model = make_model(sim_data.model);
      nlohmann::ordered_json meta;
      const Dataset data = obtain_data(model, sim_data, sim_seed, meta);
      if (sim_out.empty()) {
        io::write_dataset(std::cout, data);
      } else {
        io::write_dataset(sim_out, data);
      }
    } else if (*diag_cmd) {
      fs::path report_path = diag_report.empty() ? fs::path(diag_samples).parent_path() / "report.json"
                                                 : fs::path(diag_report);
      nlohmann::ordered_json prior;
      if (fs::exists(report_path)) prior = nlohmann::ordered_json::parse(std::ifstream(report_path));
      else if (!diag_report.empty()) throw DomainError("cannot open '" + diag_report + "'");
      std::size_t b = diag_b;
      if (!*diag_b_opt && prior.contains("config")) b = prior["config"]["b"].get<std::size_t>();
      SampleMatrix s = io::read_samples(diag_samples, b);
      ConvergenceThresholds th;
      if (prior.contains("diagnostics")) {
        const auto& d = prior["diagnostics"];
        s.config().seed = d["seed"].get<std::uint64_t>();
        s.config().scan_order = d["scan_order"].get<std::vector<std::string>>();
        s.warnings() = d["truncation_warnings"].get<std::vector<std::string>>();
        th.max_rhat = d["thresholds"]["max_rhat"].get<double>();
        th.min_ess = d["thresholds"]["min_ess"].get<double>();
        for (const auto& p : d["parameters"]) {
          s.narrowed_draws()[s.index_of(p["label"].get<std::string>())] = p["narrowed_draws"].get<std::size_t>();
        }
      }
      const DiagnosticsReport rep = summarize(s, diag_bins, th);
      nlohmann::ordered_json report = prior;
      report.erase("diagnostics");
      report["samples"] = diag_samples;
      const std::string dir = output_dir(diag_out);
      fs::create_directories(dir);
      write_diagnostics(dir, s, rep, report);
      print_summary(rep);
    }
  } catch (const StructuralError& e) {
    std::cerr << "structural error: " << e.what() << '\n';
    if (e.chain >= 0) std::cerr << "  chain " << e.chain << ", cycle " << e.cycle << '\n';
    return kExitStructural;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed report: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
