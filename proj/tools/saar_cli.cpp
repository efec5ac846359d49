// saar: run, validate and sweep containment scenarios from the command line.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "saar/saar.hpp"

namespace {

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kInvalidScenario = 2,
  kInfeasibleQp = 3,
  kDiverged = 4,
};

struct Common {
  std::string scenario = "paper_sec4";
  std::string mode;
  bool no_attacks = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-s,--scenario", c.scenario, "scenario file or bundled name")
      ->capture_default_str();
  cmd->add_option("-m,--mode", c.mode, "controller mode override")
      ->check(CLI::IsMember({"saar", "resilient_unsafe", "conventional"}));
  cmd->add_flag("--no-attacks", c.no_attacks, "zero every attack coefficient");
}

saar::ScenarioConfig load(const Common& c) {
  auto cfg = saar::load_scenario(c.scenario);
  if (!c.mode.empty()) cfg.mode = *saar::parse_mode(c.mode);
  if (c.no_attacks) saar::scale_attacks(cfg, 0.0);
  return cfg;
}

void print_matrix(std::ostream& os, const char* name, const saar::Matrix& m) {
  os << "  " << name << " =\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    os << "   ";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      char buf[40];
      std::snprintf(buf, sizeof buf, " %14.8g", m(r, c));
      os << buf;
    }
    os << '\n';
  }
}

int exit_code(const saar::Summary& s) {
  if (s.termination == saar::Termination::kInfeasibleQp) return kInfeasibleQp;
  if (s.termination == saar::Termination::kNonFinite) return kFailure;
  if (s.first_divergence_time) return kDiverged;
  return kOk;
}

int cmd_run(const Common& c, const std::string& trace_path, const std::string& summary_path,
            bool quiet) {
  auto cfg = load(c);
  saar::Simulator sim(cfg);
  const auto res = sim.run();
  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) throw saar::Error("cannot write " + trace_path);
    saar::write_trace_csv(out, res.trace, cfg);
  }
  const auto summary = saar::summary_to_json(res.summary, cfg.name);
  if (!summary_path.empty()) {
    std::ofstream out(summary_path);
    if (!out) throw saar::Error("cannot write " + summary_path);
    out << summary.dump(2) << '\n';
  }
  if (!quiet) std::cout << summary.dump(2) << '\n';
  const int code = exit_code(res.summary);
  if (code == kDiverged) {
    std::cerr << "divergence detected: ||e_c|| exceeded " << cfg.divergence_threshold
              << " at t = " << *res.summary.first_divergence_time << '\n';
  } else if (code != kOk) {
    std::cerr << res.summary.message << '\n';
  }
  return code;
}

int cmd_validate(const Common& c) {
  auto cfg = load(c);
  nlohmann::json out;
  out["valid"] = true;
  out["scenario"] = cfg.name;
  out["followers"] = cfg.n_followers();
  out["leaders"] = cfg.n_leaders();
  std::cout << out.dump(2) << '\n';
  return kOk;
}

int cmd_gains(const Common& c) {
  const auto cfg = load(c);
  for (std::size_t i = 0; i < cfg.followers.size(); ++i) {
    const auto g = saar::synthesize_gains(cfg.followers[i].model, cfg.leader);
    std::cout << "follower " << i + 1 << ":\n";
    print_matrix(std::cout, "P", g.P);
    print_matrix(std::cout, "K", g.K);
    print_matrix(std::cout, "H", g.H);
    print_matrix(std::cout, "Pi", g.Pi);
    std::cout << "  care_residual = " << g.care_residual
              << "\n  regulator_residual = " << g.regulator_residual << '\n';
  }
  return kOk;
}

void set_parameter(saar::ScenarioConfig& cfg, const std::string& name, double v) {
  if (name == "d_s") {
    cfg.d_s = v;
  } else if (name == "delta") {
    cfg.delta.setConstant(v);
  } else if (name == "q") {
    for (auto& f : cfg.followers) f.q = v;
  } else if (name == "alpha") {
    for (auto& f : cfg.followers) f.alpha = v;
  } else if (name == "c") {
    for (auto& f : cfg.followers) f.c = v;
  } else if (name == "dt") {
    cfg.dt = v;
  } else if (name == "horizon") {
    cfg.horizon = v;
  } else if (name == "attack_start") {
    cfg.attack_start = v;
    saar::apply_attack_timing(cfg);
  } else if (name == "attack_scale") {
    saar::scale_attacks(cfg, v);
  } else {
    throw saar::Error("unknown sweep parameter " + name);
  }
}

int cmd_sweep(const Common& c, const std::string& param, double from, double to, int count,
              const std::string& out_dir, unsigned jobs) {
  const auto base = load(c);
  std::vector<double> values;
  for (int k = 0; k < count; ++k)
    values.push_back(count == 1 ? from : from + (to - from) * k / (count - 1));
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  auto one = [&](std::size_t k) {
    auto cfg = base;
    set_parameter(cfg, param, values[k]);
    nlohmann::json row;
    row["parameter"] = param;
    row["value"] = values[k];
    try {
      saar::Simulator sim(cfg, [](const std::string&) {});
      const auto res = sim.run();
      row["summary"] = saar::summary_to_json(res.summary, cfg.name);
      row["exit_code"] = exit_code(res.summary);
      if (!out_dir.empty()) {
        std::ofstream out(std::filesystem::path(out_dir) / ("run_" + std::to_string(k) + ".csv"));
        saar::write_trace_csv(out, res.trace, cfg);
      }
    } catch (const std::exception& e) {
      row["error"] = e.what();
      row["exit_code"] = static_cast<int>(kInvalidScenario);
    }
    return row;
  };

  std::vector<nlohmann::json> rows(values.size());
  const std::size_t width = std::max(1u, jobs);
  for (std::size_t begin = 0; begin < values.size(); begin += width) {
    std::vector<std::future<nlohmann::json>> batch;
    for (std::size_t k = begin; k < std::min(values.size(), begin + width); ++k)
      batch.push_back(std::async(std::launch::async, one, k));
    for (std::size_t k = 0; k < batch.size(); ++k) rows[begin + k] = batch[k].get();
  }
  for (const auto& r : rows) std::cout << r.dump() << '\n';
  return kOk;
}

void report_scenario_error(const saar::ScenarioError& e) {
  nlohmann::json out;
  out["valid"] = false;
  out["error"] = e.what();
  out["violations"] = nlohmann::json::array();
  for (const auto& is : e.issues())
    out["violations"].push_back({{"field", is.field}, {"message", is.message}});
  std::cout << out.dump(2) << '\n';
  std::cerr << "error: " << e.what() << '\n';
  for (const auto& is : e.issues()) std::cerr << "  " << is.field << ": " << is.message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safety-aware attack-resilient containment simulator"};
  app.require_subcommand(1);

  Common common;
  auto* run = app.add_subcommand("run", "simulate and write trace CSV and summary JSON");
  add_common(run, common);
  std::string trace_path = "trace.csv", summary_path = "summary.json";
  bool quiet = false;
  run->add_option("-o,--trace", trace_path, "trace CSV path (empty to skip)")->capture_default_str();
  run->add_option("--summary", summary_path, "summary JSON path (empty to skip)")->capture_default_str();
  run->add_flag("-q,--quiet", quiet, "do not echo the summary");

  auto* validate = app.add_subcommand("validate", "check a scenario file");
  add_common(validate, common);

  auto* gains = app.add_subcommand("gains", "print P, K, H, Pi and residuals");
  add_common(gains, common);

  auto* sweep = app.add_subcommand("sweep", "vary one scalar and print one summary row per value");
  add_common(sweep, common);
  std::string param;
  double from = 0.0, to = 0.0;
  int count = 5;
  std::string out_dir;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  sweep->add_option("-p,--param", param, "parameter name")
      ->required()
      ->check(CLI::IsMember(
          {"d_s", "delta", "q", "alpha", "c", "dt", "horizon", "attack_start", "attack_scale"}));
  sweep->add_option("--from", from, "first value")->required();
  sweep->add_option("--to", to, "last value")->required();
  sweep->add_option("-n,--count", count, "number of values")->check(CLI::PositiveNumber);
  sweep->add_option("--out-dir", out_dir, "directory for per-run trace CSVs");
  sweep->add_option("-j,--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(common, trace_path, summary_path, quiet);
    if (*validate) return cmd_validate(common);
    if (*gains) return cmd_gains(common);
    if (*sweep) return cmd_sweep(common, param, from, to, count, out_dir, jobs);
  } catch (const saar::ScenarioError& e) {
    report_scenario_error(e);
    return kInvalidScenario;
  } catch (const saar::AssumptionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidScenario;
  } catch (const saar::InfeasibleQpError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInfeasibleQp;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
