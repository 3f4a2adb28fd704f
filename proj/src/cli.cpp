#include "ceo/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ceo/serialize.hpp"

namespace ceo {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitFailed = 3;

constexpr double kKktTol = 1e-6;
constexpr double kTheorem2Tol = 1e-6;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CEO_RATE_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return v;
  }
  return kDefaultSeed;
}

void emit(const Json& j, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << j.dump(2) << "\n";
  } else {
    std::ofstream f(out_path);
    f << j.dump(2) << "\n";
  }
}

struct Loaded {
  ProblemInstance instance;
  ValidationReport report;
};

std::optional<Loaded> load_and_validate(const std::string& path,
                                        std::ostream& err) {
  Loaded l;
  try {
    l.instance = load_instance(path);
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return std::nullopt;
  }
  l.report = validate(l.instance);
  if (!l.report.ok) {
    err << validation_to_json(l.report).dump(2) << "\n";
    return std::nullopt;
  }
  return l;
}

void write_path_csv(const PathReport& path, const std::string& csv_path) {
  if (csv_path.empty()) return;
  std::ofstream f(csv_path);
  f << "gamma,g_nats\n";
  for (std::size_t i = 0; i < path.gamma.size(); ++i)
    f << format_sig17(path.gamma[i]) << "," << format_sig17(path.g_nats[i])
      << "\n";
}

struct PipelineResult {
  Json report;
  bool pass = false;
};

/// solve -> recover multipliers -> check KKT -> decompose -> Theorem 2 ->
/// matched-channel extremal checks, stopping at the first failing stage.
PipelineResult run_pipeline(const ProblemInstance& instance,
                            const SolverOptions& opts, int grid) {
  PipelineResult out;
  Json& stages = out.report["stages"];
  out.report["pass"] = false;
  out.report["first_failure"] = nullptr;

  auto fail = [&](const std::string& stage) {
    out.report["first_failure"] = stage;
    return out;
  };

  const BtSolution solution = solve_bt(instance, opts);
  stages["solve"] = solution_to_json(instance, solution);
  if (solution.status != SolveStatus::Converged) return fail("solve");

  const KktCertificate cert = recover_multipliers(instance, solution);
  const KktReport kkt = check_kkt(instance, solution, cert, kKktTol);
  stages["kkt"] = kkt_report_to_json(kkt);
  stages["kkt"]["lambda"] = cert.lambda;
  if (!kkt.ok) return fail("kkt");

  const SpectralDecomposition decomp = decompose(instance, solution, cert);
  const SpectralReport spectral =
      verify_theorem2(instance, solution, cert, decomp, kTheorem2Tol);
  stages["decompose"] = spectral_to_json(decomp);
  stages["theorem2"] = spectral_report_to_json(spectral);
  if (!spectral.all_pass) return fail("theorem2");

  const GaussianTestChannel matched = matched_channel(instance, solution);
  const ExtremalReport extremal = verify_extremal(instance, solution, matched);
  stages["extremal"] = extremal_report_to_json(extremal);
  const bool equality_ok = std::abs(extremal.gap) <= 1e-8;
  stages["extremal"]["matched_equality"] = equality_ok;
  if (!extremal.pass || !equality_ok) return fail("extremal");

  const PathReport path =
      verify_monotone(instance, solution, decomp, matched, grid);
  stages["path"] = path_report_to_json(path, false);
  const bool flat_ok = std::abs(path.g0_minus_g1) <= 1e-8;
  stages["path"]["matched_flat"] = flat_ok;
  if (!path.pass || !flat_ok) return fail("path");

  bool chain_ok = true;
  stages["chain"] = Json::array();
  for (double gamma : {0.25, 0.5, 0.75}) {
    const ChainReport chain =
        verify_proof_chain(instance, solution, cert, decomp, matched, gamma);
    Json cj = chain_report_to_json(chain);
    cj["gamma"] = gamma;
    stages["chain"].push_back(std::move(cj));
    chain_ok = chain_ok && chain.all_pass;
  }
  if (!chain_ok) return fail("chain");

  out.report["pass"] = true;
  out.pass = true;
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Berger-Tung rate region of the vector Gaussian CEO problem "
               "under a trace distortion constraint"};
  app.require_subcommand(1);

  SolverOptions opts;
  opts.seed = default_seed();
  std::string instance_path, out_path, csv_path, channel_path, solution_path;
  std::string format = "json";
  bool bits = false;
  bool use_oracle = false;
  int grid = 1001;
  int draws = 100;

  auto add_common = [&](CLI::App* cmd, bool with_solver) {
    cmd->add_option("--out", out_path, "write the JSON report to this file");
    if (with_solver) {
      cmd->add_option("--starts", opts.starts, "number of solver starts");
      cmd->add_option("--tol", opts.tol, "projected-gradient tolerance");
      cmd->add_option("--max-iters", opts.max_iters,
                      "iteration cap per inner solve");
      cmd->add_option("--seed", opts.seed,
                      "random seed (CEO_RATE_SEED overrides the default)");
      cmd->add_option("--oracle-resolution", opts.oracle_resolution,
                      "grid step for --oracle");
    }
  };

  CLI::App* solve = app.add_subcommand("solve", "minimize the weighted sum rate");
  solve->add_option("instance", instance_path, "instance JSON file")->required();
  solve->add_flag("--oracle", use_oracle, "use the brute-force grid oracle");
  solve->add_flag("--bits", bits, "report the rate in bits as well");
  add_common(solve, true);

  CLI::App* kkt = app.add_subcommand("kkt", "recover multipliers and check KKT");
  kkt->add_option("instance", instance_path)->required();
  kkt->add_option("--solution", solution_path,
                  "re-check a stored solution instead of solving");
  add_common(kkt, true);

  CLI::App* dec = app.add_subcommand("decompose",
                                     "eigen-subspace decomposition report");
  dec->add_option("instance", instance_path)->required();
  add_common(dec, true);

  CLI::App* ver = app.add_subcommand(
      "verify-extremal", "extremal inequality and the g(gamma) path");
  ver->add_option("instance", instance_path)->required();
  ver->add_option("--channel", channel_path, "test channel JSON file");
  ver->add_option("--grid", grid, "gamma grid points");
  ver->add_option("--csv", csv_path, "write the sampled path as CSV");
  add_common(ver, true);

  CLI::App* lem = app.add_subcommand("lemmas", "randomized identity suite");
  lem->add_option("--draws", draws, "draws per lemma");
  lem->add_option("--seed", opts.seed, "random seed");
  lem->add_option("--format", format, "json or table")
      ->check(CLI::IsMember({"json", "table"}));
  lem->add_option("--out", out_path, "write the JSON report to this file");

  CLI::App* pipe = app.add_subcommand("pipeline", "full verification pipeline");
  pipe->add_option("instance", instance_path)->required();
  pipe->add_option("--grid", grid, "gamma grid points");
  add_common(pipe, true);

  std::string sweep_var = "d";
  double lo = 0.0, hi = 0.0;
  int steps = 0;
  std::string json_path;
  CLI::App* sweep = app.add_subcommand("sweep", "rate curve CSV over d or a weight ray");
  sweep->add_option("instance", instance_path)->required();
  sweep->add_option("--var", sweep_var, "sweep variable")
      ->check(CLI::IsMember({"d", "mu_ray"}));
  sweep->add_option("--lo", lo)->required();
  sweep->add_option("--hi", hi)->required();
  sweep->add_option("--steps", steps)->required();
  sweep->add_option("--json", json_path, "also write a JSON report");
  add_common(sweep, true);

  std::vector<const char*> argv;
  argv.push_back("ceo-rate");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (solve->parsed()) {
      auto loaded = load_and_validate(instance_path, err);
      if (!loaded) return kExitInput;
      const BtSolution sol = use_oracle
                                 ? oracle_grid(loaded->instance,
                                               opts.oracle_resolution)
                                 : solve_bt(loaded->instance, opts);
      Json j = solution_to_json(loaded->instance, sol);
      if (!bits) j.erase("rate_bits");
      emit(j, out_path, out);
      return sol.status != SolveStatus::MaxIterations ? kExitOk : kExitFailed;
    }

    if (kkt->parsed()) {
      auto loaded = load_and_validate(instance_path, err);
      if (!loaded) return kExitInput;
      BtSolution sol;
      if (!solution_path.empty()) {
        std::ifstream f(solution_path);
        if (!f) {
          err << "cannot open solution file: " << solution_path << "\n";
          return kExitInput;
        }
        Json sj;
        f >> sj;
        sol = solution_from_json(loaded->instance, sj);
      } else {
        sol = solve_bt(loaded->instance, opts);
      }
      const KktCertificate cert = recover_multipliers(loaded->instance, sol);
      const KktReport rep = check_kkt(loaded->instance, sol, cert, kKktTol);
      Json j;
      j["solution"] = solution_to_json(loaded->instance, sol);
      j["certificate"] = certificate_to_json(cert);
      j["report"] = kkt_report_to_json(rep);
      emit(j, out_path, out);
      return rep.ok ? kExitOk : kExitFailed;
    }

    if (dec->parsed()) {
      auto loaded = load_and_validate(instance_path, err);
      if (!loaded) return kExitInput;
      const BtSolution sol = solve_bt(loaded->instance, opts);
      const KktCertificate cert = recover_multipliers(loaded->instance, sol);
      const SpectralDecomposition decomp =
          decompose(loaded->instance, sol, cert);
      const SpectralReport rep =
          verify_theorem2(loaded->instance, sol, cert, decomp, kTheorem2Tol);
      Json j = spectral_to_json(decomp);
      j["properties"] = spectral_report_to_json(rep);
      emit(j, out_path, out);
      return rep.all_pass ? kExitOk : kExitFailed;
    }

    if (ver->parsed()) {
      auto loaded = load_and_validate(instance_path, err);
      if (!loaded) return kExitInput;
      const BtSolution sol = solve_bt(loaded->instance, opts);
      const KktCertificate cert = recover_multipliers(loaded->instance, sol);
      const SpectralDecomposition decomp =
          decompose(loaded->instance, sol, cert);
      GaussianTestChannel channel;
      if (channel_path.empty()) {
        channel = matched_channel(loaded->instance, sol);
      } else {
        std::ifstream f(channel_path);
        if (!f) {
          err << "cannot open channel file: " << channel_path << "\n";
          return kExitInput;
        }
        Json cj;
        try {
          f >> cj;
        } catch (const Json::exception& e) {
          err << "channel parse error: " << e.what() << "\n";
          return kExitInput;
        }
        channel = channel_from_json(cj, loaded->instance.m, loaded->instance.L);
      }

      const ExtremalReport ext = verify_extremal(loaded->instance, sol, channel);
      if (!ext.feasible) {
        err << "channel is infeasible: tr cov(X|M) = " << ext.trace << " > d\n";
        return kExitInput;
      }
      const PathReport path =
          verify_monotone(loaded->instance, sol, decomp, channel, grid);
      Json j;
      j["extremal"] = extremal_report_to_json(ext);
      j["path"] = path_report_to_json(path, true);
      j["chain"] = Json::array();
      bool chain_ok = true;
      for (double gamma : {0.25, 0.5, 0.75}) {
        const ChainReport chain = verify_proof_chain(loaded->instance, sol, cert,
                                                     decomp, channel, gamma);
        Json cj = chain_report_to_json(chain);
        cj["gamma"] = gamma;
        j["chain"].push_back(std::move(cj));
        chain_ok = chain_ok && chain.all_pass;
      }
      emit(j, out_path, out);
      write_path_csv(path, csv_path);
      return ext.pass && path.pass && chain_ok ? kExitOk : kExitFailed;
    }

    if (lem->parsed()) {
      const LemmaSuiteReport rep = run_lemma_suite(opts.seed, draws);
      if (format == "json" || !out_path.empty()) {
        emit(lemma_suite_to_json(rep), out_path, out);
      }
      if (format == "table") {
        out << "lemma                            worst residual  tolerance  "
               "pass\n";
        for (const auto& l : rep.lemmas) {
          std::ostringstream line;
          line.setf(std::ios::left);
          line.width(33);
          line << l.name;
          line << format_sig17(l.worst_residual) << "  " << l.tolerance << "  "
               << (l.pass ? "PASS" : "FAIL");
          out << line.str() << "\n";
        }
      }
      return rep.all_pass ? kExitOk : kExitFailed;
    }

    if (pipe->parsed()) {
      auto loaded = load_and_validate(instance_path, err);
      if (!loaded) return kExitInput;
      PipelineResult res = run_pipeline(loaded->instance, opts, grid);
      emit(res.report, out_path, out);
      return res.pass ? kExitOk : kExitFailed;
    }

    if (sweep->parsed()) {
      auto loaded = load_and_validate(instance_path, err);
      if (!loaded) return kExitInput;
      if (!(lo < hi) || steps < 2) {
        err << "sweep requires lo < hi and steps >= 2\n";
        return kExitInput;
      }
      const auto [d_min, d_max] = d_bounds(loaded->instance);
      if (sweep_var == "d" && !(lo > d_min && hi < d_max)) {
        err << "swept d values must stay inside the window (" << d_min << ", "
            << d_max << ")\n";
        return kExitInput;
      }
      if (sweep_var == "mu_ray" && !(lo >= 1.0)) {
        err << "mu_ray sweeps the weight ratio r >= 1 with mu_i = r^(L-i)\n";
        return kExitInput;
      }

      std::ostringstream csv;
      csv << "value,rate_nats,rate_bits,trace_mse,kkt_max_residual,status\n";
      Json points = Json::array();
      bool all_ok = true;
      for (int t = 0; t < steps; ++t) {
        const double value = lo + (hi - lo) * t / (steps - 1);
        ProblemInstance point = loaded->instance;
        if (sweep_var == "d") {
          point.d = value;
        } else {
          for (int i = 0; i < point.L; ++i)
            point.mu[i] = std::pow(value, point.L - 1 - i);
        }
        const BtSolution sol = solve_bt(point, opts);
        const KktCertificate cert = recover_multipliers(point, sol);
        const KktReport rep = check_kkt(point, sol, cert, kKktTol);
        const double max_res =
            std::max({rep.max_stationarity, rep.max_slackness,
                      std::abs(rep.trace_gap), -rep.min_psi_eig});
        const bool ok = sol.status == SolveStatus::Converged && rep.ok;
        all_ok = all_ok && ok;
        csv << format_sig17(value) << "," << format_sig17(sol.rate) << ","
            << format_sig17(nats_to_bits(sol.rate)) << ","
            << format_sig17(point.d + sol.trace_gap) << ","
            << format_sig17(max_res) << ","
            << (ok ? "ok" : "failed") << "\n";
        points.push_back({{"value", value},
                          {"rate_nats", sol.rate},
                          {"kkt_ok", rep.ok},
                          {"status", ok ? "ok" : "failed"}});
      }
      if (out_path.empty()) {
        out << csv.str();
      } else {
        std::ofstream f(out_path);
        f << csv.str();
      }
      if (!json_path.empty()) {
        std::ofstream f(json_path);
        f << Json{{"variable", sweep_var}, {"points", points}}.dump(2) << "\n";
      }
      return all_ok ? kExitOk : kExitFailed;
    }
  } catch (const TooLargeError& e) {
    err << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitFailed;
  }
  return kExitInput;
}

}  // namespace ceo
