#include "ceo/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ceo {

Json matrix_to_json(const Matrix& a) {
  Json rows = Json::array();
  for (int i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw std::runtime_error(std::string(what) +
                             ": expected a non-empty nested array");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].is_array() ? j[0].size() : 0);
  if (cols == 0)
    throw std::runtime_error(std::string(what) + ": expected nested arrays");
  Matrix a(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols)
      throw std::runtime_error(std::string(what) + ": ragged matrix rows");
    for (int c = 0; c < cols; ++c) {
      if (!j[r][c].is_number())
        throw std::runtime_error(std::string(what) + ": non-numeric entry");
      a(r, c) = j[r][c].get<double>();
    }
  }
  return a;
}

double nats_to_bits(double nats) { return nats / std::log(2.0); }

std::string format_sig17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ProblemInstance instance_from_json(const Json& j) {
  ProblemInstance inst;
  try {
    inst.m = j.at("m").get<int>();
    inst.L = j.at("L").get<int>();
    inst.K = matrix_from_json(j.at("K"), "K");
    for (const auto& s : j.at("Sigma"))
      inst.Sigma.push_back(matrix_from_json(s, "Sigma"));
    const auto& mu = j.at("mu");
    inst.mu.resize(static_cast<int>(mu.size()));
    for (int i = 0; i < inst.mu.size(); ++i) inst.mu[i] = mu[i].get<double>();
    inst.d = j.at("d").get<double>();
  } catch (const Json::exception& e) {
    throw std::runtime_error(std::string("instance parse error: ") + e.what());
  }
  symmetrize_inputs(inst);
  return inst;
}

Json instance_to_json(const ProblemInstance& instance) {
  Json j;
  j["m"] = instance.m;
  j["L"] = instance.L;
  j["K"] = matrix_to_json(instance.K);
  j["Sigma"] = Json::array();
  for (const auto& s : instance.Sigma) j["Sigma"].push_back(matrix_to_json(s));
  j["mu"] = Json::array();
  for (int i = 0; i < instance.mu.size(); ++i) j["mu"].push_back(instance.mu[i]);
  j["d"] = instance.d;
  return j;
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw std::runtime_error("instance parse error in " + path + ": " +
                             e.what());
  }
  return instance_from_json(j);
}

Json validation_to_json(const ValidationReport& report) {
  Json j;
  j["ok"] = report.ok;
  j["violations"] = Json::array();
  for (const auto& v : report.violations)
    j["violations"].push_back({{"rule", v.rule}, {"message", v.message}});
  j["d_window"] = {report.d_window.first, report.d_window.second};
  return j;
}

namespace {

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::OracleExact: return "OracleExact";
  }
  return "Unknown";
}

SolveStatus status_from_name(const std::string& s) {
  if (s == "Converged") return SolveStatus::Converged;
  if (s == "OracleExact") return SolveStatus::OracleExact;
  return SolveStatus::MaxIterations;
}

}  // namespace

Json solution_to_json(const ProblemInstance& instance,
                      const BtSolution& solution) {
  Json j;
  j["B"] = Json::array();
  for (const auto& b : solution.point.B) j["B"].push_back(matrix_to_json(b));
  j["rate_nats"] = solution.rate;
  j["rate_bits"] = nats_to_bits(solution.rate);
  j["trace_mse"] = instance.d + solution.trace_gap;
  j["status"] = status_name(solution.status);
  j["starts_used"] = solution.starts_used;
  j["seed"] = solution.seed;
  j["projected_gradient_norm"] = solution.projected_gradient_norm;
  j["lambda_estimate"] = solution.lambda_estimate;
  return j;
}

BtSolution solution_from_json(const ProblemInstance& instance, const Json& j) {
  BtSolution sol;
  for (const auto& b : j.at("B"))
    sol.point.B.push_back(sym(matrix_from_json(b, "B")));
  if (static_cast<int>(sol.point.B.size()) != instance.L)
    throw std::runtime_error("solution B count does not match instance L");
  sol.chain = mse_chain(instance, sol.point);
  sol.rate = bt_objective(instance, sol.point);
  sol.trace_gap = sol.chain.C[0].trace() - instance.d;
  sol.status = status_from_name(j.value("status", "Converged"));
  sol.starts_used = j.value("starts_used", 0);
  sol.seed = j.value("seed", static_cast<std::uint64_t>(0));
  sol.projected_gradient_norm = j.value("projected_gradient_norm", 0.0);
  sol.lambda_estimate = j.value("lambda_estimate", 0.0);
  return sol;
}

Json certificate_to_json(const KktCertificate& cert) {
  Json j;
  j["lambda"] = cert.lambda;
  j["Psi"] = Json::array();
  for (const auto& p : cert.Psi) j["Psi"].push_back(matrix_to_json(p));
  j["residuals"] = {{"stationarity", cert.residuals.stationarity},
                    {"slackness", cert.residuals.slackness},
                    {"trace_gap", cert.residuals.trace_gap},
                    {"psi_min_eig", cert.residuals.psi_min_eig}};
  return j;
}

KktCertificate certificate_from_json(const Json& j) {
  KktCertificate cert;
  cert.lambda = j.at("lambda").get<double>();
  for (const auto& p : j.at("Psi"))
    cert.Psi.push_back(sym(matrix_from_json(p, "Psi")));
  const auto& r = j.at("residuals");
  cert.residuals.stationarity = r.at("stationarity").get<std::vector<double>>();
  cert.residuals.slackness = r.at("slackness").get<std::vector<double>>();
  cert.residuals.trace_gap = r.at("trace_gap").get<double>();
  cert.residuals.psi_min_eig = r.at("psi_min_eig").get<std::vector<double>>();
  return cert;
}

Json kkt_report_to_json(const KktReport& report) {
  return Json{{"stationarity_ok", report.stationarity_ok},
              {"slackness_ok", report.slackness_ok},
              {"trace_ok", report.trace_ok},
              {"dual_ok", report.dual_ok},
              {"activity_ok", report.activity_ok},
              {"ok", report.ok},
              {"max_stationarity", report.max_stationarity},
              {"max_slackness", report.max_slackness},
              {"trace_gap", report.trace_gap},
              {"min_psi_eig", report.min_psi_eig},
              {"lambda", report.lambda}};
}

Json spectral_to_json(const SpectralDecomposition& decomp) {
  Json j;
  j["eigvals"] = Json::array();
  for (int i = 0; i < decomp.eigvals.size(); ++i)
    j["eigvals"].push_back(decomp.eigvals[i]);
  j["dims"] = decomp.dims;
  j["lambda"] = decomp.lambda;
  j["degenerate"] = Json::array();
  for (const auto& d : decomp.degenerate)
    j["degenerate"].push_back({{"level", d.level},
                               {"eigen_index", d.eigen_index},
                               {"value", d.value}});
  return j;
}

namespace {
Json property_to_json(const PropertyCheck& p) {
  return Json{{"residual", p.residual}, {"pass", p.pass}};
}
}  // namespace

Json spectral_report_to_json(const SpectralReport& report) {
  return Json{{"spectrum_C", property_to_json(report.spectrum_c)},
              {"spectrum_Delta", property_to_json(report.spectrum_delta)},
              {"definiteness", property_to_json(report.definiteness)},
              {"orthogonality", property_to_json(report.orthogonality)},
              {"chain_pass_through", property_to_json(report.chain_pass)},
              {"cross_block", property_to_json(report.cross_block)},
              {"all_pass", report.all_pass}};
}

Json path_report_to_json(const PathReport& report, bool include_samples) {
  Json j{{"max_forward_increase", report.max_forward_increase},
         {"g0_minus_g1", report.g0_minus_g1},
         {"nonincreasing", report.nonincreasing},
         {"pass", report.pass},
         {"points", report.gamma.size()}};
  if (include_samples) {
    j["gamma"] = report.gamma;
    j["g_nats"] = report.g_nats;
  }
  return j;
}

Json extremal_report_to_json(const ExtremalReport& report) {
  return Json{{"lhs", report.lhs},         {"rhs", report.rhs},
              {"gap", report.gap},         {"trace", report.trace},
              {"feasible", report.feasible}, {"pass", report.pass}};
}

namespace {
Json bound_to_json(const BoundCheck& b) {
  return Json{{"margin", b.margin}, {"pass", b.pass}};
}
}  // namespace

Json chain_report_to_json(const ChainReport& report) {
  Json j;
  j["terms"] = {{"I1", report.I1}, {"I2", report.I2}, {"I3", report.I3},
                {"I4", report.I4}, {"I5", report.I5}, {"I6", report.I6},
                {"I7", report.I7}};
  j["inequalities"] = {
      {"I2_le_I5_plus_I6", bound_to_json(report.i2_le_i5_plus_i6)},
      {"I1_plus_I5_le_I7", bound_to_json(report.i1_plus_i5_le_i7)},
      {"I6_nonpositive", bound_to_json(report.i6_nonpositive)},
      {"I7_plus_I3_nonpositive", bound_to_json(report.i7_plus_i3_nonpositive)},
      {"I4_nonpositive", bound_to_json(report.i4_nonpositive)}};
  j["fisher_bound"] = {{"min_eig", report.fisher_bound_min_eig},
                       {"pass", report.fisher_bound_pass}};
  j["derivatives"] = {{"identity_rel", report.deriv_identity_rel},
                      {"u_margin", report.deriv_u_margin},
                      {"v_margin", report.deriv_v_margin},
                      {"pass", report.deriv_pass}};
  j["all_pass"] = report.all_pass;
  return j;
}

Json lemma_suite_to_json(const LemmaSuiteReport& report) {
  Json j;
  j["seed"] = report.seed;
  j["cramer_rao_worst"] = report.cramer_rao_worst;
  j["all_pass"] = report.all_pass;
  j["lemmas"] = Json::array();
  for (const auto& l : report.lemmas) {
    j["lemmas"].push_back({{"name", l.name},
                           {"worst_residual", l.worst_residual},
                           {"worst_condition", l.worst_condition},
                           {"tolerance", l.tolerance},
                           {"draws", l.draws},
                           {"pass", l.pass}});
  }
  return j;
}

GaussianTestChannel channel_from_json(const Json& j, int m, int L) {
  GaussianTestChannel ch;
  try {
    for (const auto& a : j.at("A")) ch.A.push_back(matrix_from_json(a, "A"));
    for (const auto& q : j.at("Q")) ch.Q.push_back(matrix_from_json(q, "Q"));
  } catch (const Json::exception& e) {
    throw std::runtime_error(std::string("channel parse error: ") + e.what());
  }
  if (static_cast<int>(ch.A.size()) != L || static_cast<int>(ch.Q.size()) != L)
    throw std::runtime_error("channel must provide A and Q per agent");
  for (const auto& a : ch.A) {
    if (a.rows() != m || a.cols() != m)
      throw std::runtime_error("channel gain A_i is not m x m");
  }
  for (const auto& q : ch.Q) {
    if (q.rows() != m || q.cols() != m)
      throw std::runtime_error("channel noise Q_i is not m x m");
  }
  return ch;
}

Json channel_to_json(const GaussianTestChannel& channel) {
  Json j;
  j["A"] = Json::array();
  j["Q"] = Json::array();
  for (const auto& a : channel.A) j["A"].push_back(matrix_to_json(a));
  for (const auto& q : channel.Q) j["Q"].push_back(matrix_to_json(q));
  return j;
}

}  // namespace ceo
