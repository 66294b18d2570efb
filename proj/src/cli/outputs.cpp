#include "outputs.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

namespace phdae::cli {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no inf/nan; those become null.
nlohmann::ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Scenario& s, const Trajectory& traj) {
  const Eigen::Index n = s.original.partition.n();
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i) os << ",z" << i;
  os << ",H,supply,dissipation\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Vector z = to_original(s, traj.states[k]).stacked();
    os << fmt(traj.times[k]);
    for (Eigen::Index i = 0; i < z.size(); ++i) os << ',' << fmt(z(i));
    double supply = 0.0;
    double dissipation = 0.0;
    if (k > 0) {
      supply = traj.step_audits[k - 1].supply;
      dissipation = traj.step_audits[k - 1].dissipation;
    }
    os << ',' << fmt(traj.energies[k]) << ',' << fmt(supply) << ',' << fmt(dissipation) << '\n';
  }
}

void write_audit_csv(std::ostream& os, const Trajectory& traj) {
  os << "step,t,energy_before,energy_after,supply,dissipation,newton_iters,newton_residual\n";
  for (std::size_t k = 0; k < traj.step_audits.size(); ++k) {
    const StepAudit& a = traj.step_audits[k];
    os << k << ',' << fmt(traj.times[k]) << ',' << fmt(a.energy_before) << ',' << fmt(a.energy_after)
       << ',' << fmt(a.supply) << ',' << fmt(a.dissipation) << ',' << a.newton_iters << ','
       << fmt(a.newton_residual) << '\n';
  }
}

void write_report_json(std::ostream& os, const Scenario& s, const Trajectory& traj,
                       const DiagnosticsReport& report, const RunInfo& info) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["model"] = s.model_name;
  j["scheme"] = s.scheme.label();
  j["tau"] = s.scheme.tau;
  j["t0"] = s.t0;
  j["t_end"] = s.t_end;
  j["epsilon"] = s.epsilon ? num(*s.epsilon) : nlohmann::ordered_json(nullptr);
  j["seed"] = s.seed;
  j["completed"] = info.completed;
  j["error"] = info.error.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(info.error);
  j["steps"] = traj.step_audits.size();
  j["t_reached"] = traj.empty() ? num(s.t0) : num(traj.times.back());

  nlohmann::ordered_json d;
  d["max_dissipation_violation"] = num(report.max_dissipation_violation);
  d["max_identity_defect"] = num(report.max_identity_defect);
  d["decay_rate_beta"] = report.decay_rate_beta ? num(*report.decay_rate_beta) : nlohmann::ordered_json(nullptr);
  d["decay_fit_r2"] = num(report.decay_fit_r2);
  d["decay_envelope_holds"] = report.decay_envelope_holds;
  nlohmann::ordered_json orders = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.observed_orders) orders[k] = num(v);
  d["observed_orders"] = orders;
  d["bounded"] = report.boundedness.bounded;
  d["max_state_norm"] = num(report.boundedness.max_norm);
  d["terminal_energy"] = num(report.plateau.terminal_energy);
  d["last_decile_energy_range"] = num(report.plateau.last_decile_range);
  d["energy_settled"] = report.plateau.settled;
  j["diagnostics"] = d;

  if (s.quantum) j["quantum_beta_formula"] = num(quantum_beta_formula(*s.quantum));
  os << j.dump(2) << '\n';
}

void write_orders_csv(std::ostream& os, const std::vector<OrderRow>& rows) {
  os << "scheme,tau,error,pair_order,order,reference,status\n";
  for (const OrderRow& r : rows) {
    if (!r.applicable || !r.failure.empty()) {
      std::string status = r.applicable ? r.failure : "not_applicable: " + r.failure;
      for (char& c : status)
        if (c == ',' || c == '\n') c = ';';
      os << r.scheme << ",,,,,," << status << '\n';
      continue;
    }
    const OrderEstimate& e = r.estimate;
    const char* ref = e.reference == ReferenceKind::ClosedForm ? "closed_form" : "finest";
    for (std::size_t i = 0; i < e.taus.size(); ++i) {
      os << r.scheme << ',' << fmt(e.taus[i]) << ',' << fmt(e.errors[i]) << ',';
      if (i > 0) os << fmt(e.pair_orders[i - 1]);
      os << ',' << fmt(e.order) << ',' << ref << ",ok\n";
    }
  }
}

void write_table1_csv(std::ostream& os, const std::vector<Table1Grid>& grids) {
  os << "tau,scheme,completed,energy_balance_error,energy_accuracy_error,probability_violation,"
        "entropy_violation\n";
  for (const Table1Grid& g : grids) {
    for (const Table1Row& r : g.rows) {
      os << fmt(g.tau) << ',' << r.scheme << ',' << (r.completed ? 1 : 0) << ','
         << fmt(r.energy_balance_error) << ',' << fmt(r.energy_accuracy_error) << ','
         << fmt(r.probability_violation) << ',' << fmt(r.entropy_violation) << '\n';
    }
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write output file '" + path.string() + "'");
  out.precision(17);
  return out;
}

}  // namespace phdae::cli
