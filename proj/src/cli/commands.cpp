#include "commands.hpp"

#include <future>
#include <iomanip>
#include <string>

#include <CLI11.hpp>

#include "outputs.hpp"
#include "phdae/diagnostics.hpp"

namespace phdae::cli {

namespace {

// Maps library errors to exit codes: bad input is 1, a failed solve is 2.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const NewtonFailure& e) {
    err << "error: NewtonFailure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const DomainError& e) {
    err << "error: DomainError: " << e.what() << '\n';
    return kExitSolver;
  } catch (const ConfigError& e) {
    err << "error: config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IndexTooHigh& e) {
    err << "error: IndexTooHigh: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ValidationError& e) {
    err << "error: ValidationError: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

std::filesystem::path resolve(const CommandOptions& opts, const std::string& name) {
  const std::filesystem::path p(name);
  return p.is_absolute() ? p : opts.out_dir / p;
}

const char* reference_name(ReferenceKind k) {
  return k == ReferenceKind::ClosedForm ? "closed_form" : "finest";
}

OrderRow order_cell(const Scenario& s, Scheme scheme, const std::vector<double>& taus) {
  OrderRow row;
  SchemeConfig cfg = s.scheme;
  cfg.scheme = scheme;
  row.scheme = to_string(scheme);
  try {
    check_scheme_applicable(s.spec, cfg);
  } catch (const IndexTooHigh& e) {
    row.applicable = false;
    row.failure = e.what();
    return row;
  }
  try {
    row.estimate = estimate_order(s.spec, cfg, s.initial, s.t0, s.t_end, taus, ReferenceKind::ClosedForm);
  } catch (const ReferenceUnavailable&) {
    try {
      row.estimate = estimate_order(s.spec, cfg, s.initial, s.t0, s.t_end, taus, ReferenceKind::Finest);
    } catch (const Error& e) {
      row.failure = e.what();
    }
  } catch (const Error& e) {
    row.failure = e.what();
  }
  return row;
}

}  // namespace

int run_command(const std::filesystem::path& path, const CommandOptions& opts, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(path, opts.seed);
    check_scheme_applicable(s.spec, s.scheme);
    const SimulationResult result = simulate(s.spec, s.scheme, s.t0, s.t_end, s.initial);
    const Trajectory& traj = result.trajectory;

    DiagnosticsReport report = make_report(traj);
    RunInfo info;
    info.completed = result.ok();
    info.error = result.error_message;

    if (s.outputs.trajectory_csv) {
      auto f = open_output(resolve(opts, *s.outputs.trajectory_csv));
      write_trajectory_csv(f, s, traj);
    }
    if (s.outputs.audit_csv) {
      auto f = open_output(resolve(opts, *s.outputs.audit_csv));
      write_audit_csv(f, traj);
    }
    if (s.outputs.report_json) {
      auto f = open_output(resolve(opts, *s.outputs.report_json));
      write_report_json(f, s, traj, report, info);
    }

    out << s.model_name << ' ' << s.scheme.label() << " tau=" << s.scheme.tau << " steps=" << traj.step_audits.size()
        << " H0=" << std::setprecision(10) << (traj.empty() ? 0.0 : traj.energies.front())
        << " H_end=" << (traj.empty() ? 0.0 : traj.energies.back())
        << " max_violation=" << report.max_dissipation_violation << '\n';
    if (!result.ok()) {
      try {
        std::rethrow_exception(result.error);
      } catch (const NewtonFailure& e) {
        err << "error: NewtonFailure: " << e.what() << '\n';
      } catch (const DomainError& e) {
        err << "error: DomainError: " << e.what() << '\n';
      } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
      }
      return kExitSolver;
    }
    return kExitOk;
  });
}

int converge_command(const std::filesystem::path& path, const std::vector<double>& taus,
                     const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  if (taus.size() < 3) {
    err << "error: need ≥ 3 step sizes (got " << taus.size() << ")\n";
    return kExitConfig;
  }
  return guarded(err, [&] {
    const Scenario s = load_scenario(path, opts.seed);
    for (std::size_t k = 0; k < taus.size(); ++k) {
      if (!(taus[k] > 0.0)) throw ConfigError("--tau values must be positive");
      if (k > 0 && std::abs(taus[k - 1] / taus[k] - 2.0) > 1e-9)
        throw ConfigError("--tau values must halve successively");
    }

    const Scheme schemes[] = {Scheme::ExplicitEuler, Scheme::ImplicitEuler, Scheme::Midpoint,
                              Scheme::DiscreteGradient};
    std::vector<std::future<OrderRow>> cells;
    for (Scheme sc : schemes) cells.push_back(std::async(std::launch::async, order_cell, std::cref(s), sc, taus));
    std::vector<std::future<Table1Grid>> grids;
    if (s.quantum) {
      for (double tau : taus) {
        grids.push_back(std::async(std::launch::async, [&s, tau] {
          return table1_comparison(*s.quantum, tau, s.t_end - s.t0);
        }));
      }
    }

    std::vector<OrderRow> rows;
    for (auto& c : cells) rows.push_back(c.get());
    std::vector<Table1Grid> tables;
    for (auto& g : grids) tables.push_back(g.get());

    {
      auto f = open_output(resolve(opts, "orders.csv"));
      write_orders_csv(f, rows);
    }
    for (const OrderRow& r : rows) {
      auto f = open_output(resolve(opts, "orders_" + r.scheme + ".csv"));
      write_orders_csv(f, {r});
    }
    if (!tables.empty()) {
      auto f = open_output(resolve(opts, "table1.csv"));
      write_table1_csv(f, tables);
    }

    out << std::left << std::setw(18) << "scheme" << std::setw(12) << "order" << "reference\n";
    for (const OrderRow& r : rows) {
      out << std::setw(18) << r.scheme;
      if (!r.applicable) {
        out << "not applicable (" << r.failure << ")\n";
      } else if (!r.failure.empty()) {
        out << "failed (" << r.failure << ")\n";
      } else {
        out << std::setw(12) << std::setprecision(4) << r.estimate.order << reference_name(r.estimate.reference)
            << '\n';
      }
    }
    for (const Table1Grid& g : tables) {
      out << "comparison tau=" << g.tau << " energy ordering " << (g.energy_ordering_holds ? "holds" : "violated")
          << ", probability bound " << (g.probability_bound_holds ? "holds" : "violated") << '\n';
    }
    return kExitOk;
  });
}

int validate_command(const std::filesystem::path& path, const CommandOptions& opts, std::ostream& out,
                     std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(path, opts.seed);
    check_dimensions(s.spec);
    const ValidationReport report = validate_structure(s.spec.structure);
    out << s.spec.name << ": " << report.to_string() << '\n';

    const Vector center = s.initial.energy_variables();
    ProbeRegion region;
    region.center = center;
    region.radius = 1e-2 * (1.0 + numkit::inf_norm(center));
    region.seed = s.seed;
    for (DiscreteGradientKind kind : {DiscreteGradientKind::Gonzalez, DiscreteGradientKind::ItohAbe}) {
      try {
        const DiscreteGradientReport dg = check_discrete_gradient_axioms(s.spec.hamiltonian, kind, 200, region);
        out << "discrete gradient " << to_string(kind) << ": samples=" << dg.samples
            << " energy_violation=" << dg.max_energy_violation
            << " consistency_violation=" << dg.max_consistency_violation << '\n';
      } catch (const DomainError& e) {
        out << "discrete gradient " << to_string(kind) << ": skipped (" << e.what() << ")\n";
      }
    }
    return report.valid() ? kExitOk : kExitConfig;
  });
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structure-preserving simulation of port-Hamiltonian DAE scenarios", "phdae_run"};
  app.require_subcommand(1);
  CommandOptions opts;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "override the scenario seed");
  app.add_option("--out-dir", out_dir, "directory for output files");
  app.fallthrough();

  std::string scenario;
  std::vector<double> taus;
  auto* run = app.add_subcommand("run", "simulate a scenario and write its outputs");
  run->add_option("scenario", scenario, "scenario file")->required();
  auto* converge = app.add_subcommand("converge", "estimate convergence orders of all schemes");
  converge->add_option("scenario", scenario, "scenario file")->required();
  converge->add_option("--tau", taus, "step size (repeat, successive halvings)")->take_all();
  auto* validate = app.add_subcommand("validate", "check structure and discrete-gradient axioms");
  validate->add_option("scenario", scenario, "scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  opts.out_dir = out_dir;
  if (seed_opt->count() > 0) opts.seed = seed;

  if (run->parsed()) return run_command(scenario, opts, out, err);
  if (converge->parsed()) return converge_command(scenario, taus, opts, out, err);
  return validate_command(scenario, opts, out, err);
}

}  // namespace phdae::cli
