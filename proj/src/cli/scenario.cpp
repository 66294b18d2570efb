#include "scenario.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "phdae/transforms.hpp"

namespace phdae::cli {

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& what) {
  std::ostringstream msg;
  msg << "field '" << field << "'";
  if (node.IsDefined() && node.Mark().line >= 0) msg << " (line " << node.Mark().line + 1 << ")";
  msg << ": " << what;
  throw ConfigError(msg.str());
}

// Missing sections behave like empty mappings so lookups inside them fall back to defaults.
YAML::Node section(const YAML::Node& parent, const std::string& key) {
  YAML::Node n = parent[key];
  if (!n.IsDefined() || n.IsNull()) return YAML::Node(YAML::NodeType::Map);
  return n;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& path) {
  if (!node.IsDefined() || node.IsNull()) return;
  if (!node.IsMap()) fail(node, path, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, join(path, key), "unknown key");
  }
}

double as_double(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(node, field, "expected a number");
  try {
    const double v = node.as<double>();
    if (!std::isfinite(v)) fail(node, field, "must be finite");
    return v;
  } catch (const YAML::Exception&) {
    fail(node, field, "expected a number, got '" + node.Scalar() + "'");
  }
}

double get_double(const YAML::Node& parent, const std::string& key, double fallback,
                  const std::string& path) {
  const YAML::Node n = parent[key];
  if (!n.IsDefined() || n.IsNull()) return fallback;
  return as_double(n, join(path, key));
}

int get_int(const YAML::Node& parent, const std::string& key, int fallback, const std::string& path) {
  const YAML::Node n = parent[key];
  if (!n.IsDefined() || n.IsNull()) return fallback;
  try {
    return n.as<int>();
  } catch (const YAML::Exception&) {
    fail(n, join(path, key), "expected an integer");
  }
}

std::string get_string(const YAML::Node& parent, const std::string& key, const std::string& fallback,
                       const std::string& path) {
  const YAML::Node n = parent[key];
  if (!n.IsDefined() || n.IsNull()) return fallback;
  if (!n.IsScalar()) fail(n, join(path, key), "expected a string");
  return n.Scalar();
}

Vector as_vector(const YAML::Node& node, const std::string& field) {
  if (node.IsScalar()) return Vector::Constant(1, as_double(node, field));
  if (!node.IsSequence()) fail(node, field, "expected a list of numbers");
  Vector v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = as_double(node[i], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

Matrix as_matrix(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence()) fail(node, field, "expected a list of rows");
  if (node.size() == 0) return Matrix();
  const auto rows = static_cast<Eigen::Index>(node.size());
  Eigen::Index cols = -1;
  Matrix m;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const Vector row = as_vector(node[i], field + "[" + std::to_string(i) + "]");
    if (cols < 0) {
      cols = row.size();
      m.resize(rows, cols);
    } else if (row.size() != cols) {
      fail(node[i], field, "rows have different lengths");
    }
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

Matrix get_matrix(const YAML::Node& parent, const std::string& key, const Matrix& fallback,
                  const std::string& path) {
  const YAML::Node n = parent[key];
  if (!n.IsDefined() || n.IsNull()) return fallback;
  return as_matrix(n, join(path, key));
}

Vector get_vector(const YAML::Node& parent, const std::string& key, const Vector& fallback,
                  const std::string& path) {
  const YAML::Node n = parent[key];
  if (!n.IsDefined() || n.IsNull()) return fallback;
  return as_vector(n, join(path, key));
}

// A number or list is a constant signal; {sine: {amplitude, omega, phase, offset}} a sinusoid.
InputSignal get_signal(const YAML::Node& parent, const std::string& key, Eigen::Index m,
                       const std::string& path) {
  const std::string field = join(path, key);
  const YAML::Node n = parent[key];
  if (!n.IsDefined() || n.IsNull()) return InputSignal::zero(m);
  InputSignal sig;
  if (n.IsMap() && n["sine"].IsDefined()) {
    check_keys(n, {"sine"}, field);
    const YAML::Node s = n["sine"];
    check_keys(s, {"amplitude", "omega", "phase", "offset"}, field + ".sine");
    const Vector amp = get_vector(s, "amplitude", Vector::Ones(m), field + ".sine");
    const Vector off = get_vector(s, "offset", Vector::Zero(m), field + ".sine");
    const double omega = get_double(s, "omega", 1.0, field + ".sine");
    const double phase = get_double(s, "phase", 0.0, field + ".sine");
    if (amp.size() != m || off.size() != m) fail(s, field, "expected " + std::to_string(m) + " channels");
    sig = InputSignal{m, [amp, off, omega, phase](double t) -> Vector {
                        return off + amp * std::sin(omega * t + phase);
                      }};
  } else if (n.IsMap()) {
    check_keys(n, {"constant"}, field);
    sig = InputSignal::constant(as_vector(n["constant"], field + ".constant"));
  } else {
    sig = InputSignal::constant(as_vector(n, field));
  }
  if (sig.m != m) fail(n, field, "expected " + std::to_string(m) + " channels, got " + std::to_string(sig.m));
  return sig;
}

struct Built {
  SystemSpec spec;
  std::function<State(const YAML::Node&, const std::string&, std::uint64_t)> preset;
  std::set<std::string> preset_keys;
  std::optional<QuantumThermoParams> quantum;
};

Built build_model(const std::string& name, const YAML::Node& name_node, const YAML::Node& params,
                  const std::string& path) {
  Built b;
  if (name == "oscillator" || name == "pendulum") {
    check_keys(params, {"damping"}, path);
    const double damping = get_double(params, "damping", 0.0, path);
    b.spec = name == "oscillator" ? make_harmonic_oscillator(damping) : make_pendulum_system(damping);
    b.preset_keys = {"q", "p"};
    b.preset = [](const YAML::Node& n, const std::string& f, std::uint64_t) {
      return State(Vector(), Eigen::Vector2d(get_double(n, "q", 1.0, f), get_double(n, "p", 0.0, f)),
                   Vector());
    };
  } else if (name == "poroelastic") {
    check_keys(params, {"A", "C", "D", "Bflow", "f", "g"}, path);
    PoroelasticParams p;
    p.A = get_matrix(params, "A", p.A, path);
    p.C = get_matrix(params, "C", p.C, path);
    p.D = get_matrix(params, "D", p.D, path);
    p.Bflow = get_matrix(params, "Bflow", p.Bflow, path);
    p.f = get_signal(params, "f", p.A.rows(), path);
    p.g = get_signal(params, "g", p.C.rows(), path);
    b.spec = make_poroelastic(p);
    b.preset_keys = {"p0"};
    b.preset = [p](const YAML::Node& n, const std::string& f, std::uint64_t) {
      Vector def = Vector::Ones(p.C.rows());
      if (def.size() >= 2) def(1) = -0.5;
      return poroelastic_state(p, get_vector(n, "p0", def, f));
    };
  } else if (name == "circuit") {
    check_keys(params, {"A_C", "A_R", "A_L", "A_S", "capacitor_quartic", "inductance", "resistor", "source"},
               path);
    CircuitParams p = default_circuit_params();
    p.A_C = get_matrix(params, "A_C", p.A_C, path);
    p.A_R = get_matrix(params, "A_R", p.A_R, path);
    p.A_L = get_matrix(params, "A_L", p.A_L, path);
    p.A_S = get_matrix(params, "A_S", p.A_S, path);
    const double quartic = get_double(params, "capacitor_quartic", 1.0, path);
    if (p.A_C.cols() != 1) fail(params["A_C"], join(path, "A_C"), "exactly one capacitor is supported");
    p.H_C = make_capacitor_energy(quartic);
    p.H_L = make_inductor_energy(p.A_L.cols(), get_double(params, "inductance", 1.0, path));
    const YAML::Node r = section(params, "resistor");
    check_keys(r, {"type", "conductance"}, join(path, "resistor"));
    const std::string type = get_string(r, "type", "cubic", join(path, "resistor"));
    const double gval = get_double(r, "conductance", 1.0, join(path, "resistor"));
    const Eigen::Index nr = p.A_R.cols();
    if (type == "linear") {
      p.G_linear = gval * Matrix::Identity(nr, nr);
      p.G = nullptr;
    } else if (type == "cubic") {
      p.G = [gval](const Vector& v) -> Vector { return gval * (v + v.cwiseProduct(v).cwiseProduct(v)); };
    } else {
      fail(r["type"], join(path, "resistor.type"), "expected 'linear' or 'cubic'");
    }
    p.u_S = get_signal(params, "source", p.A_S.cols(), path);
    b.spec = make_circuit(p);
    const auto part = b.spec.partition;
    b.preset_keys = {"q_C", "psi_L"};
    b.preset = [part](const YAML::Node& n, const std::string& f, std::uint64_t) {
      return State(get_vector(n, "q_C", Vector::Constant(part.n1, 0.5), f),
                   get_vector(n, "psi_L", Vector::Constant(part.n2, 0.2), f), Vector::Zero(part.n3));
    };
  } else if (name == "mechanical") {
    check_keys(params, {"M", "D", "K", "Bc", "f", "g"}, path);
    MechanicalParams p;
    p.M = get_matrix(params, "M", p.M, path);
    p.D = get_matrix(params, "D", p.D, path);
    p.K = get_matrix(params, "K", p.K, path);
    p.Bc = get_matrix(params, "Bc", Matrix::Zero(0, p.M.rows()), path);
    p.f = get_signal(params, "f", p.M.rows(), path);
    p.g = get_signal(params, "g", p.Bc.rows(), path);
    b.spec = make_mechanical(p);
    b.preset_keys = {"x0", "y0", "lambda0"};
    b.preset = [p](const YAML::Node& n, const std::string& f, std::uint64_t) {
      const Eigen::Index d = p.M.rows();
      Vector x_def = Vector::Ones(d);
      if (d >= 2) x_def(1) = 0.5;
      return mechanical_state(p, get_vector(n, "x0", x_def, f), get_vector(n, "y0", Vector::Zero(d), f),
                              get_vector(n, "lambda0", Vector(), f));
    };
  } else if (name == "cahn_hilliard_1d") {
    check_keys(params, {"N", "L", "eps_interface", "sigma"}, path);
    CahnHilliard1DParams p;
    p.N = get_int(params, "N", p.N, path);
    p.L = get_double(params, "L", p.L, path);
    p.eps_interface = get_double(params, "eps_interface", p.eps_interface, path);
    p.sigma = get_double(params, "sigma", p.sigma, path);
    b.spec = make_cahn_hilliard_1d(p);
    b.preset_keys = {"amplitude"};
    b.preset = [p](const YAML::Node& n, const std::string& f, std::uint64_t seed) {
      const std::string kind = get_string(n, "preset", "random", f);
      const double amp = get_double(n, "amplitude", 0.1, f);
      if (kind == "two_phase") return cahn_hilliard_two_phase_state(p, seed, amp);
      if (kind == "random" || kind == "default") return cahn_hilliard_random_state(p, seed, amp);
      fail(n["preset"], join(f, "preset"), "expected 'random' or 'two_phase'");
    };
  } else if (name == "quantum_thermo") {
    check_keys(params, {"E1", "E2", "Gamma", "gamma_k", "beta_k", "kB_T0", "alpha_heat", "R_m",
                        "epsilon_reg", "heat"},
               path);
    QuantumThermoParams p;
    p.E1 = get_double(params, "E1", p.E1, path);
    p.E2 = get_double(params, "E2", p.E2, path);
    p.Gamma = get_double(params, "Gamma", p.Gamma, path);
    p.gamma_k = get_double(params, "gamma_k", p.gamma_k, path);
    p.beta_k = get_double(params, "beta_k", p.beta_k, path);
    p.kB_T0 = get_double(params, "kB_T0", p.kB_T0, path);
    p.alpha_heat = get_double(params, "alpha_heat", p.alpha_heat, path);
    p.R_m = get_double(params, "R_m", p.R_m, path);
    p.epsilon_reg = get_double(params, "epsilon_reg", p.epsilon_reg, path);
    p.heat = get_signal(params, "heat", 1, path);
    b.spec = make_quantum_thermo_dae(p);
    b.quantum = p;
    b.preset_keys = {"rho11", "rho22", "S0", "Q0", "m0", "lambda0"};
    b.preset = [p](const YAML::Node& n, const std::string& f, std::uint64_t) {
      std::optional<double> lambda;
      if (n["lambda0"].IsDefined()) lambda = get_double(n, "lambda0", 0.0, f);
      return quantum_thermo_dae_state(p, get_double(n, "rho11", 0.2, f), get_double(n, "rho22", 0.8, f),
                                      get_double(n, "S0", 0.3, f), get_double(n, "Q0", 0.0, f),
                                      get_double(n, "m0", 0.0, f), lambda);
    };
  } else {
    fail(name_node, "model.name",
         "unknown model '" + name +
             "' (expected poroelastic, circuit, mechanical, cahn_hilliard_1d, quantum_thermo, "
             "oscillator or pendulum)");
  }
  return b;
}

SchemeConfig parse_scheme(const YAML::Node& n) {
  const std::string path = "scheme";
  if (!n.IsDefined()) fail(n, path, "missing");
  check_keys(n, {"name", "dg_kind", "tau", "newton_tol", "newton_max_iter"}, path);
  SchemeConfig c;
  const std::string name = get_string(n, "name", "discrete_gradient", path);
  try {
    c.scheme = scheme_from_string(name);
  } catch (const Error&) {
    fail(n["name"], "scheme.name",
         "unknown scheme '" + name + "' (expected explicit_euler, implicit_euler, midpoint, discrete_gradient)");
  }
  const std::string kind = get_string(n, "dg_kind", "gonzalez", path);
  if (kind == "gonzalez") {
    c.dg_kind = DiscreteGradientKind::Gonzalez;
  } else if (kind == "itoh_abe") {
    c.dg_kind = DiscreteGradientKind::ItohAbe;
  } else {
    fail(n["dg_kind"], "scheme.dg_kind", "expected 'gonzalez' or 'itoh_abe'");
  }
  if (!n["tau"].IsDefined()) fail(n, "scheme.tau", "missing");
  c.tau = get_double(n, "tau", 0.0, path);
  if (!(c.tau > 0.0)) fail(n["tau"], "scheme.tau", "must be positive");
  c.newton_tol = get_double(n, "newton_tol", c.newton_tol, path);
  if (!(c.newton_tol > 0.0)) fail(n["newton_tol"], "scheme.newton_tol", "must be positive");
  c.newton_max_iter = get_int(n, "newton_max_iter", c.newton_max_iter, path);
  if (c.newton_max_iter < 1) fail(n["newton_max_iter"], "scheme.newton_max_iter", "must be at least 1");
  return c;
}

State explicit_state(const YAML::Node& n, const StatePartition& p) {
  State s(get_vector(n, "z1", Vector::Zero(p.n1), "initial_state"),
          get_vector(n, "z2", Vector::Zero(p.n2), "initial_state"),
          get_vector(n, "z3", Vector::Zero(p.n3), "initial_state"));
  if (s.z1.size() != p.n1) fail(n["z1"], "initial_state.z1", "expected " + std::to_string(p.n1) + " entries");
  if (s.z2.size() != p.n2) fail(n["z2"], "initial_state.z2", "expected " + std::to_string(p.n2) + " entries");
  if (s.z3.size() != p.n3) fail(n["z3"], "initial_state.z3", "expected " + std::to_string(p.n3) + " entries");
  return s;
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw ConfigError("cannot read scenario file '" + path.string() + "'");
  } catch (const YAML::ParserException& e) {
    throw ConfigError("scenario '" + path.string() + "' does not parse: " + e.what());
  }
  if (!root.IsMap()) throw ConfigError("scenario '" + path.string() + "': top level must be a mapping");
  check_keys(root, {"schema", "model", "scheme", "regularization", "time", "initial_state", "outputs", "seed"}, "");

  if (!root["schema"].IsDefined()) fail(root, "schema", "missing (expected 1)");
  if (get_int(root, "schema", 0, "") != 1) fail(root["schema"], "schema", "unsupported version (expected 1)");

  Scenario s;
  s.source = path;
  const YAML::Node model = root["model"];
  if (!model.IsDefined() || !model.IsMap()) fail(model, "model", "missing or not a mapping");
  check_keys(model, {"name", "params"}, "model");
  s.model_name = get_string(model, "name", "", "model");
  if (s.model_name.empty()) fail(model, "model.name", "missing");

  s.scheme = parse_scheme(root["scheme"]);

  if (!root["time"].IsDefined()) fail(root, "time", "missing");
  const YAML::Node time = section(root, "time");
  check_keys(time, {"t0", "t_end"}, "time");
  s.t0 = get_double(time, "t0", 0.0, "time");
  if (!time["t_end"].IsDefined()) fail(time, "time.t_end", "missing");
  s.t_end = get_double(time, "t_end", 1.0, "time");
  if (!(s.t_end > s.t0)) fail(time["t_end"], "time.t_end", "must exceed time.t0");

  const YAML::Node reg = section(root, "regularization");
  check_keys(reg, {"epsilon"}, "regularization");
  if (root["regularization"].IsDefined() && !root["regularization"].IsNull()) {
    if (!reg["epsilon"].IsDefined()) fail(reg, "regularization.epsilon", "missing");
    s.epsilon = get_double(reg, "epsilon", 0.0, "regularization");
    if (!(*s.epsilon > 0.0)) fail(reg["epsilon"], "regularization.epsilon", "must be positive");
  }

  s.seed = static_cast<std::uint64_t>(get_int(root, "seed", 0, ""));
  if (seed_override) s.seed = *seed_override;

  const YAML::Node outputs = section(root, "outputs");
  check_keys(outputs, {"trajectory_csv", "audit_csv", "report_json"}, "outputs");
  if (outputs["trajectory_csv"].IsDefined()) s.outputs.trajectory_csv = get_string(outputs, "trajectory_csv", "", "outputs");
  if (outputs["audit_csv"].IsDefined()) s.outputs.audit_csv = get_string(outputs, "audit_csv", "", "outputs");
  if (outputs["report_json"].IsDefined()) s.outputs.report_json = get_string(outputs, "report_json", "", "outputs");

  Built built = build_model(s.model_name, model["name"], section(model, "params"), "model.params");
  s.original = built.spec;
  s.quantum = built.quantum;

  const YAML::Node init = root["initial_state"];
  State initial;
  if (init.IsDefined() && init.IsMap() && (init["z1"].IsDefined() || init["z2"].IsDefined() || init["z3"].IsDefined())) {
    check_keys(init, {"z1", "z2", "z3"}, "initial_state");
    initial = explicit_state(init, s.original.partition);
  } else {
    std::set<std::string> allowed = built.preset_keys;
    allowed.insert("preset");
    check_keys(init, allowed, "initial_state");
    const YAML::Node n = section(root, "initial_state");
    const std::string preset = get_string(n, "preset", "default", "initial_state");
    if (s.model_name != "cahn_hilliard_1d" && preset != "default")
      fail(n["preset"], "initial_state.preset", "unknown preset '" + preset + "' (expected 'default')");
    initial = built.preset(n, "initial_state", s.seed);
  }

  std::optional<double> eps = s.epsilon;
  if (!eps && s.quantum) eps = s.quantum->epsilon_reg;
  if (eps) {
    if (s.quantum) s.quantum->epsilon_reg = *eps;
    try {
      s.spec = regularize(s.original, RegularizationConfig{*eps});
    } catch (const NothingToRegularize& e) {
      fail(reg, "regularization", e.what());
    }
    s.initial = to_regularized(s.spec, initial);
    s.epsilon = eps;
  } else {
    s.spec = s.original;
    s.initial = initial;
  }
  return s;
}

State to_original(const Scenario& s, const State& state) {
  return s.spec.regularization ? from_regularized(s.spec, state) : state;
}

}  // namespace phdae::cli
