#include "cqed/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cqed/errors.hpp"

namespace cqed {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_plain(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigurationError("key '" + key + "': cannot parse '" + text + "' as a number");
  }
  if (used != text.size()) throw ConfigurationError("key '" + key + "': trailing characters in '" + text + "'");
  return v;
}

/// Numbers, optionally scaled by pi: "0.5", "pi", "pi/2", "3*pi/4", "-pi".
double parse_number(const std::string& raw, const std::string& key) {
  const std::string text = trim(raw);
  const auto pos = text.find("pi");
  if (pos == std::string::npos) return parse_plain(text, key);
  double factor = 1.0;
  std::string head = trim(text.substr(0, pos));
  if (head == "-") {
    factor = -1.0;
  } else if (!head.empty()) {
    if (head.back() != '*') throw ConfigurationError("key '" + key + "': expected 'x*pi' in '" + text + "'");
    head.pop_back();
    factor = parse_plain(trim(head), key);
  }
  double value = factor * std::numbers::pi;
  const std::string tail = trim(text.substr(pos + 2));
  if (!tail.empty()) {
    if (tail.front() != '/') throw ConfigurationError("key '" + key + "': expected 'pi/x' in '" + text + "'");
    value /= parse_plain(trim(tail.substr(1)), key);
  }
  return value;
}

int parse_int(const std::string& text, const std::string& key) {
  const double v = parse_plain(trim(text), key);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigurationError("key '" + key + "': expected an integer");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& raw, const std::string& key) {
  std::string text = trim(raw);
  std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
  if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
  if (text == "false" || text == "no" || text == "0" || text == "off") return false;
  throw ConfigurationError("key '" + key + "': expected a boolean, got '" + raw + "'");
}

/// Section accessor that remembers which keys were consumed so leftovers can be reported.
class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (!tree_) return std::nullopt;
    auto it = tree_->find(key);
    if (it == tree_->not_found()) return std::nullopt;
    return trim(it->second.data());
  }
  std::optional<double> number(const std::string& key) {
    auto r = raw(key);
    if (!r) return std::nullopt;
    return parse_number(*r, name_ + "." + key);
  }
  std::optional<int> integer(const std::string& key) {
    auto r = raw(key);
    if (!r) return std::nullopt;
    return parse_int(*r, name_ + "." + key);
  }
  std::optional<bool> boolean(const std::string& key) {
    auto r = raw(key);
    if (!r) return std::nullopt;
    return parse_bool(*r, name_ + "." + key);
  }

  void reject_unknown() const {
    if (!tree_) return;
    for (const auto& [key, value] : *tree_) {
      if (!used_.count(key)) throw ConfigurationError("unknown key '" + key + "' in section [" + name_ + "]");
    }
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
  std::set<std::string> used_;
};

const pt::ptree* child(const pt::ptree& root, const std::string& name) {
  auto it = root.find(name);
  return it == root.not_found() ? nullptr : &it->second;
}

void check_mode_spec(const std::string& label, const std::string& spec) {
  std::istringstream in(spec);
  std::string kind;
  in >> kind;
  std::vector<std::string> args;
  for (std::string a; in >> a;) args.push_back(a);
  const std::string key = "initial_" + label;
  if (kind == "vacuum" && args.empty()) return;
  if (kind == "fock" && args.size() == 1) {
    if (parse_int(args[0], key) < 0) throw ConfigurationError(key + ": Fock index must be >= 0");
    return;
  }
  if (kind == "coherent" && (args.size() == 1 || args.size() == 2)) {
    for (const auto& a : args) parse_number(a, key);
    return;
  }
  throw ConfigurationError(key + ": expected 'vacuum', 'fock n' or 'coherent re [im]', got '" + spec + "'");
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Full: return "full";
    case ModelKind::Lab: return "lab";
    case ModelKind::Laser: return "laser";
    case ModelKind::Effective: return "effective";
    case ModelKind::Sss: return "sss";
    case ModelKind::Ajc: return "ajc";
    case ModelKind::PulsedJcAjc: return "pulsed-jc-ajc";
    case ModelKind::AnalyticSqueeze: return "analytic-squeeze";
  }
  return "?";
}

ModelSpec ModelSpec::parse(const std::string& raw) {
  const std::string text = trim(raw);
  ModelSpec m;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  if (head == "full" || head == "full-interaction-picture" || head == "interaction") {
    m.kind = ModelKind::Full;
  } else if (head == "lab") {
    m.kind = ModelKind::Lab;
  } else if (head == "laser") {
    m.kind = ModelKind::Laser;
  } else if (head == "sss") {
    m.kind = ModelKind::Sss;
  } else if (head == "ajc") {
    m.kind = ModelKind::Ajc;
  } else if (head == "pulsed-jc-ajc") {
    m.kind = ModelKind::PulsedJcAjc;
  } else if (head == "analytic-squeeze") {
    m.kind = ModelKind::AnalyticSqueeze;
  } else if (head == "effective") {
    m.kind = ModelKind::Effective;
  } else {
    throw ConfigurationError("unknown model selector '" + text + "'");
  }
  if (colon == std::string::npos) {
    if (m.kind == ModelKind::Effective) throw ConfigurationError("effective model needs 'effective:<kind>,<branch>[,<regime>]'");
    return m;
  }
  if (m.kind != ModelKind::Effective && m.kind != ModelKind::Laser) {
    throw ConfigurationError("model '" + head + "' takes no arguments");
  }
  const auto parts = split(text.substr(colon + 1), ',');
  if (parts.size() < 2 || parts.size() > 3) {
    throw ConfigurationError("model '" + text + "': expected <kind>,<branch>[,<regime>]");
  }
  m.effective = parse_effective_kind(parts[0]);
  m.branch = parse_branch(parts[1]);
  if (parts.size() == 3) m.regime = parse_regime(parts[2]);
  const bool dressed = m.branch == Branch::Plus || m.branch == Branch::Minus;
  if (m.effective == EffectiveKind::Squeeze && dressed) throw ConfigurationError("squeeze branch must be up or down");
  if (m.effective != EffectiveKind::Squeeze) {
    if (!dressed) throw ConfigurationError("pdc/puc branch must be + or -");
    if (!m.regime) throw ConfigurationError("pdc/puc model needs a regime (weak|intermediate|strong)");
  }
  return m;
}

std::string ModelSpec::describe() const {
  if (kind != ModelKind::Effective && kind != ModelKind::Laser) return to_string(kind);
  std::string s = to_string(kind) + ":" + to_string(effective) + "," + to_string(branch);
  if (regime) s += "," + to_string(*regime);
  return s;
}

HilbertSpace ScenarioConfig::space() const { return cavity_space(cutoff_a, cutoff_b, with_atom); }

Solver ScenarioConfig::resolved_solver() const {
  if (solver != Solver::Auto) return solver;
  return (params.Gamma_f > 0.0 || params.Gamma_a > 0.0) ? Solver::Lindblad : Solver::Schrodinger;
}

void ScenarioConfig::validate() const {
  params.validate();
  if (cutoff_a < 2) throw ConfigurationError("cutoff_a must be >= 2");
  if (cutoff_b && *cutoff_b < 2) throw ConfigurationError("cutoff_b must be >= 2");
  if (!(t_end > t_start)) throw ConfigurationError("integrator t_end must exceed t_start");
  if (samples < 1) throw ConfigurationError("integrator samples must be >= 1");

  const HilbertSpace sp = space();
  for (const auto& f : initial) {
    const auto slot = sp.find(f.label);
    if (!slot) throw ConfigurationError("initial state names factor '" + f.label + "' absent from the space");
    if (sp.factor(*slot).kind == FactorKind::Atom) {
      if (f.spec != "g" && f.spec != "e" && f.spec != "plus" && f.spec != "minus") {
        throw ConfigurationError("initial_atom: expected g|e|plus|minus, got '" + f.spec + "'");
      }
    } else {
      check_mode_spec(f.label, f.spec);
    }
  }

  const bool needs_atom = model.kind == ModelKind::Full || model.kind == ModelKind::Lab ||
                          model.kind == ModelKind::Laser || model.kind == ModelKind::Sss ||
                          model.kind == ModelKind::Ajc || model.kind == ModelKind::PulsedJcAjc;
  if (needs_atom && !with_atom) throw ConfigurationError("model '" + model.describe() + "' needs the atom factor");
  const bool needs_b = (model.kind == ModelKind::Effective || model.kind == ModelKind::Laser) &&
                       model.effective != EffectiveKind::Squeeze;
  if (needs_b && !cutoff_b) throw ConfigurationError("model '" + model.describe() + "' needs mode b (set cutoff_b)");
  if (model.kind == ModelKind::PulsedJcAjc) {
    if (!has_schedule) throw ConfigurationError("pulsed-jc-ajc needs a [schedule] section");
    schedule.validate();
  }
  if (resolved_solver() == Solver::Schrodinger && (params.Gamma_f > 0.0 || params.Gamma_a > 0.0)) {
    throw ConfigurationError("non-zero decay rates need the lindblad solver");
  }
}

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
  pt::ptree root;
  try {
    std::istringstream in(text);
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigurationError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  static const std::set<std::string> sections{"system", "scenario", "integrator", "schedule", "output"};
  for (const auto& [name, node] : root) {
    if (!sections.count(name)) throw ConfigurationError(origin + ": unknown section [" + name + "]");
    if (node.empty() && !node.data().empty()) throw ConfigurationError(origin + ": key '" + name + "' outside a section");
  }

  ScenarioConfig cfg;
  try {
    Section sys(child(root, "system"), "system");
    auto& p = cfg.params;
    p.omega0 = sys.number("omega0").value_or(0.0);
    p.delta_a = sys.number("delta_a").value_or(0.0);
    p.delta_b = sys.number("delta_b").value_or(0.0);
    p.delta_1 = sys.number("delta_1").value_or(0.0);
    p.delta_2 = sys.number("delta_2").value_or(0.0);
    p.lambda_a = sys.number("lambda_a").value_or(1.0);
    p.lambda_b = sys.number("lambda_b").value_or(0.0);
    p.Omega1 = sys.number("Omega1").value_or(0.0);
    p.phi1 = sys.number("phi1").value_or(0.0);
    p.Omega2 = sys.number("Omega2").value_or(0.0);
    p.phi2 = sys.number("phi2").value_or(0.0);
    p.Gamma_f = sys.number("Gamma_f").value_or(0.0);
    p.Gamma_a = sys.number("Gamma_a").value_or(0.0);
    p.has_drive2 = sys.boolean("drive2").value_or(p.Omega2 > 0.0);
    cfg.lambda_a_si = sys.number("lambda_a_si").value_or(0.0);
    sys.reject_unknown();

    Section sc(child(root, "scenario"), "scenario");
    cfg.name = sc.raw("name").value_or("");
    if (cfg.name.empty()) throw ConfigurationError("[scenario] needs a name");
    cfg.model = ModelSpec::parse(sc.raw("model").value_or("full"));
    cfg.cutoff_a = sc.integer("cutoff_a").value_or(30);
    cfg.cutoff_b = sc.integer("cutoff_b");
    p.has_mode_b = cfg.cutoff_b.has_value();
    const bool field_only = cfg.model.kind == ModelKind::Effective || cfg.model.kind == ModelKind::AnalyticSqueeze;
    cfg.with_atom = sc.boolean("atom").value_or(!field_only);
    for (const char* label : {"a", "b", "atom"}) {
      if (auto spec = sc.raw(std::string("initial_") + label)) cfg.initial.push_back({label, *spec});
    }
    if (auto s = sc.raw("solver")) {
      if (*s == "auto") cfg.solver = Solver::Auto;
      else if (*s == "schrodinger") cfg.solver = Solver::Schrodinger;
      else if (*s == "lindblad") cfg.solver = Solver::Lindblad;
      else throw ConfigurationError("scenario.solver: expected auto|schrodinger|lindblad");
    }
    cfg.thresholds.much_greater = sc.number("much_greater").value_or(cfg.thresholds.much_greater);
    cfg.thresholds.similar = sc.number("similar").value_or(cfg.thresholds.similar);
    cfg.force = sc.boolean("force").value_or(false);
    sc.reject_unknown();

    Section in(child(root, "integrator"), "integrator");
    auto& ic = cfg.integrator;
    if (auto m = in.raw("method")) ic.method = parse_method(*m);
    ic.dt = in.number("dt").value_or(0.0);
    ic.rel_tol = in.number("rel_tol").value_or(ic.rel_tol);
    ic.abs_tol = in.number("abs_tol").value_or(ic.abs_tol);
    ic.dt_max = in.number("dt_max").value_or(0.0);
    ic.renormalize = in.boolean("renormalize").value_or(false);
    ic.allow_coarse_dt = in.boolean("allow_coarse_dt").value_or(false);
    ic.eigen_checks = in.integer("eigen_checks").value_or(ic.eigen_checks);
    ic.tail_levels = in.integer("tail_levels").value_or(ic.tail_levels);
    if (auto b = in.raw("backend")) {
      if (*b == "compiled") ic.backend = Backend::Compiled;
      else if (*b == "reference") ic.backend = Backend::Reference;
      else throw ConfigurationError("integrator.backend: expected compiled|reference");
    }
    cfg.t_start = in.number("t_start").value_or(0.0);
    cfg.t_end = in.number("t_end").value_or(1.0);
    cfg.samples = in.integer("samples").value_or(100);
    if (auto extra = in.raw("extra_times")) {
      for (const auto& item : split(*extra, ',')) {
        if (!item.empty()) cfg.extra_times.push_back(parse_number(item, "integrator.extra_times"));
      }
    }
    in.reject_unknown();

    if (const auto* sched = child(root, "schedule")) {
      Section s(sched, "schedule");
      cfg.has_schedule = true;
      cfg.schedule.tau = s.number("tau").value_or(1.0);
      cfg.schedule.n_cycles = s.integer("n_cycles").value_or(0);
      s.reject_unknown();
    }

    Section out(child(root, "output"), "output");
    if (auto path = out.raw("path")) cfg.output_path = *path;
    out.reject_unknown();
  } catch (const ConfigurationError& e) {
    throw ConfigurationError(origin + ": " + e.what());
  }

  cfg.integrator.t_grid = cfg.time_grid();
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw ConfigurationError(origin + ": " + e.what());
  }
  return cfg;
}

std::vector<double> ScenarioConfig::time_grid() const {
  auto grid = IntegratorConfig::uniform_grid(t_start, t_end, samples);
  for (double t : extra_times) {
    if (t > t_start && t < t_end) grid.push_back(t);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  auto cfg = parse_config(buf.str(), path.string());
  cfg.source = path;
  return cfg;
}

std::vector<std::string> builtin_scenarios() {
  return {"fig3-analytic", "fig3-effective", "fig3-full",        "fig3-dissipative", "pdc-weak",     "pdc-intermediate",
          "pdc-strong",    "puc-intermediate", "ajc",              "pulsed-jc-ajc",    "sss"};
}

std::filesystem::path builtin_scenario_path(const std::string& name) {
  const auto names = builtin_scenarios();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ConfigurationError("unknown built-in scenario '" + name + "'");
  }
  return std::filesystem::path(CQED_SCENARIO_DIR) / (name + ".ini");
}

ScenarioConfig resolve_config(const std::string& name_or_path) {
  if (std::filesystem::exists(name_or_path)) return load_config(name_or_path);
  return load_config(builtin_scenario_path(name_or_path));
}

}  // namespace cqed
