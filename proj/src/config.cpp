#include "twoboard/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

namespace twoboard {

using nlohmann::json;

namespace {

/// Reads one JSON object and rejects keys that nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_{j}, path_{std::move(path)} {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ConfigError{fmt::format("config field '{}': {}", path, what)};
  }

  std::string at(const std::string& key) const { return path_ + "/" + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) fail(at(key), "required field is missing");
    return j_.at(key);
  }

  template <class T>
  T get(const std::string& key) {
    const json& v = raw(key);
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      fail(at(key), "has the wrong type");
    }
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    return get<T>(key);
  }

  double positive(const std::string& key, double fallback) {
    const double v = get<double>(key, fallback);
    if (!(v > 0.0)) fail(at(key), "must be positive");
    return v;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) fail(at(k), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

ScalarFunction parse_function(const json& j, const std::string& path) {
  if (j.is_number()) return ScalarFunction::constant(j.get<double>());
  Section s(j, path);
  const auto type = s.get<std::string>("type");
  ScalarFunction f;
  try {
    switch (kind_from_string(type)) {
      case ScalarFunction::Kind::Constant: f = ScalarFunction::constant(s.get<double>("value")); break;
      case ScalarFunction::Kind::Linear:
        f = ScalarFunction::linear(s.get<std::vector<double>>("coeffs"), s.get<double>("offset", 0.0));
        break;
      case ScalarFunction::Kind::Norm:
        f = ScalarFunction::norm(s.get<std::vector<double>>("center"), s.get<double>("scale", 1.0),
                                 s.get<double>("offset", 0.0));
        break;
      case ScalarFunction::Kind::Product: f = ScalarFunction::product(s.get<double>("scale", 1.0)); break;
      case ScalarFunction::Kind::Sum: {
        const json& terms = s.raw("terms");
        if (!terms.is_array()) Section::fail(s.at("terms"), "expected an array");
        std::vector<ScalarFunction::Term> out;
        for (std::size_t i = 0; i < terms.size(); ++i) {
          Section t(terms[i], fmt::format("{}/terms/{}", path, i));
          ScalarFunction::Term term;
          term.weight = t.get<double>("weight", 1.0);
          term.fn = parse_function(t.raw("fn"), t.at("fn"));
          t.finish();
          out.push_back(std::move(term));
        }
        f = ScalarFunction::sum(std::move(out), s.get<double>("offset", 0.0));
        break;
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    Section::fail(path, e.what());
  }
  s.finish();
  return f;
}

json emit_function(const ScalarFunction& f) {
  json j;
  j["type"] = to_string(f.kind());
  switch (f.kind()) {
    case ScalarFunction::Kind::Constant: j["value"] = f.value(); break;
    case ScalarFunction::Kind::Linear:
      j["coeffs"] = f.coeffs();
      j["offset"] = f.offset();
      break;
    case ScalarFunction::Kind::Norm:
      j["center"] = f.center();
      j["scale"] = f.scale();
      j["offset"] = f.offset();
      break;
    case ScalarFunction::Kind::Product: j["scale"] = f.scale(); break;
    case ScalarFunction::Kind::Sum: {
      json terms = json::array();
      for (const auto& t : f.terms()) terms.push_back({{"weight", t.weight}, {"fn", emit_function(t.fn)}});
      j["terms"] = terms;
      j["offset"] = f.offset();
      break;
    }
  }
  return j;
}

Domain parse_domain(const json& j) {
  Section s(j, "/domain");
  const auto shape = s.get<std::string>("shape");
  Domain d = Domain::interval(0.0, 1.0);
  try {
    switch (shape_from_string(shape)) {
      case Shape::Interval: {
        const auto lo = s.get<double>("lo");
        const auto hi = s.get<double>("hi");
        d = Domain::interval(lo, hi);
        break;
      }
      case Shape::Box:
        d = Domain::box(s.get<std::vector<double>>("lo"), s.get<std::vector<double>>("hi"));
        break;
      case Shape::Ball: d = Domain::ball(s.get<std::vector<double>>("center"), s.get<double>("radius")); break;
      case Shape::Annulus:
        d = Domain::annulus(s.get<std::vector<double>>("center"), s.get<double>("inner_radius"),
                            s.get<double>("radius"));
        break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    Section::fail("/domain", e.what());
  }
  s.finish();
  return d;
}

json emit_domain(const Domain& d) {
  json j;
  j["shape"] = to_string(d.shape());
  switch (d.shape()) {
    case Shape::Interval:
      j["lo"] = d.lo()[0];
      j["hi"] = d.hi()[0];
      break;
    case Shape::Box:
      j["lo"] = d.lo();
      j["hi"] = d.hi();
      break;
    case Shape::Ball:
      j["center"] = d.center();
      j["radius"] = d.radius();
      break;
    case Shape::Annulus:
      j["center"] = d.center();
      j["inner_radius"] = d.inner_radius();
      j["radius"] = d.radius();
      break;
  }
  return j;
}

const std::set<std::string> kStrategyNames{"pull_to", "greedy_max", "greedy_min", "stationary_random"};
const std::set<std::string> kSuiteNames{"kappa", "consistency", "reference", "convergence"};

StrategySpec parse_strategy(const json& j, const std::string& path, int dim) {
  StrategySpec spec;
  if (j.is_string()) {
    spec.name = j.get<std::string>();
  } else {
    Section s(j, path);
    spec.name = s.get<std::string>("name");
    spec.target = s.get<std::vector<double>>("target", {});
    s.finish();
  }
  if (!kStrategyNames.count(spec.name)) Section::fail(path, "unknown strategy '" + spec.name + "'");
  if (spec.name == "pull_to" && static_cast<int>(spec.target.size()) != dim) {
    Section::fail(path, "pull_to needs a target of the domain dimension");
  }
  if (spec.name != "pull_to" && !spec.target.empty()) Section::fail(path, "only pull_to takes a target");
  return spec;
}

json emit_strategy(const StrategySpec& s) {
  json j{{"name", s.name}};
  if (!s.target.empty()) j["target"] = s.target;
  return j;
}

void check_dim(const ScalarFunction& f, int dim, const std::string& path) {
  try {
    (void)f(Point::zeros(dim));
  } catch (const std::invalid_argument& e) {
    Section::fail(path, e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError{fmt::format("config is not valid JSON: {}", e.what())};
  }
  Section top(root, "");
  ExperimentConfig c;
  c.schema_version = top.get<int>("schema_version");
  if (c.schema_version != kSchemaVersion) {
    Section::fail("/schema_version", fmt::format("unsupported version {}, expected {}", c.schema_version, kSchemaVersion));
  }
  c.domain = parse_domain(top.raw("domain"));
  const int dim = c.domain.dim();

  {
    Section s(top.raw("payoff"), "/payoff");
    c.payoff.f_bar = parse_function(s.raw("f"), "/payoff/f");
    c.payoff.g_bar = parse_function(s.raw("g"), "/payoff/g");
    c.payoff.lipschitz_bound = s.get<double>("lipschitz", 0.0);
    if (c.payoff.lipschitz_bound < 0.0) Section::fail("/payoff/lipschitz", "must be nonnegative");
    check_dim(c.payoff.f_bar, dim, "/payoff/f");
    check_dim(c.payoff.g_bar, dim, "/payoff/g");
    s.finish();
  }
  if (top.has("grid")) {
    Section s(top.raw("grid"), "/grid");
    c.grid.epsilon = s.positive("epsilon", c.grid.epsilon);
    c.grid.h_ratio = s.positive("h_ratio", c.grid.h_ratio);
    if (c.grid.h_ratio > 0.25) Section::fail("/grid/h_ratio", "must not exceed 1/4");
    if (s.has("h")) {
      c.grid.h = s.positive("h", 0.0);
      if (*c.grid.h > c.grid.epsilon / 4.0) Section::fail("/grid/h", "must not exceed epsilon/4");
    }
    c.grid.epsilon_list = s.get<std::vector<double>>("epsilon_list", c.grid.epsilon_list);
    for (double e : c.grid.epsilon_list) {
      if (!(e > 0.0)) Section::fail("/grid/epsilon_list", "entries must be positive");
    }
    s.finish();
  }
  if (!(c.grid.epsilon < c.domain.diameter())) Section::fail("/grid/epsilon", "must be below the domain diameter");
  if (top.has("dpp")) {
    Section s(top.raw("dpp"), "/dpp");
    if (s.has("a")) c.dpp.jump_coeff_1 = parse_function(s.raw("a"), "/dpp/a");
    if (s.has("b")) c.dpp.jump_coeff_2 = parse_function(s.raw("b"), "/dpp/b");
    c.dpp.mix_alpha_1 = s.get<double>("alpha1", 1.0);
    c.dpp.mix_alpha_2 = s.get<double>("alpha2", 0.0);
    for (const char* k : {"alpha1", "alpha2"}) {
      const double a = s.get<double>(k, 0.0);
      if (!(a >= 0.0 && a <= 1.0)) Section::fail(s.at(k), "must lie in [0, 1]");
    }
    check_dim(c.dpp.jump_coeff_1, dim, "/dpp/a");
    check_dim(c.dpp.jump_coeff_2, dim, "/dpp/b");
    s.finish();
  }
  if (top.has("n_system")) {
    const json& arr = top.raw("n_system");
    if (!arr.is_array()) Section::fail("/n_system", "expected an array of components");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = fmt::format("/n_system/{}", i);
      Section s(arr[i], path);
      ComponentSpec comp;
      try {
        comp.op = board_operator_from_string(s.get<std::string>("operator"));
      } catch (const std::invalid_argument& e) {
        Section::fail(s.at("operator"), e.what());
      }
      comp.alpha = s.get<double>("alpha", comp.op == BoardOperator::Laplace ? 0.0 : 1.0);
      comp.coupling = s.get<std::vector<double>>("coupling");
      comp.payoff = parse_function(s.raw("payoff"), s.at("payoff"));
      if (comp.coupling.size() != arr.size()) Section::fail(s.at("coupling"), "needs one entry per component");
      for (std::size_t j = 0; j < comp.coupling.size(); ++j) {
        if (comp.coupling[j] < 0.0) Section::fail(s.at("coupling"), "entries must be nonnegative");
        if (j == i && comp.coupling[j] != 0.0) Section::fail(s.at("coupling"), "diagonal entry must be 0");
      }
      check_dim(comp.payoff, dim, s.at("payoff"));
      s.finish();
      c.n_system.push_back(std::move(comp));
    }
  }
  if (top.has("solver")) {
    Section s(top.raw("solver"), "/solver");
    c.solver.tol = s.positive("tol", c.solver.tol);
    c.solver.max_iter = s.get<std::size_t>("max_iter", c.solver.max_iter);
    if (c.solver.max_iter == 0) Section::fail("/solver/max_iter", "must be positive");
    c.solver.threads = s.get<int>("threads", c.solver.threads);
    if (c.solver.threads < 1) Section::fail("/solver/threads", "must be at least 1");
    s.finish();
  }
  if (top.has("simulation")) {
    Section s(top.raw("simulation"), "/simulation");
    auto& sim = c.simulation;
    sim.x0 = s.get<std::vector<double>>("x0");
    if (static_cast<int>(sim.x0.size()) != dim) Section::fail("/simulation/x0", "dimension differs from the domain");
    Point p(dim);
    for (int i = 0; i < dim; ++i) p[i] = sim.x0[i];
    if (!c.domain.contains(p)) Section::fail("/simulation/x0", "must lie in the domain");
    sim.board = s.get<int>("board", 1);
    if (sim.board != 1 && sim.board != 2) Section::fail("/simulation/board", "must be 1 or 2");
    if (s.has("s1")) sim.s1 = parse_strategy(s.raw("s1"), "/simulation/s1", dim);
    if (s.has("s2")) sim.s2 = parse_strategy(s.raw("s2"), "/simulation/s2", dim);
    sim.episodes = s.get<std::size_t>("episodes", sim.episodes);
    if (sim.episodes < 2) Section::fail("/simulation/episodes", "must be at least 2");
    sim.seed = s.get<std::uint64_t>("seed", sim.seed);
    try {
      sim.mode = game_mode_from_string(s.get<std::string>("mode", "full"));
    } catch (const std::invalid_argument& e) {
      Section::fail("/simulation/mode", e.what());
    }
    if (sim.mode == GameMode::TowOnly && sim.board != 1) Section::fail("/simulation/board", "tow_only starts on board 1");
    if (sim.mode == GameMode::RandomOnly && sim.board != 2) {
      Section::fail("/simulation/board", "random_only starts on board 2");
    }
    sim.cap = s.get<std::size_t>("cap", 0);
    sim.trace_episodes = s.get<std::size_t>("trace_episodes", 0);
    s.finish();
  }
  if (top.has("verify")) {
    Section s(top.raw("verify"), "/verify");
    auto& v = c.verify;
    v.suites = s.get<std::vector<std::string>>("suites", v.suites);
    for (const auto& name : v.suites) {
      if (!kSuiteNames.count(name)) Section::fail("/verify/suites", "unknown suite '" + name + "'");
    }
    v.mc_samples = s.get<std::size_t>("mc_samples", v.mc_samples);
    if (v.mc_samples < 1000) Section::fail("/verify/mc_samples", "must be at least 1000");
    v.kappa_tolerance = s.positive("kappa_tolerance", v.kappa_tolerance);
    v.ratio_bound = s.positive("ratio_bound", v.ratio_bound);
    v.reference_tolerance = s.positive("reference_tolerance", v.reference_tolerance);
    v.probe = s.get<std::vector<double>>("probe", {});
    if (!v.probe.empty() && static_cast<int>(v.probe.size()) != dim) {
      Section::fail("/verify/probe", "dimension differs from the domain");
    }
    v.reference_mesh = s.get<std::size_t>("reference_mesh", v.reference_mesh);
    if (v.reference_mesh < 100) Section::fail("/verify/reference_mesh", "must be at least 100");
    s.finish();
  }
  if (top.has("output")) {
    Section s(top.raw("output"), "/output");
    c.output_directory = s.get<std::string>("directory", c.output_directory);
    s.finish();
  }
  top.finish();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError{"cannot open config file '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["domain"] = emit_domain(c.domain);
  j["payoff"] = {{"f", emit_function(c.payoff.f_bar)},
                 {"g", emit_function(c.payoff.g_bar)},
                 {"lipschitz", c.payoff.lipschitz_bound}};
  j["grid"] = {{"epsilon", c.grid.epsilon}, {"h_ratio", c.grid.h_ratio}, {"epsilon_list", c.grid.epsilon_list}};
  if (c.grid.h) j["grid"]["h"] = *c.grid.h;
  j["dpp"] = {{"a", emit_function(c.dpp.jump_coeff_1)},
              {"b", emit_function(c.dpp.jump_coeff_2)},
              {"alpha1", c.dpp.mix_alpha_1},
              {"alpha2", c.dpp.mix_alpha_2}};
  if (!c.n_system.empty()) {
    json arr = json::array();
    for (const auto& comp : c.n_system) {
      arr.push_back({{"operator", to_string(comp.op)},
                     {"alpha", comp.alpha},
                     {"coupling", comp.coupling},
                     {"payoff", emit_function(comp.payoff)}});
    }
    j["n_system"] = arr;
  }
  j["solver"] = {{"tol", c.solver.tol}, {"max_iter", c.solver.max_iter}, {"threads", c.solver.threads}};
  if (!c.simulation.x0.empty()) {
    const auto& s = c.simulation;
    j["simulation"] = {{"x0", s.x0},
                       {"board", s.board},
                       {"s1", emit_strategy(s.s1)},
                       {"s2", emit_strategy(s.s2)},
                       {"episodes", s.episodes},
                       {"seed", s.seed},
                       {"mode", to_string(s.mode)},
                       {"cap", s.cap},
                       {"trace_episodes", s.trace_episodes}};
  }
  const auto& v = c.verify;
  j["verify"] = {{"suites", v.suites},
                 {"mc_samples", v.mc_samples},
                 {"kappa_tolerance", v.kappa_tolerance},
                 {"ratio_bound", v.ratio_bound},
                 {"reference_tolerance", v.reference_tolerance},
                 {"reference_mesh", v.reference_mesh}};
  if (!v.probe.empty()) j["verify"]["probe"] = v.probe;
  j["output"] = {{"directory", c.output_directory}};
  return j.dump(2) + "\n";
}

Strategy make_strategy(const StrategySpec& spec, std::shared_ptr<const Lattice> lattice,
                       std::shared_ptr<const ValuePair> values) {
  if (spec.name == "pull_to") {
    Point t(static_cast<int>(spec.target.size()));
    for (int i = 0; i < t.dim(); ++i) t[i] = spec.target[i];
    return pull_strategy(t);
  }
  if (spec.name == "greedy_max") return greedy_max(std::move(lattice), std::move(values));
  if (spec.name == "greedy_min") return greedy_min(std::move(lattice), std::move(values));
  if (spec.name == "stationary_random") return stationary_random();
  throw std::invalid_argument{"unknown strategy '" + spec.name + "'"};
}

}  // namespace twoboard
