#include "resint/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "resint/errors.hpp"
#include "resint/scenario.hpp"

namespace resint {
namespace {

using json = nlohmann::json;
using Keys = std::initializer_list<std::string_view>;

constexpr std::pair<ScenarioKind, std::string_view> kScenarioNames[] = {
    {ScenarioKind::TlsRun, "tls-run"},
    {ScenarioKind::TlsSweepLambda, "tls-sweep-lambda"},
    {ScenarioKind::SeriesOrder, "series-order"},
    {ScenarioKind::LambdaCompare, "lambda-compare"},
    {ScenarioKind::LambdaSweepGamma, "lambda-sweep-gamma"},
    {ScenarioKind::LambdaSweepOmega, "lambda-sweep-omega"},
};

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::string path_of(std::string_view prefix, std::string_view key) {
  return prefix.empty() ? std::string(key) : std::string(prefix) + "." + std::string(key);
}

class Section {
 public:
  Section(const json& node, std::string prefix, Keys known) : node_(node), prefix_(std::move(prefix)) {
    if (!node_.is_object())
      throw ConfigError(ConfigErrorCode::InvalidValue, prefix_.empty() ? "<root>" : prefix_,
                        "expected an object");
    for (const auto& [key, value] : node_.items()) {
      if (std::find(known.begin(), known.end(), key) != known.end()) continue;
      std::string_view best;
      std::size_t best_distance = std::numeric_limits<std::size_t>::max();
      for (auto candidate : known) {
        const auto d = edit_distance(key, candidate);
        if (d < best_distance) best_distance = d, best = candidate;
      }
      std::string message = "unknown key '" + path_of(prefix_, key) + "'";
      if (!best.empty()) message += " (did you mean '" + std::string(best) + "'?)";
      throw ConfigError(ConfigErrorCode::UnknownKey, path_of(prefix_, key), message,
                        std::string(best));
    }
  }

  bool has(std::string_view key) const { return node_.contains(key); }
  std::string path(std::string_view key) const { return path_of(prefix_, key); }
  const json& raw(std::string_view key) const { return node_.at(key); }

  std::optional<double> number(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    const json& v = node_.at(key);
    if (!v.is_number())
      throw ConfigError(ConfigErrorCode::InvalidValue, path(key), "'" + path(key) + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
      throw ConfigError(ConfigErrorCode::NonFinite, path(key), "'" + path(key) + "' is not finite");
    return x;
  }

  double required(std::string_view key) const {
    if (auto x = number(key)) return *x;
    throw ConfigError(ConfigErrorCode::MissingParameter, path(key),
                      "missing required parameter '" + path(key) + "'");
  }

  double non_negative(std::string_view key, std::optional<double> fallback = {}) const {
    const double x = fallback && !has(key) ? *fallback : required(key);
    if (x < 0.0)
      throw ConfigError(ConfigErrorCode::InvalidValue, path(key), "'" + path(key) + "' must be >= 0");
    return x;
  }

  double positive(std::string_view key, std::optional<double> fallback = {}) const {
    const double x = fallback && !has(key) ? *fallback : required(key);
    if (x <= 0.0)
      throw ConfigError(ConfigErrorCode::InvalidValue, path(key), "'" + path(key) + "' must be > 0");
    return x;
  }

  std::string string(std::string_view key) const {
    if (!has(key))
      throw ConfigError(ConfigErrorCode::MissingParameter, path(key),
                        "missing required parameter '" + path(key) + "'");
    const json& v = node_.at(key);
    if (!v.is_string())
      throw ConfigError(ConfigErrorCode::InvalidValue, path(key), "'" + path(key) + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(std::string_view key) const {
    const json& v = node_.at(key);
    if (!v.is_array())
      throw ConfigError(ConfigErrorCode::InvalidValue, path(key), "'" + path(key) + "' must be an array");
    std::vector<double> out;
    for (const auto& item : v) {
      if (!item.is_number())
        throw ConfigError(ConfigErrorCode::InvalidValue, path(key),
                          "'" + path(key) + "' must contain only numbers");
      const double x = item.get<double>();
      if (!std::isfinite(x))
        throw ConfigError(ConfigErrorCode::NonFinite, path(key),
                          "'" + path(key) + "' contains a non-finite number");
      out.push_back(x);
    }
    return out;
  }

  Section child(std::string_view key, Keys known) const {
    if (!has(key))
      throw ConfigError(ConfigErrorCode::MissingParameter, path(key), "missing section '" + path(key) + "'");
    return Section(node_.at(key), path(key), known);
  }

 private:
  const json& node_;
  std::string prefix_;
};

bool is_tls(ScenarioKind k) {
  return k == ScenarioKind::TlsRun || k == ScenarioKind::TlsSweepLambda ||
         k == ScenarioKind::SeriesOrder;
}

TwoBathModel parse_tls_model(const Section& model, ScenarioKind kind) {
  TwoBathModel m;
  const bool swept = kind == ScenarioKind::TlsSweepLambda;
  m.bath1.gamma = model.non_negative("gamma1");
  m.bath2.gamma = model.non_negative("gamma2", m.bath1.gamma);
  // Swept widths are overwritten per sweep point.
  m.bath1.width = model.positive("lambda1", swept ? std::optional(1.0) : std::nullopt);
  m.bath2.width = model.positive("lambda2", swept ? std::optional(m.bath1.width) : std::nullopt);
  m.bath1.center = model.number("center1").value_or(0.0);
  m.bath2.center = model.number("center2").value_or(0.0);
  m.c0 = model.positive("c0", 1.0);
  if (m.c0 > 1.0)
    throw ConfigError(ConfigErrorCode::InvalidValue, model.path("c0"), "'model.c0' must lie in (0, 1]");
  return m;
}

KernelSpec parse_kernel(const Section& model, double gamma_perp) {
  if (!model.has("kernel")) return ConstantUnitKernel{};
  const Section k = model.child("kernel", {"type", "weight", "times", "values", "values_imag"});
  const std::string type = k.string("type");
  if (type == "constant") return ConstantUnitKernel{};
  if (type == "markovian") {
    if (!k.has("weight") && gamma_perp <= 0.0)
      throw ConfigError(ConfigErrorCode::MissingParameter, k.path("weight"),
                        "Markovian kernel needs 'weight' when gamma_perp is 0");
    return MarkovianDeltaKernel{k.positive("weight", gamma_perp > 0.0 ? 1.0 / gamma_perp : 1.0)};
  }
  if (type == "tabulated") {
    if (!k.has("times") || !k.has("values"))
      throw ConfigError(ConfigErrorCode::MissingParameter, k.path(k.has("times") ? "values" : "times"),
                        "tabulated kernel needs 'times' and 'values'");
    TabulatedKernel tab;
    tab.times = k.numbers("times");
    const auto re = k.numbers("values");
    const auto im = k.has("values_imag") ? k.numbers("values_imag") : std::vector<double>(re.size());
    if (im.size() != re.size())
      throw ConfigError(ConfigErrorCode::InvalidValue, k.path("values_imag"),
                        "'values_imag' must match 'values' in length");
    for (std::size_t i = 0; i < re.size(); ++i) tab.values.emplace_back(re[i], im[i]);
    try {
      validate(KernelSpec{tab});
    } catch (const ParameterError& e) {
      throw ConfigError(ConfigErrorCode::InvalidValue, k.path("times"), e.what());
    }
    return tab;
  }
  throw ConfigError(ConfigErrorCode::InvalidValue, k.path("type"),
                    "kernel type must be 'constant', 'markovian' or 'tabulated', got '" + type + "'");
}

DensityMatrix3 parse_initial_state(const Section& model, std::string& label) {
  label = model.has("initial_state") ? model.string("initial_state") : "dark";
  if (label == "dark") return projector(dark_state());
  if (label == "bright") return projector(bright_state());
  if (label == "level1") return transition(1, 1);
  if (label == "level2") return transition(2, 2);
  if (label == "level3") return transition(3, 3);
  if (label == "mixed") return Operator3::Identity() / 3.0;
  throw ConfigError(ConfigErrorCode::InvalidValue, model.path("initial_state"),
                    "initial_state must be one of dark, bright, level1, level2, level3, mixed");
}

LambdaParams parse_lambda_model(const Section& model, ScenarioKind kind,
                                const std::optional<SweepSpec>& sweep, std::string& label) {
  const std::string swept = sweep ? sweep->parameter : std::string();
  const auto fill = [&](std::string_view key, bool overwritten) {
    return model.non_negative(key, overwritten ? std::optional(0.0) : std::nullopt);
  };
  LambdaParams p;
  const bool gammas_swept = kind == ScenarioKind::LambdaSweepGamma;
  p.omega = fill("omega", swept == "omega" || swept == "gamma_omega");
  p.gamma1 = fill("gamma1", gammas_swept);
  p.gamma2 = fill("gamma2", gammas_swept);
  p.gamma_perp = fill("gamma_perp", false);
  p.kernel = parse_kernel(model, p.gamma_perp);
  p.initial_state = parse_initial_state(model, label);
  return p;
}

SweepSpec parse_sweep(const Section& root, ScenarioKind kind) {
  const Section s = root.child("sweep", {"parameter", "values"});
  SweepSpec sweep;
  sweep.parameter = s.string("parameter");
  std::vector<std::string_view> allowed;
  switch (kind) {
    case ScenarioKind::TlsSweepLambda: allowed = {"lambda"}; break;
    case ScenarioKind::LambdaSweepGamma: allowed = {"gamma", "gamma_omega"}; break;
    case ScenarioKind::LambdaSweepOmega: allowed = {"omega"}; break;
    default: break;
  }
  if (std::find(allowed.begin(), allowed.end(), sweep.parameter) == allowed.end()) {
    std::string names;
    for (auto a : allowed) names += (names.empty() ? "" : ", ") + std::string(a);
    throw ConfigError(ConfigErrorCode::InvalidValue, s.path("parameter"),
                      "sweep parameter for " + std::string(to_string(kind)) + " must be one of: " + names);
  }
  if (!s.has("values"))
    throw ConfigError(ConfigErrorCode::MissingParameter, s.path("values"), "missing required parameter 'sweep.values'");
  sweep.values = s.numbers("values");
  if (sweep.values.empty())
    throw ConfigError(ConfigErrorCode::InvalidValue, s.path("values"), "'sweep.values' must not be empty");
  for (double v : sweep.values)
    if (v <= 0.0)
      throw ConfigError(ConfigErrorCode::InvalidValue, s.path("values"), "sweep values must be > 0");
  return sweep;
}

UniformGrid parse_grid(const Section& root) {
  const Section g = root.child("grid", {"t_max", "n_steps"});
  UniformGrid grid;
  grid.t_max = g.positive("t_max");
  const double steps = g.required("n_steps");
  if (steps < 10 || std::floor(steps) != steps || steps > 1e9)
    throw ConfigError(ConfigErrorCode::InvalidValue, g.path("n_steps"),
                      "'grid.n_steps' must be an integer >= 10");
  grid.n_steps = static_cast<std::size_t>(steps);
  return grid;
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  for (const auto& [k, name] : kScenarioNames)
    if (k == kind) return name;
  return "?";
}

bool is_sweep(ScenarioKind kind) {
  return kind == ScenarioKind::TlsSweepLambda || kind == ScenarioKind::LambdaSweepGamma ||
         kind == ScenarioKind::LambdaSweepOmega;
}

std::string_view to_string(ConfigErrorCode code) {
  switch (code) {
    case ConfigErrorCode::Syntax: return "syntax-error";
    case ConfigErrorCode::UnknownScenario: return "unknown-scenario";
    case ConfigErrorCode::MissingParameter: return "missing-parameter";
    case ConfigErrorCode::NonFinite: return "non-finite-number";
    case ConfigErrorCode::UnknownKey: return "unknown-key";
    case ConfigErrorCode::InvalidValue: return "invalid-value";
  }
  return "?";
}

ConfigError::ConfigError(ConfigErrorCode code, std::string key, const std::string& message,
                         std::string suggestion)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      key_(std::move(key)),
      suggestion_(std::move(suggestion)) {}

ScenarioConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(ConfigErrorCode::Syntax, "<root>", e.what());
  } catch (const json::out_of_range& e) {
    // 406: a literal such as 1e400 overflows to infinity.
    throw ConfigError(e.id == 406 ? ConfigErrorCode::NonFinite : ConfigErrorCode::Syntax, "<root>", e.what());
  }

  const Section root(doc, "", {"scenario", "model", "grid", "sweep", "series", "output"});
  ScenarioConfig cfg;
  const std::string name = root.string("scenario");
  const auto it = std::find_if(std::begin(kScenarioNames), std::end(kScenarioNames),
                               [&](const auto& entry) { return entry.second == name; });
  if (it == std::end(kScenarioNames))
    throw ConfigError(ConfigErrorCode::UnknownScenario, "scenario", "unknown scenario '" + name + "'");
  cfg.scenario = it->first;

  if (is_sweep(cfg.scenario)) {
    cfg.sweep = parse_sweep(root, cfg.scenario);
  } else if (root.has("sweep")) {
    throw ConfigError(ConfigErrorCode::InvalidValue, "sweep",
                      "'sweep' is only valid for sweep scenarios");
  }

  if (cfg.scenario == ScenarioKind::SeriesOrder) {
    if (root.has("grid")) cfg.grid = parse_grid(root);
    if (root.has("series")) {
      const Section s = root.child("series", {"truncation_order"});
      const double order = s.required("truncation_order");
      if (order < 6 || order > 64 || std::floor(order) != order)
        throw ConfigError(ConfigErrorCode::InvalidValue, s.path("truncation_order"),
                          "'series.truncation_order' must be an integer in [6, 64]");
      cfg.truncation_order = static_cast<int>(order);
    }
  } else {
    if (root.has("series"))
      throw ConfigError(ConfigErrorCode::InvalidValue, "series",
                        "'series' is only valid for the series-order scenario");
    cfg.grid = parse_grid(root);
  }

  if (is_tls(cfg.scenario)) {
    const Section model =
        root.child("model", {"gamma1", "lambda1", "center1", "gamma2", "lambda2", "center2", "c0"});
    cfg.model = parse_tls_model(model, cfg.scenario);
  } else {
    const Section model =
        root.child("model", {"omega", "gamma1", "gamma2", "gamma_perp", "kernel", "initial_state"});
    cfg.model = parse_lambda_model(model, cfg.scenario, cfg.sweep, cfg.initial_state_label);
  }

  if (root.has("output")) cfg.output = root.string("output");
  return cfg;
}

std::vector<std::pair<std::string, std::string>> describe(const ScenarioConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  const std::string swept = cfg.sweep ? cfg.sweep->parameter : std::string();
  const auto value = [&](double x, bool overwritten) {
    return overwritten ? std::string("swept") : format_number(x);
  };
  out.emplace_back("scenario", std::string(to_string(cfg.scenario)));
  if (const auto* m = std::get_if<TwoBathModel>(&cfg.model)) {
    out.emplace_back("gamma1", format_number(m->bath1.gamma));
    out.emplace_back("lambda1", value(m->bath1.width, swept == "lambda"));
    out.emplace_back("center1", format_number(m->bath1.center));
    out.emplace_back("gamma2", format_number(m->bath2.gamma));
    out.emplace_back("lambda2", value(m->bath2.width, swept == "lambda"));
    out.emplace_back("center2", format_number(m->bath2.center));
    out.emplace_back("c0", format_number(m->c0));
  } else {
    const auto& p = std::get<LambdaParams>(cfg.model);
    out.emplace_back("omega", value(p.omega, swept == "omega" || swept == "gamma_omega"));
    out.emplace_back("gamma1", value(p.gamma1, swept == "gamma" || swept == "gamma_omega"));
    out.emplace_back("gamma2", value(p.gamma2, swept == "gamma" || swept == "gamma_omega"));
    out.emplace_back("gamma_perp", format_number(p.gamma_perp));
    std::string kernel;
    if (std::holds_alternative<ConstantUnitKernel>(p.kernel)) kernel = "constant";
    if (const auto* k = std::get_if<MarkovianDeltaKernel>(&p.kernel))
      kernel = "markovian weight=" + format_number(k->weight);
    if (const auto* k = std::get_if<TabulatedKernel>(&p.kernel))
      kernel = "tabulated points=" + std::to_string(k->times.size());
    out.emplace_back("kernel", kernel);
    out.emplace_back("initial_state", cfg.initial_state_label);
  }
  if (cfg.scenario == ScenarioKind::SeriesOrder) {
    out.emplace_back("truncation_order", std::to_string(cfg.truncation_order));
  } else {
    out.emplace_back("t_max", format_number(cfg.grid.t_max));
    out.emplace_back("n_steps", std::to_string(cfg.grid.n_steps));
  }
  if (cfg.sweep) {
    out.emplace_back("sweep_parameter", cfg.sweep->parameter);
    out.emplace_back("sweep_points", std::to_string(cfg.sweep->values.size()));
  }
  return out;
}

}  // namespace resint
