#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "resint/lambda_system.hpp"
#include "resint/time_grid.hpp"
#include "resint/tls_two_bath.hpp"

namespace resint {

enum class ScenarioKind {
  TlsRun,
  TlsSweepLambda,
  SeriesOrder,
  LambdaCompare,
  LambdaSweepGamma,
  LambdaSweepOmega,
};

std::string_view to_string(ScenarioKind kind);
bool is_sweep(ScenarioKind kind);

enum class ConfigErrorCode {
  Syntax,
  UnknownScenario,
  MissingParameter,
  NonFinite,
  UnknownKey,
  InvalidValue,
};

/// Stable machine-readable name, e.g. "unknown-key".
std::string_view to_string(ConfigErrorCode code);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(ConfigErrorCode code, std::string key, const std::string& message,
              std::string suggestion = {});

  ConfigErrorCode code() const { return code_; }
  /// Dotted path of the offending key, e.g. "model.lamda1".
  const std::string& key() const { return key_; }
  /// Nearest known key for unknown-key errors.
  const std::string& suggestion() const { return suggestion_; }

 private:
  ConfigErrorCode code_;
  std::string key_;
  std::string suggestion_;
};

struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
};

struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::TlsRun;
  std::variant<TwoBathModel, LambdaParams> model;
  UniformGrid grid;
  std::optional<SweepSpec> sweep;
  int truncation_order = 8;
  std::string initial_state_label = "dark";
  std::string output;  // empty: caller decides
};

/// Strict parse of a JSON scenario document. Throws ConfigError.
ScenarioConfig parse_config(std::string_view text);

/// Ordered (name, value) pairs describing the config, for CSV metadata.
std::vector<std::pair<std::string, std::string>> describe(const ScenarioConfig& cfg);

}  // namespace resint
