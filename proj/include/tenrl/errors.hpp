#pragma once

#include <stdexcept>
#include <string>

namespace tenrl {

/// Invalid configuration; `path` names the offending field (e.g. "agent.gamma").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// NaN losses, singular curvature factors and similar run-time numerical failures.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checkpoint files missing, malformed, or inconsistent with the network spec.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tenrl
