#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "acsplit/diagnostics.hpp"

namespace acsplit::cli {

inline constexpr const char* kFormatVersion = "acsplit-cli-1";

/// Bad command line or config; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered key=value settings for one subcommand. Only keys declared in the
/// defaults are accepted.
class Config {
 public:
  Config(std::string command, std::vector<std::pair<std::string, std::string>> defaults);

  const std::string& command() const noexcept { return command_; }

  /// Lines of `key=value`; blank lines and `#` comments ignored.
  void merge_file(const std::filesystem::path& path);
  void merge_text(const std::string& text, const std::string& origin);
  /// Each argument must be `key=value`.
  void merge_args(const std::vector<std::string>& args);
  void set(const std::string& key, const std::string& value);

  const std::string& text(const std::string& key) const;
  double real(const std::string& key) const;
  double positive(const std::string& key) const;
  int integer(const std::string& key, int min_value) const;
  /// Positive finite number or `inf`.
  TimeStep step(const std::string& key) const;
  /// Comma-separated lists.
  std::vector<std::string> words(const std::string& key) const;
  std::vector<double> positives(const std::string& key) const;
  std::vector<TimeStep> steps(const std::string& key) const;

  /// `key=value` for every key, in declaration order.
  std::vector<std::string> echo() const;

 private:
  std::size_t index(const std::string& key) const;

  std::string command_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

double parse_real(const std::string& text, const std::string& what);
TimeStep parse_step(const std::string& text, const std::string& what);

}  // namespace acsplit::cli
