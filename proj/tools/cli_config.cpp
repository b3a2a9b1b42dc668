#include "cli_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace acsplit::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

double parse_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw UsageError(what + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

TimeStep parse_step(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  if (t == "inf" || t == "infinity") return TimeStep::infinite();
  const double v = parse_real(t, what);
  if (!(v > 0.0)) throw UsageError(what + ": step must be positive or inf");
  return TimeStep(v);
}

Config::Config(std::string command, std::vector<std::pair<std::string, std::string>> defaults)
    : command_(std::move(command)), entries_(std::move(defaults)) {}

std::size_t Config::index(const std::string& key) const {
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    if (entries_[k].first == key) return k;
  }
  std::string known;
  for (const auto& [k, v] : entries_) known += (known.empty() ? "" : ", ") + k;
  throw UsageError(command_ + ": unknown key '" + key + "' (known: " + known + ")");
}

void Config::set(const std::string& key, const std::string& value) {
  entries_[index(key)].second = value;
}

void Config::merge_text(const std::string& text, const std::string& origin) {
  std::istringstream is(text);
  int lineno = 0;
  for (std::string line; std::getline(is, line);) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(origin + ":" + std::to_string(lineno) + ": expected key=value");
    }
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void Config::merge_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << is.rdbuf();
  merge_text(buf.str(), path.string());
}

void Config::merge_args(const std::vector<std::string>& args) {
  for (const auto& a : args) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError(command_ + ": expected key=value, got '" + a + "'");
    }
    set(a.substr(0, eq), a.substr(eq + 1));
  }
}

const std::string& Config::text(const std::string& key) const { return entries_[index(key)].second; }

double Config::real(const std::string& key) const { return parse_real(text(key), key); }

double Config::positive(const std::string& key) const {
  const double v = real(key);
  if (!(v > 0.0)) throw UsageError(key + ": must be positive");
  return v;
}

int Config::integer(const std::string& key, int min_value) const {
  const std::string t = trim(text(key));
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw UsageError(key + ": expected an integer, got '" + t + "'");
  }
  if (v < min_value) throw UsageError(key + ": must be >= " + std::to_string(min_value));
  return v;
}

TimeStep Config::step(const std::string& key) const { return parse_step(text(key), key); }

std::vector<std::string> Config::words(const std::string& key) const {
  auto out = split_list(text(key));
  if (out.empty()) throw UsageError(key + ": empty list");
  return out;
}

std::vector<double> Config::positives(const std::string& key) const {
  std::vector<double> out;
  for (const auto& w : words(key)) {
    const double v = parse_real(w, key);
    if (!(v > 0.0)) throw UsageError(key + ": values must be positive");
    out.push_back(v);
  }
  return out;
}

std::vector<TimeStep> Config::steps(const std::string& key) const {
  std::vector<TimeStep> out;
  for (const auto& w : words(key)) out.push_back(parse_step(w, key));
  return out;
}

std::vector<std::string> Config::echo() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) out.push_back(k + "=" + v);
  return out;
}

}  // namespace acsplit::cli
