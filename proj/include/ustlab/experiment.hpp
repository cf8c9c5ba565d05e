#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ustlab/graph.hpp"
#include "ustlab/lerw.hpp"

namespace ustlab {

inline constexpr const char* kToolVersion = "ustlab 1.0.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Settings shared by the CLI subcommands. Parsed from a flat key=value file
/// and then overridden by flags.
struct ExperimentConfig {
  std::string graph;
  std::optional<ScaleSet> scales;
  std::optional<double> kill;      // L, kill_mean = L |G|^{1/2}
  std::optional<double> kill_abs;  // absolute kill_mean
  int k = 2;
  std::uint64_t samples = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0 = available parallelism
  std::string out;
  double delta = 0.1;
  std::string normalize = "median";
  std::map<std::string, double> thresholds;
  std::map<std::string, std::string> extra;  // subcommand-specific keys

  /// Assigns one key; unknown keys land in `extra`. `threshold.NAME` keys fill `thresholds`.
  void set(const std::string& key, const std::string& value);
  /// Key/value pairs in a fixed order. The thread count is left out so that
  /// outputs do not depend on it.
  std::vector<std::pair<std::string, std::string>> echo() const;

  /// kill_mean from `kill_abs` or `kill` (infinite when neither is set).
  double kill_mean(const GraphFamily& g) const;
};

/// Reads `key = value` lines; `#` starts a comment, values may be double-quoted.
ExperimentConfig load_config(const std::string& path);
void apply_config_text(ExperimentConfig& cfg, const std::string& text);

/// "tau,s,q,r" or "tau=..,s=..,q=..,r=..".
ScaleSet parse_scales(const std::string& text);

/// Shortest round-trip decimal form; +infinity becomes the empty string.
std::string format_real(double v);
double parse_real(const std::string& field);

/// CSV with a `#` comment header. Infinite values are written as empty fields.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const ExperimentConfig& cfg, const std::string& command,
            const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& os_;
  std::size_t width_;
};

struct CsvTable {
  std::vector<std::string> comments;  // header lines without the leading '#'
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Index of a column; throws ConfigError when missing.
  std::size_t column(const std::string& name) const;
  /// A column as reals, empty fields read as +infinity.
  std::vector<double> reals(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace ustlab
