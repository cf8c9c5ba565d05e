#include "ustlab/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ustlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw ConfigError("invalid value for " + key + ": '" + value + "'");
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

ScaleSet parse_scales(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) throw ConfigError("scales must list tau,s,q,r: '" + text + "'");
  const char* names[] = {"tau", "s", "q", "r"};
  std::uint64_t v[4];
  for (int i = 0; i < 4; ++i) {
    std::string p = trim(parts[static_cast<std::size_t>(i)]);
    const std::string prefix = std::string(names[i]) + "=";
    if (p.rfind(prefix, 0) == 0) p = p.substr(prefix.size());
    v[i] = parse_number<std::uint64_t>(names[i], p);
  }
  try {
    return ScaleSet::explicit_scales(v[0], v[1], v[2], v[3]);
  } catch (const ScaleError& e) {
    throw ConfigError(e.what());
  }
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "graph") {
    graph = value;
  } else if (key == "scales") {
    scales = parse_scales(value);
  } else if (key == "kill") {
    kill = parse_number<double>(key, value);
  } else if (key == "kill_abs" || key == "kill-abs") {
    kill_abs = parse_number<double>(key, value);
  } else if (key == "k") {
    k = parse_number<int>(key, value);
  } else if (key == "samples") {
    samples = parse_number<std::uint64_t>(key, value);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "threads") {
    threads = parse_number<unsigned>(key, value);
  } else if (key == "out") {
    out = value;
  } else if (key == "delta") {
    delta = parse_number<double>(key, value);
  } else if (key == "normalize") {
    if (value != "median" && value != "beta") throw ConfigError("normalize must be median or beta");
    normalize = value;
  } else if (key.rfind("threshold.", 0) == 0) {
    thresholds[key.substr(10)] = parse_number<double>(key, value);
  } else {
    extra[key] = value;
  }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("graph", graph);
  if (scales) out.emplace_back("scales", scales->to_string());
  if (kill) out.emplace_back("kill", format_real(*kill));
  if (kill_abs) out.emplace_back("kill_abs", format_real(*kill_abs));
  out.emplace_back("k", std::to_string(k));
  out.emplace_back("samples", std::to_string(samples));
  out.emplace_back("seed", std::to_string(seed));
  out.emplace_back("out", this->out);
  out.emplace_back("delta", format_real(delta));
  out.emplace_back("normalize", normalize);
  for (const auto& [k2, v] : thresholds) out.emplace_back("threshold." + k2, format_real(v));
  for (const auto& [k2, v] : extra) out.emplace_back(k2, v);
  return out;
}

double ExperimentConfig::kill_mean(const GraphFamily& g) const {
  if (kill_abs) return *kill_abs;
  if (kill) return *kill * std::sqrt(static_cast<double>(g.vertex_count()));
  return std::numeric_limits<double>::infinity();
}

void apply_config_text(ExperimentConfig& cfg, const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    bool quoted = false;
    std::size_t cut = line.size();
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        cut = i;
        break;
      }
    }
    line = trim(line.substr(0, cut));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.set(key, value);
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  ExperimentConfig cfg;
  apply_config_text(cfg, buf.str());
  return cfg;
}

std::string format_real(double v) {
  if (std::isinf(v) && v > 0) return {};
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_real(const std::string& field) {
  const std::string f = trim(field);
  if (f.empty()) return std::numeric_limits<double>::infinity();
  return parse_number<double>("field", f);
}

CsvWriter::CsvWriter(std::ostream& os, const ExperimentConfig& cfg, const std::string& command,
                     const std::vector<std::string>& columns)
    : os_(os), width_(columns.size()) {
  os_ << "# tool=" << kToolVersion << "\n";
  os_ << "# command=" << command << "\n";
  for (const auto& [k, v] : cfg.echo()) os_ << "# " << k << "=" << v << "\n";
  os_ << "# infinity is written as an empty field\n";
  for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
  os_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw ConfigError("CSV row width does not match the header");
  for (std::size_t i = 0; i < fields.size(); ++i) os_ << (i ? "," : "") << fields[i];
  os_ << "\n";
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw ConfigError("CSV has no column " + name);
}

std::vector<double> CsvTable::reals(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(parse_real(r.at(c)));
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  CsvTable t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] == '#') {
      t.comments.push_back(trim(line.substr(1)));
      continue;
    }
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (!header) {
      t.columns = std::move(fields);
      header = true;
      continue;
    }
    if (fields.size() != t.columns.size()) throw ConfigError("ragged CSV row in " + path);
    t.rows.push_back(std::move(fields));
  }
  if (!header) throw ConfigError("CSV without a header row: " + path);
  return t;
}

}  // namespace ustlab
