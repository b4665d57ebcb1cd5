#pragma once

// Run configuration: flat key = value text with [section] headers.
//
//   scenario = mrt-scan
//   units = GHz
//   [spectrum]
//   model = ohmic
//   eta = 1
//   ...
//
// Unknown keys are rejected so a typo never silently falls back to a default.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mrt/dynamics.hpp"
#include "mrt/errors.hpp"
#include "mrt/rates.hpp"
#include "mrt/spectral.hpp"

namespace mrt::config {

namespace pt = boost::property_tree;

enum class Scenario { envelope, mrt_scan, evolve, peak, multichannel, oracle };
enum class EvolveMode { local, nonlocal, short_time };
enum class LocalRates { gaussian, classical };
enum class OracleName { static_noise, convolution, refined_local, refined_nonlocal };

inline constexpr std::size_t max_steps = 1000000;

struct Grid {
  double start = 0.0;
  double stop = 0.0;
  std::size_t steps = 0;

  std::size_t size() const { return steps + 1; }
  double operator[](std::size_t i) const {
    return i == steps ? stop : start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps);
  }
  TimeGrid time() const { return {start, stop, steps}; }
};

struct RunConfig {
  Scenario scenario = Scenario::mrt_scan;
  std::string units;
  std::string output;
  std::uint64_t seed = 0;

  std::optional<SpectralModel> spectrum;
  TwoStateParams system{};
  bool has_delta = false;
  std::optional<double> W_override;
  double rho11_0 = 0.0;
  std::complex<double> rho01_0{0.5, 0.0};

  std::optional<Grid> time;
  std::optional<Grid> bias;

  LineShape shape = LineShape::gaussian;
  double gamma = 0.0;
  std::optional<double> eps_p;

  EvolveMode mode = EvolveMode::local;
  LocalRates local_rates = LocalRates::gaussian;

  std::optional<WellLevels> levels;
  BoltzmannWeights weights = BoltzmannWeights::normalized;

  OracleName oracle = OracleName::static_noise;
  std::uint64_t samples = 100000;
  std::optional<double> probe_time;
  unsigned threads = 1;

  pt::ptree source;  // as read, plus command-line overrides; echoed into outputs
};

namespace detail {

inline const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"", {"scenario", "units", "output", "seed"}},
      {"spectrum", {"model", "s0", "eta", "cutoff", "temperature", "file"}},
      {"system", {"delta", "delta_slope", "eps", "eps_slope", "temperature", "W", "rho11_0", "rho01_re", "rho01_im"}},
      {"time", {"start", "stop", "steps"}},
      {"bias", {"start", "stop", "steps"}},
      {"scan", {"shape", "gamma", "eps_p"}},
      {"evolve", {"mode", "rates"}},
      {"levels", {"energies", "deltas", "gammas", "weights", "eps_p"}},
      {"oracle", {"name", "samples", "probe_time", "threads", "gamma"}},
  };
  return keys;
}

inline void check_keys(const pt::ptree& tree) {
  const auto& allowed = allowed_keys();
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      if (!allowed.at("").count(key)) throw config_error("unknown key '" + key + "'");
      continue;
    }
    const auto section = allowed.find(key);
    if (section == allowed.end() || key.empty()) throw config_error("unknown section [" + key + "]");
    for (const auto& [sub, value] : node) {
      if (!value.empty()) throw config_error("nested sections are not supported: [" + key + "] " + sub);
      if (!section->second.count(sub)) throw config_error("unknown key '" + sub + "' in [" + key + "]");
    }
  }
}

inline std::string where(const std::string& path) {
  const auto dot = path.find('.');
  if (dot == std::string::npos) return "'" + path + "'";
  return "'" + path.substr(dot + 1) + "' in [" + path.substr(0, dot) + "]";
}

inline double parse_double(const std::string& text, const std::string& path) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  if (!text.empty() && *b == '+') ++b;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e || text.empty())
    throw config_error("malformed number '" + text + "' for " + where(path));
  return v;
}

inline std::uint64_t parse_unsigned(const std::string& text, const std::string& path) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    // Accept integral values written in scientific notation, e.g. 1e5.
    const double d = parse_double(text, path);
    if (!(d >= 0.0 && d <= 1.8e19 && d == std::floor(d)))
      throw config_error("expected a non-negative integer for " + where(path) + ", got '" + text + "'");
    return static_cast<std::uint64_t>(d);
  }
  return v;
}

inline std::vector<double> parse_list(const std::string& text, const std::string& path) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw config_error("empty list entry for " + where(path));
    out.push_back(parse_double(item.substr(b, e - b + 1), path));
  }
  return out;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& t) : t_(t) {}

  bool has(const std::string& path) const { return t_.get_optional<std::string>(path).has_value(); }
  bool has_section(const std::string& name) const { return t_.get_child_optional(name).has_value(); }

  std::string text(const std::string& path) const {
    auto v = t_.get_optional<std::string>(path);
    if (!v) throw config_error("missing required key " + where(path));
    return *v;
  }
  std::string text(const std::string& path, const std::string& fallback) const {
    return t_.get<std::string>(path, fallback);
  }
  double number(const std::string& path) const { return parse_double(text(path), path); }
  double number(const std::string& path, double fallback) const {
    return has(path) ? number(path) : fallback;
  }
  std::optional<double> maybe(const std::string& path) const {
    return has(path) ? std::optional<double>(number(path)) : std::nullopt;
  }
  std::uint64_t count(const std::string& path) const { return parse_unsigned(text(path), path); }
  std::uint64_t count(const std::string& path, std::uint64_t fallback) const {
    return has(path) ? count(path) : fallback;
  }

 private:
  const pt::ptree& t_;
};

template <class E>
E choose(const std::string& value, const std::string& path, std::initializer_list<std::pair<const char*, E>> options) {
  std::string names;
  for (const auto& [name, e] : options) {
    if (value == name) return e;
    names += names.empty() ? name : std::string(" | ") + name;
  }
  throw config_error("invalid value '" + value + "' for " + where(path) + " (expected " + names + ")");
}

inline Grid parse_grid(const Reader& r, const std::string& section) {
  Grid g{r.number(section + ".start"), r.number(section + ".stop"), r.count(section + ".steps")};
  if (g.steps < 1) throw config_error("[" + section + "] needs at least 2 points (steps >= 1)");
  if (g.steps > max_steps) throw config_error("[" + section + "] steps must be <= 1000000");
  if (!(g.stop > g.start)) throw config_error("[" + section + "] stop must exceed start");
  return g;
}

inline SpectralModel parse_spectrum(const Reader& r, const std::filesystem::path& base, double system_temperature) {
  const std::string model = r.text("spectrum.model");
  try {
    if (model == "white") return SpectralModel::white(r.number("spectrum.s0"), r.number("spectrum.temperature", 0.0));
    if (model == "ohmic")
      return SpectralModel::ohmic(r.number("spectrum.eta"), r.number("spectrum.cutoff"),
                                  r.number("spectrum.temperature", system_temperature));
    if (model == "tabulated") {
      std::filesystem::path file = r.text("spectrum.file");
      if (file.is_relative()) file = base / file;
      return load_tabulated_spectrum(file.string(), r.number("spectrum.temperature", 0.0));
    }
  } catch (const physics_error& e) {
    throw config_error(std::string("[spectrum] ") + e.what());
  }
  throw config_error("invalid value '" + model + "' for 'model' in [spectrum] (expected white | ohmic | tabulated)");
}

inline WellLevels parse_levels(const Reader& r) {
  const auto energies = parse_list(r.text("levels.energies"), "levels.energies");
  const auto deltas = parse_list(r.text("levels.deltas"), "levels.deltas");
  std::vector<double> gammas(energies.size(), 0.0);
  if (r.has("levels.gammas")) gammas = parse_list(r.text("levels.gammas"), "levels.gammas");
  if (deltas.size() != energies.size() || gammas.size() != energies.size())
    throw config_error("[levels] energies, deltas and gammas must have equal length");
  std::vector<WellLevel> levels;
  for (std::size_t i = 0; i < energies.size(); ++i) levels.push_back({energies[i], deltas[i], gammas[i]});
  try {
    return WellLevels(std::move(levels));
  } catch (const physics_error& e) {
    throw config_error(std::string("[levels] ") + e.what());
  }
}

}  // namespace detail

inline std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::envelope: return "envelope";
    case Scenario::mrt_scan: return "mrt-scan";
    case Scenario::evolve: return "evolve";
    case Scenario::peak: return "peak";
    case Scenario::multichannel: return "multichannel";
    case Scenario::oracle: return "oracle";
  }
  return "unknown";
}

inline Scenario parse_scenario(const std::string& s) {
  return detail::choose<Scenario>(s, "scenario",
                                  {{"envelope", Scenario::envelope},
                                   {"mrt-scan", Scenario::mrt_scan},
                                   {"evolve", Scenario::evolve},
                                   {"peak", Scenario::peak},
                                   {"multichannel", Scenario::multichannel},
                                   {"oracle", Scenario::oracle}});
}

// Builds a RunConfig from an already-read tree; `base` resolves relative
// file names.
inline RunConfig from_tree(const pt::ptree& tree, const std::filesystem::path& base = {}) {
  detail::check_keys(tree);
  const detail::Reader r(tree);
  RunConfig c;
  c.source = tree;
  c.scenario = parse_scenario(r.text("scenario"));
  c.units = r.text("units", "natural");
  c.output = r.text("output", "");
  c.seed = r.count("seed", 0);

  const double T = r.number("system.temperature", r.number("spectrum.temperature", 0.0));
  c.system.temperature = T;
  c.has_delta = r.has("system.delta");
  c.system.delta = {r.number("system.delta", 0.0), r.number("system.delta_slope", 0.0)};
  c.system.eps = {r.number("system.eps", 0.0), r.number("system.eps_slope", 0.0)};
  c.W_override = r.maybe("system.W");
  c.rho11_0 = r.number("system.rho11_0", 0.0);
  c.rho01_0 = {r.number("system.rho01_re", 0.5), r.number("system.rho01_im", 0.0)};

  if (r.has_section("spectrum")) c.spectrum = detail::parse_spectrum(r, base, T);
  if (r.has_section("time")) c.time = detail::parse_grid(r, "time");
  if (r.has_section("bias")) c.bias = detail::parse_grid(r, "bias");

  c.shape = detail::choose<LineShape>(r.text("scan.shape", "gaussian"), "scan.shape",
                                      {{"gaussian", LineShape::gaussian},
                                       {"classical", LineShape::classical},
                                       {"voigt", LineShape::voigt},
                                       {"nonlocal-corrected", LineShape::nonlocal_corrected}});
  c.gamma = r.number("scan.gamma", r.number("oracle.gamma", 0.0));
  c.eps_p = r.maybe("scan.eps_p");
  if (!c.eps_p) c.eps_p = r.maybe("levels.eps_p");

  c.mode = detail::choose<EvolveMode>(r.text("evolve.mode", "local"), "evolve.mode",
                                      {{"local", EvolveMode::local},
                                       {"nonlocal", EvolveMode::nonlocal},
                                       {"short-time", EvolveMode::short_time}});
  c.local_rates = detail::choose<LocalRates>(r.text("evolve.rates", "gaussian"), "evolve.rates",
                                             {{"gaussian", LocalRates::gaussian}, {"classical", LocalRates::classical}});

  if (r.has_section("levels")) c.levels = detail::parse_levels(r);
  c.weights = detail::choose<BoltzmannWeights>(r.text("levels.weights", "normalized"), "levels.weights",
                                               {{"normalized", BoltzmannWeights::normalized},
                                                {"ground-referenced", BoltzmannWeights::ground_referenced}});

  c.oracle = detail::choose<OracleName>(r.text("oracle.name", "static-noise"), "oracle.name",
                                        {{"static-noise", OracleName::static_noise},
                                         {"convolution", OracleName::convolution},
                                         {"refined-local", OracleName::refined_local},
                                         {"refined-nonlocal", OracleName::refined_nonlocal}});
  c.samples = r.count("oracle.samples", 100000);
  c.probe_time = r.maybe("oracle.probe_time");
  c.threads = static_cast<unsigned>(r.count("oracle.threads", 1));
  return c;
}

// Drops trailing "; ..." and "# ..." comments that follow whitespace; line
// numbers are preserved for error messages.
inline std::string strip_inline_comments(std::istream& in) {
  std::string out;
  for (std::string line; std::getline(in, line);) {
    for (std::size_t i = 1; i < line.size(); ++i) {
      if ((line[i] == ';' || line[i] == '#') && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
        const auto first = line.find_first_not_of(" \t");
        if (first < i) line.erase(line.find_last_not_of(" \t", i - 1) + 1);
        break;
      }
    }
    out += line;
    out += '\n';
  }
  return out;
}

inline pt::ptree read_tree(std::istream& in) {
  pt::ptree tree;
  try {
    std::istringstream clean(strip_inline_comments(in));
    pt::read_ini(clean, tree);
  } catch (const pt::ini_parser_error& e) {
    throw config_error(e.message(), static_cast<int>(e.line()));
  }
  return tree;
}

inline pt::ptree read_tree(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config '" + path.string() + "'");
  try {
    return read_tree(in);
  } catch (const config_error& e) {
    throw config_error(path.string() + ": " + e.what());
  }
}

inline RunConfig parse(std::istream& in, const std::filesystem::path& base = {}) {
  return from_tree(read_tree(in), base);
}

inline RunConfig load(const std::filesystem::path& path) {
  try {
    return from_tree(read_tree(path), path.parent_path());
  } catch (const config_error& e) {
    const std::string what = e.what();
    if (what.rfind(path.string(), 0) == 0) throw;
    throw config_error(path.string() + ": " + what);
  }
}

inline void set_seed(RunConfig& c, std::uint64_t seed) {
  c.seed = seed;
  c.source.put("seed", std::to_string(seed));
}

inline void set_output(RunConfig& c, const std::string& path) {
  c.output = path;
  c.source.put("output", path);
}

// The configuration as key = value lines, root keys first.
inline std::vector<std::string> echo(const RunConfig& c) {
  std::ostringstream os;
  pt::write_ini(os, c.source);
  std::vector<std::string> lines;
  std::istringstream is(os.str());
  for (std::string line; std::getline(is, line);)
    if (!line.empty()) lines.push_back(line);
  return lines;
}

}  // namespace mrt::config
