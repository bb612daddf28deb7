#include "setsens/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "setsens/errors.hpp"

namespace setsens {

std::string_view to_string(RiskEstimator e) noexcept {
  switch (e) {
    case RiskEstimator::shared: return "shared";
    case RiskEstimator::independent_nmc: return "independent_nmc";
    case RiskEstimator::both: return "both";
  }
  return "?";
}

RiskEstimator parse_risk_estimator(std::string_view s) {
  if (s == "shared") return RiskEstimator::shared;
  if (s == "independent_nmc") return RiskEstimator::independent_nmc;
  if (s == "both") return RiskEstimator::both;
  throw ConfigError("unknown risk estimator '" + std::string(s) + "'");
}

namespace {

const std::map<std::string, std::set<std::string>, std::less<>> kSchema = {
    {"study", {"model", "n", "m", "replicates", "seed", "alpha", "permutations", "threads"}},
    {"kernel", {"input", "lengthscale", "quadrature_nodes"}},
    {"bandwidth", {"mode", "sigma2"}},
    {"oscillator", {"forcing", "horizon", "dt"}},
    {"risk", {"grid", "replicates", "estimator", "n_ref", "m_ref", "target_input", "budget"}},
    {"output", {"dir"}},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_integer(const std::string& key, const std::string& text) {
  T v{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("invalid integer for '" + key + "': '" + text + "'");
  return v;
}

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError("invalid number for '" + key + "': '" + text + "'");
  return v;
}

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void StudyConfig::validate() const {
  bool known = false;
  for (auto name : kModelNames) known = known || name == model;
  if (!known) throw ConfigError("unknown model '" + model + "'");
  if (n < 2) throw ConfigError("n must be at least 2");
  if (m < 1) throw ConfigError("m must be at least 1");
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  if (permutations < 19) throw ConfigError("permutations must be at least 19");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (lengthscale && !(*lengthscale > 0.0)) throw ConfigError("lengthscale must be positive");
  if (input_kernel != InputKernelFamily::sobolev1 && quadrature_nodes < 8)
    throw ConfigError("quadrature_nodes must be at least 8");
  if (bandwidth == BandwidthMode::fixed && !(sigma2 > 0.0))
    throw ConfigError("fixed bandwidth needs sigma2 > 0");
  if (!(oscillator.horizon > 0.0) || !(oscillator.dt > 0.0))
    throw ConfigError("oscillator horizon and dt must be positive");
  if (risk.grid.empty()) throw ConfigError("risk grid must not be empty");
  for (auto g : risk.grid)
    if (g < 2) throw ConfigError("risk grid values must be at least 2");
  if (risk.replicates < 20) throw ConfigError("risk replicates must be at least 20");
}

std::string StudyConfig::to_ini() const {
  std::ostringstream os;
  os << "[study]\n"
     << "model = " << model << "\n"
     << "n = " << n << "\n"
     << "m = " << m << "\n"
     << "replicates = " << replicates << "\n"
     << "seed = " << master_seed << "\n"
     << "alpha = " << fmt_real(alpha) << "\n"
     << "permutations = " << permutations << "\n"
     << "threads = " << threads << "\n"
     << "\n[kernel]\n"
     << "input = " << to_string(input_kernel) << "\n"
     << "lengthscale = " << (lengthscale ? fmt_real(*lengthscale) : std::string("auto")) << "\n"
     << "quadrature_nodes = " << quadrature_nodes << "\n"
     << "\n[bandwidth]\n"
     << "mode = " << (bandwidth == BandwidthMode::heuristic ? "heuristic" : "fixed") << "\n"
     << "sigma2 = " << fmt_real(sigma2) << "\n"
     << "\n[oscillator]\n"
     << "forcing = " << oscillator.forcing.describe() << "\n"
     << "horizon = " << fmt_real(oscillator.horizon) << "\n"
     << "dt = " << fmt_real(oscillator.dt) << "\n"
     << "\n[risk]\n"
     << "grid = ";
  for (std::size_t i = 0; i < risk.grid.size(); ++i) os << (i ? "," : "") << risk.grid[i];
  os << "\n"
     << "replicates = " << risk.replicates << "\n"
     << "estimator = " << to_string(risk.estimator) << "\n"
     << "n_ref = " << risk.n_ref << "\n"
     << "m_ref = " << risk.m_ref << "\n"
     << "target_input = " << risk.target_input << "\n"
     << "budget = " << risk.budget << "\n"
     << "\n[output]\n"
     << "dir = " << output_dir << "\n";
  return os.str();
}

std::string StudyConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_ini()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

StudyConfig parse_config(std::string_view text) {
  // '#' comments are accepted in addition to the INI ';' style.
  std::string cleaned;
  {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      const auto t = trim(line);
      if (!t.empty() && t.front() == '#') continue;
      cleaned += line;
      cleaned += '\n';
    }
  }

  boost::property_tree::ptree tree;
  try {
    std::istringstream in(cleaned);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }

  StudyConfig c;
  for (const auto& [section, body] : tree) {
    const auto schema = kSchema.find(section);
    if (schema == kSchema.end()) {
      if (body.empty()) throw ConfigError("config key '" + section + "' must belong to a section");
      throw ConfigError("unknown config section '" + section + "'");
    }
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      if (!schema->second.contains(key)) throw ConfigError("unknown config key '" + key + "' (in [" + section + "])");
      const std::string v = trim(node.data());
      try {
        if (section == "study") {
          if (key == "model") c.model = v;
          else if (key == "n") c.n = parse_integer<std::size_t>(full, v);
          else if (key == "m") c.m = parse_integer<std::size_t>(full, v);
          else if (key == "replicates") c.replicates = parse_integer<std::size_t>(full, v);
          else if (key == "seed") c.master_seed = parse_integer<std::uint64_t>(full, v);
          else if (key == "alpha") c.alpha = parse_real(full, v);
          else if (key == "permutations") c.permutations = parse_integer<std::size_t>(full, v);
          else if (key == "threads") c.threads = parse_integer<int>(full, v);
        } else if (section == "kernel") {
          if (key == "input") c.input_kernel = parse_input_kernel(v);
          else if (key == "lengthscale") {
            if (v == "auto") c.lengthscale.reset();
            else c.lengthscale = parse_real(full, v);
          } else if (key == "quadrature_nodes") c.quadrature_nodes = parse_integer<std::size_t>(full, v);
        } else if (section == "bandwidth") {
          if (key == "mode") {
            if (v == "heuristic") c.bandwidth = BandwidthMode::heuristic;
            else if (v == "fixed") c.bandwidth = BandwidthMode::fixed;
            else throw ConfigError("bandwidth mode must be 'heuristic' or 'fixed'");
          } else if (key == "sigma2") c.sigma2 = parse_real(full, v);
        } else if (section == "oscillator") {
          if (key == "forcing") c.oscillator.forcing = parse_forcing(v);
          else if (key == "horizon") c.oscillator.horizon = parse_real(full, v);
          else if (key == "dt") c.oscillator.dt = parse_real(full, v);
        } else if (section == "risk") {
          if (key == "grid") {
            c.risk.grid.clear();
            std::string item;
            std::istringstream items(v);
            while (std::getline(items, item, ','))
              c.risk.grid.push_back(parse_integer<std::size_t>(full, trim(item)));
          } else if (key == "replicates") c.risk.replicates = parse_integer<std::size_t>(full, v);
          else if (key == "estimator") c.risk.estimator = parse_risk_estimator(v);
          else if (key == "n_ref") c.risk.n_ref = parse_integer<std::size_t>(full, v);
          else if (key == "m_ref") c.risk.m_ref = parse_integer<std::size_t>(full, v);
          else if (key == "target_input") c.risk.target_input = parse_integer<std::size_t>(full, v);
          else if (key == "budget") c.risk.budget = parse_integer<std::uint64_t>(full, v);
        } else if (section == "output") {
          c.output_dir = v;
        }
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        throw ConfigError("invalid value for '" + full + "': " + e.what());
      }
    }
  }
  c.validate();
  return c;
}

StudyConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace setsens
