#include "mmc/config.hpp"

#include <fstream>

#include "mmc/error.hpp"

namespace mmc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "bad number for " + key + ": " + v);
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != static_cast<int>(d)) throw Error(ErrorCode::kInvalidArgument, key + " must be an integer");
  return static_cast<int>(d);
}

}  // namespace

double parse_dmax(const std::string& text) {
  const std::string t = trim(text);
  double d = 0.0;
  if (t.size() > 2 && t.compare(t.size() - 2, 2, "^2") == 0) {
    const double v = to_double("dmax", t.substr(0, t.size() - 2));
    d = v * v;
  } else {
    d = to_double("dmax", t);
  }
  if (!(d > 0)) throw Error(ErrorCode::kInvalidArgument, "dmax must be positive");
  return d;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "dmax") c.d_max = parse_dmax(value);
  else if (key == "method") c.method = value;
  else if (key == "window_size") c.window_size = static_cast<std::size_t>(to_int(key, value));
  else if (key == "sample_rate") c.sample_rate = to_double(key, value);
  else if (key == "delta_m") c.delta_m = to_int(key, value);
  else if (key == "delta_nx") c.delta_nx = to_int(key, value);
  else if (key == "planes") c.planes = to_int(key, value);
  else if (key == "bit_depth") c.bit_depth = to_int(key, value);
  else if (key == "ar_model_order") c.ar_model_order = to_int(key, value);
  else if (key == "ar_quant_order") c.ar_quant_order = to_int(key, value);
  else if (key == "sample_predictive_half_width") c.sample_predictive_half_width = to_double(key, value);
  else if (key == "parameter_predictive_half_width") c.parameter_predictive_half_width = to_double(key, value);
  else throw Error(ErrorCode::kInvalidArgument, "unknown setting: " + key);
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

SearchOptions search_options(const RunConfig& c) {
  SearchOptions o;
  if (c.method == "es") {
    o.strategy = SearchStrategy::kExhaustive;
  } else if (c.method == "gss") {
    o.strategy = SearchStrategy::kGoldenSection;
  } else if (c.method == "es-dm") {
    o.strategy = SearchStrategy::kExhaustive;
    o.preselect = true;
  } else if (c.method == "gss-dm") {
    o.strategy = SearchStrategy::kGoldenSection;
    o.preselect = true;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown method: " + c.method + " (expected es, gss, es-dm, gss-dm)");
  }
  if (c.delta_m < 1 || c.delta_nx < 1) throw Error(ErrorCode::kInvalidArgument, "delta_m and delta_nx must be >= 1");
  if (c.planes < 1 || c.planes > kMaxPlanes) throw Error(ErrorCode::kInvalidArgument, "planes out of range");
  o.planes = c.planes;
  o.rd.delta_m = c.delta_m;
  o.rd.delta_nx = c.delta_nx;
  o.rd.model_order = c.ar_model_order;
  o.rd.quant_order = c.ar_quant_order;
  return o;
}

CatalogConfig catalog_config(const RunConfig& c, double sample_rate) {
  CatalogConfig cc = default_catalog_config();
  cc.window_size = c.window_size;
  cc.sample_rate = sample_rate;
  cc.sample_predictive_half_width = c.sample_predictive_half_width;
  cc.parameter_predictive_half_width = c.parameter_predictive_half_width;
  return cc;
}

}  // namespace mmc
