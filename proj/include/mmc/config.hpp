#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "mmc/models.hpp"
#include "mmc/search.hpp"

namespace mmc {

struct RunConfig {
  double d_max = 200.0 * 200.0;  // volts^2
  std::string method = "es";
  std::size_t window_size = 128;
  double sample_rate = 6400.0;  // used when the input does not say
  int delta_m = 3;
  int delta_nx = 7;
  int planes = kDefaultPlanes;
  int bit_depth = 16;  // raw bits per sample, for the compression ratio
  int ar_model_order = 1;
  int ar_quant_order = 1;
  double sample_predictive_half_width = 0.5;
  double parameter_predictive_half_width = 0.1;
};

// Reads "key = value" lines; '#' starts a comment. Unknown keys are errors.
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

// Accepts a plain number of volts^2 or "<volts>^2".
double parse_dmax(const std::string& text);

// es, gss, es-dm, gss-dm.
SearchOptions search_options(const RunConfig& config);

CatalogConfig catalog_config(const RunConfig& config, double sample_rate);

}  // namespace mmc
