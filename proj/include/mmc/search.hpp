#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mmc/models.hpp"
#include "mmc/quantization.hpp"
#include "mmc/rd_model.hpp"
#include "mmc/residual.hpp"

namespace mmc {

enum class SearchStrategy { kExhaustive, kGoldenSection };

struct SearchOptions {
  SearchStrategy strategy = SearchStrategy::kExhaustive;
  // Restrict the search to the models and n_x ranges picked by preselect().
  bool preselect = false;
  RdOptions rd;
  int planes = kDefaultPlanes;
  // Upper limit on n_x for every model; negative means 12 bits per parameter.
  int max_nx = -1;
  // Candidate model ids in any order; empty means the whole catalog. The
  // second-stage-only solution (Bypass) is always available.
  std::vector<int> models;
};

struct ModelTrace {
  int model = kBypassId;
  // Number of n_x values in the model's interval when it was first formed.
  int interval_size = 0;
  int residual_calls = 0;
};

struct SearchDiagnostics {
  // Residual codings made while evaluating n_r(n_x).
  int residual_calls = 0;
  // Residual codings made for n_max and n_min.
  int bound_calls = 0;
  int n_max = 0;
  std::vector<ModelTrace> models;
  std::vector<RdEstimate> preselected;
};

struct SearchResult {
  int model = kBypassId;
  ResidualMethod method = ResidualMethod::kDctBpc;
  int n_x = 0;
  int n_r = 0;
  int header_bits = 0;
  int total = 0;
  // Achieved MSE in the scaled domain of the window.
  double distortion = 0.0;
  // Parameter count of the selected model (the refined model's for
  // ParameterPredictive).
  int k_params = 0;
  ParamVector params;
  QuantizedParams quantized;
  EmbeddedStream residual;  // exactly n_r bits
  std::vector<double> reconstruction;  // scaled domain
  SearchDiagnostics diagnostics;

  bool has_residual() const noexcept { return n_r > 0; }
};

struct BoundResult {
  int bits = 0;
  ResidualMethod method = ResidualMethod::kDctBpc;
  bool reached = true;
};

// Residual coders usable for a window of length n.
std::vector<ResidualMethod> residual_methods(std::size_t n);

// Bits needed to code x with the second stage only.
BoundResult compute_n_max(std::span<const double> x, double target, int planes = kDefaultPlanes);

// Bits needed to code x - base, the residual of the unquantized model.
BoundResult compute_n_min(std::span<const double> x, std::span<const double> base, double target,
                          int planes = kDefaultPlanes);

SearchResult search(std::span<const double> x, double target, const ModelContext& ctx,
                    const SearchOptions& options);

SearchResult exhaustive_search(std::span<const double> x, double target, const ModelContext& ctx,
                               SearchOptions options = {});
SearchResult golden_section_search(std::span<const double> x, double target, const ModelContext& ctx,
                                   SearchOptions options = {});
SearchResult search_with_dm(std::span<const double> x, double target, const ModelContext& ctx, int delta_m,
                            int delta_nx, SearchStrategy inner, SearchOptions options = {});

struct LineSearchResult {
  int x = 0;
  double value = 0.0;
  int evaluations = 0;
};

// Minimizes f over the integers lo..hi assuming it is unimodal, with golden
// section steps on the Fibonacci lattice so that every step reuses one probe.
// The left end lo is always evaluated.
// Returns the best point evaluated; ties go to the smaller x.
LineSearchResult integer_golden_section(int lo, int hi, const std::function<double(int)>& f);

}  // namespace mmc
