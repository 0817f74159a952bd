#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mmc/models.hpp"
#include "mmc/quantization.hpp"

namespace mmc {

struct ArFit {
  int order = 0;
  std::vector<double> coefficients;
  double innovation_variance = 0.0;
};

struct RdEstimate {
  int model = kBypassId;
  int n_x = 0;
  int n_r = 0;
  int header_bits = 0;
  // Candidate n_x values [lo, hi], clamped to the parameter budget.
  int lo = 0;
  int hi = 0;

  int predicted_total() const noexcept { return header_bits + n_x + n_r; }
};

struct RdOptions {
  int model_order = 1;     // AR order of the first-stage residual
  int quant_order = 1;     // AR order of the quantization error
  int delta_m = kModelCount;
  int delta_nx = 7;
};

inline constexpr double kVarianceFloor = 1e-18;

// gamma(p) = (1/N) sum_{n=p+1}^{N} r_n r_{n-p}, p = 0..max_lag.
std::vector<double> autocorr_biased(std::span<const double> r, std::size_t max_lag);

// AR(order) fit of an autocorrelation sequence. Throws kDegenerateFit when
// the Toeplitz system is singular.
ArFit yule_walker(std::span<const double> gamma, int order);

// Same, falling back to order 0 when the fit is degenerate. The variance is
// clamped to kVarianceFloor.
double innovation_variance(std::span<const double> gamma, int order);

// Predicted autocorrelation of the output error caused by quantizing theta
// with n_x bits.
double gamma_q_predicted(const ModelSpec& spec, std::span<const double> theta, int n_x, std::size_t lag,
                         const ModelContext& ctx);

double predict_distortion(double sigma_m2, double sigma_q2, int n_r, std::size_t n);

// Smallest n_r with predict_distortion <= target.
int required_rate(double sigma_m2, double sigma_q2, double target, std::size_t n);

// Ranks the eligible models among `models` by predicted n_h + n_x + n_r and
// keeps the best options.delta_m of them (ties: smaller id first).
std::vector<RdEstimate> preselect(std::span<const double> x, std::span<const int> models, double target,
                                  const ModelContext& ctx, const RdOptions& options);
// Same, reusing parameter estimates already made for each candidate model.
std::vector<RdEstimate> preselect(std::span<const double> x, std::span<const ParamVector> fits, double target,
                                  const ModelContext& ctx, const RdOptions& options);

}  // namespace mmc
