#include "mmc/rd_model.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "mmc/error.hpp"
#include "mmc/layout.hpp"
#include "mmc/signal.hpp"

namespace mmc {

std::vector<double> autocorr_biased(std::span<const double> r, std::size_t max_lag) {
  const std::size_t n = r.size();
  if (max_lag >= n) throw Error(ErrorCode::kInvalidArgument, "lag must be smaller than the sequence length");
  std::vector<double> gamma(max_lag + 1, 0.0);
  for (std::size_t p = 0; p <= max_lag; ++p) {
    double acc = 0.0;
    for (std::size_t i = p; i < n; ++i) acc += r[i] * r[i - p];
    gamma[p] = acc / static_cast<double>(n);
  }
  return gamma;
}

ArFit yule_walker(std::span<const double> gamma, int order) {
  if (order < 0 || gamma.size() < static_cast<std::size_t>(order) + 1) {
    throw Error(ErrorCode::kInvalidArgument, "not enough autocorrelation lags for the AR order");
  }
  ArFit fit;
  fit.order = order;
  if (order == 0) {
    fit.innovation_variance = gamma[0];
    return fit;
  }
  if (!(gamma[0] > 0)) throw Error(ErrorCode::kDegenerateFit, "zero-energy autocorrelation");
  if (order == 1) {
    fit.coefficients = {gamma[1] / gamma[0]};
    fit.innovation_variance = gamma[0] - gamma[1] * gamma[1] / gamma[0];
    return fit;
  }
  Eigen::MatrixXd toeplitz(order, order);
  Eigen::VectorXd rhs(order);
  for (int i = 0; i < order; ++i) {
    rhs[i] = gamma[static_cast<std::size_t>(i) + 1];
    for (int j = 0; j < order; ++j) toeplitz(i, j) = gamma[static_cast<std::size_t>(std::abs(i - j))];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(toeplitz);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw Error(ErrorCode::kDegenerateFit, "singular Yule-Walker system");
  const Eigen::VectorXd alpha = lu.solve(rhs);
  fit.coefficients.assign(alpha.data(), alpha.data() + order);
  fit.innovation_variance = gamma[0] - alpha.dot(rhs);
  return fit;
}

double innovation_variance(std::span<const double> gamma, int order) {
  double v = 0.0;
  try {
    v = yule_walker(gamma, order).innovation_variance;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateFit) throw;
    v = gamma[0];
  }
  return std::max(v, kVarianceFloor);
}

namespace {

double uniform_c2(const PriorBox& prior, std::size_t k) {
  return c_squared(PriorMarginal{PriorMarginal::Kind::kUniform, prior.width(k), 0.0});
}

// sum_k h_k(lag) c_k^2 2^(-2 n_k) from precomputed h_k(lag) c_k^2.
double weighted_sum(std::span<const double> hc, const BitAllocation& alloc) {
  double acc = 0.0;
  for (std::size_t k = 0; k < hc.size(); ++k) acc += std::ldexp(hc[k], -2 * alloc.bits[k]);
  return acc;
}

}  // namespace

double gamma_q_predicted(const ModelSpec& spec, std::span<const double> theta, int n_x, std::size_t lag,
                         const ModelContext& ctx) {
  const auto alloc = allocate_bits(spec, n_x, ctx);
  std::vector<double> hc(static_cast<std::size_t>(spec.k_params));
  for (std::size_t k = 0; k < hc.size(); ++k) {
    hc[k] = h_autocorr(spec, theta, static_cast<int>(k), lag, ctx) * uniform_c2(spec.prior, k);
  }
  return weighted_sum(hc, alloc);
}

double predict_distortion(double sigma_m2, double sigma_q2, int n_r, std::size_t n) {
  return (sigma_m2 + sigma_q2) * std::exp2(-2.0 * n_r / static_cast<double>(n));
}

int required_rate(double sigma_m2, double sigma_q2, double target, std::size_t n) {
  if (!(target > 0)) throw Error(ErrorCode::kInvalidArgument, "target must be positive");
  const double total = std::max(sigma_m2 + sigma_q2, kVarianceFloor);
  if (total <= target) return 0;
  int rate = static_cast<int>(std::ceil(0.5 * static_cast<double>(n) * std::log2(total / target)));
  // Guard the ceiling against rounding in log2.
  while (rate > 0 && predict_distortion(total, 0.0, rate - 1, n) <= target) --rate;
  while (predict_distortion(total, 0.0, rate, n) > target) ++rate;
  return rate;
}

std::vector<RdEstimate> preselect(std::span<const double> x, std::span<const ParamVector> fits, double target,
                                  const ModelContext& ctx, const RdOptions& options) {
  if (options.delta_m < 1 || options.delta_nx < 1) {
    throw Error(ErrorCode::kInvalidArgument, "delta_m and delta_nx must be at least 1");
  }
  const std::size_t n = x.size();
  const int half = options.delta_nx / 2;
  std::vector<RdEstimate> out;
  for (const auto& fit : fits) {
    const ModelSpec& spec = ctx.effective(fit.model);
    const auto base = model_output(spec, fit.theta, ctx);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = x[i] - base[i];
    const auto gamma_m = autocorr_biased(r, static_cast<std::size_t>(options.model_order));
    const double sigma_m2 = innovation_variance(gamma_m, options.model_order);

    const auto lags = static_cast<std::size_t>(options.quant_order) + 1;
    const auto weights = allocation_weights(spec, ctx);

    RdEstimate est;
    est.model = fit.model;
    int best = -1;
    const int budget = kMaxBitsPerParam * spec.k_params;
    // The residual header makes the predicted total jump where n_r reaches
    // zero, so the whole range is scanned rather than stopping at the first
    // increase.
    for (int n_x = 0; n_x <= budget; ++n_x) {
      // The quantization error is the one this estimate actually incurs at
      // n_x, not its high-rate expectation. At low rates (and at n_x = 0 for
      // the parameter-predictive model, which repeats the previous window)
      // the expectation is far off.
      double sigma_q2 = 0.0;
      bool first_stage_enough = gamma_m[0] <= target;
      if (spec.k_params > 0) {
        const auto q = quantize(fit.theta, allocate_bits(weights, n_x), spec.prior);
        const auto coarse = model_output(spec, q.theta_q, ctx);
        std::vector<double> e(n);
        for (std::size_t i = 0; i < n; ++i) e[i] = base[i] - coarse[i];
        sigma_q2 = innovation_variance(autocorr_biased(e, lags - 1), options.quant_order);
        first_stage_enough = mse(x, coarse) <= target;
      }
      // Without residual bits nothing is decorrelated: the first stage alone
      // must meet the target.
      int n_r = 0;
      if (!first_stage_enough) n_r = std::max(1, required_rate(sigma_m2, sigma_q2, target, n));
      const int total = header_bits(spec.k_params, n_r > 0) + n_x + n_r;
      if (best >= 0 && total >= best) continue;
      best = total;
      est.n_x = n_x;
      est.n_r = n_r;
      est.header_bits = header_bits(spec.k_params, n_r > 0);
    }
    est.lo = std::max(0, est.n_x - half);
    est.hi = std::min(budget, est.n_x + half);
    out.push_back(est);
  }
  std::stable_sort(out.begin(), out.end(), [](const RdEstimate& a, const RdEstimate& b) {
    if (a.predicted_total() != b.predicted_total()) return a.predicted_total() < b.predicted_total();
    return a.model < b.model;
  });
  if (out.size() > static_cast<std::size_t>(options.delta_m)) out.resize(static_cast<std::size_t>(options.delta_m));
  return out;
}

std::vector<RdEstimate> preselect(std::span<const double> x, std::span<const int> models, double target,
                                  const ModelContext& ctx, const RdOptions& options) {
  std::vector<ParamVector> fits;
  for (int id : models) {
    if (!ctx.eligible(id)) continue;
    fits.push_back(estimate_params(ctx.effective(id), x, ctx));
  }
  return preselect(x, fits, target, ctx, options);
}

}  // namespace mmc
