#include "mmc/models.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <numbers>

#include "mmc/error.hpp"

namespace mmc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Frequency grid for the sinusoid estimator, in Hz.
constexpr double kSinusoidGridStep = 0.05;
constexpr int kGaussNewtonIterations = 8;

double clip(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

double wrap_phase(double phi) {
  phi = std::remainder(phi, kTwoPi);
  return clip(phi, -std::numbers::pi, std::numbers::pi);
}

void clip_to_box(std::vector<double>& theta, const PriorBox& box) {
  for (std::size_t k = 0; k < theta.size(); ++k) theta[k] = clip(theta[k], box.lower[k], box.upper[k]);
}

Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                    bool& rank_deficient) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  rank_deficient = cod.rank() < a.cols();
  return cod.solve(b);
}

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> x) {
  return {x.data(), static_cast<Eigen::Index>(x.size())};
}

void fnv_mix(std::uint64_t& h, double v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof bits);
  for (int i = 0; i < 8; ++i) {
    h ^= (bits >> (8 * i)) & 0xFFu;
    h *= 0x100000001B3ull;
  }
}

// Parameters whose meaning scales with the signal amplitude.
bool is_amplitude_param(const ModelSpec& spec, std::size_t k) {
  switch (spec.family) {
    case ModelFamily::kSinusoid: return k == 0;
    case ModelFamily::kPolynomial: return true;
    default: return false;
  }
}

// ---- sinusoid -------------------------------------------------------------

struct SinusoidFit {
  double alpha = 0.0;  // a cos(phi)
  double beta = 0.0;   // -a sin(phi)
  double residual = 0.0;
};

// Linear LS of x on (cos(wn), sin(wn)), n = 1..N, for a fixed frequency.
SinusoidFit fit_fixed_frequency(std::span<const double> x, double omega, double energy) {
  const std::complex<double> step(std::cos(omega), std::sin(omega));
  std::complex<double> z = step;
  double scc = 0, sss = 0, scs = 0, sxc = 0, sxs = 0;
  for (double v : x) {
    const double c = z.real(), s = z.imag();
    scc += c * c;
    sss += s * s;
    scs += c * s;
    sxc += v * c;
    sxs += v * s;
    z *= step;
  }
  SinusoidFit fit;
  const double det = scc * sss - scs * scs;
  if (std::abs(det) < 1e-300) return SinusoidFit{0.0, 0.0, energy};
  fit.alpha = (sxc * sss - sxs * scs) / det;
  fit.beta = (sxs * scc - sxc * scs) / det;
  fit.residual = energy - (fit.alpha * sxc + fit.beta * sxs);
  return fit;
}

double sum_squares(std::span<const double> x) {
  double e = 0;
  for (double v : x) e += v * v;
  return e;
}

double residual_energy(std::span<const double> x, std::span<const double> model) {
  double e = 0;
  for (std::size_t i = 0; i < x.size(); ++i) e += (x[i] - model[i]) * (x[i] - model[i]);
  return e;
}

// Gauss-Newton on theta for a model with analytic sensitivities. Steps that do
// not lower the residual are halved; the best iterate is returned.
std::vector<double> gauss_newton(const ModelSpec& spec, std::vector<double> theta,
                                 std::span<const double> x, const ModelContext& ctx,
                                 const std::vector<double>& offset) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto k = static_cast<Eigen::Index>(theta.size());
  auto evaluate = [&](const std::vector<double>& t) {
    std::vector<double> full(t);
    for (std::size_t i = 0; i < full.size() && i < offset.size(); ++i) full[i] += offset[i];
    return full;
  };
  std::vector<double> full = evaluate(theta);
  double best = residual_energy(x, model_output(spec, full, ctx));
  for (int it = 0; it < kGaussNewtonIterations; ++it) {
    Eigen::MatrixXd jac(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
      const auto s = sensitivity(spec, full, static_cast<int>(j), ctx);
      jac.col(j) = as_vector(s);
    }
    const auto out = model_output(spec, full, ctx);
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) r[i] = x[static_cast<std::size_t>(i)] - out[static_cast<std::size_t>(i)];
    bool deficient = false;
    const Eigen::VectorXd step = solve_least_squares(jac, r, deficient);
    double scale = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 6; ++halving, scale *= 0.5) {
      std::vector<double> trial(theta);
      for (Eigen::Index j = 0; j < k; ++j) trial[static_cast<std::size_t>(j)] += scale * step[j];
      const auto trial_full = evaluate(trial);
      const double e = residual_energy(x, model_output(spec, trial_full, ctx));
      if (e < best) {
        best = e;
        theta = std::move(trial);
        full = trial_full;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return theta;
}

std::vector<double> estimate_sinusoid(const ModelSpec& spec, std::span<const double> x,
                                      const ModelContext& ctx) {
  const double ts = ctx.sample_period();
  const double f_lo = spec.prior.lower[1], f_hi = spec.prior.upper[1];
  const double energy = sum_squares(x);
  const int steps = std::max(1, static_cast<int>(std::lround((f_hi - f_lo) / kSinusoidGridStep)));
  std::vector<double> residuals(static_cast<std::size_t>(steps) + 1);
  int best = 0;
  for (int j = 0; j <= steps; ++j) {
    const double f = f_lo + (f_hi - f_lo) * j / steps;
    residuals[static_cast<std::size_t>(j)] = fit_fixed_frequency(x, kTwoPi * f * ts, energy).residual;
    if (residuals[static_cast<std::size_t>(j)] < residuals[static_cast<std::size_t>(best)]) best = j;
  }
  const double grid = (f_hi - f_lo) / steps;
  double f = f_lo + grid * best;
  if (best > 0 && best < steps) {
    const double r0 = residuals[static_cast<std::size_t>(best - 1)];
    const double r1 = residuals[static_cast<std::size_t>(best)];
    const double r2 = residuals[static_cast<std::size_t>(best + 1)];
    const double denom = r0 - 2.0 * r1 + r2;
    if (denom > 0) f += grid * 0.5 * (r0 - r2) / denom;
  }
  SinusoidFit lin = fit_fixed_frequency(x, kTwoPi * f * ts, energy);
  std::vector<double> theta{std::hypot(lin.alpha, lin.beta), f, std::atan2(-lin.beta, lin.alpha)};
  if (theta[0] > 0) theta = gauss_newton(spec, theta, x, ctx, {});
  // Amplitude and phase are re-solved exactly at the clipped frequency.
  f = clip(theta[1], f_lo, f_hi);
  lin = fit_fixed_frequency(x, kTwoPi * f * ts, energy);
  const double a = std::hypot(lin.alpha, lin.beta);
  const double phi = a > 0 ? std::atan2(-lin.beta, lin.alpha) : 0.0;
  return {clip(a, spec.prior.lower[0], spec.prior.upper[0]), f, wrap_phase(phi)};
}

// ---- linear families -------------------------------------------------------

Eigen::MatrixXd sample_predictive_basis(int order, const ModelContext& ctx) {
  const auto lag = ctx.lagged();
  const std::size_t n = ctx.size();
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), order);
  for (int k = 1; k <= order; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      a(static_cast<Eigen::Index>(i), k - 1) = lag[i + kMaxPredictorOrder - k];
    }
  }
  return a;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

// ---- PriorBox / catalog ------------------------------------------------------

PriorBox PriorBox::symmetric(std::span<const double> widths) {
  PriorBox box;
  for (double w : widths) {
    box.lower.push_back(-0.5 * w);
    box.upper.push_back(0.5 * w);
  }
  return box;
}

PriorBox PriorBox::cube(std::size_t k, double half_width) {
  return PriorBox{std::vector<double>(k, -half_width), std::vector<double>(k, half_width)};
}

CatalogConfig default_catalog_config() {
  CatalogConfig cfg;
  // Widths holding 90% of each Chebyshev coefficient, from
  // estimate_polynomial_widths over 15000 scaled windows of the synthetic
  // corpus (all profiles, seeds 1001..1020, 50 windows per channel).
  static const double kWidths[kMaxPolynomialOrder + 1][kMaxPolynomialOrder + 1] = {
      {0.00108},
      {0.0102, 1.29},
      {0.509, 1.29, 1.53},
      {0.511, 0.701, 1.53, 0.978},
      {0.4, 0.7, 1.29, 0.978, 0.428},
      {0.399, 0.77, 1.28, 0.896, 0.429, 0.146},
      {0.408, 0.77, 1.3, 0.896, 0.407, 0.145, 0.0409},
      {0.409, 0.767, 1.3, 0.901, 0.407, 0.141, 0.041, 0.0361},
      {0.408, 0.767, 1.3, 0.899, 0.407, 0.142, 0.0398, 0.0356, 0.0319},
      {0.407, 0.767, 1.3, 0.9, 0.407, 0.141, 0.0397, 0.0243, 0.0324, 0.0228},
  };
  for (int o = 0; o <= kMaxPolynomialOrder; ++o) {
    cfg.polynomial_widths[o].assign(kWidths[o], kWidths[o] + o + 1);
  }
  return cfg;
}

ModelCatalog::ModelCatalog(CatalogConfig config) : config_(std::move(config)) {
  if (config_.window_size < 2) throw Error(ErrorCode::kInvalidArgument, "window size must be at least 2");
  if (!(config_.sample_rate > 0)) throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");

  specs_.resize(kModelCount);
  specs_[kBypassId] = ModelSpec{kBypassId, ModelFamily::kBypass, 0, 0, {}, "bypass"};
  specs_[kSinusoidId] = ModelSpec{
      kSinusoidId, ModelFamily::kSinusoid, 0, 3,
      PriorBox{{config_.sinusoid_lower.begin(), config_.sinusoid_lower.end()},
               {config_.sinusoid_upper.begin(), config_.sinusoid_upper.end()}},
      "sinusoid"};
  for (int o = 0; o <= kMaxPolynomialOrder; ++o) {
    const auto& w = config_.polynomial_widths[o];
    if (w.size() != static_cast<std::size_t>(o + 1)) {
      throw Error(ErrorCode::kInvalidArgument, "polynomial order " + std::to_string(o) + " needs " +
                                                   std::to_string(o + 1) + " prior widths");
    }
    specs_[polynomial_id(o)] = ModelSpec{polynomial_id(o), ModelFamily::kPolynomial, o, o + 1,
                                         PriorBox::symmetric(w), "poly" + std::to_string(o)};
  }
  for (int k = 1; k <= kMaxPredictorOrder; ++k) {
    const int id = k == 1 ? kSamplePredictive1Id : kSamplePredictive2Id;
    specs_[id] = ModelSpec{id, ModelFamily::kSamplePredictive, k, k,
                           PriorBox::cube(static_cast<std::size_t>(k), config_.sample_predictive_half_width),
                           "sample_pred" + std::to_string(k)};
  }
  specs_[kParameterPredictiveId] =
      ModelSpec{kParameterPredictiveId, ModelFamily::kParameterPredictive, 0, 0, {}, "param_pred"};

  for (const auto& s : specs_) {
    for (std::size_t k = 0; k < s.prior.size(); ++k) {
      if (!(s.prior.lower[k] < s.prior.upper[k])) {
        throw Error(ErrorCode::kInvalidArgument, "empty prior interval for model " + s.name);
      }
    }
  }

  const auto n = static_cast<Eigen::Index>(config_.window_size);
  for (int o = 0; o <= kMaxPolynomialOrder; ++o) {
    Eigen::MatrixXd basis(n, o + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = 2.0 * static_cast<double>(i + 1) / static_cast<double>(n) - 1.0;
      for (int k = 0; k <= o; ++k) basis(i, k) = chebyshev(k, t);
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(basis);
    poly_rank_deficient_[o] = cod.rank() < basis.cols();
    poly_pinv_[o] = cod.pseudoInverse();
    poly_basis_[o] = std::move(basis);
  }

  std::uint64_t h = 0xCBF29CE484222325ull;
  fnv_mix(h, static_cast<double>(config_.window_size));
  fnv_mix(h, config_.sample_rate);
  for (const auto& s : specs_) {
    for (std::size_t k = 0; k < s.prior.size(); ++k) {
      fnv_mix(h, s.prior.lower[k]);
      fnv_mix(h, s.prior.upper[k]);
    }
  }
  fnv_mix(h, config_.parameter_predictive_half_width);
  fingerprint_ = h;
}

const ModelSpec& ModelCatalog::spec(int id) const {
  if (id < 0 || id >= kModelCount) {
    throw Error(ErrorCode::kReservedModel, "model id " + std::to_string(id) + " is not assigned");
  }
  return specs_[static_cast<std::size_t>(id)];
}

// ---- ModelContext -------------------------------------------------------------

ModelContext::ModelContext(const ModelCatalog& catalog, int exponent, const CodecState* state)
    : catalog_(&catalog), exponent_(exponent), state_(state) {
  if (state_ == nullptr) return;
  const std::size_t need = catalog.window_size() + kMaxPredictorOrder - 1;
  if (state_->history.size() != need) {
    throw Error(ErrorCode::kInvalidArgument, "codec state history has the wrong length");
  }
  lagged_.resize(need);
  for (std::size_t i = 0; i < need; ++i) lagged_[i] = std::ldexp(state_->history[i], -exponent_);

  if (state_->base_model == kBypassId || state_->base_model == kParameterPredictiveId) return;
  const ModelSpec& base = catalog.spec(state_->base_model);
  if (state_->base_params.size() != static_cast<std::size_t>(base.k_params)) {
    throw Error(ErrorCode::kInvalidArgument, "codec state parameters do not match the base model");
  }
  base_params_ = state_->base_params;
  for (std::size_t k = 0; k < base_params_.size(); ++k) {
    if (is_amplitude_param(base, k)) {
      base_params_[k] = std::ldexp(base_params_[k], state_->exponent - exponent_);
    }
  }
  ModelSpec pp = catalog.spec(kParameterPredictiveId);
  pp.k_params = base.k_params;
  pp.order = base.id;
  pp.prior = PriorBox::cube(static_cast<std::size_t>(base.k_params),
                            catalog.config().parameter_predictive_half_width);
  parameter_predictive_ = std::move(pp);
}

bool ModelContext::eligible(int id) const {
  const ModelSpec& s = catalog_->spec(id);
  switch (s.family) {
    case ModelFamily::kSamplePredictive: return state_ != nullptr;
    case ModelFamily::kParameterPredictive: return parameter_predictive_.has_value();
    default: return true;
  }
}

const ModelSpec& ModelContext::effective(int id) const {
  const ModelSpec& s = catalog_->spec(id);
  if (!eligible(id)) {
    throw Error(ErrorCode::kMissingState, "model " + s.name + " needs a previously coded window");
  }
  if (s.family == ModelFamily::kParameterPredictive) return *parameter_predictive_;
  return s;
}

std::span<const double> ModelContext::lagged() const {
  if (state_ == nullptr) throw Error(ErrorCode::kMissingState, "no previous reconstruction");
  return lagged_;
}

const ModelSpec& ModelContext::base_spec() const {
  if (!parameter_predictive_) throw Error(ErrorCode::kMissingState, "no parameter-predictive reference");
  return catalog_->spec(state_->base_model);
}

std::span<const double> ModelContext::base_params() const {
  if (!parameter_predictive_) throw Error(ErrorCode::kMissingState, "no parameter-predictive reference");
  return base_params_;
}

// ---- model operations -----------------------------------------------------

double chebyshev(int k, double t) {
  if (k == 0) return 1.0;
  double prev = 1.0, cur = t;
  for (int j = 1; j < k; ++j) {
    const double next = 2.0 * t * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

void check_theta(const ModelSpec& spec, std::span<const double> theta) {
  if (theta.size() != static_cast<std::size_t>(spec.k_params)) {
    throw Error(ErrorCode::kInvalidArgument, "model " + spec.name + " expects " +
                                                 std::to_string(spec.k_params) + " parameters");
  }
}

std::vector<double> shifted_params(const ModelContext& ctx, std::span<const double> delta) {
  const auto base = ctx.base_params();
  std::vector<double> full(base.begin(), base.end());
  for (std::size_t k = 0; k < full.size(); ++k) full[k] += delta[k];
  return full;
}

}  // namespace

std::vector<double> model_output(const ModelSpec& spec, std::span<const double> theta,
                                 const ModelContext& ctx) {
  check_theta(spec, theta);
  const std::size_t n = ctx.size();
  std::vector<double> out(n, 0.0);
  switch (spec.family) {
    case ModelFamily::kBypass: break;
    case ModelFamily::kSinusoid: {
      const double w = kTwoPi * theta[1] * ctx.sample_period();
      for (std::size_t i = 0; i < n; ++i) out[i] = theta[0] * std::cos(w * static_cast<double>(i + 1) + theta[2]);
      break;
    }
    case ModelFamily::kPolynomial: {
      const auto& basis = ctx.catalog().polynomial_basis(spec.order);
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = 0; k <= spec.order; ++k) acc += theta[static_cast<std::size_t>(k)] * basis(static_cast<Eigen::Index>(i), k);
        out[i] = acc;
      }
      break;
    }
    case ModelFamily::kSamplePredictive: {
      const auto lag = ctx.lagged();
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = 1; k <= spec.order; ++k) acc += theta[static_cast<std::size_t>(k - 1)] * lag[i + kMaxPredictorOrder - k];
        out[i] = acc;
      }
      break;
    }
    case ModelFamily::kParameterPredictive:
      return model_output(ctx.base_spec(), shifted_params(ctx, theta), ctx);
  }
  return out;
}

ParamVector estimate_params(const ModelSpec& spec, std::span<const double> x, const ModelContext& ctx) {
  if (x.size() != ctx.size()) throw Error(ErrorCode::kLengthMismatch, "window length does not match the catalog");
  ParamVector p;
  p.model = spec.id;
  switch (spec.family) {
    case ModelFamily::kBypass: break;
    case ModelFamily::kSinusoid: p.theta = estimate_sinusoid(spec, x, ctx); break;
    case ModelFamily::kPolynomial: {
      p.theta = to_std(ctx.catalog().polynomial_pinv(spec.order) * as_vector(x));
      p.rank_deficient = ctx.catalog().polynomial_rank_deficient(spec.order);
      break;
    }
    case ModelFamily::kSamplePredictive: {
      const Eigen::MatrixXd a = sample_predictive_basis(spec.order, ctx);
      p.theta = to_std(solve_least_squares(a, as_vector(x), p.rank_deficient));
      break;
    }
    case ModelFamily::kParameterPredictive: {
      const ModelSpec& base = ctx.base_spec();
      const auto base_theta = ctx.base_params();
      if (base.family == ModelFamily::kSinusoid) {
        std::vector<double> offset(base_theta.begin(), base_theta.end());
        p.theta = gauss_newton(base, std::vector<double>(offset.size(), 0.0), x, ctx, offset);
      } else {
        // Linear in the parameters: the delta solves LS on the residual of the
        // previous parameters, with the base sensitivities as columns.
        const auto prev = model_output(base, base_theta, ctx);
        Eigen::VectorXd target(static_cast<Eigen::Index>(x.size()));
        for (std::size_t i = 0; i < x.size(); ++i) target[static_cast<Eigen::Index>(i)] = x[i] - prev[i];
        if (base.family == ModelFamily::kPolynomial) {
          p.theta = to_std(ctx.catalog().polynomial_pinv(base.order) * target);
          p.rank_deficient = ctx.catalog().polynomial_rank_deficient(base.order);
        } else {
          p.theta = to_std(solve_least_squares(sample_predictive_basis(base.order, ctx), target, p.rank_deficient));
        }
      }
      break;
    }
  }
  clip_to_box(p.theta, spec.prior);
  if (spec.family == ModelFamily::kSinusoid) p.theta[2] = wrap_phase(p.theta[2]);
  return p;
}

std::vector<double> sensitivity(const ModelSpec& spec, std::span<const double> theta, int k,
                                const ModelContext& ctx) {
  if (spec.family == ModelFamily::kBypass) {
    throw Error(ErrorCode::kNoParameters, "the bypass model has no parameters");
  }
  check_theta(spec, theta);
  if (k < 0 || k >= spec.k_params) throw Error(ErrorCode::kInvalidArgument, "parameter index out of range");
  const std::size_t n = ctx.size();
  std::vector<double> out(n);
  switch (spec.family) {
    case ModelFamily::kSinusoid: {
      const double ts = ctx.sample_period();
      const double w = kTwoPi * theta[1] * ts;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i + 1);
        const double arg = w * t + theta[2];
        if (k == 0) out[i] = std::cos(arg);
        else if (k == 1) out[i] = -theta[0] * kTwoPi * t * ts * std::sin(arg);
        else out[i] = -theta[0] * std::sin(arg);
      }
      break;
    }
    case ModelFamily::kPolynomial: {
      const auto& basis = ctx.catalog().polynomial_basis(spec.order);
      for (std::size_t i = 0; i < n; ++i) out[i] = basis(static_cast<Eigen::Index>(i), k);
      break;
    }
    case ModelFamily::kSamplePredictive: {
      const auto lag = ctx.lagged();
      for (std::size_t i = 0; i < n; ++i) out[i] = lag[i + kMaxPredictorOrder - (k + 1)];
      break;
    }
    case ModelFamily::kParameterPredictive:
      return sensitivity(ctx.base_spec(), shifted_params(ctx, theta), k, ctx);
    case ModelFamily::kBypass: break;
  }
  return out;
}

double h_scalar(const ModelSpec& spec, int k, const ModelContext& ctx) {
  if (k < 0 || k >= spec.k_params) {
    if (spec.family == ModelFamily::kBypass) throw Error(ErrorCode::kNoParameters, "the bypass model has no parameters");
    throw Error(ErrorCode::kInvalidArgument, "parameter index out of range");
  }
  switch (spec.family) {
    case ModelFamily::kSinusoid: {
      const double lo = spec.prior.lower[0], hi = spec.prior.upper[0];
      const double mean_a2 = (lo * lo + lo * hi + hi * hi) / 3.0;
      if (k == 0) return 0.5;
      if (k == 1) {
        const double span = kTwoPi * static_cast<double>(ctx.size()) * ctx.sample_period();
        return mean_a2 * span * span / 6.0;
      }
      return mean_a2 / 2.0;
    }
    case ModelFamily::kPolynomial: {
      const auto& basis = ctx.catalog().polynomial_basis(spec.order);
      return basis.col(k).squaredNorm() / static_cast<double>(ctx.size());
    }
    case ModelFamily::kSamplePredictive:
      // Every tap sees the same previous-window energy; a unit-amplitude
      // sinusoid gives 1/2.
      return 0.5;
    case ModelFamily::kParameterPredictive: return h_scalar(ctx.base_spec(), k, ctx);
    case ModelFamily::kBypass: break;
  }
  throw Error(ErrorCode::kNoParameters, "the bypass model has no parameters");
}

double h_autocorr(const ModelSpec& spec, std::span<const double> theta, int k, std::size_t lag,
                  const ModelContext& ctx) {
  const std::size_t n = ctx.size();
  if (lag >= n) throw Error(ErrorCode::kInvalidArgument, "lag must be smaller than the window length");
  if (spec.family == ModelFamily::kParameterPredictive) {
    return h_autocorr(ctx.base_spec(), shifted_params(ctx, theta), k, lag, ctx);
  }
  if (spec.family == ModelFamily::kSinusoid && (k == 0 || k == 2)) {
    check_theta(spec, theta);
    const double w = kTwoPi * theta[1] * ctx.sample_period();
    const double sw = std::sin(w);
    if (std::abs(sw) > 1e-9) {
      const double nn = static_cast<double>(n);
      const double m = static_cast<double>(n - lag);
      const double oscill = std::cos(w * (nn + 1.0) + 2.0 * theta[2]) * std::sin(w * m) / sw;
      const double steady = m * std::cos(w * static_cast<double>(lag));
      if (k == 0) return (oscill + steady) / (2.0 * nn);
      return theta[0] * theta[0] * (steady - oscill) / (2.0 * nn);
    }
  }
  const auto s = sensitivity(spec, theta, k, ctx);
  double acc = 0.0;
  for (std::size_t i = lag; i < n; ++i) acc += s[i] * s[i - lag];
  return acc / static_cast<double>(n);
}

std::vector<double> estimate_polynomial_widths(std::span<const std::vector<double>> windows, int order,
                                               double coverage) {
  if (windows.empty()) throw Error(ErrorCode::kInvalidArgument, "no windows supplied");
  if (!(coverage > 0 && coverage <= 1)) throw Error(ErrorCode::kInvalidArgument, "coverage must be in (0, 1]");
  CatalogConfig cfg = default_catalog_config();
  cfg.window_size = windows.front().size();
  const ModelCatalog catalog(cfg);
  const auto& pinv = catalog.polynomial_pinv(order);
  std::vector<std::vector<double>> magnitudes(static_cast<std::size_t>(order + 1));
  for (const auto& w : windows) {
    if (w.size() != cfg.window_size) throw Error(ErrorCode::kLengthMismatch, "windows differ in length");
    const Eigen::VectorXd theta = pinv * as_vector(w);
    for (int k = 0; k <= order; ++k) magnitudes[static_cast<std::size_t>(k)].push_back(std::abs(theta[k]));
  }
  std::vector<double> widths;
  for (auto& m : magnitudes) {
    std::sort(m.begin(), m.end());
    const auto idx = static_cast<std::size_t>(std::ceil(coverage * static_cast<double>(m.size()))) - 1;
    widths.push_back(2.0 * m[std::min(idx, m.size() - 1)]);
  }
  return widths;
}

}  // namespace mmc
