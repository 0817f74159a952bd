#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mmc {

enum class ModelFamily { kBypass, kSinusoid, kPolynomial, kSamplePredictive, kParameterPredictive };

// Wire-level model identifiers (4-bit field).
inline constexpr int kBypassId = 0;
inline constexpr int kSinusoidId = 1;
inline constexpr int kPolynomialBaseId = 2;  // order o -> id 2 + o
inline constexpr int kMaxPolynomialOrder = 9;
inline constexpr int kSamplePredictive1Id = 12;
inline constexpr int kSamplePredictive2Id = 13;
inline constexpr int kParameterPredictiveId = 14;
inline constexpr int kModelCount = 15;
inline constexpr int kMaxPredictorOrder = 2;

constexpr int polynomial_id(int order) { return kPolynomialBaseId + order; }

struct PriorBox {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t size() const noexcept { return lower.size(); }
  double width(std::size_t k) const { return upper[k] - lower[k]; }
  double midpoint(std::size_t k) const { return 0.5 * (lower[k] + upper[k]); }
  static PriorBox symmetric(std::span<const double> widths);
  static PriorBox cube(std::size_t k, double half_width);
};

struct ModelSpec {
  int id = kBypassId;
  ModelFamily family = ModelFamily::kBypass;
  // Polynomial order, or predictor order for the sample predictive family.
  int order = 0;
  // Number of parameters. For ParameterPredictive this is only known once the
  // previous window's model is known; see ModelContext::effective().
  int k_params = 0;
  PriorBox prior;
  std::string name;
};

struct ParamVector {
  int model = kBypassId;
  std::vector<double> theta;
  // Set when the least-squares system was rank deficient and the minimum-norm
  // solution was used.
  bool rank_deficient = false;
};

// What a decoder knows about a channel after at least one window.
struct CodecState {
  // Last N + kMaxPredictorOrder - 1 reconstructed samples in volts, oldest
  // first; zero-padded before the start of the channel.
  std::vector<double> history;
  int selected_model = kBypassId;
  // Model actually evaluated by the previous window (ParameterPredictive is
  // resolved to the model it refined) and its quantized parameters, in the
  // previous window's scaled domain.
  int base_model = kBypassId;
  std::vector<double> base_params;
  int exponent = 0;
};

struct CatalogConfig {
  std::size_t window_size = 128;
  double sample_rate = 6400.0;
  std::array<double, 3> sinusoid_lower{0.5, 40.9, -3.14159265358979323846};
  std::array<double, 3> sinusoid_upper{1.0, 50.1, 3.14159265358979323846};
  double sample_predictive_half_width = 0.5;
  double parameter_predictive_half_width = 0.1;
  // polynomial_widths[o] holds the o + 1 prior widths of the order-o model.
  std::array<std::vector<double>, kMaxPolynomialOrder + 1> polynomial_widths;
};

CatalogConfig default_catalog_config();

class ModelCatalog {
 public:
  explicit ModelCatalog(CatalogConfig config = default_catalog_config());

  const ModelSpec& spec(int id) const;
  std::size_t window_size() const noexcept { return config_.window_size; }
  double sample_rate() const noexcept { return config_.sample_rate; }
  const CatalogConfig& config() const noexcept { return config_; }
  std::span<const ModelSpec> specs() const noexcept { return specs_; }

  // Chebyshev basis T_k(2n/N - 1), n = 1..N, as an N x (order+1) matrix, and
  // its pseudo-inverse.
  const Eigen::MatrixXd& polynomial_basis(int order) const { return poly_basis_[order]; }
  const Eigen::MatrixXd& polynomial_pinv(int order) const { return poly_pinv_[order]; }
  bool polynomial_rank_deficient(int order) const { return poly_rank_deficient_[order]; }

  // Hash of every parameter that changes decoded output; stored in containers.
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

 private:
  CatalogConfig config_;
  std::vector<ModelSpec> specs_;
  std::array<Eigen::MatrixXd, kMaxPolynomialOrder + 1> poly_basis_;
  std::array<Eigen::MatrixXd, kMaxPolynomialOrder + 1> poly_pinv_;
  std::array<bool, kMaxPolynomialOrder + 1> poly_rank_deficient_{};
  std::uint64_t fingerprint_ = 0;
};

// Per-window view of the catalog: resolves the predictive families against
// the channel state and the current window's scaling exponent.
class ModelContext {
 public:
  ModelContext(const ModelCatalog& catalog, int exponent, const CodecState* state);

  const ModelCatalog& catalog() const noexcept { return *catalog_; }
  std::size_t size() const noexcept { return catalog_->window_size(); }
  double sample_period() const noexcept { return 1.0 / catalog_->sample_rate(); }
  int exponent() const noexcept { return exponent_; }
  bool has_state() const noexcept { return state_ != nullptr; }
  const CodecState* state() const noexcept { return state_; }

  bool eligible(int id) const;
  // The spec with k_params and prior filled in for this window. Throws
  // kMissingState for predictive families without usable state.
  const ModelSpec& effective(int id) const;

  // Previous reconstruction mapped into the current scaled domain; entry j
  // holds the sample at offset j - (kMaxPredictorOrder - 1) from the start of
  // the previous window.
  std::span<const double> lagged() const;
  // ParameterPredictive reference: the model it refines and that model's
  // previous quantized parameters expressed in the current scaled domain.
  const ModelSpec& base_spec() const;
  std::span<const double> base_params() const;

 private:
  const ModelCatalog* catalog_;
  int exponent_;
  const CodecState* state_;
  std::vector<double> lagged_;
  std::vector<double> base_params_;
  std::optional<ModelSpec> parameter_predictive_;
};

double chebyshev(int k, double t);

std::vector<double> model_output(const ModelSpec& spec, std::span<const double> theta,
                                 const ModelContext& ctx);

ParamVector estimate_params(const ModelSpec& spec, std::span<const double> x,
                            const ModelContext& ctx);

// d x_n / d theta_k at theta, k zero-based.
std::vector<double> sensitivity(const ModelSpec& spec, std::span<const double> theta, int k,
                                const ModelContext& ctx);

// Expected squared sensitivity norm used for bit allocation. Depends only on
// the spec (and, for ParameterPredictive, the refined model), never on the
// window being coded.
double h_scalar(const ModelSpec& spec, int k, const ModelContext& ctx);

// (1/N) sum_{n=lag+1}^{N} s_n s_{n-lag} for the sensitivity s of parameter k at
// theta. Uses closed forms for the sinusoid amplitude and phase.
double h_autocorr(const ModelSpec& spec, std::span<const double> theta, int k, std::size_t lag,
                  const ModelContext& ctx);

// Width of the central `coverage` mass of each Chebyshev coefficient for an
// order-`order` fit over the given scaled windows.
std::vector<double> estimate_polynomial_widths(std::span<const std::vector<double>> windows,
                                               int order, double coverage);

}  // namespace mmc
