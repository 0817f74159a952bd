#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "mmc/error.hpp"
#include "mmc/models.hpp"
#include "mmc/quantization.hpp"

using namespace mmc;

namespace {

const ModelCatalog& catalog() {
  static const ModelCatalog c;
  return c;
}

std::vector<double> sinusoid(double a, double f, double phi, std::size_t n, double fs) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a * std::cos(2 * std::numbers::pi * f / fs * static_cast<double>(i + 1) + phi);
  return x;
}

CodecState state_with(const std::vector<double>& previous, int base_model, std::vector<double> base_params) {
  CodecState s;
  s.history.assign(1, 0.0);
  s.history.insert(s.history.end(), previous.begin(), previous.end());
  s.base_model = base_model;
  s.selected_model = base_model;
  s.base_params = std::move(base_params);
  s.exponent = 0;
  return s;
}

}  // namespace

TEST(Catalog, IdsAndParameterCounts) {
  const auto& c = catalog();
  EXPECT_EQ(c.spec(kBypassId).k_params, 0);
  EXPECT_EQ(c.spec(kSinusoidId).k_params, 3);
  for (int o = 0; o <= kMaxPolynomialOrder; ++o) EXPECT_EQ(c.spec(polynomial_id(o)).k_params, o + 1);
  EXPECT_EQ(c.spec(kSamplePredictive1Id).k_params, 1);
  EXPECT_EQ(c.spec(kSamplePredictive2Id).k_params, 2);
  EXPECT_THROW(c.spec(15), Error);
}

TEST(Catalog, FingerprintTracksPriors) {
  CatalogConfig cfg = default_catalog_config();
  const std::uint64_t base = ModelCatalog(cfg).fingerprint();
  EXPECT_EQ(ModelCatalog(cfg).fingerprint(), base);
  cfg.parameter_predictive_half_width = 0.2;
  EXPECT_NE(ModelCatalog(cfg).fingerprint(), base);
}

TEST(Chebyshev, MatchesTrigonometricDefinition) {
  for (int k = 0; k <= 9; ++k) {
    for (double t = -1.0; t <= 1.0; t += 0.125) EXPECT_NEAR(chebyshev(k, t), std::cos(k * std::acos(t)), 1e-12);
  }
}

TEST(Polynomial, ExactFitIsRecovered) {
  const ModelContext ctx(catalog(), 0, nullptr);
  const ModelSpec& spec = catalog().spec(polynomial_id(3));
  const std::vector<double> theta{0.1, -0.3, 0.2, 0.05};
  const auto x = model_output(spec, theta, ctx);
  const auto fit = estimate_params(spec, x, ctx);
  ASSERT_EQ(fit.theta.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(fit.theta[k], theta[k], 1e-10);
  // Basis uses t = 2n/N - 1 with n = 1..N.
  const double t = 2.0 * 5.0 / 128.0 - 1.0;
  EXPECT_NEAR(x[4], 0.1 - 0.3 * t + 0.2 * (2 * t * t - 1) + 0.05 * (4 * t * t * t - 3 * t), 1e-14);
}

TEST(Sinusoid, EstimatesCleanTone) {
  const ModelContext ctx(catalog(), 0, nullptr);
  const ModelSpec& spec = catalog().spec(kSinusoidId);
  const auto x = sinusoid(0.8, 49.7, 0.4, 128, 6400.0);
  const auto fit = estimate_params(spec, x, ctx);
  EXPECT_NEAR(fit.theta[0], 0.8, 1e-6);
  EXPECT_NEAR(fit.theta[1], 49.7, 1e-5);
  EXPECT_NEAR(fit.theta[2], 0.4, 1e-5);
}

TEST(Sinusoid, SensitivityMatchesFiniteDifference) {
  const ModelContext ctx(catalog(), 0, nullptr);
  const ModelSpec& spec = catalog().spec(kSinusoidId);
  const std::vector<double> theta{0.7, 48.3, -1.1};
  for (int k = 0; k < 3; ++k) {
    const auto s = sensitivity(spec, theta, k, ctx);
    auto hi = theta, lo = theta;
    const double h = 1e-6;
    hi[static_cast<std::size_t>(k)] += h;
    lo[static_cast<std::size_t>(k)] -= h;
    const auto xh = model_output(spec, hi, ctx), xl = model_output(spec, lo, ctx);
    for (std::size_t i = 0; i < s.size(); i += 7) EXPECT_NEAR(s[i], (xh[i] - xl[i]) / (2 * h), 1e-5) << k << ' ' << i;
  }
}

TEST(Sensitivity, ScalarsForLinearModels) {
  const ModelContext ctx(catalog(), 0, nullptr);
  const ModelSpec& poly = catalog().spec(polynomial_id(2));
  for (int k = 0; k < 3; ++k) {
    double norm = 0;
    for (std::size_t i = 1; i <= 128; ++i) norm += std::pow(chebyshev(k, 2.0 * static_cast<double>(i) / 128 - 1), 2);
    EXPECT_NEAR(h_scalar(poly, k, ctx), norm / 128, 1e-12);
  }
  EXPECT_DOUBLE_EQ(h_scalar(catalog().spec(kSinusoidId), 0, ctx), 0.5);
  EXPECT_THROW(h_scalar(catalog().spec(kBypassId), 0, ctx), Error);
}

TEST(Predictive, NeedStateToBeEligible) {
  const ModelContext ctx(catalog(), 0, nullptr);
  EXPECT_FALSE(ctx.eligible(kSamplePredictive1Id));
  EXPECT_FALSE(ctx.eligible(kParameterPredictiveId));
  try {
    ctx.effective(kParameterPredictiveId);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingState);
  }
}

TEST(Predictive, SamplePredictorRepeatsPreviousWindow) {
  const auto prev = sinusoid(0.6, 50.0, 0.0, 128, 6400.0);
  const CodecState st = state_with(prev, kSinusoidId, {0.6, 50.0, 0.0});
  const ModelContext ctx(catalog(), 0, &st);
  ASSERT_TRUE(ctx.eligible(kSamplePredictive1Id));
  const auto out = model_output(ctx.effective(kSamplePredictive1Id), std::vector<double>{0.5}, ctx);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_DOUBLE_EQ(out[i], 0.5 * prev[i]);
}

TEST(Predictive, ParameterDeltaRefinesBaseWithRescale) {
  const auto prev = sinusoid(0.6, 50.0, 0.2, 128, 6400.0);
  CodecState st = state_with(prev, kSinusoidId, {0.6, 50.0, 0.2});
  st.exponent = 3;
  // Current window is scaled one binary step less, so amplitudes double.
  const ModelContext ctx(catalog(), 2, &st);
  const ModelSpec& pp = ctx.effective(kParameterPredictiveId);
  EXPECT_EQ(pp.k_params, 3);
  EXPECT_NEAR(ctx.base_params()[0], 1.2, 1e-15);
  const auto out = model_output(pp, std::vector<double>{0.0, 0.0, 0.0}, ctx);
  const auto want = sinusoid(1.2, 50.0, 0.2, 128, 6400.0);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out[i], want[i], 1e-12);
}

TEST(Priors, PolynomialWidthsFromKnownCoefficients) {
  // Windows that are exact order-1 polynomials with c1 uniform in [-1, 1]:
  // 90% of |c1| lies below 0.9, so the width is 1.8.
  const ModelContext ctx(catalog(), 0, nullptr);
  const ModelSpec& spec = catalog().spec(polynomial_id(1));
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> windows;
  for (int i = 0; i < 4000; ++i) windows.push_back(model_output(spec, std::vector<double>{0.0, u(rng)}, ctx));
  const auto widths = estimate_polynomial_widths(windows, 1, 0.9);
  ASSERT_EQ(widths.size(), 2u);
  EXPECT_NEAR(widths[1], 1.8, 0.05);
  EXPECT_LT(widths[0], 1e-9);
}

TEST(HighRate, ConstantsForUniformAndGaussian) {
  EXPECT_DOUBLE_EQ(c_squared({PriorMarginal::Kind::kUniform, 2.0, 0.0}), 4.0 / 12.0);
  EXPECT_DOUBLE_EQ(c_squared({PriorMarginal::Kind::kGaussian, 0.0, 2.0}), std::sqrt(3.0) * std::numbers::pi);
  try {
    c_squared({PriorMarginal::Kind::kOther, 0.0, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedPrior);
  }
}

TEST(Allocation, SumsToBudgetAndRespectsCap) {
  const std::vector<double> w{1.0, 1e-3, 0.5, 1e-6};
  for (int n_x = 0; n_x <= 48; ++n_x) {
    const auto a = allocate_bits(w, n_x);
    int sum = 0;
    for (int b : a.bits) {
      EXPECT_GE(b, 0);
      EXPECT_LE(b, kMaxBitsPerParam);
      sum += b;
    }
    EXPECT_EQ(sum, n_x);
  }
  try {
    allocate_bits(w, 49);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetOverflow);
  }
}

TEST(Allocation, WaterFillingEqualizesActiveComponents) {
  const std::vector<double> w{4.0, 1.0, 1e-9};
  const auto n = water_fill(w, 6);
  EXPECT_NEAR(n[0] + n[1] + n[2], 6.0, 1e-12);
  EXPECT_NEAR(n[2], 0.0, 1e-12);
  // 4 * 2^(-2 n0) = 1 * 2^(-2 n1) with n0 + n1 = 6 gives n0 = 3.5.
  EXPECT_NEAR(n[0], 3.5, 1e-12);
}

TEST(Quantizer, MidpointCellsAndErrorBound) {
  const PriorBox box = PriorBox::symmetric(std::vector<double>{2.0, 0.5});
  BitAllocation alloc{{3, 0}, 3};
  const auto q = quantize(std::vector<double>{0.3, 0.2}, alloc, box);
  // Cell width 2 / 8 = 0.25; 0.3 lies in [0.25, 0.5).
  EXPECT_EQ(q.levels[0], 5u);
  EXPECT_DOUBLE_EQ(q.theta_q[0], 0.375);
  EXPECT_DOUBLE_EQ(q.theta_q[1], 0.0);
  // Values outside the box go to the edge cells.
  const auto edge = quantize(std::vector<double>{5.0, -5.0}, alloc, box);
  EXPECT_EQ(edge.levels[0], 7u);
  EXPECT_EQ(edge.levels[1], 0u);
  EXPECT_EQ(dequantize(q.levels, alloc, box), q.theta_q);
}

TEST(Quantizer, OutputErrorIsDifferenceOfOutputs) {
  const ModelContext ctx(catalog(), 0, nullptr);
  const ModelSpec& spec = catalog().spec(kSinusoidId);
  const std::vector<double> theta{0.8, 49.2, 0.3};
  const auto q = quantize(theta, allocate_bits(spec, 20, ctx), spec.prior);
  const auto e = quantization_output_error(spec, theta, q, ctx);
  const auto a = model_output(spec, theta, ctx), b = model_output(spec, q.theta_q, ctx);
  for (std::size_t i = 0; i < e.size(); ++i) EXPECT_DOUBLE_EQ(e[i], a[i] - b[i]);
}

TEST(Quantizer, AllocationTableRoundTrip) {
  const auto table = build_allocation_table(catalog());
  EXPECT_EQ(table.at({kSinusoidId, 0}), (std::vector<int>{0, 0, 0}));
  std::stringstream ss;
  write_allocation_table(ss, table);
  EXPECT_EQ(read_allocation_table(ss), table);
  std::istringstream bad("1 5 1 1 1\n");
  EXPECT_THROW(read_allocation_table(bad), Error);
}
