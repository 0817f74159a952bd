#include "mmc/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "mmc/error.hpp"

namespace mmc {

double c_squared(const PriorMarginal& marginal) {
  switch (marginal.kind) {
    case PriorMarginal::Kind::kUniform:
      if (!(marginal.width > 0)) throw Error(ErrorCode::kInvalidArgument, "uniform width must be positive");
      return marginal.width * marginal.width / 12.0;
    case PriorMarginal::Kind::kGaussian:
      if (!(marginal.variance > 0)) throw Error(ErrorCode::kInvalidArgument, "variance must be positive");
      return std::sqrt(3.0) * std::numbers::pi / 2.0 * marginal.variance;
    case PriorMarginal::Kind::kOther: break;
  }
  throw Error(ErrorCode::kUnsupportedPrior, "no high-rate constant for this prior");
}

std::vector<double> allocation_weights(const ModelSpec& spec, const ModelContext& ctx) {
  std::vector<double> w(static_cast<std::size_t>(spec.k_params));
  for (int k = 0; k < spec.k_params; ++k) {
    const PriorMarginal marginal{PriorMarginal::Kind::kUniform, spec.prior.width(static_cast<std::size_t>(k)), 0.0};
    w[static_cast<std::size_t>(k)] = h_scalar(spec, k, ctx) * c_squared(marginal);
  }
  return w;
}

std::vector<double> water_fill(std::span<const double> weights, int n_x) {
  const std::size_t k_total = weights.size();
  std::vector<double> n(k_total, 0.0);
  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < k_total; ++k) {
    if (weights[k] > 0) active.push_back(k);
  }
  double budget = n_x;
  while (!active.empty() && budget > 0) {
    std::stable_sort(active.begin(), active.end(),
                     [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
    // K' is the largest prefix of the sorted weights whose solution is >= 0.
    std::size_t kp = active.size();
    std::vector<double> sol;
    for (; kp > 0; --kp) {
      double mean_log = 0.0;
      for (std::size_t j = 0; j < kp; ++j) mean_log += std::log2(weights[active[j]]);
      mean_log /= static_cast<double>(kp);
      sol.assign(kp, 0.0);
      bool ok = true;
      for (std::size_t j = 0; j < kp; ++j) {
        sol[j] = budget / static_cast<double>(kp) + 0.5 * (std::log2(weights[active[j]]) - mean_log);
        if (sol[j] < 0) ok = false;
      }
      if (ok) break;
    }
    bool capped = false;
    std::vector<std::size_t> still_active;
    for (std::size_t j = 0; j < kp; ++j) {
      if (sol[j] > kMaxBitsPerParam) {
        n[active[j]] = kMaxBitsPerParam;
        budget -= kMaxBitsPerParam;
        capped = true;
      } else {
        still_active.push_back(active[j]);
      }
    }
    if (!capped) {
      for (std::size_t j = 0; j < kp; ++j) n[active[j]] = sol[j];
      break;
    }
    // Capped components keep 12 bits; the rest are re-solved with the
    // remaining budget (including those pruned from K').
    for (std::size_t j = kp; j < active.size(); ++j) still_active.push_back(active[j]);
    active = std::move(still_active);
  }
  return n;
}

BitAllocation allocate_bits(std::span<const double> weights, int n_x) {
  const int k_total = static_cast<int>(weights.size());
  if (n_x < 0) throw Error(ErrorCode::kInvalidArgument, "bit budget must be nonnegative");
  if (n_x > kMaxBitsPerParam * k_total) {
    throw Error(ErrorCode::kBudgetOverflow, "n_x = " + std::to_string(n_x) + " exceeds " +
                                                std::to_string(kMaxBitsPerParam) + " bits per parameter");
  }
  BitAllocation alloc;
  alloc.total = n_x;
  alloc.bits.assign(static_cast<std::size_t>(k_total), 0);
  if (k_total == 0) return alloc;

  const auto cont = water_fill(weights, n_x);
  int used = 0;
  for (int k = 0; k < k_total; ++k) {
    alloc.bits[static_cast<std::size_t>(k)] =
        std::clamp(static_cast<int>(std::floor(cont[static_cast<std::size_t>(k)] + 1e-9)), 0, kMaxBitsPerParam);
    used += alloc.bits[static_cast<std::size_t>(k)];
  }
  // Floating-point slack in the continuous solution can overshoot by a bit.
  while (used > n_x) {
    int worst = -1;
    double worst_loss = 0;
    for (int k = 0; k < k_total; ++k) {
      const int b = alloc.bits[static_cast<std::size_t>(k)];
      if (b == 0) continue;
      const double loss = weights[static_cast<std::size_t>(k)] * 3.0 * std::ldexp(1.0, -2 * b);
      if (worst < 0 || loss < worst_loss) { worst = k; worst_loss = loss; }
    }
    --alloc.bits[static_cast<std::size_t>(worst)];
    --used;
  }
  while (used < n_x) {
    int best = -1;
    double best_gain = -1;
    for (int k = 0; k < k_total; ++k) {
      const int b = alloc.bits[static_cast<std::size_t>(k)];
      if (b >= kMaxBitsPerParam) continue;
      const double gain = weights[static_cast<std::size_t>(k)] * 0.75 * std::ldexp(1.0, -2 * b);
      if (gain > best_gain) { best = k; best_gain = gain; }
    }
    ++alloc.bits[static_cast<std::size_t>(best)];
    ++used;
  }
  return alloc;
}

BitAllocation allocate_bits(const ModelSpec& spec, int n_x, const ModelContext& ctx) {
  if (spec.k_params == 0) return allocate_bits(std::span<const double>{}, n_x);
  return allocate_bits(allocation_weights(spec, ctx), n_x);
}

double predicted_distortion(std::span<const double> weights, const BitAllocation& alloc) {
  double d = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) d += weights[k] * std::ldexp(1.0, -2 * alloc.bits[k]);
  return d;
}

namespace {

double reconstruct_level(std::uint32_t level, int bits, double lo, double hi) {
  const double cell = std::ldexp(hi - lo, -bits);
  return lo + (static_cast<double>(level) + 0.5) * cell;
}

}  // namespace

QuantizedParams quantize(std::span<const double> theta, const BitAllocation& alloc, const PriorBox& prior) {
  if (theta.size() != alloc.bits.size() || theta.size() != prior.size()) {
    throw Error(ErrorCode::kLengthMismatch, "parameter, allocation and prior sizes differ");
  }
  QuantizedParams q;
  q.allocation = alloc;
  q.levels.resize(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const int bits = alloc.bits[k];
    const double lo = prior.lower[k], hi = prior.upper[k];
    const double cells = std::ldexp(1.0, bits);
    const double pos = std::floor((theta[k] - lo) / (hi - lo) * cells);
    q.levels[k] = static_cast<std::uint32_t>(std::clamp(pos, 0.0, cells - 1.0));
  }
  q.theta_q = dequantize(q.levels, alloc, prior);
  return q;
}

std::vector<double> dequantize(std::span<const std::uint32_t> levels, const BitAllocation& alloc,
                               const PriorBox& prior) {
  if (levels.size() != alloc.bits.size() || levels.size() != prior.size()) {
    throw Error(ErrorCode::kLengthMismatch, "level, allocation and prior sizes differ");
  }
  std::vector<double> theta(levels.size());
  for (std::size_t k = 0; k < levels.size(); ++k) {
    theta[k] = reconstruct_level(levels[k], alloc.bits[k], prior.lower[k], prior.upper[k]);
  }
  return theta;
}

std::vector<double> quantization_output_error(const ModelSpec& spec, std::span<const double> theta,
                                              const QuantizedParams& q, const ModelContext& ctx) {
  auto exact = model_output(spec, theta, ctx);
  const auto coarse = model_output(spec, q.theta_q, ctx);
  for (std::size_t i = 0; i < exact.size(); ++i) exact[i] -= coarse[i];
  return exact;
}

AllocationTable build_allocation_table(const ModelCatalog& catalog) {
  AllocationTable table;
  const ModelContext ctx(catalog, 0, nullptr);
  auto add_rows = [&](int key, std::span<const double> weights) {
    const int k_total = static_cast<int>(weights.size());
    for (int n_x = 0; n_x <= kMaxBitsPerParam * k_total; ++n_x) {
      table[{key, n_x}] = allocate_bits(weights, n_x).bits;
    }
  };
  for (int id = 0; id < kParameterPredictiveId; ++id) {
    const ModelSpec& spec = catalog.spec(id);
    add_rows(id, spec.k_params ? allocation_weights(spec, ctx) : std::vector<double>{});
  }
  // Parameter-predictive rows per refined model: same sensitivities, delta box.
  const double delta_width = 2.0 * catalog.config().parameter_predictive_half_width;
  for (int base = 1; base < kParameterPredictiveId; ++base) {
    const ModelSpec& spec = catalog.spec(base);
    std::vector<double> w;
    for (int k = 0; k < spec.k_params; ++k) {
      w.push_back(h_scalar(spec, k, ctx) * c_squared({PriorMarginal::Kind::kUniform, delta_width, 0.0}));
    }
    add_rows(100 * kParameterPredictiveId + base, w);
  }
  return table;
}

void write_allocation_table(std::ostream& os, const AllocationTable& table) {
  os << "# model n_x n_1 ... n_K\n";
  for (const auto& [key, bits] : table) {
    os << key.first << ' ' << key.second;
    for (int b : bits) os << ' ' << b;
    os << '\n';
  }
}

AllocationTable read_allocation_table(std::istream& is) {
  AllocationTable table;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    int model = 0, n_x = 0;
    if (!(row >> model >> n_x)) throw Error(ErrorCode::kInvalidArgument, "malformed allocation row: " + line);
    std::vector<int> bits;
    for (int b; row >> b;) bits.push_back(b);
    if (std::accumulate(bits.begin(), bits.end(), 0) != n_x) {
      throw Error(ErrorCode::kInvalidArgument, "allocation row does not sum to n_x: " + line);
    }
    table[{model, n_x}] = std::move(bits);
  }
  return table;
}

}  // namespace mmc
