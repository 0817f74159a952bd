#include "mmc/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "mmc/error.hpp"
#include "mmc/layout.hpp"
#include "mmc/signal.hpp"
#include "mmc/transforms.hpp"

namespace mmc {

std::vector<ResidualMethod> residual_methods(std::size_t n) {
  if (is_power_of_two(n) && n >= 2) return {ResidualMethod::kDctBpc, ResidualMethod::kDwtEzw};
  return {ResidualMethod::kDctBpc};
}

namespace {

struct Coding {
  int n_r = 0;
  ResidualMethod method = ResidualMethod::kDctBpc;
  bool reached = false;
  ResidualPlan plan;
};

// Smallest prefix over all residual coders; ties go to the lower method id.
Coding best_coding(std::span<const double> x, std::span<const double> base, double target, int planes,
                   int& calls) {
  Coding best;
  for (ResidualMethod method : residual_methods(x.size())) {
    ++calls;
    ResidualPlan plan = min_prefix_for_target(x, base, method, target, planes);
    if (!plan.reached || plan.n_r > static_cast<std::size_t>(kMaxResidualBits)) continue;
    const int n_r = static_cast<int>(plan.n_r);
    if (!best.reached || n_r < best.n_r) {
      best.n_r = n_r;
      best.method = method;
      best.reached = true;
      best.plan = std::move(plan);
    }
  }
  return best;
}

// Lexicographic order on (total, model, method, n_x).
bool better(const SearchResult& a, const SearchResult& b) {
  if (a.total != b.total) return a.total < b.total;
  if (a.model != b.model) return a.model < b.model;
  if (a.method != b.method) return a.method < b.method;
  return a.n_x < b.n_x;
}

class Searcher {
 public:
  Searcher(std::span<const double> x, double target, const ModelContext& ctx, const SearchOptions& options)
      : x_(x), target_(target), ctx_(ctx), options_(options) {
    if (x.size() != ctx.size()) throw Error(ErrorCode::kLengthMismatch, "window length does not match the catalog");
    if (!(target >= 0)) throw Error(ErrorCode::kInvalidArgument, "distortion target must be nonnegative");
  }

  SearchResult run() {
    start_from_second_stage_only();
    std::vector<int> ids = candidate_models();
    if (options_.preselect) {
      std::vector<ParamVector> fits;
      for (int id : ids) fits.push_back(fit(id));
      auto chosen = preselect(x_, fits, target_, ctx_, options_.rd);
      diag_.preselected = chosen;
      std::sort(chosen.begin(), chosen.end(),
                [](const RdEstimate& a, const RdEstimate& b) { return a.model < b.model; });
      for (const auto& est : chosen) {
        if (est.model == kBypassId) continue;
        const auto& f = *std::find_if(fits.begin(), fits.end(), [&](const ParamVector& p) { return p.model == est.model; });
        search_model(f, est.lo, est.hi);
      }
    } else {
      for (int id : ids) {
        if (id == kBypassId) continue;
        search_model(fit(id), 0, std::numeric_limits<int>::max());
      }
    }
    best_.diagnostics = diag_;
    return std::move(best_);
  }

 private:
  std::vector<int> candidate_models() const {
    std::vector<int> ids = options_.models;
    if (ids.empty()) {
      for (int id = 0; id < kModelCount; ++id) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::vector<int> out;
    for (int id : ids) {
      if (ctx_.eligible(id)) out.push_back(id);
    }
    return out;
  }

  ParamVector fit(int id) const { return estimate_params(ctx_.effective(id), x_, ctx_); }

  void start_from_second_stage_only() {
    const std::vector<double> zeros(x_.size(), 0.0);
    Coding c = best_coding(x_, zeros, target_, options_.planes, diag_.bound_calls);
    if (!c.reached) throw Error(ErrorCode::kUnreachableTarget, "distortion target is below coder precision");
    SearchResult r;
    r.model = kBypassId;
    r.method = c.method;
    r.n_r = c.n_r;
    r.header_bits = header_bits(0, c.n_r > 0);
    r.total = r.header_bits + r.n_r;
    r.distortion = c.plan.distortion;
    r.params.model = kBypassId;
    r.residual = std::move(c.plan.stream);
    r.reconstruction = reconstruct_with_residual(zeros, r.residual, r.residual.bits.size());
    diag_.n_max = c.n_r;
    best_ = std::move(r);
  }

  // Largest n_x that can still beat the incumbent for a model whose
  // unquantized residual needs n_min bits.
  int upper_bound(int k_params, int n_min) const {
    return best_.total - header_bits(k_params, n_min > 0) - n_min;
  }

  std::optional<SearchResult> evaluate(const ModelSpec& spec, const ParamVector& p, std::span<const double> weights,
                                       int n_x, int& calls) {
    SearchResult r;
    r.model = spec.id;
    r.n_x = n_x;
    r.k_params = spec.k_params;
    r.params = p;
    r.quantized = quantize(p.theta, allocate_bits(weights, n_x), spec.prior);
    const auto base = model_output(spec, r.quantized.theta_q, ctx_);
    Coding c = best_coding(x_, base, target_, options_.planes, calls);
    if (!c.reached) return std::nullopt;
    r.method = c.method;
    r.n_r = c.n_r;
    r.header_bits = header_bits(spec.k_params, c.n_r > 0);
    r.total = r.header_bits + n_x + c.n_r;
    r.distortion = c.plan.distortion;
    r.residual = std::move(c.plan.stream);
    r.reconstruction = reconstruct_with_residual(base, r.residual, r.residual.bits.size());
    return r;
  }

  void consider(SearchResult&& r) {
    if (better(r, best_)) best_ = std::move(r);
  }

  void search_model(const ParamVector& p, int lo, int hi) {
    const ModelSpec& spec = ctx_.effective(p.model);
    int cap = kMaxBitsPerParam * spec.k_params;
    if (options_.max_nx >= 0) cap = std::min(cap, options_.max_nx);
    hi = std::min(hi, cap);
    lo = std::max(lo, 0);

    ModelTrace trace;
    trace.model = spec.id;
    // The exhaustive search only prunes with n_r >= 0. The unquantized
    // residual rate n_min is not a true floor: a quantized fit can leave a
    // residual that codes in fewer bits, so pruning with it can skip the
    // optimum. The golden-section search keeps the tighter n_min interval.
    int n_min = 0;
    if (options_.strategy != SearchStrategy::kExhaustive) {
      const auto unquantized = model_output(spec, p.theta, ctx_);
      const Coding floor = best_coding(x_, unquantized, target_, options_.planes, diag_.bound_calls);
      if (!floor.reached) {
        diag_.models.push_back(trace);
        return;
      }
      n_min = floor.n_r;
    }
    auto current_hi = [&] { return std::min(hi, upper_bound(spec.k_params, n_min)); };
    trace.interval_size = std::max(0, current_hi() - lo + 1);
    if (trace.interval_size == 0) {
      diag_.models.push_back(trace);
      return;
    }
    const auto weights = allocation_weights(spec, ctx_);
    int calls = 0;
    if (options_.strategy == SearchStrategy::kExhaustive) {
      for (int n_x = lo; n_x <= current_hi(); ++n_x) {
        if (auto r = evaluate(spec, p, weights, n_x, calls)) consider(std::move(*r));
      }
    } else {
      std::map<int, SearchResult> seen;
      const auto line = integer_golden_section(lo, current_hi(), [&](int n_x) {
        auto r = evaluate(spec, p, weights, n_x, calls);
        if (!r) return std::numeric_limits<double>::infinity();
        const double total = r->total;
        seen.emplace(n_x, std::move(*r));
        return total;
      });
      if (auto it = seen.find(line.x); it != seen.end()) consider(std::move(it->second));
    }
    trace.residual_calls = calls;
    diag_.residual_calls += calls;
    diag_.models.push_back(trace);
  }

  std::span<const double> x_;
  double target_;
  const ModelContext& ctx_;
  const SearchOptions& options_;
  SearchResult best_;
  SearchDiagnostics diag_;
};

BoundResult bound(std::span<const double> x, std::span<const double> base, double target, int planes) {
  int calls = 0;
  Coding c = best_coding(x, base, target, planes, calls);
  if (!c.reached) throw Error(ErrorCode::kUnreachableTarget, "distortion target is below coder precision");
  return {c.n_r, c.method, true};
}

}  // namespace

BoundResult compute_n_max(std::span<const double> x, double target, int planes) {
  const std::vector<double> zeros(x.size(), 0.0);
  return bound(x, zeros, target, planes);
}

BoundResult compute_n_min(std::span<const double> x, std::span<const double> base, double target, int planes) {
  if (x.size() != base.size()) throw Error(ErrorCode::kLengthMismatch, "signal and model output differ in length");
  return bound(x, base, target, planes);
}

SearchResult search(std::span<const double> x, double target, const ModelContext& ctx,
                    const SearchOptions& options) {
  return Searcher(x, target, ctx, options).run();
}

SearchResult exhaustive_search(std::span<const double> x, double target, const ModelContext& ctx,
                               SearchOptions options) {
  options.strategy = SearchStrategy::kExhaustive;
  return search(x, target, ctx, options);
}

SearchResult golden_section_search(std::span<const double> x, double target, const ModelContext& ctx,
                                   SearchOptions options) {
  options.strategy = SearchStrategy::kGoldenSection;
  return search(x, target, ctx, options);
}

SearchResult search_with_dm(std::span<const double> x, double target, const ModelContext& ctx, int delta_m,
                            int delta_nx, SearchStrategy inner, SearchOptions options) {
  options.strategy = inner;
  options.preselect = true;
  options.rd.delta_m = delta_m;
  options.rd.delta_nx = delta_nx;
  return search(x, target, ctx, options);
}

LineSearchResult integer_golden_section(int lo, int hi, const std::function<double(int)>& f) {
  if (hi < lo) throw Error(ErrorCode::kInvalidArgument, "empty search interval");
  std::map<int, double> memo;
  auto value = [&](int x) {
    if (x > hi) return std::numeric_limits<double>::infinity();
    auto it = memo.find(x);
    if (it == memo.end()) it = memo.emplace(x, f(x)).first;
    return it->second;
  };

  // Fibonacci numbers F_1 = F_2 = 1; the open interval (a, a + F_k) holds
  // every candidate, padded on the right with points that are never probed.
  // The left end is evaluated as part of the bracket. In this problem it is
  // often an isolated minimum (no parameter bits, or a zero delta that
  // repeats the previous window) that the interior probes would miss.
  value(lo);

  std::vector<long long> fib{0, 1, 1};
  const long long span = static_cast<long long>(hi) - lo + 2;
  while (fib.back() < span) fib.push_back(fib[fib.size() - 1] + fib[fib.size() - 2]);
  std::size_t k = fib.size() - 1;
  long long a = static_cast<long long>(lo) - 1;
  while (k > 3) {
    const auto x1 = static_cast<int>(a + fib[k - 2]);
    const auto x2 = static_cast<int>(a + fib[k - 1]);
    if (!(value(x1) <= value(x2))) a = x1;
    --k;
  }
  value(static_cast<int>(std::max<long long>(a + 1, lo)));

  LineSearchResult out;
  out.value = std::numeric_limits<double>::infinity();
  out.x = lo;
  for (const auto& [x, v] : memo) {
    if (v < out.value) {
      out.x = x;
      out.value = v;
    }
  }
  out.evaluations = static_cast<int>(memo.size());
  return out;
}

}  // namespace mmc
