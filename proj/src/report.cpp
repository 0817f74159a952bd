#include "mmc/report.hpp"

#include <cmath>
#include <ostream>

#include "mmc/error.hpp"

namespace mmc {

ReportSummary RunReport::summary() const {
  ReportSummary s;
  s.windows = rows.size();
  if (rows.empty()) return s;
  double bits = 0.0, rmse = 0.0, calls = 0.0;
  for (const auto& r : rows) {
    bits += r.window.total;
    rmse += std::sqrt(r.window.mse);
    calls += r.window.diagnostics.residual_calls;
    s.max_mse = std::max(s.max_mse, r.window.mse);
    s.encode_seconds += r.window.seconds;
  }
  const double n = static_cast<double>(rows.size());
  s.mean_bits = bits / n;
  s.compression_ratio = n * static_cast<double>(window_size) * bit_depth / bits;
  s.mean_rmse = rmse / n;
  s.mean_residual_calls = calls / n;
  return s;
}

void RunReport::write_csv(std::ostream& os) const {
  os << "# method=" << method << " dmax=" << d_max << " window_size=" << window_size << " bit_depth=" << bit_depth
     << '\n';
  os << "channel,window,model,method,exponent,n_x,n_r,n_h,n_tot,mse_v2,cr,encode_s,residual_calls\n";
  const auto prec = os.precision(10);
  for (const auto& r : rows) {
    const auto& w = r.window;
    os << r.channel << ',' << w.index << ',' << w.model << ',' << static_cast<int>(w.method) << ',' << w.exponent
       << ',' << w.n_x << ',' << w.n_r << ',' << w.header_bits << ',' << w.total << ',' << w.mse << ','
       << static_cast<double>(window_size) * bit_depth / w.total << ',' << w.seconds << ','
       << w.diagnostics.residual_calls << '\n';
  }
  os.precision(prec);
}

EncodeRun encode_signals(const ChannelSet& signals, const RunConfig& config) {
  if (!(config.d_max > 0)) throw Error(ErrorCode::kInvalidArgument, "dmax must be positive");
  const ModelCatalog catalog(catalog_config(config, signals.sample_rate));
  const SearchOptions options = search_options(config);

  EncodeRun run;
  run.report.window_size = config.window_size;
  run.report.bit_depth = config.bit_depth;
  run.report.d_max = config.d_max;
  run.report.method = config.method;
  run.container.window_size = static_cast<std::uint32_t>(config.window_size);
  run.container.sample_rate = signals.sample_rate;
  run.container.d_max = config.d_max;
  run.container.fingerprint = catalog.fingerprint();
  for (std::size_t c = 0; c < signals.channels.size(); ++c) {
    const std::string name = c < signals.names.size() ? signals.names[c] : "ch" + std::to_string(c);
    ChannelResult res = encode_channel(catalog, signals.channels[c], config.d_max, options, name);
    for (auto& rec : res.records) run.report.rows.push_back({name, std::move(rec)});
    run.reconstruction.push_back(std::move(res.reconstruction));
    run.container.channels.push_back(std::move(res.block));
  }
  return run;
}

}  // namespace mmc
