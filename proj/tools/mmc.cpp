// Command-line front end: encode, decode, sweep, synth.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmc/bitstream.hpp"
#include "mmc/codec.hpp"
#include "mmc/config.hpp"
#include "mmc/corpus.hpp"
#include "mmc/error.hpp"
#include "mmc/report.hpp"
#include "mmc/signal.hpp"

namespace {

struct CommonFlags {
  std::string dmax;
  std::string method;
  std::size_t window_size = 0;
  int delta_m = 0;
  int delta_nx = 0;
  std::string config;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--dmax", f.dmax, "Distortion bound in V^2 (or <volts>^2)");
  cmd->add_option("--method", f.method, "Search strategy")->check(CLI::IsMember({"es", "gss", "es-dm", "gss-dm"}));
  cmd->add_option("--window-size", f.window_size, "Samples per window");
  cmd->add_option("--delta-m", f.delta_m, "Models kept by preselection");
  cmd->add_option("--delta-nx", f.delta_nx, "Width of the n_x window kept by preselection");
  cmd->add_option("--config", f.config, "key = value settings file");
}

mmc::RunConfig resolve(const CommonFlags& f) {
  mmc::RunConfig c;
  if (!f.config.empty()) c = mmc::load_config(f.config);
  if (!f.dmax.empty()) c.d_max = mmc::parse_dmax(f.dmax);
  if (!f.method.empty()) c.method = f.method;
  if (f.window_size) c.window_size = f.window_size;
  if (f.delta_m) c.delta_m = f.delta_m;
  if (f.delta_nx) c.delta_nx = f.delta_nx;
  return c;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw mmc::Error(mmc::ErrorCode::kIo, "cannot write " + path);
  }
}

template <typename T>
std::vector<T> parse_list(const std::string& text, T (*parse)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse(item));
  }
  return out;
}

int parse_int(const std::string& s) { return std::stoi(s); }
std::string parse_string(const std::string& s) { return s; }

int cmd_encode(const std::string& input, const std::string& output, const std::string& report_path,
               const CommonFlags& flags) {
  const mmc::RunConfig config = resolve(flags);
  const auto signals = mmc::read_signal(input, config.sample_rate);
  const auto run = mmc::encode_signals(signals, config);

  std::ostringstream bytes;
  mmc::write_container(bytes, run.container);
  write_file(output, bytes.str());
  if (!report_path.empty()) {
    std::ofstream rep(report_path);
    run.report.write_csv(rep);
    if (!rep) throw mmc::Error(mmc::ErrorCode::kIo, "cannot write " + report_path);
  }
  const auto s = run.report.summary();
  std::printf("windows %zu  mean bits/window %.2f  CR %.2f (%d-bit raw)  mean RMSE %.2f V  max MSE %.1f V^2\n",
              s.windows, s.mean_bits, s.compression_ratio, config.bit_depth, s.mean_rmse, s.max_mse);
  return 0;
}

int cmd_decode(const std::string& input, const std::string& output, const std::string& reference,
               const std::string& config_path) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw mmc::Error(mmc::ErrorCode::kIo, "cannot open " + input);
  const mmc::Container c = mmc::read_container(in);
  mmc::RunConfig config;
  if (!config_path.empty()) config = mmc::load_config(config_path);
  config.window_size = c.window_size;
  const mmc::ModelCatalog catalog(mmc::catalog_config(config, c.sample_rate));
  if (catalog.fingerprint() != c.fingerprint) {
    throw mmc::Error(mmc::ErrorCode::kCorruptContainer, "container was made with different model priors");
  }
  mmc::ChannelSet out;
  out.sample_rate = c.sample_rate;
  for (const auto& ch : c.channels) {
    out.names.push_back(ch.name);
    out.channels.push_back(mmc::decode_channel(catalog, ch));
  }
  mmc::write_csv(output, out);

  if (!reference.empty()) {
    const auto ref = mmc::read_signal(reference, c.sample_rate);
    int violations = 0;
    std::size_t windows = 0;
    for (std::size_t k = 0; k < out.channels.size() && k < ref.channels.size(); ++k) {
      const auto& dec = out.channels[k];
      for (std::size_t start = 0; start + c.window_size <= dec.size(); start += c.window_size) {
        const std::span<const double> a(dec.data() + start, c.window_size);
        const std::span<const double> b(ref.channels[k].data() + start, c.window_size);
        ++windows;
        if (mmc::mse(a, b) > c.d_max) ++violations;
      }
    }
    std::printf("checked %zu windows against %s: %d above dmax\n", windows, reference.c_str(), violations);
    return violations == 0 ? 0 : 1;
  }
  return 0;
}

int cmd_sweep(const std::string& input, const std::string& output, const std::string& dmax_list,
              const std::string& delta_m_list, const std::string& delta_nx_list, const std::string& methods_list,
              const CommonFlags& flags) {
  const mmc::RunConfig base = resolve(flags);
  const auto signals = mmc::read_signal(input, base.sample_rate);
  const auto dmaxes = parse_list<double>(dmax_list, &mmc::parse_dmax);
  const auto delta_ms = parse_list<int>(delta_m_list, &parse_int);
  const auto delta_nxs = parse_list<int>(delta_nx_list, &parse_int);
  const auto methods = parse_list<std::string>(methods_list, &parse_string);

  std::ofstream csv(output);
  if (!csv) throw mmc::Error(mmc::ErrorCode::kIo, "cannot write " + output);
  csv << "method,dmax,delta_m,delta_nx,windows,mean_bits,cr,mean_rmse,mean_residual_calls,encode_s\n";
  for (const auto& method : methods) {
    const bool dm = method.size() > 3 && method.compare(method.size() - 3, 3, "-dm") == 0;
    for (double d : dmaxes) {
      std::vector<int> ms = dm ? delta_ms : std::vector<int>{0};
      std::vector<int> nxs = dm ? delta_nxs : std::vector<int>{0};
      if (dm) std::printf("%s  dmax=%g  rows: delta_m, columns: delta_nx\n", method.c_str(), d);
      for (int m : ms) {
        if (dm) std::printf("%4d |", m);
        for (int nx : nxs) {
          mmc::RunConfig c = base;
          c.method = method;
          c.d_max = d;
          if (dm) {
            c.delta_m = m;
            c.delta_nx = nx;
          }
          const auto s = mmc::encode_signals(signals, c).report.summary();
          csv << method << ',' << d << ',' << (dm ? std::to_string(m) : "") << ',' << (dm ? std::to_string(nx) : "")
              << ',' << s.windows << ',' << s.mean_bits << ',' << s.compression_ratio << ',' << s.mean_rmse << ','
              << s.mean_residual_calls << ',' << s.encode_seconds << '\n';
          if (dm) std::printf(" %8.2f", s.mean_bits);
          else std::printf("%s  dmax=%g  mean bits/window %.2f\n", method.c_str(), d, s.mean_bits);
        }
        if (dm) std::printf("\n");
      }
    }
  }
  return 0;
}

int cmd_synth(const std::string& profile, std::uint64_t seed, std::size_t windows, std::size_t window_size,
              const std::string& output) {
  const auto set = mmc::synth_corpus(seed, profile, windows, window_size);
  mmc::write_csv(output, set);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiple-model waveform coder"};
  app.require_subcommand(1);

  CommonFlags enc_flags;
  std::string enc_in, enc_out, enc_report;
  auto* enc = app.add_subcommand("encode", "Compress a CSV or raw signal file");
  enc->add_option("input", enc_in, "Input signal (.csv or raw float64 with .json sidecar)")->required();
  enc->add_option("-o,--output", enc_out, "Container file")->required();
  enc->add_option("--report", enc_report, "Per-window CSV report");
  add_common(enc, enc_flags);

  std::string dec_in, dec_out, dec_ref, dec_config;
  auto* dec = app.add_subcommand("decode", "Reconstruct a CSV from a container");
  dec->add_option("input", dec_in, "Container file")->required();
  dec->add_option("-o,--output", dec_out, "Output CSV")->required();
  dec->add_option("--reference", dec_ref, "Original signal; checks every window against dmax");
  dec->add_option("--config", dec_config, "Settings used when encoding");

  CommonFlags sw_flags;
  std::string sw_in, sw_out = "sweep.csv", sw_dmax = "200^2", sw_dm = "1,2,3,14", sw_dnx = "1,3,5,7,9,33",
                     sw_methods = "es,es-dm";
  auto* sw = app.add_subcommand("sweep", "Mean bits/window over a grid of settings");
  sw->add_option("input", sw_in, "Input signal")->required();
  sw->add_option("-o,--output", sw_out, "Output CSV");
  sw->add_option("--dmax-list", sw_dmax, "Comma-separated dmax values");
  sw->add_option("--delta-m-list", sw_dm, "Comma-separated delta_m values");
  sw->add_option("--delta-nx-list", sw_dnx, "Comma-separated delta_nx values");
  sw->add_option("--methods", sw_methods, "Comma-separated methods");
  add_common(sw, sw_flags);

  std::string syn_profile = "steady-sine", syn_out;
  std::uint64_t syn_seed = 1;
  std::size_t syn_windows = 20, syn_n = 128;
  auto* syn = app.add_subcommand("synth", "Write a synthetic three-phase test signal");
  syn->add_option("--profile", syn_profile, "Scenario")->check(CLI::IsMember(mmc::synth_profiles()));
  syn->add_option("--seed", syn_seed, "Random seed");
  syn->add_option("--windows", syn_windows, "Windows per channel");
  syn->add_option("--window-size", syn_n, "Samples per window");
  syn->add_option("-o,--output", syn_out, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*enc) return cmd_encode(enc_in, enc_out, enc_report, enc_flags);
    if (*dec) return cmd_decode(dec_in, dec_out, dec_ref, dec_config);
    if (*sw) return cmd_sweep(sw_in, sw_out, sw_dmax, sw_dm, sw_dnx, sw_methods, sw_flags);
    if (*syn) return cmd_synth(syn_profile, syn_seed, syn_windows, syn_n, syn_out);
  } catch (const mmc::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
