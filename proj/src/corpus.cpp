#include "mmc/corpus.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"

#include "mmc/error.hpp"

namespace mmc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPeak = 90e3;

struct Phase {
  double amplitude;
  double phase;
};

}  // namespace

const std::vector<std::string>& synth_profiles() {
  static const std::vector<std::string> names{"steady-sine", "amplitude-step", "phase-step", "harmonic",
                                              "noise-burst"};
  return names;
}

ChannelSet synth_corpus(std::uint64_t seed, const std::string& profile, std::size_t windows,
                        std::size_t window_size, double sample_rate) {
  const auto& names = synth_profiles();
  const auto which = std::find(names.begin(), names.end(), profile);
  if (which == names.end()) throw Error(ErrorCode::kInvalidArgument, "unknown profile: " + profile);
  if (windows == 0 || window_size == 0 || !(sample_rate > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "corpus dimensions must be positive");
  }

  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(which - names.begin()));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  std::normal_distribution<double> gauss(0.0, 1.0);

  const std::size_t length = windows * window_size;
  const double ts = 1.0 / sample_rate;
  const double f = 50.0 + uniform(-0.05, 0.05);
  const double amp = kPeak * uniform(0.98, 1.02);
  const double phi0 = uniform(-kPi, kPi);
  const double noise = 30.0;

  // Fault timing, away from window boundaries.
  const auto fault = static_cast<std::size_t>(uniform(0.3, 0.5) * static_cast<double>(length));
  const auto clear = std::min(length, fault + static_cast<std::size_t>(uniform(3.0, 6.0) * static_cast<double>(window_size)));
  const int faulted = static_cast<int>(rng() % 3);

  ChannelSet set;
  set.sample_rate = sample_rate;
  for (int p = 0; p < 3; ++p) {
    set.names.push_back(std::string("V") + static_cast<char>('a' + p));
    std::vector<double> x(length);
    const double shift = -2.0 * kPi * p / 3.0;

    const double sag = uniform(0.1, 0.4);
    const double dc = uniform(0.3, 0.7) * (unit(rng) < 0.5 ? -1.0 : 1.0);
    const double tau = uniform(0.02, 0.05);
    const double jump = uniform(0.3, 0.6) * (unit(rng) < 0.5 ? -1.0 : 1.0);
    std::array<Phase, 3> harmonics{Phase{uniform(0.03, 0.06), uniform(-kPi, kPi)},
                                   Phase{uniform(0.02, 0.05), uniform(-kPi, kPi)},
                                   Phase{uniform(0.01, 0.03), uniform(-kPi, kPi)}};
    const double burst_sigma = uniform(1000.0, 3000.0);
    const double ring_freq = uniform(800.0, 1500.0);
    const double ring_amp = uniform(0.1, 0.3) * amp;

    for (std::size_t n = 0; n < length; ++n) {
      const double t = static_cast<double>(n) * ts;
      const double w = 2.0 * kPi * f * t + phi0 + shift;
      double a = amp;
      double ph = 0.0;
      double extra = 0.0;
      const bool during = n >= fault && n < clear;
      const double since = static_cast<double>(n) - static_cast<double>(fault);
      if (profile == "amplitude-step") {
        if (during) {
          a = p == faulted ? amp * sag : amp * 1.08;
          if (p == faulted) extra = dc * amp * std::exp(-since * ts / tau);
        }
      } else if (profile == "phase-step") {
        if (n >= fault) {
          ph = jump;
          a = amp * 0.92;
        }
      } else if (profile == "harmonic") {
        for (std::size_t h = 0; h < harmonics.size(); ++h) {
          const double order = 3.0 + 2.0 * static_cast<double>(h);
          extra += harmonics[h].amplitude * amp * std::cos(order * w + harmonics[h].phase);
        }
      } else if (profile == "noise-burst") {
        if (during) extra = burst_sigma * gauss(rng);
        if (n >= fault && since * ts < 0.01) {
          extra += ring_amp * std::exp(-since * ts / 0.002) * std::sin(2.0 * kPi * ring_freq * since * ts);
        }
      }
      x[n] = a * std::cos(w + ph) + extra + noise * gauss(rng);
    }
    set.channels.push_back(std::move(x));
  }
  return set;
}

// ---- file formats ----------------------------------------------------------------

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

ChannelSet read_csv(const std::filesystem::path& path, double default_rate) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  ChannelSet set;
  set.sample_rate = default_rate;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (line[0] == '#') {
      const auto pos = line.find("fs=");
      if (pos != std::string::npos) set.sample_rate = std::stod(line.substr(pos + 3));
      continue;
    }
    break;
  }
  set.names = split(line, ',');
  if (set.names.empty()) throw Error(ErrorCode::kIo, path.string() + " has no header row");
  set.channels.resize(set.names.size());
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line, ',');
    if (cells.size() != set.names.size()) {
      throw Error(ErrorCode::kIo, path.string() + ": row " + std::to_string(row) + " has the wrong column count");
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      try {
        set.channels[c].push_back(std::stod(cells[c]));
      } catch (const std::exception&) {
        throw Error(ErrorCode::kIo, path.string() + ": row " + std::to_string(row) + " is not numeric");
      }
    }
  }
  return set;
}

void write_csv(const std::filesystem::path& path, const ChannelSet& set) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "# fs=" << set.sample_rate << '\n';
  for (std::size_t c = 0; c < set.names.size(); ++c) out << (c ? "," : "") << set.names[c];
  out << '\n';
  out.precision(17);
  std::size_t rows = 0;
  for (const auto& ch : set.channels) rows = std::max(rows, ch.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < set.channels.size(); ++c) {
      if (c) out << ',';
      if (r < set.channels[c].size()) out << set.channels[c][r];
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

ChannelSet read_raw(const std::filesystem::path& path) {
  const auto sidecar = std::filesystem::path(path.string() + ".json");
  std::ifstream meta(sidecar);
  if (!meta) throw Error(ErrorCode::kIo, "missing sidecar " + sidecar.string());
  ChannelSet set;
  try {
    const auto j = nlohmann::json::parse(meta);
    set.sample_rate = j.at("sample_rate").get<double>();
    set.names = j.at("channels").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, sidecar.string() + ": " + e.what());
  }
  if (set.names.empty()) throw Error(ErrorCode::kIo, sidecar.string() + " lists no channels");

  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t stride = 8 * set.names.size();
  if (bytes.size() % stride != 0) throw Error(ErrorCode::kIo, path.string() + " is not a whole number of frames");
  set.channels.assign(set.names.size(), {});
  for (std::size_t off = 0; off < bytes.size(); off += 8) {
    unsigned char b[8];
    std::memcpy(b, bytes.data() + off, 8);
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + 8);
    double v;
    std::memcpy(&v, b, 8);
    set.channels[(off / 8) % set.names.size()].push_back(v);
  }
  return set;
}

ChannelSet read_signal(const std::filesystem::path& path, double default_rate) {
  if (path.extension() == ".csv") return read_csv(path, default_rate);
  return read_raw(path);
}

}  // namespace mmc
