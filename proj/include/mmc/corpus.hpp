#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mmc {

struct ChannelSet {
  double sample_rate = 6400.0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> channels;  // volts
};

// Names accepted by synth_corpus.
const std::vector<std::string>& synth_profiles();

// Three-phase voltages (about 90 kV peak, 50 Hz) with a fault scenario
// chosen by `profile`. Same seed and arguments give the same samples.
ChannelSet synth_corpus(std::uint64_t seed, const std::string& profile, std::size_t windows = 20,
                        std::size_t window_size = 128, double sample_rate = 6400.0);

// CSV with one column per channel and a header row of names. An optional
// first line "# fs=<Hz>" sets the sample rate; otherwise `default_rate`.
ChannelSet read_csv(const std::filesystem::path& path, double default_rate = 6400.0);
void write_csv(const std::filesystem::path& path, const ChannelSet& set);

// Interleaved little-endian float64 samples; metadata comes from a JSON
// sidecar at <path>.json with "sample_rate" and "channels" (list of names).
ChannelSet read_raw(const std::filesystem::path& path);

// Dispatches on the extension: .csv is text, anything else raw.
ChannelSet read_signal(const std::filesystem::path& path, double default_rate = 6400.0);

}  // namespace mmc
