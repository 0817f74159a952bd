#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmc/bitstream.hpp"
#include "mmc/codec.hpp"
#include "mmc/config.hpp"
#include "mmc/corpus.hpp"

namespace mmc {

struct ReportRow {
  std::string channel;
  WindowRecord window;
};

struct ReportSummary {
  std::size_t windows = 0;
  double mean_bits = 0.0;
  double compression_ratio = 0.0;  // raw bits / coded bits
  double mean_rmse = 0.0;          // volts
  double max_mse = 0.0;            // volts^2
  double mean_residual_calls = 0.0;
  double encode_seconds = 0.0;
};

struct RunReport {
  std::size_t window_size = 0;
  int bit_depth = 16;
  double d_max = 0.0;
  std::string method;
  std::vector<ReportRow> rows;

  ReportSummary summary() const;
  void write_csv(std::ostream& os) const;
};

struct EncodeRun {
  RunReport report;
  Container container;
  std::vector<std::vector<double>> reconstruction;  // volts, per channel
};

EncodeRun encode_signals(const ChannelSet& signals, const RunConfig& config);

}  // namespace mmc
