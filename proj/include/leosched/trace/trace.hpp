#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "leosched/time.hpp"

namespace leosched::trace {

struct LatencySample {
  Timestamp t{};
  double rtt_ms = 0.0;  // meaningless when lost
  bool lost = false;
};

struct Band {
  double center_ms = 0.0;
  double width_ms = 0.0;
  double fraction = 0.0;
};

struct SlotStats {
  Timestamp slot_start{};
  int n = 0;          // all samples, lost ones included
  double median = 0.0;  // NaN when every sample was lost
  double p5 = 0.0;
  double p95 = 0.0;
  double loss_rate = 0.0;
  std::vector<Band> bands;
  std::vector<double> rtts;  // delivered RTTs in arrival order
};

/// Parses `unix_ms,rtt_ms,lost`. Throws std::invalid_argument naming the line.
std::vector<LatencySample> parse_trace_csv(const std::string& text);
std::string to_trace_csv(const std::vector<LatencySample>& trace);

/// Start of the slot holding `t` when slots begin at `offset_s + 15 k`
/// seconds past the minute.
Timestamp slot_start_for(Timestamp t, int offset_s);

/// Partitions the trace into half-open 15-s slots. Only slots holding at
/// least one sample are returned, in time order.
std::vector<SlotStats> slice_slots(const std::vector<LatencySample>& trace, int offset_s);

struct MannWhitney {
  double u = 0.0;  // statistic for the first sample
  double p = 1.0;  // two-sided, normal approximation
};

MannWhitney mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y);

/// Linear-interpolation quantile of unsorted data, q in [0, 1].
double quantile(std::vector<double> values, double q);

struct OffsetDetection {
  int offset_s = 0;
  std::array<double, 15> scores{};
  std::array<double, 15> between{};  // share of adjacent slot pairs that differ
  std::array<double, 15> within{};   // share of slots whose halves differ
  bool conclusive = false;
};

struct OffsetOptions {
  double alpha = 0.05;
  double conclusive_score = 0.25;
  int min_samples = 6;  // per compared group
};

/// Scores every offset 0..14. A slot grid is good when neighbouring slots
/// differ while each slot is homogeneous, so the score is
/// between * (1 - within). Ties go to the lower offset.
OffsetDetection detect_offset(const std::vector<LatencySample>& trace, const OffsetOptions& options = {});

/// Gap clustering of sorted RTTs; clusters with at least `min_fraction` of
/// the samples become bands, ordered by center.
std::vector<Band> detect_bands(const std::vector<double>& rtts, double band_gap_ms = 2.0, double min_fraction = 0.10);

/// Number of gap clusters before the fraction filter.
std::size_t count_clusters(const std::vector<double>& rtts, double band_gap_ms);

struct SyntheticTraceSpec {
  Timestamp start{};
  double duration_s = 600.0;
  int cadence_ms = 20;
  int offset_s = 12;
  double base_ms = 40.0;
  double noise_sigma_ms = 1.0;
  double shift_ms = 5.0;  // level change at every slot boundary, random sign; 0 = stationary
  double loss_rate = 0.0;
  std::uint64_t seed = 1;
};

/// Gaussian RTT noise around a level that jumps at each slot boundary.
std::vector<LatencySample> synthetic_trace(const SyntheticTraceSpec& spec);

std::string slot_stats_csv_header();
std::string slot_stats_csv_row(const SlotStats& s);

/// RTT strip plot with slot boundaries drawn as vertical rules.
std::string strip_plot_svg(const std::vector<LatencySample>& trace, int offset_s, const std::string& title);

}  // namespace leosched::trace
