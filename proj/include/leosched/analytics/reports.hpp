#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "leosched/analytics/records.hpp"
#include "leosched/orbital/launch.hpp"

namespace leosched::analytics {

// Reports only look at records with a selection. "Available" always means
// available and not selected.

struct ElevationReport {
  std::vector<double> selected;   // sorted elevations, the empirical CDF support
  std::vector<double> available;  // sorted
  double median_selected = 0.0;
  double median_available = 0.0;
  double median_gap = 0.0;
  double high_band_available = 0.0;  // share in [45, 90]
  double high_band_selected = 0.0;
  int slots = 0;
};

/// Fraction of `sorted` at or below x.
double ecdf(const std::vector<double>& sorted, double x);

ElevationReport elevation_report(std::span<const SlotRecord> records);

enum Quadrant { kNorthWest, kNorthEast, kSouthEast, kSouthWest };
const char* to_string(Quadrant q);
/// NW [270,360), NE [0,90), SE [90,180), SW [180,270) after subtracting the
/// boresight offset.
Quadrant quadrant_of(double azimuth, double boresight_offset = 0.0);

struct AzimuthReport {
  std::array<double, 4> available{};  // share per Quadrant
  std::array<double, 4> selected{};
  double north_available = 0.0;
  double north_selected = 0.0;
  int slots = 0;
};

AzimuthReport azimuth_report(std::span<const SlotRecord> records, double boresight_offset = 0.0);

struct LaunchBinRow {
  orbital::LaunchBin bin;
  int picked = 0;     // slots whose selection came from the bin
  int available = 0;  // slots with at least one satellite of the bin in view
  double probability = 0.0;
};

struct LaunchBinReport {
  std::vector<LaunchBinRow> bins;  // chronological
  double spearman = 0.0;           // bin date vs probability; NaN with < 2 bins
  int slots = 0;
  int unresolved_slots = 0;        // selection missing from the launch catalog
  std::vector<int> unresolved_ids;
};

LaunchBinReport launch_bin_report(std::span<const SlotRecord> records, const orbital::LaunchCatalog& catalog);

/// Spearman rank correlation with midranks for ties. NaN when either side
/// is constant or shorter than 2.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct SunlitReport {
  int mixed_slots = 0;
  double sunlit_pick_rate = 0.0;
  double sunlit_available_share = 0.0;  // mean per-slot sunlit share of the whole cohort
  int dark_picks = 0;
  double min_dark_share_when_dark_picked = 0.0;  // NaN without dark picks
  double dark_pick_elevation_gap = 0.0;          // NaN without dark picks
};

/// Throws std::invalid_argument when no slot offers both sunlit and dark satellites.
SunlitReport sunlit_report(std::span<const SlotRecord> records);

std::string elevation_cdf_csv(const ElevationReport& r);
std::string azimuth_csv(const AzimuthReport& r);
std::string launch_bin_csv(const LaunchBinReport& r);
std::string summary_csv(const ElevationReport& e, const AzimuthReport& a, const LaunchBinReport* l,
                        const SunlitReport* s);

/// Two empirical CDFs: selected solid, available dotted.
std::string cdf_plot_svg(const std::vector<double>& selected, const std::vector<double>& available,
                         const std::string& title, const std::string& x_label, double x_min, double x_max);

}  // namespace leosched::analytics
