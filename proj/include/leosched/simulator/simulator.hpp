#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "leosched/analytics/records.hpp"
#include "leosched/obstruction/map.hpp"
#include "leosched/orbital/launch.hpp"
#include "leosched/orbital/tle.hpp"
#include "leosched/orbital/visibility.hpp"

namespace leosched::simulator {

/// One Walker-delta shell: `count` satellites in `planes` evenly spaced
/// planes, relative phasing factor `phasing`.
struct ShellSpec {
  int count = 0;
  int planes = 0;
  double inclination = 53.0;  // degrees
  double altitude_km = 550.0;
  int phasing = 1;
};

/// Satellites are dealt to `count` launches, `spacing_days` apart, in a
/// seeded random order so every batch is spread over all planes.
struct LaunchPlan {
  std::chrono::sys_days first{std::chrono::year{2019} / std::chrono::May / 1};
  int count = 48;
  int spacing_days = 30;
};

struct ConstellationSpec {
  std::vector<ShellSpec> shells;
  Timestamp epoch{};
  std::uint64_t seed = 1;
  int first_norad_id = 44000;
  LaunchPlan launches;
};

struct GeneratedConstellation {
  std::vector<orbital::TleRecord> tles;
  orbital::LaunchCatalog launches;
};

/// Mean motion (rev/day) of a circular orbit at `altitude_km` (Kepler's
/// third law, WGS-84 radius and GM).
double mean_motion_for_altitude(double altitude_km);

/// Throws std::invalid_argument for invalid shells.
GeneratedConstellation generate_constellation(const ConstellationSpec& spec);

/// Text catalog in 3-line format.
std::string to_tle_text(std::span<const orbital::TleRecord> tles);

struct SchedulerWeights {
  double elevation = 0.0;
  double north = 0.0;
  double age = 0.0;
  double sunlit = 0.0;
};

/// Forbidden region of the sky. Azimuth ranges with min > max wrap through
/// north.
struct GeoExclusion {
  double azimuth_min = 0.0;
  double azimuth_max = 0.0;
  double elevation_min = 0.0;
  double elevation_max = 90.0;
  bool contains(const orbital::Topocentric& topo) const;
};

struct SchedulerConfig {
  SchedulerWeights weights;
  double epoch_offset_s = 12.0;
  double min_elevation = 25.0;
  std::optional<GeoExclusion> geo_exclusion;
  double noise_temperature = 0.0;  // 0 = deterministic argmax
  std::uint64_t seed = 1;

  /// Returns every problem found, empty when valid.
  std::vector<std::string> validate() const;
  bool uniform_random() const;

  static SchedulerConfig paper_mimic();
  static SchedulerConfig uniform();
};

struct ScheduleDecision {
  int norad_id = 0;
  bool wedge_fallback = false;  // every candidate sat inside the exclusion wedge
};

/// Cohort-relative score per satellite:
///   w_el * norm(elevation) + w_north * cos(azimuth) + w_age * (1 - norm(age)) + w_sun * sunlit
/// where norm is min-max over the (wedge-filtered) cohort.
std::vector<double> score_cohort(std::span<const orbital::SatelliteSnapshot> cohort, const SchedulerWeights& w);

/// Argmax (ties to the lowest NORAD id) at temperature 0, softmax sample
/// otherwise. The result does not depend on the order of `available`.
ScheduleDecision schedule_slot(std::span<const orbital::SatelliteSnapshot> available, const SchedulerConfig& config,
                               std::mt19937_64& rng);

/// Draws the polyline through `points` (polar samples) as a thin 8-connected
/// pixel path. Samples below the plotted range are skipped.
std::vector<obstruction::Pixel> trail_pixels(std::span<const obstruction::PolarPoint> points,
                                             const obstruction::MapGeometry& geom = {});

/// Look angles of the satellite sampled over the slot (no clamping).
std::vector<obstruction::PolarPoint> sample_pass(const orbital::Constellation::Satellite& sat,
                                                 const orbital::ObserverLocation& obs, Timestamp slot_start,
                                                 int samples = 15, double cadence_seconds = 1.0);

/// Copy of `prior` with the selected satellite's slot trail drawn in.
/// Throws std::invalid_argument when the satellite never rises above the
/// plotted range during the slot.
obstruction::ObstructionMap render_slot(const orbital::Constellation::Satellite& selected, Timestamp slot_start,
                                        const orbital::ObserverLocation& obs, const obstruction::MapGeometry& geom,
                                        const obstruction::ObstructionMap& prior, int samples = 15,
                                        double cadence_seconds = 1.0);

struct Terminal {
  std::string id;
  orbital::ObserverLocation location;
  int tz_offset_minutes = 0;
};

struct CampaignConfig {
  Timestamp start{};
  double duration_s = 3600.0;
  double slot_seconds = 15.0;
  SchedulerConfig scheduler;
  obstruction::MapGeometry geometry;
  bool render_maps = true;
  int reset_every_slots = 40;  // 10 minutes of 15-s slots
  double max_tle_age_days = 7.0;
};

struct GroundTruthSlot {
  analytics::SlotRecord record;
  obstruction::ObstructionMap map;   // cumulative map at the end of the slot
  std::vector<obstruction::Pixel> trail;  // this slot's trail pixels
  int overlap_pixels = 0;            // trail pixels already lit before the slot
  bool wedge_fallback = false;
  int terminal_index = 0;
};

struct CampaignSummary {
  int slots = 0;
  int empty_slots = 0;
  int wedge_fallbacks = 0;
  int render_failures = 0;
};

/// The reference scenario: one 22 x 72 Walker shell at 53 deg / 550 km and
/// four mid-latitude terminals (Northwest US, Midwest US, Northeast US, Europe).
ConstellationSpec reference_constellation(Timestamp epoch, std::uint64_t seed = 1);
std::vector<Terminal> reference_terminals();

/// About half an hour after local sunset at the equinox on `date`
/// (18:30 local solar time), when the sky holds both sunlit and eclipsed
/// satellites.
Timestamp dusk_start(std::chrono::sys_days date, double longitude_deg);

/// Runs each terminal separately from its own dusk, `slots_per_terminal`
/// slots each, and collects the records that have a selection.
std::vector<analytics::SlotRecord> reference_records(const orbital::Constellation& constellation,
                                                     std::span<const Terminal> terminals, std::chrono::sys_days date,
                                                     int slots_per_terminal, const SchedulerConfig& scheduler);

/// First slot boundary at or after `t` on the grid `offset + 15 k` seconds.
Timestamp align_to_slot(Timestamp t, double offset_s, double slot_seconds = 15.0);

/// Runs the scheduler for every terminal and slot, emitting slots in
/// (terminal, time) order. Deterministic for a fixed configuration.
CampaignSummary run_campaign(const orbital::Constellation& constellation, std::span<const Terminal> terminals,
                             const CampaignConfig& config, const std::function<void(const GroundTruthSlot&)>& emit);

}  // namespace leosched::simulator
