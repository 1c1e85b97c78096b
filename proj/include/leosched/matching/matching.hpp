#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "leosched/obstruction/map.hpp"
#include "leosched/orbital/visibility.hpp"

namespace leosched::matching {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Track projected onto the polar plane: r = 90 - elevation (degrees),
/// x = r sin(azimuth), y = r cos(azimuth).
struct CartesianTrack {
  std::vector<Point2> points;
  std::string source;  // norad id or "observed"
};

CartesianTrack to_cartesian(std::span<const obstruction::PolarPoint> points, std::string source = "observed");
CartesianTrack to_cartesian(const obstruction::PolarTrack& track);

/// Dynamic time warping with match/insert/delete steps, Euclidean point
/// cost, no window, both ends anchored. Returns the accumulated cost.
double dtw_distance(const CartesianTrack& a, const CartesianTrack& b);

/// `n` points evenly spaced by arc length along the polyline, endpoints kept.
CartesianTrack resample_arc_length(const CartesianTrack& track, std::size_t n);

CartesianTrack reversed(CartesianTrack track);

enum class Orientation { kForward, kReversed };
const char* to_string(Orientation o);

struct MatchConfig {
  double slot_seconds = 15.0;
  double cadence_seconds = 1.0;      // candidate sampling interval
  double min_elevation = 25.0;       // candidate visibility mask at slot midpoint
  double min_margin = 0.0;           // below this the result is flagged low-confidence
  double max_tle_age_days = 7.0;

  int samples() const { return static_cast<int>(slot_seconds / cadence_seconds + 1e-9); }
};

struct MatchResult {
  int slot_index = 0;
  int best = 0;
  double best_distance = 0.0;
  double runner_up_distance = 0.0;  // +inf when only one candidate
  double margin = 0.0;              // runner_up - best, +inf when only one candidate
  int candidates_considered = 0;
  Orientation orientation = Orientation::kForward;
  bool low_confidence = false;
};

class NoCandidates : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Look angles of one satellite sampled across a slot, elevations clamped
/// into the plotted range so every point is representable on the map.
std::vector<obstruction::PolarPoint> candidate_trajectory(const orbital::Constellation::Satellite& sat,
                                                          const orbital::ObserverLocation& obs,
                                                          Timestamp slot_start, const MatchConfig& config = {});

/// Identifies the satellite whose trajectory during the slot best matches
/// the decoded track, trying both orientations of the track.
MatchResult identify_satellite(const obstruction::PolarTrack& track, const orbital::Constellation& constellation,
                               const orbital::ObserverLocation& obs, Timestamp slot_start,
                               const MatchConfig& config = {});

/// `terminal_id,slot_start_iso,norad_id,distance,margin,orientation,candidates`
std::string match_csv_header();
std::string match_csv_row(const std::string& terminal_id, Timestamp slot_start, const MatchResult& r);

}  // namespace leosched::matching
