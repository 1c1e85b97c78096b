#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "leosched/simulator/simulator.hpp"

namespace leosched::simulator {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

bool azimuth_in(double az, double lo, double hi) { return lo <= hi ? (az >= lo && az <= hi) : (az >= lo || az <= hi); }

}  // namespace

bool GeoExclusion::contains(const orbital::Topocentric& topo) const {
  return azimuth_in(topo.azimuth, azimuth_min, azimuth_max) && topo.elevation >= elevation_min &&
         topo.elevation <= elevation_max;
}

bool SchedulerConfig::uniform_random() const {
  return weights.elevation == 0.0 && weights.north == 0.0 && weights.age == 0.0 && weights.sunlit == 0.0 &&
         noise_temperature > 0.0;
}

std::vector<std::string> SchedulerConfig::validate() const {
  std::vector<std::string> problems;
  const auto check_weight = [&](double w, const char* name) {
    if (!(w >= 0.0) || !std::isfinite(w)) problems.push_back(std::string("weight '") + name + "' must be a non-negative number");
  };
  check_weight(weights.elevation, "elevation");
  check_weight(weights.north, "north");
  check_weight(weights.age, "age");
  check_weight(weights.sunlit, "sunlit");
  const bool all_zero = weights.elevation == 0.0 && weights.north == 0.0 && weights.age == 0.0 && weights.sunlit == 0.0;
  if (all_zero && noise_temperature == 0.0)
    problems.push_back("all weights are zero; set a positive noise_temperature for uniform-random mode");
  if (!(epoch_offset_s >= 0.0 && epoch_offset_s < 15.0)) problems.push_back("epoch_offset_s must lie in [0, 15)");
  if (!(min_elevation >= 0.0 && min_elevation < 90.0)) problems.push_back("min_elevation must lie in [0, 90)");
  if (!(noise_temperature >= 0.0) || !std::isfinite(noise_temperature))
    problems.push_back("noise_temperature must be non-negative");
  if (geo_exclusion) {
    const auto& g = *geo_exclusion;
    if (!(g.azimuth_min >= 0.0 && g.azimuth_min < 360.0 && g.azimuth_max >= 0.0 && g.azimuth_max < 360.0))
      problems.push_back("geo_exclusion azimuths must lie in [0, 360)");
    if (!(g.elevation_min >= 0.0 && g.elevation_min <= g.elevation_max && g.elevation_max <= 90.0))
      problems.push_back("geo_exclusion elevation range must satisfy 0 <= min <= max <= 90");
  }
  return problems;
}

SchedulerConfig SchedulerConfig::paper_mimic() {
  SchedulerConfig c;
  c.weights = {0.5, 0.2, 0.4, 0.3};
  c.noise_temperature = 0.1;
  return c;
}

SchedulerConfig SchedulerConfig::uniform() {
  SchedulerConfig c;
  c.noise_temperature = 1.0;
  return c;
}

std::vector<double> score_cohort(std::span<const orbital::SatelliteSnapshot> cohort, const SchedulerWeights& w) {
  double el_lo = std::numeric_limits<double>::infinity(), el_hi = -el_lo;
  double age_lo = el_lo, age_hi = -el_lo;
  for (const auto& s : cohort) {
    el_lo = std::min(el_lo, s.topo.elevation);
    el_hi = std::max(el_hi, s.topo.elevation);
    age_lo = std::min(age_lo, s.age_days);
    age_hi = std::max(age_hi, s.age_days);
  }
  const auto norm = [](double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; };
  std::vector<double> scores;
  scores.reserve(cohort.size());
  for (const auto& s : cohort)
    scores.push_back(w.elevation * norm(s.topo.elevation, el_lo, el_hi) + w.north * std::cos(s.topo.azimuth * kDeg) +
                     w.age * (1.0 - norm(s.age_days, age_lo, age_hi)) + w.sunlit * (s.sunlit ? 1.0 : 0.0));
  return scores;
}

ScheduleDecision schedule_slot(std::span<const orbital::SatelliteSnapshot> available, const SchedulerConfig& config,
                               std::mt19937_64& rng) {
  if (available.empty()) throw std::invalid_argument("schedule_slot: no available satellites");
  std::vector<orbital::SatelliteSnapshot> sorted(available.begin(), available.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.norad_id < b.norad_id; });

  std::vector<orbital::SatelliteSnapshot> cohort;
  if (config.geo_exclusion) {
    for (const auto& s : sorted)
      if (!config.geo_exclusion->contains(s.topo)) cohort.push_back(s);
  } else {
    cohort = sorted;
  }

  ScheduleDecision decision;
  const auto argmax = [](const std::vector<double>& scores) {
    return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
  };
  if (cohort.empty()) {
    decision.wedge_fallback = true;
    decision.norad_id = sorted[argmax(score_cohort(sorted, config.weights))].norad_id;
    return decision;
  }

  const std::vector<double> scores = score_cohort(cohort, config.weights);
  if (config.noise_temperature == 0.0) {
    decision.norad_id = cohort[argmax(scores)].norad_id;
    return decision;
  }
  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> weights(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    weights[i] = std::exp((scores[i] - top) / config.noise_temperature);
    total += weights[i];
  }
  double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  std::size_t pick = 0;
  for (; pick + 1 < weights.size(); ++pick) {
    if (u < weights[pick]) break;
    u -= weights[pick];
  }
  decision.norad_id = cohort[pick].norad_id;
  return decision;
}

}  // namespace leosched::simulator
