#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "leosched/orbital/geodesy.hpp"
#include "leosched/simulator/simulator.hpp"

namespace leosched::simulator {

using obstruction::Pixel;

namespace {

void append_line(std::vector<Pixel>& path, Pixel a, Pixel b) {
  int dx = std::abs(b.col - a.col), dy = -std::abs(b.row - a.row);
  const int sx = a.col < b.col ? 1 : -1, sy = a.row < b.row ? 1 : -1;
  int err = dx + dy;
  Pixel p = a;
  while (true) {
    if (path.empty() || path.back() != p) path.push_back(p);
    if (p == b) break;
    const int e2 = 2 * err;
    if (e2 >= dy) { err += dy; p.col += sx; }
    if (e2 <= dx) { err += dx; p.row += sy; }
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::vector<Pixel> trail_pixels(std::span<const obstruction::PolarPoint> points, const obstruction::MapGeometry& geom) {
  std::vector<Pixel> path;
  for (const auto& pt : points) {
    if (!(pt.elevation >= geom.elevation_at_rim)) continue;
    const Pixel px = obstruction::polar_to_pixel(pt, geom);
    if (path.empty()) path.push_back(px);
    else append_line(path, path.back(), px);
  }
  // Drop corner pixels whose neighbours already touch diagonally, and
  // anything the path revisits.
  std::vector<Pixel> thin;
  for (const Pixel& p : path) {
    if (std::find(thin.begin(), thin.end(), p) != thin.end()) continue;
    thin.push_back(p);
    while (thin.size() >= 3 && obstruction::adjacent8(thin[thin.size() - 3], thin.back())) thin.erase(thin.end() - 2);
  }
  return thin;
}

std::vector<obstruction::PolarPoint> sample_pass(const orbital::Constellation::Satellite& sat,
                                                 const orbital::ObserverLocation& obs, Timestamp slot_start,
                                                 int samples, double cadence_seconds) {
  std::vector<obstruction::PolarPoint> out;
  out.reserve(static_cast<std::size_t>(std::max(samples, 0)));
  for (int i = 0; i < samples; ++i) {
    const auto state = sat.model.propagate(add_seconds(slot_start, i * cadence_seconds), -1.0);
    const auto topo = orbital::look_angles(state, obs);
    out.push_back({topo.elevation, topo.azimuth});
  }
  return out;
}

obstruction::ObstructionMap render_slot(const orbital::Constellation::Satellite& selected, Timestamp slot_start,
                                        const orbital::ObserverLocation& obs, const obstruction::MapGeometry& geom,
                                        const obstruction::ObstructionMap& prior, int samples, double cadence_seconds) {
  const auto trail = trail_pixels(sample_pass(selected, obs, slot_start, samples, cadence_seconds), geom);
  if (trail.empty())
    throw std::invalid_argument("satellite " + std::to_string(selected.tle.norad_id) + " stays below the plotted range");
  obstruction::ObstructionMap out = prior;
  for (const Pixel& p : trail) out.set(p, true);
  return out;
}

Timestamp align_to_slot(Timestamp t, double offset_s, double slot_seconds) {
  const auto slot = Micros(std::llround(slot_seconds * 1e6));
  const auto offset = Micros(std::llround(offset_s * 1e6));
  if (slot.count() <= 0) throw std::invalid_argument("slot length must be positive");
  const long long since = (t.time_since_epoch() - offset).count();
  long long k = since / slot.count();
  if (k * slot.count() < since) ++k;
  return Timestamp(offset + Micros(k * slot.count()));
}

CampaignSummary run_campaign(const orbital::Constellation& constellation, std::span<const Terminal> terminals,
                             const CampaignConfig& config, const std::function<void(const GroundTruthSlot&)>& emit) {
  if (const auto problems = config.scheduler.validate(); !problems.empty())
    throw std::invalid_argument("scheduler config: " + problems.front());
  if (!(config.slot_seconds > 0.0) || config.reset_every_slots <= 0 || config.duration_s < 0.0)
    throw std::invalid_argument("campaign needs a positive slot length and reset period");

  CampaignSummary summary;
  const Timestamp first = align_to_slot(config.start, config.scheduler.epoch_offset_s, config.slot_seconds);
  const Timestamp end = add_seconds(config.start, config.duration_s);
  const int samples = static_cast<int>(std::lround(config.slot_seconds));
  orbital::VisibilityOptions vis_opts;
  vis_opts.min_elevation = config.scheduler.min_elevation;
  vis_opts.max_tle_age_days = config.max_tle_age_days;

  for (std::size_t ti = 0; ti < terminals.size(); ++ti) {
    const Terminal& term = terminals[ti];
    term.location.validate();
    std::mt19937_64 rng(splitmix64(config.scheduler.seed ^ splitmix64(ti + 1)));
    obstruction::ObstructionMap map;
    map.terminal_id = term.id;
    int k = 0;
    for (Timestamp t = first; t < end; t = add_seconds(t, config.slot_seconds), ++k) {
      GroundTruthSlot slot;
      slot.terminal_index = static_cast<int>(ti);
      const int slot_index = k % config.reset_every_slots;
      if (slot_index == 0) map.clear();
      map.captured_at = add_seconds(t, config.slot_seconds);
      map.slot_index = slot_index;

      auto vis = orbital::visible_satellites(constellation, term.location, t, vis_opts);
      slot.record.terminal_id = term.id;
      slot.record.slot_start = t;
      slot.record.available = std::move(vis.visible);
      ++summary.slots;
      if (slot.record.available.empty()) {
        ++summary.empty_slots;
      } else {
        const auto decision = schedule_slot(slot.record.available, config.scheduler, rng);
        slot.record.selected = decision.norad_id;
        slot.wedge_fallback = decision.wedge_fallback;
        if (decision.wedge_fallback) ++summary.wedge_fallbacks;
        if (config.render_maps) {
          const auto* sat = constellation.find(decision.norad_id);
          slot.trail = trail_pixels(sample_pass(*sat, term.location, t, samples, 1.0), config.geometry);
          if (slot.trail.empty()) ++summary.render_failures;
          for (const Pixel& p : slot.trail) {
            if (map.at(p)) ++slot.overlap_pixels;
            map.set(p, true);
          }
        }
      }
      slot.map = map;
      if (emit) emit(slot);
    }
  }
  return summary;
}

ConstellationSpec reference_constellation(Timestamp epoch, std::uint64_t seed) {
  ConstellationSpec spec;
  spec.shells = {{1584, 22, 53.0, 550.0, 17}};
  spec.epoch = epoch;
  spec.seed = seed;
  return spec;
}

std::vector<Terminal> reference_terminals() {
  return {{"seattle", {47.61, -122.33, 50.0}, -420},
          {"madison", {43.07, -89.40, 270.0}, -300},
          {"ithaca", {42.44, -76.50, 120.0}, -240},
          {"london", {51.51, -0.13, 20.0}, 0}};
}

Timestamp dusk_start(std::chrono::sys_days date, double longitude_deg) {
  return add_seconds(Timestamp(date), (18.5 - longitude_deg / 15.0) * 3600.0);
}

std::vector<analytics::SlotRecord> reference_records(const orbital::Constellation& constellation,
                                                     std::span<const Terminal> terminals, std::chrono::sys_days date,
                                                     int slots_per_terminal, const SchedulerConfig& scheduler) {
  std::vector<analytics::SlotRecord> out;
  for (std::size_t i = 0; i < terminals.size(); ++i) {
    CampaignConfig cfg;
    cfg.scheduler = scheduler;
    cfg.scheduler.seed = scheduler.seed + i;
    cfg.render_maps = false;
    cfg.duration_s = slots_per_terminal * cfg.slot_seconds;
    cfg.start = align_to_slot(dusk_start(date, terminals[i].location.longitude), scheduler.epoch_offset_s);
    run_campaign(constellation, terminals.subspan(i, 1), cfg, [&](const GroundTruthSlot& s) {
      if (s.record.selected) out.push_back(s.record);
    });
  }
  return out;
}

}  // namespace leosched::simulator
