// Acceptance checks, one line per criterion. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "fileio.hpp"
#include "leosched/analytics/reports.hpp"
#include "leosched/matching/matching.hpp"
#include "leosched/model/forest.hpp"
#include "leosched/obstruction/pgm.hpp"
#include "leosched/orbital/geodesy.hpp"
#include "leosched/orbital/sgp4.hpp"
#include "leosched/simulator/simulator.hpp"
#include "leosched/trace/trace.hpp"

using namespace leosched;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome sgp4_reference() {
  const fs::path data = LEOSCHED_TEST_DATA;
  const auto cat = orbital::parse_tle_catalog(slurp(data / "sgp4_verification.tle"));
  std::istringstream csv(slurp(data / "sgp4_verification.csv"));
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  double worst = 0.0;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream f(line);
    int id = 0;
    double minutes = 0;
    orbital::Vec3 r{};
    f >> id >> minutes >> r[0] >> r[1] >> r[2];
    const auto rec = std::find_if(cat.records.begin(), cat.records.end(), [id](const auto& x) { return x.norad_id == id; });
    if (rec == cat.records.end()) return {false, fmt("no element set for %d", id)};
    const auto s = orbital::Sgp4(*rec).propagate_minutes(minutes);
    for (int i = 0; i < 3; ++i) worst = std::max(worst, std::fabs(s.position[i] - r[i]));
    ++rows;
  }
  return {rows == 8 && worst < 1e-3, fmt("%d vectors, worst position error %.2e km", rows, worst)};
}

Outcome geometry_round_trips() {
  int pixels = 0, mismatched = 0;
  for (auto sense : {obstruction::AzimuthSense::kClockwise, obstruction::AzimuthSense::kCounterClockwise}) {
    obstruction::MapGeometry g;
    g.sense = sense;
    for (int r = 0; r < obstruction::kMapSize; ++r)
      for (int c = 0; c < obstruction::kMapSize; ++c) {
        if (!obstruction::inside_disk({c, r}, g)) continue;
        ++pixels;
        mismatched += !(obstruction::polar_to_pixel(obstruction::pixel_to_polar({c, r}, g), g) == obstruction::Pixel{c, r});
      }
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lat(-89.0, 89.0), lon(-180.0, 180.0), el(-10.0, 89.9), az(0.0, 360.0), range(300.0, 3000.0);
  double worst = 0.0;
  for (int i = 0; i < 5000; ++i) {
    const orbital::ObserverLocation obs{lat(rng), lon(rng), 50.0};
    const orbital::Topocentric want{el(rng), az(rng), range(rng)};
    const Timestamp t = parse_iso("2022-03-20T00:00:00Z") + std::chrono::seconds(i * 997);
    orbital::SatelliteState sat;
    sat.t = t;
    sat.position = orbital::position_from_look_angles(obs, want, t);
    const auto got = orbital::look_angles(sat, obs);
    double daz = std::fabs(got.azimuth - want.azimuth);
    worst = std::max({worst, std::fabs(got.elevation - want.elevation), std::min(daz, 360.0 - daz)});
  }
  return {mismatched == 0 && pixels == 2 * 6361 && worst < 1e-6,
          fmt("%d disk pixels per sense, %d mismatches; look-angle worst %.1e deg over 5000 draws", pixels / 2, mismatched, worst)};
}

double brute_force_dtw(const matching::CartesianTrack& a, const matching::CartesianTrack& b) {
  const std::size_t n = a.points.size(), m = b.points.size();
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double acc) {
    acc += std::hypot(a.points[i].x - b.points[j].x, a.points[i].y - b.points[j].y);
    if (i + 1 == n && j + 1 == m) {
      best = std::min(best, acc);
      return;
    }
    if (i + 1 < n) walk(i + 1, j, acc);
    if (j + 1 < m) walk(i, j + 1, acc);
    if (i + 1 < n && j + 1 < m) walk(i + 1, j + 1, acc);
  };
  walk(0, 0, 0.0);
  return best;
}

Outcome dtw_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> len(1, 6);
  std::uniform_real_distribution<double> u(-60.0, 60.0);
  const auto track = [&](std::size_t n) {
    matching::CartesianTrack t;
    for (std::size_t i = 0; i < n; ++i) t.points.push_back({u(rng), u(rng)});
    return t;
  };
  int bad = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = track(len(rng)), b = track(len(rng));
    const double dp = matching::dtw_distance(a, b), bf = brute_force_dtw(a, b);
    const double rel = std::fabs(dp - bf) / std::max(1.0, bf);
    worst = std::max(worst, rel);
    bad += rel > 1e-12;
  }
  return {bad == 0, fmt("1000 pairs, %d disagreements, worst relative difference %.1e", bad, worst)};
}

Outcome end_to_end_identification() {
  const auto gen = simulator::generate_constellation([] {
    simulator::ConstellationSpec spec;
    spec.shells = {{1584, 22, 53.0, 550.0, 17}};
    spec.epoch = parse_iso("2023-03-20T12:00:00Z");
    return spec;
  }());
  const orbital::Constellation constellation(gen.tles, gen.launches);
  const orbital::ObserverLocation obs{43.07, -89.40, 270.0};
  const simulator::Terminal term{"madison", obs, -300};
  int checked = 0, correct = 0;
  Timestamp start = parse_iso("2023-03-21T00:00:12Z");
  for (int chunk = 0; checked < 500 && chunk < 20; ++chunk) {
    simulator::CampaignConfig cfg;
    cfg.start = start;
    cfg.duration_s = 800 * 15.0;
    cfg.scheduler = simulator::SchedulerConfig::paper_mimic();
    cfg.scheduler.seed = 100 + static_cast<std::uint64_t>(chunk);
    std::optional<obstruction::ObstructionMap> prev;
    simulator::run_campaign(constellation, std::span(&term, 1), cfg, [&](const simulator::GroundTruthSlot& slot) {
      const bool clean = slot.record.selected && slot.overlap_pixels == 0 && slot.trail.size() >= 3;
      if (checked < 500 && clean && prev && slot.map.slot_index == prev->slot_index + 1) {
        const auto track = obstruction::extract_track(obstruction::xor_maps(*prev, slot.map));
        const auto r = matching::identify_satellite(track, constellation, obs, slot.record.slot_start);
        ++checked;
        correct += r.best == *slot.record.selected;
      }
      prev = slot.map;
    });
    start += std::chrono::seconds(800 * 15);
  }
  const double rate = checked ? static_cast<double>(correct) / checked : 0.0;
  return {checked == 500 && rate >= 0.99, fmt("%d/%d clean slots identified (%.1f%%)", correct, checked, 100.0 * rate)};
}

Outcome epoch_detection() {
  int exact = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    trace::SyntheticTraceSpec s;
    s.start = parse_iso("2023-05-01T10:00:00Z");
    s.duration_s = 600.0;
    s.cadence_ms = 20;
    s.offset_s = 12;
    s.shift_ms = 5.0 * s.noise_sigma_ms;
    s.seed = seed;
    exact += trace::detect_offset(trace::synthetic_trace(s)).offset_s == 12;
  }
  return {exact >= 95, fmt("offset 12 found in %d/100 traces", exact)};
}

Outcome mann_whitney() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> len(3, 15), val(0, 9);
  int u_bad = 0, complement_bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(static_cast<std::size_t>(len(rng))), y(static_cast<std::size_t>(len(rng)));
    for (auto& v : x) v = val(rng);
    for (auto& v : y) v = val(rng);
    double pairs = 0.0;
    for (double a : x)
      for (double b : y) pairs += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
    const double uxy = trace::mann_whitney_u(x, y).u, uyx = trace::mann_whitney_u(y, x).u;
    u_bad += std::fabs(uxy - pairs) > 1e-9;
    complement_bad += std::fabs(uxy + uyx - static_cast<double>(x.size() * y.size())) > 1e-9;
  }
  return {u_bad == 0 && complement_bad == 0, fmt("200 pairs: %d U mismatches, %d complement failures", u_bad, complement_bad)};
}

struct Reference {
  simulator::GeneratedConstellation gen;
  orbital::Constellation constellation;
  std::vector<simulator::Terminal> terminals = simulator::reference_terminals();
  std::chrono::sys_days date{std::chrono::year{2023} / std::chrono::March / 21};
  Reference() {
    gen = simulator::generate_constellation(simulator::reference_constellation(parse_iso("2023-03-20T12:00:00Z")));
    constellation = orbital::Constellation(gen.tles, gen.launches);
  }
};

const Reference& reference() {
  static const Reference r;
  return r;
}

Outcome null_calibration() {
  const auto& ref = reference();
  const auto recs = simulator::reference_records(ref.constellation, ref.terminals, ref.date, 500, simulator::SchedulerConfig::uniform());
  const auto e = analytics::elevation_report(recs);
  const auto a = analytics::azimuth_report(recs);
  const auto l = analytics::launch_bin_report(recs, ref.gen.launches);
  const auto s = analytics::sunlit_report(recs);
  double quad = 0.0;
  for (std::size_t q = 0; q < 4; ++q) quad = std::max(quad, std::fabs(a.selected[q] - a.available[q]));
  const double sun = std::fabs(s.sunlit_pick_rate - s.sunlit_available_share);
  const bool pass = recs.size() >= 2000 && std::fabs(e.median_gap) < 2.0 && quad < 0.05 && std::fabs(l.spearman) < 0.3 && sun < 0.05;
  return {pass, fmt("%zu slots: gap %.2f deg, worst quadrant %.3f, spearman %.3f, sunlit %.3f", recs.size(), e.median_gap, quad,
                    l.spearman, sun)};
}

std::vector<model::LabeledSlot> featurized(const std::vector<analytics::SlotRecord>& recs) {
  std::map<std::string, int> tz;
  for (const auto& t : reference().terminals) tz[t.id] = t.tz_offset_minutes;
  std::vector<model::LabeledSlot> data;
  for (const auto& r : recs)
    if (r.available.size() >= 2) data.push_back(model::featurize(r, tz[r.terminal_id]));
  return data;
}

Outcome paper_shape() {
  const auto& ref = reference();
  const auto recs = simulator::reference_records(ref.constellation, ref.terminals, ref.date, 1250, simulator::SchedulerConfig::paper_mimic());
  const auto e = analytics::elevation_report(recs);
  const auto a = analytics::azimuth_report(recs);
  const auto s = analytics::sunlit_report(recs);
  const auto within = [](double got, double want) { return std::fabs(got - want) <= 0.15 * want; };
  const bool shape = within(e.median_gap, 22.9) && within(e.high_band_selected, 0.80) && within(a.north_selected, 0.82) &&
                     within(s.sunlit_pick_rate, 0.723);
  const auto data = featurized(recs);
  const auto res = model::train(data, {}, 7);
  const auto& h = *res.model.metadata.holdout;
  const auto k5 = static_cast<std::size_t>(std::find(h.ks.begin(), h.ks.end(), 5) - h.ks.begin());
  const double m5 = h.model[k5], b5 = h.baseline[k5];
  const bool learned = data.size() >= 4750 && m5 >= 2.0 * b5 && m5 >= 0.45;
  return {shape && learned,
          fmt("gap %.2f, high %.3f, north %.3f, sunlit %.3f; %zu slots, holdout top-5 %.3f vs baseline %.3f (%.2fx)", e.median_gap,
              e.high_band_selected, a.north_selected, s.sunlit_pick_rate, data.size(), m5, b5, m5 / b5)};
}

Outcome model_invariants() {
  const auto& ref = reference();
  const auto recs = simulator::reference_records(ref.constellation, ref.terminals, ref.date, 150, simulator::SchedulerConfig::paper_mimic());
  const auto data = featurized(recs);
  model::GridSpec grid;
  grid.n_trees = {10, 20};
  grid.max_depth = {4, 0};
  grid.min_samples_split = {2, 5};
  const auto first = model::train(data, grid, 11);
  const std::string bytes = model::to_json(first.model);
  const bool deterministic = model::to_json(model::train(data, grid, 11).model) == bytes &&
                             model::to_json(model::forest_from_json(bytes)) == bytes;

  int prefix_bad = 0;
  for (const auto& s : data) {
    const auto all = model::predict_topk(first.model, s.features, 1000);
    const auto base_all = model::baseline_topk(s.features, 1000);
    for (std::size_t k = 1; k <= all.size(); ++k) {
      const auto top = model::predict_topk(first.model, s.features, k);
      prefix_bad += !std::equal(top.begin(), top.end(), all.begin());
    }
    for (std::size_t k = 1; k <= base_all.size(); ++k) {
      const auto top = model::baseline_topk(s.features, k);
      prefix_bad += !std::equal(top.begin(), top.end(), base_all.begin());
    }
  }
  const auto rows = model::evaluate_topk(first.model, data, {1, 2, 3, 5, 10, 20, 50});
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i) monotone &= rows[i].model >= rows[i - 1].model && rows[i].baseline >= rows[i - 1].baseline;

  int affine_bad = 0;
  for (const auto& r : recs) {
    if (r.available.size() < 2) continue;
    const auto base = model::cluster_keys(r.available);
    auto shifted = r.available, scaled = r.available, rotated = r.available;
    for (auto& s : shifted) s.age_days += 365.25;
    for (auto& s : scaled) s.age_days *= 2.5;
    for (auto& s : rotated) s.topo.azimuth = std::fmod(s.topo.azimuth + 123.0, 360.0);
    const auto a = model::cluster_keys(shifted), b = model::cluster_keys(scaled), c = model::cluster_keys(rotated);
    for (std::size_t i = 0; i < base.size(); ++i)
      affine_bad += a[i].z_age != base[i].z_age || b[i].z_age != base[i].z_age || c[i].z_theta != base[i].z_theta;
  }
  return {deterministic && prefix_bad == 0 && monotone && affine_bad == 0,
          fmt("%zu slots: byte-identical retrain %s, %d prefix breaks, accuracy monotone %s, %d affine breaks", data.size(),
              deterministic ? "yes" : "no", prefix_bad, monotone ? "yes" : "no", affine_bad)};
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = cli::run(args, out, err);
  if (status != 0) std::fprintf(stderr, "leosched %s: %s", args.front().c_str(), err.str().c_str());
  return status;
}

Outcome format_fidelity() {
  const auto& ref = reference();
  const auto text = simulator::to_tle_text(ref.gen.tles);
  const auto cat = orbital::parse_tle_catalog(text);
  const bool tle = cat.errors.empty() && cat.records.size() == ref.gen.tles.size() && simulator::to_tle_text(cat.records) == text;

  const auto dir = fs::temp_directory_path() / "leosched_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "config.json") << R"({
    "terminals": [{"id": "mad", "latitude": 43.07, "longitude": -89.40, "altitude_m": 270, "tz_offset_minutes": -300}],
    "start": {"dusk": "2023-03-21"}, "duration_s": 1800, "scheduler": {"preset": "paper-mimic", "seed": 3}
  })";
  const auto sim = dir / "sim";
  int failures = cli({"simulate", "--config", (dir / "config.json").string(), "--out", sim.string()}) != 0;

  int maps = 0, pgm_bad = 0;
  for (const auto& e : fs::directory_iterator(sim / "maps")) {
    const auto bytes = slurp(e.path());
    ++maps;
    pgm_bad += obstruction::write_pgm(obstruction::read_pgm(bytes)) != bytes;
  }

  trace::SyntheticTraceSpec ts;
  ts.start = parse_iso("2023-03-21T03:00:00Z");
  ts.seed = 5;
  std::ofstream(dir / "trace.csv") << trace::to_trace_csv(trace::synthetic_trace(ts));

  const std::vector<std::vector<std::string>> runs{
      {"identify", "--maps", (sim / "maps").string(), "--tle", (sim / "constellation.tle").string(), "--launches",
       (sim / "launches.csv").string(), "--location", "43.07,-89.40,270", "--out", (dir / "matches.csv").string()},
      {"decode", "--maps", (sim / "maps").string(), "--out", (dir / "tracks.jsonl").string()},
      {"epochs", "--trace", (dir / "trace.csv").string(), "--out", (dir / "epochs").string(), "--plots"},
      {"analyze", "--records", (sim / "records.jsonl").string(), "--launches", (sim / "launches.csv").string(), "--out",
       (dir / "analysis").string(), "--plots"},
      {"train", "--records", (sim / "records.jsonl").string(), "--model", (dir / "model.json").string(), "--tz", "mad=-300",
       "--trees", "10", "--depths", "8,0", "--min-split", "2", "--folds", "3"},
      {"eval", "--model", (dir / "model.json").string(), "--records", (sim / "records.jsonl").string(), "--tz", "mad=-300", "--out",
       (dir / "topk.csv").string()},
  };
  for (const auto& r : runs) failures += cli(r) != 0;

  const std::vector<fs::path> manifests{sim / "manifest.json",           dir / "matches.csv.manifest.json",
                                        dir / "tracks.jsonl.manifest.json", dir / "epochs" / "manifest.json",
                                        dir / "analysis" / "manifest.json", dir / "model.json.manifest.json",
                                        dir / "topk.csv.manifest.json"};
  int replayed = 0;
  for (const auto& m : manifests) replayed += fs::exists(m) && cli({"replay", "--manifest", m.string()}) == 0;

  const bool pass = tle && maps == 120 && pgm_bad == 0 && failures == 0 && replayed == static_cast<int>(manifests.size());
  return {pass, fmt("%zu TLEs re-parse %s; %d/%d maps round-trip; %d failed runs; %d/%zu manifests replay identically",
                    cat.records.size(), tle ? "cleanly" : "with errors", maps - pgm_bad, maps, failures, replayed, manifests.size())};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    Outcome (*check)();
  };
  const Criterion criteria[] = {
      {1, "SGP4 reference vectors", 1, sgp4_reference},
      {2, "geometry round-trips", 1, geometry_round_trips},
      {3, "DTW against exhaustive alignment", 10, dtw_oracle},
      {4, "end-to-end identification", 300, end_to_end_identification},
      {5, "epoch detection", 30, epoch_detection},
      {6, "Mann-Whitney U", 5, mann_whitney},
      {7, "analytics null calibration", 120, null_calibration},
      {8, "paper-shape reproduction", 900, paper_shape},
      {9, "model invariants", 60, model_invariants},
      {10, "format fidelity", 60, format_fidelity},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.limit_s;
    failed += !pass;
    std::printf("criterion %2d %s  %s: %s [%.1fs of %.0fs]\n", c.id, pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs, c.limit_s);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", 10 - failed, std::size(criteria));
  return failed;
}
