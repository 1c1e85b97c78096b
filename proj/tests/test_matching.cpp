#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "leosched/matching/matching.hpp"
#include "leosched/simulator/simulator.hpp"

using namespace leosched;
using matching::CartesianTrack;
using matching::Point2;

namespace {

CartesianTrack line(std::initializer_list<std::pair<double, double>> pts) {
  CartesianTrack t;
  for (auto [x, y] : pts) t.points.push_back({x, y});
  return t;
}

double cost(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Exhaustive minimum over every monotone alignment path from (0,0) to (n-1,m-1).
double brute_force_dtw(const CartesianTrack& a, const CartesianTrack& b) {
  const std::size_t n = a.points.size(), m = b.points.size();
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double acc) {
    acc += cost(a.points[i], b.points[j]);
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

CartesianTrack random_track(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-60.0, 60.0);
  CartesianTrack t;
  for (std::size_t i = 0; i < n; ++i) t.points.push_back({u(rng), u(rng)});
  return t;
}

}  // namespace

TEST_CASE("dtw small examples") {
  const auto a = line({{0, 0}, {1, 0}, {2, 0}});
  CHECK(matching::dtw_distance(a, a) == 0.0);
  // Repeating a point costs nothing.
  CHECK(matching::dtw_distance(a, line({{0, 0}, {1, 0}, {1, 0}, {2, 0}})) == doctest::Approx(0.0));
  // 1-D sequences 1,2,3 vs 2,2,2,2 give |1-2| + 0 + 0 + 0 + |3-2| = 2.
  CHECK(matching::dtw_distance(line({{1, 0}, {2, 0}, {3, 0}}), line({{2, 0}, {2, 0}, {2, 0}, {2, 0}})) ==
        doctest::Approx(2.0));
  // Shifted by a constant offset of 3 in y: each of the 3 matched pairs costs 3.
  CHECK(matching::dtw_distance(a, line({{0, 3}, {1, 3}, {2, 3}})) == doctest::Approx(9.0));
}

TEST_CASE("dtw agrees with exhaustive alignment search") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> len(1, 6);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = random_track(rng, len(rng));
    const auto b = random_track(rng, len(rng));
    const double d = matching::dtw_distance(a, b);
    CHECK(d == doctest::Approx(brute_force_dtw(a, b)).epsilon(1e-12));
    CHECK(d == doctest::Approx(matching::dtw_distance(b, a)).epsilon(1e-12));
    CHECK(d >= 0.0);
  }
}

TEST_CASE("dtw rejects empty tracks") {
  CHECK_THROWS_AS(matching::dtw_distance(CartesianTrack{}, line({{0, 0}})), std::invalid_argument);
}

TEST_CASE("arc-length resampling") {
  const auto l = line({{0, 0}, {10, 0}, {10, 10}});
  const auto r = matching::resample_arc_length(l, 5);
  REQUIRE(r.points.size() == 5);
  CHECK(r.points[0].x == 0.0);
  CHECK(r.points[1].x == doctest::Approx(5.0));
  CHECK(r.points[2].x == doctest::Approx(10.0));
  CHECK(r.points[2].y == doctest::Approx(0.0));
  CHECK(r.points[3].y == doctest::Approx(5.0));
  CHECK(r.points[4].y == doctest::Approx(10.0));

  // Degenerate inputs: a single point is repeated.
  const auto single = matching::resample_arc_length(line({{3, 4}}), 15);
  REQUIRE(single.points.size() == 15);
  CHECK(single.points[14].x == 3.0);
}

TEST_CASE("to_cartesian projects the polar plane") {
  const std::vector<obstruction::PolarPoint> pts{{90.0, 0.0}, {30.0, 90.0}, {60.0, 180.0}};
  const auto c = matching::to_cartesian(pts);
  CHECK(c.points[0].x == doctest::Approx(0.0));
  CHECK(c.points[1].x == doctest::Approx(60.0));
  CHECK(c.points[1].y == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(c.points[2].y == doctest::Approx(-30.0));
}

namespace {

struct Scene {
  simulator::GeneratedConstellation gen;
  orbital::Constellation constellation;
  orbital::ObserverLocation obs{47.6, -122.3, 50.0};
  Timestamp start = parse_iso("2023-03-21T02:00:00Z");

  Scene() {
    simulator::ConstellationSpec spec;
    spec.shells = {{1584, 22, 53.0, 550.0, 17}};
    spec.epoch = parse_iso("2023-03-20T12:00:00Z");
    gen = simulator::generate_constellation(spec);
    constellation = orbital::Constellation(gen.tles, gen.launches);
  }
};

const Scene& scene() {
  static const Scene s;
  return s;
}

}  // namespace

TEST_CASE("identify a clean simulated track, either direction") {
  const auto& s = scene();
  simulator::CampaignConfig cfg;
  cfg.start = s.start;
  cfg.duration_s = 160 * 15.0;
  cfg.scheduler = simulator::SchedulerConfig::paper_mimic();
  const simulator::Terminal term{"t1", s.obs, 0};

  std::optional<obstruction::ObstructionMap> prev;
  int checked = 0, correct = 0;
  simulator::run_campaign(s.constellation, std::span(&term, 1), cfg, [&](const simulator::GroundTruthSlot& slot) {
    const bool clean = slot.record.selected && slot.overlap_pixels == 0 && slot.trail.size() >= 3;
    if (clean && prev && slot.map.slot_index == prev->slot_index + 1) {
      const auto diff = obstruction::xor_maps(*prev, slot.map);
      const auto track = obstruction::extract_track(diff);
      const auto result = matching::identify_satellite(track, s.constellation, s.obs, slot.record.slot_start);
      ++checked;
      correct += result.best == *slot.record.selected;
      CHECK(result.candidates_considered >= 1);
      CHECK(result.margin >= 0.0);

      auto flipped = track;
      std::reverse(flipped.points.begin(), flipped.points.end());
      std::reverse(flipped.pixels.begin(), flipped.pixels.end());
      const auto again = matching::identify_satellite(flipped, s.constellation, s.obs, slot.record.slot_start);
      CHECK(again.best == result.best);
      CHECK(again.best_distance == doctest::Approx(result.best_distance));
    }
    prev = slot.map;
  });
  CHECK(checked >= 20);
  CHECK(correct == checked);
}

TEST_CASE("no candidates above the mask") {
  orbital::Constellation empty;
  obstruction::PolarTrack track;
  track.points = {{60.0, 10.0}, {61.0, 12.0}};
  CHECK_THROWS_AS(matching::identify_satellite(track, empty, {0, 0, 0}, parse_iso("2023-01-01T00:00:00Z")),
                  matching::NoCandidates);
}

TEST_CASE("match csv row") {
  matching::MatchResult r;
  r.best = 44123;
  r.best_distance = 12.5;
  r.margin = std::numeric_limits<double>::infinity();
  r.candidates_considered = 1;
  const auto row = matching::match_csv_row("term", parse_iso("2023-01-01T00:00:12Z"), r);
  CHECK(row.find("term,2023-01-01T00:00:12Z,44123,") == 0);
  CHECK(row.find(",inf,forward,1") != std::string::npos);
  CHECK(matching::match_csv_header() == "terminal_id,slot_start_iso,norad_id,distance,margin,orientation,candidates");
}
