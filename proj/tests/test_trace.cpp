#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "leosched/trace/trace.hpp"

using namespace leosched;
using trace::LatencySample;

namespace {

// Direct pair-count definition of U for x.
double brute_force_u(const std::vector<double>& x, const std::vector<double>& y) {
  double u = 0.0;
  for (double a : x)
    for (double b : y) u += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
  return u;
}

trace::SyntheticTraceSpec spec_at(double shift_sigmas, std::uint64_t seed) {
  trace::SyntheticTraceSpec s;
  s.start = parse_iso("2023-05-01T10:00:00Z");
  s.shift_ms = shift_sigmas * s.noise_sigma_ms;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("slot boundaries follow the offset") {
  const auto t = parse_iso("2023-05-01T10:00:30Z");
  CHECK(trace::slot_start_for(t, 12) == parse_iso("2023-05-01T10:00:27Z"));
  CHECK(trace::slot_start_for(parse_iso("2023-05-01T10:00:12Z"), 12) == parse_iso("2023-05-01T10:00:12Z"));
  CHECK(trace::slot_start_for(parse_iso("2023-05-01T10:00:11.999Z"), 12) == parse_iso("2023-05-01T09:59:57Z"));
  CHECK(trace::slot_start_for(parse_iso("2023-05-01T10:00:44Z"), 12) == parse_iso("2023-05-01T10:00:42Z"));
  CHECK(trace::slot_start_for(parse_iso("2023-05-01T10:00:58Z"), 12) == parse_iso("2023-05-01T10:00:57Z"));
  CHECK_THROWS_AS(trace::slot_start_for(t, 15), std::invalid_argument);
}

TEST_CASE("slicing partitions the trace") {
  std::vector<LatencySample> tr;
  const auto start = parse_iso("2023-05-01T10:00:00Z");
  for (int i = 0; i < 1500; ++i) tr.push_back({start + std::chrono::milliseconds(20 * i), 40.0 + i % 7, i % 50 == 0});
  const auto slots = trace::slice_slots(tr, 0);
  REQUIRE(slots.size() == 2);
  CHECK(slots[0].n == 750);
  CHECK(slots[1].n == 750);
  CHECK(slots[0].loss_rate == doctest::Approx(15.0 / 750));
  CHECK(slots[0].p5 <= slots[0].median);
  CHECK(slots[0].median <= slots[0].p95);

  // A sample on the boundary belongs to the later slot.
  const std::vector<LatencySample> edge{{parse_iso("2023-05-01T10:00:14.98Z"), 40, false},
                                        {parse_iso("2023-05-01T10:00:15Z"), 41, false}};
  const auto two = trace::slice_slots(edge, 0);
  REQUIRE(two.size() == 2);
  CHECK(two[1].slot_start == parse_iso("2023-05-01T10:00:15Z"));

  int total = 0;
  for (int offset = 0; offset < 15; ++offset) {
    total = 0;
    for (const auto& s : trace::slice_slots(tr, offset)) total += s.n;
    CHECK(total == 1500);
  }
  CHECK_THROWS_AS(trace::slice_slots({}, 0), std::invalid_argument);
}

TEST_CASE("mann-whitney examples") {
  const auto same = trace::mann_whitney_u({1, 2, 3, 4}, {1, 2, 3, 4});
  CHECK(same.u == doctest::Approx(8.0));
  CHECK(same.p == doctest::Approx(1.0));
  CHECK(trace::mann_whitney_u({1, 2, 3}, {10, 11, 12}).u == 0.0);
  CHECK(trace::mann_whitney_u({5, 5, 5}, {5, 5, 5}).p == 1.0);
  CHECK_THROWS_AS(trace::mann_whitney_u({1, 2}, {1, 2, 3}), std::invalid_argument);
  // Large separated samples are significant.
  std::vector<double> a, b;
  for (int i = 0; i < 50; ++i) a.push_back(i), b.push_back(i + 30);
  CHECK(trace::mann_whitney_u(a, b).p < 1e-6);
}

TEST_CASE("mann-whitney p value matches a hand computation") {
  // x = 1..5, y = 6..10: U = 0, mean 12.5, var 25*11/12, z = (12.5 - 0.5)/sqrt(22.9167) = 2.5067.
  const auto r = trace::mann_whitney_u({1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
  CHECK(r.u == 0.0);
  CHECK(r.p == doctest::Approx(std::erfc(2.50672 / std::sqrt(2.0))).epsilon(1e-4));
}

TEST_CASE("mann-whitney agrees with pair counting") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> len(3, 20), val(0, 12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(static_cast<std::size_t>(len(rng))), y(static_cast<std::size_t>(len(rng)));
    for (auto& v : x) v = val(rng);
    for (auto& v : y) v = val(rng);
    const auto uxy = trace::mann_whitney_u(x, y);
    const auto uyx = trace::mann_whitney_u(y, x);
    CHECK(uxy.u == doctest::Approx(brute_force_u(x, y)));
    CHECK(uxy.u + uyx.u == doctest::Approx(static_cast<double>(x.size() * y.size())));
    CHECK(uxy.p == doctest::Approx(uyx.p));
    CHECK(uxy.p >= 0.0);
    CHECK(uxy.p <= 1.0);
  }
}

TEST_CASE("offset detection on synthetic traces") {
  const auto tr = trace::synthetic_trace(spec_at(5.0, 11));
  const auto r = trace::detect_offset(tr);
  CHECK(r.offset_s == 12);
  CHECK(r.conclusive);

  const auto strong = trace::detect_offset(trace::synthetic_trace(spec_at(10.0, 12)));
  CHECK(strong.offset_s == 12);
  CHECK(strong.scores[12] > 0.9);
}

TEST_CASE("stationary noise is inconclusive") {
  double mean_score = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = trace::detect_offset(trace::synthetic_trace(spec_at(0.0, seed)));
    CHECK_FALSE(r.conclusive);
    for (double s : r.scores) mean_score += s / 75.0;
  }
  CHECK(mean_score < 0.1);
}

TEST_CASE("offset detection is shift equivariant") {
  auto tr = trace::synthetic_trace(spec_at(5.0, 21));
  const int base = trace::detect_offset(tr).offset_s;
  for (int d : {1, 4, 9}) {
    auto shifted = tr;
    for (auto& s : shifted) s.t += std::chrono::seconds(d);
    CHECK(trace::detect_offset(shifted).offset_s == (base + d) % 15);
  }
}

TEST_CASE("offset detection needs ten slots") {
  auto s = spec_at(5.0, 1);
  s.duration_s = 100;
  CHECK_THROWS_AS(trace::detect_offset(trace::synthetic_trace(s)), std::invalid_argument);
}

TEST_CASE("latency bands") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> a(40.0, 0.3), b(48.0, 0.3);
  std::vector<double> mix;
  for (int i = 0; i < 400; ++i) mix.push_back(i % 2 ? a(rng) : b(rng));
  auto bands = trace::detect_bands(mix);
  REQUIRE(bands.size() == 2);
  CHECK(std::abs(bands[0].center_ms - 40.0) <= 0.5);
  CHECK(std::abs(bands[1].center_ms - 48.0) <= 0.5);
  CHECK(bands[0].fraction + bands[1].fraction <= 1.0);

  bands = trace::detect_bands(std::vector<double>(60, 40.0));
  REQUIRE(bands.size() == 1);
  CHECK(bands[0].width_ms == 0.0);
  CHECK(bands[0].fraction == 1.0);

  std::uniform_real_distribution<double> flat(30.0, 60.0);
  // A full slot's worth of samples; at n = 50 the largest of 49 uniform
  // spacings exceeds 2 ms most of the time.
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> u(750);
    for (auto& v : u) v = flat(rng);
    CHECK(trace::detect_bands(u).size() == 1);
  }
}

TEST_CASE("coarser band gaps merge clusters") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> v(30.0, 70.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs(60);
    for (auto& x : xs) x = std::round(v(rng));
    double previous_cover = -1.0;
    std::size_t previous_clusters = xs.size() + 1;
    for (double gap : {0.5, 1.0, 1.5, 2.0, 3.0, 5.0}) {
      double cover = 0.0;
      for (const auto& b : trace::detect_bands(xs, gap)) cover += b.fraction;
      CHECK(cover >= previous_cover - 1e-12);
      CHECK(trace::count_clusters(xs, gap) <= previous_clusters);
      previous_cover = cover;
      previous_clusters = trace::count_clusters(xs, gap);
    }
  }
}

TEST_CASE("trace csv") {
  const auto tr = trace::parse_trace_csv("unix_ms,rtt_ms,lost\n1682935200000,41.5,0\n1682935200020,,1\n");
  REQUIRE(tr.size() == 2);
  CHECK(tr[0].rtt_ms == 41.5);
  CHECK(tr[1].lost);
  CHECK(trace::to_trace_csv(tr) == "unix_ms,rtt_ms,lost\n1682935200000,41.500,0\n1682935200020,,1\n");
  CHECK_THROWS_WITH_AS(trace::parse_trace_csv("unix_ms,rtt_ms,lost\n1,-2,0\n"), "trace line 2: rtt_ms must be positive",
                       std::invalid_argument);
  CHECK_THROWS_AS(trace::parse_trace_csv("unix_ms,rtt_ms,lost\n5,1,0\n4,1,0\n"), std::invalid_argument);
  CHECK_THROWS_AS(trace::parse_trace_csv("unix_ms,rtt_ms,lost\n5,1\n"), std::invalid_argument);
}

TEST_CASE("slot stats csv and strip plot") {
  const auto tr = trace::synthetic_trace(spec_at(5.0, 2));
  const auto slots = trace::slice_slots(tr, 12);
  CHECK(trace::slot_stats_csv_header() == "slot_start_iso,n,median_ms,p5_ms,p95_ms,loss_rate,bands");
  CHECK(trace::slot_stats_csv_row(slots[1]).rfind("2023-05-01T10:00:12Z,750,", 0) == 0);
  const auto svg = trace::strip_plot_svg(tr, 12, "demo");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
}
