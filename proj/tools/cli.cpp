#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "fileio.hpp"
#include "json.hpp"
#include "leosched/analytics/reports.hpp"
#include "leosched/matching/matching.hpp"
#include "leosched/model/forest.hpp"
#include "leosched/obstruction/pgm.hpp"
#include "leosched/simulator/simulator.hpp"
#include "leosched/trace/trace.hpp"

#ifndef LEOSCHED_VERSION
#define LEOSCHED_VERSION "0.0.0"
#endif

namespace leosched::cli {

namespace {

using nlohmann::json;

constexpr double kSlotSeconds = 15.0;

struct Options {
  std::string maps, tle, location, out, azimuth_sense = "cw", terminal, launches;
  std::string trace, records, model, config, manifest;
  std::uint64_t seed = 1;
  int tz_offset = 0;
  std::vector<std::string> tz;
  std::string k = "1,3,5";
  std::string trees = "50,100,200", depths = "4,8,16,0", min_split = "2,5";
  int folds = 5;
  double max_tle_age = 7.0;
  double boresight = 0.0;
  bool plots = false;
};

// What a finished subcommand read and wrote, for the manifest.
struct RunLog {
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  json config = json::object();
  std::optional<std::uint64_t> seed;
  fs::path manifest;
};

struct Io {
  std::ostream& out;
  std::ostream& err;
};

void emit(RunLog& log, const fs::path& path, const std::string& content) {
  write_atomic(path, content);
  log.outputs.push_back(path);
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw InputError(std::string("bad ") + what + " list '" + text + "'");
    }
  }
  if (out.empty()) throw InputError(std::string("empty ") + what + " list");
  return out;
}

orbital::ObserverLocation parse_location(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  } catch (const std::exception&) {
    throw InputError("bad --location '" + text + "', expected LAT,LON,ALT_M");
  }
  if (v.size() != 3) throw InputError("bad --location '" + text + "', expected LAT,LON,ALT_M");
  orbital::ObserverLocation obs{v[0], v[1], v[2]};
  try {
    obs.validate();
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  return obs;
}

obstruction::MapGeometry geometry_for(const std::string& sense) {
  obstruction::MapGeometry g;
  if (sense == "ccw") g.sense = obstruction::AzimuthSense::kCounterClockwise;
  else if (sense != "cw") throw InputError("--azimuth-sense must be cw or ccw");
  return g;
}

orbital::Constellation load_constellation(const Options& o, RunLog& log, Io io) {
  if (!fs::exists(o.tle)) throw InputError("TLE file not found: " + o.tle);
  const auto catalog = orbital::parse_tle_catalog(read_file(o.tle));
  log.inputs.push_back(o.tle);
  for (const auto& e : catalog.errors) io.err << o.tle << ": line " << e.line << ": " << e.message << "\n";
  if (catalog.records.empty()) throw InputError("no usable TLE records in " + o.tle);
  orbital::LaunchCatalog launches;
  if (!o.launches.empty()) {
    launches = orbital::LaunchCatalog::parse_csv(read_file(o.launches));
    log.inputs.push_back(o.launches);
  }
  orbital::Constellation c(catalog.records, launches);
  for (const auto& r : c.rejected()) io.err << "skipped: " << r << "\n";
  return c;
}

// One decoded slot difference, or the reason there is none.
struct DiffSlot {
  obstruction::MapFileName name;
  fs::path file;
  std::optional<obstruction::ObstructionMap> diff;
  std::string error_kind, error;
};

std::vector<DiffSlot> collect_diffs(const Options& o, RunLog& log) {
  if (!fs::is_directory(o.maps)) throw InputError("maps directory not found: " + o.maps);
  std::vector<std::pair<obstruction::MapFileName, fs::path>> files;
  std::set<std::string> terminals;
  for (const auto& entry : fs::directory_iterator(o.maps)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".pgm") continue;
    const auto name = obstruction::parse_map_filename(entry.path().filename().string());
    if (!name) continue;
    if (!o.terminal.empty() && name->terminal_id != o.terminal) continue;
    terminals.insert(name->terminal_id);
    files.emplace_back(*name, entry.path());
  }
  if (files.empty()) throw InputError("no maps found in " + o.maps);
  if (terminals.size() > 1) {
    std::string list;
    for (const auto& t : terminals) list += (list.empty() ? "" : ", ") + t;
    throw InputError("maps from several terminals (" + list + "); choose one with --terminal");
  }
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first.unix_seconds, a.first.slot_index) < std::tie(b.first.unix_seconds, b.first.slot_index);
  });

  std::vector<DiffSlot> out;
  std::optional<obstruction::ObstructionMap> prev;
  std::optional<obstruction::MapFileName> prev_name;
  for (const auto& [name, path] : files) {
    DiffSlot slot{name, path, std::nullopt, "", ""};
    std::optional<obstruction::ObstructionMap> map;
    try {
      map = obstruction::read_pgm(read_file(path));
      log.inputs.push_back(path);
      map->terminal_id = name.terminal_id;
      map->slot_index = name.slot_index;
      map->captured_at = from_unix_seconds(static_cast<double>(name.unix_seconds));
    } catch (const std::exception& e) {
      slot.error_kind = "ReadError";
      slot.error = e.what();
      out.push_back(slot);
      prev.reset();
      continue;
    }
    if (name.slot_index == 0) {
      slot.diff = *map;  // first map after a reset: everything on it is new
    } else if (prev && prev_name->slot_index + 1 == name.slot_index &&
               name.unix_seconds - prev_name->unix_seconds == static_cast<std::int64_t>(kSlotSeconds)) {
      slot.diff = obstruction::xor_maps(*prev, *map);
    } else {
      slot.error_kind = "MissingPredecessor";
      slot.error = "no map for the previous slot";
    }
    out.push_back(slot);
    prev = map;
    prev_name = name;
  }
  return out;
}

std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string sidecar_header() { return "terminal_id,slot_index,unix_seconds,file,error,message\n"; }
std::string sidecar_row(const DiffSlot& s, const std::string& kind, const std::string& message) {
  return csv_field(s.name.terminal_id) + "," + std::to_string(s.name.slot_index) + "," + std::to_string(s.name.unix_seconds) +
         "," + csv_field(s.file.filename().string()) + "," + kind + "," + csv_field(message) + "\n";
}

fs::path errors_path_for(const fs::path& out) {
  return out.parent_path() / (out.stem().string() + ".errors.csv");
}

int cmd_identify(const Options& o, RunLog& log, Io io) {
  const auto geom = geometry_for(o.azimuth_sense);
  const auto obs = parse_location(o.location);
  const auto constellation = load_constellation(o, log, io);
  const auto slots = collect_diffs(o, log);
  matching::MatchConfig mc;
  mc.max_tle_age_days = o.max_tle_age;
  std::string csv = matching::match_csv_header() + "\n", errors = sidecar_header();
  int matched = 0, failed = 0;
  for (const auto& s : slots) {
    if (!s.diff) {
      errors += sidecar_row(s, s.error_kind, s.error);
      ++failed;
      continue;
    }
    const Timestamp slot_start = from_unix_seconds(static_cast<double>(s.name.unix_seconds) - kSlotSeconds);
    try {
      auto track = obstruction::extract_track(*s.diff, geom);
      track.slot_index = s.name.slot_index;
      track.terminal_id = s.name.terminal_id;
      const auto r = matching::identify_satellite(track, constellation, obs, slot_start, mc);
      csv += matching::match_csv_row(s.name.terminal_id, slot_start, r) + "\n";
      ++matched;
    } catch (const obstruction::DecodeError& e) {
      errors += sidecar_row(s, obstruction::to_string(e.kind()), e.what());
      ++failed;
    } catch (const matching::NoCandidates& e) {
      errors += sidecar_row(s, "NoCandidates", e.what());
      ++failed;
    }
  }
  emit(log, o.out, csv);
  emit(log, errors_path_for(o.out), errors);
  log.manifest = o.out + ".manifest.json";
  log.config = {{"location", o.location}, {"azimuth_sense", o.azimuth_sense}, {"terminal", o.terminal}, {"max_tle_age_days", o.max_tle_age}};
  io.out << "identified " << matched << " slots, " << failed << " without a match (see " << errors_path_for(o.out).string() << ")\n";
  return 0;
}

int cmd_decode(const Options& o, RunLog& log, Io io) {
  const auto geom = geometry_for(o.azimuth_sense);
  std::string jsonl;
  int ok = 0, bad = 0;
  for (const auto& s : collect_diffs(o, log)) {
    json j = {{"terminal_id", s.name.terminal_id}, {"slot_index", s.name.slot_index}, {"unix_seconds", s.name.unix_seconds}};
    if (!s.diff) {
      j["status"] = s.error_kind;
      j["message"] = s.error;
      ++bad;
    } else {
      try {
        const auto track = obstruction::extract_track(*s.diff, geom);
        j["status"] = "ok";
        json pts = json::array(), px = json::array();
        for (const auto& p : track.points) pts.push_back({p.elevation, p.azimuth});
        for (const auto& p : track.pixels) px.push_back({p.col, p.row});
        j["points"] = pts;
        j["pixels"] = px;
        ++ok;
      } catch (const obstruction::DecodeError& e) {
        j["status"] = obstruction::to_string(e.kind());
        j["message"] = e.what();
        ++bad;
      }
    }
    jsonl += j.dump() + "\n";
  }
  emit(log, o.out, jsonl);
  log.manifest = o.out + ".manifest.json";
  log.config = {{"azimuth_sense", o.azimuth_sense}, {"terminal", o.terminal}};
  io.out << "decoded " << ok << " tracks, " << bad << " slots without a track\n";
  return 0;
}

int cmd_epochs(const Options& o, RunLog& log, Io io) {
  if (!fs::exists(o.trace)) throw InputError("trace file not found: " + o.trace);
  std::vector<trace::LatencySample> tr;
  try {
    tr = trace::parse_trace_csv(read_file(o.trace));
  } catch (const std::invalid_argument& e) {
    throw InputError(o.trace + ": " + e.what());
  }
  log.inputs.push_back(o.trace);
  trace::OffsetDetection det;
  try {
    det = trace::detect_offset(tr);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const fs::path dir = o.out;
  std::string offsets = "offset_s,score,between,within\n";
  char buf[96];
  for (int i = 0; i < 15; ++i) {
    const auto u = static_cast<std::size_t>(i);
    std::snprintf(buf, sizeof buf, "%d,%.4f,%.4f,%.4f\n", i, det.scores[u], det.between[u], det.within[u]);
    offsets += buf;
  }
  emit(log, dir / "offsets.csv", offsets);
  emit(log, dir / "detection.json",
       json({{"offset_s", det.offset_s}, {"conclusive", det.conclusive}, {"score", det.scores[static_cast<std::size_t>(det.offset_s)]}}).dump(2) + "\n");
  std::string slots = trace::slot_stats_csv_header() + "\n";
  for (const auto& s : trace::slice_slots(tr, det.offset_s)) slots += trace::slot_stats_csv_row(s) + "\n";
  emit(log, dir / "slots.csv", slots);
  if (o.plots) emit(log, dir / "strip.svg", trace::strip_plot_svg(tr, det.offset_s, fs::path(o.trace).filename().string()));
  log.manifest = dir / "manifest.json";
  log.config = {{"plots", o.plots}};
  io.out << "offset " << det.offset_s << " s past the quarter minute (" << (det.conclusive ? "conclusive" : "inconclusive") << ")\n";
  return 0;
}

std::vector<analytics::SlotRecord> load_records(const std::string& path, RunLog& log, Io io) {
  if (!fs::exists(path)) throw InputError("records file not found: " + path);
  auto load = analytics::parse_slot_records(read_file(path));
  log.inputs.push_back(path);
  for (const auto& e : load.errors) io.err << path << ": " << e << "\n";
  if (!load.errors.empty()) throw InputError(std::to_string(load.errors.size()) + " malformed records in " + path);
  if (load.records.empty()) throw InputError("no records with a selection in " + path);
  return std::move(load.records);
}

int cmd_analyze(const Options& o, RunLog& log, Io io) {
  const auto records = load_records(o.records, log, io);
  orbital::LaunchCatalog launches;
  if (!fs::exists(o.launches)) throw InputError("launch catalog not found: " + o.launches);
  try {
    launches = orbital::LaunchCatalog::parse_csv(read_file(o.launches));
  } catch (const std::invalid_argument& e) {
    throw InputError(o.launches + ": " + e.what());
  }
  log.inputs.push_back(o.launches);
  const fs::path dir = o.out;
  const auto e = analytics::elevation_report(records);
  const auto a = analytics::azimuth_report(records, o.boresight);
  const auto l = analytics::launch_bin_report(records, launches);
  std::optional<analytics::SunlitReport> s;
  try {
    s = analytics::sunlit_report(records);
  } catch (const std::invalid_argument& ex) {
    io.err << "sunlit report skipped: " << ex.what() << "\n";
  }
  if (l.unresolved_slots) io.err << l.unresolved_slots << " slots selected satellites missing from the launch catalog\n";
  emit(log, dir / "summary.csv", analytics::summary_csv(e, a, &l, s ? &*s : nullptr));
  emit(log, dir / "elevation_cdf.csv", analytics::elevation_cdf_csv(e));
  emit(log, dir / "azimuth.csv", analytics::azimuth_csv(a));
  emit(log, dir / "launch_bins.csv", analytics::launch_bin_csv(l));
  if (o.plots) {
    emit(log, dir / "elevation_cdf.svg", analytics::cdf_plot_svg(e.selected, e.available, "Elevation of selected vs available satellites", "elevation (deg)", 25, 90));
  }
  log.manifest = dir / "manifest.json";
  log.config = {{"boresight_offset_deg", o.boresight}, {"plots", o.plots}};
  io.out << "analyzed " << e.slots << " slots: median elevation gap " << e.median_gap << " deg, north share "
         << a.north_selected << "\n";
  return 0;
}

std::map<std::string, int> tz_table(const Options& o) {
  std::map<std::string, int> t;
  for (const auto& entry : o.tz) {
    const auto eq = entry.rfind('=');
    try {
      if (eq == std::string::npos || eq == 0) throw std::invalid_argument("");
      t[entry.substr(0, eq)] = std::stoi(entry.substr(eq + 1));
    } catch (const std::exception&) {
      throw InputError("bad --tz '" + entry + "', expected TERMINAL=MINUTES");
    }
  }
  return t;
}

// Accepts SlotRecord or already featurized JSON-lines.
std::vector<model::LabeledSlot> load_labeled(const Options& o, RunLog& log, Io io) {
  if (!fs::exists(o.records)) throw InputError("records file not found: " + o.records);
  const auto text = read_file(o.records);
  const auto first = text.substr(0, text.find('\n'));
  std::vector<model::LabeledSlot> out;
  if (first.find("\"available\"") == std::string::npos) {
    auto load = model::parse_labeled_slots(text);
    for (const auto& e : load.errors) io.err << o.records << ": " << e << "\n";
    if (!load.errors.empty()) throw InputError(std::to_string(load.errors.size()) + " malformed lines in " + o.records);
    out = std::move(load.slots);
  } else {
    const auto records = load_records(o.records, log, io);
    log.inputs.pop_back();
    const auto tz = tz_table(o);
    int small = 0;
    for (const auto& r : records) {
      if (r.available.size() < 2) {
        ++small;
        continue;
      }
      const auto it = tz.find(r.terminal_id);
      out.push_back(model::featurize(r, it == tz.end() ? o.tz_offset : it->second));
    }
    if (small) io.err << small << " slots with a single visible satellite skipped\n";
  }
  log.inputs.push_back(o.records);
  return out;
}

int cmd_train(const Options& o, RunLog& log, Io io) {
  model::GridSpec grid;
  grid.n_trees = parse_int_list(o.trees, "--trees");
  grid.max_depth = parse_int_list(o.depths, "--depths");
  grid.min_samples_split = parse_int_list(o.min_split, "--min-split");
  grid.folds = o.folds;
  const auto data = load_labeled(o, log, io);
  model::TrainResult result;
  try {
    result = model::train(data, grid, o.seed);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  emit(log, o.model, model::to_json(result.model));
  log.manifest = o.model + ".manifest.json";
  log.seed = o.seed;
  log.config = {{"trees", grid.n_trees}, {"depths", grid.max_depth}, {"min_split", grid.min_samples_split},
                {"folds", grid.folds}, {"tz_offset", o.tz_offset}, {"tz", o.tz}};
  const auto& p = result.model.params;
  io.out << "chose " << p.n_trees << " trees, max depth " << (p.max_depth ? std::to_string(p.max_depth) : "unbounded")
         << ", min split " << p.min_samples_split << "\n";
  if (const auto& h = result.model.metadata.holdout) {
    for (std::size_t i = 0; i < h->ks.size(); ++i)
      io.out << "holdout top-" << h->ks[i] << ": model " << h->model[i] << ", baseline " << h->baseline[i] << "\n";
  }
  return 0;
}

int cmd_eval(const Options& o, RunLog& log, Io io) {
  if (!fs::exists(o.model)) throw InputError("model file not found: " + o.model);
  model::RandomForest forest;
  try {
    forest = model::forest_from_json(read_file(o.model));
  } catch (const std::invalid_argument& e) {
    throw InputError(o.model + ": " + e.what());
  }
  log.inputs.push_back(o.model);
  const auto data = load_labeled(o, log, io);
  std::vector<std::size_t> ks;
  for (int k : parse_int_list(o.k, "--k")) {
    if (k < 1) throw InputError("--k values must be at least 1");
    ks.push_back(static_cast<std::size_t>(k));
  }
  if (data.empty()) throw InputError("no usable slots in " + o.records);
  int dropped = 0;
  for (const auto& s : data) forest.encode(s.features, &dropped);
  if (dropped) io.err << "warning: " << dropped << " satellites fell in clusters unseen during training\n";
  const auto rows = model::evaluate_topk(forest, data, ks);
  emit(log, o.out, model::topk_csv(rows));
  log.manifest = o.out + ".manifest.json";
  log.config = {{"k", o.k}, {"tz_offset", o.tz_offset}, {"tz", o.tz}};
  for (const auto& r : rows) io.out << "top-" << r.k << ": model " << r.model << ", baseline " << r.baseline << "\n";
  return 0;
}

// ---- simulate -------------------------------------------------------------

struct SimulationPlan {
  simulator::ConstellationSpec constellation;
  std::vector<simulator::Terminal> terminals;
  simulator::CampaignConfig campaign;
  std::optional<std::chrono::sys_days> dusk_date;
};

template <typename T>
std::optional<T> get(const json& j, const char* key, const std::string& where, std::vector<std::string>& problems) {
  if (!j.contains(key)) return std::nullopt;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    problems.push_back(where + key + ": wrong type");
    return std::nullopt;
  }
}

void check_keys(const json& j, std::initializer_list<const char*> known, const std::string& where, std::vector<std::string>& problems) {
  for (const auto& [k, v] : j.items()) {
    if (std::find_if(known.begin(), known.end(), [&](const char* s) { return k == s; }) == known.end())
      problems.push_back(where + "unknown key '" + k + "'");
  }
}

SimulationPlan parse_simulation(const json& cfg, std::vector<std::string>& problems) {
  SimulationPlan plan;
  if (!cfg.is_object()) {
    problems.push_back("config must be a JSON object");
    return plan;
  }
  check_keys(cfg, {"constellation", "terminals", "start", "duration_s", "scheduler", "render_maps", "reset_every_slots", "max_tle_age_days", "azimuth_sense"}, "", problems);

  const json con = cfg.value("constellation", json::object());
  check_keys(con, {"preset", "shells", "epoch", "seed", "first_norad_id", "launches"}, "constellation.", problems);
  Timestamp epoch = parse_iso("2023-03-20T12:00:00Z");
  if (auto e = get<std::string>(con, "epoch", "constellation.", problems)) {
    try {
      epoch = parse_iso(*e);
    } catch (const std::exception&) {
      problems.push_back("constellation.epoch: not an ISO-8601 UTC time");
    }
  }
  plan.constellation = simulator::reference_constellation(epoch);
  if (auto p = get<std::string>(con, "preset", "constellation.", problems); p && *p != "reference")
    problems.push_back("constellation.preset: only 'reference' is known");
  if (con.contains("shells")) {
    plan.constellation.shells.clear();
    if (!con["shells"].is_array() || con["shells"].empty()) problems.push_back("constellation.shells: must be a non-empty array");
    else
      for (std::size_t i = 0; i < con["shells"].size(); ++i) {
        const auto& s = con["shells"][i];
        const std::string where = "constellation.shells[" + std::to_string(i) + "].";
        check_keys(s, {"count", "planes", "inclination", "altitude_km", "phasing"}, where, problems);
        simulator::ShellSpec shell;
        shell.count = get<int>(s, "count", where, problems).value_or(0);
        shell.planes = get<int>(s, "planes", where, problems).value_or(0);
        shell.inclination = get<double>(s, "inclination", where, problems).value_or(53.0);
        shell.altitude_km = get<double>(s, "altitude_km", where, problems).value_or(550.0);
        shell.phasing = get<int>(s, "phasing", where, problems).value_or(1);
        if (shell.count <= 0 || shell.planes <= 0) problems.push_back(where + "count and planes must be positive");
        else if (shell.count % shell.planes) problems.push_back(where + "count must be divisible by planes");
        if (shell.altitude_km < 200 || shell.altitude_km > 2000) problems.push_back(where + "altitude_km must lie in [200, 2000]");
        if (shell.inclination < 0 || shell.inclination > 180) problems.push_back(where + "inclination must lie in [0, 180]");
        if (shell.planes > 0 && (shell.phasing < 0 || shell.phasing >= shell.planes)) problems.push_back(where + "phasing must lie in [0, planes)");
        plan.constellation.shells.push_back(shell);
      }
  }
  plan.constellation.seed = get<std::uint64_t>(con, "seed", "constellation.", problems).value_or(1);
  plan.constellation.first_norad_id = get<int>(con, "first_norad_id", "constellation.", problems).value_or(44000);
  if (con.contains("launches")) {
    const auto& l = con["launches"];
    check_keys(l, {"first", "count", "spacing_days"}, "constellation.launches.", problems);
    if (auto f = get<std::string>(l, "first", "constellation.launches.", problems)) {
      try {
        plan.constellation.launches.first = std::chrono::floor<std::chrono::days>(parse_iso(*f + "T00:00:00Z"));
      } catch (const std::exception&) {
        problems.push_back("constellation.launches.first: expected YYYY-MM-DD");
      }
    }
    plan.constellation.launches.count = get<int>(l, "count", "constellation.launches.", problems).value_or(48);
    plan.constellation.launches.spacing_days = get<int>(l, "spacing_days", "constellation.launches.", problems).value_or(30);
    if (plan.constellation.launches.count < 1) problems.push_back("constellation.launches.count: must be positive");
    if (plan.constellation.launches.spacing_days < 0) problems.push_back("constellation.launches.spacing_days: must be >= 0");
  }

  if (cfg.contains("terminals")) {
    if (!cfg["terminals"].is_array() || cfg["terminals"].empty()) problems.push_back("terminals: must be a non-empty array");
    else
      for (std::size_t i = 0; i < cfg["terminals"].size(); ++i) {
        const auto& t = cfg["terminals"][i];
        const std::string where = "terminals[" + std::to_string(i) + "].";
        check_keys(t, {"id", "latitude", "longitude", "altitude_m", "tz_offset_minutes"}, where, problems);
        simulator::Terminal term;
        term.id = get<std::string>(t, "id", where, problems).value_or("");
        if (term.id.empty() || term.id.find_first_of("/\\ ") != std::string::npos) problems.push_back(where + "id must be a non-empty name without spaces or slashes");
        if (!t.contains("latitude") || !t.contains("longitude")) problems.push_back(where + "latitude and longitude are required");
        term.location = {get<double>(t, "latitude", where, problems).value_or(0.0), get<double>(t, "longitude", where, problems).value_or(0.0),
                         get<double>(t, "altitude_m", where, problems).value_or(0.0)};
        try {
          term.location.validate();
        } catch (const std::exception& e) {
          problems.push_back(where + e.what());
        }
        term.tz_offset_minutes = get<int>(t, "tz_offset_minutes", where, problems).value_or(0);
        plan.terminals.push_back(term);
      }
  } else {
    plan.terminals = simulator::reference_terminals();
  }

  auto& camp = plan.campaign;
  if (!cfg.contains("start")) problems.push_back("start: required (ISO time or {\"dusk\": \"YYYY-MM-DD\"})");
  else if (cfg["start"].is_string()) {
    try {
      camp.start = parse_iso(cfg["start"].get<std::string>());
    } catch (const std::exception&) {
      problems.push_back("start: not an ISO-8601 UTC time");
    }
  } else if (cfg["start"].is_object() && cfg["start"].contains("dusk") && cfg["start"]["dusk"].is_string()) {
    try {
      plan.dusk_date = std::chrono::floor<std::chrono::days>(parse_iso(cfg["start"]["dusk"].get<std::string>() + "T00:00:00Z"));
    } catch (const std::exception&) {
      problems.push_back("start.dusk: expected YYYY-MM-DD");
    }
  } else {
    problems.push_back("start: expected an ISO time or {\"dusk\": \"YYYY-MM-DD\"}");
  }
  camp.duration_s = get<double>(cfg, "duration_s", "", problems).value_or(3600.0);
  if (!(camp.duration_s > 0.0)) problems.push_back("duration_s: must be positive");
  camp.render_maps = get<bool>(cfg, "render_maps", "", problems).value_or(true);
  camp.reset_every_slots = get<int>(cfg, "reset_every_slots", "", problems).value_or(40);
  if (camp.reset_every_slots < 1) problems.push_back("reset_every_slots: must be positive");
  camp.max_tle_age_days = get<double>(cfg, "max_tle_age_days", "", problems).value_or(7.0);
  if (auto s = get<std::string>(cfg, "azimuth_sense", "", problems)) {
    if (*s == "ccw") camp.geometry.sense = obstruction::AzimuthSense::kCounterClockwise;
    else if (*s != "cw") problems.push_back("azimuth_sense: must be cw or ccw");
  }

  const json sch = cfg.value("scheduler", json::object());
  check_keys(sch, {"preset", "weights", "noise_temperature", "epoch_offset_s", "min_elevation", "geo_exclusion", "seed"}, "scheduler.", problems);
  auto& sc = camp.scheduler;
  sc = simulator::SchedulerConfig::paper_mimic();
  if (auto p = get<std::string>(sch, "preset", "scheduler.", problems)) {
    if (*p == "uniform") sc = simulator::SchedulerConfig::uniform();
    else if (*p != "paper-mimic") problems.push_back("scheduler.preset: must be paper-mimic or uniform");
  }
  if (sch.contains("weights")) {
    const auto& w = sch["weights"];
    check_keys(w, {"elevation", "north", "age", "sunlit"}, "scheduler.weights.", problems);
    sc.weights.elevation = get<double>(w, "elevation", "scheduler.weights.", problems).value_or(0.0);
    sc.weights.north = get<double>(w, "north", "scheduler.weights.", problems).value_or(0.0);
    sc.weights.age = get<double>(w, "age", "scheduler.weights.", problems).value_or(0.0);
    sc.weights.sunlit = get<double>(w, "sunlit", "scheduler.weights.", problems).value_or(0.0);
  }
  sc.noise_temperature = get<double>(sch, "noise_temperature", "scheduler.", problems).value_or(sc.noise_temperature);
  sc.epoch_offset_s = get<double>(sch, "epoch_offset_s", "scheduler.", problems).value_or(sc.epoch_offset_s);
  sc.min_elevation = get<double>(sch, "min_elevation", "scheduler.", problems).value_or(sc.min_elevation);
  sc.seed = get<std::uint64_t>(sch, "seed", "scheduler.", problems).value_or(sc.seed);
  if (sch.contains("geo_exclusion")) {
    const auto& g = sch["geo_exclusion"];
    const std::string where = "scheduler.geo_exclusion.";
    check_keys(g, {"azimuth_min", "azimuth_max", "elevation_min", "elevation_max"}, where, problems);
    simulator::GeoExclusion ge;
    ge.azimuth_min = get<double>(g, "azimuth_min", where, problems).value_or(0.0);
    ge.azimuth_max = get<double>(g, "azimuth_max", where, problems).value_or(0.0);
    ge.elevation_min = get<double>(g, "elevation_min", where, problems).value_or(0.0);
    ge.elevation_max = get<double>(g, "elevation_max", where, problems).value_or(90.0);
    sc.geo_exclusion = ge;
  }
  for (const auto& p : sc.validate()) problems.push_back("scheduler: " + p);
  return plan;
}

int cmd_simulate(const Options& o, RunLog& log, Io io) {
  if (!fs::exists(o.config)) throw InputError("config file not found: " + o.config);
  json cfg;
  try {
    cfg = json::parse(read_file(o.config));
  } catch (const json::exception& e) {
    throw InputError(o.config + ": invalid JSON: " + e.what());
  }
  log.inputs.push_back(o.config);
  std::vector<std::string> problems;
  auto plan = parse_simulation(cfg, problems);
  if (!problems.empty()) {
    for (const auto& p : problems) io.err << o.config << ": " << p << "\n";
    throw InputError(std::to_string(problems.size()) + " problem(s) in " + o.config);
  }
  const fs::path dir = o.out;
  const auto gen = simulator::generate_constellation(plan.constellation);
  emit(log, dir / "constellation.tle", simulator::to_tle_text(gen.tles));
  emit(log, dir / "launches.csv", gen.launches.to_csv());
  std::string terminals = "terminal_id,latitude,longitude,altitude_m,tz_offset_minutes\n";
  for (const auto& t : plan.terminals) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.1f,%d\n", t.id.c_str(), t.location.latitude, t.location.longitude,
                  t.location.altitude, t.tz_offset_minutes);
    terminals += buf;
  }
  emit(log, dir / "terminals.csv", terminals);

  const orbital::Constellation constellation(gen.tles, gen.launches);
  std::string records, truth = "terminal_id,slot_start_iso,slot_index,selected,overlap_pixels,wedge_fallback,map_file\n";
  simulator::CampaignSummary total;
  const auto on_slot = [&](const simulator::GroundTruthSlot& s) {
    records += analytics::to_json_line(s.record) + "\n";
    std::string file;
    if (plan.campaign.render_maps) {
      file = obstruction::format_map_filename({s.record.terminal_id, s.map.slot_index,
                                               static_cast<std::int64_t>(std::llround(to_unix_seconds(s.map.captured_at)))});
      emit(log, dir / "maps" / file, obstruction::write_pgm(s.map));
    }
    truth += s.record.terminal_id + "," + format_iso(s.record.slot_start) + "," + std::to_string(s.map.slot_index) + "," +
             (s.record.selected ? std::to_string(*s.record.selected) : "") + "," + std::to_string(s.overlap_pixels) + "," +
             (s.wedge_fallback ? "1" : "0") + "," + file + "\n";
  };
  const auto add = [&](const simulator::CampaignSummary& s) {
    total.slots += s.slots;
    total.empty_slots += s.empty_slots;
    total.wedge_fallbacks += s.wedge_fallbacks;
    total.render_failures += s.render_failures;
  };
  if (plan.dusk_date) {
    for (std::size_t i = 0; i < plan.terminals.size(); ++i) {
      auto camp = plan.campaign;
      camp.start = simulator::align_to_slot(simulator::dusk_start(*plan.dusk_date, plan.terminals[i].location.longitude),
                                            camp.scheduler.epoch_offset_s);
      camp.scheduler.seed = plan.campaign.scheduler.seed + i;
      add(simulator::run_campaign(constellation, std::span(plan.terminals).subspan(i, 1), camp, on_slot));
    }
  } else {
    add(simulator::run_campaign(constellation, plan.terminals, plan.campaign, on_slot));
  }
  emit(log, dir / "records.jsonl", records);
  emit(log, dir / "ground_truth.csv", truth);
  emit(log, dir / "summary.json",
       json({{"satellites", gen.tles.size()}, {"slots", total.slots}, {"empty_slots", total.empty_slots},
             {"wedge_fallbacks", total.wedge_fallbacks}, {"render_failures", total.render_failures}})
               .dump(2) + "\n");
  log.manifest = dir / "manifest.json";
  log.config = cfg;
  log.seed = plan.campaign.scheduler.seed;
  io.out << "simulated " << total.slots << " slots over " << plan.terminals.size() << " terminals (" << total.empty_slots
         << " without a visible satellite)\n";
  return 0;
}

// ---- manifests --------------------------------------------------------------

json path_entries(const std::vector<fs::path>& paths) {
  json a = json::array();
  for (const auto& p : paths) a.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
  return a;
}

void write_manifest(const std::string& subcommand, const std::vector<std::string>& args, const RunLog& log, double wall) {
  json m = {{"manifest_version", 1},
            {"tool", "leosched"},
            {"tool_version", LEOSCHED_VERSION},
            {"subcommand", subcommand},
            {"args", args},
            {"cwd", fs::current_path().string()},
            {"inputs", path_entries(log.inputs)},
            {"outputs", path_entries(log.outputs)},
            {"config", log.config},
            {"seed", log.seed ? json(*log.seed) : json(nullptr)},
            {"wall_time_s", wall}};
  write_atomic(log.manifest, m.dump(2) + "\n");
}

int cmd_replay(const Options& o, Io io) {
  if (!fs::exists(o.manifest)) throw InputError("manifest not found: " + o.manifest);
  json m;
  try {
    m = json::parse(read_file(o.manifest));
  } catch (const json::exception& e) {
    throw InputError(o.manifest + ": invalid JSON: " + e.what());
  }
  std::vector<std::string> args;
  fs::path cwd;
  try {
    args = m.at("args").get<std::vector<std::string>>();
    cwd = m.at("cwd").get<std::string>();
  } catch (const json::exception&) {
    throw InputError(o.manifest + ": not a run manifest");
  }
  if (!args.empty() && args.front() == "replay") throw InputError("refusing to replay a replay");
  const fs::path saved = fs::current_path();
  fs::current_path(cwd);
  int mismatches = 0;
  try {
    for (const auto& in : m.at("inputs"))
      if (!fs::exists(in.at("path").get<std::string>()) || sha256_file(in.at("path").get<std::string>()) != in.at("sha256").get<std::string>()) {
        io.err << "input changed since the recorded run: " << in.at("path").get<std::string>() << "\n";
        ++mismatches;
      }
    std::ostringstream sink;
    const int status = run(args, sink, io.err);
    if (status != 0) {
      fs::current_path(saved);
      io.err << "replayed run failed with status " << status << "\n";
      return 1;
    }
    for (const auto& out : m.at("outputs")) {
      const auto path = out.at("path").get<std::string>();
      if (!fs::exists(path) || sha256_file(path) != out.at("sha256").get<std::string>()) {
        io.err << "output differs: " << path << "\n";
        ++mismatches;
      }
    }
    io.out << "replayed " << m.at("subcommand").get<std::string>() << ": " << m.at("outputs").size() << " outputs, "
           << mismatches << " mismatches\n";
  } catch (...) {
    fs::current_path(saved);
    throw;
  }
  fs::current_path(saved);
  return mismatches ? 1 : 0;
}

// ---- command tree -----------------------------------------------------------

std::unique_ptr<CLI::App> build(Options& o) {
  auto app = std::make_unique<CLI::App>("Identify serving LEO satellites from obstruction maps and study the scheduler.", "leosched");
  app->set_version_flag("--version", LEOSCHED_VERSION, "Print the version and exit");
  app->require_subcommand(1);

  auto* id = app->add_subcommand("identify", "Match each slot's new trail against SGP4 candidates");
  id->add_option("--maps", o.maps, "Directory of <terminal>_<slot>_<unix>.pgm maps")->required();
  id->add_option("--tle", o.tle, "TLE catalog (2- or 3-line)")->required();
  id->add_option("--location", o.location, "Terminal position as LAT,LON,ALT_M")->required();
  id->add_option("--out", o.out, "Output CSV; failures go to <stem>.errors.csv next to it")->required();
  id->add_option("--azimuth-sense", o.azimuth_sense, "Map azimuth direction: cw or ccw")->capture_default_str();
  id->add_option("--terminal", o.terminal, "Only use maps of this terminal");
  id->add_option("--launches", o.launches, "Launch catalog CSV (norad_id,launch_date)");
  id->add_option("--max-tle-age", o.max_tle_age, "Skip TLEs older than this many days (negative: no limit)")->capture_default_str();

  auto* dec = app->add_subcommand("decode", "Extract the new trail of every slot as polar points");
  dec->add_option("--maps", o.maps, "Directory of <terminal>_<slot>_<unix>.pgm maps")->required();
  dec->add_option("--out", o.out, "Output JSON-lines file")->required();
  dec->add_option("--azimuth-sense", o.azimuth_sense, "Map azimuth direction: cw or ccw")->capture_default_str();
  dec->add_option("--terminal", o.terminal, "Only use maps of this terminal");

  auto* ep = app->add_subcommand("epochs", "Find the reallocation offset in an RTT trace");
  ep->add_option("--trace", o.trace, "Trace CSV with columns unix_ms,rtt_ms,lost")->required();
  ep->add_option("--out", o.out, "Output directory")->required();
  ep->add_flag("--plots", o.plots, "Also write an SVG strip plot");

  auto* an = app->add_subcommand("analyze", "Scheduler preference statistics from slot records");
  an->add_option("--records", o.records, "SlotRecord JSON-lines")->required();
  an->add_option("--launches", o.launches, "Launch catalog CSV (norad_id,launch_date)")->required();
  an->add_option("--out", o.out, "Output directory")->required();
  an->add_option("--boresight-offset", o.boresight, "Dish boresight azimuth in degrees, subtracted before quadrant binning")->capture_default_str();
  an->add_flag("--plots", o.plots, "Also write SVG CDF plots");

  auto* tr = app->add_subcommand("train", "Fit the random-forest scheduler model");
  tr->add_option("--records", o.records, "SlotRecord or labeled-slot JSON-lines")->required();
  tr->add_option("--model", o.model, "Output model JSON")->required();
  tr->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  tr->add_option("--tz-offset", o.tz_offset, "Local time offset from UTC in minutes")->capture_default_str();
  tr->add_option("--tz", o.tz, "Per-terminal offset TERMINAL=MINUTES (repeatable)");
  tr->add_option("--trees", o.trees, "Grid of forest sizes")->capture_default_str();
  tr->add_option("--depths", o.depths, "Grid of maximum depths, 0 = unbounded")->capture_default_str();
  tr->add_option("--min-split", o.min_split, "Grid of minimum node sizes for splitting")->capture_default_str();
  tr->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str()->check(CLI::Range(2, 50));

  auto* ev = app->add_subcommand("eval", "Top-k accuracy of a model against the availability baseline");
  ev->add_option("--model", o.model, "Model JSON from train")->required();
  ev->add_option("--records", o.records, "SlotRecord or labeled-slot JSON-lines")->required();
  ev->add_option("--k", o.k, "Comma-separated k values")->capture_default_str();
  ev->add_option("--out", o.out, "Output CSV (k,model_acc,baseline_acc)")->required();
  ev->add_option("--tz-offset", o.tz_offset, "Local time offset from UTC in minutes")->capture_default_str();
  ev->add_option("--tz", o.tz, "Per-terminal offset TERMINAL=MINUTES (repeatable)");

  auto* sim = app->add_subcommand("simulate", "Run a synthetic constellation and scheduler campaign");
  sim->add_option("--config", o.config, "Campaign config JSON")->required();
  sim->add_option("--out", o.out, "Output directory")->required();

  auto* rp = app->add_subcommand("replay", "Re-run a recorded invocation and compare its outputs");
  rp->add_option("--manifest", o.manifest, "Manifest written by an earlier run")->required();
  return app;
}

}  // namespace

std::unique_ptr<CLI::App> describe() {
  static Options sink;
  return build(sink);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  auto app = build(o);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app->parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app->exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  const auto* sub = app->get_subcommands().front();
  const std::string name = sub->get_name();
  const Io io{out, err};
  RunLog log;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    int status = 0;
    if (name == "identify") status = cmd_identify(o, log, io);
    else if (name == "decode") status = cmd_decode(o, log, io);
    else if (name == "epochs") status = cmd_epochs(o, log, io);
    else if (name == "analyze") status = cmd_analyze(o, log, io);
    else if (name == "train") status = cmd_train(o, log, io);
    else if (name == "eval") status = cmd_eval(o, log, io);
    else if (name == "simulate") status = cmd_simulate(o, log, io);
    else if (name == "replay") return cmd_replay(o, io);
    if (status == 0 && !log.manifest.empty())
      write_manifest(name, args, log, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return status;
  } catch (const InputError& e) {
    err << "leosched " << name << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "leosched " << name << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace leosched::cli
