#include "leosched/model/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace leosched::model {

namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t tree_seed(std::uint64_t seed, int index) { return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index) + 1)); }

// Column-major design matrix with class indices.
struct Matrix {
  std::size_t rows = 0;
  std::vector<std::vector<double>> columns;
  std::vector<int> y;
  int classes = 0;
};

struct Encoding {
  std::vector<ClusterKey> feature_keys;
  std::vector<ClusterKey> classes;
};

Encoding encoding_for(const std::vector<const LabeledSlot*>& data) {
  std::set<ClusterKey> keys, labels;
  for (const auto* s : data) {
    for (const auto& [k, n] : s->features.counts) keys.insert(k);
    labels.insert(s->label);
  }
  return {{keys.begin(), keys.end()}, {labels.begin(), labels.end()}};
}

Matrix build_matrix(const std::vector<const LabeledSlot*>& data, const Encoding& enc) {
  Matrix m;
  m.rows = data.size();
  m.columns.assign(enc.feature_keys.size() + 1, std::vector<double>(m.rows, 0.0));
  m.classes = static_cast<int>(enc.classes.size());
  std::map<ClusterKey, std::size_t> col;
  for (std::size_t i = 0; i < enc.feature_keys.size(); ++i) col[enc.feature_keys[i]] = i;
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (const auto& [k, n] : data[r]->features.counts)
      if (auto it = col.find(k); it != col.end()) m.columns[it->second][r] = n;
    m.columns.back()[r] = data[r]->features.t_local;
    const auto c = std::lower_bound(enc.classes.begin(), enc.classes.end(), data[r]->label);
    m.y.push_back(c != enc.classes.end() && *c == data[r]->label ? static_cast<int>(c - enc.classes.begin()) : -1);
  }
  return m;
}

// Tree grown to purity; every node keeps its depth, size and histogram so
// shallower or coarser trees are truncations of it.
struct FullTree {
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1, right = -1;
    int depth = 0;
    int n = 0;
    std::vector<std::pair<int, int>> counts;
  };
  std::vector<Node> nodes;
};

class Grower {
 public:
  Grower(const Matrix& m, int max_depth, int min_split) : m_(m), max_depth_(max_depth), min_split_(min_split) {
    features_per_split_ = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m.columns.size()))));
  }

  FullTree grow(std::uint64_t seed) {
    std::mt19937_64 boot(splitmix64(seed ^ 0xB007B007B007B007ULL));
    std::uniform_int_distribution<std::size_t> pick(0, m_.rows - 1);
    std::vector<std::size_t> sample(m_.rows);
    for (auto& s : sample) s = pick(boot);
    FullTree t;
    t.nodes.reserve(2 * m_.rows);
    grow_node(t, sample, 0, splitmix64(seed));
    return t;
  }

 private:
  int grow_node(FullTree& t, std::vector<std::size_t>& sample, int depth, std::uint64_t node_seed) {
    const int id = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    std::vector<int> hist(static_cast<std::size_t>(m_.classes), 0);
    for (auto s : sample) ++hist[static_cast<std::size_t>(m_.y[s])];
    {
      auto& node = t.nodes.back();
      node.depth = depth;
      node.n = static_cast<int>(sample.size());
      for (int c = 0; c < m_.classes; ++c)
        if (hist[static_cast<std::size_t>(c)]) node.counts.emplace_back(c, hist[static_cast<std::size_t>(c)]);
    }
    const bool pure = t.nodes[static_cast<std::size_t>(id)].counts.size() <= 1;
    if (pure || static_cast<int>(sample.size()) < min_split_ || (max_depth_ > 0 && depth >= max_depth_)) return id;

    const auto split = best_split(sample, hist, node_seed);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left, right;
    const auto& col = m_.columns[static_cast<std::size_t>(split.feature)];
    for (auto s : sample) (col[s] <= split.threshold ? left : right).push_back(s);
    std::vector<std::size_t>().swap(sample);
    const int l = grow_node(t, left, depth + 1, splitmix64(node_seed ^ 0x1111111111111111ULL));
    const int r = grow_node(t, right, depth + 1, splitmix64(node_seed ^ 0x2222222222222222ULL));
    auto& node = t.nodes[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  struct Split {
    int feature = -1;
    double threshold = 0.0;
  };

  Split best_split(const std::vector<std::size_t>& sample, const std::vector<int>& hist, std::uint64_t node_seed) {
    std::mt19937_64 rng(node_seed);
    const std::size_t F = m_.columns.size();
    std::vector<std::size_t> order(F);
    std::iota(order.begin(), order.end(), 0);
    const std::size_t m = std::min(features_per_split_, F);
    for (std::size_t i = 0; i < m; ++i) {
      std::uniform_int_distribution<std::size_t> d(i, F - 1);
      std::swap(order[i], order[d(rng)]);
    }
    const double n = static_cast<double>(sample.size());
    double parent_sq = 0.0;
    for (int h : hist) parent_sq += static_cast<double>(h) * h;
    double best = n - parent_sq / n;  // n * gini(parent)
    const double parent = best;
    Split out;
    std::vector<std::pair<double, int>> vals(sample.size());
    std::vector<int> left(hist.size());
    for (std::size_t fi = 0; fi < m; ++fi) {
      const std::size_t f = order[fi];
      const auto& col = m_.columns[f];
      for (std::size_t i = 0; i < sample.size(); ++i) vals[i] = {col[sample[i]], m_.y[sample[i]]};
      std::sort(vals.begin(), vals.end());
      if (vals.front().first == vals.back().first) continue;
      std::fill(left.begin(), left.end(), 0);
      double left_sq = 0.0, right_sq = parent_sq;
      for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        const auto c = static_cast<std::size_t>(vals[i].second);
        const int lc = left[c], rc = hist[c] - lc;
        left_sq += 2.0 * lc + 1.0;
        right_sq -= 2.0 * rc - 1.0;
        ++left[c];
        if (vals[i].first == vals[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1), nr = n - nl;
        const double impurity = (nl - left_sq / nl) + (nr - right_sq / nr);
        if (impurity < best - 1e-12) {
          best = impurity;
          out = {static_cast<int>(f), 0.5 * (vals[i].first + vals[i + 1].first)};
        }
      }
    }
    if (!(best < parent - 1e-12)) return {};
    return out;
  }

  const Matrix& m_;
  int max_depth_;
  int min_split_;
  std::size_t features_per_split_;
};

Tree truncate(const FullTree& full, int max_depth, int min_split) {
  Tree t;
  const auto add = [&](int old) {
    const auto& n = full.nodes[static_cast<std::size_t>(old)];
    const bool leaf = n.feature < 0 || (max_depth > 0 && n.depth >= max_depth) || n.n < min_split;
    const int id = static_cast<int>(t.feature.size());
    t.feature.push_back(leaf ? -1 : n.feature);
    t.threshold.push_back(leaf ? 0.0 : n.threshold);
    t.left.push_back(-1);
    t.right.push_back(-1);
    t.counts.push_back(leaf ? n.counts : std::vector<std::pair<int, int>>{});
    return std::pair{id, leaf};
  };
  std::function<int(int)> visit = [&](int old) {
    const auto [id, leaf] = add(old);
    if (!leaf) {
      const int l = visit(full.nodes[static_cast<std::size_t>(old)].left);
      const int r = visit(full.nodes[static_cast<std::size_t>(old)].right);
      t.left[static_cast<std::size_t>(id)] = l;
      t.right[static_cast<std::size_t>(id)] = r;
    }
    return id;
  };
  visit(0);
  return t;
}

int leaf_of(const Tree& t, const std::vector<double>& x) {
  int node = 0;
  while (t.feature[static_cast<std::size_t>(node)] >= 0) {
    const auto i = static_cast<std::size_t>(node);
    node = x[static_cast<std::size_t>(t.feature[i])] <= t.threshold[i] ? t.left[i] : t.right[i];
  }
  return node;
}

void add_leaf(const Tree& t, int leaf, std::vector<double>& acc) {
  const auto& counts = t.counts[static_cast<std::size_t>(leaf)];
  double total = 0.0;
  for (const auto& [c, n] : counts) total += n;
  if (total <= 0.0) return;
  for (const auto& [c, n] : counts) acc[static_cast<std::size_t>(c)] += n / total;
}

std::vector<std::size_t> ranking(const std::vector<double>& p) {
  std::vector<std::size_t> idx(p.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return p[a] > p[b]; });
  return idx;
}

std::vector<std::size_t> check_ks(std::vector<std::size_t> ks) {
  for (auto k : ks)
    if (k == 0) throw std::invalid_argument("k must be at least 1");
  return ks;
}

}  // namespace

std::vector<double> RandomForest::encode(const FeatureVector& f, int* dropped) const {
  std::vector<double> x(feature_count(), 0.0);
  for (const auto& [k, n] : f.counts) {
    const auto it = std::lower_bound(feature_keys.begin(), feature_keys.end(), k);
    if (it != feature_keys.end() && *it == k) x[static_cast<std::size_t>(it - feature_keys.begin())] = n;
    else if (dropped) *dropped += n;
  }
  x.back() = f.t_local;
  return x;
}

std::vector<double> RandomForest::probabilities(const FeatureVector& f) const {
  const auto x = encode(f);
  std::vector<double> p(classes.size(), 0.0);
  for (const auto& t : trees) add_leaf(t, leaf_of(t, x), p);
  if (!trees.empty())
    for (auto& v : p) v /= static_cast<double>(trees.size());
  return p;
}

RandomForest fit_forest(const std::vector<LabeledSlot>& data, const ForestParams& params) {
  if (data.empty()) throw std::invalid_argument("cannot fit a forest on an empty dataset");
  if (params.n_trees < 1 || params.max_depth < 0 || params.min_samples_split < 2)
    throw std::invalid_argument("forest needs n_trees >= 1, max_depth >= 0 and min_samples_split >= 2");
  std::vector<const LabeledSlot*> ptrs;
  for (const auto& s : data) ptrs.push_back(&s);
  const auto enc = encoding_for(ptrs);
  const auto m = build_matrix(ptrs, enc);
  RandomForest f;
  f.params = params;
  f.feature_keys = enc.feature_keys;
  f.classes = enc.classes;
  Grower grower(m, params.max_depth, params.min_samples_split);
  for (int i = 0; i < params.n_trees; ++i)
    f.trees.push_back(truncate(grower.grow(tree_seed(params.seed, i)), params.max_depth, params.min_samples_split));
  f.metadata.train_size = static_cast<int>(data.size());
  return f;
}

std::vector<ClusterKey> predict_topk(const RandomForest& forest, const FeatureVector& f, std::size_t k) {
  std::vector<ClusterKey> out;
  for (auto i : ranking(forest.probabilities(f))) {
    if (out.size() >= k) break;
    out.push_back(forest.classes[i]);
  }
  return out;
}

std::vector<TopkRow> evaluate_topk(const RandomForest& forest, const std::vector<LabeledSlot>& data,
                                   const std::vector<std::size_t>& ks_in) {
  if (data.empty()) throw std::invalid_argument("cannot evaluate on an empty dataset");
  const auto ks = check_ks(ks_in);
  const std::size_t kmax = ks.empty() ? 0 : *std::max_element(ks.begin(), ks.end());
  std::vector<TopkRow> rows;
  for (auto k : ks) rows.push_back({k, 0.0, 0.0});
  for (const auto& s : data) {
    const auto model = predict_topk(forest, s.features, kmax);
    const auto base = baseline_topk(s.features, kmax);
    const auto rank_of = [&](const std::vector<ClusterKey>& v) {
      return static_cast<std::size_t>(std::find(v.begin(), v.end(), s.label) - v.begin());
    };
    const auto rm = rank_of(model), rb = rank_of(base);
    for (auto& r : rows) {
      r.model += rm < r.k && rm < model.size();
      r.baseline += rb < r.k && rb < base.size();
    }
  }
  for (auto& r : rows) {
    r.model /= static_cast<double>(data.size());
    r.baseline /= static_cast<double>(data.size());
  }
  return rows;
}

std::string topk_csv(const std::vector<TopkRow>& rows) {
  std::string out = "k,model_acc,baseline_acc\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.4f,%.4f\n", r.k, r.model, r.baseline);
    out += buf;
  }
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(const std::vector<LabeledSlot>& data,
                                                                               double holdout_fraction,
                                                                               std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) throw std::invalid_argument("holdout fraction must lie in (0, 1)");
  std::map<ClusterKey, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < data.size(); ++i) by_label[data[i].label].push_back(i);
  std::mt19937_64 rng(splitmix64(seed ^ 0x5B1175B1175B1175ULL));
  std::vector<std::size_t> train, hold;
  for (auto& [label, idx] : by_label) {
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_hold = idx.size() < 2 ? 0 : static_cast<std::size_t>(std::llround(holdout_fraction * static_cast<double>(idx.size())));
    hold.insert(hold.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_hold));
    train.insert(train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_hold), idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(hold.begin(), hold.end());
  return {train, hold};
}

TrainResult train(const std::vector<LabeledSlot>& data, const GridSpec& grid, std::uint64_t seed) {
  if (data.size() < 100) throw std::invalid_argument("training needs at least 100 labeled slots");
  {
    std::set<ClusterKey> labels;
    for (const auto& s : data) labels.insert(s.label);
    if (labels.size() < 2) throw std::invalid_argument("training needs at least 2 distinct labels");
  }
  if (grid.n_trees.empty() || grid.max_depth.empty() || grid.min_samples_split.empty() || grid.folds < 2)
    throw std::invalid_argument("grid needs at least one value per axis and 2 folds");
  for (int v : grid.n_trees) if (v < 1) throw std::invalid_argument("grid tree counts must be positive");
  for (int v : grid.max_depth) if (v < 0) throw std::invalid_argument("grid depths must be >= 0 (0 = unbounded)");
  for (int v : grid.min_samples_split) if (v < 2) throw std::invalid_argument("grid min_samples_split must be >= 2");

  const auto [train_idx, hold_idx] = stratified_split(data, grid.holdout_fraction, seed);

  // Stratified fold labels over the training part.
  std::vector<int> fold(train_idx.size());
  {
    std::map<ClusterKey, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < train_idx.size(); ++i) by_label[data[train_idx[i]].label].push_back(i);
    std::mt19937_64 rng(splitmix64(seed ^ 0xF01DF01DF01DF01DULL));
    int next = 0;
    for (auto& [label, idx] : by_label) {
      std::shuffle(idx.begin(), idx.end(), rng);
      for (auto i : idx) fold[i] = next++ % grid.folds;
    }
  }

  // One forest of the largest size per fold, grown without limits; every
  // grid point is a prefix of its trees, truncated at predict time.
  const int max_trees = *std::max_element(grid.n_trees.begin(), grid.n_trees.end());
  std::vector<std::pair<int, int>> shapes;
  for (int d : grid.max_depth)
    for (int s : grid.min_samples_split) shapes.emplace_back(d, s);
  std::map<std::tuple<int, int, int>, double> correct;  // (trees, depth, split) -> summed fold accuracy

  for (int f = 0; f < grid.folds; ++f) {
    std::vector<const LabeledSlot*> fit, val;
    for (std::size_t i = 0; i < train_idx.size(); ++i) (fold[i] == f ? val : fit).push_back(&data[train_idx[i]]);
    if (fit.empty() || val.empty()) continue;
    const auto enc = encoding_for(fit);
    const auto m = build_matrix(fit, enc);
    RandomForest shell;
    shell.feature_keys = enc.feature_keys;
    std::vector<std::vector<double>> xs;
    for (const auto* s : val) xs.push_back(shell.encode(s->features));
    std::vector<int> truth;
    for (const auto* s : val) {
      const auto it = std::lower_bound(enc.classes.begin(), enc.classes.end(), s->label);
      truth.push_back(it != enc.classes.end() && *it == s->label ? static_cast<int>(it - enc.classes.begin()) : -1);
    }
    std::vector<std::vector<std::vector<double>>> acc(shapes.size(),
                                                      std::vector<std::vector<double>>(val.size(), std::vector<double>(enc.classes.size(), 0.0)));
    Grower grower(m, 0, 2);
    for (int t = 0; t < max_trees; ++t) {
      const auto full = grower.grow(tree_seed(seed, t));
      for (std::size_t si = 0; si < shapes.size(); ++si) {
        const auto tree = truncate(full, shapes[si].first, shapes[si].second);
        for (std::size_t v = 0; v < val.size(); ++v) add_leaf(tree, leaf_of(tree, xs[v]), acc[si][v]);
      }
      if (std::find(grid.n_trees.begin(), grid.n_trees.end(), t + 1) == grid.n_trees.end()) continue;
      for (std::size_t si = 0; si < shapes.size(); ++si) {
        int hits = 0;
        for (std::size_t v = 0; v < val.size(); ++v)
          hits += truth[v] >= 0 && static_cast<int>(ranking(acc[si][v]).front()) == truth[v];
        correct[{t + 1, shapes[si].first, shapes[si].second}] += static_cast<double>(hits) / static_cast<double>(val.size());
      }
    }
  }

  TrainResult out;
  TrainingMetadata meta;
  const GridPoint* best = nullptr;
  for (int n : grid.n_trees)
    for (const auto& [d, s] : shapes) meta.grid.push_back({n, d, s, correct[{n, d, s}] / grid.folds});
  for (const auto& g : meta.grid)
    if (!best || g.cv_top1 > best->cv_top1) best = &g;

  std::vector<LabeledSlot> train_set;
  for (auto i : train_idx) train_set.push_back(data[i]);
  for (auto i : hold_idx) out.holdout.push_back(data[i]);
  out.model = fit_forest(train_set, {best->n_trees, best->max_depth, best->min_samples_split, seed});
  meta.train_size = static_cast<int>(train_set.size());
  if (!out.holdout.empty()) {
    HoldoutMetrics h;
    h.n = static_cast<int>(out.holdout.size());
    for (const auto& row : evaluate_topk(out.model, out.holdout, {1, 2, 3, 5, 10})) {
      h.ks.push_back(row.k);
      h.model.push_back(row.model);
      h.baseline.push_back(row.baseline);
    }
    meta.holdout = h;
  }
  out.model.metadata = meta;
  return out;
}

namespace {

json key_json(const ClusterKey& k) { return json::array({k.z_theta, k.z_phi, k.z_age, k.sunlit}); }

ClusterKey key_from(const json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("cluster key must be an array of 4 integers");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

}  // namespace

std::string to_json(const RandomForest& forest) {
  json j;
  j["format"] = "leosched-random-forest";
  j["version"] = RandomForest::kFormatVersion;
  j["params"] = {{"n_trees", forest.params.n_trees},
                 {"max_depth", forest.params.max_depth},
                 {"min_samples_split", forest.params.min_samples_split},
                 {"seed", forest.params.seed},
                 {"max_features", "sqrt"},
                 {"criterion", "gini"}};
  j["feature_keys"] = json::array();
  for (const auto& k : forest.feature_keys) j["feature_keys"].push_back(key_json(k));
  j["classes"] = json::array();
  for (const auto& k : forest.classes) j["classes"].push_back(key_json(k));
  j["trees"] = json::array();
  for (const auto& t : forest.trees) {
    json leaves = json::array();
    for (const auto& c : t.counts) {
      json row = json::array();
      for (const auto& [cls, n] : c) row.push_back({cls, n});
      leaves.push_back(row);
    }
    j["trees"].push_back({{"feature", t.feature}, {"threshold", t.threshold}, {"left", t.left}, {"right", t.right}, {"counts", leaves}});
  }
  json meta = {{"train_size", forest.metadata.train_size}};
  meta["grid"] = json::array();
  for (const auto& g : forest.metadata.grid)
    meta["grid"].push_back({{"n_trees", g.n_trees}, {"max_depth", g.max_depth}, {"min_samples_split", g.min_samples_split}, {"cv_top1", g.cv_top1}});
  if (forest.metadata.holdout) {
    const auto& h = *forest.metadata.holdout;
    meta["holdout"] = {{"n", h.n}, {"k", h.ks}, {"model_acc", h.model}, {"baseline_acc", h.baseline}};
  }
  j["metadata"] = meta;
  return j.dump() + "\n";
}

RandomForest forest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "leosched-random-forest") throw std::invalid_argument("not a random-forest model file");
    const int version = j.at("version").get<int>();
    if (version != RandomForest::kFormatVersion)
      throw std::invalid_argument("unsupported model version " + std::to_string(version));
    RandomForest f;
    const auto& p = j.at("params");
    f.params = {p.at("n_trees").get<int>(), p.at("max_depth").get<int>(), p.at("min_samples_split").get<int>(),
                p.at("seed").get<std::uint64_t>()};
    for (const auto& k : j.at("feature_keys")) f.feature_keys.push_back(key_from(k));
    for (const auto& k : j.at("classes")) f.classes.push_back(key_from(k));
    if (!std::is_sorted(f.feature_keys.begin(), f.feature_keys.end()) || !std::is_sorted(f.classes.begin(), f.classes.end()))
      throw std::invalid_argument("feature keys and classes must be sorted");
    const auto nfeat = static_cast<int>(f.feature_count());
    const auto ncls = static_cast<int>(f.classes.size());
    for (const auto& jt : j.at("trees")) {
      Tree t;
      t.feature = jt.at("feature").get<std::vector<int>>();
      t.threshold = jt.at("threshold").get<std::vector<double>>();
      t.left = jt.at("left").get<std::vector<int>>();
      t.right = jt.at("right").get<std::vector<int>>();
      for (const auto& leaf : jt.at("counts")) {
        std::vector<std::pair<int, int>> c;
        for (const auto& e : leaf) c.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        t.counts.push_back(c);
      }
      const auto n = t.feature.size();
      if (n == 0 || t.threshold.size() != n || t.left.size() != n || t.right.size() != n || t.counts.size() != n)
        throw std::invalid_argument("tree arrays have inconsistent lengths");
      for (std::size_t i = 0; i < n; ++i) {
        if (t.feature[i] >= nfeat) throw std::invalid_argument("tree references an unknown feature");
        if (t.feature[i] >= 0) {
          if (t.left[i] <= static_cast<int>(i) || t.right[i] <= static_cast<int>(i) || t.left[i] >= static_cast<int>(n) ||
              t.right[i] >= static_cast<int>(n))
            throw std::invalid_argument("tree child index out of range");
        }
        for (const auto& [cls, cnt] : t.counts[i])
          if (cls < 0 || cls >= ncls || cnt < 0) throw std::invalid_argument("leaf histogram references an unknown class");
      }
      f.trees.push_back(std::move(t));
    }
    const auto& meta = j.at("metadata");
    f.metadata.train_size = meta.at("train_size").get<int>();
    for (const auto& g : meta.at("grid"))
      f.metadata.grid.push_back({g.at("n_trees").get<int>(), g.at("max_depth").get<int>(), g.at("min_samples_split").get<int>(),
                                 g.at("cv_top1").get<double>()});
    if (meta.contains("holdout")) {
      HoldoutMetrics h;
      const auto& jh = meta.at("holdout");
      h.n = jh.at("n").get<int>();
      h.ks = jh.at("k").get<std::vector<std::size_t>>();
      h.model = jh.at("model_acc").get<std::vector<double>>();
      h.baseline = jh.at("baseline_acc").get<std::vector<double>>();
      f.metadata.holdout = h;
    }
    return f;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace leosched::model
