#include "model_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "io_util.hpp"

namespace nids {

using json = nlohmann::json;

namespace {

constexpr char kMagic[8] = {'N', 'I', 'D', 'S', 'M', 'D', 'L', '1'};

// --- little-endian byte stream helpers ---

struct ByteWriter {
  std::string bytes;

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
};

struct ByteReader {
  std::string_view bytes;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > bytes.size()) throw DataError("model payload truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + static_cast<std::size_t>(i)])) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + static_cast<std::size_t>(i)])) << (8 * i);
    pos += 8;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  bool done() const { return pos == bytes.size(); }
};

// --- classification tree payload (preorder) ---

void write_tree(ByteWriter& w, const Tree& tree) {
  w.u64(tree.nodes.size());
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    w.i32(node.feature);
    for (int k = 0; k < kNumClasses; ++k) w.i64(node.counts[static_cast<std::size_t>(k)]);
    if (!node.is_leaf()) {
      w.f64(node.threshold);
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
}

Tree read_tree(ByteReader& r, std::size_t dim) {
  Tree tree;
  tree.dim = dim;
  const std::uint64_t count = r.u64();
  tree.nodes.reserve(count);
  struct Pending {
    std::int32_t node;
    int assigned;
    int depth;
  };
  std::vector<Pending> stack;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::int32_t index = static_cast<std::int32_t>(tree.nodes.size());
    int depth = 0;
    if (index > 0) {
      if (stack.empty()) throw DataError("malformed tree payload: orphan node");
      Pending& top = stack.back();
      depth = top.depth + 1;
      TreeNode& parent = tree.nodes[static_cast<std::size_t>(top.node)];
      if (top.assigned == 0) {
        parent.left = index;
        top.assigned = 1;
      } else {
        parent.right = index;
        stack.pop_back();
      }
    }
    TreeNode node;
    node.feature = r.i32();
    std::int64_t total = 0;
    for (int k = 0; k < kNumClasses; ++k) {
      node.counts[static_cast<std::size_t>(k)] = r.i64();
      total += node.counts[static_cast<std::size_t>(k)];
    }
    if (total <= 0) throw DataError("malformed tree payload: empty node");
    for (int k = 0; k < kNumClasses; ++k)
      node.prob[static_cast<std::size_t>(k)] =
          static_cast<double>(node.counts[static_cast<std::size_t>(k)]) / static_cast<double>(total);
    if (!node.is_leaf()) {
      if (node.feature >= static_cast<std::int32_t>(dim))
        throw DataError("malformed tree payload: feature index out of range");
      node.threshold = r.f64();
    }
    tree.depth = std::max(tree.depth, depth);
    tree.nodes.push_back(std::move(node));
    if (!tree.nodes.back().is_leaf()) stack.push_back({index, 0, depth});
  }
  if (!stack.empty()) throw DataError("malformed tree payload: missing children");
  return tree;
}

// --- regression tree payload (preorder) ---

void write_gbt_tree(ByteWriter& w, const GbtTree& tree) {
  w.u64(tree.nodes.size());
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const GbtNode& node = tree.nodes[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    w.i32(node.feature);
    if (node.is_leaf()) {
      w.f64(node.value);
    } else {
      w.f64(node.threshold);
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
}

GbtTree read_gbt_tree(ByteReader& r, std::size_t dim) {
  GbtTree tree;
  const std::uint64_t count = r.u64();
  tree.nodes.reserve(count);
  struct Pending {
    std::int32_t node;
    int assigned;
  };
  std::vector<Pending> stack;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::int32_t index = static_cast<std::int32_t>(tree.nodes.size());
    if (index > 0) {
      if (stack.empty()) throw DataError("malformed tree payload: orphan node");
      Pending& top = stack.back();
      GbtNode& parent = tree.nodes[static_cast<std::size_t>(top.node)];
      if (top.assigned == 0) {
        parent.left = index;
        top.assigned = 1;
      } else {
        parent.right = index;
        stack.pop_back();
      }
    }
    GbtNode node;
    node.feature = r.i32();
    if (node.is_leaf()) {
      node.value = r.f64();
    } else {
      if (node.feature >= static_cast<std::int32_t>(dim))
        throw DataError("malformed tree payload: feature index out of range");
      node.threshold = r.f64();
    }
    tree.nodes.push_back(node);
    if (!node.is_leaf()) stack.push_back({index, 0});
  }
  if (!stack.empty()) throw DataError("malformed tree payload: missing children");
  return tree;
}

json default_json(const std::string& params_json) {
  if (params_json.empty()) return json::object();
  json parsed;
  try {
    parsed = json::parse(params_json);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad hyperparameter JSON: ") + e.what());
  }
  if (!parsed.is_object()) throw std::invalid_argument("hyperparameters must be a JSON object");
  return parsed;
}

void reject_unknown_keys(const json& params, std::initializer_list<const char*> known,
                         const std::string& kind) {
  for (const auto& [key, value] : params.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok)
      throw std::invalid_argument("unknown " + kind + " hyperparameter: '" + key + "'");
  }
}

template <typename T>
T get_or(const json& params, const char* key, T fallback) {
  if (!params.contains(key)) return fallback;
  try {
    return params.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("bad value for hyperparameter '") + key + "'");
  }
}

}  // namespace

LogRegConfig parse_logreg_params(const json& params) {
  reject_unknown_keys(params, {"lambda", "max_iters", "tolerance", "initial_step", "backtrack",
                               "armijo", "step_growth"},
                      "logreg");
  LogRegConfig cfg;
  cfg.lambda = get_or(params, "lambda", cfg.lambda);
  cfg.max_iters = get_or(params, "max_iters", cfg.max_iters);
  cfg.tolerance = get_or(params, "tolerance", cfg.tolerance);
  cfg.initial_step = get_or(params, "initial_step", cfg.initial_step);
  cfg.backtrack = get_or(params, "backtrack", cfg.backtrack);
  cfg.armijo = get_or(params, "armijo", cfg.armijo);
  cfg.step_growth = get_or(params, "step_growth", cfg.step_growth);
  return cfg;
}

TreeParams parse_cart_params(const json& params) {
  reject_unknown_keys(params, {"max_depth", "min_samples_leaf", "min_samples_split"}, "cart");
  TreeParams p;  // paper-mode defaults: depth 20, min leaf 5
  p.max_depth = get_or(params, "max_depth", p.max_depth);
  p.min_samples_leaf = get_or(params, "min_samples_leaf", p.min_samples_leaf);
  p.min_samples_split = get_or(params, "min_samples_split", p.min_samples_split);
  return p;
}

ForestParams parse_forest_params(const json& params) {
  reject_unknown_keys(
      params, {"n_trees", "mtry", "max_depth", "min_samples_leaf", "min_samples_split", "bootstrap"},
      "rf");
  ForestParams p;
  p.n_trees = get_or(params, "n_trees", p.n_trees);
  p.mtry = get_or(params, "mtry", p.mtry);
  p.tree.max_depth = get_or(params, "max_depth", p.tree.max_depth);
  p.tree.min_samples_leaf = get_or(params, "min_samples_leaf", p.tree.min_samples_leaf);
  p.tree.min_samples_split = get_or(params, "min_samples_split", p.tree.min_samples_split);
  p.bootstrap = get_or(params, "bootstrap", p.bootstrap);
  return p;
}

GbtParams parse_gbt_params(const json& params) {
  reject_unknown_keys(params,
                      {"n_rounds", "max_depth", "learning_rate", "subsample", "colsample", "lambda",
                       "min_child_weight"},
                      "gbt");
  GbtParams p;
  p.n_rounds = get_or(params, "n_rounds", p.n_rounds);
  p.max_depth = get_or(params, "max_depth", p.max_depth);
  p.learning_rate = get_or(params, "learning_rate", p.learning_rate);
  p.subsample = get_or(params, "subsample", p.subsample);
  p.colsample = get_or(params, "colsample", p.colsample);
  p.lambda = get_or(params, "lambda", p.lambda);
  p.min_child_weight = get_or(params, "min_child_weight", p.min_child_weight);
  return p;
}

TrainedModel train_model(const DesignMatrix& train, const std::string& kind,
                         const std::string& params_json, std::uint64_t seed) {
  const json params = default_json(params_json);
  TrainedModel model;
  model.kind = kind;
  model.pipeline_digest = train.pipeline_digest;
  model.seed = seed;

  if (kind == "logreg") {
    LogRegConfig cfg = parse_logreg_params(params);
    cfg.seed = seed;
    LogRegTraining training = train_logreg(train, cfg);
    model.hyperparams = {{"lambda", training.model.lambda},
                         {"max_iters", cfg.max_iters},
                         {"tolerance", cfg.tolerance},
                         {"initial_step", cfg.initial_step},
                         {"backtrack", cfg.backtrack},
                         {"armijo", cfg.armijo},
                         {"step_growth", cfg.step_growth}};
    model.impl = std::move(training.model);
  } else if (kind == "cart") {
    TreeParams p = parse_cart_params(params);
    p.seed = seed;
    model.hyperparams = {{"max_depth", p.max_depth},
                         {"min_samples_leaf", p.min_samples_leaf},
                         {"min_samples_split", p.effective_min_split()}};
    model.impl = CartModel{grow(train, p)};
  } else if (kind == "rf") {
    ForestParams p = parse_forest_params(params);
    p.seed = seed;
    ForestModel forest = train_forest(train, p);
    model.hyperparams = {{"n_trees", p.n_trees},
                         {"mtry", forest.mtry},
                         {"max_depth", p.tree.max_depth},
                         {"min_samples_leaf", p.tree.min_samples_leaf},
                         {"min_samples_split", p.tree.effective_min_split()},
                         {"bootstrap", p.bootstrap}};
    model.impl = std::move(forest);
  } else if (kind == "gbt") {
    GbtParams p = parse_gbt_params(params);
    p.seed = seed;
    model.hyperparams = {{"n_rounds", p.n_rounds},
                         {"max_depth", p.max_depth},
                         {"learning_rate", p.learning_rate},
                         {"subsample", p.subsample},
                         {"colsample", p.colsample},
                         {"lambda", p.lambda},
                         {"min_child_weight", p.min_child_weight}};
    model.impl = std::move(train_gbt(train, p).model);
  } else {
    throw std::invalid_argument("unknown model kind: '" + kind +
                                "' (expected logreg, cart, rf or gbt)");
  }
  return model;
}

std::vector<double> predict_proba(const TrainedModel& model, const DesignMatrix& X) {
  return std::visit(
      [&](const auto& impl) -> std::vector<double> {
        using T = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<T, CartModel>)
          return predict_proba(impl.tree, X);
        else
          return predict_proba(impl, X);
      },
      model.impl);
}

std::vector<std::uint8_t> predict(const TrainedModel& model, const DesignMatrix& X) {
  return std::visit(
      [&](const auto& impl) -> std::vector<std::uint8_t> {
        using T = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<T, CartModel>)
          return predict(impl.tree, X);
        else
          return predict(impl, X);
      },
      model.impl);
}

void save_model(const TrainedModel& model, const std::string& path) {
  ByteWriter payload;
  if (const auto* lr = std::get_if<LogRegModel>(&model.impl)) {
    payload.u64(lr->dim);
    payload.f64(lr->lambda);
    for (const double w : lr->weights) payload.f64(w);
    for (const double b : lr->bias) payload.f64(b);
  } else if (const auto* cart = std::get_if<CartModel>(&model.impl)) {
    payload.u64(cart->tree.dim);
    write_tree(payload, cart->tree);
  } else if (const auto* rf = std::get_if<ForestModel>(&model.impl)) {
    payload.u64(rf->dim);
    payload.u32(static_cast<std::uint32_t>(rf->trees.size()));
    payload.u32(static_cast<std::uint32_t>(rf->mtry));
    for (const double v : rf->importance) payload.f64(v);
    for (const Tree& tree : rf->trees) write_tree(payload, tree);
  } else if (const auto* gbt = std::get_if<GbtModel>(&model.impl)) {
    payload.u64(gbt->dim);
    payload.u32(static_cast<std::uint32_t>(gbt->n_rounds));
    payload.f64(gbt->learning_rate);
    for (const double b : gbt->base_score) payload.f64(b);
    payload.u32(static_cast<std::uint32_t>(gbt->trees.size()));
    for (const GbtTree& tree : gbt->trees) write_gbt_tree(payload, tree);
  }

  json header;
  header["format_version"] = kFormatVersion;
  header["kind"] = model.kind;
  header["class_order"] = kClassNames;
  header["pipeline_digest"] = model.pipeline_digest;
  header["seed"] = model.seed;
  header["hyperparams"] = model.hyperparams;
  header["payload_bytes"] = payload.bytes.size();
  const std::string header_text = header.dump();

  std::string out;
  out.reserve(sizeof(kMagic) + 4 + header_text.size() + payload.bytes.size());
  out.append(kMagic, sizeof(kMagic));
  ByteWriter len;
  len.u32(static_cast<std::uint32_t>(header_text.size()));
  out += len.bytes;
  out += header_text;
  out += payload.bytes;
  atomic_write_file(path, out);
}

TrainedModel load_model(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < sizeof(kMagic) + 4 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw DataError("not a model file: " + path);
  ByteReader head{bytes, sizeof(kMagic)};
  const std::uint32_t header_len = head.u32();
  if (bytes.size() < sizeof(kMagic) + 4 + header_len)
    throw DataError("model file truncated: " + path);

  json header;
  try {
    header = json::parse(bytes.substr(sizeof(kMagic) + 4, header_len));
  } catch (const json::exception& e) {
    throw DataError("bad model header in " + path + ": " + e.what());
  }

  TrainedModel model;
  try {
    if (header.at("format_version").get<int>() != kFormatVersion)
      throw DataError("unsupported model format version in " + path);
    const auto order = header.at("class_order").get<std::vector<std::string>>();
    for (int k = 0; k < kNumClasses; ++k)
      if (order.size() != kNumClasses || order[static_cast<std::size_t>(k)] != kClassNames[static_cast<std::size_t>(k)])
        throw DataError("model class order mismatch in " + path);
    model.kind = header.at("kind").get<std::string>();
    model.pipeline_digest = header.at("pipeline_digest").get<std::string>();
    model.seed = header.at("seed").get<std::uint64_t>();
    model.hyperparams = header.at("hyperparams");
    if (header.at("payload_bytes").get<std::size_t>() !=
        bytes.size() - sizeof(kMagic) - 4 - header_len)
      throw DataError("model payload size mismatch in " + path);
  } catch (const json::exception& e) {
    throw DataError("bad model header in " + path + ": " + e.what());
  }

  ByteReader r{std::string_view(bytes).substr(sizeof(kMagic) + 4 + header_len)};
  if (model.kind == "logreg") {
    LogRegModel lr;
    lr.dim = r.u64();
    lr.lambda = r.f64();
    lr.weights.resize(static_cast<std::size_t>(kNumClasses) * lr.dim);
    for (auto& w : lr.weights) w = r.f64();
    for (auto& b : lr.bias) b = r.f64();
    model.impl = std::move(lr);
  } else if (model.kind == "cart") {
    const std::size_t dim = r.u64();
    model.impl = CartModel{read_tree(r, dim)};
  } else if (model.kind == "rf") {
    ForestModel rf;
    rf.dim = r.u64();
    const std::uint32_t n_trees = r.u32();
    rf.mtry = static_cast<int>(r.u32());
    rf.importance.resize(rf.dim);
    for (auto& v : rf.importance) v = r.f64();
    rf.trees.reserve(n_trees);
    for (std::uint32_t t = 0; t < n_trees; ++t) rf.trees.push_back(read_tree(r, rf.dim));
    model.impl = std::move(rf);
  } else if (model.kind == "gbt") {
    GbtModel gbt;
    gbt.dim = r.u64();
    gbt.n_rounds = static_cast<int>(r.u32());
    gbt.learning_rate = r.f64();
    for (auto& b : gbt.base_score) b = r.f64();
    const std::uint32_t n_trees = r.u32();
    gbt.trees.reserve(n_trees);
    for (std::uint32_t t = 0; t < n_trees; ++t) gbt.trees.push_back(read_gbt_tree(r, gbt.dim));
    model.impl = std::move(gbt);
  } else {
    throw DataError("unknown model kind in " + path + ": " + model.kind);
  }
  if (!r.done()) throw DataError("trailing bytes in model payload: " + path);
  return model;
}

}  // namespace nids
