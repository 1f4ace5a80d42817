#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ensemble.hpp"
#include "linear.hpp"
#include "matrix.hpp"
#include "tree.hpp"

namespace nids {

struct CartModel {
  Tree tree;
};

// Any trained classifier plus the metadata needed to reload and apply it:
// kind tag, the digest of the pipeline it was trained against, the master
// seed, and the resolved hyperparameters.
struct TrainedModel {
  std::string kind;  // "logreg" | "cart" | "rf" | "gbt"
  std::string pipeline_digest;
  std::uint64_t seed = 0;
  nlohmann::json hyperparams;
  std::variant<LogRegModel, CartModel, ForestModel, GbtModel> impl;
};

inline constexpr const char* kModelKinds[] = {"logreg", "cart", "rf", "gbt"};

// Strict hyperparameter parsing: unknown keys are hard errors so a typo can
// never silently fall back to a default.
LogRegConfig parse_logreg_params(const nlohmann::json& params);
TreeParams parse_cart_params(const nlohmann::json& params);
ForestParams parse_forest_params(const nlohmann::json& params);
GbtParams parse_gbt_params(const nlohmann::json& params);

// Trains one model kind on the given matrix. params_json may be empty or
// "{}" for defaults; resolved values (e.g. mtry, lambda) are recorded on the
// returned model.
TrainedModel train_model(const DesignMatrix& train, const std::string& kind,
                         const std::string& params_json, std::uint64_t seed);

std::vector<double> predict_proba(const TrainedModel& model, const DesignMatrix& X);
std::vector<std::uint8_t> predict(const TrainedModel& model, const DesignMatrix& X);

// Model container: magic + JSON header (sorted keys) + little-endian binary
// payload. Bit-exact across save/load/save.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace nids
