// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KFSEL_GENERATOR_HPP_
#define KFSEL_GENERATOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kfsel/core.hpp"
#include "kfsel/error.hpp"
#include "kfsel/rng.hpp"
#include "kfsel/text.hpp"

namespace kfsel {

// Trainable Gaussian generator: a linear map from a question feature vector
// to K (center, width) pairs, squashed through logistic/softplus and trained
// with MSE against unit-peak target masks built from pseudo timestamps.

/// L2-normalized hashed token features; the all-zero vector for empty text.
struct FeatureVector {
  std::vector<double> values;
};

/// Linear model. weights is row-major D x 2K: row d holds the 2K raw-output
/// coefficients for input dimension d.
struct GeneratorModel {
  int D = 0;
  int K = 0;
  std::vector<double> weights;  // size D * 2K
  std::vector<double> biases;   // size 2K
};

/// K target masks in timestamp-ascending order.
struct TargetMasks {
  std::vector<Mask> w;
};

struct TrainExample {
  FeatureVector features;
  TargetMasks targets;
};

struct TrainConfig {
  double learning_rate = 1e-2;
  int epochs = 300;
  std::uint64_t seed = 0;
  double sigma_min = 0.01;
  double sigma_target = 1.5 / 32.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

/// Deterministic token feature hashing: lowercase, split on non-alphanumeric,
/// signed-hash each token into one of D buckets, accumulate, L2-normalize.
inline FeatureVector extract_features(const std::string& question_text, int D) {
  if (D < 8) {
    throw InvalidArgument("extract_features: D must be >= 8, got " +
                          std::to_string(D));
  }
  FeatureVector f;
  f.values.assign(static_cast<std::size_t>(D), 0.0);
  for (const std::string& tok : tokenize(question_text)) {
    const std::uint64_t h = fnv1a64(tok);
    const std::uint64_t s = fnv1a64(tok, 0x9e3779b97f4a7c15ull);
    const std::size_t bucket =
        static_cast<std::size_t>(h % static_cast<std::uint64_t>(D));
    f.values[bucket] += (s & 1u) ? 1.0 : -1.0;
  }
  double norm = 0.0;
  for (double v : f.values) norm += v * v;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& v : f.values) v /= norm;
  }
  return f;
}

namespace detail {

inline void check_model_dims(const GeneratorModel& model) {
  if (model.D < 1 || model.K < 1 ||
      model.weights.size() !=
          static_cast<std::size_t>(model.D) * 2 * model.K ||
      model.biases.size() != static_cast<std::size_t>(2 * model.K)) {
    throw InvalidArgument("generator model has inconsistent dimensions");
  }
}

/// raw = f * weights + biases, length 2K.
inline std::vector<double> raw_outputs(const GeneratorModel& model,
                                       const FeatureVector& f) {
  check_model_dims(model);
  if (f.values.size() != static_cast<std::size_t>(model.D)) {
    throw InvalidArgument("feature length " + std::to_string(f.values.size()) +
                          " does not match model D=" + std::to_string(model.D));
  }
  const std::size_t cols = static_cast<std::size_t>(2 * model.K);
  std::vector<double> raw(model.biases);
  for (std::size_t d = 0; d < static_cast<std::size_t>(model.D); ++d) {
    const double fd = f.values[d];
    if (fd == 0.0) continue;
    const double* row = &model.weights[d * cols];
    for (std::size_t j = 0; j < cols; ++j) raw[j] += fd * row[j];
  }
  return raw;
}

/// Slot order after sorting by (center, width, slot) ascending.
inline std::vector<int> center_order(const std::vector<GaussianParams>& params) {
  std::vector<int> order(params.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& pa = params[static_cast<std::size_t>(a)];
    const auto& pb = params[static_cast<std::size_t>(b)];
    if (pa.center != pb.center) return pa.center < pb.center;
    if (pa.width != pb.width) return pa.width < pb.width;
    return a < b;
  });
  return order;
}

}  // namespace detail

/// Raw linear outputs squashed into valid parameters: centers through a
/// logistic (always inside (0,1)), widths through sigma_min + softplus.
/// Output is sorted by center ascending.
inline std::vector<GaussianParams> forward(const GeneratorModel& model,
                                           const FeatureVector& f,
                                           double sigma_min = 0.01) {
  const std::vector<double> raw = detail::raw_outputs(model, f);
  std::vector<GaussianParams> params(static_cast<std::size_t>(model.K));
  for (int k = 0; k < model.K; ++k) {
    params[static_cast<std::size_t>(k)].center =
        logistic(raw[static_cast<std::size_t>(2 * k)]);
    params[static_cast<std::size_t>(k)].width =
        sigma_min + softplus(raw[static_cast<std::size_t>(2 * k + 1)]);
  }
  std::sort(params.begin(), params.end(),
            [](const GaussianParams& a, const GaussianParams& b) {
              if (a.center != b.center) return a.center < b.center;
              return a.width < b.width;
            });
  return params;
}

/// Mean squared difference over all K masks and T frames.
inline double mask_mse(const std::vector<Mask>& masks,
                       const std::vector<Mask>& targets) {
  if (masks.size() != targets.size() || masks.empty()) {
    throw InvalidArgument("mask_mse: K mismatch (" +
                          std::to_string(masks.size()) + " vs " +
                          std::to_string(targets.size()) + ")");
  }
  const std::size_t T = masks.front().values.size();
  double sum = 0.0;
  for (std::size_t k = 0; k < masks.size(); ++k) {
    if (masks[k].values.size() != T || targets[k].values.size() != T) {
      throw InvalidArgument("mask_mse: mask length mismatch");
    }
    for (std::size_t t = 0; t < T; ++t) {
      const double d = masks[k].values[t] - targets[k].values[t];
      sum += d * d;
    }
  }
  return sum / (static_cast<double>(masks.size()) * static_cast<double>(T));
}

/// MSE between the masks the parameters generate and the targets, pairing
/// the k-th smallest center with the k-th earliest target timestamp.
inline double mse_loss(const std::vector<GaussianParams>& params,
                       const TargetMasks& targets, int T) {
  if (params.size() != targets.w.size() || params.empty()) {
    throw InvalidArgument("mse_loss: K mismatch (" +
                          std::to_string(params.size()) + " params vs " +
                          std::to_string(targets.w.size()) + " targets)");
  }
  const std::vector<int> order = detail::center_order(params);
  std::vector<Mask> masks;
  masks.reserve(params.size());
  for (int k : order) {
    masks.push_back(gaussian_mask(params[static_cast<std::size_t>(k)], T));
  }
  return mask_mse(masks, targets.w);
}

/// Gradient container with the same layout as GeneratorModel.
struct ModelGradients {
  std::vector<double> weights;
  std::vector<double> biases;
};

/// Exact analytic gradient of mse_loss(forward(model, f), targets) with
/// respect to every weight and bias, chained through exp, logistic and
/// softplus. The center sort is piecewise constant, so away from center
/// ties the pairing is locally fixed and the derivative is exact.
inline ModelGradients gradients(const GeneratorModel& model,
                                const FeatureVector& f,
                                const TargetMasks& targets, int T,
                                double sigma_min = 0.01) {
  if (static_cast<std::size_t>(model.K) != targets.w.size()) {
    throw InvalidArgument("gradients: K mismatch");
  }
  if (T < 2) {
    throw InvalidArgument("gradients: T must be >= 2");
  }
  const std::vector<double> raw = detail::raw_outputs(model, f);
  const int K = model.K;
  std::vector<GaussianParams> params(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    params[static_cast<std::size_t>(k)].center =
        logistic(raw[static_cast<std::size_t>(2 * k)]);
    params[static_cast<std::size_t>(k)].width =
        sigma_min + softplus(raw[static_cast<std::size_t>(2 * k + 1)]);
  }
  const std::vector<int> order = detail::center_order(params);
  std::vector<int> rank(static_cast<std::size_t>(K));
  for (int r = 0; r < K; ++r) rank[static_cast<std::size_t>(order[r])] = r;

  const double scale = 2.0 / (static_cast<double>(K) * static_cast<double>(T));
  std::vector<double> draw(static_cast<std::size_t>(2 * K), 0.0);
  for (int k = 0; k < K; ++k) {
    const double c = params[static_cast<std::size_t>(k)].center;
    const double s = params[static_cast<std::size_t>(k)].width;
    const Mask& w = targets.w[static_cast<std::size_t>(rank[k])];
    if (w.values.size() != static_cast<std::size_t>(T)) {
      throw InvalidArgument("gradients: target mask length mismatch");
    }
    double dc = 0.0, ds = 0.0;
    for (int t = 0; t < T; ++t) {
      const double x = grid_time(t, T) - c;
      const double g = std::exp(-(x * x) / (2.0 * s * s));
      const double r = g - w.values[static_cast<std::size_t>(t)];
      dc += r * g * x / (s * s);
      ds += r * g * (x * x) / (s * s * s);
    }
    dc *= scale;
    ds *= scale;
    draw[static_cast<std::size_t>(2 * k)] = dc * c * (1.0 - c);
    draw[static_cast<std::size_t>(2 * k + 1)] =
        ds * logistic(raw[static_cast<std::size_t>(2 * k + 1)]);
  }

  ModelGradients grad;
  const std::size_t cols = static_cast<std::size_t>(2 * K);
  grad.weights.assign(static_cast<std::size_t>(model.D) * cols, 0.0);
  grad.biases = draw;
  for (std::size_t d = 0; d < static_cast<std::size_t>(model.D); ++d) {
    const double fd = f.values[d];
    if (fd == 0.0) continue;
    double* row = &grad.weights[d * cols];
    for (std::size_t j = 0; j < cols; ++j) row[j] = fd * draw[j];
  }
  return grad;
}

/// Seeded uniform(-0.01, 0.01) initialization for all parameters.
inline GeneratorModel init_model(int D, int K, std::uint64_t seed) {
  if (D < 1 || K < 1) {
    throw InvalidArgument("init_model: D and K must be positive");
  }
  GeneratorModel model;
  model.D = D;
  model.K = K;
  Rng rng(seed);
  model.weights.resize(static_cast<std::size_t>(D) * 2 * K);
  model.biases.resize(static_cast<std::size_t>(2 * K));
  for (double& w : model.weights) w = uniform(rng, -0.01, 0.01);
  for (double& b : model.biases) b = uniform(rng, -0.01, 0.01);
  return model;
}

/// Adaptive-moment gradient descent over per-example updates, visiting the
/// dataset in a fresh seeded shuffle each epoch. Deterministic given the
/// config seed.
inline GeneratorModel train(const std::vector<TrainExample>& dataset,
                            const TrainConfig& config) {
  if (dataset.empty()) {
    throw InvalidArgument("train: empty dataset");
  }
  if (config.epochs < 1) {
    throw InvalidArgument("train: epochs must be >= 1");
  }
  if (config.learning_rate < 0.0) {
    throw InvalidArgument("train: negative learning rate");
  }
  const int D = static_cast<int>(dataset.front().features.values.size());
  const int K = static_cast<int>(dataset.front().targets.w.size());
  if (K < 1 || dataset.front().targets.w.front().values.size() < 2) {
    throw InvalidArgument("train: malformed first example");
  }
  const int T = static_cast<int>(dataset.front().targets.w.front().values.size());
  for (const TrainExample& ex : dataset) {
    if (static_cast<int>(ex.features.values.size()) != D ||
        static_cast<int>(ex.targets.w.size()) != K) {
      throw InvalidArgument("train: inconsistent D or K across dataset");
    }
    for (const Mask& m : ex.targets.w) {
      if (static_cast<int>(m.values.size()) != T) {
        throw InvalidArgument("train: inconsistent T across dataset");
      }
    }
  }

  Rng rng(config.seed);
  GeneratorModel model;
  model.D = D;
  model.K = K;
  model.weights.resize(static_cast<std::size_t>(D) * 2 * K);
  model.biases.resize(static_cast<std::size_t>(2 * K));
  for (double& w : model.weights) w = uniform(rng, -0.01, 0.01);
  for (double& b : model.biases) b = uniform(rng, -0.01, 0.01);

  const std::size_t nw = model.weights.size();
  const std::size_t nb = model.biases.size();
  std::vector<double> mw(nw, 0.0), vw(nw, 0.0), mb(nb, 0.0), vb(nb, 0.0);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  long long step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t idx : order) {
      const TrainExample& ex = dataset[idx];
      const ModelGradients grad =
          gradients(model, ex.features, ex.targets, T, config.sigma_min);
      ++step;
      const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      const auto update = [&](std::vector<double>& x, std::vector<double>& m,
                              std::vector<double>& v,
                              const std::vector<double>& g) {
        for (std::size_t i = 0; i < x.size(); ++i) {
          m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
          v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
          x[i] -= config.learning_rate * (m[i] / c1) /
                  (std::sqrt(v[i] / c2) + config.epsilon);
        }
      };
      update(model.weights, mw, vw, grad.weights);
      update(model.biases, mb, vb, grad.biases);
    }
  }
  return model;
}

/// Mean mse_loss over a dataset; training progress diagnostic.
inline double dataset_loss(const GeneratorModel& model,
                           const std::vector<TrainExample>& dataset, int T,
                           double sigma_min = 0.01) {
  if (dataset.empty()) {
    throw InvalidArgument("dataset_loss: empty dataset");
  }
  double sum = 0.0;
  for (const TrainExample& ex : dataset) {
    sum += mse_loss(forward(model, ex.features, sigma_min), ex.targets, T);
  }
  return sum / static_cast<double>(dataset.size());
}

inline bool operator==(const GeneratorModel& a, const GeneratorModel& b) {
  return a.D == b.D && a.K == b.K && a.weights == b.weights &&
         a.biases == b.biases;
}

inline void save_model(const GeneratorModel& model, const std::string& path) {
  detail::check_model_dims(model);
  nlohmann::ordered_json j;
  j["format"] = "kfsel-model-v1";
  j["D"] = model.D;
  j["K"] = model.K;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  const std::size_t cols = static_cast<std::size_t>(2 * model.K);
  for (int d = 0; d < model.D; ++d) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < cols; ++c) {
      row.push_back(model.weights[static_cast<std::size_t>(d) * cols + c]);
    }
    rows.push_back(std::move(row));
  }
  j["weights"] = std::move(rows);
  j["biases"] = model.biases;
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open model file for writing: " + path);
  }
  out << j.dump() << "\n";
}

inline GeneratorModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open model file: " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min(text.size(), e.byte);
    const std::size_t line =
        1 + static_cast<std::size_t>(
                std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw ParseError(path, line, std::string("invalid JSON: ") + e.what());
  }
  const auto fail = [&](const std::string& msg) -> ParseError {
    return ParseError(path, 1, msg);
  };
  if (!j.is_object() || !j.contains("format") || !j["format"].is_string() ||
      j["format"].get<std::string>() != "kfsel-model-v1") {
    throw fail("missing or unsupported model format");
  }
  if (!j.contains("D") || !j["D"].is_number_integer() || !j.contains("K") ||
      !j["K"].is_number_integer()) {
    throw fail("missing integer fields D, K");
  }
  GeneratorModel model;
  model.D = j["D"].get<int>();
  model.K = j["K"].get<int>();
  if (model.D < 1 || model.K < 1) {
    throw fail("D and K must be positive");
  }
  if (!j.contains("weights") || !j["weights"].is_array() ||
      static_cast<int>(j["weights"].size()) != model.D) {
    throw fail("weights row count does not match D=" + std::to_string(model.D));
  }
  const std::size_t cols = static_cast<std::size_t>(2 * model.K);
  model.weights.reserve(static_cast<std::size_t>(model.D) * cols);
  for (const auto& row : j["weights"]) {
    if (!row.is_array() || row.size() != cols) {
      throw fail("weights row width does not match 2K=" + std::to_string(cols));
    }
    for (const auto& v : row) {
      if (!v.is_number()) throw fail("non-numeric weight entry");
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw fail("non-finite weight entry");
      model.weights.push_back(x);
    }
  }
  if (!j.contains("biases") || !j["biases"].is_array() ||
      j["biases"].size() != cols) {
    throw fail("biases length does not match 2K=" + std::to_string(cols));
  }
  for (const auto& v : j["biases"]) {
    if (!v.is_number()) throw fail("non-numeric bias entry");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw fail("non-finite bias entry");
    model.biases.push_back(x);
  }
  return model;
}

}  // namespace kfsel

#endif  // KFSEL_GENERATOR_HPP_
