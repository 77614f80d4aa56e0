// Copyright 2026 The mmscore Authors
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

#include "mmscore/toybench.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "mmscore/rng.hpp"

namespace mmscore {

const char* regime_name(Regime regime) {
  switch (regime) {
    case Regime::kDominantRedundant:
      return "dominant-redundant";
    case Regime::kCorrelatedComplementary:
      return "correlated-complementary";
    case Regime::kIndispensableXor:
      return "indispensable-xor";
  }
  return "?";
}

Regime regime_from_name(const std::string& name) {
  if (name == "dominant-redundant") return Regime::kDominantRedundant;
  if (name == "correlated-complementary") return Regime::kCorrelatedComplementary;
  if (name == "indispensable-xor") return Regime::kIndispensableXor;
  throw ContractError("unknown regime '" + name + "'");
}

const char* toy_model_name(ToyModelKind kind) {
  switch (kind) {
    case ToyModelKind::kMajority:
      return "majority";
    case ToyModelKind::kNearestCentroid:
      return "centroid";
    case ToyModelKind::kAdditiveLinear:
      return "additive";
    case ToyModelKind::kInteraction:
      return "interaction";
  }
  return "?";
}

ToyModelKind toy_model_from_name(const std::string& name) {
  if (name == "majority") return ToyModelKind::kMajority;
  if (name == "centroid") return ToyModelKind::kNearestCentroid;
  if (name == "additive") return ToyModelKind::kAdditiveLinear;
  if (name == "interaction") return ToyModelKind::kInteraction;
  throw ContractError("unknown toy model '" + name + "'");
}

namespace {

struct ResolvedSpec {
  std::vector<std::string> ids;
  std::vector<int> dims;
  std::vector<double> balance;
  std::string dataset_id;
};

ResolvedSpec resolve_spec(const RegimeSpec& spec) {
  ResolvedSpec out;
  switch (spec.regime) {
    case Regime::kDominantRedundant:
      out.ids = {"t", "v"};
      out.dims = {8, 4};
      break;
    case Regime::kCorrelatedComplementary:
      out.ids = {"t", "a"};
      out.dims = {8, 8};
      break;
    case Regime::kIndispensableXor:
      out.ids = {"a", "b"};
      out.dims = {6, 6};
      break;
  }
  if (!spec.dims.empty()) {
    if (spec.dims.size() != out.ids.size()) {
      throw ContractError("generate: regime has " + std::to_string(out.ids.size()) +
                          " modalities, got " + std::to_string(spec.dims.size()) + " dims");
    }
    out.dims = spec.dims;
  }
  for (int d : out.dims) {
    if (d <= 0) {
      throw ContractError("generate: modality dims must be positive");
    }
  }
  if (spec.n_classes < 2) {
    throw ContractError("generate: n_classes must be >= 2");
  }
  if (spec.regime == Regime::kIndispensableXor && spec.n_classes != 2) {
    throw ContractError("generate: the XOR regime is binary (n_classes must be 2)");
  }
  if (spec.n_samples < spec.n_classes) {
    throw ContractError("generate: n_samples must be >= n_classes");
  }
  if (spec.noise < 0.0 || !std::isfinite(spec.noise)) {
    throw ContractError("generate: noise must be finite and non-negative");
  }
  if (spec.xor_bias < 0.0 || spec.xor_bias > 1.0) {
    throw ContractError("generate: xor_bias must lie in [0, 1]");
  }
  out.balance = spec.class_balance;
  if (out.balance.empty()) {
    out.balance.assign(static_cast<std::size_t>(spec.n_classes),
                       1.0 / static_cast<double>(spec.n_classes));
  }
  if (out.balance.size() != static_cast<std::size_t>(spec.n_classes)) {
    throw ContractError("generate: class_balance needs one entry per class");
  }
  double total = 0.0;
  for (double p : out.balance) {
    if (p < 0.0 || !std::isfinite(p)) {
      throw ContractError("generate: class_balance entries must be non-negative");
    }
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw ContractError("generate: class_balance must sum to 1");
  }
  out.dataset_id = spec.dataset_id;
  if (out.dataset_id.empty()) {
    out.dataset_id = std::string(regime_name(spec.regime)) + "-n" +
                     std::to_string(spec.n_samples) + "-k" + std::to_string(spec.n_classes) +
                     "-s" + std::to_string(spec.seed);
  }
  return out;
}

/// Exact class counts by largest remainder; ties go to the lowest class.
std::vector<int> realized_counts(const std::vector<double>& balance, int n) {
  const std::size_t k = balance.size();
  std::vector<int> counts(k);
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const double exact = balance[c] * n;
    counts[c] = static_cast<int>(std::floor(exact));
    assigned += counts[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int i = 0; i < n - assigned; ++i) {
    ++counts[remainders[static_cast<std::size_t>(i) % remainders.size()].second];
  }
  return counts;
}

/// Distinct random ±1 pattern per class; separable class centers are these
/// patterns scaled by 1 (so inter-center distances are O(sqrt(dim))).
std::vector<std::vector<double>> rademacher_centers(int n_classes, int dim, Rng& rng) {
  std::vector<std::vector<double>> centers;
  while (static_cast<int>(centers.size()) < n_classes) {
    std::vector<double> c(static_cast<std::size_t>(dim));
    for (double& v : c) {
      v = rng.bounded(2) == 0 ? -1.0 : 1.0;
    }
    if (std::find(centers.begin(), centers.end(), c) == centers.end()) {
      centers.push_back(std::move(c));
    }
  }
  return centers;
}

void add_noise(std::vector<double>& block, double noise, Rng& rng) {
  if (noise == 0.0) {
    return;
  }
  for (double& v : block) {
    v += noise * rng.gaussian();
  }
}

}  // namespace

Dataset generate(const RegimeSpec& spec) {
  const ResolvedSpec resolved = resolve_spec(spec);
  const int n = spec.n_samples;
  const int k = spec.n_classes;

  Dataset dataset;
  std::vector<Modality> mods;
  for (std::size_t m = 0; m < resolved.ids.size(); ++m) {
    mods.push_back(Modality{resolved.ids[m], resolved.dims[m]});
  }
  dataset.schema = ModalitySchema(std::move(mods), k);
  dataset.id = resolved.dataset_id;

  // Labels: exact counts, then a seeded shuffle so file order is class-mixed.
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(n));
  const std::vector<int> counts = realized_counts(resolved.balance, n);
  for (int c = 0; c < k; ++c) {
    labels.insert(labels.end(), static_cast<std::size_t>(counts[static_cast<std::size_t>(c)]), c);
  }
  {
    Rng rng(stream_seed(spec.seed, 0, "shuffle"));
    for (std::size_t i = labels.size() - 1; i > 0; --i) {
      const std::size_t j = rng.bounded(i + 1);
      std::swap(labels[i], labels[j]);
    }
  }

  dataset.samples.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    dataset.samples[static_cast<std::size_t>(i)].label = labels[static_cast<std::size_t>(i)];
  }

  const std::string& first_id = resolved.ids[0];
  const std::string& second_id = resolved.ids[1];
  const int first_dim = resolved.dims[0];
  const int second_dim = resolved.dims[1];

  switch (spec.regime) {
    case Regime::kDominantRedundant: {
      Rng center_rng(stream_seed(spec.seed, 0, "centers:" + first_id));
      const auto centers = rademacher_centers(k, first_dim, center_rng);
      Rng signal_rng(stream_seed(spec.seed, 0, "noise:" + first_id));
      Rng distractor_rng(stream_seed(spec.seed, 0, "noise:" + second_id));
      for (Sample& s : dataset.samples) {
        std::vector<double> block = centers[static_cast<std::size_t>(s.label)];
        add_noise(block, spec.noise, signal_rng);
        s.features[first_id] = std::move(block);
        std::vector<double> distractor(static_cast<std::size_t>(second_dim));
        for (double& v : distractor) {
          v = distractor_rng.gaussian();
        }
        s.features[second_id] = std::move(distractor);
      }
      break;
    }
    case Regime::kCorrelatedComplementary: {
      Rng center_rng(stream_seed(spec.seed, 0, "centers:" + first_id));
      const auto centers = rademacher_centers(k, first_dim, center_rng);
      // Fixed random linear map; rows scaled so transformed blocks keep O(1)
      // component magnitude.
      Rng map_rng(stream_seed(spec.seed, 0, "transform"));
      std::vector<std::vector<double>> transform(static_cast<std::size_t>(second_dim));
      const double scale = 1.0 / std::sqrt(static_cast<double>(first_dim));
      for (auto& row : transform) {
        row.resize(static_cast<std::size_t>(first_dim));
        for (double& v : row) {
          v = scale * map_rng.gaussian();
        }
      }
      Rng signal_rng(stream_seed(spec.seed, 0, "noise:" + first_id));
      Rng derived_rng(stream_seed(spec.seed, 0, "noise:" + second_id));
      for (Sample& s : dataset.samples) {
        std::vector<double> block = centers[static_cast<std::size_t>(s.label)];
        add_noise(block, spec.noise, signal_rng);
        std::vector<double> derived(static_cast<std::size_t>(second_dim), 0.0);
        for (int r = 0; r < second_dim; ++r) {
          derived[static_cast<std::size_t>(r)] =
              std::inner_product(transform[static_cast<std::size_t>(r)].begin(),
                                 transform[static_cast<std::size_t>(r)].end(), block.begin(), 0.0);
        }
        add_noise(derived, spec.noise, derived_rng);
        s.features[first_id] = std::move(block);
        s.features[second_id] = std::move(derived);
      }
      break;
    }
    case Regime::kIndispensableXor: {
      Rng pattern_rng_a(stream_seed(spec.seed, 0, "pattern:" + first_id));
      Rng pattern_rng_b(stream_seed(spec.seed, 0, "pattern:" + second_id));
      const auto patterns_a = rademacher_centers(1, first_dim, pattern_rng_a);
      const auto patterns_b = rademacher_centers(1, second_dim, pattern_rng_b);
      Rng bit_rng(stream_seed(spec.seed, 0, "bits"));
      Rng noise_a(stream_seed(spec.seed, 0, "noise:" + first_id));
      Rng noise_b(stream_seed(spec.seed, 0, "noise:" + second_id));
      for (Sample& s : dataset.samples) {
        // The second bit leans toward the label by xor_bias; the first bit is
        // whatever makes the XOR come out right. bias 0 keeps both marginals
        // flat within each class.
        const int bit_b = bit_rng.uniform01() < 0.5 + spec.xor_bias / 2.0 ? s.label : 1 - s.label;
        const int bit_a = s.label ^ bit_b;
        std::vector<double> block_a(static_cast<std::size_t>(first_dim));
        for (int d = 0; d < first_dim; ++d) {
          block_a[static_cast<std::size_t>(d)] =
              (bit_a == 1 ? 1.0 : -1.0) * patterns_a[0][static_cast<std::size_t>(d)];
        }
        add_noise(block_a, spec.noise, noise_a);
        std::vector<double> block_b(static_cast<std::size_t>(second_dim));
        for (int d = 0; d < second_dim; ++d) {
          block_b[static_cast<std::size_t>(d)] =
              (bit_b == 1 ? 1.0 : -1.0) * patterns_b[0][static_cast<std::size_t>(d)];
        }
        add_noise(block_b, spec.noise, noise_b);
        s.features[first_id] = std::move(block_a);
        s.features[second_id] = std::move(block_b);
      }
      break;
    }
  }
  return validate_dataset(std::move(dataset));
}

// ---------------------------------------------------------------------------
// Toy models
// ---------------------------------------------------------------------------

namespace {

constexpr int kEpochs = 400;
constexpr double kLearningRate = 0.2;

/// Feature map shared by the linear toys: the concatenated modality blocks,
/// plus (for the interaction model) the flattened outer product of every
/// modality pair. Products vanish when either block is baseline-filled, so a
/// masked modality contributes nothing through them.
std::vector<double> feature_vector(const ModalitySchema& schema, const Sample& s,
                                   bool with_products) {
  std::vector<double> phi;
  for (const Modality& m : schema.modalities()) {
    const std::vector<double>& block = s.features.at(m.id);
    phi.insert(phi.end(), block.begin(), block.end());
  }
  if (with_products) {
    const auto& mods = schema.modalities();
    for (std::size_t i = 0; i < mods.size(); ++i) {
      for (std::size_t j = i + 1; j < mods.size(); ++j) {
        const std::vector<double>& a = s.features.at(mods[i].id);
        const std::vector<double>& b = s.features.at(mods[j].id);
        for (double va : a) {
          for (double vb : b) {
            phi.push_back(va * vb);
          }
        }
      }
    }
  }
  return phi;
}

}  // namespace

struct ToyEvaluator::Impl {
  // majority
  int majority_label = 0;
  // centroid
  std::vector<int> centroid_labels;
  std::vector<std::vector<double>> centroids;
  // linear / interaction
  bool with_products = false;
  std::vector<std::vector<double>> weights;  // [class][feature]
  std::vector<double> bias;                  // [class]

  int predict_one(const ModalitySchema& schema, const Sample& s, ToyModelKind kind) const {
    switch (kind) {
      case ToyModelKind::kMajority:
        return majority_label;
      case ToyModelKind::kNearestCentroid: {
        const std::vector<double> phi = feature_vector(schema, s, false);
        int best = centroid_labels.front();
        double best_dist = 0.0;
        bool first = true;
        for (std::size_t c = 0; c < centroids.size(); ++c) {
          double dist = 0.0;
          for (std::size_t d = 0; d < phi.size(); ++d) {
            const double diff = phi[d] - centroids[c][d];
            dist += diff * diff;
          }
          if (first || dist < best_dist) {  // strict: ties keep the lowest label
            first = false;
            best_dist = dist;
            best = centroid_labels[c];
          }
        }
        return best;
      }
      case ToyModelKind::kAdditiveLinear:
      case ToyModelKind::kInteraction: {
        const std::vector<double> phi = feature_vector(schema, s, with_products);
        int best = 0;
        double best_score = 0.0;
        for (std::size_t c = 0; c < weights.size(); ++c) {
          double score = bias[c];
          for (std::size_t d = 0; d < phi.size(); ++d) {
            score += weights[c][d] * phi[d];
          }
          if (c == 0 || score > best_score) {  // strict: ties keep the lowest label
            best_score = score;
            best = static_cast<int>(c);
          }
        }
        return best;
      }
    }
    return 0;
  }

  void fit(const ModalitySchema& schema, const Dataset& train, ToyModelKind kind) {
    switch (kind) {
      case ToyModelKind::kMajority: {
        majority_label = majority_classifier(train.labels()).label;
        return;
      }
      case ToyModelKind::kNearestCentroid: {
        std::map<int, std::pair<std::vector<double>, std::size_t>> sums;
        for (const Sample& s : train.samples) {
          const std::vector<double> phi = feature_vector(schema, s, false);
          auto& [sum, count] = sums[s.label];
          if (sum.empty()) {
            sum.assign(phi.size(), 0.0);
          }
          for (std::size_t d = 0; d < phi.size(); ++d) {
            sum[d] += phi[d];
          }
          ++count;
        }
        for (auto& [label, entry] : sums) {  // ascending label order
          auto& [sum, count] = entry;
          for (double& v : sum) {
            v /= static_cast<double>(count);
          }
          centroid_labels.push_back(label);
          centroids.push_back(std::move(sum));
        }
        return;
      }
      case ToyModelKind::kAdditiveLinear:
      case ToyModelKind::kInteraction: {
        with_products = kind == ToyModelKind::kInteraction;
        const std::size_t n = train.samples.size();
        const std::size_t k = static_cast<std::size_t>(schema.num_classes());
        std::vector<std::vector<double>> phis;
        phis.reserve(n);
        for (const Sample& s : train.samples) {
          phis.push_back(feature_vector(schema, s, with_products));
        }
        const std::size_t dim = phis.front().size();
        weights.assign(k, std::vector<double>(dim, 0.0));
        bias.assign(k, 0.0);

        // Full-batch softmax regression, fixed epochs, fixed step, zero init.
        std::vector<double> logits(k), probs(k);
        std::vector<std::vector<double>> grad_w(k, std::vector<double>(dim));
        std::vector<double> grad_b(k);
        for (int epoch = 0; epoch < kEpochs; ++epoch) {
          for (auto& row : grad_w) {
            std::fill(row.begin(), row.end(), 0.0);
          }
          std::fill(grad_b.begin(), grad_b.end(), 0.0);
          for (std::size_t i = 0; i < n; ++i) {
            const std::vector<double>& phi = phis[i];
            double max_logit = -1e300;
            for (std::size_t c = 0; c < k; ++c) {
              logits[c] = bias[c] +
                          std::inner_product(weights[c].begin(), weights[c].end(), phi.begin(), 0.0);
              max_logit = std::max(max_logit, logits[c]);
            }
            double z = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
              probs[c] = std::exp(logits[c] - max_logit);
              z += probs[c];
            }
            for (std::size_t c = 0; c < k; ++c) {
              probs[c] /= z;
              const double err =
                  probs[c] - (train.samples[i].label == static_cast<int>(c) ? 1.0 : 0.0);
              grad_b[c] += err;
              for (std::size_t d = 0; d < dim; ++d) {
                grad_w[c][d] += err * phi[d];
              }
            }
          }
          const double step = kLearningRate / static_cast<double>(n);
          for (std::size_t c = 0; c < k; ++c) {
            bias[c] -= step * grad_b[c];
            for (std::size_t d = 0; d < dim; ++d) {
              weights[c][d] -= step * grad_w[c][d];
            }
          }
        }
        return;
      }
    }
  }
};

ToyEvaluator::ToyEvaluator(ToyModelKind kind, const Dataset& train)
    : kind_(kind), schema_(train.schema), impl_(std::make_unique<Impl>()) {
  if (train.samples.empty()) {
    throw ContractError("toy model: training dataset is empty");
  }
  impl_->fit(schema_, train, kind_);
}

ToyEvaluator::~ToyEvaluator() = default;

std::vector<int> ToyEvaluator::predict(const Dataset& inputs, const CoalitionMask&) const {
  if (!(inputs.schema == schema_)) {
    throw ContractError("toy model: evaluation schema differs from training schema");
  }
  std::vector<int> out;
  out.reserve(inputs.samples.size());
  for (const Sample& s : inputs.samples) {
    out.push_back(impl_->predict_one(schema_, s, kind_));
  }
  return out;
}

std::string ToyEvaluator::name() const {
  return std::string("toy:") + toy_model_name(kind_);
}

std::vector<int> fit_predict(ToyModelKind kind, const Dataset& train, const Dataset& eval) {
  const ToyEvaluator evaluator(kind, train);
  return evaluator.predict(eval, CoalitionMask::full(eval.schema));
}

}  // namespace mmscore
