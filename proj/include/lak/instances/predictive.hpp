#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lak/structure.hpp"

namespace lak::predictive {

/// Windowed features feeding a tanh recurrence with a logistic read-out:
///   x_t     = last `window` observations (k channels each), zero-padded
///   s_{t+1} = tanh(A s_t + B x_{t+1}),   s_0 = 0
///   risk_t  = logistic(u . s_t + b)
/// An empty experience applies the recurrence with x = 0.
struct PredictiveModel {
  std::size_t window = 1;
  /// Channel names for record observations; empty means scalar observations (k = 1).
  std::vector<std::string> channels;
  std::size_t state_dim = 1;
  std::vector<double> A;  ///< state_dim x state_dim, row-major
  std::vector<double> B;  ///< state_dim x feature_dim, row-major
  std::vector<double> u;  ///< state_dim
  double b = 0.0;

  std::size_t channel_count() const { return channels.empty() ? 1 : channels.size(); }
  std::size_t feature_dim() const { return window * channel_count(); }
  /// Total number of trainable parameters.
  std::size_t parameter_count() const;

  auto operator<=>(const PredictiveModel&) const = default;
};

/// Zero-initialized model of the given shape.
PredictiveModel zero_model(std::size_t window, std::size_t state_dim,
                           std::vector<std::string> channels = {});

/// Throws DimensionMismatch when matrix sizes disagree with the shape, InvalidParams
/// when window or state_dim is zero or an entry is not finite.
void validate(const PredictiveModel& model);

/// Channel values of one observation; throws MalformedObservation / SchemaMismatch.
std::vector<double> channel_values(const PredictiveModel& model, const Observation& o);

/// f_e on its own: the windowed feature vector of the newest prefix.
std::vector<double> window_features(const PredictiveModel& model, const ObservationSeq& obs);

LaStructure predictive_structure(const PredictiveModel& model);

/// Flat parameter vector in the order A, B, u, b, and its inverse.
std::vector<double> flatten(const PredictiveModel& model);
void unflatten(PredictiveModel& model, const std::vector<double>& params);

struct LabeledSeq {
  ObservationSeq obs;
  int label = 0;  ///< 0 or 1
};

/// Mean binary cross-entropy of the final-time risk against the labels.
double loss(const PredictiveModel& model, const std::vector<LabeledSeq>& corpus,
            GapPolicy gap_policy = GapPolicy::NoTicks);

/// Loss and its gradient (same order as `flatten`) by backpropagation through time.
std::pair<double, std::vector<double>> loss_and_gradient(
    const PredictiveModel& model, const std::vector<LabeledSeq>& corpus,
    GapPolicy gap_policy = GapPolicy::NoTicks);

struct TrainHyper {
  std::size_t window = 3;
  std::size_t state_dim = 4;
  std::vector<std::string> channels;
  std::size_t epochs = 300;
  double learning_rate = 1.0;
  double init_scale = 0.5;
  std::uint64_t seed = 7;
  GapPolicy gap_policy = GapPolicy::NoTicks;
};

struct TrainResult {
  PredictiveModel model;
  std::vector<double> loss_history;  ///< loss before training, then after each epoch
  double final_learning_rate = 0.0;
};

/// Full-batch gradient descent on the mean cross-entropy. A step that would raise
/// the loss is rejected and the step size halved, so the recorded history never
/// increases. Deterministic for a given seed. Throws EmptyCorpus / InvalidParams.
TrainResult train_predictive(const std::vector<LabeledSeq>& corpus, const TrainHyper& hyper);

/// Uniform(-init_scale, init_scale) initialization from the seed.
PredictiveModel initial_model(const TrainHyper& hyper);

double logistic(double z);

}  // namespace lak::predictive
