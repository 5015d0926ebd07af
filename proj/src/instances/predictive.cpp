#include "lak/instances/predictive.hpp"

#include <cmath>

#include "lak/errors.hpp"
#include "lak/random.hpp"

namespace lak::predictive {
namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Inputs of every recurrence step for one sequence: windowed features at
// observation steps, zeros at ticks.
std::vector<std::vector<double>> step_inputs(const PredictiveModel& m, const ObservationSeq& obs,
                                             GapPolicy gap_policy) {
  const std::size_t k = m.channel_count();
  std::vector<std::vector<double>> values;
  values.reserve(obs.size());
  for (const auto& item : obs) values.push_back(channel_values(m, item.o));

  std::vector<std::vector<double>> inputs;
  TimeIndex now = 0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (gap_policy == GapPolicy::TickPerMissingIndex) {
      for (TimeIndex gap = now + 1; gap < obs[i].t; ++gap) {
        inputs.emplace_back(m.feature_dim(), 0.0);
      }
    }
    now = obs[i].t;
    std::vector<double> x(m.feature_dim(), 0.0);
    for (std::size_t slot = 0; slot < m.window; ++slot) {
      // slot 0 is the oldest position of the window
      const std::size_t back = m.window - 1 - slot;
      if (back > i) continue;
      const auto& v = values[i - back];
      for (std::size_t c = 0; c < k; ++c) x[slot * k + c] = v[c];
    }
    inputs.push_back(std::move(x));
  }
  return inputs;
}

std::vector<double> recur(const PredictiveModel& m, const std::vector<double>& h,
                          const std::vector<double>& x) {
  const std::size_t d = m.state_dim;
  const std::size_t f = m.feature_dim();
  std::vector<double> out(d);
  for (std::size_t r = 0; r < d; ++r) {
    double a = 0.0;
    for (std::size_t c = 0; c < d; ++c) a += m.A[r * d + c] * h[c];
    for (std::size_t c = 0; c < f; ++c) a += m.B[r * f + c] * x[c];
    out[r] = std::tanh(a);
  }
  return out;
}

double readout(const PredictiveModel& m, const std::vector<double>& h) {
  double z = m.b;
  for (std::size_t r = 0; r < m.state_dim; ++r) z += m.u[r] * h[r];
  return z;
}

}  // namespace

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::size_t PredictiveModel::parameter_count() const {
  return state_dim * state_dim + state_dim * feature_dim() + state_dim + 1;
}

PredictiveModel zero_model(std::size_t window, std::size_t state_dim,
                           std::vector<std::string> channels) {
  PredictiveModel m;
  m.window = window;
  m.state_dim = state_dim;
  m.channels = std::move(channels);
  m.A.assign(state_dim * state_dim, 0.0);
  m.B.assign(state_dim * m.feature_dim(), 0.0);
  m.u.assign(state_dim, 0.0);
  return m;
}

void validate(const PredictiveModel& model) {
  if (model.window == 0 || model.state_dim == 0) {
    throw LaError(ErrorKind::InvalidParams, "window and state_dim must be at least 1");
  }
  const std::size_t d = model.state_dim;
  if (model.A.size() != d * d || model.B.size() != d * model.feature_dim() ||
      model.u.size() != d) {
    throw LaError(ErrorKind::DimensionMismatch,
                  "expected A " + std::to_string(d) + "x" + std::to_string(d) + ", B " +
                      std::to_string(d) + "x" + std::to_string(model.feature_dim()) + ", u " +
                      std::to_string(d));
  }
  for (double v : flatten(model)) {
    if (!std::isfinite(v)) throw LaError(ErrorKind::InvalidParams, "non-finite model weight");
  }
}

std::vector<double> channel_values(const PredictiveModel& model, const Observation& o) {
  if (model.channels.empty()) {
    if (!o.is_number()) {
      throw LaError(ErrorKind::MalformedObservation, "expected a number, got " + describe(o));
    }
    return {o.as_number()};
  }
  if (!o.is_record()) {
    throw LaError(ErrorKind::MalformedObservation, "expected a record, got " + describe(o));
  }
  std::vector<double> v;
  v.reserve(model.channels.size());
  for (const auto& name : model.channels) {
    auto it = o.as_record().find(name);
    if (it == o.as_record().end() || !std::holds_alternative<double>(it->second)) {
      throw LaError(ErrorKind::SchemaMismatch, "observation lacks numeric channel '" + name + "'");
    }
    v.push_back(std::get<double>(it->second));
  }
  return v;
}

std::vector<double> window_features(const PredictiveModel& model, const ObservationSeq& obs) {
  if (obs.empty()) return std::vector<double>(model.feature_dim(), 0.0);
  return step_inputs(model, obs, GapPolicy::NoTicks).back();
}

LaStructure predictive_structure(const PredictiveModel& model) {
  validate(model);
  const std::size_t d = model.state_dim;
  const std::size_t f = model.feature_dim();

  LaStructure s;
  s.name = "predictive";
  s.obs_space = {model.channels.empty() ? "real numbers" : "records of numeric channels",
                 [model](const Observation& o) {
                   return model.channels.empty() ? o.is_number() : o.is_record();
                 }};
  s.exp_space = {"R^" + std::to_string(f), [f](const Experience& e) {
                   const auto* v = std::get_if<std::vector<double>>(&e.payload);
                   return v != nullptr && v->size() == f;
                 }};
  s.state_space = {"R^" + std::to_string(d), [d](const State& st) {
                     const auto* v = std::get_if<std::vector<double>>(&st.payload);
                     return v != nullptr && v->size() == d;
                   }};
  s.inf_space = {"risk in (0, 1)", [](const Inference& i) { return i.is_number(); }};
  s.s0 = State{std::vector<double>(d, 0.0)};
  s.f_e = [model](const ObservationSeq& obs) { return Experience{window_features(model, obs)}; };
  s.f_s = [model, f](const State& prev, const Experience& e) {
    const auto& h = std::get<std::vector<double>>(prev.payload);
    if (e.is_empty()) return State{recur(model, h, std::vector<double>(f, 0.0))};
    const auto* x = std::get_if<std::vector<double>>(&e.payload);
    if (x == nullptr || x->size() != f) {
      throw LaError(ErrorKind::DimensionMismatch, "feature vector has the wrong size");
    }
    return State{recur(model, h, *x)};
  };
  s.f_i = [model](std::span<const State> states) {
    const auto& h = std::get<std::vector<double>>(states.back().payload);
    return Inference::number(logistic(readout(model, h)));
  };
  return s;
}

std::vector<double> flatten(const PredictiveModel& model) {
  std::vector<double> p;
  p.reserve(model.parameter_count());
  p.insert(p.end(), model.A.begin(), model.A.end());
  p.insert(p.end(), model.B.begin(), model.B.end());
  p.insert(p.end(), model.u.begin(), model.u.end());
  p.push_back(model.b);
  return p;
}

void unflatten(PredictiveModel& model, const std::vector<double>& params) {
  if (params.size() != model.parameter_count()) {
    throw LaError(ErrorKind::DimensionMismatch, "parameter vector has the wrong size");
  }
  auto it = params.begin();
  auto take = [&it](std::vector<double>& dst) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(dst.size()), dst.begin());
    it += static_cast<std::ptrdiff_t>(dst.size());
  };
  model.A.resize(model.state_dim * model.state_dim);
  model.B.resize(model.state_dim * model.feature_dim());
  model.u.resize(model.state_dim);
  take(model.A);
  take(model.B);
  take(model.u);
  model.b = *it;
}

double loss(const PredictiveModel& model, const std::vector<LabeledSeq>& corpus,
            GapPolicy gap_policy) {
  if (corpus.empty()) throw LaError(ErrorKind::EmptyCorpus, "loss over an empty corpus");
  double total = 0.0;
  for (const auto& item : corpus) {
    std::vector<double> h(model.state_dim, 0.0);
    for (const auto& x : step_inputs(model, item.obs, gap_policy)) h = recur(model, h, x);
    const double z = readout(model, h);
    total += softplus(z) - item.label * z;
  }
  return total / static_cast<double>(corpus.size());
}

std::pair<double, std::vector<double>> loss_and_gradient(const PredictiveModel& model,
                                                         const std::vector<LabeledSeq>& corpus,
                                                         GapPolicy gap_policy) {
  if (corpus.empty()) throw LaError(ErrorKind::EmptyCorpus, "loss over an empty corpus");
  const std::size_t d = model.state_dim;
  const std::size_t f = model.feature_dim();
  std::vector<double> gA(d * d, 0.0), gB(d * f, 0.0), gu(d, 0.0);
  double gb = 0.0;
  double total = 0.0;

  // Accumulated in corpus order so results are bit-reproducible.
  for (const auto& item : corpus) {
    const auto inputs = step_inputs(model, item.obs, gap_policy);
    std::vector<std::vector<double>> hs{std::vector<double>(d, 0.0)};
    for (const auto& x : inputs) hs.push_back(recur(model, hs.back(), x));

    const double z = readout(model, hs.back());
    total += softplus(z) - item.label * z;
    const double dz = logistic(z) - item.label;
    gb += dz;
    std::vector<double> dh(d);
    for (std::size_t r = 0; r < d; ++r) {
      gu[r] += dz * hs.back()[r];
      dh[r] = dz * model.u[r];
    }
    for (std::size_t j = inputs.size(); j-- > 0;) {
      const auto& h = hs[j + 1];
      const auto& h_prev = hs[j];
      const auto& x = inputs[j];
      std::vector<double> da(d);
      for (std::size_t r = 0; r < d; ++r) da[r] = dh[r] * (1.0 - h[r] * h[r]);
      std::vector<double> next_dh(d, 0.0);
      for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
          gA[r * d + c] += da[r] * h_prev[c];
          next_dh[c] += model.A[r * d + c] * da[r];
        }
        for (std::size_t c = 0; c < f; ++c) gB[r * f + c] += da[r] * x[c];
      }
      dh = std::move(next_dh);
    }
  }

  const double n = static_cast<double>(corpus.size());
  std::vector<double> grad;
  grad.reserve(model.parameter_count());
  for (double v : gA) grad.push_back(v / n);
  for (double v : gB) grad.push_back(v / n);
  for (double v : gu) grad.push_back(v / n);
  grad.push_back(gb / n);
  return {total / n, std::move(grad)};
}

PredictiveModel initial_model(const TrainHyper& hyper) {
  PredictiveModel m = zero_model(hyper.window, hyper.state_dim, hyper.channels);
  validate(m);
  SplitMix64 rng(hyper.seed);
  std::vector<double> p(m.parameter_count());
  for (double& v : p) v = rng.uniform(-hyper.init_scale, hyper.init_scale);
  unflatten(m, p);
  return m;
}

TrainResult train_predictive(const std::vector<LabeledSeq>& corpus, const TrainHyper& hyper) {
  if (corpus.empty()) throw LaError(ErrorKind::EmptyCorpus, "training corpus is empty");
  for (const auto& item : corpus) {
    if (item.label != 0 && item.label != 1) {
      throw LaError(ErrorKind::InvalidParams, "labels must be 0 or 1");
    }
  }
  if (!(hyper.learning_rate > 0.0)) {
    throw LaError(ErrorKind::InvalidParams, "learning rate must be positive");
  }

  TrainResult result;
  result.model = initial_model(hyper);
  double lr = hyper.learning_rate;
  std::vector<double> params = flatten(result.model);
  auto [current, grad] = loss_and_gradient(result.model, corpus, hyper.gap_policy);
  result.loss_history.push_back(current);

  PredictiveModel candidate = result.model;
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (;;) {
      std::vector<double> trial(params.size());
      for (std::size_t i = 0; i < params.size(); ++i) trial[i] = params[i] - lr * grad[i];
      unflatten(candidate, trial);
      auto [trial_loss, trial_grad] = loss_and_gradient(candidate, corpus, hyper.gap_policy);
      if (trial_loss <= current) {
        params = std::move(trial);
        current = trial_loss;
        grad = std::move(trial_grad);
        break;
      }
      lr *= 0.5;
      if (lr < 1e-12) break;  // no descent direction left at this precision
    }
    result.loss_history.push_back(current);
  }
  unflatten(result.model, params);
  result.final_learning_rate = lr;
  return result;
}

}  // namespace lak::predictive
