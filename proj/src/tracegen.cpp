#include "lak/tracegen.hpp"

#include <cmath>
#include <cstdio>

#include "lak/errors.hpp"
#include "lak/random.hpp"

namespace lak::tracegen {
namespace {

GeneratedLearner bkt_learner(const bkt::BktParams& p, std::size_t len, SplitMix64& rng) {
  GeneratedLearner g;
  bool mastered = rng.bernoulli(p.p_init);
  for (std::size_t t = 1; t <= len; ++t) {
    g.truth.mastery.push_back(mastered);
    const bool correct = rng.bernoulli(mastered ? 1.0 - p.p_slip : p.p_guess);
    g.obs.push_back(t, Observation::symbol(correct ? bkt::kCorrect : bkt::kIncorrect));
    if (!mastered) mastered = rng.bernoulli(p.p_transit);
  }
  return g;
}

GeneratedLearner dropout_learner(const DropoutGenerator& d, std::size_t len, SplitMix64& rng) {
  GeneratedLearner g;
  const double q = rng.uniform();
  g.truth.propensity = q;
  double active = 0.0;
  for (std::size_t t = 1; t <= len; ++t) {
    const bool on = rng.bernoulli(q);
    active += on ? 1.0 : 0.0;
    g.obs.push_back(t, Observation::number(on ? 1.0 : 0.0));
  }
  const double mean = active / static_cast<double>(len);
  g.label = rng.bernoulli(predictive::logistic(d.signal_strength * (mean - d.base_rate))) ? 1 : 0;
  return g;
}

}  // namespace

void validate(const GenConfig& config) {
  if (config.n_learners == 0) throw LaError(ErrorKind::InvalidParams, "n_learners must be >= 1");
  if (config.trace_len == 0) throw LaError(ErrorKind::InvalidParams, "trace_len must be >= 1");
  if (const auto* b = std::get_if<BktGenerator>(&config.generator)) {
    bkt::validate(b->params);
  } else {
    const auto& d = std::get<DropoutGenerator>(config.generator);
    if (!std::isfinite(d.base_rate) || !std::isfinite(d.signal_strength)) {
      throw LaError(ErrorKind::InvalidParams, "dropout parameters must be finite");
    }
  }
}

std::string learner_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "learner-%05zu", index);
  return buf;
}

std::vector<GeneratedLearner> generate(const GenConfig& config) {
  validate(config);
  std::vector<GeneratedLearner> out;
  out.reserve(config.n_learners);
  for (std::size_t i = 0; i < config.n_learners; ++i) {
    SplitMix64 rng = SplitMix64::stream(config.seed, i);
    GeneratedLearner g = std::visit(
        [&](const auto& gen) {
          using G = std::decay_t<decltype(gen)>;
          if constexpr (std::is_same_v<G, BktGenerator>) {
            return bkt_learner(gen.params, config.trace_len, rng);
          } else {
            return dropout_learner(gen, config.trace_len, rng);
          }
        },
        config.generator);
    g.learner_id = learner_id(i);
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<ObservationSeq> sequences(const std::vector<GeneratedLearner>& corpus) {
  std::vector<ObservationSeq> out;
  out.reserve(corpus.size());
  for (const auto& g : corpus) out.push_back(g.obs);
  return out;
}

std::vector<predictive::LabeledSeq> labeled(const std::vector<GeneratedLearner>& corpus) {
  std::vector<predictive::LabeledSeq> out;
  out.reserve(corpus.size());
  for (const auto& g : corpus) {
    if (!g.label) throw LaError(ErrorKind::InvalidParams, g.learner_id + " has no label");
    out.push_back({g.obs, *g.label});
  }
  return out;
}

}  // namespace lak::tracegen
