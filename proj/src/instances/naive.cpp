#include "lak/instances/naive.hpp"

#include <algorithm>

#include "lak/errors.hpp"
#include "lak/instances/bkt.hpp"

namespace lak::naive {
namespace {

double centered_mean(const ObservationSeq& obs, std::size_t centre, std::size_t width) {
  const std::size_t half = width / 2;
  const std::size_t lo = centre >= half ? centre - half : 0;
  const std::size_t hi = std::min(obs.size() - 1, centre + half);
  double sum = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) sum += score(obs[i].o);
  return sum / static_cast<double>(hi - lo + 1);
}

void check_width(std::size_t width) {
  if (width == 0 || width % 2 == 0) {
    throw LaError(ErrorKind::InvalidParams, "smoothing window must be odd and positive");
  }
}

}  // namespace

double score(const Observation& o) {
  if (o.is_number()) return o.as_number();
  if (o.is_symbol()) {
    if (o.as_symbol() == bkt::kCorrect) return 1.0;
    if (o.as_symbol() == bkt::kIncorrect) return 0.0;
  }
  throw LaError(ErrorKind::MalformedObservation, "cannot score " + describe(o));
}

LaFunction ex1_rate() {
  return {kRate, [](const ObservationSeq& obs) {
            if (obs.empty()) return Inference::number(0.0);
            double correct = 0.0;
            for (const auto& item : obs) correct += score(item.o);
            return Inference::number(correct / static_cast<double>(obs.size()));
          }};
}

LaFunction ex2_last() {
  return {kLast, [](const ObservationSeq& obs) {
            if (obs.empty()) return Inference::label(kNotUnderstood);
            return Inference::label(score(obs.back().o) > 0.5 ? kUnderstood : kNotUnderstood);
          }};
}

LaFunction ex3_smooth(std::size_t width) {
  check_width(width);
  return {kSmooth, [width](const ObservationSeq& obs) {
            if (obs.empty()) return Inference::number(0.0);
            return Inference::number(centered_mean(obs, obs.size() - 1, width));
          }};
}

std::vector<Inference> ex3_smooth_series(const ObservationSeq& obs, std::size_t width) {
  check_width(width);
  std::vector<Inference> out;
  out.reserve(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    out.push_back(Inference::number(centered_mean(obs, i, width)));
  }
  return out;
}

LaPractice naive_practices() { return LaPractice({ex1_rate(), ex2_last(), ex3_smooth()}); }

}  // namespace lak::naive
