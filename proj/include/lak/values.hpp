#pragma once

// Value universes for observations, experiences, states and inferences.
// Each is a closed tagged union so that equality stays decidable.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lak {

/// Element of the time domain. Index 0 belongs to the initial state; observations start at 1.
using TimeIndex = std::uint64_t;

using Field = std::variant<std::string, double>;
using Record = std::map<std::string, Field>;

/// Default absolute tolerance for numeric equality of probabilities.
inline constexpr double kDefaultTolerance = 1e-12;

struct Observation {
  std::variant<std::string, double, Record> payload;

  static Observation symbol(std::string s) { return {std::move(s)}; }
  static Observation number(double x) { return {x}; }
  static Observation record(Record r) { return {std::move(r)}; }

  bool is_symbol() const { return std::holds_alternative<std::string>(payload); }
  bool is_number() const { return std::holds_alternative<double>(payload); }
  bool is_record() const { return std::holds_alternative<Record>(payload); }
  const std::string& as_symbol() const { return std::get<std::string>(payload); }
  double as_number() const { return std::get<double>(payload); }
  const Record& as_record() const { return std::get<Record>(payload); }

  auto operator<=>(const Observation&) const = default;
};

struct TimedObservation {
  TimeIndex t = 0;
  Observation o;
  auto operator<=>(const TimedObservation&) const = default;
};

/// O_{<=t}: observations with strictly increasing time indices. May be empty.
class ObservationSeq {
 public:
  ObservationSeq() = default;
  /// Throws NonMonotoneTime unless indices strictly increase.
  explicit ObservationSeq(std::vector<TimedObservation> items);

  /// Builds a sequence stamped at times 1..n.
  static ObservationSeq from_observations(std::vector<Observation> obs);
  static ObservationSeq from_symbols(const std::vector<std::string>& symbols);

  /// Appends at time `t`; throws NonMonotoneTime if `t` is not past the last index.
  void push_back(TimeIndex t, Observation o);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const TimedObservation& operator[](std::size_t i) const { return items_[i]; }
  const TimedObservation& back() const { return items_.back(); }
  const std::vector<TimedObservation>& items() const { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  /// The first `n` entries.
  ObservationSeq prefix(std::size_t n) const;

  auto operator<=>(const ObservationSeq&) const = default;

 private:
  std::vector<TimedObservation> items_;
};

/// The empty experience (no experience at this step).
struct NoExperience {
  auto operator<=>(const NoExperience&) const = default;
};

struct Experience {
  std::variant<NoExperience, std::string, ObservationSeq, std::vector<double>, Record> payload;

  static Experience none() { return {NoExperience{}}; }
  bool is_empty() const { return std::holds_alternative<NoExperience>(payload); }

  auto operator<=>(const Experience&) const = default;
};

/// A (label, number) state such as BKT's (learned, p).
struct LabeledNumber {
  std::string label;
  double value = 0.0;
  /// 1 - value kept at full precision; a probability near 1 cannot carry it itself.
  std::optional<double> complement;
  auto operator<=>(const LabeledNumber&) const = default;
};

struct State {
  std::variant<std::string, double, std::vector<double>, LabeledNumber, ObservationSeq, Record>
      payload;

  auto operator<=>(const State&) const = default;
};

/// One named series of a dashboard view.
using Series = std::vector<std::pair<TimeIndex, double>>;

/// A set of named visualization series.
struct View {
  std::map<std::string, Series> series;
  auto operator<=>(const View&) const = default;
};

struct Inference {
  /// number, label, ranking or view
  std::variant<double, std::string, std::vector<std::string>, View> payload;

  static Inference number(double x) { return {x}; }
  static Inference label(std::string s) { return {std::move(s)}; }

  bool is_number() const { return std::holds_alternative<double>(payload); }
  double as_number() const { return std::get<double>(payload); }

  auto operator<=>(const Inference&) const = default;
};

using StateSeq = std::vector<State>;

// Tolerant equality: structural, with numbers compared under an absolute tolerance.
bool approx_equal(const Field& a, const Field& b, double tol = kDefaultTolerance);
bool approx_equal(const Record& a, const Record& b, double tol = kDefaultTolerance);
bool approx_equal(const Observation& a, const Observation& b, double tol = kDefaultTolerance);
bool approx_equal(const ObservationSeq& a, const ObservationSeq& b,
                  double tol = kDefaultTolerance);
bool approx_equal(const Experience& a, const Experience& b, double tol = kDefaultTolerance);
bool approx_equal(const State& a, const State& b, double tol = kDefaultTolerance);
bool approx_equal(const Inference& a, const Inference& b, double tol = kDefaultTolerance);

/// Largest absolute numeric difference between two structurally matching values,
/// or +infinity when they differ structurally.
double numeric_distance(const Inference& a, const Inference& b);
double numeric_distance(const Experience& a, const Experience& b);

// Short human-readable renderings, used in notes and diagnostics.
std::string describe(const Observation& o);
std::string describe(const ObservationSeq& seq);
std::string describe(const Experience& e);
std::string describe(const State& s);
std::string describe(const Inference& i);

}  // namespace lak
