#include "lak/values.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lak/errors.hpp"

namespace lak {

ObservationSeq::ObservationSeq(std::vector<TimedObservation> items) {
  items_.reserve(items.size());
  for (auto& item : items) push_back(item.t, std::move(item.o));
}

ObservationSeq ObservationSeq::from_observations(std::vector<Observation> obs) {
  ObservationSeq seq;
  TimeIndex t = 1;
  for (auto& o : obs) seq.push_back(t++, std::move(o));
  return seq;
}

ObservationSeq ObservationSeq::from_symbols(const std::vector<std::string>& symbols) {
  ObservationSeq seq;
  TimeIndex t = 1;
  for (const auto& s : symbols) seq.push_back(t++, Observation::symbol(s));
  return seq;
}

void ObservationSeq::push_back(TimeIndex t, Observation o) {
  if (!items_.empty() && t <= items_.back().t) {
    throw LaError(ErrorKind::NonMonotoneTime,
                  "time index " + std::to_string(t) + " does not exceed previous index " +
                      std::to_string(items_.back().t));
  }
  items_.push_back({t, std::move(o)});
}

ObservationSeq ObservationSeq::prefix(std::size_t n) const {
  ObservationSeq out;
  out.items_.assign(items_.begin(), items_.begin() + static_cast<std::ptrdiff_t>(
                                                         std::min(n, items_.size())));
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double distance(double a, double b) { return a == b ? 0.0 : std::fabs(a - b); }

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return kInf;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, distance(a[i], b[i]));
  return d;
}

double distance(const Field& a, const Field& b) {
  if (a.index() != b.index()) return kInf;
  if (const auto* x = std::get_if<double>(&a)) return distance(*x, std::get<double>(b));
  return a == b ? 0.0 : kInf;
}

double distance(const Record& a, const Record& b) {
  if (a.size() != b.size()) return kInf;
  double d = 0.0;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return kInf;
    d = std::max(d, distance(ia->second, ib->second));
  }
  return d;
}

double distance(const Observation& a, const Observation& b) {
  if (a.payload.index() != b.payload.index()) return kInf;
  if (a.is_number()) return distance(a.as_number(), b.as_number());
  if (a.is_record()) return distance(a.as_record(), b.as_record());
  return a == b ? 0.0 : kInf;
}

double distance(const ObservationSeq& a, const ObservationSeq& b) {
  if (a.size() != b.size()) return kInf;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].t != b[i].t) return kInf;
    d = std::max(d, distance(a[i].o, b[i].o));
  }
  return d;
}

double distance(const Series& a, const Series& b) {
  if (a.size() != b.size()) return kInf;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].first != b[i].first) return kInf;
    d = std::max(d, distance(a[i].second, b[i].second));
  }
  return d;
}

double distance(const View& a, const View& b) {
  if (a.series.size() != b.series.size()) return kInf;
  double d = 0.0;
  for (auto ia = a.series.begin(), ib = b.series.begin(); ia != a.series.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return kInf;
    d = std::max(d, distance(ia->second, ib->second));
  }
  return d;
}

template <class Variant>
double variant_distance(const Variant& a, const Variant& b) {
  if (a.index() != b.index()) return kInf;
  return std::visit(
      [&](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, double> || std::is_same_v<T, std::vector<double>> ||
                      std::is_same_v<T, Record> || std::is_same_v<T, ObservationSeq> ||
                      std::is_same_v<T, View>) {
          return distance(x, y);
        } else if constexpr (std::is_same_v<T, LabeledNumber>) {
          return x.label == y.label ? distance(x.value, y.value) : kInf;
        } else {
          return x == y ? 0.0 : kInf;
        }
      },
      a);
}

}  // namespace

bool approx_equal(const Field& a, const Field& b, double tol) { return distance(a, b) <= tol; }
bool approx_equal(const Record& a, const Record& b, double tol) { return distance(a, b) <= tol; }
bool approx_equal(const Observation& a, const Observation& b, double tol) {
  return distance(a, b) <= tol;
}
bool approx_equal(const ObservationSeq& a, const ObservationSeq& b, double tol) {
  return distance(a, b) <= tol;
}
bool approx_equal(const Experience& a, const Experience& b, double tol) {
  return variant_distance(a.payload, b.payload) <= tol;
}
bool approx_equal(const State& a, const State& b, double tol) {
  return variant_distance(a.payload, b.payload) <= tol;
}
bool approx_equal(const Inference& a, const Inference& b, double tol) {
  return variant_distance(a.payload, b.payload) <= tol;
}

double numeric_distance(const Inference& a, const Inference& b) {
  return variant_distance(a.payload, b.payload);
}
double numeric_distance(const Experience& a, const Experience& b) {
  return variant_distance(a.payload, b.payload);
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string describe(const Field& f) {
  if (const auto* s = std::get_if<std::string>(&f)) return *s;
  return fmt(std::get<double>(f));
}

std::string describe(const Record& r) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : r) {
    if (!first) out += ", ";
    first = false;
    out += k + ": " + describe(v);
  }
  return out + "}";
}

std::string describe(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out + "]";
}

}  // namespace

std::string describe(const Observation& o) {
  if (o.is_symbol()) return o.as_symbol();
  if (o.is_number()) return fmt(o.as_number());
  return describe(o.as_record());
}

std::string describe(const ObservationSeq& seq) {
  std::string out = "(";
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ", ";
    out += describe(seq[i].o) + "@" + std::to_string(seq[i].t);
  }
  return out + ")";
}

std::string describe(const Experience& e) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NoExperience>) {
          return "<empty>";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else {
          return describe(x);
        }
      },
      e.payload);
}

std::string describe(const State& s) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else if constexpr (std::is_same_v<T, double>) {
          return fmt(x);
        } else if constexpr (std::is_same_v<T, LabeledNumber>) {
          return "(" + x.label + ", " + fmt(x.value) + ")";
        } else {
          return describe(x);
        }
      },
      s.payload);
}

std::string describe(const Inference& i) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          return fmt(x);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return "\"" + x + "\"";
        } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
          std::string out = "[";
          for (std::size_t k = 0; k < x.size(); ++k) out += (k ? ", " : "") + x[k];
          return out + "]";
        } else {
          std::string out = "view{";
          bool first = true;
          for (const auto& [name, series] : x.series) {
            if (!first) out += "; ";
            first = false;
            out += name + ":";
            for (const auto& [t, v] : series) out += " " + std::to_string(t) + "=" + fmt(v);
          }
          return out + "}";
        }
      },
      i.payload);
}

}  // namespace lak
