#include "lak/persistence.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>

#include "lak/errors.hpp"
#include "lak/instances/naive.hpp"

namespace lak::persist {
namespace {

[[noreturn]] void schema(const std::string& msg) { throw LaError(ErrorKind::SchemaError, msg); }

const Json& expect_object(const Json& j, const char* what) {
  if (!j.is_object()) schema(std::string(what) + " must be a JSON object");
  return j;
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const char* what) {
  expect_object(j, what);
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      schema(std::string(what) + ": unknown key '" + key + "'");
    }
  }
}

const Json& require(const Json& j, const char* key, const char* what) {
  auto it = j.find(key);
  if (it == j.end()) schema(std::string(what) + ": missing key '" + key + "'");
  return *it;
}

double as_double(const Json& j, const char* what) {
  if (!j.is_number()) schema(std::string(what) + " must be a number");
  return j.get<double>();
}

std::uint64_t as_unsigned(const Json& j, const char* what) {
  if (!j.is_number_unsigned()) schema(std::string(what) + " must be a non-negative integer");
  return j.get<std::uint64_t>();
}

std::string as_string(const Json& j, const char* what) {
  if (!j.is_string()) schema(std::string(what) + " must be a string");
  return j.get<std::string>();
}

std::vector<double> as_doubles(const Json& j, const char* what) {
  if (!j.is_array()) schema(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(as_double(x, what));
  return out;
}

std::vector<std::string> as_strings(const Json& j, const char* what) {
  if (!j.is_array()) schema(std::string(what) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& x : j) out.push_back(as_string(x, what));
  return out;
}

double get_double_or(const Json& j, const char* key, double fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : as_double(*it, key);
}

Json to_json(const Record& r) {
  Json out = Json::object();
  for (const auto& [k, v] : r) {
    if (const auto* s = std::get_if<std::string>(&v)) {
      out[k] = *s;
    } else {
      out[k] = std::get<double>(v);
    }
  }
  return out;
}

Record record_from_json(const Json& j) {
  expect_object(j, "record");
  Record r;
  for (const auto& [k, v] : j.items()) {
    if (v.is_string()) {
      r[k] = v.get<std::string>();
    } else if (v.is_number()) {
      r[k] = v.get<double>();
    } else {
      schema("record field '" + k + "' must be a string or a number");
    }
  }
  return r;
}

Json timed(TimeIndex t, const char* key, Json value) {
  Json j = Json::object();
  j["t"] = t;
  j[key] = std::move(value);
  return j;
}

// Trace JSONL

TraceMeta meta_from_json(const Json& j) {
  check_keys(j, {"learner_id", "alphabet", "label"}, "meta");
  TraceMeta m;
  if (auto it = j.find("learner_id"); it != j.end()) m.learner_id = as_string(*it, "learner_id");
  if (auto it = j.find("alphabet"); it != j.end()) m.alphabet = as_strings(*it, "alphabet");
  if (auto it = j.find("label"); it != j.end()) {
    if (!it->is_number_integer()) schema("label must be an integer");
    m.label = it->get<int>();
  }
  return m;
}

Json to_json(const TraceMeta& m) {
  Json j = Json::object();
  j["learner_id"] = m.learner_id;
  if (!m.alphabet.empty()) j["alphabet"] = m.alphabet;
  if (m.label) j["label"] = *m.label;
  return j;
}

// Structure configs

Json bkt_params_json(const bkt::BktParams& p) {
  return Json{{"p_init", p.p_init},
              {"p_transit", p.p_transit},
              {"p_guess", p.p_guess},
              {"p_slip", p.p_slip},
              {"p_forget", p.p_forget}};
}

bkt::BktParams bkt_params_from_json(const Json& j) {
  check_keys(j, {"p_init", "p_transit", "p_guess", "p_slip", "p_forget"}, "bkt params");
  bkt::BktParams p;
  p.p_init = as_double(require(j, "p_init", "bkt params"), "p_init");
  p.p_transit = as_double(require(j, "p_transit", "bkt params"), "p_transit");
  p.p_guess = as_double(require(j, "p_guess", "bkt params"), "p_guess");
  p.p_slip = as_double(require(j, "p_slip", "bkt params"), "p_slip");
  p.p_forget = get_double_or(j, "p_forget", 0.0);
  bkt::validate(p);
  return p;
}

Json dashboard_json(const dashboard::DashboardConfig& c) {
  Json metrics = Json::array();
  for (auto m : c.metrics) metrics.push_back(std::string(dashboard::to_string(m)));
  Json j{{"metrics", metrics}};
  if (!c.unit_map.empty()) j["unit_map"] = c.unit_map;
  return j;
}

dashboard::DashboardConfig dashboard_from_json(const Json& j) {
  check_keys(j, {"metrics", "unit_map"}, "dashboard params");
  dashboard::DashboardConfig c;
  for (const auto& name : as_strings(require(j, "metrics", "dashboard params"), "metrics")) {
    c.metrics.push_back(dashboard::metric_from_string(name));
  }
  if (auto it = j.find("unit_map"); it != j.end()) {
    expect_object(*it, "unit_map");
    for (const auto& [task, unit] : it->items()) c.unit_map[task] = as_string(unit, "unit");
  }
  dashboard::dashboard_structure(c);  // validates
  return c;
}

Json predictive_json(const predictive::PredictiveModel& m) {
  Json j{{"window", m.window}, {"state_dim", m.state_dim}, {"A", m.A},
         {"B", m.B},           {"u", m.u},                 {"b", m.b}};
  if (!m.channels.empty()) j["channels"] = m.channels;
  return j;
}

predictive::PredictiveModel predictive_from_json(const Json& j) {
  check_keys(j, {"window", "state_dim", "channels", "A", "B", "u", "b"}, "predictive params");
  const char* what = "predictive params";
  predictive::PredictiveModel m;
  m.window = as_unsigned(require(j, "window", what), "window");
  m.state_dim = as_unsigned(require(j, "state_dim", what), "state_dim");
  if (auto it = j.find("channels"); it != j.end()) m.channels = as_strings(*it, "channels");
  m.A = as_doubles(require(j, "A", what), "A");
  m.B = as_doubles(require(j, "B", what), "B");
  m.u = as_doubles(require(j, "u", what), "u");
  m.b = as_double(require(j, "b", what), "b");
  predictive::validate(m);
  return m;
}

const char* const kNaivePrefix = "naive:";

NaiveParams naive_from(const std::string& name, const Json& params) {
  if (name != naive::kRate && name != naive::kLast && name != naive::kSmooth) {
    schema("unknown instance 'naive:" + name + "'");
  }
  NaiveParams p{name, 3};
  if (name == naive::kSmooth) {
    check_keys(params, {"width"}, "ex3_smooth params");
    if (auto it = params.find("width"); it != params.end()) p.width = as_unsigned(*it, "width");
    if (p.width == 0 || p.width % 2 == 0) schema("ex3_smooth width must be odd");
  } else {
    check_keys(params, {}, "naive params");
  }
  return p;
}

// Finite specs: the transition is a lookup table.
struct TransitionKey {
  State from;
  std::optional<Experience> on;
  auto operator<=>(const TransitionKey&) const = default;
};

}  // namespace

Json to_json(const Observation& o) {
  if (o.is_symbol()) return o.as_symbol();
  if (o.is_number()) return o.as_number();
  return to_json(o.as_record());
}

Observation observation_from_json(const Json& j) {
  if (j.is_string()) return Observation::symbol(j.get<std::string>());
  if (j.is_number()) return Observation::number(j.get<double>());
  if (j.is_object()) return Observation::record(record_from_json(j));
  schema("observation must be a string, number or object");
}

Json to_json(const ObservationSeq& seq) {
  Json out = Json::array();
  for (const auto& [t, o] : seq) out.push_back(timed(t, "o", to_json(o)));
  return out;
}

ObservationSeq observation_seq_from_json(const Json& j) {
  if (!j.is_array()) schema("observation sequence must be an array");
  std::vector<TimedObservation> items;
  for (const auto& item : j) {
    check_keys(item, {"t", "o"}, "timed observation");
    items.push_back({as_unsigned(require(item, "t", "timed observation"), "t"),
                     observation_from_json(require(item, "o", "timed observation"))});
  }
  return ObservationSeq(std::move(items));
}

Json to_json(const Experience& e) {
  return std::visit(
      [](const auto& v) -> Json {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, NoExperience>) {
          return nullptr;
        } else if constexpr (std::is_same_v<V, std::string>) {
          return Json{{"symbol", v}};
        } else if constexpr (std::is_same_v<V, ObservationSeq>) {
          return Json{{"seq", to_json(v)}};
        } else if constexpr (std::is_same_v<V, std::vector<double>>) {
          return Json{{"vector", v}};
        } else {
          return Json{{"record", to_json(v)}};
        }
      },
      e.payload);
}

Experience experience_from_json(const Json& j) {
  if (j.is_null()) return Experience::none();
  check_keys(j, {"symbol", "seq", "vector", "record"}, "experience");
  if (j.size() != 1) schema("experience must have exactly one tag");
  if (auto it = j.find("symbol"); it != j.end()) return {as_string(*it, "symbol")};
  if (auto it = j.find("seq"); it != j.end()) return {observation_seq_from_json(*it)};
  if (auto it = j.find("vector"); it != j.end()) return {as_doubles(*it, "vector")};
  return {record_from_json(j.at("record"))};
}

Json to_json(const State& s) {
  return std::visit(
      [](const auto& v) -> Json {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::string> || std::is_same_v<V, double>) {
          return v;
        } else if constexpr (std::is_same_v<V, std::vector<double>>) {
          return Json{{"vector", v}};
        } else if constexpr (std::is_same_v<V, LabeledNumber>) {
          Json j{{"label", v.label}, {"value", v.value}};
          if (v.complement) j["complement"] = *v.complement;
          return j;
        } else if constexpr (std::is_same_v<V, ObservationSeq>) {
          return Json{{"seq", to_json(v)}};
        } else {
          return Json{{"record", to_json(v)}};
        }
      },
      s.payload);
}

State state_from_json(const Json& j) {
  if (j.is_string()) return {j.get<std::string>()};
  if (j.is_number()) return {j.get<double>()};
  check_keys(j, {"vector", "label", "value", "complement", "seq", "record"}, "state");
  if (j.contains("label") || j.contains("value")) {
    check_keys(j, {"label", "value", "complement"}, "labeled state");
    LabeledNumber n{as_string(require(j, "label", "state"), "label"),
                    as_double(require(j, "value", "state"), "value"), std::nullopt};
    if (auto it = j.find("complement"); it != j.end()) n.complement = as_double(*it, "complement");
    return {std::move(n)};
  }
  if (j.size() != 1) schema("state must have exactly one tag");
  if (auto it = j.find("vector"); it != j.end()) return {as_doubles(*it, "vector")};
  if (auto it = j.find("seq"); it != j.end()) return {observation_seq_from_json(*it)};
  return {record_from_json(j.at("record"))};
}

Json to_json(const Inference& i) {
  return std::visit(
      [](const auto& v) -> Json {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, double>) {
          return v;
        } else if constexpr (std::is_same_v<V, std::string>) {
          return Json{{"label", v}};
        } else if constexpr (std::is_same_v<V, std::vector<std::string>>) {
          return Json{{"ranking", v}};
        } else {
          Json view = Json::object();
          for (const auto& [name, series] : v.series) {
            Json points = Json::array();
            for (const auto& [t, x] : series) points.push_back(Json::array({t, x}));
            view[name] = std::move(points);
          }
          return Json{{"view", view}};
        }
      },
      i.payload);
}

Inference inference_from_json(const Json& j) {
  if (j.is_number()) return Inference::number(j.get<double>());
  check_keys(j, {"label", "ranking", "view"}, "inference");
  if (j.size() != 1) schema("inference must have exactly one tag");
  if (auto it = j.find("label"); it != j.end()) return Inference::label(as_string(*it, "label"));
  if (auto it = j.find("ranking"); it != j.end()) return {as_strings(*it, "ranking")};
  View view;
  const Json& v = expect_object(j.at("view"), "view");
  for (const auto& [name, points] : v.items()) {
    if (!points.is_array()) schema("view series must be an array");
    Series& s = view.series[name];
    for (const auto& p : points) {
      if (!p.is_array() || p.size() != 2) schema("series point must be [t, value]");
      s.emplace_back(as_unsigned(p[0], "t"), as_double(p[1], "value"));
    }
  }
  return {std::move(view)};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string format_corpus(const std::vector<TraceBlock>& blocks) {
  std::string out;
  for (const auto& b : blocks) {
    if (b.meta) out += Json{{"meta", to_json(*b.meta)}}.dump() + "\n";
    for (const auto& [t, o] : b.obs) out += timed(t, "o", to_json(o)).dump() + "\n";
  }
  return out;
}

std::vector<TraceBlock> parse_corpus(std::string_view text) {
  std::vector<TraceBlock> blocks;
  bool open = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw LaError(ErrorKind::ParseError, e.what(), line_no);
    }
    try {
      if (j.is_object() && j.contains("meta")) {
        check_keys(j, {"meta"}, "meta line");
        blocks.push_back({meta_from_json(j["meta"]), {}});
        open = true;
        continue;
      }
      check_keys(j, {"t", "o"}, "trace line");
      const Json& t = require(j, "t", "trace line");
      if (!t.is_number_unsigned() || t.get<std::uint64_t>() == 0) {
        schema("t must be a positive integer");
      }
      Observation o = observation_from_json(require(j, "o", "trace line"));
      if (!open) {
        blocks.push_back({});
        open = true;
      }
      TraceBlock& b = blocks.back();
      if (b.meta && !b.meta->alphabet.empty() && o.is_symbol() &&
          std::find(b.meta->alphabet.begin(), b.meta->alphabet.end(), o.as_symbol()) ==
              b.meta->alphabet.end()) {
        schema("symbol '" + o.as_symbol() + "' is not in the declared alphabet");
      }
      b.obs.push_back(t.get<std::uint64_t>(), std::move(o));
    } catch (const LaError& e) {
      if (e.kind() == ErrorKind::NonMonotoneTime) {
        throw LaError(ErrorKind::NonMonotoneTime, "time index does not increase", line_no);
      }
      throw LaError(ErrorKind::ParseError, e.what(), line_no);
    }
  }
  return blocks;
}

ObservationSeq parse_trace(std::string_view text) {
  auto blocks = parse_corpus(text);
  if (blocks.empty()) return {};
  if (blocks.size() > 1) {
    throw LaError(ErrorKind::ParseError, "expected a single trace, found " +
                                             std::to_string(blocks.size()) + " blocks");
  }
  return std::move(blocks.front().obs);
}

std::vector<TraceBlock> load_corpus(const std::filesystem::path& path) {
  return parse_corpus(read_file(path));
}

ObservationSeq load_trace(const std::filesystem::path& path) { return parse_trace(read_file(path)); }

void save_corpus(const std::filesystem::path& path, const std::vector<TraceBlock>& blocks) {
  write_file(path, format_corpus(blocks));
}

void save_trace(const std::filesystem::path& path, const ObservationSeq& seq,
                const std::optional<TraceMeta>& meta) {
  write_file(path, format_corpus({TraceBlock{meta, seq}}));
}

std::vector<TraceBlock> corpus_blocks(const std::vector<tracegen::GeneratedLearner>& corpus) {
  std::vector<TraceBlock> out;
  for (const auto& g : corpus) {
    TraceMeta m;
    m.learner_id = g.learner_id;
    if (!g.obs.empty() && g.obs[0].o.is_symbol()) m.alphabet = {bkt::kCorrect, bkt::kIncorrect};
    m.label = g.label;
    out.push_back({m, g.obs});
  }
  return out;
}

std::vector<ObservationSeq> block_sequences(const std::vector<TraceBlock>& blocks) {
  std::vector<ObservationSeq> out;
  for (const auto& b : blocks) out.push_back(b.obs);
  return out;
}

std::vector<predictive::LabeledSeq> labeled_blocks(const std::vector<TraceBlock>& blocks) {
  std::vector<predictive::LabeledSeq> out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    if (!b.meta || !b.meta->label) schema("trace block " + std::to_string(i) + " has no label");
    out.push_back({b.obs, *b.meta->label});
  }
  return out;
}

Json to_json(const StructureConfig& config) {
  Json params = std::visit(
      [](const auto& p) -> Json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, bkt::BktParams>) {
          return bkt_params_json(p);
        } else if constexpr (std::is_same_v<P, dashboard::DashboardConfig>) {
          return dashboard_json(p);
        } else if constexpr (std::is_same_v<P, predictive::PredictiveModel>) {
          return predictive_json(p);
        } else if constexpr (std::is_same_v<P, CanonicalParams>) {
          return Json{{"function", p.inner ? to_json(*p.inner) : Json()}};
        } else {
          if (p.name == naive::kSmooth) return Json{{"width", p.width}};
          return Json::object();
        }
      },
      config.params);
  return Json{{"instance", config.instance()},
              {"params", params},
              {"gap_policy", std::string(to_string(config.gap_policy))}};
}

StructureConfig structure_config_from_json(const Json& j) {
  check_keys(j, {"instance", "params", "gap_policy"}, "structure config");
  const std::string instance = as_string(require(j, "instance", "structure config"), "instance");
  const Json params = j.contains("params") ? j.at("params") : Json::object();
  expect_object(params, "params");

  StructureConfig c;
  if (auto it = j.find("gap_policy"); it != j.end()) {
    c.gap_policy = gap_policy_from_string(as_string(*it, "gap_policy"));
  }
  if (instance == "bkt") {
    c.params = bkt_params_from_json(params);
  } else if (instance == "dashboard") {
    c.params = dashboard_from_json(params);
  } else if (instance == "predictive") {
    c.params = predictive_from_json(params);
  } else if (instance == "canonical") {
    check_keys(params, {"function"}, "canonical params");
    const Json& f = require(params, "function", "canonical params");
    StructureConfig inner;
    if (f.is_string()) {
      const std::string name = f.get<std::string>();
      if (name.rfind(kNaivePrefix, 0) != 0) schema("canonical function must name a naive practice");
      inner.params = naive_from(name.substr(std::string(kNaivePrefix).size()), Json::object());
    } else {
      inner = structure_config_from_json(f);
    }
    c.params = CanonicalParams{std::make_shared<const StructureConfig>(std::move(inner))};
  } else if (instance.rfind(kNaivePrefix, 0) == 0) {
    c.params = naive_from(instance.substr(std::string(kNaivePrefix).size()), params);
  } else {
    schema("unknown instance '" + instance + "'");
  }
  return c;
}

StructureConfig load_structure_config(const std::filesystem::path& path) {
  return structure_config_from_json(load_json(path));
}

void save_structure_config(const std::filesystem::path& path, const StructureConfig& config) {
  write_file(path, dump(to_json(config)));
}

Json to_json(const tracegen::GenConfig& config) {
  Json gen;
  if (const auto* b = std::get_if<tracegen::BktGenerator>(&config.generator)) {
    gen = Json{{"bkt", bkt_params_json(b->params)}};
  } else {
    const auto& d = std::get<tracegen::DropoutGenerator>(config.generator);
    gen = Json{{"dropout", {{"base_rate", d.base_rate}, {"signal_strength", d.signal_strength}}}};
  }
  return Json{{"seed", config.seed},
              {"n_learners", config.n_learners},
              {"trace_len", config.trace_len},
              {"generator", gen}};
}

tracegen::GenConfig gen_config_from_json(const Json& j) {
  const char* what = "generator config";
  check_keys(j, {"seed", "n_learners", "trace_len", "generator"}, what);
  tracegen::GenConfig c;
  if (auto it = j.find("seed"); it != j.end()) c.seed = as_unsigned(*it, "seed");
  c.n_learners = as_unsigned(require(j, "n_learners", what), "n_learners");
  c.trace_len = as_unsigned(require(j, "trace_len", what), "trace_len");
  const Json& g = require(j, "generator", what);
  check_keys(g, {"bkt", "dropout"}, "generator");
  if (g.size() != 1) schema("generator must name exactly one kind");
  if (auto it = g.find("bkt"); it != g.end()) {
    c.generator = tracegen::BktGenerator{bkt_params_from_json(*it)};
  } else {
    const Json& d = g.at("dropout");
    check_keys(d, {"base_rate", "signal_strength"}, "dropout generator");
    tracegen::DropoutGenerator dg;
    dg.base_rate = get_double_or(d, "base_rate", dg.base_rate);
    dg.signal_strength = get_double_or(d, "signal_strength", dg.signal_strength);
    c.generator = dg;
  }
  tracegen::validate(c);
  return c;
}

Json to_json(const FiniteSpec& spec) {
  const TransitionTable table = tabulate(spec);
  Json states = Json::array();
  for (const auto& s : spec.states) states.push_back(to_json(s));
  Json exps = Json::array();
  for (const auto& e : spec.experiences) exps.push_back(to_json(e));
  Json transitions = Json::array();
  for (std::size_t s = 0; s < spec.states.size(); ++s) {
    for (std::size_t e = 0; e <= spec.experiences.size(); ++e) {
      const Json on = e == spec.experiences.size() ? Json() : to_json(spec.experiences[e]);
      transitions.push_back(Json::array({to_json(spec.states[s]), on,
                                         to_json(spec.states[table.next[s][e]])}));
    }
  }
  return Json{{"states", states},
              {"experiences", exps},
              {"s0", to_json(spec.s0)},
              {"transitions", transitions},
              {"approximate", spec.approximate},
              {"description", spec.description}};
}

FiniteSpec finite_spec_from_json(const Json& j) {
  const char* what = "finite spec";
  check_keys(j, {"states", "experiences", "s0", "transitions", "epsilon", "approximate",
                 "description"},
             what);
  FiniteSpec spec;
  const Json& states = require(j, "states", what);
  if (!states.is_array() || states.empty()) schema("states must be a non-empty array");
  for (const auto& s : states) spec.states.push_back(state_from_json(s));
  if (auto it = j.find("experiences"); it != j.end()) {
    if (!it->is_array()) schema("experiences must be an array");
    for (const auto& e : *it) {
      if (e.is_null()) schema("the empty experience is implicit; do not list it");
      spec.experiences.push_back(experience_from_json(e));
    }
  }
  spec.s0 = state_from_json(require(j, "s0", what));
  bool epsilon_identity = false;
  if (auto it = j.find("epsilon"); it != j.end()) {
    if (as_string(*it, "epsilon") != "identity") schema("epsilon must be \"identity\"");
    epsilon_identity = true;
  }
  if (auto it = j.find("approximate"); it != j.end()) {
    if (!it->is_boolean()) schema("approximate must be a boolean");
    spec.approximate = it->get<bool>();
  }
  if (auto it = j.find("description"); it != j.end()) {
    spec.description = as_string(*it, "description");
  }

  std::map<TransitionKey, State> table;
  const Json& transitions = require(j, "transitions", what);
  if (!transitions.is_array()) schema("transitions must be an array");
  for (const auto& t : transitions) {
    if (!t.is_array() || t.size() != 3) schema("transition must be [from, on, to]");
    TransitionKey key{state_from_json(t[0]), std::nullopt};
    if (!t[1].is_null()) key.on = experience_from_json(t[1]);
    if (!table.emplace(key, state_from_json(t[2])).second) {
      schema("duplicate transition from " + describe(key.from));
    }
  }
  spec.transition = [table = std::move(table), epsilon_identity](const State& s,
                                                                 const Experience& e) {
    TransitionKey key{s, std::nullopt};
    if (!e.is_empty()) key.on = e;
    auto it = table.find(key);
    if (it != table.end()) return it->second;
    if (e.is_empty() && epsilon_identity) return s;
    throw LaError(ErrorKind::NonClosedTransition,
                  "no transition from " + describe(s) + " on " + describe(e));
  };
  tabulate(spec);  // every pair must be defined and closed
  return spec;
}

Json to_json(const ReachableSet& reach, const std::vector<State>& unreachable) {
  Json per_step = Json::array();
  for (const auto& layer : reach.per_step) {
    Json l = Json::array();
    for (const auto& s : layer) l.push_back(to_json(s));
    per_step.push_back(std::move(l));
  }
  Json witnesses = Json::array();
  for (const auto& w : reach.witnesses) {
    Json word = Json::array();
    for (const auto& e : w.word) word.push_back(e ? to_json(*e) : Json());
    witnesses.push_back(Json{{"state", to_json(w.state)}, {"word", word}});
  }
  Json unreach = Json::array();
  for (const auto& s : unreachable) unreach.push_back(to_json(s));
  return Json{{"horizon", reach.horizon},
              {"per_step", per_step},
              {"fixpoint_step", reach.fixpoint_step ? Json(*reach.fixpoint_step) : Json()},
              {"monotone", reach.is_monotone()},
              {"witnesses", witnesses},
              {"unreachable", unreach}};
}

Json to_json(const Violation& v) {
  const Witness& w = v.witness;
  Json inputs = Json::array();
  for (const auto& seq : w.inputs) inputs.push_back(to_json(seq));
  Json witness{{"sample_index", w.sample_index},
               {"inputs", inputs},
               {"permutation", w.permutation},
               {"outputs", w.outputs}};
  if (w.time_index) witness["time_index"] = *w.time_index;
  return Json{{"rule", std::string(to_string(v.rule))}, {"note", v.note}, {"witness", witness}};
}

Violation violation_from_json(const Json& j) {
  check_keys(j, {"rule", "note", "witness"}, "violation");
  Violation v;
  v.rule = rule_from_string(as_string(require(j, "rule", "violation"), "rule"));
  if (auto it = j.find("note"); it != j.end()) v.note = as_string(*it, "note");
  const Json& w = require(j, "witness", "violation");
  check_keys(w, {"sample_index", "inputs", "permutation", "outputs", "time_index"}, "witness");
  if (auto it = w.find("sample_index"); it != w.end()) {
    v.witness.sample_index = as_unsigned(*it, "sample_index");
  }
  if (auto it = w.find("inputs"); it != w.end()) {
    if (!it->is_array()) schema("inputs must be an array");
    for (const auto& seq : *it) v.witness.inputs.push_back(observation_seq_from_json(seq));
  }
  if (auto it = w.find("permutation"); it != w.end()) {
    if (!it->is_array()) schema("permutation must be an array");
    for (const auto& i : *it) v.witness.permutation.push_back(as_unsigned(i, "permutation"));
  }
  if (auto it = w.find("outputs"); it != w.end()) v.witness.outputs = as_strings(*it, "outputs");
  if (auto it = w.find("time_index"); it != w.end()) {
    v.witness.time_index = as_unsigned(*it, "time_index");
  }
  return v;
}

Json to_json(const ComplianceReport& report) {
  Json verdicts = Json::object();
  for (const auto& [rule, verdict] : report.verdicts) {
    verdicts[std::string(to_string(rule))] = std::string(to_string(verdict));
  }
  Json witnesses = Json::array();
  for (const auto& v : report.witnesses) witnesses.push_back(to_json(v));
  return Json{{"subject", report.subject},
              {"verdicts", verdicts},
              {"witnesses", witnesses},
              {"notes", report.notes},
              {"seed", report.seed}};
}

ComplianceReport report_from_json(const Json& j) {
  const char* what = "report";
  check_keys(j, {"subject", "verdicts", "witnesses", "notes", "seed"}, what);
  ComplianceReport r;
  r.subject = as_string(require(j, "subject", what), "subject");
  const Json& verdicts = expect_object(require(j, "verdicts", what), "verdicts");
  for (const auto& [rule, verdict] : verdicts.items()) {
    r.verdicts[rule_from_string(rule)] = verdict_from_string(as_string(verdict, "verdict"));
  }
  const Json& witnesses = require(j, "witnesses", what);
  if (!witnesses.is_array()) schema("witnesses must be an array");
  for (const auto& w : witnesses) r.witnesses.push_back(violation_from_json(w));
  if (auto it = j.find("notes"); it != j.end()) r.notes = as_strings(*it, "notes");
  r.seed = as_unsigned(require(j, "seed", what), "seed");
  std::size_t violations = 0;
  for (const auto& [rule, verdict] : r.verdicts) violations += verdict == Verdict::Violation;
  if (violations != r.witnesses.size()) {
    schema("every violation verdict needs exactly one witness");
  }
  return r;
}

Json suite_to_json(const std::vector<ComplianceReport>& reports, std::uint64_t seed) {
  Json list = Json::array();
  for (const auto& r : reports) list.push_back(to_json(r));
  return Json{{"seed", seed}, {"reports", list}};
}

std::vector<ComplianceReport> suite_from_json(const Json& j) {
  check_keys(j, {"seed", "reports"}, "suite");
  const Json& list = require(j, "reports", "suite");
  if (!list.is_array()) schema("reports must be an array");
  std::vector<ComplianceReport> out;
  for (const auto& r : list) out.push_back(report_from_json(r));
  return out;
}

Json to_json(const Trace& trace) {
  Json exps = Json::array();
  for (const auto& [t, e] : trace.experiences) exps.push_back(timed(t, "e", to_json(e)));
  Json states = Json::array();
  for (std::size_t k = 0; k < trace.states.size(); ++k) {
    states.push_back(timed(trace.state_times[k], "s", to_json(trace.states[k])));
  }
  Json infs = Json::array();
  for (const auto& [t, i] : trace.inferences) infs.push_back(timed(t, "i", to_json(i)));
  return Json{{"observations", to_json(trace.observations)},
              {"experiences", exps},
              {"states", states},
              {"inferences", infs}};
}

Trace trace_from_json(const Json& j) {
  const char* what = "trace";
  check_keys(j, {"observations", "experiences", "states", "inferences"}, what);
  Trace tr;
  tr.observations = observation_seq_from_json(require(j, "observations", what));
  auto each = [&](const char* key, const char* field, auto&& fn) {
    const Json& list = require(j, key, what);
    if (!list.is_array()) schema(std::string(key) + " must be an array");
    for (const auto& item : list) {
      check_keys(item, {"t", field}, key);
      fn(as_unsigned(require(item, "t", key), "t"), require(item, field, key));
    }
  };
  each("experiences", "e", [&](TimeIndex t, const Json& v) {
    tr.experiences.push_back({t, experience_from_json(v)});
  });
  each("states", "s", [&](TimeIndex t, const Json& v) {
    tr.state_times.push_back(t);
    tr.states.push_back(state_from_json(v));
  });
  each("inferences", "i", [&](TimeIndex t, const Json& v) {
    tr.inferences.push_back({t, inference_from_json(v)});
  });
  return tr;
}

Json to_json(const CanonicalReport& report, const std::string& function) {
  Json ce;
  if (report.counterexample) {
    const auto& c = *report.counterexample;
    ce = Json{{"sample_index", c.sample_index},
              {"prefix_length", c.prefix_length},
              {"expected", to_json(c.expected)},
              {"actual", to_json(c.actual)}};
  }
  return Json{{"function", function},
              {"pass", report.pass},
              {"prefixes_checked", report.prefixes_checked},
              {"counterexample", ce}};
}

Json to_json(const tracegen::HiddenTruth& truth) {
  Json j = Json::object();
  if (!truth.mastery.empty()) j["mastery"] = truth.mastery;
  if (truth.propensity) j["propensity"] = *truth.propensity;
  return j;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LaError(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw LaError(ErrorKind::IoError, "cannot read '" + path.string() + "'");
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LaError(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) throw LaError(ErrorKind::IoError, "cannot write '" + path.string() + "'");
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + static_cast<std::size_t>(
                              std::count(text.begin(), text.begin() + upto, '\n'));
    throw LaError(ErrorKind::ParseError, e.what(), line);
  }
}

Json load_json(const std::filesystem::path& path) { return parse_json(read_file(path)); }

}  // namespace lak::persist
