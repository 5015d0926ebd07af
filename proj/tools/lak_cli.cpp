// lak: run structures over traces, check compliance, explore reachability,
// build canonical structures, generate corpora and fit/train instances.
//
// Exit codes: 0 success, 1 domain error, 2 usage error, 3 violations found.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lak/canonical.hpp"
#include "lak/errors.hpp"
#include "lak/persistence.hpp"
#include "lak/suite.hpp"

namespace {

using lak::persist::Json;

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;
constexpr int kExitViolations = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string structure;
  std::string trace;
  std::string out;
  std::string spec;
  std::string config;
  std::string replay;
  std::string truth;
  std::string format = "json";
  std::uint64_t seed = 7;
  std::size_t horizon = 10;
  std::size_t budget = 200;
  std::size_t samples = 40;
  std::size_t grid = 21;
  std::size_t epochs = 300;
  std::size_t window = 3;
  std::size_t state_dim = 4;
  bool builtin_suite = false;
  bool demo = false;
  // gen
  std::string kind = "bkt";
  std::size_t learners = 100;
  std::size_t length = 20;
  lak::bkt::BktParams bkt;
  lak::tracegen::DropoutGenerator dropout;
};

void emit(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
  } else {
    lak::persist::write_file(opt.out, text);
  }
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string table(const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) {
      width[c] = std::max(width[c], r[c].size());
    }
  }
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string cell = c < cells.size() ? cells[c] : "";
      os << cell;
      if (c + 1 < width.size()) os << std::string(width[c] - cell.size() + 2, ' ');
    }
    os << '\n';
  };
  line(header);
  std::vector<std::string> rule;
  for (auto w : width) rule.push_back(std::string(w, '-'));
  line(rule);
  for (const auto& r : rows) line(r);
  return os.str();
}

std::string render_view(const lak::View& view) {
  std::set<lak::TimeIndex> times;
  for (const auto& [name, series] : view.series) {
    for (const auto& [t, x] : series) times.insert(t);
  }
  std::vector<std::string> header{"t"};
  for (const auto& [name, series] : view.series) header.push_back(name);
  std::vector<std::vector<std::string>> rows;
  for (auto t : times) {
    std::vector<std::string> row{std::to_string(t)};
    for (const auto& [name, series] : view.series) {
      auto it = std::find_if(series.begin(), series.end(),
                             [t](const auto& p) { return p.first == t; });
      row.push_back(it == series.end() ? "" : fmt(it->second));
    }
    rows.push_back(std::move(row));
  }
  return table(header, rows);
}

std::string render_inference(const lak::Inference& i) {
  if (i.is_number()) return fmt(i.as_number());
  return lak::describe(i);
}

std::string render_trace(const lak::Trace& trace) {
  if (!trace.inferences.empty()) {
    if (const auto* view = std::get_if<lak::View>(&trace.inferences.back().i.payload)) {
      return render_view(*view);
    }
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < trace.inferences.size(); ++k) {
    const auto& inf = trace.inferences[k];
    rows.push_back({std::to_string(inf.t), lak::describe(trace.observations[k].o),
                    render_inference(inf.i)});
  }
  return table({"t", "observation", "inference"}, rows);
}

std::string render_grid(const std::vector<lak::ComplianceReport>& reports) {
  std::vector<std::string> header{"subject"};
  for (auto r : lak::kAllRules) header.emplace_back(lak::to_string(r));
  std::vector<std::vector<std::string>> rows;
  for (const auto& rep : reports) {
    std::vector<std::string> row{rep.subject};
    for (auto r : lak::kAllRules) {
      auto it = rep.verdicts.find(r);
      row.emplace_back(it == rep.verdicts.end() ? "-" : lak::to_string(it->second));
    }
    rows.push_back(std::move(row));
  }
  return table(header, rows);
}

bool json_format(const Options& opt) {
  if (opt.format != "json" && opt.format != "text") {
    throw UsageError("--format must be json or text");
  }
  return opt.format == "json";
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

lak::ReportConfig report_config(const Options& opt) {
  lak::ReportConfig c;
  c.seed = opt.seed;
  c.budget = opt.budget;
  c.samples = opt.samples;
  return c;
}

int cmd_run(const Options& opt) {
  require(opt.structure, "--structure");
  require(opt.trace, "--trace");
  const bool as_json = json_format(opt);
  const lak::StructureConfig config = lak::persist::load_structure_config(opt.structure);
  const lak::Subject subject = lak::suite::instantiate(config);
  if (!subject.structure) {
    throw lak::LaError(lak::ErrorKind::InvalidParams,
                       config.instance() + " is a practice, not a structure; wrap it as canonical");
  }
  const lak::ObservationSeq obs = lak::persist::load_trace(opt.trace);
  const lak::Trace trace = lak::run(*subject.structure, obs, config.gap_policy);
  if (as_json) {
    Json j = lak::persist::to_json(trace);
    j["structure"] = config.instance();
    j["gap_policy"] = std::string(lak::to_string(config.gap_policy));
    emit(opt, lak::persist::dump(j));
  } else {
    emit(opt, render_trace(trace));
  }
  return 0;
}

int cmd_replay(const Options& opt) {
  const Json doc = lak::persist::load_json(opt.replay);
  std::vector<lak::ComplianceReport> reports;
  if (doc.contains("reports")) {
    reports = lak::persist::suite_from_json(doc);
  } else {
    reports.push_back(lak::persist::report_from_json(doc));
  }
  std::optional<lak::Subject> given;
  if (!opt.structure.empty()) {
    given = lak::suite::instantiate(lak::persist::load_structure_config(opt.structure));
  }
  Json replays = Json::array();
  bool all = true;
  for (const auto& rep : reports) {
    const lak::Subject subject = given ? *given : lak::suite::builtin_subject(rep.subject);
    lak::ReportConfig config = report_config(opt);
    config.seed = rep.seed;
    for (const auto& v : rep.witnesses) {
      const bool ok = lak::replay(subject, v, config);
      all = all && ok;
      replays.push_back(Json{{"subject", rep.subject},
                             {"rule", std::string(lak::to_string(v.rule))},
                             {"reproduced", ok}});
    }
  }
  emit(opt, lak::persist::dump(Json{{"replays", replays}, {"all_reproduced", all}}));
  if (!all) std::cerr << "some witnesses did not reproduce\n";
  return all ? 0 : kExitDomain;
}

int cmd_check(const Options& opt) {
  if (!opt.replay.empty()) return cmd_replay(opt);
  const bool as_json = json_format(opt);
  const lak::ReportConfig config = report_config(opt);
  std::vector<lak::ComplianceReport> reports;
  Json out;
  if (opt.builtin_suite) {
    if (!opt.structure.empty()) throw UsageError("--builtin-suite and --structure are exclusive");
    reports = lak::suite::run_builtin_suite(config);
    out = lak::persist::suite_to_json(reports, opt.seed);
  } else {
    require(opt.structure, "--structure or --builtin-suite");
    lak::Subject subject =
        lak::suite::instantiate(lak::persist::load_structure_config(opt.structure));
    if (!opt.trace.empty()) {
      subject.corpus = lak::persist::block_sequences(lak::persist::load_corpus(opt.trace));
    }
    if (!opt.spec.empty()) {
      subject.finite_spec = lak::persist::finite_spec_from_json(lak::persist::load_json(opt.spec));
    }
    reports.push_back(lak::full_report(subject, config));
    out = lak::persist::to_json(reports.front());
  }
  emit(opt, as_json ? lak::persist::dump(out) : render_grid(reports));
  const bool violations = std::any_of(reports.begin(), reports.end(),
                                      [](const auto& r) { return r.has_violation(); });
  return violations ? kExitViolations : 0;
}

int cmd_reach(const Options& opt) {
  if (opt.demo == !opt.spec.empty()) throw UsageError("give exactly one of --spec or --demo");
  const bool as_json = json_format(opt);
  const lak::FiniteSpec spec = opt.demo ? lak::saturating_demo_spec()
                                        : lak::persist::finite_spec_from_json(
                                              lak::persist::load_json(opt.spec));
  const lak::ReachableSet reach = lak::reachable_set(spec, opt.horizon);
  const std::vector<lak::State> unreachable = lak::find_unreachable(spec);
  if (as_json) {
    Json j = lak::persist::to_json(reach, unreachable);
    j["approximate"] = spec.approximate;
    emit(opt, lak::persist::dump(j));
    return 0;
  }
  std::ostringstream os;
  auto set_text = [](const auto& states) {
    std::string s = "{";
    bool first = true;
    for (const auto& st : states) {
      s += (first ? "" : ", ") + lak::describe(st);
      first = false;
    }
    return s + "}";
  };
  for (std::size_t k = 0; k < reach.per_step.size(); ++k) {
    os << "step " << k << ": " << set_text(reach.per_step[k]) << '\n';
  }
  os << "fixpoint: "
     << (reach.fixpoint_step ? std::to_string(*reach.fixpoint_step) : std::string("none"))
     << '\n';
  os << "unreachable: " << set_text(unreachable) << '\n';
  emit(opt, os.str());
  return 0;
}

int cmd_canon(const Options& opt) {
  require(opt.structure, "--structure");
  const lak::Subject subject =
      lak::suite::instantiate(lak::persist::load_structure_config(opt.structure));
  std::vector<lak::ObservationSeq> samples;
  if (!opt.trace.empty()) {
    samples = lak::persist::block_sequences(lak::persist::load_corpus(opt.trace));
  } else {
    for (std::size_t i = 0; i < opt.samples; ++i) {
      lak::SplitMix64 rng = lak::SplitMix64::stream(opt.seed, i);
      samples.push_back(subject.sampler(rng));
    }
  }
  const lak::CanonicalStructure c = lak::build_canonical(subject.function);
  const lak::CanonicalReport report = lak::verify_canonical(subject.function, c, samples);
  emit(opt, lak::persist::dump(lak::persist::to_json(report, subject.name)));
  return report.pass ? 0 : kExitDomain;
}

int cmd_gen(const Options& opt, bool seed_given) {
  lak::tracegen::GenConfig config;
  if (!opt.config.empty()) {
    config = lak::persist::gen_config_from_json(lak::persist::load_json(opt.config));
    if (seed_given) config.seed = opt.seed;
  } else {
    config.seed = opt.seed;
    config.n_learners = opt.learners;
    config.trace_len = opt.length;
    if (opt.kind == "bkt") {
      config.generator = lak::tracegen::BktGenerator{opt.bkt};
    } else if (opt.kind == "dropout") {
      config.generator = opt.dropout;
    } else {
      throw UsageError("--kind must be bkt or dropout");
    }
  }
  const auto corpus = lak::tracegen::generate(config);
  emit(opt, lak::persist::format_corpus(lak::persist::corpus_blocks(corpus)));
  if (!opt.truth.empty()) {
    std::string lines;
    for (const auto& g : corpus) {
      lines += Json{{"learner_id", g.learner_id}, {"truth", lak::persist::to_json(g.truth)}}
                   .dump() +
               "\n";
    }
    lak::persist::write_file(opt.truth, lines);
  }
  return 0;
}

int cmd_fit(const Options& opt) {
  require(opt.trace, "--trace");
  const auto traces = lak::persist::block_sequences(lak::persist::load_corpus(opt.trace));
  lak::StructureConfig config;
  config.params = lak::bkt::bkt_fit(traces, opt.grid);
  config.gap_policy = lak::GapPolicy::NoTicks;
  emit(opt, lak::persist::dump(lak::persist::to_json(config)));
  return 0;
}

int cmd_train(const Options& opt) {
  require(opt.trace, "--trace");
  const auto corpus = lak::persist::labeled_blocks(lak::persist::load_corpus(opt.trace));
  lak::predictive::TrainHyper hyper;
  hyper.epochs = opt.epochs;
  hyper.seed = opt.seed;
  hyper.window = opt.window;
  hyper.state_dim = opt.state_dim;
  if (!corpus.empty() && !corpus.front().obs.empty() && corpus.front().obs[0].o.is_record()) {
    for (const auto& [name, value] : corpus.front().obs[0].o.as_record()) {
      hyper.channels.push_back(name);
    }
  }
  const auto result = lak::predictive::train_predictive(corpus, hyper);
  std::cerr << "final training loss " << fmt(result.loss_history.back()) << " after "
            << result.loss_history.size() - 1 << " epochs\n";
  lak::StructureConfig config;
  config.params = result.model;
  config.gap_policy = hyper.gap_policy;
  emit(opt, lak::persist::dump(lak::persist::to_json(config)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning analytics structures: run, check, reach, canon, gen, fit, train"};
  app.require_subcommand(1);
  Options opt;

  auto add_out = [&](CLI::App* c) { c->add_option("--out", opt.out, "Output file (default stdout)"); };
  auto add_seed = [&](CLI::App* c) {
    return c->add_option("--seed", opt.seed, "Random seed")->envname("LA_KERNEL_SEED");
  };
  auto add_format = [&](CLI::App* c) {
    c->add_option("--format", opt.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  };

  auto* run = app.add_subcommand("run", "Run a structure over a trace");
  run->add_option("--structure", opt.structure, "Structure config")->required();
  run->add_option("--trace", opt.trace, "Trace file (JSONL)")->required();
  add_out(run);
  add_format(run);

  auto* check = app.add_subcommand("check", "Compliance report for a structure or practice");
  check->add_option("--structure", opt.structure, "Structure or practice config");
  check->add_flag("--builtin-suite", opt.builtin_suite, "Check the six shipped subjects");
  check->add_option("--trace", opt.trace, "Corpus to draw samples from");
  check->add_option("--spec", opt.spec, "Finite spec for the reachability rule");
  check->add_option("--replay", opt.replay, "Replay the witnesses of a report");
  check->add_option("--budget", opt.budget, "Random permutations per long sample");
  check->add_option("--samples", opt.samples, "Number of sampled sequences");
  add_seed(check);
  add_out(check);
  add_format(check);

  auto* reach = app.add_subcommand("reach", "Reachable states of a finite spec");
  reach->add_option("--spec", opt.spec, "Finite spec (JSON)");
  reach->add_flag("--demo", opt.demo, "Use the saturating demo spec");
  reach->add_option("--horizon", opt.horizon, "Number of steps");
  add_out(reach);
  add_format(reach);

  auto* canon = app.add_subcommand("canon", "Build and verify the canonical structure of a function");
  canon->add_option("--structure", opt.structure, "Structure or practice config")->required();
  canon->add_option("--trace", opt.trace, "Corpus of sample sequences");
  canon->add_option("--samples", opt.samples, "Sampled sequences when no corpus is given");
  add_seed(canon);
  add_out(canon);

  auto* gen = app.add_subcommand("gen", "Generate a synthetic corpus");
  gen->add_option("--config", opt.config, "Generator config (JSON)");
  gen->add_option("--kind", opt.kind, "bkt or dropout");
  gen->add_option("--learners", opt.learners, "Number of learners");
  gen->add_option("--length", opt.length, "Observations per learner");
  gen->add_option("--p-init", opt.bkt.p_init);
  gen->add_option("--p-transit", opt.bkt.p_transit);
  gen->add_option("--p-guess", opt.bkt.p_guess);
  gen->add_option("--p-slip", opt.bkt.p_slip);
  gen->add_option("--base-rate", opt.dropout.base_rate);
  gen->add_option("--signal", opt.dropout.signal_strength);
  gen->add_option("--truth", opt.truth, "Also write hidden truth (JSONL) here");
  auto* gen_seed = add_seed(gen);
  add_out(gen);

  auto* fit = app.add_subcommand("fit", "Grid-search BKT parameters");
  fit->add_option("--trace", opt.trace, "Corpus (JSONL)")->required();
  fit->add_option("--grid", opt.grid, "Points per axis");
  add_out(fit);

  auto* train = app.add_subcommand("train", "Train the predictive model");
  train->add_option("--trace", opt.trace, "Labeled corpus (JSONL)")->required();
  train->add_option("--epochs", opt.epochs, "Training epochs");
  train->add_option("--window", opt.window, "Feature window");
  train->add_option("--state-dim", opt.state_dim, "State dimension");
  add_seed(train);
  add_out(train);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(opt);
    if (*check) return cmd_check(opt);
    if (*reach) return cmd_reach(opt);
    if (*canon) return cmd_canon(opt);
    if (*gen) return cmd_gen(opt, gen_seed->count() > 0 || std::getenv("LA_KERNEL_SEED"));
    if (*fit) return cmd_fit(opt);
    if (*train) return cmd_train(opt);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const lak::LaError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}
