#include "doctest.h"
#include "lak/persistence.hpp"
#include "support/cli_harness.hpp"

using lak::persist::Json;
using lak::persist::parse_json;

namespace {

const char* kBkt =
    R"({"instance":"bkt","params":{"p_init":0.5,"p_transit":0.3,"p_guess":0.2,"p_slip":0.1},"gap_policy":"no_ticks"})";
const char* kTrace = "{\"t\":1,\"o\":\"correct\"}\n{\"t\":2,\"o\":\"correct\"}\n";

}  // namespace

TEST_CASE("run prints the trace of a structure") {
  cli::Scratch s("cli-run");
  s.write("bkt.json", kBkt);
  s.write("trace.jsonl", kTrace);
  REQUIRE(s.run("run --structure " + s.path("bkt.json") + " --trace " + s.path("trace.jsonl")) == 0);
  const Json out = parse_json(s.out());
  CHECK(out["structure"] == "bkt");
  CHECK(out["states"].size() == 3);
  CHECK(out["inferences"][0]["i"].get<double>() == doctest::Approx(0.8727272727272727).epsilon(1e-14));

  CHECK(s.run("run --format text --structure " + s.path("bkt.json") + " --trace " +
              s.path("trace.jsonl")) == 0);
  CHECK(s.out().find("0.872727") != std::string::npos);
}

TEST_CASE("run on an empty trace holds only the initial state") {
  cli::Scratch s("cli-empty");
  s.write("bkt.json", kBkt);
  s.write("empty.jsonl", "");
  REQUIRE(s.run("run --structure " + s.path("bkt.json") + " --trace " + s.path("empty.jsonl")) == 0);
  const Json out = parse_json(s.out());
  CHECK(out["states"].size() == 1);
  CHECK(out["inferences"].empty());
  CHECK(out["observations"].empty());
}

TEST_CASE("domain and usage failures map to exit codes") {
  cli::Scratch s("cli-errors");
  s.write("bkt.json", kBkt);
  s.write("bad.jsonl", "{\"t\":1,\"o\":\"correct\"}\n{\"t\":1,\"o\":\"correct\"}\n");
  s.write("junk.jsonl", "not json\n");
  s.write("hmm.json", R"({"instance":"hmm","params":{}})");

  CHECK(s.run("run --structure " + s.path("bkt.json") + " --trace " + s.path("bad.jsonl")) == 1);
  CHECK(s.err().find("line 2") != std::string::npos);
  CHECK(s.run("run --structure " + s.path("bkt.json") + " --trace " + s.path("junk.jsonl")) == 1);
  CHECK(s.run("run --structure " + s.path("hmm.json") + " --trace " + s.path("junk.jsonl")) == 1);
  CHECK(s.run("run --structure " + s.path("missing.json") + " --trace " + s.path("bad.jsonl")) == 1);
  CHECK(s.run("run --structure " + s.path("bkt.json")) == 2);
  CHECK(s.run("frobnicate") == 2);
  CHECK(s.run("") == 2);
  CHECK(s.run("reach") == 2);
  CHECK(s.run("reach --demo --format yaml") == 2);
  CHECK(s.run("check") == 2);
  CHECK(s.run("check --builtin-suite --structure " + s.path("bkt.json")) == 2);
  CHECK(s.run("gen --kind poisson") == 2);
}

TEST_CASE("check reports violations with exit code 3") {
  cli::Scratch s("cli-check");
  s.write("bkt.json", kBkt);
  s.write("rate.json", R"({"instance":"naive:ex1_rate","params":{}})");
  CHECK(s.run("check --structure " + s.path("bkt.json")) == 0);
  const Json pass = parse_json(s.out());
  CHECK(pass["witnesses"].empty());
  CHECK(pass["verdicts"]["UnreachableStateReference"] == "not_applicable");

  CHECK(s.run("check --structure " + s.path("rate.json") + " --out " + s.path("rate_report.json")) == 3);
  const Json report = parse_json(s.read("rate_report.json"));
  CHECK(report["verdicts"]["OrderInsensitiveInference"] == "violation");

  // the witnesses of a saved report reproduce
  CHECK(s.run("check --replay " + s.path("rate_report.json") + " --structure " + s.path("rate.json")) == 0);
  CHECK(parse_json(s.out())["all_reproduced"] == true);
}

TEST_CASE("builtin suite grid and replay") {
  cli::Scratch s("cli-suite");
  CHECK(s.run("check --builtin-suite --out " + s.path("suite.json")) == 3);
  const Json suite = parse_json(s.read("suite.json"));
  REQUIRE(suite["reports"].size() == 6);
  CHECK(s.run("check --replay " + s.path("suite.json")) == 0);
  CHECK(s.run("check --builtin-suite --format text") == 3);
  CHECK(s.out().find("ex3_smooth") != std::string::npos);
}

TEST_CASE("check with a corpus and a finite spec") {
  cli::Scratch s("cli-spec");
  s.write("bkt.json", kBkt);
  s.write("corpus.jsonl",
          "{\"meta\":{\"learner_id\":\"a\"}}\n{\"t\":1,\"o\":\"correct\"}\n{\"t\":2,\"o\":\"incorrect\"}\n"
          "{\"meta\":{\"learner_id\":\"b\"}}\n{\"t\":1,\"o\":\"incorrect\"}\n");
  CHECK(s.run("check --structure " + s.path("bkt.json") + " --trace " + s.path("corpus.jsonl")) == 0);
  s.write("counter.json", R"({"instance":"naive:ex1_rate","params":{}})");
  s.write("spec.json", R"({"states":[0],"s0":0,"transitions":[[0,null,0]]})");
  // a practice has no states to compare against the spec
  CHECK(s.run("check --structure " + s.path("counter.json") + " --spec " + s.path("spec.json")) == 3);
}

TEST_CASE("reach on the demo spec") {
  cli::Scratch s("cli-reach");
  REQUIRE(s.run("reach --demo") == 0);
  const Json out = parse_json(s.out());
  CHECK(out["unreachable"] == Json::array({3}));
  CHECK(out["fixpoint_step"] == 2);
  CHECK(out["monotone"] == true);
  REQUIRE(s.run("reach --demo --format text --horizon 3") == 0);
  CHECK(s.out().find("unreachable: {3}") != std::string::npos);
  CHECK(s.run("reach --demo --spec x.json") == 2);
}

TEST_CASE("gen, fit, train and canon produce loadable files") {
  cli::Scratch s("cli-pipeline");
  REQUIRE(s.run("gen --kind bkt --learners 30 --length 10 --p-init 0.3 --p-transit 0.2 --p-guess 0.2 "
                "--p-slip 0.1 --seed 3 --out " + s.path("bkt.jsonl") + " --truth " + s.path("truth.jsonl")) == 0);
  CHECK(lak::persist::parse_corpus(s.read("bkt.jsonl")).size() == 30);
  CHECK(s.read("truth.jsonl").find("\"mastery\"") != std::string::npos);

  REQUIRE(s.run("fit --trace " + s.path("bkt.jsonl") + " --grid 5 --out " + s.path("fit.json")) == 0);
  const auto fitted = lak::persist::structure_config_from_json(parse_json(s.read("fit.json")));
  CHECK(fitted.instance() == "bkt");

  REQUIRE(s.run("gen --kind dropout --learners 40 --length 8 --out " + s.path("drop.jsonl")) == 0);
  REQUIRE(s.run("train --trace " + s.path("drop.jsonl") + " --epochs 20 --out " + s.path("model.json")) == 0);
  CHECK(s.err().find("final training loss") != std::string::npos);
  CHECK(lak::persist::structure_config_from_json(parse_json(s.read("model.json"))).instance() ==
        "predictive");
  // bkt traces carry no labels
  CHECK(s.run("train --trace " + s.path("bkt.jsonl")) == 1);

  s.write("canon.json", R"({"instance":"canonical","params":{"function":"naive:ex2_last"}})");
  REQUIRE(s.run("canon --structure " + s.path("canon.json") + " --samples 10") == 0);
  CHECK(parse_json(s.out())["pass"] == true);
}

TEST_CASE("reruns give identical bytes") {
  cli::Scratch s("cli-bytes");
  s.write("bkt.json", kBkt);
  s.write("trace.jsonl", kTrace);
  s.write("gen.json",
          R"({"seed":11,"n_learners":20,"trace_len":6,"generator":{"dropout":{"base_rate":0.5,"signal_strength":10}}})");
  const std::string commands[] = {
      "run --structure " + s.path("bkt.json") + " --trace " + s.path("trace.jsonl"),
      "check --builtin-suite --samples 15",
      "reach --demo",
      "gen --config " + s.path("gen.json"),
      "canon --structure " + s.path("bkt.json") + " --samples 5",
  };
  for (const auto& cmd : commands) {
    CAPTURE(cmd);
    s.run(cmd + " --out " + s.path("a.out"));
    s.run(cmd + " --out " + s.path("b.out"));
    CHECK(!s.read("a.out").empty());
    CHECK(s.read("a.out") == s.read("b.out"));
  }
}

TEST_CASE("seed falls back to the environment") {
  cli::Scratch s("cli-env");
  REQUIRE(s.run("gen --kind bkt --learners 5 --length 4 --seed 99 --out " + s.path("flag.jsonl")) == 0);
  REQUIRE(s.run("gen --kind bkt --learners 5 --length 4 --out " + s.path("env.jsonl"), "LA_KERNEL_SEED=99") == 0);
  REQUIRE(s.run("gen --kind bkt --learners 5 --length 4 --out " + s.path("default.jsonl")) == 0);
  CHECK(s.read("flag.jsonl") == s.read("env.jsonl"));
  CHECK(s.read("flag.jsonl") != s.read("default.jsonl"));
}
