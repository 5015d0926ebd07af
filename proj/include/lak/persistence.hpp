#pragma once

// File formats: JSONL traces, JSON structure/generator configs, finite specs,
// compliance reports and command outputs. Serialization is canonical: keys are
// sorted and numbers use the shortest round-trip form, so equal values give
// equal bytes.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lak/canonical.hpp"
#include "lak/compliance.hpp"
#include "lak/config.hpp"
#include "lak/reachability.hpp"
#include "lak/tracegen.hpp"

namespace lak::persist {

using Json = nlohmann::json;

// Value encodings.
Json to_json(const Observation& o);
Observation observation_from_json(const Json& j);
Json to_json(const ObservationSeq& seq);
ObservationSeq observation_seq_from_json(const Json& j);
/// null for the empty experience; otherwise a one-key tagged object.
Json to_json(const Experience& e);
Experience experience_from_json(const Json& j);
/// Numbers and symbols are bare; other states are one-key tagged objects
/// ({"label", "value"} for labeled numbers).
Json to_json(const State& s);
State state_from_json(const Json& j);
/// Numbers are bare; labels, rankings and views are tagged.
Json to_json(const Inference& i);
Inference inference_from_json(const Json& j);

/// Canonical text of a JSON document: two-space indentation and a final newline.
std::string dump(const Json& j);

// Trace files (JSONL). A file holds one or more blocks; a block is an optional
// {"meta": ...} line followed by {"t": ..., "o": ...} lines with increasing t.
struct TraceMeta {
  std::string learner_id;
  std::vector<std::string> alphabet;
  std::optional<int> label;
  auto operator<=>(const TraceMeta&) const = default;
};

struct TraceBlock {
  std::optional<TraceMeta> meta;
  ObservationSeq obs;
  auto operator<=>(const TraceBlock&) const = default;
};

std::string format_corpus(const std::vector<TraceBlock>& blocks);
/// Throws ParseError(line) for malformed lines and NonMonotoneTime(line) when t
/// does not increase within a block. Blank lines are skipped.
std::vector<TraceBlock> parse_corpus(std::string_view text);
/// A single trace: at most one block. Empty text is the empty sequence.
ObservationSeq parse_trace(std::string_view text);

std::vector<TraceBlock> load_corpus(const std::filesystem::path& path);
ObservationSeq load_trace(const std::filesystem::path& path);
void save_corpus(const std::filesystem::path& path, const std::vector<TraceBlock>& blocks);
void save_trace(const std::filesystem::path& path, const ObservationSeq& seq,
                const std::optional<TraceMeta>& meta = std::nullopt);

/// Blocks for a generated corpus: learner id, alphabet for symbol traces, label if any.
std::vector<TraceBlock> corpus_blocks(const std::vector<tracegen::GeneratedLearner>& corpus);
std::vector<ObservationSeq> block_sequences(const std::vector<TraceBlock>& blocks);
/// Throws SchemaError when a block has no label.
std::vector<predictive::LabeledSeq> labeled_blocks(const std::vector<TraceBlock>& blocks);

// Structure configs: {"instance", "params", "gap_policy"}; unknown keys are rejected.
Json to_json(const StructureConfig& config);
StructureConfig structure_config_from_json(const Json& j);
StructureConfig load_structure_config(const std::filesystem::path& path);
void save_structure_config(const std::filesystem::path& path, const StructureConfig& config);

// Generator configs: {"seed", "n_learners", "trace_len", "generator": {"bkt": {...}} |
// {"dropout": {"base_rate", "signal_strength"}}}.
Json to_json(const tracegen::GenConfig& config);
tracegen::GenConfig gen_config_from_json(const Json& j);

// Finite specs: {"states", "experiences", "s0", "transitions": [[from, on|null, to]],
// "epsilon": "identity" (optional), "description"}.
Json to_json(const FiniteSpec& spec);
FiniteSpec finite_spec_from_json(const Json& j);
Json to_json(const ReachableSet& reach, const std::vector<State>& unreachable);

// Compliance reports.
Json to_json(const Violation& v);
Violation violation_from_json(const Json& j);
Json to_json(const ComplianceReport& report);
ComplianceReport report_from_json(const Json& j);
/// {"seed", "reports": [...]}
Json suite_to_json(const std::vector<ComplianceReport>& reports, std::uint64_t seed);
std::vector<ComplianceReport> suite_from_json(const Json& j);

// Command outputs.
Json to_json(const Trace& trace);
Trace trace_from_json(const Json& j);
Json to_json(const CanonicalReport& report, const std::string& function);
Json to_json(const tracegen::HiddenTruth& truth);

std::string read_file(const std::filesystem::path& path);
/// Throws IoError when the file cannot be written.
void write_file(const std::filesystem::path& path, std::string_view contents);
/// Parses a JSON document; throws ParseError with the failing line.
Json parse_json(std::string_view text);
Json load_json(const std::filesystem::path& path);

}  // namespace lak::persist
