#pragma once

// JSON documents for instances, matchings, transcripts and experiment reports.

#include "necmatch/core.hpp"
#include "necmatch/elicitation.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace necmatch {

using Json = nlohmann::ordered_json;

/// Display names; position i names agent i / object i.
struct Names {
  std::vector<std::string> agents;
  std::vector<std::string> objects;

  /// a1..an and o1..on.
  static Names defaults(std::size_t n);

  AgentId agent_named(std::string_view name) const;
  ObjectId object_named(std::string_view name) const;

  friend bool operator==(const Names&, const Names&) = default;
};

struct InstanceDocument {
  Names names;
  std::variant<FullProfile, TopKProfile> profile;

  std::size_t size() const noexcept;
  bool is_full() const noexcept { return std::holds_alternative<FullProfile>(profile); }
  /// The full profile viewed as fully revealed, or the top-k profile itself.
  TopKProfile as_topk() const;
  /// Throws InvalidInput unless the document holds a full profile.
  const FullProfile& full() const;

  friend bool operator==(const InstanceDocument&, const InstanceDocument&) = default;
};

InstanceDocument make_document(FullProfile p);
InstanceDocument make_document(TopKProfile p);

/// Schema: {"n", "agents", "objects", "kind": "full"|"topk", "preferences":
/// {agent: [object, ...]}}. "agents" and "objects" default to a1.., o1..;
/// top-k documents may omit agents with nothing revealed. Throws InvalidInput
/// naming the offending field.
InstanceDocument parse_instance(std::string_view text);
InstanceDocument instance_from_json(const Json& doc);
Json instance_to_json(const InstanceDocument& doc);
std::string serialize_instance(const InstanceDocument& doc);

/// {"assignment": {agent: object}}; partial assignments are allowed.
Matching parse_matching(std::string_view text, const Names& names);
Matching matching_from_json(const Json& doc, const Names& names);
Json matching_to_json(const Matching& m, const Names& names);
std::string serialize_matching(const Matching& m, const Names& names);

Json signature_to_json(const Signature& s);

Json transcript_to_json(const ElicitationTranscript& t, const Names& names);
ElicitationTranscript transcript_from_json(const Json& doc, const Names& names);

Json run_record_to_json(const RunRecord& r);
Json report_summary_to_json(const ExperimentReport& report);

/// Parses text as JSON, rethrowing syntax errors as InvalidInput with the
/// line and column.
Json parse_json(std::string_view text, std::string_view what);

std::string_view to_string(Goal g) noexcept;
std::string_view to_string(Strategy s) noexcept;
Goal goal_from_string(std::string_view s);
Strategy strategy_from_string(std::string_view s);

} // namespace necmatch
