#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aicare/model/assessment.hpp"

namespace aicare::advisory {

enum class NarrativeSource { Llm, Fallback };
std::string to_string(NarrativeSource source);

struct Narrative {
  std::string text;
  NarrativeSource source = NarrativeSource::Fallback;
  /// Upstream model name, or "fallback-template".
  std::string model;
  std::string key_features;
  std::string risk_analysis;
  std::string advice;
  /// Why the fallback was served, when it was.
  std::string fallback_reason;

  nlohmann::json to_json() const;
  bool operator==(const Narrative&) const = default;
};

struct Sections {
  std::string key_features;
  std::string risk_analysis;
  std::string advice;
};

/// Splits a reply at heading lines that mention "key feature", "risk
/// analysis" and "advice" (or "recommendation"), case-insensitively and
/// ignoring markdown decoration. Empty when a heading is missing.
std::optional<Sections> parse_sections(const std::string& text);

enum class ViolationKind { NumericLeak, UnknownFeature, EmptySection };
std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  bool passed = true;
  std::vector<Violation> violations;

  nlohmann::json to_json() const;
};

/// Clinical terms recognised as feature mentions by the validator.
const std::vector<std::string>& clinical_lexicon();

/// Flags numbers in section bodies (list markers and a percentage equal to
/// the supplied risk are allowed), lexicon terms or schema-style
/// identifiers that name no channel of the assessment, and empty sections.
ValidationReport validate_narrative(const Narrative& narrative, const model::RiskAssessment& assessment,
                                    std::size_t visit);

/// Deterministic rule-based narrative; passes validate_narrative.
Narrative fallback_template(const model::RiskAssessment& assessment, std::size_t visit,
                            std::size_t top_k = 5);

}  // namespace aicare::advisory
