#include "aicare/advisory/narrative.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

#include "aicare/advisory/prompt.hpp"

namespace aicare::advisory {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Positions of `needle` in `hay` (both lower-case) not glued to other word characters.
std::vector<std::size_t> word_hits(const std::string& hay, const std::string& needle) {
  std::vector<std::size_t> hits;
  if (needle.empty()) return hits;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
    const bool left = pos == 0 || !is_word_char(hay[pos - 1]);
    const std::size_t end = pos + needle.size();
    const bool right = end >= hay.size() || !is_word_char(hay[end]);
    if (left && right) hits.push_back(pos);
  }
  return hits;
}

enum class Heading { None, KeyFeatures, RiskAnalysis, Advice };

Heading classify_heading(const std::string& line) {
  std::string norm = lower(trim(line));
  const bool decorated = !norm.empty() && (norm[0] == '#' || norm[0] == '*');
  const auto strip = " #*_:-.)0123456789\t";
  const auto b = norm.find_first_not_of(strip);
  if (b == std::string::npos) return Heading::None;
  norm = norm.substr(b, norm.find_last_not_of(strip) - b + 1);
  if (norm.size() > (decorated ? 60u : 40u)) return Heading::None;
  if (norm.find("key feature") != std::string::npos) return Heading::KeyFeatures;
  if (norm.find("risk analysis") != std::string::npos) return Heading::RiskAnalysis;
  if (norm.find("advice") != std::string::npos || norm.find("recommendation") != std::string::npos) {
    return Heading::Advice;
  }
  return Heading::None;
}

std::string context(const std::string& text, std::size_t pos, std::size_t len) {
  const std::size_t b = pos > 20 ? pos - 20 : 0;
  return trim(text.substr(b, len + 40));
}

std::string join_sections(const Narrative& n) {
  return n.key_features + "\n" + n.risk_analysis + "\n" + n.advice;
}

}  // namespace

std::string to_string(NarrativeSource source) {
  return source == NarrativeSource::Llm ? "llm" : "fallback";
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::NumericLeak: return "numeric_leak";
    case ViolationKind::UnknownFeature: return "unknown_feature";
    case ViolationKind::EmptySection: return "empty_section";
  }
  return "unknown";
}

nlohmann::json Narrative::to_json() const {
  nlohmann::json doc = {{"text", text},
                        {"source", to_string(source)},
                        {"model", model},
                        {"sections",
                         {{"key_feature_identification", key_features},
                          {"risk_analysis", risk_analysis},
                          {"personalized_advice", advice}}}};
  if (!fallback_reason.empty()) doc["fallback_reason"] = fallback_reason;
  return doc;
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& x : violations) v.push_back({{"kind", to_string(x.kind)}, {"detail", x.detail}});
  return {{"passed", passed}, {"violations", v}};
}

std::optional<Sections> parse_sections(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Heading current = Heading::None;
  bool seen[4] = {false, false, false, false};
  std::string bodies[4];
  while (std::getline(in, line)) {
    const Heading h = classify_heading(line);
    if (h != Heading::None && !seen[static_cast<int>(h)]) {
      seen[static_cast<int>(h)] = true;
      current = h;
      continue;
    }
    if (current != Heading::None) bodies[static_cast<int>(current)] += line + "\n";
  }
  if (!seen[1] || !seen[2] || !seen[3]) return std::nullopt;
  return Sections{trim(bodies[1]), trim(bodies[2]), trim(bodies[3])};
}

const std::vector<std::string>& clinical_lexicon() {
  static const std::vector<std::string> terms = {
      "albumin", "creatinine", "urea", "blood urea nitrogen", "cystatin c", "hemoglobin", "haemoglobin",
      "hematocrit", "potassium", "sodium", "chloride", "calcium", "phosphorus", "phosphate", "magnesium",
      "bicarbonate", "glucose", "hba1c", "cholesterol", "triglycerides", "ldl", "hdl", "bilirubin",
      "alkaline phosphatase", "ferritin", "transferrin", "parathyroid hormone", "pth",
      "c-reactive protein", "crp", "white blood cell", "platelet", "lymphocyte", "neutrophil",
      "uric acid", "troponin", "bnp", "egfr", "systolic blood pressure", "diastolic blood pressure",
      "heart rate", "bmi", "body mass index", "oxygen saturation", "lactate", "fibrinogen", "d-dimer",
      "prothrombin", "inr", "tsh", "vitamin d", "estriol", "progesterone", "hcg", "fundal height",
      "fetal heart rate", "cervical length", "proteinuria", "urine protein", "alanine aminotransferase",
      "aspartate aminotransferase", "total protein", "globulin", "prealbumin"};
  return terms;
}

ValidationReport validate_narrative(const Narrative& narrative, const model::RiskAssessment& assessment,
                                    std::size_t visit) {
  ValidationReport report;
  auto flag = [&](ViolationKind kind, std::string detail) {
    report.violations.push_back({kind, std::move(detail)});
  };

  if (trim(narrative.key_features).empty()) flag(ViolationKind::EmptySection, "key feature identification");
  if (trim(narrative.risk_analysis).empty()) flag(ViolationKind::EmptySection, "risk analysis");
  if (trim(narrative.advice).empty()) flag(ViolationKind::EmptySection, "personalized advice");

  std::vector<std::string> names;
  for (const auto& n : assessment.channel_names) names.push_back(lower(n));
  std::sort(names.begin(), names.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });

  const std::string body = join_sections(narrative);
  const std::string body_lc = lower(body);

  // Unknown features: lexicon terms and schema-style identifiers.
  for (const auto& term : clinical_lexicon()) {
    if (word_hits(body_lc, term).empty()) continue;
    const bool known = std::any_of(names.begin(), names.end(), [&](const std::string& n) {
      return n.find(term) != std::string::npos || term.find(n) != std::string::npos;
    });
    if (!known) flag(ViolationKind::UnknownFeature, term);
  }
  static const std::regex ident(R"(\b[a-z]+_[0-9]+\b)");
  for (auto it = std::sregex_iterator(body_lc.begin(), body_lc.end(), ident); it != std::sregex_iterator(); ++it) {
    const std::string id = it->str();
    if (std::find(names.begin(), names.end(), id) == names.end()) flag(ViolationKind::UnknownFeature, id);
  }

  // Numeric leaks: blank out feature names and the supplied risk figure first.
  std::string scrubbed = body_lc;
  for (const auto& n : names) {
    for (std::size_t pos : word_hits(scrubbed, n)) scrubbed.replace(pos, n.size(), std::string(n.size(), ' '));
  }
  if (visit < assessment.n_visits()) {
    const std::string risk = format_percent(assessment.calibrated_risks[visit]) + "%";
    for (auto pos = scrubbed.find(risk); pos != std::string::npos; pos = scrubbed.find(risk, pos + 1)) {
      const bool glued = pos > 0 && (std::isdigit(static_cast<unsigned char>(scrubbed[pos - 1])) || scrubbed[pos - 1] == '.');
      if (!glued) scrubbed.replace(pos, risk.size(), std::string(risk.size(), ' '));
    }
  }
  static const std::regex marker(R"(^([ \t]*)([0-9]+[.)]|[-*])[ \t])");
  static const std::regex number(R"([0-9]+([.,][0-9]+)?[ \t]*%?)");
  std::istringstream lines(scrubbed);
  std::string line;
  std::size_t offset = 0;
  while (std::getline(lines, line)) {
    std::smatch m;
    std::string rest = line;
    std::size_t skipped = 0;
    if (std::regex_search(line, m, marker)) {
      skipped = static_cast<std::size_t>(m.length(0));
      rest = line.substr(skipped);
    }
    for (auto it = std::sregex_iterator(rest.begin(), rest.end(), number); it != std::sregex_iterator(); ++it) {
      const std::size_t at = offset + skipped + static_cast<std::size_t>(it->position());
      flag(ViolationKind::NumericLeak, "\"" + trim(it->str()) + "\" in \"" + context(body, at, it->str().size()) + "\"");
    }
    offset += line.size() + 1;
  }

  report.passed = report.violations.empty();
  return report;
}

Narrative fallback_template(const model::RiskAssessment& assessment, std::size_t visit, std::size_t top_k) {
  const auto top = model::rank_features(assessment, visit, top_k);
  const std::size_t C = assessment.n_channels();

  std::string kf;
  for (const auto& f : top) {
    const std::size_t c = static_cast<std::size_t>(
        std::find(assessment.channel_names.begin(), assessment.channel_names.end(), f.name) -
        assessment.channel_names.begin());
    const double z = assessment.z_scores[visit * C + c];
    const char* direction = z > 0 ? "above the training average" : z < 0 ? "below the training average"
                                                                        : "at the training average";
    kf += "- " + f.name + ": " + direction;
    if (f.imputed) kf += " (carried forward or imputed, not measured at this visit)";
    kf += ".\n";
  }
  kf = trim(kf);

  const double risk = assessment.calibrated_risks[visit];
  const double threshold = assessment.threshold.value_or(0.5);
  const bool elevated = risk >= threshold;
  std::string ra = elevated ? "The calibrated risk at this visit is at or above the decision threshold, "
                              "indicating an elevated risk of the predicted outcome."
                            : "The calibrated risk at this visit is below the decision threshold, so the "
                              "model does not indicate an elevated risk at present.";
  if (visit > 0) {
    const double prev = assessment.calibrated_risks[visit - 1];
    if (risk > prev) ra += " The estimate has risen since the previous visit.";
    if (risk < prev) ra += " The estimate has fallen since the previous visit.";
  }
  ra += " The features listed above contribute most to this estimate.";

  std::string adv = "Review the listed features against the current clinical picture and confirm any values "
                    "that were carried forward or imputed with a fresh measurement.";
  adv += elevated ? " Given the elevated risk, consider closer monitoring and an earlier follow-up visit."
                  : " Continue routine follow-up in line with local guidelines.";

  Narrative n;
  n.source = NarrativeSource::Fallback;
  n.model = "fallback-template";
  n.key_features = kf;
  n.risk_analysis = ra;
  n.advice = adv;
  n.text = "Key Feature Identification\n" + kf + "\n\nRisk Analysis\n" + ra + "\n\nPersonalized Advice\n" + adv + "\n";
  return n;
}

}  // namespace aicare::advisory
