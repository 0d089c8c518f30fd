#include "aicare/advisory/prompt.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "aicare/ehr/io.hpp"

namespace aicare::advisory {

namespace {

constexpr const char* kSystemPrompt =
    "You are an experienced clinician with extensive medical knowledge and clinical diagnostic "
    "experience.\n"
    "\n"
    "You will receive a patient's electronic health record (EHR) data, an AI model's risk prediction "
    "result, and feature importance weights. Based on this information, please conduct a clinical "
    "analysis and provide diagnostic and decision-making recommendations.\n"
    "\n"
    "Analysis Requirements:\n"
    "\n"
    "1. Focus on the examination values from the most recent visit and the features with high "
    "importance weights.\n"
    "\n"
    "2. Use analytical reasoning to deduce the patient's physiological or biochemical "
    "pathophysiological state.\n"
    "\n"
    "3. Systematically identify the appropriate clinical response.\n"
    "\n"
    "4. Provide specific clinical advice without listing the patient's specific data (do not use "
    "concrete numerical values).\n"
    "\n"
    "5. Ensure the response is detailed and substantial.\n"
    "\n"
    "Output Format:\n"
    "\n"
    "Write exactly three sections under the headings \"Key Feature Identification\", "
    "\"Risk Analysis\" and \"Personalized Advice\".\n";

}  // namespace

std::string mortality_task_definition() {
  return "Predict whether the patient will die within 365 days of the current visit, using the "
         "visit history recorded so far.";
}

std::string preterm_task_definition() {
  return "Predict whether the current pregnancy will end in preterm delivery, before 37 completed "
         "weeks of gestation, using the antenatal visits recorded so far.";
}

std::string format_percent(double probability) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * probability);
  return buf;
}

PromptPair build_prompt(const std::string& task_definition, const model::RiskAssessment& assessment,
                        std::size_t visit, std::size_t top_k) {
  if (top_k == 0) throw std::invalid_argument("build_prompt: top_k must be positive");
  if (visit >= assessment.n_visits()) {
    throw std::out_of_range("build_prompt: visit " + std::to_string(visit) + " out of range");
  }
  PromptPair p;
  p.system_text = kSystemPrompt;
  p.task_definition = task_definition;
  if (top_k > assessment.n_channels()) {
    p.warnings.push_back("top_k " + std::to_string(top_k) + " clamped to " +
                         std::to_string(assessment.n_channels()) + " features");
  }
  p.top_features = model::rank_features(assessment, visit, top_k);
  p.risk_percent = format_percent(assessment.calibrated_risks[visit]);

  std::string weights;
  for (std::size_t i = 0; i < p.top_features.size(); ++i) {
    const auto& f = p.top_features[i];
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", f.percent());
    weights += std::to_string(i + 1) + ". " + f.name + ": " + buf + "\n";
  }

  std::string values;
  const auto row = assessment.values_at(visit);
  for (std::size_t c = 0; c < assessment.n_channels(); ++c) {
    values += "- " + assessment.channel_names[c] + ": " + ehr::format_double(row[c]);
    if (!assessment.channel_units[c].empty()) values += " " + assessment.channel_units[c];
    if (assessment.observed[visit * assessment.n_channels() + c] == 0) values += " (not measured at this visit)";
    values += "\n";
  }

  p.user_text = "**Clinical Prediction Task**\n\n" + task_definition +
                "\n\n**Patient's Electronic Health Record Analysis**\n\n"
                "AI Model Risk Prediction Result: " +
                p.risk_percent +
                "%\n\n"
                "Feature Importance Weights (Key Factors Influencing Prediction):\n\n" +
                weights +
                "\nPatient's Complete Examination Values from the Last Visit:\n\n" + values +
                "\n**Clinical Analysis Request**\n\n"
                "Based on the AI model's analysis results and the patient's EHR data above, please use "
                "clinical reasoning to analyze the patient's pathophysiological state and provide "
                "specific diagnostic and decision-making recommendations.\n";
  return p;
}

}  // namespace aicare::advisory
