#include "depot3d/report.hpp"

#include <algorithm>
#include <tuple>

namespace depot3d {

namespace {

bool issue_less(const Issue& a, const Issue& b) {
  return std::tie(a.path, a.code, a.message) < std::tie(b.path, b.code, b.message);
}

std::string summarize(const ValidationReport& report) {
  std::string out = std::to_string(report.errors.size()) + " validation error(s)";
  if (!report.errors.empty()) {
    const auto& first = report.errors.front();
    out += "; first: " + first.code + " at '" + first.path + "'";
  }
  return out;
}

}  // namespace

void ValidationReport::error(std::string path, std::string code, std::string message) {
  errors.push_back({std::move(path), std::move(code), std::move(message)});
}

void ValidationReport::warn(std::string path, std::string code, std::string message) {
  warnings.push_back({std::move(path), std::move(code), std::move(message)});
}

void ValidationReport::merge(const ValidationReport& other) {
  errors.insert(errors.end(), other.errors.begin(), other.errors.end());
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
}

void ValidationReport::sort() {
  std::stable_sort(errors.begin(), errors.end(), issue_less);
  std::stable_sort(warnings.begin(), warnings.end(), issue_less);
}

bool ValidationReport::has_error(std::string_view code) const {
  return std::any_of(errors.begin(), errors.end(), [&](const Issue& i) { return i.code == code; });
}

bool ValidationReport::has_warning(std::string_view code) const {
  return std::any_of(warnings.begin(), warnings.end(),
                     [&](const Issue& i) { return i.code == code; });
}

void to_json(nlohmann::json& j, const Issue& issue) {
  j = {{"path", issue.path}, {"code", issue.code}, {"message", issue.message}};
}

void from_json(const nlohmann::json& j, Issue& issue) {
  issue.path = j.at("path").get<std::string>();
  issue.code = j.at("code").get<std::string>();
  issue.message = j.value("message", "");
}

void to_json(nlohmann::json& j, const ValidationReport& report) {
  j = {{"errors", report.errors}, {"warnings", report.warnings}};
}

void from_json(const nlohmann::json& j, ValidationReport& report) {
  report.errors = j.value("errors", std::vector<Issue>{});
  report.warnings = j.value("warnings", std::vector<Issue>{});
}

ValidationFailed::ValidationFailed(ValidationReport report)
    : Error("VALIDATION_FAILED", summarize(report)), report_(std::move(report)) {}

}  // namespace depot3d
