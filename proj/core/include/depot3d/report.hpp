#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "depot3d/error.hpp"

namespace depot3d {

struct Issue {
  std::string path;
  std::string code;
  std::string message;

  bool operator==(const Issue&) const = default;
};

/// Ordered list of problems found by a validation pass. A report with no
/// errors is "error-free"; warnings never block anything.
struct ValidationReport {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;

  bool ok() const noexcept { return errors.empty(); }

  void error(std::string path, std::string code, std::string message);
  void warn(std::string path, std::string code, std::string message);
  void merge(const ValidationReport& other);

  /// Sorts both lists by (path, code, message) byte-wise.
  void sort();

  bool has_error(std::string_view code) const;
  bool has_warning(std::string_view code) const;

  bool operator==(const ValidationReport&) const = default;
};

void to_json(nlohmann::json& j, const Issue& issue);
void from_json(const nlohmann::json& j, Issue& issue);
void to_json(nlohmann::json& j, const ValidationReport& report);
void from_json(const nlohmann::json& j, ValidationReport& report);

/// Raised when an operation requires an error-free report and did not get one.
class ValidationFailed : public Error {
 public:
  explicit ValidationFailed(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

}  // namespace depot3d
