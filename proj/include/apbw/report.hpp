#ifndef APBW_REPORT_HPP
#define APBW_REPORT_HPP

#include "apbw/obstruction.hpp"
#include "apbw/pbwiso.hpp"
#include "apbw/schema.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace apbw {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kReportSchema = "apbw-report/1";

struct CommandFlags {
  std::string module_name = "1";
  std::optional<int> truncation;
  std::optional<int> degree_bound;
  std::optional<int> budget;
};

struct RunResult {
  nlohmann::json report;
  int exit_code = 0;
};

// JSON serializers used across commands; all exact-string based
nlohmann::json json_of_rmat(const RMat& m);
RMat rmat_of_json(const CoefficientRing& R, const nlohmann::json& j);
nlohmann::json json_of_cochain(const Cochain& c);
nlohmann::json json_of_farkas(const FarkasCertificate& c);
FarkasCertificate farkas_of_json(const nlohmann::json& j);
nlohmann::json json_of_obstruction(const ObstructionReport& r);
nlohmann::json json_of_map_report(const FilteredMapReport& r);

RunResult cmd_validate(const ProblemDocument& doc, const CommandFlags& flags);
RunResult cmd_class(const ProblemDocument& doc, const CommandFlags& flags);
RunResult cmd_pbw(const ProblemDocument& doc, const CommandFlags& flags);
RunResult cmd_dims(const ProblemDocument& doc, const CommandFlags& flags);
RunResult cmd_oracle(const ProblemDocument& doc, const CommandFlags& flags);

// re-verifies every certificate in a stored report against the document,
// without re-running any solver; returns 0 when everything checks out
int recheck_report(const ProblemDocument& doc, const nlohmann::json& report);

// wraps command results into the versioned envelope
nlohmann::json finish_report(const ProblemDocument& doc, const std::string& command,
                             nlohmann::json results, long long timing_ms);

} // namespace apbw

#endif
