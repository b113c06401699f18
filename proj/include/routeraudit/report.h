#pragma once

#include "routeraudit/audit.h"
#include "routeraudit/error.h"
#include "routeraudit/fingerprint.h"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace routeraudit {

struct Summary {
    std::map<Severity, int> by_severity;  // every severity present, zero included
    std::map<FindingStatus, int> by_status;
    int total = 0;

    friend bool operator==(const Summary&, const Summary&) = default;
};

Summary summarize(const std::vector<AuditFinding>& findings);

struct TargetReport {
    std::string base_url;
    bool reachable = true;
    FingerprintDecision fingerprint;
    std::vector<AuditFinding> findings;  // sorted by (check_id, severity)
    Summary summary;
};

struct Report {
    std::string tool_version;
    Clock::time_point scan_started{};
    Clock::time_point scan_finished{};
    std::vector<TargetReport> targets;
};

// Fleet-wide count of findings per check and status.
std::map<CheckId, std::map<FindingStatus, int>> rollup(const Report& report);

TargetReport make_target_report(std::string base_url, FingerprintDecision decision, std::vector<AuditFinding> findings);

class ReportError : public Error {
public:
    using Error::Error;
};

enum class ReportFormat { Json, Text };
std::optional<ReportFormat> report_format_from_string(std::string_view text);

// JSON is stable: sorted keys, RFC 3339 UTC timestamps. Probe timings are
// not part of the report. Text is for people and may change.
std::string render_report(const Report& report, ReportFormat format);
std::string render_report(const Report& report, std::string_view format);  // throws ReportError

Report parse_report_json(std::string_view text);  // throws ReportError

std::string_view tool_version();

}  // namespace routeraudit
