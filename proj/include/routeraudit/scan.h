#pragma once

#include "routeraudit/audit.h"
#include "routeraudit/report.h"

#include <vector>

namespace routeraudit {

struct ScanOptions {
    AuditPolicy policy;
    int parallelism = 4;
};

// Liveness, fingerprint and audit for every target; one TargetReport per
// target in input order. Unreachable targets get Inconclusive findings.
Report run_scan(Transport& transport, const std::vector<AuditTarget>& targets, const SignatureDatabase& db,
                const ScanOptions& options);

// True when at least one target was given and none answered.
bool all_unreachable(const Report& report);
bool has_vulnerable(const Report& report);

}  // namespace routeraudit
