#include "routeraudit/scan.h"

#include "routeraudit/discovery.h"

#include <algorithm>
#include <atomic>
#include <thread>

namespace routeraudit {

namespace {

Clock::time_point now_seconds() { return std::chrono::floor<std::chrono::seconds>(Clock::now()); }

TargetReport unreachable_target(const LiveGateway& live, const AuditPolicy& policy) {
    FingerprintDecision decision;
    decision.evidence.push_back({live.initial_probe, "target unreachable: " + live.reason});
    std::vector<AuditFinding> findings;
    for (CheckId id : kAllChecks) {
        if (!policy.enabled(id)) continue;
        AuditFinding finding;
        finding.check_id = id;
        finding.severity = severity_of(id);
        finding.status = FindingStatus::Inconclusive;
        finding.description = "target unreachable: " + live.reason;
        finding.evidence = {live.initial_probe};
        finding.reference = std::string(reference_of(id));
        findings.push_back(std::move(finding));
    }
    TargetReport target = make_target_report(live.base_url.to_string(), std::move(decision), std::move(findings));
    target.reachable = false;
    return target;
}

}  // namespace

Report run_scan(Transport& transport, const std::vector<AuditTarget>& targets, const SignatureDatabase& db,
                const ScanOptions& options) {
    Report report;
    report.tool_version = std::string(tool_version());
    report.scan_started = now_seconds();

    std::vector<GatewayCandidate> candidates;
    for (const auto& target : targets) candidates.push_back({target.base_url, CandidateSource::UserSupplied});
    DiscoveryOptions discovery;
    discovery.timeout = options.policy.timeout;
    discovery.parallelism = options.parallelism;
    std::vector<LiveGateway> live = discover(candidates, transport, discovery);

    AuditContext ctx{transport, options.policy, report.scan_started};
    report.targets.resize(targets.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < targets.size(); i = next++) {
            if (!live[i].responded) {
                report.targets[i] = unreachable_target(live[i], options.policy);
                continue;
            }
            FingerprintDecision decision = fingerprint(transport, targets[i].base_url, db, options.policy.timeout);
            std::vector<AuditFinding> findings = run_audit(ctx, targets[i], decision, db);
            report.targets[i] =
                make_target_report(targets[i].base_url.to_string(), std::move(decision), std::move(findings));
        }
    };
    std::size_t workers = std::min<std::size_t>(std::max(options.parallelism, 1), targets.size());
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();

    report.scan_finished = now_seconds();
    return report;
}

bool all_unreachable(const Report& report) {
    if (report.targets.empty()) return false;
    return std::none_of(report.targets.begin(), report.targets.end(),
                        [](const TargetReport& target) { return target.reachable; });
}

bool has_vulnerable(const Report& report) {
    for (const auto& target : report.targets) {
        for (const auto& finding : target.findings) {
            if (finding.status == FindingStatus::Vulnerable) return true;
        }
    }
    return false;
}

}  // namespace routeraudit
