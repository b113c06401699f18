#include "routeraudit/report.h"

#include "routeraudit/timeutil.h"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace routeraudit {

namespace {

using json = nlohmann::json;

constexpr Severity kSeverities[] = {Severity::Info, Severity::Low, Severity::Medium, Severity::High,
                                    Severity::Critical};
constexpr FindingStatus kStatuses[] = {FindingStatus::Vulnerable, FindingStatus::NotVulnerable,
                                       FindingStatus::NotApplicable, FindingStatus::Inconclusive};

json nullable(const std::optional<std::string>& value) { return value ? json(*value) : json(nullptr); }

json probe_to_json(const ProbeResult& probe) {
    json headers = json::array();
    for (const auto& [name, value] : probe.headers) headers.push_back(json::array({name, value}));
    json out = {
        {"url", probe.url},
        {"method", probe.method},
        {"status_code", probe.status_code ? json(*probe.status_code) : json(nullptr)},
        {"headers", std::move(headers)},
        {"body_digest", probe.body_digest},
        {"body_excerpt", probe.body_excerpt},
        {"error", probe.error},
        {"redirects", probe.redirects},
        {"tls_info", nullptr},
    };
    if (probe.tls_info) {
        const TlsInfo& tls = *probe.tls_info;
        out["tls_info"] = {
            {"https_reachable", tls.https_reachable}, {"cert_subject", tls.cert_subject},
            {"cert_issuer", tls.cert_issuer},         {"self_signed", tls.self_signed},
            {"not_after", format_rfc3339(tls.not_after)}, {"expired_at_scan", tls.expired_at_scan},
            {"hostname_match", tls.hostname_match},
        };
    }
    return out;
}

json summary_to_json(const Summary& summary) {
    json severities = json::object();
    for (auto severity : kSeverities) {
        auto it = summary.by_severity.find(severity);
        severities[std::string(to_string(severity))] = it == summary.by_severity.end() ? 0 : it->second;
    }
    json statuses = json::object();
    for (auto status : kStatuses) {
        auto it = summary.by_status.find(status);
        statuses[std::string(to_string(status))] = it == summary.by_status.end() ? 0 : it->second;
    }
    return {{"by_severity", std::move(severities)}, {"by_status", std::move(statuses)}, {"total", summary.total}};
}

json finding_to_json(const AuditFinding& finding) {
    json evidence = json::array();
    for (const auto& probe : finding.evidence) evidence.push_back(probe_to_json(probe));
    return {
        {"check_id", to_string(finding.check_id)}, {"severity", to_string(finding.severity)},
        {"status", to_string(finding.status)},     {"description", finding.description},
        {"reference", finding.reference},          {"evidence", std::move(evidence)},
    };
}

json fingerprint_to_json(const FingerprintDecision& decision) {
    json evidence = json::array();
    for (const auto& item : decision.evidence) {
        evidence.push_back({{"reason", item.reason}, {"probe", probe_to_json(item.probe)}});
    }
    return {
        {"matched_id", nullable(decision.matched_id)},
        {"confidence", to_string(decision.confidence)},
        {"probes_used", decision.probes_used},
        {"by_elimination", decision.by_elimination},
        {"observed_realm", nullable(decision.observed_realm)},
        {"evidence", std::move(evidence)},
    };
}

json report_to_json(const Report& report) {
    json targets = json::array();
    for (const auto& target : report.targets) {
        json findings = json::array();
        for (const auto& finding : target.findings) findings.push_back(finding_to_json(finding));
        targets.push_back({
            {"base_url", target.base_url},
            {"reachable", target.reachable},
            {"fingerprint", fingerprint_to_json(target.fingerprint)},
            {"findings", std::move(findings)},
            {"summary", summary_to_json(target.summary)},
        });
    }
    json rolled = json::object();
    for (const auto& [check, statuses] : rollup(report)) {
        json counts = json::object();
        for (const auto& [status, count] : statuses) counts[std::string(to_string(status))] = count;
        rolled[std::string(to_string(check))] = std::move(counts);
    }
    return {
        {"tool_version", report.tool_version},
        {"scan_started", format_rfc3339(report.scan_started)},
        {"scan_finished", format_rfc3339(report.scan_finished)},
        {"targets", std::move(targets)},
        {"rollup", std::move(rolled)},
    };
}

std::string render_text(const Report& report) {
    std::ostringstream out;
    out << "router-audit " << report.tool_version << "\n";
    out << "scan " << format_rfc3339(report.scan_started) << " .. " << format_rfc3339(report.scan_finished) << "\n";
    for (const auto& target : report.targets) {
        const auto& fp = target.fingerprint;
        out << "\ntarget " << target.base_url << (target.reachable ? "" : " (unreachable)") << ": "
            << fp.matched_id.value_or("unidentified") << " (" << to_string(fp.confidence) << ", " << fp.probes_used << " probe" << (fp.probes_used == 1 ? "" : "s")
            << (fp.by_elimination ? ", by elimination" : "") << ")\n";
        for (const auto& finding : target.findings) {
            out << "  " << to_string(finding.check_id) << " " << to_string(finding.status) << " "
                << to_string(finding.severity) << " [" << finding.reference << "] " << finding.description << "\n";
        }
        out << "  total " << target.summary.total;
        for (const auto& [status, count] : target.summary.by_status) {
            if (count) out << ", " << to_string(status) << " " << count;
        }
        out << "\n";
    }
    auto rolled = rollup(report);
    if (!rolled.empty()) {
        out << "\nfleet\n";
        for (const auto& [check, statuses] : rolled) {
            out << "  " << to_string(check);
            for (const auto& [status, count] : statuses) out << " " << to_string(status) << "=" << count;
            out << "\n";
        }
    }
    return out.str();
}

template <typename T>
T required(const json& object, const char* key, const std::string& where) {
    if (!object.is_object() || !object.contains(key)) throw ReportError(where + "." + key + ": missing");
    try {
        return object.at(key).get<T>();
    } catch (const json::exception&) {
        throw ReportError(where + "." + key + ": wrong type");
    }
}

std::optional<std::string> optional_string(const json& object, const char* key, const std::string& where) {
    if (!object.contains(key)) throw ReportError(where + "." + key + ": missing");
    if (object.at(key).is_null()) return std::nullopt;
    return required<std::string>(object, key, where);
}

Clock::time_point required_time(const json& object, const char* key, const std::string& where) {
    auto when = parse_rfc3339(required<std::string>(object, key, where));
    if (!when) throw ReportError(where + "." + key + ": not an RFC 3339 UTC timestamp");
    return *when;
}

template <typename Enum>
Enum required_enum(const json& object, const char* key, const std::string& where,
                   std::optional<Enum> (*parse)(std::string_view)) {
    auto value = parse(required<std::string>(object, key, where));
    if (!value) throw ReportError(where + "." + key + ": unknown value");
    return *value;
}

ProbeResult probe_from_json(const json& in, const std::string& where) {
    ProbeResult probe;
    probe.url = required<std::string>(in, "url", where);
    probe.method = required<std::string>(in, "method", where);
    if (!in.contains("status_code")) throw ReportError(where + ".status_code: missing");
    if (!in["status_code"].is_null()) probe.status_code = required<int>(in, "status_code", where);
    for (const auto& pair : required<json>(in, "headers", where)) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
            throw ReportError(where + ".headers: expected [name, value] pairs");
        }
        probe.headers.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
    }
    probe.body_digest = required<std::string>(in, "body_digest", where);
    probe.body_excerpt = required<std::string>(in, "body_excerpt", where);
    probe.error = required<std::string>(in, "error", where);
    probe.redirects = required<std::vector<std::string>>(in, "redirects", where);
    if (!in.contains("tls_info")) throw ReportError(where + ".tls_info: missing");
    if (!in["tls_info"].is_null()) {
        const json& t = in["tls_info"];
        std::string at = where + ".tls_info";
        TlsInfo tls;
        tls.https_reachable = required<bool>(t, "https_reachable", at);
        tls.cert_subject = required<std::string>(t, "cert_subject", at);
        tls.cert_issuer = required<std::string>(t, "cert_issuer", at);
        tls.self_signed = required<bool>(t, "self_signed", at);
        tls.not_after = required_time(t, "not_after", at);
        tls.expired_at_scan = required<bool>(t, "expired_at_scan", at);
        tls.hostname_match = required<bool>(t, "hostname_match", at);
        probe.tls_info = tls;
    }
    return probe;
}

std::optional<Confidence> confidence_from_string(std::string_view text) {
    for (auto value : {Confidence::Exact, Confidence::Unidentified}) {
        if (to_string(value) == text) return value;
    }
    return std::nullopt;
}

}  // namespace

Summary summarize(const std::vector<AuditFinding>& findings) {
    Summary summary;
    for (auto severity : kSeverities) summary.by_severity[severity] = 0;
    for (auto status : kStatuses) summary.by_status[status] = 0;
    for (const auto& finding : findings) {
        ++summary.by_severity[finding.severity];
        ++summary.by_status[finding.status];
        ++summary.total;
    }
    return summary;
}

std::map<CheckId, std::map<FindingStatus, int>> rollup(const Report& report) {
    std::map<CheckId, std::map<FindingStatus, int>> out;
    for (const auto& target : report.targets) {
        for (const auto& finding : target.findings) ++out[finding.check_id][finding.status];
    }
    return out;
}

TargetReport make_target_report(std::string base_url, FingerprintDecision decision,
                                std::vector<AuditFinding> findings) {
    std::stable_sort(findings.begin(), findings.end(), [](const AuditFinding& a, const AuditFinding& b) {
        return std::pair(a.check_id, a.severity) < std::pair(b.check_id, b.severity);
    });
    TargetReport target;
    target.base_url = std::move(base_url);
    target.fingerprint = std::move(decision);
    target.summary = summarize(findings);
    target.findings = std::move(findings);
    return target;
}

std::optional<ReportFormat> report_format_from_string(std::string_view text) {
    if (text == "json") return ReportFormat::Json;
    if (text == "text") return ReportFormat::Text;
    return std::nullopt;
}

std::string render_report(const Report& report, ReportFormat format) {
    if (format == ReportFormat::Text) return render_text(report);
    return report_to_json(report).dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

std::string render_report(const Report& report, std::string_view format) {
    auto parsed = report_format_from_string(format);
    if (!parsed) throw ReportError("unknown report format \"" + std::string(format) + "\" (expected json or text)");
    return render_report(report, *parsed);
}

Report parse_report_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ReportError(std::string("report is not valid JSON: ") + e.what());
    }
    Report report;
    report.tool_version = required<std::string>(doc, "tool_version", "report");
    report.scan_started = required_time(doc, "scan_started", "report");
    report.scan_finished = required_time(doc, "scan_finished", "report");
    const json targets = required<json>(doc, "targets", "report");
    if (!targets.is_array()) throw ReportError("report.targets: expected an array");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const json& t = targets[i];
        std::string where = "report.targets[" + std::to_string(i) + "]";
        TargetReport target;
        target.base_url = required<std::string>(t, "base_url", where);
        target.reachable = required<bool>(t, "reachable", where);

        const json fp = required<json>(t, "fingerprint", where);
        std::string fp_where = where + ".fingerprint";
        FingerprintDecision& decision = target.fingerprint;
        decision.matched_id = optional_string(fp, "matched_id", fp_where);
        decision.confidence = required_enum<Confidence>(fp, "confidence", fp_where, confidence_from_string);
        decision.probes_used = required<int>(fp, "probes_used", fp_where);
        decision.by_elimination = required<bool>(fp, "by_elimination", fp_where);
        decision.observed_realm = optional_string(fp, "observed_realm", fp_where);
        const json fp_evidence = required<json>(fp, "evidence", fp_where);
        for (std::size_t k = 0; k < fp_evidence.size(); ++k) {
            std::string at = fp_where + ".evidence[" + std::to_string(k) + "]";
            decision.evidence.push_back({probe_from_json(required<json>(fp_evidence[k], "probe", at), at + ".probe"),
                                         required<std::string>(fp_evidence[k], "reason", at)});
        }

        const json findings = required<json>(t, "findings", where);
        for (std::size_t k = 0; k < findings.size(); ++k) {
            const json& f = findings[k];
            std::string at = where + ".findings[" + std::to_string(k) + "]";
            AuditFinding finding;
            finding.check_id = required_enum<CheckId>(f, "check_id", at, check_id_from_string);
            finding.severity = required_enum<Severity>(f, "severity", at, severity_from_string);
            finding.status = required_enum<FindingStatus>(f, "status", at, status_from_string);
            finding.description = required<std::string>(f, "description", at);
            finding.reference = required<std::string>(f, "reference", at);
            const json evidence = required<json>(f, "evidence", at);
            for (std::size_t e = 0; e < evidence.size(); ++e) {
                finding.evidence.push_back(probe_from_json(evidence[e], at + ".evidence[" + std::to_string(e) + "]"));
            }
            target.findings.push_back(std::move(finding));
        }
        target.summary = summarize(target.findings);
        if (summary_to_json(target.summary) != required<json>(t, "summary", where)) {
            throw ReportError(where + ".summary: counts do not match the findings");
        }
        report.targets.push_back(std::move(target));
    }
    return report;
}

std::string_view tool_version() { return ROUTER_AUDIT_VERSION; }

}  // namespace routeraudit
