#pragma once

#include "routeraudit/fingerprint.h"
#include "routeraudit/http.h"
#include "routeraudit/signature_db.h"

#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace routeraudit {

// Declaration order is report order.
enum class CheckId {
    DefaultCredentials,
    FrameOptionsMissing,
    ReflectedXss,
    StoredXss,
    TlsAbsent,
    TlsInvalidCert,
    CookieFlags,
    CsrfTokenAbsent,
    InfoLeakRealm,
};

inline constexpr CheckId kAllChecks[] = {
    CheckId::DefaultCredentials, CheckId::FrameOptionsMissing, CheckId::ReflectedXss,
    CheckId::StoredXss,          CheckId::TlsAbsent,           CheckId::TlsInvalidCert,
    CheckId::CookieFlags,        CheckId::CsrfTokenAbsent,     CheckId::InfoLeakRealm,
};

enum class Severity { Info, Low, Medium, High, Critical };
enum class FindingStatus { Vulnerable, NotVulnerable, NotApplicable, Inconclusive };

struct AuditFinding {
    CheckId check_id = CheckId::DefaultCredentials;
    Severity severity = Severity::Info;
    FindingStatus status = FindingStatus::Inconclusive;
    std::string description;
    std::vector<ProbeResult> evidence;  // non-empty when Vulnerable
    std::string reference;              // topic the check traces back to
};

// Passive: GET/HEAD only. ActiveSafe: adds login attempts and inert
// reflection probes. Lab: adds state-changing tests (emulated or owned devices).
enum class PolicyMode { Passive, ActiveSafe, Lab };

struct AuditPolicy {
    PolicyMode mode = PolicyMode::Passive;
    std::set<CheckId> disabled;
    std::chrono::milliseconds timeout{2000};

    bool enabled(CheckId id) const { return !disabled.contains(id); }
    bool allows_active() const { return mode != PolicyMode::Passive; }
    bool allows_lab() const { return mode == PolicyMode::Lab; }
};

struct AuditContext {
    Transport& transport;
    AuditPolicy policy;
    Clock::time_point scan_time = Clock::now();
};

// Headers that carry an established login (Authorization or Cookie).
struct AuthSession {
    Headers headers;
    bool established() const { return !headers.empty(); }
};

struct AuditTarget {
    Url base_url;
    // nullopt: probe 443 plus signature alternates. Empty: the target is
    // known to expose no TLS port.
    std::optional<std::vector<std::uint16_t>> tls_ports;
    std::vector<ProbePoint> extra_reflect_points;
};

struct PageSample {
    ProbeResult probe;
    std::string first_body;
    std::string second_body;
};

Severity severity_of(CheckId id);
std::string_view reference_of(CheckId id);

AuditFinding check_default_credentials(const AuditContext& ctx, const RouterSignature& sig, const Url& base_url,
                                       AuthSession* session = nullptr);

// Pure verdict over already-fetched pages.
AuditFinding frame_options_verdict(std::span<const ProbeResult> pages);
AuditFinding check_frame_options(const AuditContext& ctx, const Url& base_url, std::span<const std::string> paths,
                                 const AuthSession* session = nullptr);

// `zq<"'x>qz-<nonce>`; the nonce is derived from the probe location so
// repeated scans inject identical markers.
std::string xss_marker(std::string_view seed);
bool marker_reflected_unencoded(std::string_view body, std::string_view marker);

AuditFinding probe_reflected_xss(const AuditContext& ctx, const Url& base_url, std::span<const ProbePoint> points,
                                 const AuthSession* session = nullptr);
AuditFinding probe_stored_xss(const AuditContext& ctx, const Url& base_url,
                              const std::optional<StoredXssProbe>& probe, const AuthSession* session = nullptr);

// Returns exactly two findings: TlsAbsent then TlsInvalidCert. An empty port
// list means no TLS port exists; `plain_probe` documents the HTTP-only interface.
std::vector<AuditFinding> check_tls(const AuditContext& ctx, const std::string& host,
                                    std::span<const std::uint16_t> ports, const ProbeResult* plain_probe = nullptr);

AuditFinding check_cookie_flags(std::span<const ProbeResult> responses, bool https_available);
AuditFinding check_csrf_tokens(std::span<const PageSample> pages, std::span<const std::string> mutating_paths = {});
AuditFinding check_info_leakage(const std::optional<std::string>& realm, const SignatureDatabase& db,
                                std::vector<ProbeResult> evidence = {});

// Runs every enabled check and returns findings ordered by check id.
// Never throws for target-side failures; they become Inconclusive.
std::vector<AuditFinding> run_audit(const AuditContext& ctx, const AuditTarget& target,
                                    const FingerprintDecision& decision, const SignatureDatabase& db);

std::string_view to_string(CheckId id);
std::string_view to_string(Severity severity);
std::string_view to_string(FindingStatus status);
std::string_view to_string(PolicyMode mode);
std::optional<CheckId> check_id_from_string(std::string_view text);
std::optional<Severity> severity_from_string(std::string_view text);
std::optional<FindingStatus> status_from_string(std::string_view text);
std::optional<PolicyMode> policy_mode_from_string(std::string_view text);

}  // namespace routeraudit
