#include "routeraudit/audit.h"

#include "routeraudit/html.h"
#include "routeraudit/tls.h"

#include <algorithm>
#include <array>
#include <map>

namespace routeraudit {

namespace {

constexpr std::array<std::string_view, 9> kCheckNames = {
    "DefaultCredentials", "FrameOptionsMissing", "ReflectedXss",    "StoredXss",     "TlsAbsent",
    "TlsInvalidCert",     "CookieFlags",         "CsrfTokenAbsent", "InfoLeakRealm",
};
constexpr std::array<std::string_view, 5> kSeverityNames = {"Info", "Low", "Medium", "High", "Critical"};
constexpr std::array<std::string_view, 4> kStatusNames = {"Vulnerable", "NotVulnerable", "NotApplicable",
                                                          "Inconclusive"};
constexpr std::array<std::string_view, 3> kModeNames = {"passive", "active", "lab"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view text) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == text) return static_cast<Enum>(i);
    }
    return std::nullopt;
}

AuditFinding make_finding(CheckId id, FindingStatus status, std::string description,
                          std::vector<ProbeResult> evidence = {}) {
    AuditFinding finding;
    finding.check_id = id;
    finding.severity = severity_of(id);
    finding.status = status;
    finding.description = std::move(description);
    finding.evidence = std::move(evidence);
    finding.reference = std::string(reference_of(id));
    return finding;
}

HttpRequest get_request(const Url& base, std::string_view path, const AuthSession* session) {
    HttpRequest request;
    request.url = base.with_path(path);
    if (session) request.headers = session->headers;
    return request;
}

std::string display_credential(const std::optional<std::string>& value) {
    if (!value) return "-";
    return value->empty() ? "(empty)" : *value;
}

// name=value pairs of every Set-Cookie header, joined for a Cookie header.
std::string cookie_header_from(const ProbeResult& probe) {
    std::string out;
    for (const auto& set_cookie : probe.header_values("Set-Cookie")) {
        auto end = set_cookie.find(';');
        std::string pair = set_cookie.substr(0, end);
        if (pair.find('=') == std::string::npos) continue;
        if (!out.empty()) out += "; ";
        out += pair;
    }
    return out;
}

bool login_form_shown(std::string_view body, const LoginForm* form) {
    for (const auto& parsed : html::parse_forms(body)) {
        if (parsed.has_password_input()) return true;
        if (form && parsed.has_input_named(form->password_field)) return true;
    }
    return false;
}

std::string path_of_action(std::string_view action, std::string_view page_path) {
    if (action.empty()) return std::string(page_path);
    if (action.find("://") != std::string_view::npos) {
        try {
            return parse_url(action).path;
        } catch (const UrlError&) {
            return std::string(action);
        }
    }
    std::string_view without_query = action.substr(0, action.find('?'));
    if (without_query.front() == '/') return std::string(without_query);
    auto slash = page_path.rfind('/');
    return std::string(page_path.substr(0, slash + 1)) + std::string(without_query);
}

}  // namespace

std::string_view to_string(CheckId id) { return kCheckNames[static_cast<std::size_t>(id)]; }
std::string_view to_string(Severity severity) { return kSeverityNames[static_cast<std::size_t>(severity)]; }
std::string_view to_string(FindingStatus status) { return kStatusNames[static_cast<std::size_t>(status)]; }
std::string_view to_string(PolicyMode mode) { return kModeNames[static_cast<std::size_t>(mode)]; }
std::optional<CheckId> check_id_from_string(std::string_view text) { return lookup<CheckId>(kCheckNames, text); }
std::optional<Severity> severity_from_string(std::string_view text) {
    return lookup<Severity>(kSeverityNames, text);
}
std::optional<FindingStatus> status_from_string(std::string_view text) {
    return lookup<FindingStatus>(kStatusNames, text);
}
std::optional<PolicyMode> policy_mode_from_string(std::string_view text) {
    return lookup<PolicyMode>(kModeNames, text);
}

Severity severity_of(CheckId id) {
    switch (id) {
        case CheckId::DefaultCredentials: return Severity::Critical;
        case CheckId::ReflectedXss:
        case CheckId::StoredXss: return Severity::High;
        case CheckId::FrameOptionsMissing:
        case CheckId::CsrfTokenAbsent:
        case CheckId::TlsAbsent:
        case CheckId::TlsInvalidCert: return Severity::Medium;
        case CheckId::CookieFlags: return Severity::Low;
        case CheckId::InfoLeakRealm: return Severity::Info;
    }
    return Severity::Info;
}

std::string_view reference_of(CheckId id) {
    switch (id) {
        case CheckId::DefaultCredentials: return "default-login-data";
        case CheckId::FrameOptionsMissing: return "countermeasure/x-frame-options";
        case CheckId::ReflectedXss: return "attack/reflected-xss";
        case CheckId::StoredXss: return "attack/stored-xss";
        case CheckId::TlsAbsent: return "countermeasure/tls";
        case CheckId::TlsInvalidCert: return "countermeasure/tls-certificate";
        case CheckId::CookieFlags: return "countermeasure/cookie-flags";
        case CheckId::CsrfTokenAbsent: return "attack/csrf";
        case CheckId::InfoLeakRealm: return "countermeasure/realm-information-leakage";
    }
    return "";
}

AuditFinding check_default_credentials(const AuditContext& ctx, const RouterSignature& sig, const Url& base_url,
                                       AuthSession* session) {
    constexpr auto id = CheckId::DefaultCredentials;
    if (!ctx.policy.allows_active()) {
        return make_finding(id, FindingStatus::NotApplicable, "login attempts are not permitted in passive mode");
    }
    const auto timeout = ctx.policy.timeout;

    if (sig.auth_method == AuthMethod::BasicAuth) {
        HttpRequest request = get_request(base_url, sig.audit.admin_path, nullptr);
        std::string authorization =
            basic_authorization(sig.default_username.value_or(""), sig.default_password.value_or(""));
        request.headers.emplace_back("Authorization", authorization);
        HttpExchange exchange = ctx.transport.send(request, timeout);
        if (!exchange.probe.responded()) {
            return make_finding(id, FindingStatus::Inconclusive, "transport error: " + exchange.probe.error,
                                {exchange.probe});
        }
        int status = *exchange.probe.status_code;
        if (status == 401 || status == 403) {
            return make_finding(id, FindingStatus::NotVulnerable,
                                "default Basic credentials rejected (status " + std::to_string(status) + ")",
                                {exchange.probe});
        }
        if (session) session->headers = {{"Authorization", authorization}};
        return make_finding(id, FindingStatus::Vulnerable,
                            "default Basic credentials " + display_credential(sig.default_username) + "/" +
                                display_credential(sig.default_password) + " accepted (status " +
                                std::to_string(status) + ")",
                            {exchange.probe});
    }

    if (!sig.default_username && !sig.default_password) {
        HttpExchange exchange = ctx.transport.send(get_request(base_url, sig.audit.admin_path, nullptr), timeout);
        if (!exchange.probe.responded()) {
            return make_finding(id, FindingStatus::Inconclusive, "transport error: " + exchange.probe.error,
                                {exchange.probe});
        }
        const LoginForm* form = sig.login_form ? &*sig.login_form : nullptr;
        if (exchange.probe.status_code == 200 && !login_form_shown(exchange.body, form)) {
            return make_finding(id, FindingStatus::Vulnerable,
                                "no authentication required: admin page served without any login", {exchange.probe});
        }
        return make_finding(id, FindingStatus::NotVulnerable,
                            "admin page requires a login and the device has no default credentials",
                            {exchange.probe});
    }

    if (!sig.login_form) {
        return make_finding(id, FindingStatus::NotApplicable, "signature has no login form descriptor");
    }
    const LoginForm& form = *sig.login_form;
    std::vector<std::pair<std::string, std::string>> fields;
    if (form.username_field && sig.default_username) fields.emplace_back(*form.username_field, *sig.default_username);
    fields.emplace_back(form.password_field, sig.default_password.value_or(""));

    HttpRequest request;
    request.method = form.method.empty() ? "POST" : form.method;
    request.url = base_url.with_path(form.action);
    request.body = form_urlencode(fields);
    request.content_type = "application/x-www-form-urlencoded";
    HttpExchange exchange = ctx.transport.send(request, timeout);
    if (!exchange.probe.responded()) {
        return make_finding(id, FindingStatus::Inconclusive, "transport error: " + exchange.probe.error,
                            {exchange.probe});
    }
    int status = *exchange.probe.status_code;
    bool accepted = status >= 200 && status < 400 && !login_form_shown(exchange.body, &form) &&
                    (form.success_marker.empty() || exchange.body.find(form.success_marker) != std::string::npos);
    if (!accepted) {
        return make_finding(id, FindingStatus::NotVulnerable, "default form credentials rejected", {exchange.probe});
    }
    if (session) {
        std::string cookies = cookie_header_from(exchange.probe);
        session->headers.clear();
        if (!cookies.empty()) session->headers.emplace_back("Cookie", cookies);
    }
    return make_finding(id, FindingStatus::Vulnerable,
                        "default form credentials " + display_credential(sig.default_username) + "/" +
                            display_credential(sig.default_password) + " accepted",
                        {exchange.probe});
}

AuditFinding frame_options_verdict(std::span<const ProbeResult> pages) {
    constexpr auto id = CheckId::FrameOptionsMissing;
    std::vector<ProbeResult> inspected;
    for (const auto& page : pages) {
        if (!page.responded()) continue;
        inspected.push_back(page);
        for (const auto& value : page.header_values("X-Frame-Options")) {
            std::string token = to_lower(value);
            token.erase(0, token.find_first_not_of(" \t"));
            token.erase(token.find_last_not_of(" \t") + 1);
            if (token == "deny" || token == "sameorigin") {
                return make_finding(id, FindingStatus::NotVulnerable, "X-Frame-Options: " + value + " on " + page.url,
                                    {page});
            }
        }
    }
    if (inspected.empty()) {
        std::vector<ProbeResult> failed(pages.begin(), pages.end());
        return make_finding(id, FindingStatus::Inconclusive, "no page could be fetched", std::move(failed));
    }
    std::string description = "no X-Frame-Options DENY/SAMEORIGIN on " + std::to_string(inspected.size()) +
                              " inspected page(s); the interface can be framed";
    return make_finding(id, FindingStatus::Vulnerable, std::move(description), std::move(inspected));
}

AuditFinding check_frame_options(const AuditContext& ctx, const Url& base_url, std::span<const std::string> paths,
                                 const AuthSession* session) {
    std::vector<ProbeResult> pages;
    std::vector<std::string> seen;
    for (const auto& path : paths) {
        if (std::find(seen.begin(), seen.end(), path) != seen.end()) continue;
        seen.push_back(path);
        pages.push_back(ctx.transport.send(get_request(base_url, path, session), ctx.policy.timeout).probe);
    }
    return frame_options_verdict(pages);
}

std::string xss_marker(std::string_view seed) {
    return "zq<\"'x>qz-" + sha256_hex(seed).substr(0, 10);
}

bool marker_reflected_unencoded(std::string_view body, std::string_view marker) {
    auto dash = marker.rfind("qz-");
    if (dash == std::string_view::npos) return false;
    std::string_view tail = marker.substr(dash);  // "qz-<nonce>"
    for (auto at = body.find(tail); at != std::string_view::npos; at = body.find(tail, at + 1)) {
        std::size_t window_start = at > 48 ? at - 48 : 0;
        std::string_view window = body.substr(window_start, at - window_start);
        auto start = window.rfind("zq");
        if (start == std::string_view::npos) continue;
        std::string_view between = window.substr(start + 2);
        if (between.find_first_of("<>\"'") != std::string_view::npos) return true;
    }
    return false;
}

AuditFinding probe_reflected_xss(const AuditContext& ctx, const Url& base_url, std::span<const ProbePoint> points,
                                 const AuthSession* session) {
    constexpr auto id = CheckId::ReflectedXss;
    if (!ctx.policy.allows_active()) {
        return make_finding(id, FindingStatus::NotApplicable, "reflection probes are not permitted in passive mode");
    }
    if (points.empty()) return make_finding(id, FindingStatus::NotApplicable, "no reflection probe points known");

    std::vector<ProbeResult> evidence;
    std::vector<std::string> sinks;
    bool any_response = false;
    for (const auto& point : points) {
        std::string marker = xss_marker(base_url.origin() + point.path + "?" + point.parameter);
        HttpRequest request = get_request(base_url, point.path + "?" + percent_encode(point.parameter) + "=" +
                                                        percent_encode(marker),
                                          session);
        HttpExchange exchange = ctx.transport.send(request, ctx.policy.timeout);
        if (!exchange.probe.responded()) {
            evidence.push_back(exchange.probe);
            continue;
        }
        any_response = true;
        if (marker_reflected_unencoded(exchange.body, marker)) {
            sinks.push_back(point.path + " (" + point.parameter + ")");
            evidence.insert(evidence.begin() + static_cast<std::ptrdiff_t>(sinks.size() - 1), exchange.probe);
        } else {
            evidence.push_back(exchange.probe);
        }
    }
    if (!sinks.empty()) {
        std::string where;
        for (const auto& sink : sinks) where += (where.empty() ? "" : ", ") + sink;
        return make_finding(id, FindingStatus::Vulnerable, "marker reflected unencoded at " + where,
                            std::move(evidence));
    }
    if (!any_response) {
        return make_finding(id, FindingStatus::Inconclusive, "no probe point answered", std::move(evidence));
    }
    return make_finding(id, FindingStatus::NotVulnerable, "marker absent or encoded at every probe point",
                        std::move(evidence));
}

AuditFinding probe_stored_xss(const AuditContext& ctx, const Url& base_url,
                              const std::optional<StoredXssProbe>& probe, const AuthSession* session) {
    constexpr auto id = CheckId::StoredXss;
    if (!ctx.policy.allows_lab()) {
        return make_finding(id, FindingStatus::NotApplicable, "stored-XSS injection is only performed in lab mode");
    }
    if (!probe) return make_finding(id, FindingStatus::NotApplicable, "no stored-XSS injection point known");

    std::string marker = xss_marker(base_url.origin() + probe->inject_path + "#" + probe->field);
    HttpRequest inject;
    inject.method = "POST";
    inject.url = base_url.with_path(probe->inject_path);
    if (session) inject.headers = session->headers;
    inject.body = form_urlencode(std::vector<std::pair<std::string, std::string>>{{probe->field, marker}});
    inject.content_type = "application/x-www-form-urlencoded";
    HttpExchange injected = ctx.transport.send(inject, ctx.policy.timeout);
    if (!injected.probe.responded()) {
        return make_finding(id, FindingStatus::Inconclusive, "injection failed: " + injected.probe.error,
                            {injected.probe});
    }
    HttpExchange display = ctx.transport.send(get_request(base_url, probe->display_path, session), ctx.policy.timeout);
    if (!display.probe.responded()) {
        return make_finding(id, FindingStatus::Inconclusive, "display page failed: " + display.probe.error,
                            {injected.probe, display.probe});
    }
    if (marker_reflected_unencoded(display.body, marker)) {
        return make_finding(id, FindingStatus::Vulnerable,
                            "marker stored via " + probe->inject_path + " rendered unencoded on " + probe->display_path,
                            {injected.probe, display.probe});
    }
    int status = *injected.probe.status_code;
    if (status >= 400) {
        return make_finding(id, FindingStatus::Inconclusive,
                            "injection rejected with status " + std::to_string(status), {injected.probe, display.probe});
    }
    return make_finding(id, FindingStatus::NotVulnerable, "stored marker absent or encoded on " + probe->display_path,
                        {injected.probe, display.probe});
}

std::vector<AuditFinding> check_tls(const AuditContext& ctx, const std::string& host,
                                    std::span<const std::uint16_t> ports, const ProbeResult* plain_probe) {
    std::vector<ProbeResult> evidence;
    std::optional<std::pair<TlsInfo, ProbeResult>> found;
    bool errored = false;
    for (auto port : ports) {
        TlsProbe probe = inspect_tls(host, port, ctx.policy.timeout, ctx.scan_time);
        ProbeResult record;
        record.url = "https://" + host + ":" + std::to_string(port) + "/";
        record.method = "TLS";
        record.tls_info = probe.info;
        if (probe.outcome != TlsProbe::Outcome::Handshake) record.error = probe.detail;
        evidence.push_back(record);
        if (probe.outcome == TlsProbe::Outcome::Handshake && !found) found.emplace(*probe.info, record);
        if (probe.outcome == TlsProbe::Outcome::Error) errored = true;
    }

    std::vector<AuditFinding> out;
    if (found) {
        const TlsInfo& info = found->first;
        out.push_back(make_finding(CheckId::TlsAbsent, FindingStatus::NotVulnerable,
                                   "TLS endpoint at " + found->second.url, {found->second}));
        std::vector<std::string> reasons;
        if (info.self_signed) reasons.emplace_back("self-signed");
        if (info.expired_at_scan) reasons.emplace_back("expired");
        if (!info.hostname_match) reasons.emplace_back("hostname mismatch");
        if (reasons.empty()) {
            out.push_back(make_finding(CheckId::TlsInvalidCert, FindingStatus::NotVulnerable,
                                       "certificate " + info.cert_subject + " is valid for " + host, {found->second}));
        } else {
            std::string joined;
            for (const auto& reason : reasons) joined += (joined.empty() ? "" : ", ") + reason;
            out.push_back(make_finding(CheckId::TlsInvalidCert, FindingStatus::Vulnerable,
                                       "certificate " + info.cert_subject + " is invalid: " + joined, {found->second}));
        }
        return out;
    }
    if (errored) {
        out.push_back(make_finding(CheckId::TlsAbsent, FindingStatus::Inconclusive, "TLS probe failed", evidence));
        out.push_back(make_finding(CheckId::TlsInvalidCert, FindingStatus::Inconclusive, "TLS probe failed", evidence));
        return out;
    }
    if (plain_probe) evidence.insert(evidence.begin(), *plain_probe);
    if (evidence.empty()) {
        ProbeResult note;
        note.url = "https://" + host + "/";
        note.method = "TLS";
        note.error = "no TLS port exposed";
        evidence.push_back(std::move(note));
    }
    out.push_back(make_finding(CheckId::TlsAbsent, FindingStatus::Vulnerable,
                               "admin interface is only reachable over plain HTTP", std::move(evidence)));
    out.push_back(make_finding(CheckId::TlsInvalidCert, FindingStatus::NotApplicable, "no certificate to inspect"));
    return out;
}

AuditFinding check_cookie_flags(std::span<const ProbeResult> responses, bool https_available) {
    constexpr auto id = CheckId::CookieFlags;
    static constexpr std::string_view kSessionHints[] = {"sid", "sess", "auth", "token", "login"};
    std::vector<ProbeResult> offending;
    std::vector<std::string> problems;
    bool saw_cookie = false;
    for (const auto& response : responses) {
        bool flagged = false;
        for (const auto& set_cookie : response.header_values("Set-Cookie")) {
            saw_cookie = true;
            std::string name = set_cookie.substr(0, set_cookie.find('='));
            std::string lowered = to_lower(name);
            bool session_bearing = std::any_of(std::begin(kSessionHints), std::end(kSessionHints),
                                               [&](std::string_view hint) { return lowered.find(hint) != std::string::npos; });
            if (!session_bearing) continue;
            bool http_only = false;
            bool secure = false;
            std::size_t pos = set_cookie.find(';');
            while (pos != std::string::npos) {
                std::size_t next = set_cookie.find(';', pos + 1);
                std::string attribute = to_lower(set_cookie.substr(pos + 1, next == std::string::npos ? std::string::npos : next - pos - 1));
                attribute.erase(0, attribute.find_first_not_of(' '));
                attribute = attribute.substr(0, attribute.find('='));
                attribute.erase(attribute.find_last_not_of(' ') + 1);
                http_only |= attribute == "httponly";
                secure |= attribute == "secure";
                pos = next;
            }
            std::string missing;
            if (!http_only) missing = "HttpOnly";
            if (!secure && https_available) missing += missing.empty() ? "Secure" : "+Secure";
            if (!missing.empty()) {
                std::string problem = name + " lacks " + missing;
                if (std::find(problems.begin(), problems.end(), problem) == problems.end()) problems.push_back(problem);
                flagged = true;
            }
        }
        if (flagged) offending.push_back(response);
    }
    if (!saw_cookie) return make_finding(id, FindingStatus::NotApplicable, "no cookies set");
    if (problems.empty()) {
        return make_finding(id, FindingStatus::NotVulnerable, "session cookies carry the required flags");
    }
    std::string joined;
    for (const auto& problem : problems) joined += (joined.empty() ? "" : "; ") + problem;
    return make_finding(id, FindingStatus::Vulnerable, joined, std::move(offending));
}

AuditFinding check_csrf_tokens(std::span<const PageSample> pages, std::span<const std::string> mutating_paths) {
    constexpr auto id = CheckId::CsrfTokenAbsent;
    constexpr std::size_t kMinTokenLength = 16;
    bool any_form = false;
    bool any_state_changing = false;
    std::vector<ProbeResult> offending;
    std::vector<std::string> unprotected;
    for (const auto& page : pages) {
        auto first = html::parse_forms(page.first_body);
        auto second = html::parse_forms(page.second_body);
        std::string page_path = "/";
        try {
            page_path = parse_url(page.probe.url).path;
        } catch (const UrlError&) {
        }
        bool page_flagged = false;
        for (std::size_t i = 0; i < first.size(); ++i) {
            any_form = true;
            const html::Form& form = first[i];
            std::string action_path = path_of_action(form.action, page_path);
            bool state_changing = form.method == "POST" ||
                                  std::find(mutating_paths.begin(), mutating_paths.end(), action_path) !=
                                      mutating_paths.end();
            if (!state_changing) continue;
            any_state_changing = true;
            bool protected_form = false;
            for (const auto& hidden : form.hidden_inputs()) {
                if (hidden.value.size() < kMinTokenLength || i >= second.size()) continue;
                for (const auto& again : second[i].hidden_inputs()) {
                    if (again.name == hidden.name && again.value != hidden.value) protected_form = true;
                }
            }
            if (!protected_form) {
                unprotected.push_back(form.method + " " + action_path + " on " + page_path);
                page_flagged = true;
            }
        }
        if (page_flagged) offending.push_back(page.probe);
    }
    if (!any_form) return make_finding(id, FindingStatus::NotApplicable, "no forms found");
    if (unprotected.empty()) {
        return make_finding(id, FindingStatus::NotVulnerable,
                            any_state_changing ? "every state-changing form carries a per-fetch token"
                                               : "no state-changing forms found");
    }
    std::string joined;
    for (const auto& form : unprotected) joined += (joined.empty() ? "" : ", ") + form;
    return make_finding(id, FindingStatus::Vulnerable, "state-changing form(s) without a CSRF token: " + joined,
                        std::move(offending));
}

AuditFinding check_info_leakage(const std::optional<std::string>& realm, const SignatureDatabase& db,
                                std::vector<ProbeResult> evidence) {
    constexpr auto id = CheckId::InfoLeakRealm;
    if (!realm) return make_finding(id, FindingStatus::NotApplicable, "no Basic realm observed");
    std::string lowered = to_lower(*realm);
    std::vector<std::string> leaked;
    for (const auto& sig : db.routers()) {
        for (const auto& token : {sig.manufacturer, sig.model}) {
            if (token.empty() || lowered.find(to_lower(token)) == std::string::npos) continue;
            if (std::find(leaked.begin(), leaked.end(), token) == leaked.end()) leaked.push_back(token);
        }
    }
    if (leaked.empty()) {
        return make_finding(id, FindingStatus::NotVulnerable, "realm \"" + *realm + "\" names no manufacturer or model",
                            std::move(evidence));
    }
    if (evidence.empty()) {
        ProbeResult observed;
        observed.headers.emplace_back("WWW-Authenticate", "Basic realm=\"" + *realm + "\"");
        evidence.push_back(std::move(observed));
    }
    std::string joined;
    for (const auto& token : leaked) joined += (joined.empty() ? "" : ", ") + token;
    return make_finding(id, FindingStatus::Vulnerable, "realm \"" + *realm + "\" leaks: " + joined,
                        std::move(evidence));
}

std::vector<AuditFinding> run_audit(const AuditContext& ctx, const AuditTarget& target,
                                    const FingerprintDecision& decision, const SignatureDatabase& db) {
    const AuditPolicy& policy = ctx.policy;
    const RouterSignature* sig = decision.matched_id ? db.find(*decision.matched_id) : nullptr;
    const Url& base = target.base_url;
    std::vector<AuditFinding> findings;
    auto wanted = [&](CheckId id) { return policy.enabled(id); };

    HttpExchange front = ctx.transport.send(get_request(base, "/", nullptr), policy.timeout);
    if (!front.probe.responded()) {
        for (CheckId id : kAllChecks) {
            if (wanted(id)) {
                findings.push_back(
                    make_finding(id, FindingStatus::Inconclusive, "target unreachable: " + front.probe.error, {front.probe}));
            }
        }
        return findings;
    }

    // Login is shared setup for every active check, independent of which
    // findings are reported, so enabling a check never changes another.
    AuthSession session;
    std::optional<AuditFinding> credentials;
    if (sig && policy.allows_active()) {
        try {
            credentials = check_default_credentials(ctx, *sig, base, &session);
        } catch (const std::exception& e) {
            credentials = make_finding(CheckId::DefaultCredentials, FindingStatus::Inconclusive, e.what());
        }
    }
    const AuthSession* auth = session.established() ? &session : nullptr;
    std::string admin_path = sig ? sig->audit.admin_path : "/";

    if (wanted(CheckId::DefaultCredentials)) {
        if (credentials) {
            findings.push_back(*credentials);
        } else if (!policy.allows_active()) {
            findings.push_back(make_finding(CheckId::DefaultCredentials, FindingStatus::NotApplicable,
                                            "login attempts are not permitted in passive mode"));
        } else {
            findings.push_back(make_finding(CheckId::DefaultCredentials, FindingStatus::NotApplicable,
                                            "device not identified; default credentials unknown"));
        }
    }

    auto guarded = [&](CheckId id, auto&& run) {
        if (!wanted(id)) return;
        try {
            findings.push_back(run());
        } catch (const std::exception& e) {
            findings.push_back(make_finding(id, FindingStatus::Inconclusive, e.what()));
        }
    };

    guarded(CheckId::FrameOptionsMissing, [&] {
        std::vector<std::string> paths{"/", admin_path};
        return check_frame_options(ctx, base, paths, auth);
    });

    guarded(CheckId::ReflectedXss, [&] {
        std::vector<ProbePoint> points = target.extra_reflect_points;
        if (sig) points.insert(points.begin(), sig->audit.reflect_points.begin(), sig->audit.reflect_points.end());
        return probe_reflected_xss(ctx, base, points, auth);
    });

    guarded(CheckId::StoredXss,
            [&] { return probe_stored_xss(ctx, base, sig ? sig->audit.stored_xss : std::nullopt, auth); });

    bool need_tls = wanted(CheckId::TlsAbsent) || wanted(CheckId::TlsInvalidCert) || wanted(CheckId::CookieFlags);
    bool https_available = false;
    if (need_tls) {
        std::vector<std::uint16_t> ports;
        if (target.tls_ports) {
            ports = *target.tls_ports;
        } else {
            ports.push_back(443);
            if (sig) {
                for (auto port : sig->audit.tls_ports) {
                    if (std::find(ports.begin(), ports.end(), port) == ports.end()) ports.push_back(port);
                }
            }
        }
        auto tls = check_tls(ctx, base.host, ports, &front.probe);
        https_available = tls.front().status == FindingStatus::NotVulnerable;
        if (wanted(CheckId::TlsAbsent)) findings.push_back(tls[0]);
        if (wanted(CheckId::TlsInvalidCert)) findings.push_back(tls[1]);
    }

    guarded(CheckId::CookieFlags, [&] {
        std::vector<ProbeResult> responses{front.probe};
        if (admin_path != "/") {
            responses.push_back(ctx.transport.send(get_request(base, admin_path, nullptr), policy.timeout).probe);
        }
        return check_cookie_flags(responses, https_available);
    });

    guarded(CheckId::CsrfTokenAbsent, [&] {
        std::vector<std::string> paths{"/"};
        if (admin_path != "/") paths.push_back(admin_path);
        if (sig) paths.insert(paths.end(), sig->audit.form_pages.begin(), sig->audit.form_pages.end());
        std::vector<PageSample> samples;
        for (const auto& path : paths) {
            HttpExchange first = ctx.transport.send(get_request(base, path, auth), policy.timeout);
            if (!first.probe.responded()) continue;
            HttpExchange second = ctx.transport.send(get_request(base, path, auth), policy.timeout);
            samples.push_back({first.probe, std::move(first.body), std::move(second.body)});
        }
        std::vector<std::string> mutating = sig ? sig->audit.mutating_paths : std::vector<std::string>{};
        return check_csrf_tokens(samples, mutating);
    });

    guarded(CheckId::InfoLeakRealm, [&] {
        std::vector<ProbeResult> evidence;
        if (decision.observed_realm && !decision.evidence.empty()) evidence.push_back(decision.evidence.front().probe);
        return check_info_leakage(decision.observed_realm, db, std::move(evidence));
    });

    std::stable_sort(findings.begin(), findings.end(), [](const AuditFinding& a, const AuditFinding& b) {
        return std::pair(a.check_id, a.severity) < std::pair(b.check_id, b.severity);
    });
    return findings;
}

}  // namespace routeraudit
