#pragma once

#include "routeraudit/error.h"
#include "routeraudit/url.h"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace routeraudit {

enum class AuthMethod { BasicAuth, WebForm };
enum class XssKind { None, Reflected, Stored };
enum class HttpsSupport { None, OptionalInvalidCert };

struct VulnProfile {
    bool ui_redressing = false;
    XssKind xss = XssKind::None;
    HttpsSupport https = HttpsSupport::None;

    friend bool operator==(const VulnProfile&, const VulnProfile&) = default;
};

struct LoginForm {
    std::string action;
    std::string method = "POST";
    std::optional<std::string> username_field;  // absent: the form has no username input
    std::string password_field;
    std::string success_marker;  // text only an authenticated page carries

    friend bool operator==(const LoginForm&, const LoginForm&) = default;
};

struct ProbePoint {
    std::string path;
    std::string parameter;

    friend bool operator==(const ProbePoint&, const ProbePoint&) = default;
};

struct StoredXssProbe {
    std::string inject_path;
    std::string field;
    std::string display_path;

    friend bool operator==(const StoredXssProbe&, const StoredXssProbe&) = default;
};

// Where the audit looks on a device it has identified.
struct AuditHints {
    std::string admin_path = "/";
    std::vector<ProbePoint> reflect_points;
    std::optional<StoredXssProbe> stored_xss;
    std::vector<std::string> form_pages;
    std::vector<std::string> mutating_paths;
    std::vector<std::uint16_t> tls_ports;

    friend bool operator==(const AuditHints&, const AuditHints&) = default;
};

// One known device. Credentials distinguish "" (the field exists and is
// submitted empty) from nullopt (there is no such field).
struct RouterSignature {
    std::string id;
    std::string manufacturer;
    std::string model;
    std::string firmware_version;
    AuthMethod auth_method = AuthMethod::BasicAuth;
    std::optional<std::string> default_username;
    std::optional<std::string> default_password;
    Url gateway_url;
    std::optional<std::string> realm;
    std::vector<std::string> unique_resources;
    std::optional<LoginForm> login_form;
    VulnProfile vuln_profile;
    AuditHints audit;

    friend bool operator==(const RouterSignature&, const RouterSignature&) = default;
};

// Immutable after load; safe to share between threads.
class SignatureDatabase {
public:
    SignatureDatabase() = default;
    SignatureDatabase(std::vector<RouterSignature> routers, bool closed_world);

    const std::vector<RouterSignature>& routers() const { return routers_; }
    bool closed_world() const { return closed_world_; }
    std::size_t size() const { return routers_.size(); }
    bool empty() const { return routers_.empty(); }

    const RouterSignature* find(std::string_view id) const;
    const RouterSignature& at(std::string_view id) const;  // throws DatabaseError

    friend bool operator==(const SignatureDatabase&, const SignatureDatabase&) = default;

private:
    std::vector<RouterSignature> routers_;
    bool closed_world_ = false;
};

class DatabaseError : public Error {
public:
    DatabaseError(std::string message, std::string field, int line = 0, std::string signature_id = {});

    const std::string& field() const { return field_; }
    int line() const { return line_; }  // 1-based, 0 when not a syntax error
    const std::string& signature_id() const { return signature_id_; }

private:
    std::string field_;
    int line_;
    std::string signature_id_;
};

struct SignatureDbStats {
    int total_routers = 0;
    int total_credential_fields = 0;
    int admin_valued_fields = 0;
    int basic_auth_count = 0;
    int web_form_count = 0;
    int distinct_gateway_ips = 0;

    friend bool operator==(const SignatureDbStats&, const SignatureDbStats&) = default;
};

SignatureDatabase load_signatures(std::string_view raw_bytes);
SignatureDatabase load_signatures_file(const std::string& path);
std::string serialize_signatures(const SignatureDatabase& db);

// Checks every invariant; throws DatabaseError naming the id and the rule.
void validate(const SignatureDatabase& db);

SignatureDbStats db_stats(const SignatureDatabase& db);

// The database shipped with the tool.
const SignatureDatabase& bundled_signatures();
std::string_view bundled_signatures_json();

std::string_view to_string(AuthMethod method);
std::string_view to_string(XssKind kind);
std::string_view to_string(HttpsSupport support);

}  // namespace routeraudit
