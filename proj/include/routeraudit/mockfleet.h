#pragma once

#include "routeraudit/audit.h"
#include "routeraudit/error.h"
#include "routeraudit/signature_db.h"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace routeraudit {

struct MockTlsProfile {
    enum class Kind { None, SelfSigned, ExpiredMismatched };
    Kind kind = Kind::None;
    std::string subject;         // certificate common name
    Clock::time_point not_after; // ExpiredMismatched only
};

struct ReflectiveEndpoint {
    std::string path;
    std::string parameter;
    bool encode = false;  // true: echo HTML-escaped
};

struct RebootEndpoint {
    std::string path;
    std::vector<std::pair<std::string, std::string>> required_fields;
};

struct SessionCookie {
    std::string name = "sid";
    std::vector<std::string> flags;  // e.g. "HttpOnly", "Secure"
};

struct Credentials {
    std::optional<std::string> username;
    std::optional<std::string> password;
};

struct MockBehavior {
    std::optional<std::string> realm_header;
    std::optional<std::string> login_form_html;
    std::vector<std::string> unique_resource_paths;
    std::optional<std::string> frame_options_header;
    std::optional<ReflectiveEndpoint> reflective_endpoint;
    std::optional<StoredXssProbe> stored_xss_pair;
    std::optional<RebootEndpoint> reboot_endpoint;
    MockTlsProfile tls;
    std::optional<SessionCookie> session_cookie;
    bool csrf_token = false;
    std::optional<Credentials> credentials;  // initial override of the signature defaults
};

// Behavior config for one emulated device.
struct MockRouterSpec {
    RouterSignature signature;
    int listen_port = 0;  // 0 = ephemeral
    MockBehavior behavior;
};

class FleetError : public Error {
public:
    using Error::Error;
};

struct DeviceState {
    int reboot_count = 0;
    std::vector<std::string> stored_values;
    std::optional<Credentials> credential_override;
};

// Realm, unique resources and a flagless `sid` cookie (web-form devices)
// taken from the signature; no vulnerability endpoints.
MockRouterSpec default_mock_spec(const RouterSignature& signature);

// Throws FleetError when the behavior contradicts the signature's profile.
void validate_mock_spec(const MockRouterSpec& spec);

// Parses a fleet config (JSON array of device entries referencing
// signature ids in `db`).
std::vector<MockRouterSpec> load_fleet_config(std::string_view json_text, const SignatureDatabase& db);
std::vector<MockRouterSpec> load_fleet_config_file(const std::string& path, const SignatureDatabase& db);
std::string_view bundled_fleet_json();

class MockDevice;

// Loopback HTTP(S) servers emulating a set of routers. Thread-safe; the
// destructor stops every server.
class MockFleet {
public:
    explicit MockFleet(std::vector<MockRouterSpec> specs);
    ~MockFleet();
    MockFleet(const MockFleet&) = delete;
    MockFleet& operator=(const MockFleet&) = delete;

    std::vector<std::string> device_ids() const;
    Url base_url(std::string_view id) const;
    std::optional<Url> https_url(std::string_view id) const;
    // Audit target for the device: its HTTP base URL and its TLS port, if any.
    AuditTarget target(std::string_view id) const;
    // Signature gateway origin -> loopback base URL, for discovery rewrites.
    // Gateways shared by several devices map to the first in config order.
    std::map<std::string, std::string> gateway_rewrites() const;

    DeviceState state(std::string_view id) const;
    void override_credentials(std::string_view id, Credentials credentials);
    void clear_credential_override(std::string_view id);

    void stop();  // idempotent
    bool running() const;

private:
    MockDevice& device(std::string_view id) const;

    std::vector<std::unique_ptr<MockDevice>> devices_;
    bool running_ = false;
};

std::unique_ptr<MockFleet> start_fleet(std::vector<MockRouterSpec> specs);
DeviceState fleet_state(const MockFleet& fleet, std::string_view device_id);
void stop_fleet(MockFleet& fleet);

}  // namespace routeraudit
