#include "routeraudit/mockfleet.h"

#include "routeraudit/certs.h"
#include "routeraudit/html.h"
#include "routeraudit/timeutil.h"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace routeraudit {

namespace bundled {
extern const char* const bundled_fleet_json;
}

namespace {

using json = nlohmann::json;

constexpr char kGif[] = "GIF89a\x01\x00\x01\x00\x80\x00\x00\x00\x00\x00\xff\xff\xff\x21\xf9\x04\x01\x00\x00\x00\x00"
                        "\x2c\x00\x00\x00\x00\x01\x00\x01\x00\x00\x02\x02\x44\x01\x00\x3b";

std::vector<std::pair<std::string, std::string>> parse_form_body(std::string_view body) {
    std::vector<std::pair<std::string, std::string>> out;
    while (!body.empty()) {
        auto amp = body.find('&');
        std::string_view pair = body.substr(0, amp);
        body = amp == std::string_view::npos ? std::string_view{} : body.substr(amp + 1);
        if (pair.empty()) continue;
        auto eq = pair.find('=');
        if (eq == std::string_view::npos) {
            out.emplace_back(percent_decode(pair), "");
        } else {
            out.emplace_back(percent_decode(pair.substr(0, eq)), percent_decode(pair.substr(eq + 1)));
        }
    }
    return out;
}

std::optional<std::string> form_value(const std::vector<std::pair<std::string, std::string>>& fields,
                                      std::string_view name) {
    for (const auto& [key, value] : fields) {
        if (key == name) return value;
    }
    return std::nullopt;
}

std::string quote_realm(std::string_view realm) {
    std::string out = "Basic realm=\"";
    for (char c : realm) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string opaque_token(std::string_view seed) { return sha256_hex(seed).substr(0, 32); }

std::string login_page(const RouterSignature& sig) {
    std::string out = "<!DOCTYPE html>\n<html><head><title>" + html::escape(sig.model) + "</title></head><body>\n";
    out += "<h1>" + html::escape(sig.manufacturer) + "</h1>\n";
    const LoginForm* form = sig.login_form ? &*sig.login_form : nullptr;
    std::string action = form ? form->action : "/login.cgi";
    out += "<form action=\"" + html::escape(action) + "\" method=\"POST\">\n";
    if (form && form->username_field) {
        out += "<input type=\"text\" name=\"" + html::escape(*form->username_field) + "\">\n";
    }
    out += "<input type=\"password\" name=\"" + html::escape(form ? form->password_field : "password") + "\">\n";
    out += "<input type=\"submit\" value=\"Login\">\n</form>\n</body></html>\n";
    return out;
}

Credentials signature_credentials(const RouterSignature& sig) { return {sig.default_username, sig.default_password}; }

bool requires_login(const Credentials& credentials) {
    return credentials.username.has_value() || credentials.password.has_value();
}

}  // namespace

MockRouterSpec default_mock_spec(const RouterSignature& signature) {
    MockRouterSpec spec;
    spec.signature = signature;
    spec.behavior.realm_header = signature.realm;
    spec.behavior.unique_resource_paths = signature.unique_resources;
    if (signature.auth_method == AuthMethod::WebForm) spec.behavior.session_cookie = SessionCookie{};
    return spec;
}

void validate_mock_spec(const MockRouterSpec& spec) {
    const auto& sig = spec.signature;
    const auto& b = spec.behavior;
    auto fail = [&](const std::string& rule) { throw FleetError("device " + sig.id + ": " + rule); };
    if (spec.listen_port < 0 || spec.listen_port > 65535) fail("listen_port out of range");
    if (sig.auth_method == AuthMethod::BasicAuth && (!b.realm_header || b.realm_header->empty())) {
        fail("BasicAuth device needs a realm_header");
    }
    if (sig.auth_method == AuthMethod::WebForm && b.realm_header) fail("web-form device cannot send a Basic realm");
    switch (sig.vuln_profile.xss) {
        case XssKind::Reflected:
            if (!b.reflective_endpoint || b.reflective_endpoint->encode) {
                fail("xss=Reflected needs an unencoded reflective_endpoint");
            }
            break;
        case XssKind::Stored:
            if (!b.stored_xss_pair) fail("xss=Stored needs a stored_xss_pair");
            break;
        case XssKind::None:
            if (b.reflective_endpoint && !b.reflective_endpoint->encode) {
                fail("xss=None contradicts an unencoded reflective_endpoint");
            }
            if (b.stored_xss_pair) fail("xss=None contradicts a stored_xss_pair");
            break;
    }
    if (sig.vuln_profile.https == HttpsSupport::OptionalInvalidCert && b.tls.kind == MockTlsProfile::Kind::None) {
        fail("https=OptionalInvalidCert needs a tls profile");
    }
    if (sig.vuln_profile.https == HttpsSupport::None && b.tls.kind != MockTlsProfile::Kind::None) {
        fail("https=None contradicts a tls profile");
    }
    if (sig.vuln_profile.ui_redressing && b.frame_options_header) {
        std::string value = to_lower(*b.frame_options_header);
        if (value == "deny" || value == "sameorigin") fail("uir=true contradicts X-Frame-Options " + value);
    }
    if (b.tls.kind != MockTlsProfile::Kind::None && b.tls.subject.empty()) fail("tls profile needs a subject");
    for (const auto& path : b.unique_resource_paths) {
        if (path.empty() || path.front() != '/') fail("unique resource path must be absolute: " + path);
    }
}

std::vector<MockRouterSpec> load_fleet_config(std::string_view json_text, const SignatureDatabase& db) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw FleetError(std::string("fleet config is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw FleetError("fleet config must be a JSON array");

    std::vector<MockRouterSpec> specs;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& entry = doc[i];
        std::string where = "fleet[" + std::to_string(i) + "]";
        if (!entry.is_object()) throw FleetError(where + ": expected an object");
        if (!entry.contains("signature") || !entry["signature"].is_string()) {
            throw FleetError(where + ".signature: missing or not a string");
        }
        std::string id = entry["signature"].get<std::string>();
        const RouterSignature* sig = db.find(id);
        if (!sig) throw FleetError(where + ".signature: unknown signature id " + id);
        MockRouterSpec spec = default_mock_spec(*sig);
        try {
            if (entry.contains("port")) spec.listen_port = entry["port"].get<int>();
            const json behavior = entry.value("behavior", json::object());
            for (const auto& [key, value] : behavior.items()) {
                auto& b = spec.behavior;
                if (key == "realm_header") {
                    b.realm_header = value.is_null() ? std::nullopt : std::optional(value.get<std::string>());
                } else if (key == "login_form_html") {
                    b.login_form_html = value.get<std::string>();
                } else if (key == "unique_resource_paths") {
                    b.unique_resource_paths = value.get<std::vector<std::string>>();
                } else if (key == "frame_options_header") {
                    b.frame_options_header = value.get<std::string>();
                } else if (key == "reflective_endpoint") {
                    b.reflective_endpoint = ReflectiveEndpoint{value.at("path").get<std::string>(),
                                                               value.at("parameter").get<std::string>(),
                                                               value.value("encode", false)};
                } else if (key == "stored_xss") {
                    b.stored_xss_pair = StoredXssProbe{value.at("inject_path").get<std::string>(),
                                                       value.at("field").get<std::string>(),
                                                       value.at("display_path").get<std::string>()};
                } else if (key == "reboot_endpoint") {
                    RebootEndpoint reboot;
                    reboot.path = value.at("path").get<std::string>();
                    for (const auto& [name, field] : value.at("fields").items()) {
                        reboot.required_fields.emplace_back(name, field.get<std::string>());
                    }
                    b.reboot_endpoint = std::move(reboot);
                } else if (key == "session_cookie") {
                    if (value.is_null()) {
                        b.session_cookie.reset();
                    } else {
                        b.session_cookie = SessionCookie{value.value("name", std::string("sid")),
                                                         value.value("flags", std::vector<std::string>{})};
                    }
                } else if (key == "csrf_token") {
                    b.csrf_token = value.get<bool>();
                } else if (key == "credentials") {
                    Credentials credentials;
                    if (value.contains("username") && !value["username"].is_null()) {
                        credentials.username = value["username"].get<std::string>();
                    }
                    if (value.contains("password") && !value["password"].is_null()) {
                        credentials.password = value["password"].get<std::string>();
                    }
                    b.credentials = credentials;
                } else if (key == "tls") {
                    std::string profile = value.at("profile").get<std::string>();
                    if (profile == "none") {
                        b.tls = {};
                    } else if (profile == "self_signed") {
                        b.tls = {MockTlsProfile::Kind::SelfSigned, value.at("subject").get<std::string>(), {}};
                    } else if (profile == "expired_mismatched") {
                        auto not_after = parse_rfc3339(value.at("not_after").get<std::string>());
                        if (!not_after) throw FleetError(where + ".behavior.tls.not_after: not an RFC 3339 UTC time");
                        b.tls = {MockTlsProfile::Kind::ExpiredMismatched, value.at("subject").get<std::string>(),
                                 *not_after};
                    } else {
                        throw FleetError(where + ".behavior.tls.profile: unknown profile " + profile);
                    }
                } else {
                    throw FleetError(where + ".behavior: unknown key " + key);
                }
            }
        } catch (const json::exception& e) {
            throw FleetError(where + ": " + e.what());
        }
        validate_mock_spec(spec);
        specs.push_back(std::move(spec));
    }
    return specs;
}

std::vector<MockRouterSpec> load_fleet_config_file(const std::string& path, const SignatureDatabase& db) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FleetError("cannot open fleet config " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_fleet_config(buffer.str(), db);
}

std::string_view bundled_fleet_json() { return bundled::bundled_fleet_json; }

// One emulated router: an HTTP listener plus an optional HTTPS listener
// sharing the same request handler and state.
class MockDevice {
public:
    explicit MockDevice(MockRouterSpec spec) : spec_(std::move(spec)) {}

    ~MockDevice() { stop(); }

    void start() {
        http_ = std::make_unique<httplib::Server>();
        configure(*http_);
        if (spec_.listen_port == 0) {
            http_port_ = http_->bind_to_any_port("127.0.0.1");
        } else if (http_->bind_to_port("127.0.0.1", spec_.listen_port)) {
            http_port_ = spec_.listen_port;
        } else {
            http_port_ = -1;
        }
        if (http_port_ <= 0) {
            throw FleetError("device " + spec_.signature.id + ": cannot listen on port " +
                             std::to_string(spec_.listen_port));
        }
        threads_.emplace_back([server = http_.get()] { server->listen_after_bind(); });

        if (spec_.behavior.tls.kind != MockTlsProfile::Kind::None) {
            certs::KeyPair pair = make_certificate();
            https_ = std::make_unique<httplib::SSLServer>(pair.cert.get(), pair.key.get());
            if (!https_->is_valid()) throw FleetError("device " + spec_.signature.id + ": TLS context setup failed");
            configure(*https_);
            https_port_ = https_->bind_to_any_port("127.0.0.1");
            if (https_port_ <= 0) throw FleetError("device " + spec_.signature.id + ": cannot listen for TLS");
            threads_.emplace_back([server = https_.get()] { server->listen_after_bind(); });
        }
    }

    void stop() {
        if (http_) http_->stop();
        if (https_) https_->stop();
        for (auto& thread : threads_) {
            if (thread.joinable()) thread.join();
        }
        threads_.clear();
    }

    const MockRouterSpec& spec() const { return spec_; }
    int http_port() const { return http_port_; }
    int https_port() const { return https_port_; }

    DeviceState state() const {
        std::lock_guard lock(mutex_);
        return state_;
    }

    void override_credentials(std::optional<Credentials> credentials) {
        std::lock_guard lock(mutex_);
        state_.credential_override = std::move(credentials);
        sessions_.clear();
    }

private:
    certs::KeyPair make_certificate() const {
        const auto& tls = spec_.behavior.tls;
        certs::CertRequest request;
        request.common_name = tls.subject;
        request.organization = spec_.signature.manufacturer;
        if (tls.kind == MockTlsProfile::Kind::SelfSigned) {
            request.ip_sans = {"127.0.0.1", spec_.signature.gateway_url.host};
            request.not_before = Clock::now() - std::chrono::hours(24);
            request.not_after = Clock::now() + std::chrono::hours(24 * 3650);
            return certs::make_self_signed(request);
        }
        request.dns_sans = {tls.subject};
        request.not_after = tls.not_after;
        request.not_before = tls.not_after - std::chrono::hours(24 * 365);
        return certs::make_issued(request, "Interpeak CA");
    }

    void configure(httplib::Server& server) {
        server.new_task_queue = [] { return new httplib::ThreadPool(4); };
        server.set_keep_alive_max_count(1);
        server.set_read_timeout(std::chrono::seconds(2));
        server.set_write_timeout(std::chrono::seconds(2));
        // The library default adds SO_REUSEPORT, which would let two devices
        // share a fixed port without an error.
        server.set_socket_options([](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
        });
        auto handler = [this](const httplib::Request& req, httplib::Response& res) { handle(req, res); };
        server.Get(".*", handler);
        server.Post(".*", handler);
    }

    Credentials credentials_locked() const {
        if (state_.credential_override) return *state_.credential_override;
        if (spec_.behavior.credentials) return *spec_.behavior.credentials;
        return signature_credentials(spec_.signature);
    }

    bool basic_authorized(const httplib::Request& req) const {
        Credentials credentials;
        {
            std::lock_guard lock(mutex_);
            credentials = credentials_locked();
        }
        if (!requires_login(credentials)) return true;
        std::string expected =
            basic_authorization(credentials.username.value_or(""), credentials.password.value_or(""));
        return req.has_header("Authorization") && req.get_header_value("Authorization") == expected;
    }

    bool session_valid(const httplib::Request& req) const {
        if (!spec_.behavior.session_cookie || !req.has_header("Cookie")) return false;
        std::string prefix = spec_.behavior.session_cookie->name + "=";
        const std::string header = req.get_header_value("Cookie");
        std::string_view cookies = header;
        std::lock_guard lock(mutex_);
        while (!cookies.empty()) {
            auto semi = cookies.find(';');
            std::string_view item = cookies.substr(0, semi);
            cookies = semi == std::string_view::npos ? std::string_view{} : cookies.substr(semi + 1);
            while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
            if (item.starts_with(prefix) && sessions_.contains(std::string(item.substr(prefix.size())))) return true;
        }
        return false;
    }

    std::string set_cookie_value(const std::string& value) const {
        const SessionCookie& cookie = *spec_.behavior.session_cookie;
        std::string out = cookie.name + "=" + value + "; Path=/";
        for (const auto& flag : cookie.flags) out += "; " + flag;
        return out;
    }

    void issue_cookie(httplib::Response& res, bool authenticated) {
        if (!spec_.behavior.session_cookie) return;
        std::string value;
        {
            std::lock_guard lock(mutex_);
            // Stable per device and credential set, so identical fleets
            // produce identical responses.
            Credentials credentials = credentials_locked();
            value = opaque_token(spec_.signature.id + (authenticated ? "/session/" : "/visitor/") +
                                 credentials.username.value_or("-") + "/" + credentials.password.value_or("-"));
            if (authenticated) sessions_.insert(value);
        }
        res.set_header("Set-Cookie", set_cookie_value(value));
    }

    std::string next_csrf_token() {
        std::lock_guard lock(mutex_);
        return opaque_token(spec_.signature.id + "/csrf/" + std::to_string(++csrf_counter_));
    }

    std::string admin_page() {
        const auto& sig = spec_.signature;
        std::string out = "<!DOCTYPE html>\n<html><head><title>" + html::escape(sig.model) + "</title></head><body>\n";
        out += "<h1>" + html::escape(sig.manufacturer + " " + sig.model) + "</h1>\n";
        out += "<p>Firmware " + html::escape(sig.firmware_version) + "</p>\n";
        out += "<a href=\"/logout\">Logout</a>\n";
        out += "<form action=\"/apply_settings\" method=\"POST\">\n";
        out += "<input type=\"hidden\" name=\"page\" value=\"basic\">\n";
        if (spec_.behavior.csrf_token) {
            out += "<input type=\"hidden\" name=\"csrf_token\" value=\"" + next_csrf_token() + "\">\n";
        }
        out += "<input type=\"text\" name=\"wan_dns\" value=\"\">\n<input type=\"submit\" value=\"Save\">\n</form>\n";
        out += "</body></html>\n";
        return out;
    }

    std::string reboot_page() {
        const RebootEndpoint& reboot = *spec_.behavior.reboot_endpoint;
        std::string out = "<!DOCTYPE html>\n<html><head><title>" + html::escape(spec_.signature.model) +
                          "</title></head><body>\n<form action=\"" + html::escape(reboot.path) +
                          "\" method=\"POST\">\n";
        for (const auto& [name, value] : reboot.required_fields) {
            out += "<input type=\"hidden\" name=\"" + html::escape(name) + "\" value=\"" + html::escape(value) +
                   "\">\n";
        }
        if (spec_.behavior.csrf_token) {
            out += "<input type=\"hidden\" name=\"csrf_token\" value=\"" + next_csrf_token() + "\">\n";
        }
        out += "<input type=\"submit\" value=\"Reboot\">\n</form>\n</body></html>\n";
        return out;
    }

    void send_html(httplib::Response& res, int status, std::string body) {
        res.status = status;
        res.set_content(std::move(body), "text/html");
    }

    void not_found(httplib::Response& res) { send_html(res, 404, "<html><body>Not Found</body></html>\n"); }

    void handle(const httplib::Request& req, httplib::Response& res) {
        const auto& b = spec_.behavior;
        if (b.frame_options_header) res.set_header("X-Frame-Options", *b.frame_options_header);
        const bool is_get = req.method == "GET" || req.method == "HEAD";
        const std::string& path = req.path;

        if (is_get && std::find(b.unique_resource_paths.begin(), b.unique_resource_paths.end(), path) !=
                          b.unique_resource_paths.end()) {
            res.status = 200;
            res.set_content(std::string(kGif, sizeof(kGif) - 1), "image/gif");
            return;
        }

        if (spec_.signature.auth_method == AuthMethod::BasicAuth) {
            if (!basic_authorized(req)) {
                res.set_header("WWW-Authenticate", quote_realm(b.realm_header.value_or("")));
                send_html(res, 401, "<html><body>401 Unauthorized</body></html>\n");
                return;
            }
            authenticated(req, res, is_get);
            return;
        }

        // The reboot endpoint sits in front of every session check.
        if (b.reboot_endpoint && path == b.reboot_endpoint->path) {
            if (is_get) {
                send_html(res, 200, reboot_page());
                return;
            }
            auto fields = parse_form_body(req.body);
            for (const auto& [name, value] : b.reboot_endpoint->required_fields) {
                if (form_value(fields, name) != value) {
                    send_html(res, 400, "<html><body>Bad request</body></html>\n");
                    return;
                }
            }
            {
                std::lock_guard lock(mutex_);
                ++state_.reboot_count;
            }
            send_html(res, 200, "<html><body>The device is rebooting.</body></html>\n");
            return;
        }

        Credentials credentials;
        {
            std::lock_guard lock(mutex_);
            credentials = credentials_locked();
        }
        if (!requires_login(credentials)) {
            if (path == "/" && is_get) {
                issue_cookie(res, true);
                send_html(res, 200, admin_page());
                return;
            }
            authenticated(req, res, is_get);
            return;
        }

        const LoginForm* form = spec_.signature.login_form ? &*spec_.signature.login_form : nullptr;
        if (form && path == form->action && !is_get) {
            auto fields = parse_form_body(req.body);
            bool ok = form_value(fields, form->password_field).value_or("") == credentials.password.value_or("");
            if (credentials.username) {
                ok = ok && form->username_field &&
                     form_value(fields, *form->username_field).value_or("") == *credentials.username;
            }
            if (ok) {
                issue_cookie(res, true);
                send_html(res, 200, admin_page());
            } else {
                send_html(res, 200, b.login_form_html.value_or(login_page(spec_.signature)));
            }
            return;
        }
        if (session_valid(req)) {
            authenticated(req, res, is_get);
            return;
        }
        if (path == "/" && is_get) {
            issue_cookie(res, false);
            send_html(res, 200, b.login_form_html.value_or(login_page(spec_.signature)));
            return;
        }
        res.status = 302;
        res.set_header("Location", "/");
    }

    void authenticated(const httplib::Request& req, httplib::Response& res, bool is_get) {
        const auto& b = spec_.behavior;
        const std::string& path = req.path;
        if (is_get && (path == "/" || path == spec_.signature.audit.admin_path)) {
            send_html(res, 200, admin_page());
            return;
        }
        if (is_get && b.reflective_endpoint && path == b.reflective_endpoint->path) {
            std::string value = req.get_param_value(b.reflective_endpoint->parameter);
            if (b.reflective_endpoint->encode) value = html::escape(value);
            send_html(res, 200, "<!DOCTYPE html>\n<html><body><p>Results for " + value + "</p></body></html>\n");
            return;
        }
        if (b.stored_xss_pair) {
            const StoredXssProbe& pair = *b.stored_xss_pair;
            if (!is_get && path == pair.inject_path) {
                auto fields = parse_form_body(req.body);
                if (auto value = form_value(fields, pair.field)) {
                    std::lock_guard lock(mutex_);
                    auto& stored = state_.stored_values;
                    if (std::find(stored.begin(), stored.end(), *value) == stored.end()) stored.push_back(*value);
                }
                send_html(res, 200, "<html><body>Settings saved.</body></html>\n");
                return;
            }
            if (is_get && path == pair.display_path) {
                std::vector<std::string> values;
                {
                    std::lock_guard lock(mutex_);
                    values = state_.stored_values;
                }
                std::string body = "<!DOCTYPE html>\n<html><body><h1>Status</h1><ul>\n";
                for (const auto& value : values) body += "<li>" + value + "</li>\n";
                send_html(res, 200, body + "</ul></body></html>\n");
                return;
            }
        }
        if (!is_get && path == "/apply_settings") {
            send_html(res, 200, "<html><body>Settings saved.</body></html>\n");
            return;
        }
        not_found(res);
    }

    MockRouterSpec spec_;
    std::unique_ptr<httplib::Server> http_;
    std::unique_ptr<httplib::SSLServer> https_;
    std::vector<std::thread> threads_;
    int http_port_ = 0;
    int https_port_ = 0;

    mutable std::mutex mutex_;
    DeviceState state_;
    std::set<std::string> sessions_;
    std::uint64_t csrf_counter_ = 0;
};

MockFleet::MockFleet(std::vector<MockRouterSpec> specs) {
    std::set<std::string> ids;
    for (const auto& spec : specs) {
        validate_mock_spec(spec);
        if (!ids.insert(spec.signature.id).second) throw FleetError("device " + spec.signature.id + ": listed twice");
    }
    try {
        for (auto& spec : specs) {
            devices_.push_back(std::make_unique<MockDevice>(std::move(spec)));
            devices_.back()->start();
        }
    } catch (...) {
        for (auto& device : devices_) device->stop();
        throw;
    }
    running_ = true;
}

MockFleet::~MockFleet() { stop(); }

std::vector<std::string> MockFleet::device_ids() const {
    std::vector<std::string> out;
    for (const auto& device : devices_) out.push_back(device->spec().signature.id);
    return out;
}

MockDevice& MockFleet::device(std::string_view id) const {
    for (const auto& device : devices_) {
        if (device->spec().signature.id == id) return *device;
    }
    throw FleetError("unknown device " + std::string(id));
}

Url MockFleet::base_url(std::string_view id) const {
    Url url;
    url.scheme = "http";
    url.host = "127.0.0.1";
    url.port = static_cast<std::uint16_t>(device(id).http_port());
    return url;
}

std::optional<Url> MockFleet::https_url(std::string_view id) const {
    const MockDevice& d = device(id);
    if (d.https_port() <= 0) return std::nullopt;
    Url url;
    url.scheme = "https";
    url.host = "127.0.0.1";
    url.port = static_cast<std::uint16_t>(d.https_port());
    return url;
}

AuditTarget MockFleet::target(std::string_view id) const {
    AuditTarget target;
    target.base_url = base_url(id);
    std::vector<std::uint16_t> ports;
    if (auto https = https_url(id)) ports.push_back(https->port);
    target.tls_ports = std::move(ports);
    return target;
}

std::map<std::string, std::string> MockFleet::gateway_rewrites() const {
    std::map<std::string, std::string> out;
    for (const auto& device : devices_) {
        const auto& sig = device->spec().signature;
        out.try_emplace(sig.gateway_url.origin(), base_url(sig.id).to_string());
    }
    return out;
}

DeviceState MockFleet::state(std::string_view id) const { return device(id).state(); }

void MockFleet::override_credentials(std::string_view id, Credentials credentials) {
    device(id).override_credentials(std::move(credentials));
}

void MockFleet::clear_credential_override(std::string_view id) { device(id).override_credentials(std::nullopt); }

void MockFleet::stop() {
    for (auto& device : devices_) device->stop();
    running_ = false;
}

bool MockFleet::running() const { return running_; }

std::unique_ptr<MockFleet> start_fleet(std::vector<MockRouterSpec> specs) {
    return std::make_unique<MockFleet>(std::move(specs));
}

DeviceState fleet_state(const MockFleet& fleet, std::string_view device_id) { return fleet.state(device_id); }

void stop_fleet(MockFleet& fleet) { fleet.stop(); }

}  // namespace routeraudit
