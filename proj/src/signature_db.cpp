#include "routeraudit/signature_db.h"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace routeraudit {

namespace bundled {
extern const char* const bundled_signatures_json;
}

using nlohmann::json;

DatabaseError::DatabaseError(std::string message, std::string field, int line, std::string signature_id)
    : Error(std::move(message)), field_(std::move(field)), line_(line), signature_id_(std::move(signature_id)) {}

SignatureDatabase::SignatureDatabase(std::vector<RouterSignature> routers, bool closed_world)
    : routers_(std::move(routers)), closed_world_(closed_world) {}

const RouterSignature* SignatureDatabase::find(std::string_view id) const {
    auto it = std::find_if(routers_.begin(), routers_.end(), [&](const RouterSignature& s) { return s.id == id; });
    return it == routers_.end() ? nullptr : &*it;
}

const RouterSignature& SignatureDatabase::at(std::string_view id) const {
    if (const auto* sig = find(id)) return *sig;
    throw DatabaseError("unknown signature id '" + std::string(id) + "'", "id", 0, std::string(id));
}

std::string_view to_string(AuthMethod method) { return method == AuthMethod::BasicAuth ? "basic" : "web"; }

std::string_view to_string(XssKind kind) {
    switch (kind) {
        case XssKind::Reflected: return "reflected";
        case XssKind::Stored: return "stored";
        default: return "none";
    }
}

std::string_view to_string(HttpsSupport support) {
    return support == HttpsSupport::OptionalInvalidCert ? "optional_invalid_cert" : "none";
}

namespace {

// Reads typed fields out of one JSON object, producing field paths in errors.
class FieldReader {
public:
    FieldReader(const json& object, std::string path, std::string id = {})
        : object_(object), path_(std::move(path)), id_(std::move(id)) {
        if (!object_.is_object()) fail("", "expected an object");
    }

    [[noreturn]] void fail(std::string_view field, std::string_view why) const {
        std::string where = field.empty() ? path_ : path_ + "." + std::string(field);
        throw DatabaseError(where + ": " + std::string(why), where, 0, id_);
    }

    void set_id(std::string id) { id_ = std::move(id); }

    const json* get(std::string_view field) const {
        auto it = object_.find(field);
        return it == object_.end() ? nullptr : &*it;
    }

    std::string string(std::string_view field) const {
        const json* value = get(field);
        if (!value || !value->is_string()) fail(field, "expected a string");
        return value->get<std::string>();
    }

    std::string string_or(std::string_view field, std::string fallback) const {
        const json* value = get(field);
        if (!value || value->is_null()) return fallback;
        if (!value->is_string()) fail(field, "expected a string");
        return value->get<std::string>();
    }

    std::optional<std::string> nullable_string(std::string_view field) const {
        const json* value = get(field);
        if (!value || value->is_null()) return std::nullopt;
        if (!value->is_string()) fail(field, "expected a string or null");
        return value->get<std::string>();
    }

    bool boolean(std::string_view field) const {
        const json* value = get(field);
        if (!value || !value->is_boolean()) fail(field, "expected a boolean");
        return value->get<bool>();
    }

    std::vector<std::string> strings(std::string_view field) const {
        std::vector<std::string> out;
        const json* value = get(field);
        if (!value || value->is_null()) return out;
        if (!value->is_array()) fail(field, "expected an array of strings");
        for (const auto& item : *value) {
            if (!item.is_string()) fail(field, "expected an array of strings");
            out.push_back(item.get<std::string>());
        }
        return out;
    }

    const std::string& path() const { return path_; }
    const std::string& id() const { return id_; }

private:
    const json& object_;
    std::string path_;
    std::string id_;
};

AuditHints read_audit(const json* node, const FieldReader& parent) {
    AuditHints hints;
    if (!node || node->is_null()) return hints;
    FieldReader r(*node, parent.path() + ".audit", parent.id());
    hints.admin_path = r.string_or("admin_path", "/");
    if (const json* points = r.get("reflect_points"); points && !points->is_null()) {
        if (!points->is_array()) r.fail("reflect_points", "expected an array");
        std::size_t i = 0;
        for (const auto& item : *points) {
            FieldReader p(item, r.path() + ".reflect_points[" + std::to_string(i++) + "]", r.id());
            hints.reflect_points.push_back({p.string("path"), p.string("parameter")});
        }
    }
    if (const json* stored = r.get("stored_xss"); stored && !stored->is_null()) {
        FieldReader s(*stored, r.path() + ".stored_xss", r.id());
        hints.stored_xss = StoredXssProbe{s.string("inject_path"), s.string("field"), s.string("display_path")};
    }
    hints.form_pages = r.strings("form_pages");
    hints.mutating_paths = r.strings("mutating_paths");
    if (const json* ports = r.get("tls_ports"); ports && !ports->is_null()) {
        if (!ports->is_array()) r.fail("tls_ports", "expected an array of ports");
        for (const auto& port : *ports) {
            if (!port.is_number_unsigned() || port.get<unsigned>() == 0 || port.get<unsigned>() > 65535) {
                r.fail("tls_ports", "expected ports in 1..65535");
            }
            hints.tls_ports.push_back(static_cast<std::uint16_t>(port.get<unsigned>()));
        }
    }
    return hints;
}

RouterSignature read_signature(const json& node, std::size_t index) {
    FieldReader r(node, "routers[" + std::to_string(index) + "]");
    RouterSignature sig;
    sig.id = r.string("id");
    r.set_id(sig.id);
    sig.manufacturer = r.string("manufacturer");
    sig.model = r.string("model");
    sig.firmware_version = r.string_or("firmware_version", "");

    std::string method = r.string("auth_method");
    if (method == "basic") {
        sig.auth_method = AuthMethod::BasicAuth;
    } else if (method == "web") {
        sig.auth_method = AuthMethod::WebForm;
    } else {
        r.fail("auth_method", "expected \"basic\" or \"web\"");
    }
    if (!r.get("default_username")) r.fail("default_username", "missing (use null for no field)");
    if (!r.get("default_password")) r.fail("default_password", "missing (use null for no field)");
    sig.default_username = r.nullable_string("default_username");
    sig.default_password = r.nullable_string("default_password");

    try {
        sig.gateway_url = parse_url(r.string("gateway_url"));
    } catch (const UrlError& e) {
        r.fail("gateway_url", e.what());
    }
    sig.realm = r.nullable_string("realm");
    sig.unique_resources = r.strings("unique_resources");

    if (const json* form = r.get("login_form"); form && !form->is_null()) {
        FieldReader f(*form, r.path() + ".login_form", sig.id);
        LoginForm login;
        login.action = f.string("action");
        login.method = f.string_or("method", "POST");
        login.username_field = f.nullable_string("username_field");
        login.password_field = f.string("password_field");
        login.success_marker = f.string_or("success_marker", "");
        sig.login_form = std::move(login);
    }

    const json* profile = r.get("vuln_profile");
    if (!profile) r.fail("vuln_profile", "missing");
    FieldReader v(*profile, r.path() + ".vuln_profile", sig.id);
    sig.vuln_profile.ui_redressing = v.boolean("uir");
    std::string xss = v.string("xss");
    if (xss == "none") {
        sig.vuln_profile.xss = XssKind::None;
    } else if (xss == "reflected") {
        sig.vuln_profile.xss = XssKind::Reflected;
    } else if (xss == "stored") {
        sig.vuln_profile.xss = XssKind::Stored;
    } else {
        v.fail("xss", "expected \"none\", \"reflected\" or \"stored\"");
    }
    std::string https = v.string("https");
    if (https == "none") {
        sig.vuln_profile.https = HttpsSupport::None;
    } else if (https == "optional_invalid_cert") {
        sig.vuln_profile.https = HttpsSupport::OptionalInvalidCert;
    } else {
        v.fail("https", "expected \"none\" or \"optional_invalid_cert\"");
    }
    sig.audit = read_audit(r.get("audit"), r);
    return sig;
}

int line_of_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

json nullable(const std::optional<std::string>& value) { return value ? json(*value) : json(nullptr); }

}  // namespace

void validate(const SignatureDatabase& db) {
    std::set<std::string> ids;
    std::map<std::string, std::string> realms;
    for (const auto& sig : db.routers()) {
        auto fail = [&](const std::string& field, const std::string& why) {
            throw DatabaseError("signature '" + sig.id + "': " + why, field, 0, sig.id);
        };
        if (sig.id.empty()) fail("id", "id must not be empty");
        if (!ids.insert(sig.id).second) fail("id", "duplicate id");

        bool basic = sig.auth_method == AuthMethod::BasicAuth;
        if (basic != sig.realm.has_value()) fail("realm", "realm must be present iff auth_method is basic");
        if (sig.realm && sig.realm->empty()) fail("realm", "realm must not be empty");
        if (basic == !sig.unique_resources.empty()) {
            fail("unique_resources", "unique_resources must be non-empty iff auth_method is web");
        }
        if (basic == sig.login_form.has_value()) fail("login_form", "login_form must be present iff auth_method is web");
        for (const auto& path : sig.unique_resources) {
            if (path.empty() || path.front() != '/') fail("unique_resources", "resource '" + path + "' is not absolute");
        }
        if (sig.gateway_url.scheme != "http") fail("gateway_url", "gateway_url scheme must be http");
        if (!is_private_ipv4(sig.gateway_url.host)) fail("gateway_url", "gateway_url host is not a private address");

        if (sig.realm) {
            auto [it, inserted] = realms.emplace(*sig.realm, sig.id);
            if (!inserted) fail("realm", "duplicate realm \"" + *sig.realm + "\" (also used by '" + it->second + "')");
        }
    }
}

SignatureDatabase load_signatures(std::string_view raw_bytes) {
    json doc;
    try {
        doc = json::parse(raw_bytes.begin(), raw_bytes.end());
    } catch (const json::parse_error& e) {
        int line = line_of_offset(raw_bytes, e.byte > 0 ? e.byte - 1 : 0);
        throw DatabaseError("line " + std::to_string(line) + ": " + e.what(), "", line);
    }
    FieldReader top(doc, "$");
    const json* version = top.get("version");
    if (!version || !version->is_number_integer() || version->get<int>() != 1) {
        top.fail("version", "expected version 1");
    }
    bool closed_world = false;
    if (const json* flag = top.get("closed_world"); flag && !flag->is_null()) closed_world = top.boolean("closed_world");
    const json* routers = top.get("routers");
    if (!routers || !routers->is_array()) top.fail("routers", "expected an array");

    std::vector<RouterSignature> signatures;
    for (std::size_t i = 0; i < routers->size(); ++i) signatures.push_back(read_signature((*routers)[i], i));
    SignatureDatabase db(std::move(signatures), closed_world);
    validate(db);
    return db;
}

SignatureDatabase load_signatures_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatabaseError("cannot open signature database '" + path + "'", "");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_signatures(buffer.str());
}

std::string serialize_signatures(const SignatureDatabase& db) {
    json routers = json::array();
    for (const auto& sig : db.routers()) {
        json node;
        node["id"] = sig.id;
        node["manufacturer"] = sig.manufacturer;
        node["model"] = sig.model;
        node["firmware_version"] = sig.firmware_version;
        node["auth_method"] = std::string(to_string(sig.auth_method));
        node["default_username"] = nullable(sig.default_username);
        node["default_password"] = nullable(sig.default_password);
        node["gateway_url"] = sig.gateway_url.to_string();
        node["realm"] = nullable(sig.realm);
        node["unique_resources"] = sig.unique_resources;
        if (sig.login_form) {
            node["login_form"] = {{"action", sig.login_form->action},
                                  {"method", sig.login_form->method},
                                  {"username_field", nullable(sig.login_form->username_field)},
                                  {"password_field", sig.login_form->password_field},
                                  {"success_marker", sig.login_form->success_marker}};
        } else {
            node["login_form"] = nullptr;
        }
        node["vuln_profile"] = {{"uir", sig.vuln_profile.ui_redressing},
                                {"xss", std::string(to_string(sig.vuln_profile.xss))},
                                {"https", std::string(to_string(sig.vuln_profile.https))}};
        json audit;
        audit["admin_path"] = sig.audit.admin_path;
        audit["reflect_points"] = json::array();
        for (const auto& point : sig.audit.reflect_points) {
            audit["reflect_points"].push_back({{"path", point.path}, {"parameter", point.parameter}});
        }
        if (sig.audit.stored_xss) {
            audit["stored_xss"] = {{"inject_path", sig.audit.stored_xss->inject_path},
                                   {"field", sig.audit.stored_xss->field},
                                   {"display_path", sig.audit.stored_xss->display_path}};
        } else {
            audit["stored_xss"] = nullptr;
        }
        audit["form_pages"] = sig.audit.form_pages;
        audit["mutating_paths"] = sig.audit.mutating_paths;
        audit["tls_ports"] = sig.audit.tls_ports;
        node["audit"] = std::move(audit);
        routers.push_back(std::move(node));
    }
    json doc{{"version", 1}, {"closed_world", db.closed_world()}, {"routers", std::move(routers)}};
    return doc.dump(2) + "\n";
}

SignatureDbStats db_stats(const SignatureDatabase& db) {
    SignatureDbStats stats;
    std::set<std::string> gateways;
    for (const auto& sig : db.routers()) {
        ++stats.total_routers;
        stats.total_credential_fields += 2;
        stats.admin_valued_fields += (sig.default_username == "admin") + (sig.default_password == "admin");
        (sig.auth_method == AuthMethod::BasicAuth ? stats.basic_auth_count : stats.web_form_count)++;
        gateways.insert(sig.gateway_url.host);
    }
    stats.distinct_gateway_ips = static_cast<int>(gateways.size());
    return stats;
}

std::string_view bundled_signatures_json() { return bundled::bundled_signatures_json; }

const SignatureDatabase& bundled_signatures() {
    static const SignatureDatabase db = load_signatures(bundled_signatures_json());
    return db;
}

}  // namespace routeraudit
