#include "routeraudit/fingerprint.h"

#include "routeraudit/error.h"

#include <cctype>

namespace routeraudit {

std::string_view to_string(Confidence confidence) {
    return confidence == Confidence::Exact ? "exact" : "unidentified";
}

std::optional<std::string> parse_basic_realm(std::string_view value) {
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < value.size() && (value[pos] == ' ' || value[pos] == '\t')) ++pos;
    };
    skip_space();
    if (value.size() - pos < 5 || !iequals(value.substr(pos, 5), "basic")) return std::nullopt;
    pos += 5;
    if (pos < value.size() && value[pos] != ' ' && value[pos] != '\t') return std::nullopt;

    // auth-params: name=value pairs separated by commas
    while (pos < value.size()) {
        skip_space();
        std::size_t name_start = pos;
        while (pos < value.size() && value[pos] != '=' && value[pos] != ',' && value[pos] != ' ') ++pos;
        std::string_view name = value.substr(name_start, pos - name_start);
        skip_space();
        if (pos >= value.size() || value[pos] != '=') return std::nullopt;
        ++pos;
        skip_space();
        std::string param;
        if (pos < value.size() && value[pos] == '"') {
            ++pos;
            bool closed = false;
            while (pos < value.size()) {
                char c = value[pos++];
                if (c == '\\' && pos < value.size()) {
                    param += value[pos++];
                } else if (c == '"') {
                    closed = true;
                    break;
                } else {
                    param += c;
                }
            }
            if (!closed) return std::nullopt;
        } else {
            std::size_t start = pos;
            while (pos < value.size() && value[pos] != ',' && value[pos] != ' ' && value[pos] != '\t') ++pos;
            param = std::string(value.substr(start, pos - start));
            if (param.empty()) return std::nullopt;
        }
        if (iequals(name, "realm")) return param;
        skip_space();
        if (pos < value.size()) {
            if (value[pos] != ',') return std::nullopt;
            ++pos;
        }
    }
    return std::nullopt;
}

RealmProbe probe_realm(Transport& transport, const Url& base_url, std::chrono::milliseconds timeout) {
    HttpRequest request;
    request.url = base_url.with_path("/");
    HttpExchange exchange = transport.send(request, timeout);
    if (!exchange.probe.responded()) {
        throw TransportError("realm probe of " + request.url.to_string() + " failed: " + exchange.probe.error);
    }
    RealmProbe out;
    out.probe = std::move(exchange.probe);
    if (out.probe.status_code != 401) return out;
    auto header = out.probe.header("WWW-Authenticate");
    if (!header) {
        out.warning = "401 without a WWW-Authenticate header";
        return out;
    }
    out.realm = parse_basic_realm(*header);
    if (!out.realm) out.warning = "unusable WWW-Authenticate header: " + *header;
    return out;
}

const RouterSignature* match_realm(std::string_view realm, const SignatureDatabase& db) {
    if (realm.empty()) return nullptr;
    for (const auto& sig : db.routers()) {
        if (sig.realm && *sig.realm == realm) return &sig;
    }
    return nullptr;
}

ResourceProbe probe_resource(Transport& transport, const Url& base_url, std::string_view path,
                             std::chrono::milliseconds timeout) {
    HttpRequest request;
    request.url = base_url.with_path(path);
    HttpExchange exchange = transport.send(request, timeout);
    if (!exchange.probe.responded()) {
        throw TransportError("resource probe of " + request.url.to_string() + " failed: " + exchange.probe.error);
    }
    ResourceProbe out;
    out.present = exchange.probe.status_code == 200;
    out.probe = std::move(exchange.probe);
    return out;
}

FingerprintDecision fingerprint(Transport& transport, const Url& base_url, const SignatureDatabase& db,
                                std::chrono::milliseconds timeout) {
    FingerprintDecision decision;
    bool transport_failed = false;
    bool challenged = false;

    ++decision.probes_used;
    try {
        RealmProbe realm = probe_realm(transport, base_url, timeout);
        challenged = realm.probe.status_code == 401;
        decision.observed_realm = realm.realm;
        if (realm.realm) {
            if (const auto* sig = match_realm(*realm.realm, db)) {
                decision.matched_id = sig->id;
                decision.confidence = Confidence::Exact;
                decision.evidence.push_back({std::move(realm.probe), "realm \"" + *realm.realm + "\" matches " + sig->id});
                return decision;
            }
            decision.evidence.push_back({std::move(realm.probe), "realm \"" + *realm.realm + "\" is not in the database"});
        } else if (realm.warning) {
            decision.evidence.push_back({std::move(realm.probe), "warning: " + *realm.warning});
        } else {
            std::string status = std::to_string(*realm.probe.status_code);
            decision.evidence.push_back({std::move(realm.probe), "no Basic challenge (status " + status + ")"});
        }
    } catch (const TransportError& e) {
        transport_failed = true;
        ProbeResult failed;
        failed.url = base_url.with_path("/").to_string();
        failed.method = "GET";
        failed.error = e.what();
        decision.evidence.push_back({std::move(failed), "transport error"});
    }

    std::vector<const RouterSignature*> web_forms;
    for (const auto& sig : db.routers()) {
        if (sig.auth_method == AuthMethod::WebForm && !sig.unique_resources.empty()) web_forms.push_back(&sig);
    }
    for (std::size_t i = 0; i < web_forms.size(); ++i) {
        const RouterSignature& sig = *web_forms[i];
        bool last = i + 1 == web_forms.size();
        if (last && db.closed_world() && !challenged && !transport_failed && i > 0) {
            decision.matched_id = sig.id;
            decision.confidence = Confidence::Exact;
            decision.by_elimination = true;
            ProbeResult none;
            none.url = base_url.with_path(sig.unique_resources.front()).to_string();
            decision.evidence.push_back(
                {std::move(none), "closed-world elimination: every other web-form resource is absent, " + sig.id +
                                      " is the remaining candidate (not probed)"});
            return decision;
        }
        const std::string& path = sig.unique_resources.front();
        ++decision.probes_used;
        try {
            ResourceProbe resource = probe_resource(transport, base_url, path, timeout);
            if (resource.present) {
                decision.matched_id = sig.id;
                decision.confidence = Confidence::Exact;
                decision.evidence.push_back({std::move(resource.probe), "unique resource " + path + " answered 200: " + sig.id});
                return decision;
            }
            std::string status = std::to_string(*resource.probe.status_code);
            decision.evidence.push_back({std::move(resource.probe), "unique resource " + path + " answered " + status});
        } catch (const TransportError& e) {
            transport_failed = true;
            ProbeResult failed;
            failed.url = base_url.with_path(path).to_string();
            failed.method = "GET";
            failed.error = e.what();
            decision.evidence.push_back({std::move(failed), "transport error"});
        }
    }
    return decision;
}

}  // namespace routeraudit
