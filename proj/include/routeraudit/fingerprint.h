#pragma once

#include "routeraudit/http.h"
#include "routeraudit/signature_db.h"

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace routeraudit {

enum class Confidence { Exact, Unidentified };

struct FingerprintEvidence {
    ProbeResult probe;
    std::string reason;
};

struct FingerprintDecision {
    std::optional<std::string> matched_id;
    Confidence confidence = Confidence::Unidentified;
    int probes_used = 0;
    std::vector<FingerprintEvidence> evidence;
    std::optional<std::string> observed_realm;
    bool by_elimination = false;
};

struct RealmProbe {
    std::optional<std::string> realm;
    ProbeResult probe;
    std::optional<std::string> warning;
};

struct ResourceProbe {
    bool present = false;
    ProbeResult probe;
};

// Realm of a `Basic realm="..."` challenge, quoted-string escapes removed.
// nullopt for other schemes or malformed values.
std::optional<std::string> parse_basic_realm(std::string_view www_authenticate);

// Unauthenticated GET of base_url. Throws TransportError when nothing answered.
RealmProbe probe_realm(Transport& transport, const Url& base_url, std::chrono::milliseconds timeout);

// Exact, case-sensitive, whole-string comparison.
const RouterSignature* match_realm(std::string_view realm, const SignatureDatabase& db);

// True iff GET base_url+path answers 200. Throws TransportError.
ResourceProbe probe_resource(Transport& transport, const Url& base_url, std::string_view path,
                             std::chrono::milliseconds timeout);

// Realm probe first, then the first unique resource of each web-form
// signature in database order. A closed-world database lets the last
// web-form candidate be decided by elimination.
FingerprintDecision fingerprint(Transport& transport, const Url& base_url, const SignatureDatabase& db,
                                std::chrono::milliseconds timeout = std::chrono::milliseconds{2000});

std::string_view to_string(Confidence confidence);

}  // namespace routeraudit
