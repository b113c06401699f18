#pragma once

#include "routeraudit/http.h"
#include "routeraudit/signature_db.h"

#include <chrono>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace routeraudit {

enum class CandidateSource { SignatureDb, UserSupplied };

struct GatewayCandidate {
    Url base_url;
    CandidateSource source = CandidateSource::UserSupplied;
};

struct LiveGateway {
    Url base_url;
    bool responded = false;
    ProbeResult initial_probe;
    std::string reason;  // why responded is false
};

struct DiscoveryOptions {
    std::chrono::milliseconds timeout{2000};
    int parallelism = 8;
    int max_redirects = 3;
};

// Distinct DB gateways in DB order, then user URLs; duplicates (by origin)
// are dropped. Throws UrlError naming a malformed extra URL.
std::vector<GatewayCandidate> candidate_set(const SignatureDatabase& db, std::span<const std::string> extra_urls);

// Replaces candidate origins found in `origin_map` (e.g. a signature gateway
// mapped to a loopback mock). Unmapped candidates pass through.
std::vector<GatewayCandidate> rewrite_candidates(std::span<const GatewayCandidate> candidates,
                                                 const std::map<std::string, std::string>& origin_map);

// One GET per candidate, at most `parallelism` in flight. Output order
// matches input order. Any HTTP status (401 included) counts as live.
std::vector<LiveGateway> discover(std::span<const GatewayCandidate> candidates, Transport& transport,
                                  const DiscoveryOptions& options = {});

}  // namespace routeraudit
