#include "routeraudit/discovery.h"

#include <algorithm>
#include <atomic>
#include <set>
#include <thread>

namespace routeraudit {

std::vector<GatewayCandidate> candidate_set(const SignatureDatabase& db, std::span<const std::string> extra_urls) {
    std::vector<GatewayCandidate> out;
    std::set<std::string> seen;
    for (const auto& sig : db.routers()) {
        Url base = sig.gateway_url.with_path("/");
        if (seen.insert(base.origin()).second) out.push_back({base, CandidateSource::SignatureDb});
    }
    for (const auto& text : extra_urls) {
        Url base = parse_url(text).with_path("/");
        if (seen.insert(base.origin()).second) out.push_back({base, CandidateSource::UserSupplied});
    }
    return out;
}

std::vector<GatewayCandidate> rewrite_candidates(std::span<const GatewayCandidate> candidates,
                                                 const std::map<std::string, std::string>& origin_map) {
    std::vector<GatewayCandidate> out;
    out.reserve(candidates.size());
    for (const auto& candidate : candidates) {
        auto it = origin_map.find(candidate.base_url.origin());
        if (it == origin_map.end()) {
            out.push_back(candidate);
        } else {
            out.push_back({parse_url(it->second).with_path("/"), candidate.source});
        }
    }
    return out;
}

std::vector<LiveGateway> discover(std::span<const GatewayCandidate> candidates, Transport& transport,
                                  const DiscoveryOptions& options) {
    std::vector<LiveGateway> results(candidates.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < candidates.size(); i = next++) {
            LiveGateway& live = results[i];
            live.base_url = candidates[i].base_url;
            HttpRequest request;
            request.url = live.base_url;
            HttpExchange exchange = get_following(transport, request, options.timeout, options.max_redirects);
            live.responded = exchange.probe.responded();
            if (!live.responded) live.reason = exchange.probe.error.empty() ? "no response" : exchange.probe.error;
            live.initial_probe = std::move(exchange.probe);
        }
    };
    std::size_t workers = std::min<std::size_t>(std::max(options.parallelism, 1), candidates.size());
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
    return results;
}

}  // namespace routeraudit
