#pragma once

#include "routeraudit/url.h"

#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace routeraudit {

using Clock = std::chrono::system_clock;
using Headers = std::vector<std::pair<std::string, std::string>>;

// Certificate facts gathered from one TLS handshake.
struct TlsInfo {
    bool https_reachable = false;
    std::string cert_subject;
    std::string cert_issuer;
    bool self_signed = false;
    Clock::time_point not_after{};
    bool expired_at_scan = false;
    bool hostname_match = false;
};

inline constexpr std::size_t kBodyExcerptBytes = 1024;

// Observable side of one HTTP(S) exchange. A transport failure leaves
// status_code empty and fills `error`.
struct ProbeResult {
    std::string url;
    std::string method;
    std::optional<int> status_code;
    Headers headers;
    std::string body_digest;   // sha256 hex of the full body
    std::string body_excerpt;  // utf8_excerpt of the body
    std::chrono::milliseconds elapsed{0};
    std::optional<TlsInfo> tls_info;
    std::string error;
    std::vector<std::string> redirects;  // Location hops followed before this response

    bool responded() const { return status_code.has_value(); }
    // First header with this name, compared case-insensitively.
    std::optional<std::string> header(std::string_view name) const;
    std::vector<std::string> header_values(std::string_view name) const;
};

struct HttpRequest {
    std::string method = "GET";
    Url url;
    Headers headers;
    std::string body;
    std::string content_type;
};

struct HttpExchange {
    ProbeResult probe;
    std::string body;
};

// Single request/response round trip. Implementations must be thread-safe.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpExchange send(const HttpRequest& request, std::chrono::milliseconds timeout) = 0;
};

// Real network transport. Certificates are not verified: router admin
// interfaces are inspected, not trusted.
class HttpTransport final : public Transport {
public:
    HttpExchange send(const HttpRequest& request, std::chrono::milliseconds timeout) override;
};

// Decorator that records every request passing through it.
class RecordingTransport final : public Transport {
public:
    struct Entry {
        std::string method;
        std::string url;
    };

    explicit RecordingTransport(Transport& inner) : inner_(inner) {}

    HttpExchange send(const HttpRequest& request, std::chrono::milliseconds timeout) override;

    std::vector<Entry> entries() const;
    std::vector<std::string> methods() const;  // distinct, sorted
    void clear();

private:
    Transport& inner_;
    mutable std::mutex mutex_;
    std::vector<Entry> entries_;
};

// GET that follows up to `max_hops` redirects, recording each hop.
HttpExchange get_following(Transport& transport, HttpRequest request, std::chrono::milliseconds timeout,
                           int max_hops = 3);

// First `limit` bytes of a body as valid UTF-8; undecodable bytes become
// U+FFFD, one per byte.
std::string utf8_excerpt(std::string_view bytes, std::size_t limit = kBodyExcerptBytes);

std::string sha256_hex(std::string_view data);
std::string base64_encode(std::string_view data);
std::string basic_authorization(std::string_view username, std::string_view password);

bool iequals(std::string_view a, std::string_view b);
std::string to_lower(std::string_view s);

}  // namespace routeraudit
