#include "routeraudit/http.h"

#include <httplib.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <set>

namespace routeraudit {

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
               return std::tolower(x) == std::tolower(y);
           });
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<std::string> ProbeResult::header(std::string_view name) const {
    for (const auto& [key, value] : headers) {
        if (iequals(key, name)) return value;
    }
    return std::nullopt;
}

std::vector<std::string> ProbeResult::header_values(std::string_view name) const {
    std::vector<std::string> out;
    for (const auto& [key, value] : headers) {
        if (iequals(key, name)) out.push_back(value);
    }
    return out;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0x0f];
    }
    return out;
}

std::string base64_encode(std::string_view data) {
    std::string out(4 * ((data.size() + 2) / 3), '\0');
    int written = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(data.data()), static_cast<int>(data.size()));
    out.resize(static_cast<std::size_t>(written));
    return out;
}

std::string basic_authorization(std::string_view username, std::string_view password) {
    std::string pair(username);
    pair += ':';
    pair += password;
    return "Basic " + base64_encode(pair);
}

namespace {

std::string describe(httplib::Error error) {
    switch (error) {
        case httplib::Error::ConnectionTimeout:
            return "timeout";
        case httplib::Error::Connection:
            return "connection failed";
        case httplib::Error::Read:
            return "read error";
        case httplib::Error::Write:
            return "write error";
        case httplib::Error::SSLConnection:
            return "tls handshake failed";
        default:
            return httplib::to_string(error);
    }
}

}  // namespace

HttpExchange HttpTransport::send(const HttpRequest& request, std::chrono::milliseconds timeout) {
    HttpExchange out;
    ProbeResult& probe = out.probe;
    probe.url = request.url.to_string();
    probe.method = request.method;

    httplib::Client client(request.url.origin());
    client.enable_server_certificate_verification(false);
    auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    client.set_follow_location(false);
    client.set_keep_alive(false);

    httplib::Request req;
    req.method = request.method;
    req.path = request.url.path_and_query();
    for (const auto& [name, value] : request.headers) req.headers.emplace(name, value);
    if (!request.body.empty() || request.method == "POST") {
        req.body = request.body;
        req.headers.emplace("Content-Type", request.content_type.empty() ? "application/x-www-form-urlencoded"
                                                                         : request.content_type);
    }

    auto started = std::chrono::steady_clock::now();
    httplib::Result result = client.send(req);
    probe.elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    if (!result) {
        probe.error = describe(result.error());
        return out;
    }
    probe.status_code = result->status;
    for (const auto& [name, value] : result->headers) probe.headers.emplace_back(name, value);
    out.body = std::move(result->body);
    probe.body_digest = sha256_hex(out.body);
    probe.body_excerpt = utf8_excerpt(out.body, kBodyExcerptBytes);
    return out;
}

std::string utf8_excerpt(std::string_view bytes, std::size_t limit) {
    bytes = bytes.substr(0, limit);
    std::string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    while (i < bytes.size()) {
        auto lead = static_cast<unsigned char>(bytes[i]);
        std::size_t len = lead < 0x80 ? 1 : (lead & 0xE0) == 0xC0 ? 2 : (lead & 0xF0) == 0xE0 ? 3 : (lead & 0xF8) == 0xF0 ? 4 : 0;
        bool ok = len > 0 && i + len <= bytes.size();
        std::uint32_t cp = len == 1 ? lead : len == 2 ? lead & 0x1F : len == 3 ? lead & 0x0F : lead & 0x07;
        for (std::size_t k = 1; ok && k < len; ++k) {
            auto c = static_cast<unsigned char>(bytes[i + k]);
            if ((c & 0xC0) != 0x80) ok = false;
            cp = (cp << 6) | (c & 0x3F);
        }
        // Reject overlong forms, surrogates and values past U+10FFFF.
        if (ok && ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
                   (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF)) {
            ok = false;
        }
        if (ok) {
            out.append(bytes.substr(i, len));
            i += len;
        } else {
            out += "\xEF\xBF\xBD";
            ++i;
        }
    }
    return out;
}

HttpExchange RecordingTransport::send(const HttpRequest& request, std::chrono::milliseconds timeout) {
    {
        std::lock_guard lock(mutex_);
        entries_.push_back({request.method, request.url.to_string()});
    }
    return inner_.send(request, timeout);
}

std::vector<RecordingTransport::Entry> RecordingTransport::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

std::vector<std::string> RecordingTransport::methods() const {
    std::lock_guard lock(mutex_);
    std::set<std::string> distinct;
    for (const auto& entry : entries_) distinct.insert(entry.method);
    return {distinct.begin(), distinct.end()};
}

void RecordingTransport::clear() {
    std::lock_guard lock(mutex_);
    entries_.clear();
}

HttpExchange get_following(Transport& transport, HttpRequest request, std::chrono::milliseconds timeout,
                           int max_hops) {
    request.method = "GET";
    request.body.clear();
    std::vector<std::string> hops;
    for (int hop = 0;; ++hop) {
        HttpExchange exchange = transport.send(request, timeout);
        const auto status = exchange.probe.status_code;
        auto location = exchange.probe.header("Location");
        bool redirect = status && (*status == 301 || *status == 302 || *status == 303 || *status == 307 ||
                                   *status == 308) && location && !location->empty();
        if (!redirect || hop >= max_hops) {
            exchange.probe.redirects = std::move(hops);
            return exchange;
        }
        hops.push_back(request.url.to_string());
        try {
            request.url = location->front() == '/' ? request.url.with_path(*location) : parse_url(*location);
        } catch (const std::exception&) {
            exchange.probe.redirects = std::move(hops);
            exchange.probe.error = "unparseable redirect target: " + *location;
            return exchange;
        }
    }
}

}  // namespace routeraudit
