#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace routeraudit {

// Absolute http(s) URL, split into the parts the scanner needs.
struct Url {
    std::string scheme;  // "http" or "https", lowercase
    std::string host;    // lowercase; IPv4 literal or hostname
    std::uint16_t port = 0;
    std::string path = "/";  // always starts with '/'
    std::string query;       // without the leading '?'

    // scheme://host[:port] with the port omitted when it is the scheme default.
    std::string origin() const;
    std::string to_string() const;
    std::string path_and_query() const;

    Url with_path(std::string_view path_and_query) const;
    bool is_default_port() const;

    friend bool operator==(const Url&, const Url&) = default;
};

// Throws UrlError naming the offending input.
Url parse_url(std::string_view text);

bool is_ipv4_literal(std::string_view host);
bool is_loopback_host(std::string_view host);
// 10/8, 172.16/12, 192.168/16.
bool is_private_ipv4(std::string_view host);

// RFC 3986 unreserved characters pass through; everything else is %XX.
std::string percent_encode(std::string_view text);
std::string percent_decode(std::string_view text);

// application/x-www-form-urlencoded body from ordered pairs.
template <typename Pairs>
std::string form_urlencode(const Pairs& pairs) {
    std::string out;
    for (const auto& [name, value] : pairs) {
        if (!out.empty()) out += '&';
        out += percent_encode(name);
        out += '=';
        out += percent_encode(value);
    }
    return out;
}

}  // namespace routeraudit
