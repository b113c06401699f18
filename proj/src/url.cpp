#include "routeraudit/url.h"

#include "routeraudit/error.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>

namespace routeraudit {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool parse_octets(std::string_view host, std::array<int, 4>& octets) {
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        if (i > 0) {
            if (pos >= host.size() || host[pos] != '.') return false;
            ++pos;
        }
        std::size_t start = pos;
        while (pos < host.size() && std::isdigit(static_cast<unsigned char>(host[pos]))) ++pos;
        if (pos == start || pos - start > 3) return false;
        int value = 0;
        std::from_chars(host.data() + start, host.data() + pos, value);
        if (value > 255) return false;
        octets[static_cast<std::size_t>(i)] = value;
    }
    return pos == host.size();
}

bool valid_hostname(std::string_view host) {
    if (host.empty() || host.size() > 253) return false;
    return std::all_of(host.begin(), host.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '-' || c == '.' || c == '_';
    });
}

}  // namespace

std::string Url::origin() const {
    std::string out = scheme + "://" + host;
    if (!is_default_port()) out += ":" + std::to_string(port);
    return out;
}

std::string Url::path_and_query() const {
    return query.empty() ? path : path + "?" + query;
}

std::string Url::to_string() const { return origin() + path_and_query(); }

bool Url::is_default_port() const {
    return (scheme == "http" && port == 80) || (scheme == "https" && port == 443);
}

Url Url::with_path(std::string_view path_and_query) const {
    Url out = *this;
    auto q = path_and_query.find('?');
    std::string_view p = path_and_query.substr(0, q);
    out.path = p.empty() ? "/" : std::string(p);
    if (out.path.front() != '/') out.path.insert(out.path.begin(), '/');
    out.query = q == std::string_view::npos ? "" : std::string(path_and_query.substr(q + 1));
    return out;
}

Url parse_url(std::string_view text) {
    auto fail = [&](const char* why) {
        return UrlError("invalid URL '" + std::string(text) + "': " + why);
    };
    for (unsigned char c : text) {
        if (c <= 0x20 || c == 0x7f) throw fail("contains whitespace or control characters");
    }
    auto sep = text.find("://");
    if (sep == std::string_view::npos) throw fail("missing scheme");
    Url url;
    url.scheme = lower(text.substr(0, sep));
    if (url.scheme != "http" && url.scheme != "https") throw fail("scheme must be http or https");
    url.port = url.scheme == "https" ? 443 : 80;

    std::string_view rest = text.substr(sep + 3);
    if (auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
    auto authority_end = rest.find_first_of("/?");
    std::string_view authority = rest.substr(0, authority_end);
    std::string_view tail = authority_end == std::string_view::npos ? std::string_view{} : rest.substr(authority_end);

    if (authority.find('@') != std::string_view::npos) throw fail("userinfo is not supported");
    if (!authority.empty() && authority.front() == '[') throw fail("IPv6 literals are not supported");
    auto colon = authority.rfind(':');
    std::string_view host = authority.substr(0, colon);
    if (colon != std::string_view::npos) {
        std::string_view port_text = authority.substr(colon + 1);
        unsigned value = 0;
        auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), value);
        if (port_text.empty() || ec != std::errc{} || ptr != port_text.data() + port_text.size() || value == 0 ||
            value > 65535) {
            throw fail("bad port");
        }
        url.port = static_cast<std::uint16_t>(value);
    }
    if (!valid_hostname(host)) throw fail("bad host");
    url.host = lower(host);

    auto q = tail.find('?');
    std::string_view path = tail.substr(0, q);
    url.path = path.empty() ? "/" : std::string(path);
    if (q != std::string_view::npos) url.query = std::string(tail.substr(q + 1));
    return url;
}

bool is_ipv4_literal(std::string_view host) {
    std::array<int, 4> octets{};
    return parse_octets(host, octets);
}

bool is_loopback_host(std::string_view host) {
    std::array<int, 4> octets{};
    if (parse_octets(host, octets)) return octets[0] == 127;
    return lower(host) == "localhost";
}

bool is_private_ipv4(std::string_view host) {
    std::array<int, 4> o{};
    if (!parse_octets(host, o)) return false;
    return o[0] == 10 || (o[0] == 172 && o[1] >= 16 && o[1] <= 31) || (o[0] == 192 && o[1] == 168);
}

std::string percent_encode(std::string_view text) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(text.size());
    for (unsigned char c : text) {
        if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0x0f];
        }
    }
    return out;
}

std::string percent_decode(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '+') {
            out += ' ';
        } else if (text[i] == '%' && i + 2 < text.size() &&
                   std::isxdigit(static_cast<unsigned char>(text[i + 1])) &&
                   std::isxdigit(static_cast<unsigned char>(text[i + 2]))) {
            int value = 0;
            std::from_chars(text.data() + i + 1, text.data() + i + 3, value, 16);
            out += static_cast<char>(value);
            i += 2;
        } else {
            out += text[i];
        }
    }
    return out;
}

}  // namespace routeraudit
