// Test-side helpers: a scripted transport and parse-back checkers for the
// generated payload pages. The checkers only read the HTML; they share no
// code with the generators.
#pragma once

#include "routeraudit/html.h"
#include "routeraudit/http.h"
#include "routeraudit/payloadgen.h"

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <regex>
#include <string>
#include <vector>

namespace testsupport {

using namespace routeraudit;

struct CannedResponse {
    int status = 200;
    Headers headers;
    std::string body;
};

// Answers from a table keyed by "METHOD path?query"; unknown keys get
// `fallback`, or a connection failure when it is unset.
class ScriptedTransport final : public Transport {
public:
    std::map<std::string, CannedResponse> routes;
    std::optional<CannedResponse> fallback;

    HttpExchange send(const HttpRequest& request, std::chrono::milliseconds) override {
        std::lock_guard lock(mutex_);
        requests.push_back(request);
        HttpExchange out;
        out.probe.url = request.url.to_string();
        out.probe.method = request.method;
        auto it = routes.find(request.method + " " + request.url.path_and_query());
        const CannedResponse* canned = it != routes.end() ? &it->second : fallback ? &*fallback : nullptr;
        if (!canned) {
            out.probe.error = "connection failed";
            return out;
        }
        out.probe.status_code = canned->status;
        out.probe.headers = canned->headers;
        out.body = canned->body;
        out.probe.body_digest = sha256_hex(out.body);
        out.probe.body_excerpt = out.body.substr(0, kBodyExcerptBytes);
        return out;
    }

    std::vector<HttpRequest> requests;

private:
    std::mutex mutex_;
};

inline std::optional<unsigned> hex4(std::string_view text, std::size_t at) {
    if (at + 4 > text.size()) return std::nullopt;
    unsigned value = 0;
    for (std::size_t k = at; k < at + 4; ++k) {
        char h = text[k];
        if (!std::isxdigit(static_cast<unsigned char>(h))) return std::nullopt;
        value = value * 16 + static_cast<unsigned>(std::isdigit(static_cast<unsigned char>(h)) ? h - '0'
                                                                                               : (h | 0x20) - 'a' + 10);
    }
    return value;
}

inline void put_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

// Undoes a JavaScript single-quoted literal body that uses only \uXXXX
// escapes. nullopt when the literal would end early (an unescaped quote),
// carries a raw line break, or holds any other backslash sequence.
inline std::optional<std::string> decode_js_literal(std::string_view body) {
    std::string out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        char c = body[i];
        if (c == '\'' || c == '\n' || c == '\r') return std::nullopt;
        if (c != '\\') {
            out += c;
            continue;
        }
        if (i + 1 >= body.size() || body[i + 1] != 'u') return std::nullopt;
        auto high = hex4(body, i + 2);
        if (!high) return std::nullopt;
        i += 5;
        if (*high >= 0xD800 && *high <= 0xDBFF) {
            if (i + 2 >= body.size() || body[i + 1] != '\\' || body[i + 2] != 'u') return std::nullopt;
            auto low = hex4(body, i + 3);
            if (!low || *low < 0xDC00 || *low > 0xDFFF) return std::nullopt;
            i += 6;
            put_utf8(out, 0x10000 + ((*high - 0xD800) << 10) + (*low - 0xDC00));
        } else {
            put_utf8(out, *high);
        }
    }
    return out;
}

struct CheckResult {
    bool ok = true;
    std::string problem;
    void fail(std::string why) {
        if (ok) problem = std::move(why);
        ok = false;
    }
};

inline std::vector<html::Token> start_tags(const std::vector<html::Token>& tokens, std::string_view name) {
    std::vector<html::Token> out;
    for (const auto& token : tokens) {
        if (token.kind == html::Token::Kind::StartTag && token.name == name) out.push_back(token);
    }
    return out;
}

// Event-handler attributes and script elements anywhere in the document.
inline int count_script_surfaces(const std::vector<html::Token>& tokens) {
    int count = 0;
    for (const auto& token : tokens) {
        if (token.kind != html::Token::Kind::StartTag) continue;
        if (token.name == "script") ++count;
        for (const auto& attribute : token.attributes) {
            if (attribute.name.starts_with("on")) ++count;
        }
    }
    return count;
}

inline std::string style_text(const std::vector<html::Token>& tokens) {
    std::string out;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (tokens[i].kind == html::Token::Kind::StartTag && tokens[i].name == "style") out += tokens[i + 1].text;
    }
    return out;
}

// Declarations of the first CSS rule whose selector list names `element`.
inline std::optional<std::string> css_rule_for(const std::string& css, const std::string& element) {
    std::regex rule(R"(([^{}]+)\{([^}]*)\})");
    for (auto it = std::sregex_iterator(css.begin(), css.end(), rule); it != std::sregex_iterator(); ++it) {
        std::string selectors = (*it)[1];
        std::regex name("(^|[\\s,])" + element + "($|[\\s,])");
        if (std::regex_search(selectors, name)) return (*it)[2];
    }
    return std::nullopt;
}

inline std::string strip_spaces(std::string text) {
    std::erase_if(text, [](char c) { return c == ' ' || c == '\n' || c == '\t'; });
    return text;
}

inline std::string box_style(const PixelBox& box) {
    return "top:" + std::to_string(box.top) + "px;left:" + std::to_string(box.left) + "px;width:" +
           std::to_string(box.width) + "px;height:" + std::to_string(box.height) + "px";
}

// The four structural properties of a drag-and-drop redressing page, read
// back through the tokenizer.
struct RedressChecks {
    CheckResult overlays;
    CheckResult decoys;
    CheckResult button;
    CheckResult iframe;
    CheckResult no_breakout;
    bool all() const { return overlays.ok && decoys.ok && button.ok && iframe.ok && no_breakout.ok; }
};

inline RedressChecks check_redress_page(const std::string& page, const RedressSpec& spec) {
    RedressChecks r;
    auto tokens = html::tokenize(page);
    std::string problem;
    if (!html::is_well_formed(page, &problem)) r.no_breakout.fail("not well formed: " + problem);

    // Overlays: absolute, positive z-index, transparent to the pointer.
    std::string css = style_text(tokens);
    for (const char* element : {"div", "button"}) {
        auto rule = css_rule_for(css, element);
        if (!rule) {
            r.overlays.fail(std::string("no CSS rule for ") + element);
            continue;
        }
        std::string decl = strip_spaces(*rule);
        std::smatch z;
        if (decl.find("position:absolute") == std::string::npos) r.overlays.fail("overlay not absolute");
        if (decl.find("pointer-events:none") == std::string::npos) r.overlays.fail("overlay catches the pointer");
        if (!std::regex_search(decl, z, std::regex("z-index:(-?\\d+)")) || std::stoi(z[1]) <= 0) {
            r.overlays.fail("overlay z-index not positive");
        }
    }
    auto divs = start_tags(tokens, "div");
    if (divs.size() != spec.overlay_boxes.size()) r.overlays.fail("overlay box count differs");
    for (std::size_t i = 0; i < divs.size() && i < spec.overlay_boxes.size(); ++i) {
        if (strip_spaces(divs[i].attr("style").value_or("")) != box_style(spec.overlay_boxes[i])) {
            r.overlays.fail("overlay box " + std::to_string(i) + " misplaced");
        }
    }

    // Decoys: draggable, drop value exactly recoverable from the handler.
    std::vector<html::Token> draggables;
    for (const auto& img : start_tags(tokens, "img")) {
        if (img.attr("draggable") == "true") draggables.push_back(img);
    }
    if (draggables.size() != spec.decoy_items.size()) r.decoys.fail("draggable decoy count differs");
    static const std::regex handler(R"(^event\.dataTransfer\.setData\('text/plain', '([^']*)'\)$)");
    for (std::size_t i = 0; i < draggables.size() && i < spec.decoy_items.size(); ++i) {
        std::string code = draggables[i].attr("ondragstart").value_or("");
        std::smatch m;
        if (!std::regex_match(code, m, handler)) {
            r.decoys.fail("ondragstart is not a single setData call: " + code);
            continue;
        }
        auto value = decode_js_literal(m[1].str());
        if (value != spec.drop_value) r.decoys.fail("drop value not recovered");
        if (draggables[i].attr("src") != spec.decoy_items[i].image_ref) r.decoys.fail("decoy image differs");
        if (draggables[i].attr("alt") != spec.decoy_items[i].label) r.decoys.fail("decoy label differs");
    }

    // Button overlay at the configured offsets with its label as text.
    auto buttons = start_tags(tokens, "button");
    if (buttons.size() != 1) {
        r.button.fail("expected exactly one button");
    } else {
        std::string expected = "top:" + std::to_string(spec.button_overlay.top) + "px;left:" +
                               std::to_string(spec.button_overlay.left) + "px";
        if (strip_spaces(buttons[0].attr("style").value_or("")) != expected) r.button.fail("button misplaced");
        std::string label;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (tokens[i].kind == html::Token::Kind::StartTag && tokens[i].name == "button") {
                for (std::size_t k = i + 1; k < tokens.size() && tokens[k].kind == html::Token::Kind::Text; ++k) {
                    label += tokens[k].text;
                }
            }
        }
        if (label != spec.button_overlay.label) r.button.fail("button label differs");
    }

    // Exactly one iframe, pointing at the target.
    auto frames = start_tags(tokens, "iframe");
    if (frames.size() != 1 || frames[0].attr("src") != spec.frame_url) r.iframe.fail("iframe does not target the spec URL");

    if (count_script_surfaces(tokens) != static_cast<int>(spec.decoy_items.size())) {
        r.no_breakout.fail("unexpected script surface");
    }
    return r;
}

struct TabjackChecks {
    CheckResult lure;
    CheckResult rebind;
    bool all() const { return lure.ok && rebind.ok; }
};

inline TabjackChecks check_tabjack_pages(const TabjackPages& pages, const TabjackSpec& spec) {
    TabjackChecks r;
    auto lure = html::tokenize(pages.lure_html);
    auto anchors = start_tags(lure, "a");
    if (anchors.size() != 1) {
        r.lure.fail("expected one anchor");
    } else {
        if (anchors[0].attr("href") != spec.admin_url) r.lure.fail("lure href differs");
        if (anchors[0].attr("target") != spec.window_name) r.lure.fail("lure target differs");
    }
    if (count_script_surfaces(lure) != 0) r.lure.fail("lure carries script");
    if (!html::is_well_formed(pages.lure_html)) r.lure.fail("lure not well formed");

    auto rebind = html::tokenize(pages.rebind_html);
    auto links = start_tags(rebind, "a");
    static const std::regex call(R"(^window\.open\('([^']*)', '([^']*)'\); return false;$)");
    if (links.size() != 1) {
        r.rebind.fail("expected one anchor");
    } else {
        std::smatch m;
        std::string code = links[0].attr("onclick").value_or("");
        if (links[0].attr("href") != "#") r.rebind.fail("rebind href is not #");
        if (!std::regex_match(code, m, call)) {
            r.rebind.fail("onclick is not a single window.open call: " + code);
        } else {
            if (decode_js_literal(m[1].str()) != spec.evil_url) r.rebind.fail("rebind URL not recovered");
            if (decode_js_literal(m[2].str()) != spec.window_name) r.rebind.fail("window name not recovered");
        }
    }
    if (count_script_surfaces(rebind) != 1) r.rebind.fail("unexpected script surface");
    if (!html::is_well_formed(pages.rebind_html)) r.rebind.fail("rebind not well formed");
    return r;
}

// Strings dense in HTML, CSS, JS and URL metacharacters. Every case is valid
// UTF-8; `url_safe` drops whitespace and controls so the text fits in a URL.
inline std::vector<std::string> metachar_corpus(std::size_t count, bool url_safe = false, unsigned seed = 20121) {
    static const std::vector<std::string> pieces = {
        "<", ">", "\"", "'", "&", "\\", "/", ";", "`", "${", "}", "(", ")", "=", "#", "%", "+", "?",
        "</script>", "</style>", "<!--", "-->", "]]>", "<img src=x onerror=alert(1)>", "javascript:", "&amp;",
        "&#39;", "\\u0027", "\\'", "')", "');alert(1);//", "\" onmouseover=\"x", "é", " ", " ",
        "\U0001F431", " ", "a", "Z", "0", " ", "\t", "\n", "\r\n", "\x01", "*/", "/*", "{}", "@import",
        "expression(", "%27", "%3C", "\xc2\x85"};
    std::mt19937 rng(seed);
    std::vector<std::string> out;
    while (out.size() < count) {
        std::string text;
        std::size_t n = 1 + rng() % 8;
        for (std::size_t i = 0; i < n; ++i) {
            const std::string& piece = pieces[rng() % pieces.size()];
            if (url_safe && std::any_of(piece.begin(), piece.end(), [](char c) {
                    return static_cast<unsigned char>(c) <= 0x20 || c == 0x7f;
                })) {
                continue;
            }
            text += piece;
        }
        if (text.empty()) text = "x";
        out.push_back(text);
    }
    return out;
}

}  // namespace testsupport
