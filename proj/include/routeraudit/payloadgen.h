#pragma once

#include "routeraudit/error.h"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace routeraudit {

// Auto-submitting cross-site request page.
struct CsrfSpec {
    std::string action_url;
    std::string method = "POST";
    std::vector<std::pair<std::string, std::string>> fields;
};

struct PixelBox {
    int top = 0;
    int left = 0;
    int width = 0;
    int height = 0;
};

struct DecoyItem {
    std::string label;
    std::string image_ref;
};

struct ButtonOverlay {
    int top = 0;
    int left = 0;
    std::string label;
};

// Drag-and-drop UI-redressing page: draggable decoys drop `drop_value` into
// fields of an invisible framed page through pointer-transparent boxes.
struct RedressSpec {
    std::string frame_url;
    std::string drop_value;
    std::vector<DecoyItem> decoy_items;
    std::vector<PixelBox> overlay_boxes;
    ButtonOverlay button_overlay;
    PixelBox frame_box{0, 0, 800, 600};
};

// Named-window rebinding: the lure opens the admin UI into a named window,
// the rebind page later navigates that window to `evil_url`.
struct TabjackSpec {
    std::string admin_url;
    std::string window_name;
    std::string evil_url;
};

struct TabjackPages {
    std::string lure_html;
    std::string rebind_html;
};

// All generators throw SpecError on invalid input.
std::string gen_csrf_page(const CsrfSpec& spec);
std::string gen_uiredress_page(const RedressSpec& spec);
TabjackPages gen_tabjack_pages(const TabjackSpec& spec);

// JavaScript single-quoted string literal contents; every character outside
// a conservative safe set becomes \uXXXX. Input must be valid UTF-8.
std::string js_string_escape(std::string_view utf8);

CsrfSpec csrf_spec_from_json(std::string_view json_text);
RedressSpec redress_spec_from_json(std::string_view json_text);
TabjackSpec tabjack_spec_from_json(std::string_view json_text);

}  // namespace routeraudit
