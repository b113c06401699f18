// Acceptance run over the bundled signature database and mock fleet. Prints
// one PASS/FAIL line per criterion and exits non-zero if any failed.

#include "routeraudit/fingerprint.h"
#include "routeraudit/html.h"
#include "routeraudit/mockfleet.h"
#include "routeraudit/payloadgen.h"
#include "routeraudit/report.h"
#include "routeraudit/scan.h"
#include "routeraudit/signature_db.h"

#include "support.h"

#include <json.hpp>

#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace routeraudit;
using namespace std::chrono_literals;

namespace {

struct Outcome {
    std::vector<std::string> problems;
    std::string detail;

    void expect(bool ok, const std::string& problem) {
        if (!ok) problems.push_back(problem);
    }
};

std::unique_ptr<MockFleet> fleet() {
    return start_fleet(load_fleet_config(bundled_fleet_json(), bundled_signatures()));
}

Report lab_scan(MockFleet& f, PolicyMode mode, Transport& transport) {
    std::vector<AuditTarget> targets;
    for (const auto& id : f.device_ids()) targets.push_back(f.target(id));
    ScanOptions options;
    options.policy.mode = mode;
    return run_scan(transport, targets, bundled_signatures(), options);
}

const AuditFinding* finding(const TargetReport& target, CheckId id) {
    for (const auto& f : target.findings) {
        if (f.check_id == id) return &f;
    }
    return nullptr;
}

std::set<std::string> vulnerable(const Report& report, CheckId id) {
    std::set<std::string> out;
    for (const auto& target : report.targets) {
        const auto* f = finding(target, id);
        if (f && f->status == FindingStatus::Vulnerable) out.insert(target.fingerprint.matched_id.value_or(target.base_url));
    }
    return out;
}

std::string join(const std::set<std::string>& items) {
    std::string out;
    for (const auto& item : items) out += (out.empty() ? "" : ",") + item;
    return "{" + out + "}";
}

Outcome identification() {
    Outcome o;
    auto f = fleet();
    HttpTransport http;
    auto start = std::chrono::steady_clock::now();
    int correct = 0;
    int worst = 0;
    for (const auto& id : f->device_ids()) {
        auto decision = fingerprint(http, f->base_url(id), bundled_signatures(), 2000ms);
        if (decision.matched_id == id && decision.confidence == Confidence::Exact) ++correct;
        else o.problems.push_back(id + " identified as " + decision.matched_id.value_or("nothing"));
        worst = std::max(worst, decision.probes_used);
    }
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    o.expect(correct == 10, "identified " + std::to_string(correct) + "/10");
    o.expect(worst <= 9, "more than nine probes");
    o.expect(worst <= 4, "more than four probes");
    o.expect(elapsed < 5s, "took " + std::to_string(elapsed.count()) + " ms");
    o.detail = std::to_string(correct) + "/10 identified, max probes " + std::to_string(worst) + ", " +
               std::to_string(elapsed.count()) + " ms";
    return o;
}

Outcome credentials() {
    Outcome o;
    auto f = fleet();
    HttpTransport http;
    Report base = lab_scan(*f, PolicyMode::Lab, http);
    auto hits = vulnerable(base, CheckId::DefaultCredentials);
    o.expect(hits.size() == 10, "DefaultCredentials vulnerable on " + join(hits));
    for (const auto& target : base.targets) {
        if (target.fingerprint.matched_id != "fritzbox-2170") continue;
        const auto* fritz = finding(target, CheckId::DefaultCredentials);
        o.expect(fritz && fritz->description.find("no authentication required") != std::string::npos,
                 "Fritz!Box description lacks 'no authentication required'");
    }
    int flipped = 0;
    for (const auto& id : f->device_ids()) {
        f->override_credentials(id, {std::string("owner"), std::string("N0t-Default!")});
        Report after = lab_scan(*f, PolicyMode::ActiveSafe, http);
        f->clear_credential_override(id);
        auto still = vulnerable(after, CheckId::DefaultCredentials);
        std::set<std::string> expected = hits;
        expected.erase(id);
        if (still == expected) ++flipped;
        else o.problems.push_back("override of " + id + " left " + join(still));
    }
    o.detail = std::to_string(hits.size()) + "/10 vulnerable, " + std::to_string(flipped) + "/10 overrides flip exactly one";
    return o;
}

Outcome statistics() {
    Outcome o;
    auto s = db_stats(bundled_signatures());
    o.expect(s.admin_valued_fields == 11, "admin_valued_fields " + std::to_string(s.admin_valued_fields));
    o.expect(s.total_credential_fields == 20, "total_credential_fields " + std::to_string(s.total_credential_fields));
    o.expect(s.basic_auth_count == 6, "basic_auth_count " + std::to_string(s.basic_auth_count));
    o.expect(s.web_form_count == 4, "web_form_count " + std::to_string(s.web_form_count));
    o.expect(s.distinct_gateway_ips == 5, "distinct_gateway_ips " + std::to_string(s.distinct_gateway_ips));
    std::ostringstream detail;
    detail << s.admin_valued_fields << "/" << s.total_credential_fields << " admin, " << s.basic_auth_count
           << " basic, " << s.web_form_count << " web, " << s.distinct_gateway_ips << " gateways";
    o.detail = detail.str();
    return o;
}

Outcome vulnerability_table() {
    Outcome o;
    auto f = fleet();
    HttpTransport http;
    Report report = lab_scan(*f, PolicyMode::Lab, http);
    auto frames = vulnerable(report, CheckId::FrameOptionsMissing);
    auto reflected = vulnerable(report, CheckId::ReflectedXss);
    auto stored = vulnerable(report, CheckId::StoredXss);
    auto tls_absent = vulnerable(report, CheckId::TlsAbsent);
    auto tls_invalid = vulnerable(report, CheckId::TlsInvalidCert);
    o.expect(frames.size() == 10, "FrameOptionsMissing " + join(frames));
    o.expect(reflected == std::set<std::string>{"logilink-wl0083", "buffalo-wcr-gn", "asus-rt-n12"},
             "ReflectedXss " + join(reflected));
    o.expect(stored == std::set<std::string>{"tplink-wr841n", "netgear-n150", "dlink-dir615", "linksys-wrt54gl",
                                             "belkin-f7d4301"},
             "StoredXss " + join(stored));
    o.expect(tls_absent.size() == 8 && !tls_absent.contains("huawei-e5331") && !tls_absent.contains("linksys-wrt54gl"),
             "TlsAbsent " + join(tls_absent));
    o.expect(tls_invalid == std::set<std::string>{"huawei-e5331", "linksys-wrt54gl"}, "TlsInvalidCert " + join(tls_invalid));
    bool huawei_ok = false;
    for (const auto& target : report.targets) {
        if (target.fingerprint.matched_id != "huawei-e5331") continue;
        const auto* tls = finding(target, CheckId::TlsInvalidCert);
        if (!tls) continue;
        for (const auto& probe : tls->evidence) {
            if (probe.tls_info && probe.tls_info->expired_at_scan &&
                probe.tls_info->cert_subject.find("ipwebs.interpeak.com") != std::string::npos) {
                huawei_ok = true;
            }
        }
    }
    o.expect(huawei_ok, "Huawei evidence lacks an expired ipwebs.interpeak.com certificate");
    o.detail = "frames " + std::to_string(frames.size()) + ", reflected " + join(reflected) + ", stored " +
               std::to_string(stored.size()) + ", tls absent " + std::to_string(tls_absent.size()) + ", tls invalid " +
               join(tls_invalid);
    return o;
}

Outcome csrf_replay() {
    Outcome o;
    auto f = fleet();
    CsrfSpec spec{"http://192.168.0.1/tools_system.htm", "POST", {{"page", "tools_system"}, {"submitType", "3"}}};
    auto forms = html::parse_forms(gen_csrf_page(spec));
    if (forms.size() != 1) {
        o.problems.push_back("generated page has " + std::to_string(forms.size()) + " forms");
        return o;
    }
    const auto& form = forms[0];
    // Send the form where the victim's browser would: the gateway address,
    // here served by the mock D-Link.
    Url action = parse_url(form.action);
    Url target = f->base_url("dlink-dir615").with_path(action.path_and_query());
    std::vector<std::pair<std::string, std::string>> fields;
    for (const auto& input : form.inputs) fields.emplace_back(input.name, input.value);

    HttpRequest request;
    request.method = form.method;
    request.url = target;
    request.body = form_urlencode(fields);
    request.content_type = "application/x-www-form-urlencoded";
    int before = f->state("dlink-dir615").reboot_count;
    HttpTransport http;
    auto response = http.send(request, 2000ms);
    int after = f->state("dlink-dir615").reboot_count;
    o.expect(action.host == "192.168.0.1", "form action host is " + action.host);
    o.expect(response.probe.status_code == 200, "replay answered " + std::to_string(response.probe.status_code.value_or(0)));
    o.expect(before == 0 && after == 1, "reboot_count " + std::to_string(before) + " -> " + std::to_string(after));
    o.detail = "reboot_count " + std::to_string(before) + " -> " + std::to_string(after);
    return o;
}

Outcome payload_structure() {
    Outcome o;
    RedressSpec redress;
    redress.frame_url = "http://192.168.178.1/cgi-bin/webcm?getpage=../html/de/menus/menu2.html";
    redress.drop_value = "foobar";
    redress.decoy_items = {{"Tired", "kitten1.jpg"}, {"Curious", "kitten2.jpg"}, {"Sleepy", "kitten3.jpg"}};
    redress.overlay_boxes = {{35, 300, 120, 30}, {85, 300, 120, 30}, {135, 300, 120, 30}};
    redress.button_overlay = {195, 425, "More kittens"};
    TabjackSpec tabjack{"http://192.168.178.1/", "routeradmin", "http://attacker.example/fake-login"};

    auto report = [&](const std::string& label, const testsupport::CheckResult& r) {
        if (!r.ok) o.problems.push_back(label + ": " + r.problem);
    };
    auto base = testsupport::check_redress_page(gen_uiredress_page(redress), redress);
    report("overlays", base.overlays);
    report("decoys", base.decoys);
    report("button", base.button);
    report("iframe", base.iframe);
    report("breakout", base.no_breakout);
    auto tj = testsupport::check_tabjack_pages(gen_tabjack_pages(tabjack), tabjack);
    report("lure", tj.lure);
    report("rebind", tj.rebind);

    auto corpus = testsupport::metachar_corpus(200, false, 7);
    auto urls = testsupport::metachar_corpus(200, true, 8);
    int passed = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        RedressSpec spec = redress;
        spec.drop_value = corpus[i];
        spec.decoy_items[0].label = corpus[(i + 1) % corpus.size()];
        spec.decoy_items[1].image_ref = corpus[(i + 2) % corpus.size()];
        spec.button_overlay.label = corpus[(i + 3) % corpus.size()];
        spec.frame_url = "http://192.168.178.1/x?q=" + urls[i];
        TabjackSpec t{"http://192.168.0.1/?a=" + urls[i], "w" + corpus[i],
                      "http://evil.example/?p=" + urls[(i + 5) % urls.size()]};
        bool ok = false;
        try {
            ok = testsupport::check_redress_page(gen_uiredress_page(spec), spec).all() &&
                 testsupport::check_tabjack_pages(gen_tabjack_pages(t), t).all();
        } catch (const std::exception& e) {
            o.problems.push_back("case " + std::to_string(i) + " threw: " + e.what());
        }
        if (ok) ++passed;
    }
    o.expect(passed == 200, "fuzz passed " + std::to_string(passed) + "/200");
    o.detail = "structural checks ok, fuzz " + std::to_string(passed) + "/200";
    return o;
}

Outcome cross_uniqueness() {
    Outcome o;
    auto f = fleet();
    const auto& db = bundled_signatures();
    HttpTransport http;
    int pairs = 0;
    int clean = 0;
    for (const auto& i : f->device_ids()) {
        for (const auto& j : f->device_ids()) {
            if (i == j) continue;
            ++pairs;
            bool ok = true;
            for (const auto& path : db.at(j).unique_resources) {
                HttpRequest request;
                request.url = f->base_url(i).with_path(path);
                auto probe = http.send(request, 2000ms).probe;
                if (!probe.responded() || *probe.status_code == 200) {
                    ok = false;
                    o.problems.push_back(i + " answers " + path + " of " + j);
                }
            }
            if (ok) ++clean;
        }
    }
    o.expect(pairs == 90 && clean == pairs, std::to_string(clean) + "/" + std::to_string(pairs) + " pairs");
    o.detail = std::to_string(clean) + "/" + std::to_string(pairs) + " ordered pairs";
    return o;
}

std::string without_timestamps(const Report& report) {
    auto doc = nlohmann::json::parse(render_report(report, ReportFormat::Json));
    doc.erase("scan_started");
    doc.erase("scan_finished");
    return doc.dump();
}

Outcome determinism() {
    Outcome o;
    auto f = fleet();
    HttpTransport http;
    std::string first = without_timestamps(lab_scan(*f, PolicyMode::Lab, http));
    std::string second = without_timestamps(lab_scan(*f, PolicyMode::Lab, http));
    o.expect(first == second, "two lab scans differ");

    auto g = fleet();
    RecordingTransport recorder(http);
    lab_scan(*g, PolicyMode::Passive, recorder);
    int other = 0;
    for (const auto& entry : recorder.entries()) {
        if (entry.method != "GET" && entry.method != "HEAD") ++other;
    }
    o.expect(other == 0, std::to_string(other) + " non-GET/HEAD requests in passive mode");
    o.expect(!recorder.entries().empty(), "passive scan issued no requests");
    o.detail = "reports " + std::string(first == second ? "identical" : "differ") + " (" +
               std::to_string(first.size()) + " bytes), passive requests " +
               std::to_string(recorder.entries().size()) + " with " + std::to_string(other) + " non-GET/HEAD";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 fingerprint identification", identification},
        {"2 default credential audit", credentials},
        {"3 credential statistics", statistics},
        {"4 vulnerability table", vulnerability_table},
        {"5 csrf replay", csrf_replay},
        {"6 payload structure", payload_structure},
        {"7 cross-uniqueness", cross_uniqueness},
        {"8 determinism and passive safety", determinism},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome outcome;
        try {
            outcome = run();
        } catch (const std::exception& e) {
            outcome.problems.push_back(std::string("threw: ") + e.what());
        }
        bool ok = outcome.problems.empty();
        if (!ok) ++failed;
        std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << outcome.detail << "\n";
        for (const auto& problem : outcome.problems) std::cout << "    " << problem << "\n";
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
