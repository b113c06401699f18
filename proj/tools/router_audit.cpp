// router-audit: discovery, fingerprinting, auditing and payload generation
// for home-router admin interfaces.

#include "routeraudit/discovery.h"
#include "routeraudit/fingerprint.h"
#include "routeraudit/mockfleet.h"
#include "routeraudit/payloadgen.h"
#include "routeraudit/report.h"
#include "routeraudit/scan.h"
#include "routeraudit/signature_db.h"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace routeraudit;

namespace {

constexpr int kExitClean = 0;
constexpr int kExitVulnerable = 1;
constexpr int kExitUsage = 2;
constexpr int kExitUnreachable = 3;
constexpr int kExitUnidentified = 4;

struct CommonOptions {
    std::string db_path;
    int timeout_ms = 2000;
};

SignatureDatabase load_db(const CommonOptions& common) {
    std::string path = common.db_path;
    if (path.empty()) {
        if (const char* env = std::getenv("ROUTER_AUDIT_DB"); env && *env) path = env;
    }
    if (path.empty()) return bundled_signatures();
    return load_signatures_file(path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << contents;
    if (!out) throw Error("cannot write " + path.string());
}

bool lab_allowed(const Url& url) { return is_loopback_host(url.host) || is_private_ipv4(url.host); }

struct ScanArgs {
    std::vector<std::string> urls;
    std::string mode = "passive";
    std::string format = "json";
    std::string out;
    std::string fleet;
    int parallel = 4;
    bool own_network = false;
};

int cmd_scan(const CommonOptions& common, const ScanArgs& args) {
    auto mode = policy_mode_from_string(args.mode);
    if (!mode) {
        std::cerr << "error: --mode must be passive, active or lab\n";
        return kExitUsage;
    }
    auto format = report_format_from_string(args.format);
    if (!format) {
        std::cerr << "error: --format must be json or text\n";
        return kExitUsage;
    }
    if (args.parallel < 1 || common.timeout_ms < 1) {
        std::cerr << "error: --parallel and --timeout-ms must be positive\n";
        return kExitUsage;
    }
    SignatureDatabase db = load_db(common);

    std::unique_ptr<MockFleet> fleet;
    std::vector<AuditTarget> targets;
    if (!args.fleet.empty()) {
        fleet = start_fleet(load_fleet_config_file(args.fleet, db));
        for (const auto& id : fleet->device_ids()) targets.push_back(fleet->target(id));
    }
    if (!args.urls.empty()) {
        for (const auto& text : args.urls) targets.push_back({parse_url(text).with_path("/"), std::nullopt, {}});
    } else if (!fleet) {
        for (const auto& candidate : candidate_set(db, {})) targets.push_back({candidate.base_url, std::nullopt, {}});
    }
    if (*mode == PolicyMode::Lab && !args.own_network) {
        for (const auto& target : targets) {
            if (!lab_allowed(target.base_url)) {
                std::cerr << "error: lab mode refuses " << target.base_url.to_string()
                          << " (not loopback or RFC 1918); pass --i-own-this-network to override\n";
                return kExitUsage;
            }
        }
    }

    ScanOptions options;
    options.policy.mode = *mode;
    options.policy.timeout = std::chrono::milliseconds(common.timeout_ms);
    options.parallelism = args.parallel;
    HttpTransport transport;
    Report report = run_scan(transport, targets, db, options);
    if (fleet) fleet->stop();

    std::string rendered = render_report(report, *format);
    if (args.out.empty()) {
        std::cout << rendered;
    } else {
        write_file(args.out, rendered);
    }
    if (all_unreachable(report)) return kExitUnreachable;
    return has_vulnerable(report) ? kExitVulnerable : kExitClean;
}

int cmd_fingerprint(const CommonOptions& common, const std::string& target) {
    Url url;
    try {
        url = parse_url(target).with_path("/");
    } catch (const UrlError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    SignatureDatabase db = load_db(common);
    HttpTransport transport;
    FingerprintDecision decision = fingerprint(transport, url, db, std::chrono::milliseconds(common.timeout_ms));
    std::cout << "target: " << url.to_string() << "\n";
    std::cout << "matched: " << decision.matched_id.value_or("unidentified") << "\n";
    std::cout << "confidence: " << to_string(decision.confidence) << "\n";
    std::cout << "probes_used: " << decision.probes_used << "\n";
    for (const auto& item : decision.evidence) {
        std::cout << "evidence: " << (item.probe.method.empty() ? "-" : item.probe.method) << " " << item.probe.url
                  << " " << (item.probe.status_code ? std::to_string(*item.probe.status_code) : "-") << " "
                  << item.reason << "\n";
    }
    return decision.confidence == Confidence::Exact ? kExitClean : kExitUnidentified;
}

int cmd_gen_payload(const std::string& kind, const std::string& spec_path, const std::string& out_dir) {
    if (out_dir.empty()) {
        std::cerr << "error: --out is required\n";
        return kExitUsage;
    }
    std::string text = read_file(spec_path);
    std::vector<std::pair<std::string, std::string>> files;
    if (kind == "csrf") {
        files.emplace_back("csrf.html", gen_csrf_page(csrf_spec_from_json(text)));
    } else if (kind == "redress") {
        files.emplace_back("redress.html", gen_uiredress_page(redress_spec_from_json(text)));
    } else {
        TabjackPages pages = gen_tabjack_pages(tabjack_spec_from_json(text));
        files.emplace_back("tabjack_lure.html", pages.lure_html);
        files.emplace_back("tabjack_rebind.html", pages.rebind_html);
    }
    fs::create_directories(out_dir);
    for (const auto& [name, contents] : files) {
        fs::path path = fs::path(out_dir) / name;
        write_file(path, contents);
        std::cout << path.string() << "\n";
    }
    return kExitClean;
}

int cmd_mock_fleet(const CommonOptions& common, const std::string& fleet_path, int duration_ms) {
    SignatureDatabase db = load_db(common);
    auto specs = fleet_path.empty() ? load_fleet_config(bundled_fleet_json(), db)
                                    : load_fleet_config_file(fleet_path, db);

    // Block the shutdown signals before any server thread exists, then wait
    // for them synchronously.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    std::unique_ptr<MockFleet> fleet;
    try {
        fleet = start_fleet(std::move(specs));
    } catch (const FleetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    for (const auto& id : fleet->device_ids()) {
        std::cout << id << " " << fleet->base_url(id).to_string();
        if (auto https = fleet->https_url(id)) std::cout << " " << https->to_string();
        std::cout << "\n";
    }
    std::cout << std::flush;

    if (duration_ms > 0) {
        timespec wait{duration_ms / 1000, static_cast<long>(duration_ms % 1000) * 1000000L};
        sigtimedwait(&signals, nullptr, &wait);
    } else {
        int received = 0;
        sigwait(&signals, &received);
    }
    fleet->stop();
    return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Audit home-router admin interfaces: discover, fingerprint, check, generate payloads."};
    app.set_version_flag("--version", std::string(tool_version()));
    app.require_subcommand(1);

    CommonOptions common;
    app.add_option("--db", common.db_path, "signature database (default: bundled; env ROUTER_AUDIT_DB)");
    app.add_option("--timeout-ms", common.timeout_ms, "per-request timeout in milliseconds");

    ScanArgs scan_args;
    auto* scan = app.add_subcommand("scan", "discover, fingerprint and audit targets");
    scan->add_option("targets", scan_args.urls, "target base URLs (default: gateway addresses from the database)");
    scan->add_option("--mode", scan_args.mode, "passive | active | lab");
    scan->add_option("--format", scan_args.format, "json | text");
    scan->add_option("--out", scan_args.out, "write the report here instead of stdout");
    scan->add_option("--fleet", scan_args.fleet, "start a mock fleet from this config and scan it");
    scan->add_option("--parallel", scan_args.parallel, "targets scanned concurrently");
    scan->add_flag("--i-own-this-network", scan_args.own_network, "allow lab mode against public addresses");
    scan->add_option("--db", common.db_path, "signature database");
    scan->add_option("--timeout-ms", common.timeout_ms, "per-request timeout in milliseconds");

    std::string fp_target;
    auto* fp = app.add_subcommand("fingerprint", "identify one target");
    fp->add_option("target", fp_target, "target base URL")->required();
    fp->add_option("--db", common.db_path, "signature database");
    fp->add_option("--timeout-ms", common.timeout_ms, "per-request timeout in milliseconds");

    std::string payload_kind, payload_spec, payload_out;
    auto* gen = app.add_subcommand("gen-payload", "write proof-of-concept pages");
    gen->add_option("kind", payload_kind, "csrf | redress | tabjack")
        ->required()
        ->check(CLI::IsMember({"csrf", "redress", "tabjack"}));
    gen->add_option("--spec", payload_spec, "payload spec JSON")->required();
    gen->add_option("--out", payload_out, "output directory");

    std::string fleet_path;
    int duration_ms = 0;
    auto* mock = app.add_subcommand("mock-fleet", "serve emulated routers on loopback until interrupted");
    mock->add_option("--fleet", fleet_path, "fleet config (default: bundled)");
    mock->add_option("--duration-ms", duration_ms, "stop after this long instead of waiting for a signal");
    mock->add_option("--db", common.db_path, "signature database");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (scan->parsed()) return cmd_scan(common, scan_args);
        if (fp->parsed()) return cmd_fingerprint(common, fp_target);
        if (gen->parsed()) return cmd_gen_payload(payload_kind, payload_spec, payload_out);
        if (mock->parsed()) return cmd_mock_fleet(common, fleet_path, duration_ms);
    } catch (const DatabaseError& e) {
        std::cerr << "error: signature database: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
