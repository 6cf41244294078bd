// metaforge: command-line front end for template validation, instance checks,
// render plans, quality reports, authority search and the HTTP service.
//
// Exit status: 0 ok, 1 findings (errors, or warnings with --strict-warnings),
// 2 usage, I/O or environment problems.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "metaforge/gateway/gateway.hpp"
#include "metaforge/gateway/live_adapter.hpp"
#include "metaforge/quality_report.hpp"
#include "metaforge/render_plan.hpp"
#include "metaforge/service/server.hpp"

#ifndef METAFORGE_DEFAULT_FIXTURES
#define METAFORGE_DEFAULT_FIXTURES "fixtures"
#endif

namespace mf = metaforge;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kFindings = 1;
constexpr int kUsage = 2;

// Carries an exit status out of a subcommand.
struct Exit {
    int code;
};

struct Options {
    std::string format = "text";
    bool strict_warnings = false;
};

[[noreturn]] void die(const std::string& message) {
    std::cerr << "metaforge: " << message << "\n";
    throw Exit{kUsage};
}

std::string read_or_die(const std::string& path) {
    if (path.empty()) die("missing file argument");
    auto bytes = mf::service::read_file(path);
    if (!bytes) die("cannot read " + path);
    return *bytes;
}

mf::json json_or_die(const std::string& path) {
    auto text = read_or_die(path);
    auto j = mf::json::parse(text, nullptr, false);
    if (j.is_discarded()) die(path + " is not valid JSON");
    return j;
}

mf::Template template_or_die(const std::string& path) {
    auto doc = json_or_die(path);
    auto issues = mf::check_template_document(doc);
    if (mf::has_errors(issues)) {
        for (const auto& i : issues)
            std::cerr << mf::to_string(i.severity) << "\t" << i.code << "\t" << i.path << "\t" << i.message << "\n";
        die(path + " is not a usable template");
    }
    return mf::parse_template(doc);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto end = s.find(',', start);
        if (end == std::string::npos) end = s.size();
        auto part = mf::text::trim(std::string_view(s).substr(start, end - start));
        if (!part.empty()) out.push_back(part);
        start = end + 1;
    }
    return out;
}

bool env_flag(const char* name) {
    const char* v = std::getenv(name);
    return v && std::string(v) == "1";
}

template <class Issue>
void print_issue_text(const Issue& i) {
    std::cout << mf::to_string(i.severity) << "\t" << i.code << "\t" << i.path << "\t" << i.message << "\n";
}

template <class Issue>
int findings_status(const std::vector<Issue>& issues, const Options& opt) {
    for (const auto& i : issues)
        if (i.severity == mf::Severity::error || opt.strict_warnings) return kFindings;
    return kOk;
}

template <class Issue>
int report_issues(const std::vector<Issue>& issues, const Options& opt) {
    if (opt.format == "json") {
        std::cout << mf::json{{"issues", mf::to_json(issues)}}.dump() << "\n";
    } else {
        for (const auto& i : issues) print_issue_text(i);
    }
    return findings_status(issues, opt);
}

struct GatewayArgs {
    bool offline = false;
    std::string fixtures = METAFORGE_DEFAULT_FIXTURES;
    std::string vocabulary;
};

std::shared_ptr<mf::gateway::AuthorityGateway> make_gateway(const GatewayArgs& g) {
    mf::gateway::GatewayConfig cfg;
    cfg.offline = g.offline || env_flag("GATEWAY_OFFLINE");
    fs::path root = g.fixtures;
    if (cfg.offline && !fs::is_directory(root / "gateway"))
        die("offline mode needs recorded payloads under " + (root / "gateway").string());
    auto vocab = g.vocabulary.empty() ? root / "vocabulary" / "terms.json" : fs::path(g.vocabulary);
    mf::gateway::TermIndex terms;
    if (fs::exists(vocab)) terms = mf::gateway::TermIndex::load(vocab);
    else if (!g.vocabulary.empty()) die("cannot read vocabulary " + g.vocabulary);
    // Offline runs get adapters that fail on contact in the live slot, so a
    // routing mistake surfaces instead of reaching the network.
    auto live = cfg.offline ? mf::gateway::fail_on_contact_adapters() : mf::gateway::live_adapters();
    return std::make_shared<mf::gateway::AuthorityGateway>(cfg, std::move(live),
                                                           mf::gateway::fixture_adapters(root / "gateway"),
                                                           std::move(terms));
}

int cmd_validate_template(const std::string& file, const Options& opt) {
    return report_issues(mf::check_template_document(json_or_die(file)), opt);
}

int cmd_validate_instance(const std::string& tfile, const std::string& ifile, bool strict, const Options& opt) {
    auto t = template_or_die(tfile);
    auto doc = json_or_die(ifile);
    mf::ParsedInstance parsed;
    try {
        parsed = mf::parse_instance(t, doc);
    } catch (const mf::Error& e) {
        std::cerr << "error\t" << e.code() << "\t\t" << e.what() << "\n";
        return kUsage;
    }
    auto issues = parsed.warnings;
    auto found = mf::validate_instance(t, parsed.instance, strict);
    issues.insert(issues.end(), found.begin(), found.end());
    std::sort(issues.begin(), issues.end(),
              [](const mf::ValidationIssue& a, const mf::ValidationIssue& b) { return mf::issue_order(a, b); });
    return report_issues(issues, opt);
}

mf::MetadataInstance instance_or_die(const mf::Template& t, const std::string& ifile) {
    if (ifile.empty()) return mf::new_instance(t);
    try {
        return mf::parse_instance(t, json_or_die(ifile)).instance;
    } catch (const mf::Error& e) {
        die(std::string(e.code()) + ": " + e.what());
    }
}

int cmd_render_plan(const std::string& tfile, const std::string& ifile, const std::string& mode_name,
                    const std::string& language) {
    mf::Mode mode;
    try {
        mode = mf::parse_mode(mode_name);
    } catch (const mf::Error& e) {
        die(e.what());
    }
    auto t = template_or_die(tfile);
    auto inst = instance_or_die(t, ifile);
    auto chain = split_list(language);
    if (chain.empty()) chain.push_back("en");
    auto plan = mf::render_plan(t, inst, mode, chain);
    for (const auto& d : plan.diagnostics)
        std::cerr << "label fallback: " << d.path << " requested " << d.fallback.requested_tag << ", served "
                  << (d.fallback.served_key.empty() ? d.fallback.served_tag : "key " + d.fallback.served_key) << "\n";
    std::cout << mf::to_json(plan).dump() << "\n";
    return kOk;
}

int cmd_quality_report(const std::string& tfile, const std::string& ifile, const std::string& ref,
                       const Options& opt) {
    auto t = template_or_die(tfile);
    auto inst = instance_or_die(t, ifile);
    auto report = mf::generate_report(t, inst, ref.empty() ? std::nullopt : std::optional<std::string>(ref));
    if (opt.format == "json") std::cout << mf::to_json(report).dump() << "\n";
    else std::cout << mf::render_report_text(report);
    return kOk;
}

int cmd_search(const GatewayArgs& g, const std::string& source, const std::string& acronym, const std::string& query,
               int limit, bool fail_empty, const Options& opt) {
    if (source.empty() == acronym.empty()) die("search needs exactly one of --source or --acronym");
    auto gw = make_gateway(g);
    mf::json out = mf::json::array();
    std::size_t n = 0;
    try {
        if (!source.empty()) {
            auto hits = gw->search_authority(source, query, limit);
            n = hits.size();
            for (const auto& h : hits) {
                if (opt.format == "json") out.push_back(mf::gateway::to_json(h));
                else std::cout << h.label << "\t" << h.id << "\n";
            }
        } else {
            std::vector<mf::TermSourceSpec> sources;
            for (const auto& a : split_list(acronym)) sources.push_back({mf::TermSourceType::ontology, a, {}, {}});
            auto hits = gw->search_ontology(sources, query, limit);
            n = hits.size();
            for (const auto& h : hits) {
                if (opt.format == "json") out.push_back(mf::gateway::to_json(h));
                else std::cout << h.label << "\t" << h.iri << "\n";
            }
        }
    } catch (const mf::Error& e) {
        die(std::string(e.code()) + ": " + e.what());
    }
    if (opt.format == "json") std::cout << mf::json{{"suggestions", out}}.dump() << "\n";
    return fail_empty && n == 0 ? kFindings : kOk;
}

int cmd_resolve(const GatewayArgs& g, const std::string& source, const std::string& id, const Options& opt) {
    auto gw = make_gateway(g);
    try {
        auto s = gw->resolve_identifier(source, id);
        if (opt.format == "json") std::cout << mf::gateway::to_json(s).dump() << "\n";
        else std::cout << s.label << "\t" << s.id << "\n";
        return kOk;
    } catch (const mf::Error& e) {
        std::cerr << "error\t" << e.code() << "\t\t" << e.what() << "\n";
        if (e.code() == "INVALID_IDENTIFIER" || e.code() == "NOT_FOUND") return kFindings;
        return kUsage;
    }
}

struct ServeArgs {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string data_dir;
    std::vector<std::string> cors;
    std::string token;
};

int cmd_serve(const GatewayArgs& g, ServeArgs s) {
    if (s.data_dir.empty()) {
        const char* env = std::getenv("METAFORGE_DATA_DIR");
        s.data_dir = env && *env ? env : "metaforge-data";
    }
    const char* env_token = std::getenv("METAFORGE_TOKEN");
    if (s.token.empty() && env_token) s.token = env_token;

    // Block termination signals before any server thread starts; one thread
    // waits for them and stops the server.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    mf::service::ServiceConfig cfg;
    cfg.data_dir = s.data_dir;
    if (!s.cors.empty()) cfg.cors_origins = s.cors;
    if (!s.token.empty()) cfg.bearer_token = s.token;
    mf::service::Service svc(cfg, make_gateway(g));
    int port = svc.bind(s.host, s.port);
    if (port < 0) die("cannot bind " + s.host + ":" + std::to_string(s.port));
    std::cout << port << std::endl;
    std::cerr << "metaforge: serving on http://" << s.host << ":" << port << " (data " << s.data_dir << ")\n";

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        svc.stop();
    });
    bool ok = svc.run();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return ok ? kOk : kUsage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"metaforge: machine-actionable metadata templates"};
    app.require_subcommand(1);
    app.fallthrough();
    Options opt;
    app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    app.add_flag("--strict-warnings", opt.strict_warnings, "Exit 1 on warnings too");

    std::string tfile, ifile, mode = "entry", language = "en", ref;
    bool strict = false;

    auto* vt = app.add_subcommand("validate-template", "Check a template document");
    vt->add_option("file", tfile, "Template JSON file")->required();

    auto* vi = app.add_subcommand("validate-instance", "Validate a JSON-LD instance against a template");
    vi->add_option("--template", tfile)->required();
    vi->add_option("--instance", ifile)->required();
    vi->add_flag("--strict", strict, "Treat missing required values and free-text terms as errors");

    auto* rp = app.add_subcommand("render-plan", "Print the render plan as JSON");
    rp->add_option("--template", tfile)->required();
    rp->add_option("--instance", ifile);
    rp->add_option("--mode", mode, "entry, edit or view");
    rp->add_option("--language", language, "Language tag or comma-separated fallback chain");

    auto* qr = app.add_subcommand("quality-report", "Summarize field completeness");
    qr->add_option("--template", tfile)->required();
    qr->add_option("--instance", ifile)->required();
    qr->add_option("--instance-ref", ref);

    GatewayArgs gw;
    std::string source, acronym, query, id;
    int limit = mf::gateway::kDefaultLimit;
    bool fail_empty = false;
    auto gateway_flags = [&](CLI::App* sub) {
        sub->add_flag("--offline", gw.offline, "Serve recorded fixtures only (also GATEWAY_OFFLINE=1)");
        sub->add_option("--fixtures", gw.fixtures, "Fixture root directory");
        sub->add_option("--vocabulary", gw.vocabulary, "Term vocabulary JSON file");
    };

    auto* se = app.add_subcommand("search", "Search an authority or a vocabulary");
    se->add_option("--source", source, "orcid, ror or comptox");
    se->add_option("--acronym", acronym, "Vocabulary acronym(s), comma-separated");
    se->add_option("--query,-q", query)->required();
    se->add_option("--limit", limit);
    se->add_flag("--fail-empty", fail_empty, "Exit 1 when nothing matches");
    gateway_flags(se);

    auto* rs = app.add_subcommand("resolve", "Canonicalize and look up an identifier");
    rs->add_option("--source", source)->required();
    rs->add_option("--id", id)->required();
    gateway_flags(rs);

    ServeArgs serve;
    auto* sv = app.add_subcommand("serve", "Run the HTTP service");
    sv->add_option("--host", serve.host);
    sv->add_option("--port", serve.port, "0 picks a free port");
    sv->add_option("--data-dir", serve.data_dir, "Registry and instance directory (also METAFORGE_DATA_DIR)");
    sv->add_option("--cors-origin", serve.cors, "Allowed origin, repeatable (default any)");
    sv->add_option("--token", serve.token, "Require this bearer token (also METAFORGE_TOKEN)");
    gateway_flags(sv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*vt) return cmd_validate_template(tfile, opt);
        if (*vi) return cmd_validate_instance(tfile, ifile, strict, opt);
        if (*rp) return cmd_render_plan(tfile, ifile, mode, language);
        if (*qr) return cmd_quality_report(tfile, ifile, ref, opt);
        if (*se) return cmd_search(gw, source, acronym, query, limit, fail_empty, opt);
        if (*rs) return cmd_resolve(gw, source, id, opt);
        if (*sv) return cmd_serve(gw, serve);
    } catch (const Exit& e) {
        return e.code;
    } catch (const mf::Error& e) {
        std::cerr << "metaforge: " << e.code() << ": " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "metaforge: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
