// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// if any fails. Thresholds are fixed here, not configurable.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

#include "metaforge/gateway/gateway.hpp"
#include "metaforge/quality_report.hpp"
#include "metaforge/render_plan.hpp"
#include "metaforge/service/server.hpp"
#include "support/fixtures.hpp"

namespace mf = metaforge;
namespace gw = metaforge::gateway;
namespace fs = std::filesystem;
using testsupport::fixtures;
using testsupport::load_instance;
using testsupport::load_template;

namespace {

constexpr int kRoundTripInstancesPerTemplate = 250;  // 5 templates -> 1250 >= 1000
constexpr int kRoundTripMinimum = 1000;
constexpr std::size_t kMinTemplates = 5;
constexpr int kOrcidRandomIds = 10000;
constexpr int kCardinalitySteps = 2000;
constexpr double kFig2Completeness = 0.8;  // compared with ==, no tolerance
constexpr int kMonotoneTrials = 50;

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(const char* id, const char* title, const Outcome& o) {
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << "  " << title;
    if (!o.detail.empty()) std::cout << "  [" << o.detail << "]";
    std::cout << std::endl;
    if (!o.pass) ++failures;
}

template <class F>
void criterion(const char* id, const char* title, F&& f) {
    Outcome o;
    try {
        o = f();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    report(id, title, o);
}

template <class F>
std::string code_of(F&& f) {
    try {
        f();
    } catch (const mf::Error& e) {
        return e.code();
    }
    return "";
}

void each_value(const mf::json& j, const std::function<void(const mf::json&)>& f) {
    if (j.is_array()) {
        for (const auto& e : j) each_value(e, f);
    } else if (j.is_object()) {
        if (j.contains("@value") || j.contains("@id")) {
            f(j);
            return;
        }
        for (const auto& [k, v] : j.items())
            if (k != "@context" && k != "@type") each_value(v, f);
    }
}

Outcome round_trip() {
    testsupport::ValueGen gen(20240611);
    int total = 0, failed = 0;
    std::size_t templates = 0;
    for (const auto& name : testsupport::template_names()) {
        auto t = load_template(name);
        ++templates;
        for (int i = 0; i < kRoundTripInstancesPerTemplate; ++i) {
            auto x = testsupport::random_instance(t, gen, gen.coin(0.2) ? 0.1 : 0.75);
            auto parsed = mf::parse_instance_text(t, mf::serialize_jsonld(t, x, false).dump());
            if (!parsed.warnings.empty() || !parsed.instance.same_content(mf::compact(t, x))) ++failed;
            ++total;
        }
    }
    return {failed == 0 && total >= kRoundTripMinimum && templates >= kMinTemplates,
            std::to_string(total) + " instances over " + std::to_string(templates) + " templates, " +
                std::to_string(failed) + " failures"};
}

Outcome fig2_validation() {
    auto t = load_template("rnaseq_assay");
    auto empty = mf::new_instance(t);
    std::set<std::string> missing;
    bool only_required = true;
    for (const auto& i : mf::validate_instance(t, empty, true)) {
        missing.insert(i.path);
        only_required = only_required && i.code == "REQUIRED_MISSING" && i.severity == mf::Severity::error;
    }
    std::set<std::string> expected = {"parent_sample_id", "preparation_protocol_doi", "dataset_type", "analyte_class",
                                      "acquisition_instrument_model"};
    auto filled = mf::set_value(t, empty, "parent_sample_id", mf::Literal{"HBM296.DXLM.434", "xsd:string"});
    bool cleared = true;
    for (const auto& i : mf::validate_instance(t, filled, true)) cleared = cleared && i.path != "parent_sample_id";
    auto granite = mf::set_value(t, empty, "analyte_class", mf::Literal{"Granite", "xsd:string"});
    bool rejected = false;
    for (const auto& i : mf::validate_instance(t, granite, true))
        rejected = rejected || (i.path == "analyte_class" && i.code == "NOT_IN_ALLOWED_VALUES");
    return {missing == expected && only_required && cleared && rejected,
            "missing=" + std::to_string(missing.size()) + " cleared=" + (cleared ? "yes" : "no") +
                " granite=" + (rejected ? "NOT_IN_ALLOWED_VALUES" : "accepted")};
}

Outcome jsonld_shape() {
    testsupport::ValueGen gen(77);
    std::size_t refs = 0, refs_ok = 0, lits = 0, lits_ok = 0;
    for (const auto& name : testsupport::template_names()) {
        auto t = load_template(name);
        for (int i = 0; i < 200; ++i) {
            each_value(mf::serialize_jsonld(t, testsupport::random_instance(t, gen), false), [&](const mf::json& v) {
                if (v.contains("@id")) {
                    ++refs;
                    if (v.contains("rdfs:label") && v["rdfs:label"].is_string()) ++refs_ok;
                } else {
                    ++lits;
                    if (v.contains("@type") && v["@value"].is_string()) ++lits_ok;
                }
            });
        }
    }
    return {refs > 0 && lits > 0 && refs == refs_ok && lits == lits_ok,
            std::to_string(refs_ok) + "/" + std::to_string(refs) + " references, " + std::to_string(lits_ok) + "/" +
                std::to_string(lits) + " literals"};
}

Outcome orcid_checksum() {
    namespace id = mf::identifiers;
    bool known = id::validate_orcid_checksum("0000-0002-2256-2421");
    std::string digits = "0000000222562421";
    int mutations = 0, rejected = 0;
    for (std::size_t pos = 0; pos < digits.size(); ++pos) {
        for (char c = '0'; c <= '9'; ++c) {
            if (c == digits[pos]) continue;
            auto m = digits;
            m[pos] = c;
            ++mutations;
            if (!id::validate_orcid_checksum(m)) ++rejected;
        }
    }
    std::mt19937_64 rng(424242);
    int agree = 0;
    for (int i = 0; i < kOrcidRandomIds; ++i) {
        auto base = testsupport::random_orcid_digits(rng);
        if (id::orcid_check_character(base) == testsupport::mod11_2_oracle(base)) ++agree;
    }
    return {known && rejected == mutations && agree == kOrcidRandomIds,
            std::string("known=") + (known ? "valid" : "invalid") + " mutations rejected " + std::to_string(rejected) +
                "/" + std::to_string(mutations) + " (16 positions) oracle agreement " + std::to_string(agree) + "/" +
                std::to_string(kOrcidRandomIds)};
}

Outcome gateway_offline() {
    auto live = gw::fail_on_contact_adapters();
    gw::AuthorityGateway g(gw::GatewayConfig{.offline = true}, live, gw::fixture_adapters(fixtures() / "gateway"));
    auto hits = g.search_authority("ror", "stanford");
    g.resolve_identifier("ror", "00f54p054");
    g.search_authority("orcid", "o'connor");
    bool found = std::any_of(hits.begin(), hits.end(), [](const gw::AuthoritySuggestion& s) {
        return s.label == "Stanford University" && s.id == "https://ror.org/00f54p054";
    });
    std::size_t contacts = 0;
    for (const auto& a : {live.orcid, live.ror, live.comptox})
        contacts += static_cast<const gw::FailOnContactAdapter&>(*a).contacts();
    return {found && contacts == 0,
            std::to_string(hits.size()) + " results, Stanford University " + (found ? "present" : "absent") + ", " +
                std::to_string(contacts) + " network contacts"};
}

Outcome cardinality() {
    testsupport::ValueGen gen(99);
    int violations = 0, overflow_checks = 0, underflow_checks = 0, wrong_errors = 0;
    for (const auto& name : testsupport::template_names()) {
        auto t = load_template(name);
        auto inst = mf::new_instance(t);
        for (int step = 0; step < kCardinalitySteps / 5; ++step) {
            auto points = testsupport::repeat_points(t, inst);
            if (points.empty()) break;
            auto& [node, base] = points[static_cast<std::size_t>(gen.pick(0, static_cast<int>(points.size()) - 1))];
            auto count = inst.repetition_count(base);
            const auto& card = node->cardinality;
            if (gen.coin()) {
                bool at_max = card.max && count >= *card.max;
                auto code = code_of([&] { inst = mf::add_repetition(t, inst, base); });
                if (at_max) ++overflow_checks;
                if (code != (at_max ? "CARDINALITY_OVERFLOW" : "")) ++wrong_errors;
            } else if (count > 0) {
                bool at_min = count <= card.min;
                auto idx = static_cast<std::size_t>(gen.pick(0, static_cast<int>(count) - 1));
                auto code = code_of([&] { inst = mf::remove_repetition(t, inst, mf::indexed(base, idx)); });
                if (at_min) ++underflow_checks;
                if (code != (at_min ? "CARDINALITY_UNDERFLOW" : "")) ++wrong_errors;
            }
            for (const auto& [n, b] : testsupport::repeat_points(t, inst)) {
                auto c = inst.repetition_count(b);
                if (c < n->cardinality.min || (n->cardinality.max && c > *n->cardinality.max)) ++violations;
            }
        }
    }
    return {violations == 0 && wrong_errors == 0 && overflow_checks > 0 && underflow_checks > 0,
            std::to_string(violations) + " bound violations, " + std::to_string(wrong_errors) + " wrong outcomes, " +
                std::to_string(overflow_checks) + " overflow and " + std::to_string(underflow_checks) +
                " underflow boundary hits"};
}

Outcome i18n_fallback() {
    std::size_t widgets = 0, empty = 0, non_en = 0, mismatched_diags = 0;
    for (const auto& name : testsupport::template_names()) {
        if (name == "rich_types") continue;  // carries fr labels; the rest are en-only
        auto t = load_template(name);
        auto plan = mf::render_plan(t, mf::new_instance(t), mf::Mode::entry, {"de"});
        auto en = mf::render_plan(t, mf::new_instance(t), mf::Mode::entry, {"en"});
        for (std::size_t i = 0; i < plan.widgets.size(); ++i) {
            ++widgets;
            if (plan.widgets[i].label.empty()) ++empty;
            if (plan.widgets[i].label != en.widgets[i].label) ++non_en;
        }
        if (plan.diagnostics.size() != plan.widgets.size()) ++mismatched_diags;
    }
    return {widgets > 0 && empty == 0 && non_en == 0 && mismatched_diags == 0,
            std::to_string(widgets) + " labels, " + std::to_string(empty) + " empty, " + std::to_string(non_en) +
                " not en, " + std::to_string(mismatched_diags) + " templates with diagnostic count != fallbacks"};
}

Outcome view_mode() {
    testsupport::ValueGen gen(5);
    std::size_t widgets = 0, editable = 0, repeat = 0;
    for (const auto& name : testsupport::template_names()) {
        auto t = load_template(name);
        for (int i = 0; i < 20; ++i) {
            auto plan = mf::render_plan(t, testsupport::random_instance(t, gen), mf::Mode::view, {"en"});
            for (const auto& w : plan.widgets) {
                ++widgets;
                if (w.editable) ++editable;
                if (w.widget_type == "repeat_controls") ++repeat;
            }
        }
    }
    return {editable == 0 && repeat == 0, std::to_string(widgets) + " widgets, " + std::to_string(editable) +
                                              " editable, " + std::to_string(repeat) + " repeat controls"};
}

std::string pct(const std::string& s) {
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.') out.push_back(static_cast<char>(c));
        else {
            char buf[4];
            std::snprintf(buf, sizeof buf, "%%%02X", c);
            out += buf;
        }
    }
    return out;
}

Outcome service_contract() {
    auto dir = fs::temp_directory_path() / ("metaforge-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    auto make_gateway = [] {
        return std::make_shared<gw::AuthorityGateway>(gw::GatewayConfig{.offline = true}, gw::fail_on_contact_adapters(),
                                                      gw::fixture_adapters(fixtures() / "gateway"),
                                                      gw::TermIndex::load(fixtures() / "vocabulary" / "terms.json"));
    };
    auto start = [&](std::ostringstream& log) {
        auto svc = std::make_unique<mf::service::Service>(mf::service::ServiceConfig{.data_dir = dir, .log = &log},
                                                         make_gateway());
        return svc;
    };

    const std::string fig2 = testsupport::slurp(fixtures() / "templates" / "rnaseq_assay.json");
    const std::string id = "https://metaforge.example.org/templates/rnaseq-assay";
    const std::string complete = testsupport::slurp(fixtures() / "instances" / "rnaseq_complete.jsonld");
    const std::string wrong = testsupport::slurp(fixtures() / "instances" / "psych_ds_complete.jsonld");
    auto conflicting = testsupport::load_json(fixtures() / "templates" / "rnaseq_assay.json");
    conflicting["children"][0]["label"]["en"] = "Parent sample";

    struct Row {
        std::string method, path, body;
        int status;
        std::string code;
    };
    std::vector<Row> rows = {
        {"GET", "/v1/healthz", "", 200, ""},
        {"POST", "/v1/templates", fig2, 201, ""},
        {"POST", "/v1/templates", fig2, 200, ""},
        {"POST", "/v1/templates", conflicting.dump(), 409, "ID_CONFLICT"},
        {"POST", "/v1/templates", testsupport::slurp(fixtures() / "mutations" / "duplicate_key.json"), 422,
         "SCHEMA_VIOLATION"},
        {"POST", "/v1/templates", "{", 400, "MALFORMED_JSON"},
        {"GET", "/v1/templates", "", 200, ""},
        {"GET", "/v1/templates/" + pct(id), "", 200, ""},
        {"GET", "/v1/templates/" + pct("https://x.example/none"), "", 404, "UNKNOWN_TEMPLATE"},
        {"POST", "/v1/templates/" + pct(id) + "/render-plan", R"({"mode":"view"})", 200, ""},
        {"POST", "/v1/templates/" + pct(id) + "/render-plan", R"({"mode":"nope"})", 400, "BAD_MODE"},
        {"POST", "/v1/templates/" + pct(id) + "/validate?strict=true", complete, 200, ""},
        {"POST", "/v1/templates/" + pct(id) + "/quality-report", complete, 200, ""},
        {"POST", "/v1/templates/" + pct(id) + "/quality-report", wrong, 422, "CONTEXT_MISMATCH"},
        {"POST", "/v1/templates/" + pct(id) + "/instances", "{\"@type\":\"" + id + "\"}", 422, "VALIDATION_FAILED"},
        {"POST", "/v1/templates/" + pct(id) + "/instances", complete, 201, ""},
        {"GET", "/v1/instances/aaaaaaaaaaaaaaaaaaaaaaaaaa", "", 404, "NOT_FOUND"},
        {"GET", "/v1/search/authority?source=ror&q=stanford", "", 200, ""},
        {"GET", "/v1/search/authority?source=ror&q=", "", 400, "QUERY_EMPTY"},
        {"GET", "/v1/search/authority?source=x&q=a", "", 400, "UNKNOWN_SOURCE"},
        {"GET", "/v1/search/authority?source=ror&q=a&limit=z", "", 400, "BAD_LIMIT"},
        {"GET", "/v1/search/ontology?acronym=ANALYTE&q=dna", "", 200, ""},
        {"GET", "/v1/search/ontology?acronym=NONE&q=dna", "", 400, "UNKNOWN_SOURCE_ACRONYM"},
        {"GET", "/v1/resolve/authority?source=orcid&id=0000-0002-2256-2421", "", 200, ""},
        {"GET", "/v1/resolve/authority?source=orcid&id=0000-0002-2256-2420", "", 400, "INVALID_IDENTIFIER"},
    };

    int mismatched = 0;
    std::string first_mismatch;
    std::string list_before;
    {
        std::ostringstream log;
        auto svc = start(log);
        int port = svc->bind("127.0.0.1", 0);
        std::thread th([&] { svc->run(); });
        svc->wait_until_ready();
        httplib::Client c("127.0.0.1", port);
        for (const auto& r : rows) {
            auto res = r.method == "GET" ? c.Get(r.path) : c.Post(r.path, r.body, "application/json");
            bool ok = res && res->status == r.status;
            if (ok && !r.code.empty()) {
                auto j = mf::json::parse(res->body, nullptr, false);
                ok = j.is_object() && j.value("code", "") == r.code && mf::service::status_for(r.code) == r.status;
            }
            if (!ok) {
                ++mismatched;
                if (first_mismatch.empty())
                    first_mismatch = r.method + " " + r.path + " -> " + (res ? std::to_string(res->status) : "none");
            }
        }
        list_before = c.Get("/v1/templates")->body;
        svc->stop();
        th.join();
    }
    bool upstream = mf::service::status_for("UPSTREAM_ERROR") == 502 && mf::service::status_for("UPSTREAM_TIMEOUT") == 502;

    std::string list_after;
    {
        std::ostringstream log;
        auto svc = start(log);
        int port = svc->bind("127.0.0.1", 0);
        std::thread th([&] { svc->run(); });
        svc->wait_until_ready();
        httplib::Client c("127.0.0.1", port);
        list_after = c.Get("/v1/templates")->body;
        svc->stop();
        th.join();
    }
    fs::remove_all(dir);
    bool persisted = !list_before.empty() && list_before == list_after &&
                     mf::json::parse(list_after)["templates"].size() == 1;
    return {mismatched == 0 && upstream && persisted,
            std::to_string(rows.size() - static_cast<std::size_t>(mismatched)) + "/" + std::to_string(rows.size()) +
                " golden rows" + (first_mismatch.empty() ? "" : " (first miss: " + first_mismatch + ")") +
                ", registry after restart " + (persisted ? "identical" : "different")};
}

Outcome quality_report() {
    auto t = load_template("rnaseq_assay");
    auto r = mf::generate_report(t, load_instance(t, "rnaseq_four_of_five"));
    bool exact = r.completeness == kFig2Completeness;

    testsupport::ValueGen gen(31337);
    int drops = 0, trials = 0;
    for (const auto& name : testsupport::template_names()) {
        auto tt = load_template(name);
        for (int i = 0; i < kMonotoneTrials / 5; ++i, ++trials) {
            auto inst = testsupport::random_instance(tt, gen, 0.0);
            auto slots = testsupport::field_slots(tt, inst);
            std::shuffle(slots.begin(), slots.end(), gen.rng);
            double last = mf::generate_report(tt, inst).completeness;
            for (const auto& [node, slot] : slots) {
                inst = mf::set_values(tt, inst, slot, gen.values_for(*node));
                double now = mf::generate_report(tt, inst).completeness;
                if (now < last) ++drops;
                last = now;
            }
        }
    }
    return {exact && drops == 0, "completeness " + mf::text::format_double(r.completeness) + ", " +
                                     std::to_string(drops) + " decreases over " + std::to_string(trials) +
                                     " random fill orders"};
}

}  // namespace

int main() {
    criterion("AC1", "JSON-LD round trip over generated instances", round_trip);
    criterion("AC2", "Fig. 2 strict validation, parent_sample_id, Granite", fig2_validation);
    criterion("AC3", "JSON-LD value shapes", jsonld_shape);
    criterion("AC4", "ORCID MOD 11-2 checksum", orcid_checksum);
    criterion("AC5", "Offline gateway fixtures without network contact", gateway_offline);
    criterion("AC6", "Cardinality bounds under random add/remove", cardinality);
    criterion("AC7", "Language fallback to en with diagnostics", i18n_fallback);
    criterion("AC8", "View mode is read-only", view_mode);
    criterion("AC9", "Service contract and registry persistence", service_contract);
    criterion("AC10", "Quality report completeness", quality_report);
    std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
