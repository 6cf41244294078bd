#pragma once

#include <charconv>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "metaforge/gateway/gateway.hpp"
#include "metaforge/quality_report.hpp"
#include "metaforge/render_plan.hpp"
#include "metaforge/service/instance_store.hpp"
#include "metaforge/service/registry.hpp"

namespace metaforge::service {

/// HTTP status for an error code. Unlisted codes are client errors.
inline int status_for(std::string_view code) {
    if (code == "UNKNOWN_TEMPLATE" || code == "NOT_FOUND") return 404;
    if (code == "ID_CONFLICT") return 409;
    if (code == "SCHEMA_VIOLATION" || code == "VALIDATION_FAILED" || code == "CONTEXT_MISMATCH") return 422;
    if (text::starts_with(code, "UPSTREAM_")) return 502;
    if (code == "UNAUTHORIZED") return 401;
    if (code == "INTERNAL" || code == "IO_ERROR") return 500;
    // MALFORMED_JSON, BAD_MODE, QUERY_EMPTY, UNKNOWN_SOURCE, INVALID_IDENTIFIER,
    // UNKNOWN_SOURCE_ACRONYM, BAD_LIMIT and anything else a request can get wrong.
    return 400;
}

inline json api_error(const std::string& code, const std::string& message, const std::string& path = {}) {
    json j{{"code", code}, {"message", message}};
    if (!path.empty()) j["path"] = path;
    return j;
}

struct ServiceConfig {
    fs::path data_dir;                             // empty: memory only
    std::vector<std::string> cors_origins{"*"};  // "*" allows any origin
    std::optional<std::string> bearer_token;       // required on every route but healthz when set
    std::ostream* log = &std::cerr;
};

/// The `/v1` HTTP surface over the registry, engine, instance store and gateway.
class Service {
public:
    Service(ServiceConfig config, std::shared_ptr<gateway::AuthorityGateway> gw)
        : config_(std::move(config)),
          registry_(config_.data_dir),
          instances_(config_.data_dir),
          gateway_(std::move(gw)) {
        install();
    }

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    ~Service() { stop(); }

    /// Bind to `port` (0 picks a free one). Returns the bound port or -1.
    int bind(const std::string& host, int port) {
        if (port == 0) return server_.bind_to_any_port(host);
        return server_.bind_to_port(host, port) ? port : -1;
    }

    /// Serve until stop(). Call after bind().
    bool run() { return server_.listen_after_bind(); }

    void wait_until_ready() const { server_.wait_until_ready(); }

    void stop() {
        if (server_.is_running()) server_.stop();
    }

    TemplateRegistry& registry() { return registry_; }

private:
    using Req = httplib::Request;
    using Res = httplib::Response;

    static void send(Res& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    static void send_error(Res& res, const Error& e) {
        json body = api_error(e.code(), e.what(), e.path());
        if (auto* te = dynamic_cast<const TemplateError*>(&e)) body["issues"] = to_json(te->issues());
        if (auto* ie = dynamic_cast<const InstanceError*>(&e)) body["issues"] = to_json(ie->issues());
        send(res, status_for(e.code()), body);
    }

    // Wrap a route body so every failure leaves as an ApiError envelope.
    template <class F>
    httplib::Server::Handler guarded(F f) {
        return [f = std::move(f)](const Req& req, Res& res) {
            try {
                f(req, res);
            } catch (const Error& e) {
                send_error(res, e);
            } catch (const std::exception& e) {
                send(res, 500, api_error("INTERNAL", e.what()));
            }
        };
    }

    static bool flag(const Req& req, const char* name) {
        if (!req.has_param(name)) return false;
        auto v = text::lower(req.get_param_value(name));
        return v.empty() || v == "1" || v == "true" || v == "yes";
    }

    static int limit_param(const Req& req) {
        if (!req.has_param("limit")) return gateway::kDefaultLimit;
        auto s = req.get_param_value("limit");
        int v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size()) throw Error("BAD_LIMIT", "limit must be an integer");
        return gateway::clamp_limit(v);
    }

    static json body_json(const Req& req) { return parse_json_text(req.body); }

    void log_line(const std::string& line) {
        if (!config_.log) return;
        std::lock_guard lock(log_mu_);
        *config_.log << line << std::endl;
    }

    bool origin_allowed(const std::string& origin) const {
        for (const auto& o : config_.cors_origins)
            if (o == "*" || o == origin) return true;
        return false;
    }

    void install() {
        server_.set_pre_routing_handler([this](const Req& req, Res& res) {
            auto origin = req.get_header_value("Origin");
            if (!origin.empty() && origin_allowed(origin)) {
                bool any = std::find(config_.cors_origins.begin(), config_.cors_origins.end(), "*") !=
                           config_.cors_origins.end();
                res.set_header("Access-Control-Allow-Origin", any ? "*" : origin);
                if (!any) res.set_header("Vary", "Origin");
            }
            if (req.method == "OPTIONS") {
                res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
                res.set_header("Access-Control-Allow-Headers", "Content-Type, Authorization");
                res.status = 204;
                return httplib::Server::HandlerResponse::Handled;
            }
            if (config_.bearer_token && req.path != "/v1/healthz" &&
                req.get_header_value("Authorization") != "Bearer " + *config_.bearer_token) {
                send(res, 401, api_error("UNAUTHORIZED", "missing or wrong bearer token"));
                return httplib::Server::HandlerResponse::Handled;
            }
            return httplib::Server::HandlerResponse::Unhandled;
        });
        server_.set_error_handler([](const Req& req, Res& res) {
            if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
            auto code = res.status == 404 ? "NOT_FOUND" : res.status >= 500 ? "INTERNAL" : "BAD_REQUEST";
            send(res, res.status, api_error(code, "no route for " + req.method + " " + req.path));
            return httplib::Server::HandlerResponse::Handled;
        });
        server_.set_exception_handler([](const Req&, Res& res, std::exception_ptr) {
            send(res, 500, api_error("INTERNAL", "unhandled server error"));
        });
        server_.set_logger([this](const Req& req, const Res& res) {
            auto target = req.target.empty() ? req.path : req.target;
            log_line(req.method + " " + target + " " + std::to_string(res.status));
        });

        server_.Get("/v1/healthz", [](const Req&, Res& res) { send(res, 200, json{{"status", "ok"}}); });

        server_.Get("/v1/templates", guarded([this](const Req&, Res& res) {
            json list = json::array();
            for (const auto& e : registry_.list()) list.push_back(entry_summary(*e));
            send(res, 200, json{{"templates", std::move(list)}});
        }));

        server_.Post("/v1/templates", guarded([this](const Req& req, Res& res) {
            auto reg = registry_.register_template(body_json(req), flag(req, "force"));
            send(res, reg.created ? 201 : 200, entry_summary(*reg.entry));
        }));

        server_.Post(R"(/v1/templates/(.+)/render-plan)", guarded([this](const Req& req, Res& res) {
            render_plan_route(req, res);
        }));

        server_.Post(R"(/v1/templates/(.+)/validate)", guarded([this](const Req& req, Res& res) {
            auto entry = registry_.get(req.matches[1]);
            auto doc = body_json(req);
            std::vector<ValidationIssue> issues;
            try {
                auto parsed = parse_instance(entry->tmpl, doc);
                issues = std::move(parsed.warnings);
                auto found = validate_instance(entry->tmpl, parsed.instance, flag(req, "strict"));
                issues.insert(issues.end(), found.begin(), found.end());
                std::sort(issues.begin(), issues.end(),
                          [](const ValidationIssue& a, const ValidationIssue& b) { return issue_order(a, b); });
            } catch (const Error& e) {
                if (e.code() != "CONTEXT_MISMATCH") throw;
                issues.push_back({Severity::error, "", e.code(), e.what(), entry->id, std::nullopt});
            }
            send(res, 200, json{{"issues", to_json(issues)}});
        }));

        server_.Post(R"(/v1/templates/(.+)/quality-report)", guarded([this](const Req& req, Res& res) {
            auto entry = registry_.get(req.matches[1]);
            auto parsed = parse_instance(entry->tmpl, body_json(req));
            std::optional<std::string> ref;
            if (req.has_param("instanceRef")) ref = req.get_param_value("instanceRef");
            send(res, 200, to_json(generate_report(entry->tmpl, parsed.instance, ref)));
        }));

        server_.Post(R"(/v1/templates/(.+)/instances)", guarded([this](const Req& req, Res& res) {
            auto entry = registry_.get(req.matches[1]);
            bool draft = flag(req, "draft");
            auto parsed = parse_instance(entry->tmpl, body_json(req));
            if (!draft) {
                auto issues = validate_instance(entry->tmpl, parsed.instance, true);
                if (has_errors(issues))
                    throw InstanceError("VALIDATION_FAILED", "instance does not validate strictly", std::move(issues));
            }
            auto stored = instances_.put(entry->id, req.body, draft);
            send(res, 201, json{{"instanceId", stored.instance_id}, {"templateId", stored.template_id},
                                {"draft", stored.draft}, {"storedAt", stored.stored_at}});
        }));

        server_.Get(R"(/v1/templates/(.+))", guarded([this](const Req& req, Res& res) {
            auto e = registry_.get(req.matches[1]);
            auto body = entry_summary(*e);
            body["document"] = e->document;
            send(res, 200, body);
        }));

        server_.Get(R"(/v1/instances/(.+))", guarded([this](const Req& req, Res& res) {
            auto s = instances_.get(req.matches[1]);
            res.status = 200;
            res.set_header("X-Instance-Draft", s.draft ? "true" : "false");
            res.set_header("X-Template-Id", s.template_id);
            res.set_content(s.document, "application/ld+json");
        }));

        server_.Get("/v1/search/authority", guarded([this](const Req& req, Res& res) {
            auto hits = gateway_->search_authority(req.get_param_value("source"), req.get_param_value("q"),
                                                   limit_param(req));
            send(res, 200, json{{"suggestions", gateway::to_json(hits)}});
        }));

        server_.Get("/v1/search/ontology", guarded([this](const Req& req, Res& res) {
            std::vector<TermSourceSpec> sources;
            std::string acronyms = req.get_param_value("acronym");
            std::size_t start = 0;
            while (start <= acronyms.size()) {
                auto end = acronyms.find(',', start);
                if (end == std::string::npos) end = acronyms.size();
                auto a = text::trim(std::string_view(acronyms).substr(start, end - start));
                if (!a.empty()) sources.push_back({TermSourceType::ontology, a, {}, {}});
                start = end + 1;
            }
            auto hits = gateway_->search_ontology(sources, req.get_param_value("q"), limit_param(req));
            send(res, 200, json{{"suggestions", gateway::to_json(hits)}});
        }));

        server_.Get("/v1/resolve/authority", guarded([this](const Req& req, Res& res) {
            auto s = gateway_->resolve_identifier(req.get_param_value("source"), req.get_param_value("id"));
            send(res, 200, gateway::to_json(s));
        }));
    }

    // Body: {mode?, language? (tag, comma list or array), instance?, template?}.
    // An inline template takes precedence over the registered one.
    void render_plan_route(const Req& req, Res& res) {
        auto body = req.body.empty() ? json::object() : body_json(req);
        if (!body.is_object()) throw Error("MALFORMED_JSON", "render-plan body must be a JSON object");
        auto mode = parse_mode(body.value("mode", std::string("entry")));

        Template tmpl;
        if (auto inline_t = body.find("template"); inline_t != body.end() && inline_t->is_object()) {
            log_line("warning: inline template supplied for " + std::string(req.matches[1]) +
                     "; using it instead of the registered template");
            auto issues = check_template_document(*inline_t);
            if (has_errors(issues))
                throw TemplateError("SCHEMA_VIOLATION", "inline template failed validation", std::move(issues));
            tmpl = parse_template(*inline_t);
        } else {
            tmpl = registry_.get(req.matches[1])->tmpl;
        }

        std::vector<std::string> chain;
        if (auto lang = body.find("language"); lang != body.end()) {
            if (lang->is_array()) {
                for (const auto& l : *lang)
                    if (l.is_string()) chain.push_back(l.get<std::string>());
            } else if (lang->is_string()) {
                auto s = lang->get<std::string>();
                std::size_t start = 0;
                while (start <= s.size()) {
                    auto end = s.find(',', start);
                    if (end == std::string::npos) end = s.size();
                    auto tag = text::trim(std::string_view(s).substr(start, end - start));
                    if (!tag.empty()) chain.push_back(tag);
                    start = end + 1;
                }
            }
        }
        if (chain.empty()) chain.push_back("en");

        MetadataInstance inst = new_instance(tmpl);
        if (auto i = body.find("instance"); i != body.end() && !i->is_null())
            inst = parse_instance(tmpl, *i).instance;
        send(res, 200, to_json(render_plan(tmpl, inst, mode, chain)));
    }

    ServiceConfig config_;
    TemplateRegistry registry_;
    InstanceStore instances_;
    std::shared_ptr<gateway::AuthorityGateway> gateway_;
    httplib::Server server_;
    std::mutex log_mu_;
};

}  // namespace metaforge::service
