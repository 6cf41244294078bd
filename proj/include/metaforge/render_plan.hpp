#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metaforge/jsonld.hpp"

namespace metaforge {

enum class Mode { entry, edit, view };

inline std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::entry: return "entry";
        case Mode::edit: return "edit";
        case Mode::view: return "view";
    }
    return "entry";
}

/// Throws BAD_MODE for anything but entry, edit or view.
inline Mode parse_mode(std::string_view s) {
    if (s == "entry") return Mode::entry;
    if (s == "edit") return Mode::edit;
    if (s == "view") return Mode::view;
    throw Error("BAD_MODE", "mode must be entry, edit or view, not '" + std::string(s) + "'");
}

enum class WidgetState { valid, invalid, incomplete };

inline std::string_view to_string(WidgetState s) {
    switch (s) {
        case WidgetState::valid: return "valid";
        case WidgetState::invalid: return "invalid";
        case WidgetState::incomplete: return "incomplete";
    }
    return "valid";
}

struct Widget {
    std::string path;
    std::string widget_type;  // a field type name, "group" or "repeat_controls"
    std::string label;
    std::string help;
    bool required = false;
    bool editable = true;
    bool hidden = false;
    std::vector<FieldValue> current_value;
    std::optional<std::vector<LiteralOption>> options;
    std::optional<AuthoritySource> authority;
    std::vector<TermSourceSpec> term_sources;
    std::optional<Cardinality> cardinality;  // repeat_controls only
    std::size_t repetitions = 0;             // repeat_controls only
    WidgetState state = WidgetState::valid;
};

struct LabelDiagnostic {
    std::string path;
    FallbackDiagnostic fallback;
};

struct RenderPlan {
    std::string template_id;
    Mode mode = Mode::entry;
    std::vector<std::string> language_chain;
    std::vector<Widget> widgets;
    std::vector<ValidationIssue> issues;
    std::vector<LabelDiagnostic> diagnostics;
};

namespace detail {

inline WidgetState state_for(const std::vector<ValidationIssue>& issues, const std::string& path, bool subtree) {
    auto state = WidgetState::valid;
    for (const auto& i : issues) {
        bool hit = i.path == path;
        if (!hit && subtree)
            hit = text::starts_with(i.path, path + "/") || text::starts_with(i.path, path + "[");
        if (!hit) continue;
        if (i.severity == Severity::error) return WidgetState::invalid;
        state = WidgetState::incomplete;
    }
    return state;
}

}  // namespace detail

/// Deterministic description of the form for a template, instance and mode.
/// Widgets follow depth-first template order expanded by the current
/// repetitions; states come from draft validation.
inline RenderPlan render_plan(const Template& t, const MetadataInstance& inst, Mode mode,
                              const std::vector<std::string>& language_chain) {
    auto issues = validate_instance(t, inst, false);
    RenderPlan plan;
    plan.template_id = t.id;
    plan.mode = mode;
    plan.language_chain = language_chain;
    bool read_only = mode == Mode::view;

    auto label_for = [&](const TemplateNode& node, const std::string& path) {
        auto l = localized_label(node, language_chain);
        for (auto& d : l.diagnostics) plan.diagnostics.push_back({path, std::move(d)});
        return l.text;
    };
    auto help_for = [&](const TemplateNode& node) {
        return node.help.empty() ? std::string{} : localize(node.help, language_chain, "").text;
    };

    walk_instance(
        t, inst,
        [&](const TemplateNode& node, const std::string& base, std::size_t count, bool hidden) {
            if (read_only) return;
            Widget w;
            w.path = base;
            w.widget_type = "repeat_controls";
            w.label = label_for(node, base);
            w.help = help_for(node);
            w.required = node.cardinality.min > 0;
            w.editable = true;
            w.hidden = hidden;
            w.cardinality = node.cardinality;
            w.repetitions = count;
            w.state = detail::state_for(issues, base, false);
            plan.widgets.push_back(std::move(w));
        },
        [&](const TemplateNode& node, const std::string& slot, bool hidden) {
            Widget w;
            w.path = slot;
            w.label = label_for(node, slot);
            w.help = help_for(node);
            w.hidden = hidden;
            if (node.is_element()) {
                w.widget_type = "group";
                w.editable = !read_only;
                w.state = detail::state_for(issues, slot, true);
            } else {
                w.widget_type = std::string(to_string(node.field_type));
                w.required = node.required;
                w.editable = !read_only && !is_render_only(node);
                if (auto it = inst.values.find(slot); it != inst.values.end()) w.current_value = it->second;
                if (node.field_type == FieldType::list || node.field_type == FieldType::checkbox)
                    w.options = node.constraints.literals;
                if (node.field_type == FieldType::external_authority) w.authority = node.constraints.authority;
                if (node.field_type == FieldType::controlled_term) w.term_sources = node.constraints.sources;
                w.state = detail::state_for(issues, slot, false);
            }
            plan.widgets.push_back(std::move(w));
        });
    plan.issues = std::move(issues);
    return plan;
}

inline json to_json(const Widget& w) {
    json j{{"path", w.path},         {"widgetType", w.widget_type}, {"label", w.label},
           {"help", w.help},         {"required", w.required},      {"editable", w.editable},
           {"hidden", w.hidden},     {"state", to_string(w.state)}};
    if (!w.current_value.empty()) {
        if (w.widget_type == "checkbox") {
            json arr = json::array();
            for (const auto& v : w.current_value) arr.push_back(value_to_jsonld(v));
            j["currentValue"] = std::move(arr);
        } else {
            j["currentValue"] = value_to_jsonld(w.current_value.front());
        }
    }
    if (w.options) {
        json opts = json::array();
        for (const auto& o : *w.options) {
            json oj{{"label", o.label}};
            if (o.iri) oj["iri"] = *o.iri;
            opts.push_back(std::move(oj));
        }
        j["options"] = std::move(opts);
    }
    if (w.authority) j["authority"] = to_string(*w.authority);
    if (!w.term_sources.empty()) {
        json srcs = json::array();
        for (const auto& s : w.term_sources) {
            json sj{{"sourceType", to_string(s.type)}, {"acronym", s.acronym}};
            if (s.type == TermSourceType::branch) sj["rootIri"] = s.root_iri;
            if (s.type == TermSourceType::value_set) sj["valueSetId"] = s.value_set_id;
            srcs.push_back(std::move(sj));
        }
        j["termSources"] = std::move(srcs);
    }
    if (w.cardinality) {
        json c{{"min", w.cardinality->min}};
        if (w.cardinality->max) c["max"] = *w.cardinality->max;
        j["cardinality"] = std::move(c);
        j["repetitions"] = w.repetitions;
    }
    return j;
}

inline json to_json(const FallbackDiagnostic& d) {
    json j{{"requestedTag", d.requested_tag}};
    if (d.served_key.empty()) j["servedTag"] = d.served_tag;
    else j["servedKey"] = d.served_key;
    return j;
}

inline json to_json(const RenderPlan& p) {
    json widgets = json::array();
    for (const auto& w : p.widgets) widgets.push_back(to_json(w));
    json diags = json::array();
    for (const auto& d : p.diagnostics) {
        json dj = to_json(d.fallback);
        dj["path"] = d.path;
        diags.push_back(std::move(dj));
    }
    return json{{"templateId", p.template_id},
                {"mode", to_string(p.mode)},
                {"language", p.language_chain.empty() ? std::string{} : p.language_chain.front()},
                {"languageChain", p.language_chain},
                {"widgets", std::move(widgets)},
                {"issues", to_json(p.issues)},
                {"diagnostics", std::move(diags)}};
}

}  // namespace metaforge
