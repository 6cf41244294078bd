#pragma once

#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "metaforge/instance_validate.hpp"
#include "metaforge/value_json.hpp"

namespace metaforge {

inline constexpr const char* kRdfsNamespace = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr const char* kXsdNamespace = "http://www.w3.org/2001/XMLSchema#";

/// `@context` for a template: the rdfs and xsd prefixes plus one entry per
/// node key mapping to its property IRI.
inline json jsonld_context(const Template& t) {
    json ctx{{"rdfs", kRdfsNamespace}, {"xsd", kXsdNamespace}};
    std::function<void(const std::vector<TemplateNode>&)> add = [&](const std::vector<TemplateNode>& nodes) {
        for (const auto& n : nodes) {
            if (!ctx.contains(n.key)) ctx[n.key] = json{{"@id", property_iri(t, n.key)}};
            add(n.children);
        }
    };
    add(t.children);
    return ctx;
}

namespace detail {

inline json emit_nodes(const std::vector<TemplateNode>& nodes, const std::string& prefix, const MetadataInstance& inst);

/// JSON for one slot, or null when it is entirely Empty.
inline json emit_slot(const TemplateNode& node, const std::string& slot, const MetadataInstance& inst) {
    if (node.is_element()) {
        json obj = emit_nodes(node.children, slot + "/", inst);
        return obj.empty() ? json(nullptr) : obj;
    }
    auto it = inst.values.find(slot);
    if (it == inst.values.end() || it->second.empty()) return nullptr;
    if (node.field_type == FieldType::checkbox) {
        json arr = json::array();
        for (const auto& v : it->second) arr.push_back(value_to_jsonld(v));
        return arr;
    }
    return value_to_jsonld(it->second.front());
}

inline json emit_nodes(const std::vector<TemplateNode>& nodes, const std::string& prefix, const MetadataInstance& inst) {
    json obj = json::object();
    for (const auto& node : nodes) {
        std::string base = prefix + node.key;
        if (node.cardinality.multi_valued()) {
            json arr = json::array();
            for (std::size_t i = 0, n = inst.repetition_count(base); i < n; ++i) {
                json v = emit_slot(node, indexed(base, i), inst);
                if (!v.is_null()) arr.push_back(std::move(v));
            }
            if (!arr.empty()) obj[node.key] = std::move(arr);
        } else {
            json v = emit_slot(node, base, inst);
            if (!v.is_null()) obj[node.key] = std::move(v);
        }
    }
    return obj;
}

}  // namespace detail

/// Serialize an instance as a JSON-LD document. Empty values and entirely
/// Empty repetitions are omitted; multi-valued nodes become arrays. With
/// `strict`, any error-severity issue raises VALIDATION_FAILED.
inline json serialize_jsonld(const Template& t, const MetadataInstance& inst, bool strict) {
    require_fingerprint(t, inst);
    if (strict) {
        auto issues = validate_instance(t, inst, true);
        if (has_errors(issues))
            throw InstanceError("VALIDATION_FAILED", "instance has validation errors", std::move(issues));
    }
    json doc = detail::emit_nodes(t.children, "", inst);
    doc["@context"] = jsonld_context(t);
    doc["@type"] = t.id;
    return doc;
}

struct ParsedInstance {
    MetadataInstance instance;
    std::vector<ValidationIssue> warnings;  // UNKNOWN_FIELD and unbindable values
};

namespace detail {

class InstanceBinder {
public:
    MetadataInstance& inst;
    std::vector<ValidationIssue>& warnings;

    void warn(const std::string& path, const char* code, std::string message) {
        warnings.push_back({Severity::warning, path, code, std::move(message)});
    }

    void bind_field(const TemplateNode& node, const std::string& slot, const json& j) {
        auto& cell = inst.values[slot];
        cell.clear();
        auto bind_one = [&](const json& v) {
            if (auto fv = value_from_jsonld(node, v)) cell.push_back(std::move(*fv));
            else warn(slot, "TYPE_MISMATCH", "value has no recognizable JSON-LD shape");
        };
        if (j.is_array()) {
            for (const auto& v : j) bind_one(v);
        } else {
            bind_one(j);
        }
    }

    void bind_slot(const TemplateNode& node, const std::string& slot, const json& j) {
        if (node.is_field()) {
            bind_field(node, slot, j);
        } else if (j.is_object()) {
            bind_nodes(node.children, slot + "/", j);
        } else {
            warn(slot, "TYPE_MISMATCH", "element value must be an object");
            materialize_slot(node, slot, inst, false);
        }
    }

    void bind_nodes(const std::vector<TemplateNode>& nodes, const std::string& prefix, const json& obj) {
        for (const auto& [key, value] : obj.items()) {
            if (!key.empty() && key[0] == '@') continue;
            bool known = std::any_of(nodes.begin(), nodes.end(), [&](const TemplateNode& n) { return n.key == key; });
            if (!known) warn(prefix + key, "UNKNOWN_FIELD", "key is not defined by the template");
        }
        for (const auto& node : nodes) {
            std::string base = prefix + node.key;
            auto it = obj.find(node.key);
            if (!node.cardinality.multi_valued()) {
                if (it == obj.end() || it->is_null()) materialize_slot(node, base, inst, false);
                else bind_slot(node, base, *it);
                continue;
            }
            json entries = json::array();
            if (it != obj.end() && !it->is_null()) entries = it->is_array() ? *it : json::array({*it});
            std::size_t count =
                std::max<std::size_t>(entries.size(), std::max<std::size_t>(node.cardinality.min, 1));
            inst.repetitions[base] = count;
            for (std::size_t i = 0; i < count; ++i) {
                if (i < entries.size()) bind_slot(node, indexed(base, i), entries[i]);
                else materialize_slot(node, indexed(base, i), inst, false);
            }
        }
    }
};

}  // namespace detail

/// Re-bind a JSON-LD document to template paths. Keys the template does not
/// define become UNKNOWN_FIELD warnings. Throws CONTEXT_MISMATCH when
/// `@type` is not this template's id, MALFORMED_JSON when the document is not
/// an object.
inline ParsedInstance parse_instance(const Template& t, const json& doc) {
    if (!doc.is_object()) throw Error("MALFORMED_JSON", "instance document must be a JSON object");
    auto type = doc.find("@type");
    if (type == doc.end() || !type->is_string() || type->get<std::string>() != t.id)
        throw Error("CONTEXT_MISMATCH", "document @type does not name template " + t.id);
    ParsedInstance out;
    out.instance.template_id = t.id;
    out.instance.template_fingerprint = template_fingerprint(t);
    out.instance.created_at = out.instance.updated_at = text::utc_now_rfc3339();
    detail::InstanceBinder binder{out.instance, out.warnings};
    binder.bind_nodes(t.children, "", doc);
    std::sort(out.warnings.begin(), out.warnings.end(), [](const auto& a, const auto& b) { return issue_order(a, b); });
    return out;
}

inline ParsedInstance parse_instance_text(const Template& t, std::string_view text) {
    return parse_instance(t, parse_json_text(text));
}

}  // namespace metaforge
