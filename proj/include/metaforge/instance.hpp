#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metaforge/error.hpp"
#include "metaforge/template_json.hpp"
#include "metaforge/text.hpp"
#include "metaforge/value_check.hpp"

namespace metaforge {

// --- value paths -----------------------------------------------------------

/// One `key` or `key[i]` step of a value path such as `authors[1]/name`.
struct PathSegment {
    std::string key;
    std::optional<std::size_t> index;
    bool operator==(const PathSegment&) const = default;
};

/// Parse `key(\[\d+\])?(/key(\[\d+\])?)*`. Throws UNKNOWN_PATH on bad grammar.
inline std::vector<PathSegment> parse_value_path(std::string_view path) {
    std::vector<PathSegment> out;
    auto bad = [&]() { return Error("UNKNOWN_PATH", "malformed value path '" + std::string(path) + "'", std::string(path)); };
    if (path.empty()) throw bad();
    std::string_view rest = path;
    while (true) {
        auto slash = rest.find('/');
        auto seg = rest.substr(0, slash);
        PathSegment ps;
        auto open = seg.find('[');
        ps.key = std::string(seg.substr(0, open));
        if (!lexical::is_node_key(ps.key)) throw bad();
        if (open != std::string_view::npos) {
            auto digits = seg.substr(open + 1);
            if (digits.size() < 2 || digits.back() != ']') throw bad();
            digits.remove_suffix(1);
            if (!lexical::detail::all_digits(digits)) throw bad();
            ps.index = std::stoull(std::string(digits));
        }
        out.push_back(std::move(ps));
        if (slash == std::string_view::npos) break;
        rest.remove_prefix(slash + 1);
    }
    return out;
}

inline std::string indexed(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

// --- instances -------------------------------------------------------------

/// An in-progress metadata record bound to one template version.
///
/// `values` has one entry per materialized field slot (`dataset_type`,
/// `authors[0]/name`); an empty list means Empty, checkbox slots may hold
/// several literals. `repetitions` stores the current count of every
/// multi-valued node instance, keyed by its path without a trailing index.
struct MetadataInstance {
    std::string template_id;
    std::string template_fingerprint;
    std::map<std::string, std::vector<FieldValue>> values;
    std::map<std::string, std::size_t> repetitions;
    std::string created_at;
    std::string updated_at;

    /// Equality ignoring the envelope timestamps.
    bool same_content(const MetadataInstance& o) const {
        return template_id == o.template_id && template_fingerprint == o.template_fingerprint && values == o.values &&
               repetitions == o.repetitions;
    }

    const std::vector<FieldValue>& at(const std::string& path) const {
        auto it = values.find(path);
        if (it == values.end()) throw Error("UNKNOWN_PATH", "no value slot at " + path, path);
        return it->second;
    }

    /// First value at a slot, or Empty.
    FieldValue value(const std::string& path) const {
        const auto& v = at(path);
        return v.empty() ? FieldValue{Empty{}} : v.front();
    }

    std::size_t repetition_count(const std::string& node_path) const {
        auto it = repetitions.find(node_path);
        return it == repetitions.end() ? 0 : it->second;
    }
};

namespace detail {

inline void materialize_children(const std::vector<TemplateNode>& nodes, const std::string& prefix,
                                 MetadataInstance& inst, bool with_defaults);

inline void materialize_slot(const TemplateNode& node, const std::string& slot, MetadataInstance& inst,
                             bool with_defaults) {
    if (node.is_field()) {
        auto& cell = inst.values[slot];
        cell.clear();
        if (with_defaults && node.default_value && !is_empty(*node.default_value)) cell.push_back(*node.default_value);
    } else {
        materialize_children(node.children, slot + "/", inst, with_defaults);
    }
}

inline void materialize_children(const std::vector<TemplateNode>& nodes, const std::string& prefix,
                                 MetadataInstance& inst, bool with_defaults) {
    for (const auto& node : nodes) {
        std::string base = prefix + node.key;
        if (node.cardinality.multi_valued()) {
            std::size_t count = std::max<std::size_t>(node.cardinality.min, 1);
            inst.repetitions[base] = count;
            for (std::size_t i = 0; i < count; ++i) materialize_slot(node, indexed(base, i), inst, with_defaults);
        } else {
            materialize_slot(node, base, inst, with_defaults);
        }
    }
}

struct Located {
    const TemplateNode* node = nullptr;
    std::string base;      // concrete path without the final index
    std::string concrete;  // concrete path including the final index, if any
    bool has_index = false;
};

/// Resolve a value path against template and current repetition counts.
/// When `allow_bare_last` the final multi-valued segment may omit its index
/// (node addressing for add_repetition).
inline Located locate(const Template& t, const MetadataInstance& inst, std::string_view path, bool allow_bare_last) {
    auto segments = parse_value_path(path);
    const std::vector<TemplateNode>* level = &t.children;
    std::string prefix;
    Located loc;
    auto unknown = [&](const std::string& why) {
        return Error("UNKNOWN_PATH", std::string(path) + ": " + why, std::string(path));
    };
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& seg = segments[i];
        bool last = i + 1 == segments.size();
        auto it = std::find_if(level->begin(), level->end(), [&](const TemplateNode& n) { return n.key == seg.key; });
        if (it == level->end()) throw unknown("no node '" + seg.key + "'");
        loc.node = &*it;
        loc.base = prefix + seg.key;
        loc.has_index = seg.index.has_value();
        if (it->cardinality.multi_valued()) {
            if (seg.index) {
                if (*seg.index >= inst.repetition_count(loc.base)) throw unknown("repetition index out of range");
                loc.concrete = indexed(loc.base, *seg.index);
            } else if (last && allow_bare_last) {
                loc.concrete = loc.base;
            } else {
                throw unknown("multi-valued node '" + seg.key + "' needs a repetition index");
            }
        } else {
            if (seg.index) throw unknown("single-valued node '" + seg.key + "' takes no index");
            loc.concrete = loc.base;
        }
        if (!last) {
            if (!it->is_element()) throw unknown("'" + seg.key + "' is a field, not an element");
            level = &it->children;
            prefix = loc.concrete + "/";
        }
    }
    return loc;
}

/// Validate and normalize a value for storage on `field`. Literals get the
/// field's datatype; authority identifiers are canonicalized.
inline std::vector<FieldValue> coerce(const TemplateNode& field, const FieldValue& v, const std::string& path) {
    if (is_empty(v)) return {};
    if (is_render_only(field))
        throw Error("READ_ONLY_FIELD", "image and video fields are render-only", path);
    auto mismatch = [&](const std::string& why) { return Error("TYPE_MISMATCH", why, path); };
    if (auto* lit = std::get_if<Literal>(&v)) {
        if (is_term_field(field)) return {Literal{lit->value, "xsd:string"}};
        auto datatype = expected_datatype(field);
        if (!lexically_valid(datatype, lit->value))
            throw mismatch("'" + lit->value + "' is not a valid " + datatype);
        return {Literal{lit->value, datatype}};
    }
    if (auto* term = std::get_if<Term>(&v)) {
        if (field.field_type != FieldType::controlled_term) throw mismatch("terms need a controlled_term field");
        if (!lexical::is_absolute_iri(term->iri) || term->label.empty())
            throw mismatch("terms need an absolute IRI and a label");
        return {*term};
    }
    const auto& auth = std::get<Authority>(v);
    if (field.field_type != FieldType::external_authority || !field.constraints.authority ||
        *field.constraints.authority != auth.source)
        throw mismatch("identifier source does not match the field's authority");
    if (auth.label.empty()) throw mismatch("identifiers need a label");
    std::string id;
    try {
        id = identifiers::canonicalize(auth.source, auth.id);
    } catch (const Error& e) {
        throw Error("INVALID_IDENTIFIER", e.what(), path);
    }
    return {Authority{auth.source, id, auth.label}};
}

/// Rewrite keys under `base[...]` after removing repetition `removed`.
template <class Map>
Map drop_and_shift(const Map& in, const std::string& base, std::size_t removed) {
    Map out;
    std::string open = base + "[";
    for (const auto& [key, value] : in) {
        if (!text::starts_with(key, open)) {
            out.emplace(key, value);
            continue;
        }
        auto close = key.find(']', open.size());
        auto idx = std::stoull(key.substr(open.size(), close - open.size()));
        if (idx == removed) continue;
        if (idx < removed) out.emplace(key, value);
        else out.emplace(indexed(base, idx - 1) + key.substr(close + 1), value);
    }
    return out;
}

}  // namespace detail

/// Fresh instance: defaults applied, each multi-valued node materialized with
/// max(min, 1) repetitions, everything else Empty.
inline MetadataInstance new_instance(const Template& t) {
    MetadataInstance inst;
    inst.template_id = t.id;
    inst.template_fingerprint = template_fingerprint(t);
    inst.created_at = inst.updated_at = text::utc_now_rfc3339();
    detail::materialize_children(t.children, "", inst, true);
    return inst;
}

/// Replace the value(s) at a field slot. Checkbox slots take any number of
/// literals; every other slot takes at most one value.
inline MetadataInstance set_values(const Template& t, const MetadataInstance& inst, std::string_view path,
                                   const std::vector<FieldValue>& vs) {
    auto loc = detail::locate(t, inst, path, false);
    if (!loc.node->is_field()) throw Error("UNKNOWN_PATH", std::string(path) + " is an element, not a field", std::string(path));
    std::vector<FieldValue> stored;
    for (const auto& v : vs) {
        auto c = detail::coerce(*loc.node, v, loc.concrete);
        stored.insert(stored.end(), c.begin(), c.end());
    }
    if (stored.size() > 1 && loc.node->field_type != FieldType::checkbox)
        throw Error("TYPE_MISMATCH", "only checkbox fields hold more than one value", loc.concrete);
    if (is_render_only(*loc.node)) throw Error("READ_ONLY_FIELD", "image and video fields are render-only", loc.concrete);
    MetadataInstance out = inst;
    out.values[loc.concrete] = std::move(stored);
    out.updated_at = text::utc_now_rfc3339();
    return out;
}

inline MetadataInstance set_value(const Template& t, const MetadataInstance& inst, std::string_view path,
                                  const FieldValue& v) {
    return set_values(t, inst, path, is_empty(v) ? std::vector<FieldValue>{} : std::vector<FieldValue>{v});
}

/// Append one repetition (defaults applied) to a multi-valued node addressed
/// without a trailing index, e.g. `authors` or `authors[0]/affiliations`.
inline MetadataInstance add_repetition(const Template& t, const MetadataInstance& inst, std::string_view path) {
    auto loc = detail::locate(t, inst, path, true);
    if (loc.has_index)
        throw Error("UNKNOWN_PATH", "add_repetition takes a node path without an index", std::string(path));
    const auto& card = loc.node->cardinality;
    std::size_t count = card.multi_valued() ? inst.repetition_count(loc.base) : 1;
    if (card.max && count + 1 > *card.max)
        throw Error("CARDINALITY_OVERFLOW",
                    "at most " + std::to_string(*card.max) + " repetitions allowed at " + loc.base, loc.base);
    MetadataInstance out = inst;
    detail::materialize_slot(*loc.node, indexed(loc.base, count), out, true);
    out.repetitions[loc.base] = count + 1;
    out.updated_at = text::utc_now_rfc3339();
    return out;
}

/// Remove repetition `node[i]`; higher repetitions shift down by one.
inline MetadataInstance remove_repetition(const Template& t, const MetadataInstance& inst, std::string_view path) {
    auto loc = detail::locate(t, inst, path, false);
    if (!loc.has_index)
        throw Error("UNKNOWN_PATH", "remove_repetition needs an indexed path such as authors[1]", std::string(path));
    std::size_t count = inst.repetition_count(loc.base);
    if (count <= loc.node->cardinality.min)
        throw Error("CARDINALITY_UNDERFLOW",
                    "at least " + std::to_string(loc.node->cardinality.min) + " repetitions required at " + loc.base,
                    loc.base);
    auto removed = parse_value_path(loc.concrete).back().index.value();
    MetadataInstance out = inst;
    out.values = detail::drop_and_shift(inst.values, loc.base, removed);
    out.repetitions = detail::drop_and_shift(inst.repetitions, loc.base, removed);
    out.repetitions[loc.base] = count - 1;
    out.updated_at = text::utc_now_rfc3339();
    return out;
}

/// Walk every materialized node instance in depth-first template order.
/// `on_repeat(node, base, count, hidden)` fires once per multi-valued node
/// before its repetitions; `on_slot(node, concrete, hidden)` fires for every
/// field slot and every element instance (before its children).
template <class OnRepeat, class OnSlot>
void walk_instance(const std::vector<TemplateNode>& nodes, const std::string& prefix, const MetadataInstance& inst,
                   bool hidden_parent, OnRepeat&& on_repeat, OnSlot&& on_slot) {
    for (const auto& node : nodes) {
        std::string base = prefix + node.key;
        bool hidden = hidden_parent || node.hidden;
        auto visit = [&](const std::string& concrete) {
            on_slot(node, concrete, hidden);
            if (node.is_element()) walk_instance(node.children, concrete + "/", inst, hidden, on_repeat, on_slot);
        };
        if (node.cardinality.multi_valued()) {
            std::size_t count = inst.repetition_count(base);
            on_repeat(node, base, count, hidden);
            for (std::size_t i = 0; i < count; ++i) visit(indexed(base, i));
        } else {
            visit(base);
        }
    }
}

template <class OnRepeat, class OnSlot>
void walk_instance(const Template& t, const MetadataInstance& inst, OnRepeat&& on_repeat, OnSlot&& on_slot) {
    walk_instance(t.children, "", inst, false, on_repeat, on_slot);
}

namespace detail {

inline bool subtree_empty(const MetadataInstance& inst, const TemplateNode& node, const std::string& slot) {
    if (node.is_field()) {
        auto it = inst.values.find(slot);
        return it == inst.values.end() || it->second.empty();
    }
    std::string prefix = slot + "/";
    for (auto it = inst.values.lower_bound(prefix); it != inst.values.end() && text::starts_with(it->first, prefix); ++it)
        if (!it->second.empty()) return false;
    return true;
}

inline void compact_nodes(const std::vector<TemplateNode>& nodes, const std::string& src_prefix,
                          const std::string& dst_prefix, const MetadataInstance& src, MetadataInstance& dst);

inline void compact_slot(const TemplateNode& node, const std::string& s, const std::string& d,
                         const MetadataInstance& src, MetadataInstance& dst) {
    if (node.is_field()) {
        auto it = src.values.find(s);
        dst.values[d] = it == src.values.end() ? std::vector<FieldValue>{} : it->second;
    } else {
        compact_nodes(node.children, s + "/", d + "/", src, dst);
    }
}

inline void compact_nodes(const std::vector<TemplateNode>& nodes, const std::string& src_prefix,
                          const std::string& dst_prefix, const MetadataInstance& src, MetadataInstance& dst) {
    for (const auto& node : nodes) {
        std::string sb = src_prefix + node.key, db = dst_prefix + node.key;
        if (!node.cardinality.multi_valued()) {
            compact_slot(node, sb, db, src, dst);
            continue;
        }
        std::vector<std::size_t> kept;
        for (std::size_t i = 0, n = src.repetition_count(sb); i < n; ++i)
            if (!subtree_empty(src, node, indexed(sb, i))) kept.push_back(i);
        std::size_t count = std::max<std::size_t>(kept.size(), std::max<std::size_t>(node.cardinality.min, 1));
        dst.repetitions[db] = count;
        for (std::size_t j = 0; j < count; ++j) {
            if (j < kept.size()) compact_slot(node, indexed(sb, kept[j]), indexed(db, j), src, dst);
            else materialize_slot(node, indexed(db, j), dst, false);
        }
    }
}

}  // namespace detail

/// The instance as it looks after a JSON-LD round trip: entirely-Empty
/// repetitions of multi-valued nodes are dropped, then each node is padded
/// back to max(min, 1) repetitions with Empty slots.
inline MetadataInstance compact(const Template& t, const MetadataInstance& inst) {
    MetadataInstance out;
    out.template_id = inst.template_id;
    out.template_fingerprint = inst.template_fingerprint;
    out.created_at = inst.created_at;
    out.updated_at = inst.updated_at;
    detail::compact_nodes(t.children, "", "", inst, out);
    return out;
}

}  // namespace metaforge
