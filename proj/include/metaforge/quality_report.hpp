#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "metaforge/instance_validate.hpp"

namespace metaforge {

enum class FieldStatus { complete, missing, invalid, unresolved_term };

inline std::string_view to_string(FieldStatus s) {
    switch (s) {
        case FieldStatus::complete: return "complete";
        case FieldStatus::missing: return "missing";
        case FieldStatus::invalid: return "invalid";
        case FieldStatus::unresolved_term: return "unresolved_term";
    }
    return "complete";
}

struct FieldStatusEntry {
    std::string path;
    FieldStatus status = FieldStatus::missing;
    bool required = false;
};

struct QualityCounts {
    std::size_t required_total = 0;
    std::size_t required_filled = 0;
    std::size_t optional_total = 0;
    std::size_t optional_filled = 0;
    std::size_t invalid = 0;
};

struct QualityReport {
    std::string template_id;
    std::optional<std::string> instance_ref;
    std::string generated_at;
    std::vector<FieldStatusEntry> field_statuses;
    std::vector<ValidationIssue> issues;
    QualityCounts counts;
    double completeness = 1.0;  // required_filled / required_total, 1.0 when nothing is required
};

/// Per-slot completeness report. Each materialized field slot (one per
/// repetition) gets exactly one status; only required slots feed the
/// completeness ratio. Findings come from draft-mode validation.
inline QualityReport generate_report(const Template& t, const MetadataInstance& inst,
                                     std::optional<std::string> instance_ref = std::nullopt) {
    QualityReport r;
    r.template_id = t.id;
    r.instance_ref = std::move(instance_ref);
    r.generated_at = text::utc_now_rfc3339();
    r.issues = validate_instance(t, inst, false);

    walk_instance(
        t, inst, [](const TemplateNode&, const std::string&, std::size_t, bool) {},
        [&](const TemplateNode& node, const std::string& slot, bool) {
            if (!node.is_field()) return;
            FieldStatusEntry e{slot, FieldStatus::complete, node.required};
            auto it = inst.values.find(slot);
            bool empty = it == inst.values.end() || it->second.empty();
            bool has_error = std::any_of(r.issues.begin(), r.issues.end(), [&](const ValidationIssue& i) {
                return i.path == slot && i.severity == Severity::error;
            });
            bool free_text_term = !empty && is_term_field(node) &&
                                  std::any_of(it->second.begin(), it->second.end(),
                                              [](const FieldValue& v) { return std::holds_alternative<Literal>(v); });
            if (empty) e.status = FieldStatus::missing;
            else if (has_error) e.status = FieldStatus::invalid;
            else if (free_text_term) e.status = FieldStatus::unresolved_term;

            bool filled = e.status == FieldStatus::complete;
            if (node.required) {
                ++r.counts.required_total;
                if (filled) ++r.counts.required_filled;
            } else {
                ++r.counts.optional_total;
                if (filled) ++r.counts.optional_filled;
            }
            if (e.status == FieldStatus::invalid) ++r.counts.invalid;
            r.field_statuses.push_back(std::move(e));
        });

    r.completeness = r.counts.required_total == 0
                         ? 1.0
                         : static_cast<double>(r.counts.required_filled) / static_cast<double>(r.counts.required_total);
    return r;
}

inline json to_json(const QualityReport& r) {
    json statuses = json::array();
    for (const auto& s : r.field_statuses)
        statuses.push_back({{"path", s.path}, {"status", to_string(s.status)}, {"required", s.required}});
    json j{{"templateId", r.template_id},
           {"generatedAt", r.generated_at},
           {"fieldStatuses", std::move(statuses)},
           {"issues", to_json(r.issues)},
           {"counts",
            {{"requiredTotal", r.counts.required_total},
             {"requiredFilled", r.counts.required_filled},
             {"optionalTotal", r.counts.optional_total},
             {"optionalFilled", r.counts.optional_filled},
             {"invalid", r.counts.invalid}}},
           {"completeness", r.completeness}};
    if (r.instance_ref) j["instanceRef"] = *r.instance_ref;
    return j;
}

/// Line-oriented summary: a header, one `<status>\t<path>` line per field
/// that is not complete, and a totals line. Excludes generatedAt.
inline std::string render_report_text(const QualityReport& r) {
    std::ostringstream out;
    out << "quality report for " << r.template_id;
    if (r.instance_ref) out << " (instance " << *r.instance_ref << ")";
    out << "\n";
    for (const auto& s : r.field_statuses)
        if (s.status != FieldStatus::complete) out << to_string(s.status) << "\t" << s.path << "\n";
    out << "totals: required " << r.counts.required_filled << "/" << r.counts.required_total << ", optional "
        << r.counts.optional_filled << "/" << r.counts.optional_total << ", invalid " << r.counts.invalid
        << ", completeness " << text::format_double(r.completeness) << "\n";
    return out.str();
}

}  // namespace metaforge
