#pragma once

#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "metaforge/instance.hpp"

namespace metaforge {

struct ValidationIssue {
    Severity severity = Severity::error;
    std::string path;
    std::string code;
    std::string message;
    std::optional<std::string> expected;
    std::optional<std::string> actual;
    bool operator==(const ValidationIssue&) const = default;
};

inline bool issue_order(const ValidationIssue& a, const ValidationIssue& b) {
    return std::tie(a.path, a.code, a.severity, a.message, a.expected, a.actual) <
           std::tie(b.path, b.code, b.severity, b.message, b.expected, b.actual);
}

inline bool has_errors(const std::vector<ValidationIssue>& issues) {
    return std::any_of(issues.begin(), issues.end(), [](const auto& i) { return i.severity == Severity::error; });
}

inline json to_json(const ValidationIssue& i) {
    json j{{"severity", to_string(i.severity)}, {"path", i.path}, {"code", i.code}, {"message", i.message}};
    if (i.expected) j["expected"] = *i.expected;
    if (i.actual) j["actual"] = *i.actual;
    return j;
}

inline json to_json(const std::vector<ValidationIssue>& issues) {
    json arr = json::array();
    for (const auto& i : issues) arr.push_back(to_json(i));
    return arr;
}

/// Carries the instance issues behind a VALIDATION_FAILED or parse failure.
class InstanceError : public Error {
public:
    InstanceError(std::string code, const std::string& message, std::vector<ValidationIssue> issues = {})
        : Error(std::move(code), message), issues_(std::move(issues)) {}
    const std::vector<ValidationIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ValidationIssue> issues_;
};

inline void require_fingerprint(const Template& t, const MetadataInstance& inst) {
    auto fp = template_fingerprint(t);
    if (inst.template_fingerprint != fp)
        throw Error("FINGERPRINT_MISMATCH", "instance was built for template fingerprint " + inst.template_fingerprint +
                                                ", not " + fp);
}

/// Check an instance against its template. Draft mode (`strict == false`)
/// reports missing required values and unresolved free text as warnings.
/// The result is sorted by path then code.
inline std::vector<ValidationIssue> validate_instance(const Template& t, const MetadataInstance& inst, bool strict) {
    require_fingerprint(t, inst);
    std::vector<ValidationIssue> out;
    std::set<std::string> visited;
    auto soft = strict ? Severity::error : Severity::warning;

    walk_instance(
        t, inst,
        [&](const TemplateNode& node, const std::string& base, std::size_t count, bool) {
            const auto& card = node.cardinality;
            if (count < card.min)
                out.push_back({Severity::error, base, "CARDINALITY_UNDERFLOW", "too few repetitions",
                               ">= " + std::to_string(card.min), std::to_string(count)});
            if (card.max && count > *card.max)
                out.push_back({Severity::error, base, "CARDINALITY_OVERFLOW", "too many repetitions",
                               "<= " + std::to_string(*card.max), std::to_string(count)});
        },
        [&](const TemplateNode& node, const std::string& slot, bool) {
            if (!node.is_field()) return;
            visited.insert(slot);
            auto it = inst.values.find(slot);
            const std::vector<FieldValue> none;
            const auto& vals = it == inst.values.end() ? none : it->second;
            if (vals.empty()) {
                if (node.required) out.push_back({soft, slot, "REQUIRED_MISSING", "required value is missing"});
                return;
            }
            if (vals.size() > 1 && node.field_type != FieldType::checkbox)
                out.push_back({Severity::error, slot, "TYPE_MISMATCH", "single-valued slot holds several values", "1",
                               std::to_string(vals.size())});
            for (const auto& v : vals)
                for (auto& f : check_value(node, v, strict))
                    out.push_back({f.severity, slot, std::move(f.code), std::move(f.message), std::move(f.expected),
                                   std::move(f.actual)});
        });

    for (const auto& [path, vals] : inst.values)
        if (!visited.count(path))
            out.push_back({Severity::warning, path, "UNKNOWN_FIELD", "value slot is not part of the template"});

    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return issue_order(a, b); });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace metaforge
