#pragma once

#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "metaforge/service/storage.hpp"
#include "metaforge/template_check.hpp"

namespace metaforge::service {

/// Immutable once registered; a new document under the same id is a new entry.
struct TemplateRegistryEntry {
    std::string id;
    std::string fingerprint;
    json document;  // canonical template JSON
    std::string registered_at;
    std::uint64_t sequence = 0;
    Template tmpl;
};

using EntryPtr = std::shared_ptr<const TemplateRegistryEntry>;

struct Registration {
    EntryPtr entry;
    bool created = false;
};

inline json entry_summary(const TemplateRegistryEntry& e) {
    return json{{"id", e.id}, {"fingerprint", e.fingerprint}, {"registeredAt", e.registered_at}};
}

/// Template registry backed by one envelope file per fingerprint under
/// `<data_dir>/templates/`. With an empty data_dir it lives in memory only.
/// Readers copy the current snapshot pointer and never block on writers.
class TemplateRegistry {
public:
    explicit TemplateRegistry(fs::path data_dir = {}) : dir_(data_dir.empty() ? fs::path{} : data_dir / "templates") {
        snapshot_ = std::make_shared<const Map>();
        if (!dir_.empty()) load();
    }

    /// Validate and store. Identical fingerprint → existing entry (created=false).
    /// Same id with a different document → ID_CONFLICT unless `force`.
    Registration register_template(const json& doc, bool force = false) {
        auto issues = check_template_document(doc);
        if (has_errors(issues)) {
            bool dup_only = std::all_of(issues.begin(), issues.end(), [](const TemplateIssue& i) {
                return i.severity != Severity::error || i.code == "DUPLICATE_KEY";
            });
            throw TemplateError("SCHEMA_VIOLATION",
                                dup_only ? "template has duplicate sibling keys" : "template failed validation",
                                std::move(issues));
        }
        auto t = parse_template(doc);
        auto fp = template_fingerprint(t);

        std::lock_guard lock(write_mu_);
        auto current = snapshot();
        if (auto it = current->find(t.id); it != current->end()) {
            if (it->second->fingerprint == fp) return {it->second, false};
            if (!force)
                throw Error("ID_CONFLICT", "template " + t.id + " is already registered with fingerprint " +
                                               it->second->fingerprint);
        }
        auto entry = std::make_shared<TemplateRegistryEntry>();
        entry->id = t.id;
        entry->fingerprint = fp;
        entry->document = to_canonical_json(t);
        entry->registered_at = text::utc_now_rfc3339();
        entry->sequence = ++sequence_;
        entry->tmpl = std::move(t);
        if (!dir_.empty()) {
            json envelope{{"id", entry->id},
                          {"fingerprint", entry->fingerprint},
                          {"registeredAt", entry->registered_at},
                          {"sequence", entry->sequence},
                          {"document", entry->document}};
            write_file_atomic(dir_ / (fp + ".json"), envelope.dump());
        }
        auto next = std::make_shared<Map>(*current);
        (*next)[entry->id] = entry;
        publish(std::move(next));
        return {entry, true};
    }

    EntryPtr get(const std::string& id) const {
        auto s = snapshot();
        auto it = s->find(id);
        if (it == s->end()) throw Error("UNKNOWN_TEMPLATE", "no template registered with id " + id);
        return it->second;
    }

    std::vector<EntryPtr> list() const {
        auto s = snapshot();
        std::vector<EntryPtr> out;
        for (const auto& [_, e] : *s) out.push_back(e);
        return out;
    }

    std::size_t size() const { return snapshot()->size(); }

private:
    using Map = std::map<std::string, EntryPtr>;

    std::shared_ptr<const Map> snapshot() const {
        std::lock_guard lock(snap_mu_);
        return snapshot_;
    }

    void publish(std::shared_ptr<const Map> next) {
        std::lock_guard lock(snap_mu_);
        snapshot_ = std::move(next);
    }

    // Latest sequence per id wins; files whose fingerprint does not match a
    // recomputation are skipped.
    void load() {
        if (!fs::exists(dir_)) return;
        auto map = std::make_shared<Map>();
        std::vector<fs::path> files;
        for (const auto& f : fs::directory_iterator(dir_))
            if (f.path().extension() == ".json") files.push_back(f.path());
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            auto bytes = read_file(file);
            json env = bytes ? json::parse(*bytes, nullptr, false) : json();
            if (env.is_discarded() || !env.is_object() || !env.contains("document")) {
                std::cerr << "registry: skipping unreadable " << file.string() << "\n";
                continue;
            }
            try {
                auto entry = std::make_shared<TemplateRegistryEntry>();
                entry->tmpl = parse_template(env["document"]);
                entry->id = entry->tmpl.id;
                entry->fingerprint = template_fingerprint(entry->tmpl);
                if (entry->fingerprint != env.value("fingerprint", "")) {
                    std::cerr << "registry: fingerprint mismatch in " << file.string() << ", skipped\n";
                    continue;
                }
                entry->document = to_canonical_json(entry->tmpl);
                entry->registered_at = env.value("registeredAt", "");
                entry->sequence = env.value("sequence", std::uint64_t{0});
                sequence_ = std::max(sequence_, entry->sequence);
                auto& slot = (*map)[entry->id];
                if (!slot || slot->sequence < entry->sequence) slot = entry;
            } catch (const Error& e) {
                std::cerr << "registry: skipping " << file.string() << ": " << e.what() << "\n";
            }
        }
        publish(std::move(map));
    }

    fs::path dir_;
    mutable std::mutex snap_mu_;
    std::mutex write_mu_;
    std::shared_ptr<const Map> snapshot_;
    std::uint64_t sequence_ = 0;
};

}  // namespace metaforge::service
