#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

#include "metaforge/service/storage.hpp"
#include "metaforge/text.hpp"

namespace metaforge::service {

struct StoredInstance {
    std::string instance_id;
    std::string template_id;
    std::string document;  // exact request bytes
    std::string stored_at;
    bool draft = false;
};

/// Demo host-side store: `<data_dir>/instances/<id>.jsonld` holds the bytes
/// as received, `<id>.meta.json` the envelope. Memory-only without a data_dir.
class InstanceStore {
public:
    explicit InstanceStore(fs::path data_dir = {}) : dir_(data_dir.empty() ? fs::path{} : data_dir / "instances") {}

    StoredInstance put(const std::string& template_id, std::string document, bool draft) {
        StoredInstance s{new_instance_id(), template_id, std::move(document), text::utc_now_rfc3339(), draft};
        if (!dir_.empty()) {
            write_file_atomic(dir_ / (s.instance_id + ".jsonld"), s.document);
            nlohmann::json meta{{"instanceId", s.instance_id},
                                {"templateId", s.template_id},
                                {"storedAt", s.stored_at},
                                {"draft", s.draft}};
            write_file_atomic(dir_ / (s.instance_id + ".meta.json"), meta.dump());
        }
        std::lock_guard lock(mu_);
        cache_[s.instance_id] = s;
        return s;
    }

    StoredInstance get(const std::string& instance_id) const {
        {
            std::lock_guard lock(mu_);
            if (auto it = cache_.find(instance_id); it != cache_.end()) return it->second;
        }
        bool plausible = !instance_id.empty() && std::all_of(instance_id.begin(), instance_id.end(), [](char c) {
            return (c >= 'a' && c <= 'z') || (c >= '2' && c <= '7');
        });
        if (plausible && !dir_.empty()) {
            auto doc = read_file(dir_ / (instance_id + ".jsonld"));
            auto meta_bytes = read_file(dir_ / (instance_id + ".meta.json"));
            if (doc && meta_bytes) {
                auto meta = nlohmann::json::parse(*meta_bytes, nullptr, false);
                if (meta.is_object()) {
                    StoredInstance s{instance_id, meta.value("templateId", ""), std::move(*doc),
                                     meta.value("storedAt", ""), meta.value("draft", false)};
                    std::lock_guard lock(mu_);
                    cache_[instance_id] = s;
                    return s;
                }
            }
        }
        throw Error("NOT_FOUND", "no stored instance " + instance_id);
    }

private:
    fs::path dir_;
    mutable std::mutex mu_;
    mutable std::map<std::string, StoredInstance> cache_;
};

}  // namespace metaforge::service
