#pragma once

#include <chrono>
#include <functional>
#include <list>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>

namespace metaforge::gateway {

using Clock = std::function<std::chrono::steady_clock::time_point()>;

inline Clock steady_clock_source() {
    return [] { return std::chrono::steady_clock::now(); };
}

/// String-keyed cache with a fixed time-to-live and LRU eviction. All
/// operations take one mutex, so concurrent readers and writers are safe.
template <class V>
class TtlLruCache {
public:
    TtlLruCache(std::chrono::steady_clock::duration ttl, std::size_t capacity, Clock clock = steady_clock_source())
        : ttl_(ttl), capacity_(capacity), clock_(std::move(clock)) {}

    std::optional<V> get(const std::string& key) {
        std::lock_guard lock(mu_);
        auto it = index_.find(key);
        if (it == index_.end()) return std::nullopt;
        if (clock_() >= it->second->expires_at) {
            order_.erase(it->second);
            index_.erase(it);
            return std::nullopt;
        }
        order_.splice(order_.begin(), order_, it->second);
        return it->second->value;
    }

    void put(const std::string& key, V value) {
        if (capacity_ == 0) return;
        std::lock_guard lock(mu_);
        if (auto it = index_.find(key); it != index_.end()) {
            order_.erase(it->second);
            index_.erase(it);
        }
        order_.push_front({key, std::move(value), clock_() + ttl_});
        index_[key] = order_.begin();
        while (index_.size() > capacity_) {
            index_.erase(order_.back().key);
            order_.pop_back();
        }
    }

    std::size_t size() const {
        std::lock_guard lock(mu_);
        return index_.size();
    }

private:
    struct Entry {
        std::string key;
        V value;
        std::chrono::steady_clock::time_point expires_at;
    };

    std::chrono::steady_clock::duration ttl_;
    std::size_t capacity_;
    Clock clock_;
    mutable std::mutex mu_;
    std::list<Entry> order_;
    std::unordered_map<std::string, typename std::list<Entry>::iterator> index_;
};

}  // namespace metaforge::gateway
