#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

namespace oausa::config {

using KvMap = std::map<std::string, std::string>;

// Flat "key = value" text: one pair per line, '#' starts a comment, blank
// lines ignored, duplicate keys rejected.
KvMap parse_kv_text(const std::string& text);
KvMap parse_kv_file(const std::string& path);

// Typed access that tracks which keys were consumed; finish() rejects
// anything unknown so config typos fail loudly.
class KvReader {
public:
    explicit KvReader(KvMap map) : map_(std::move(map)) {}

    bool has(const std::string& key) const { return map_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback);
    double get_double(const std::string& key, double fallback);
    int get_int(const std::string& key, int fallback);
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
    bool get_bool(const std::string& key, bool fallback);

    // throws listing all keys never consumed
    void finish() const;

private:
    const std::string* find(const std::string& key);

    KvMap map_;
    std::set<std::string> consumed_;
};

}  // namespace oausa::config
