#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace scatlab {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/** Single-writer-per-key file cache with atomic rename; readers only ever see
    complete files. Values carry a content checksum validated on load. */
class FileCache {
  public:
    explicit FileCache(std::filesystem::path dir, bool enabled = true);

    /** Returns the payload if the key is present and its checksum matches;
        corrupt entries are dropped (recompute path). */
    std::optional<std::string> load(const std::string& key) const;
    void store(const std::string& key, const std::string& payload) const;

    bool enabled() const { return enabled_; }
    const std::filesystem::path& dir() const { return dir_; }

  private:
    std::filesystem::path dir_;
    bool enabled_;
};

} // namespace scatlab
