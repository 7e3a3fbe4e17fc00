#include "scatlab/cache.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace scatlab {

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return sha256_hex(ss.str());
}

FileCache::FileCache(std::filesystem::path dir, bool enabled)
    : dir_(std::move(dir)), enabled_(enabled) {
    if (enabled_) std::filesystem::create_directories(dir_);
}

std::optional<std::string> FileCache::load(const std::string& key) const {
    if (!enabled_) return std::nullopt;
    const auto data_path = dir_ / (key + ".dat");
    const auto sum_path = dir_ / (key + ".sha256");
    std::ifstream ds(data_path, std::ios::binary), ss(sum_path);
    if (!ds || !ss) return std::nullopt;
    std::ostringstream buf;
    buf << ds.rdbuf();
    std::string payload = buf.str();
    std::string expect;
    ss >> expect;
    if (sha256_hex(payload) != expect) return std::nullopt; // corrupt: recompute
    return payload;
}

void FileCache::store(const std::string& key, const std::string& payload) const {
    if (!enabled_) return;
    const auto tmp_data = dir_ / (key + ".dat.tmp");
    const auto tmp_sum = dir_ / (key + ".sha256.tmp");
    {
        std::ofstream ds(tmp_data, std::ios::binary);
        ds << payload;
        std::ofstream ss(tmp_sum);
        ss << sha256_hex(payload) << "\n";
    }
    std::filesystem::rename(tmp_data, dir_ / (key + ".dat"));
    std::filesystem::rename(tmp_sum, dir_ / (key + ".sha256"));
}

} // namespace scatlab
