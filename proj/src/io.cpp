#include "noisyspell/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace noisyspell {

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) {
        throw std::runtime_error("cannot format double");
    }
    return std::string(buf.data(), ptr);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

nlohmann::json seal_model(std::string_view kind, nlohmann::json payload) {
    nlohmann::json sealed;
    sealed["kind"] = std::string(kind);
    sealed["schema_version"] = kSchemaVersion;
    sealed["content_hash"] = sha256_hex(payload.dump());
    sealed["payload"] = std::move(payload);
    return sealed;
}

nlohmann::json open_model(std::string_view kind, const nlohmann::json& sealed) {
    if (!sealed.is_object() || !sealed.contains("kind") || !sealed.contains("payload")) {
        throw std::runtime_error("not a model file");
    }
    if (sealed.at("kind").get<std::string>() != kind) {
        throw std::runtime_error("expected a " + std::string(kind) + " model, got " +
                                 sealed.at("kind").get<std::string>());
    }
    const int version = sealed.value("schema_version", -1);
    if (version != kSchemaVersion) {
        throw std::runtime_error("unsupported schema version " + std::to_string(version) + " (expected " +
                                 std::to_string(kSchemaVersion) + ")");
    }
    const auto& payload = sealed.at("payload");
    if (sha256_hex(payload.dump()) != sealed.value("content_hash", std::string{})) {
        throw std::runtime_error("content hash mismatch in " + std::string(kind) + " model");
    }
    return payload;
}

std::string model_hash(const nlohmann::json& sealed) {
    return sealed.value("content_hash", std::string{});
}

} // namespace noisyspell
