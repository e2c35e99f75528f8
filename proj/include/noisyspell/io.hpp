#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace noisyspell {

inline constexpr int kSchemaVersion = 1;

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Wraps a model payload with its kind, schema version and a hash of the
/// payload's canonical serialization.
nlohmann::json seal_model(std::string_view kind, nlohmann::json payload);

/// Checks kind, schema version and content hash; returns the payload.
/// Throws std::runtime_error on any mismatch.
nlohmann::json open_model(std::string_view kind, const nlohmann::json& sealed);

/// Hash recorded in a sealed model file.
std::string model_hash(const nlohmann::json& sealed);

} // namespace noisyspell
