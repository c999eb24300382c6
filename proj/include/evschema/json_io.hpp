#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace evschema {

using json = nlohmann::json;

/// Parses JSON text. Trailing commas before `}` or `]` are tolerated because
/// extractor output in the wild carries them.
json parse_json_lenient(std::string_view text, const std::string& origin = {});

std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename so readers never see a torn file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Canonical form: sorted keys, two-space indent, trailing newline.
std::string dump_canonical(const json& j);

// Typed field access with JSON-pointer locations in error messages.
const json& require_field(const json& obj, const char* key, const std::string& where);
std::string require_string(const json& obj, const char* key, const std::string& where);
std::string optional_string(const json& obj, const char* key, const std::string& where,
                            std::string fallback = {});
double require_number(const json& obj, const char* key, const std::string& where);

}  // namespace evschema
