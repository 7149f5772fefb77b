#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "lcarena/errors.hpp"

namespace lcarena {

using Json = nlohmann::ordered_json;

// Canonical serialization: fixed key order (insertion order of the Json
// value), floating-point numbers printed with 17 significant digits so
// doubles round-trip bit-exactly and two dumps of the same value are
// byte-identical. indent < 0 emits a single line.
std::string dump_canonical(const Json& v, int indent = -1);

// Formats one double the canonical way ("%.17g", with ".0" appended when
// the result would otherwise read as an integer).
std::string format_double(double v);

Json parse_json(const std::string& text, const std::string& context);
Json load_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

// Field accessors with error messages that carry the parsing context.
const Json& require_field(const Json& obj, const std::string& key,
                          const std::string& context);
double require_double(const Json& obj, const std::string& key,
                      const std::string& context);
std::int64_t require_int(const Json& obj, const std::string& key,
                         const std::string& context);
std::string require_string(const Json& obj, const std::string& key,
                           const std::string& context);
bool require_bool(const Json& obj, const std::string& key,
                  const std::string& context);

}  // namespace lcarena
