#include "lcarena/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace lcarena {

std::string format_double(double v) {
  if (!std::isfinite(v)) {
    throw ValidationError("cannot serialize non-finite number");
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Keep the value float-typed on re-parse.
  if (std::strcspn(buf, ".eEn") == std::strlen(buf)) {
    std::strcat(buf, ".0");
  }
  return buf;
}

namespace {

void dump_rec(std::string& out, const Json& v, int indent, int depth) {
  const auto newline_pad = [&](int d) {
    if (indent >= 0) {
      out += '\n';
      out.append(static_cast<std::size_t>(indent * d), ' ');
    }
  };
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline_pad(depth + 1);
        out += Json(it.key()).dump();
        out += indent >= 0 ? ": " : ":";
        dump_rec(out, it.value(), indent, depth + 1);
      }
      newline_pad(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ',';
        first = false;
        newline_pad(depth + 1);
        dump_rec(out, item, indent, depth + 1);
      }
      newline_pad(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += format_double(v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

}  // namespace

std::string dump_canonical(const Json& v, int indent) {
  std::string out;
  dump_rec(out, v, indent, 0);
  if (indent >= 0) out += '\n';
  return out;
}

Json parse_json(const std::string& text, const std::string& context) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(context + ": invalid JSON: " + e.what());
  }
}

Json load_json_file(const std::filesystem::path& path) {
  return parse_json(read_text_file(path), path.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open for writing: " + path.string());
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open for reading: " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) {
    throw IoError("read failed: " + path.string());
  }
  return ss.str();
}

const Json& require_field(const Json& obj, const std::string& key,
                          const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError(context + ": missing field '" + key + "'");
  }
  return *it;
}

double require_double(const Json& obj, const std::string& key,
                      const std::string& context) {
  const Json& v = require_field(obj, key, context);
  if (!v.is_number()) {
    throw ValidationError(context + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

std::int64_t require_int(const Json& obj, const std::string& key,
                         const std::string& context) {
  const Json& v = require_field(obj, key, context);
  if (!v.is_number_integer()) {
    throw ValidationError(context + ": field '" + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

std::string require_string(const Json& obj, const std::string& key,
                           const std::string& context) {
  const Json& v = require_field(obj, key, context);
  if (!v.is_string()) {
    throw ValidationError(context + ": field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

bool require_bool(const Json& obj, const std::string& key,
                  const std::string& context) {
  const Json& v = require_field(obj, key, context);
  if (!v.is_boolean()) {
    throw ValidationError(context + ": field '" + key + "' must be a boolean");
  }
  return v.get<bool>();
}

}  // namespace lcarena
