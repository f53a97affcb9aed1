#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace energylab::toml {

/// Reader for the TOML subset used by sweep configs: `key = value` pairs,
/// `[table]` and `[[array.of.tables]]` headers, comments, and values that are
/// strings, integers, floats, booleans or single-line arrays of those.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct Value {
    using Array = std::vector<Value>;
    std::variant<bool, std::int64_t, double, std::string, Array> data;
    int line = 0;

    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_integer() const { return std::holds_alternative<std::int64_t>(data); }
    bool is_number() const { return is_integer() || std::holds_alternative<double>(data); }
    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_array() const { return std::holds_alternative<Array>(data); }

    double as_number() const;
    const std::string& as_string() const { return std::get<std::string>(data); }
    const Array& as_array() const { return std::get<Array>(data); }
    bool as_bool() const { return std::get<bool>(data); }
};

struct Table {
    int line = 0;
    std::vector<std::pair<std::string, Value>> entries;
    std::map<std::string, Table> tables;
    std::map<std::string, std::vector<Table>> arrays;

    const Value* find(std::string_view key) const;
};

Table parse(std::string_view text);

}  // namespace energylab::toml
