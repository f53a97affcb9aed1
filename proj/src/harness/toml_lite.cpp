#include "energylab/harness/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace energylab::toml {

double Value::as_number() const {
    if (is_integer()) return static_cast<double>(std::get<std::int64_t>(data));
    return std::get<double>(data);
}

const Value* Table::find(std::string_view key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return &v;
    }
    return nullptr;
}

namespace {

class LineParser {
public:
    LineParser(std::string_view text, int line) : text_(text), line_(line) {}

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }
    bool at_end_or_comment() {
        skip_ws();
        return pos_ >= text_.size() || text_[pos_] == '#';
    }
    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!consume(c)) fail(std::string("expected '") + c + "'");
    }
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

    std::string key() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                text_[pos_] == '-')) {
            ++pos_;
        }
        if (pos_ == start) fail("expected a key");
        return std::string(text_.substr(start, pos_ - start));
    }

    std::vector<std::string> dotted_key() {
        std::vector<std::string> parts{key()};
        while (consume('.')) parts.push_back(key());
        return parts;
    }

    Value value() {
        skip_ws();
        if (pos_ >= text_.size()) fail("missing value");
        const char c = text_[pos_];
        Value v;
        v.line = line_;
        if (c == '"') {
            v.data = string_literal();
        } else if (c == '[') {
            v.data = array();
        } else if (text_.substr(pos_, 4) == "true") {
            pos_ += 4;
            v.data = true;
        } else if (text_.substr(pos_, 5) == "false") {
            pos_ += 5;
            v.data = false;
        } else {
            number(v);
        }
        return v;
    }

private:
    std::string string_literal() {
        ++pos_;  // opening quote
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            char c = text_[pos_++];
            if (c == '\\') {
                if (pos_ >= text_.size()) fail("unterminated escape");
                const char e = text_[pos_++];
                switch (e) {
                    case 'n': c = '\n'; break;
                    case 't': c = '\t'; break;
                    case '"': c = '"'; break;
                    case '\\': c = '\\'; break;
                    default: fail(std::string("unsupported escape \\") + e);
                }
            }
            out.push_back(c);
        }
        if (pos_ >= text_.size()) fail("unterminated string");
        ++pos_;
        return out;
    }

    Value::Array array() {
        ++pos_;  // '['
        Value::Array out;
        while (true) {
            skip_ws();
            if (consume(']')) return out;
            out.push_back(value());
            if (consume(',')) continue;
            expect(']');
            return out;
        }
    }

    void number(Value& v) {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                       text_[pos_] == '.' || text_[pos_] == '-' ||
                                       text_[pos_] == '+' || text_[pos_] == '_')) {
            ++pos_;
        }
        std::string token;
        for (char ch : text_.substr(start, pos_ - start)) {
            if (ch != '_') token.push_back(ch);
        }
        if (token.empty()) fail("expected a value");
        const char* first = token.data();
        const char* last = token.data() + token.size();
        if (*first == '+') ++first;

        const bool looks_float = token.find_first_of(".eE") != std::string::npos ||
                                 token == "inf" || token == "nan";
        if (!looks_float) {
            std::int64_t i = 0;
            auto [p, ec] = std::from_chars(first, last, i);
            if (ec == std::errc() && p == last) {
                v.data = i;
                return;
            }
        }
        double d = 0.0;
        auto [p, ec] = std::from_chars(first, last, d);
        if (ec != std::errc() || p != last || !std::isfinite(d)) {
            fail("invalid value '" + token + "'");
        }
        v.data = d;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_;
};

Table* resolve_parent(Table& root, const std::vector<std::string>& path, int line) {
    Table* cur = &root;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (auto it = cur->arrays.find(path[i]); it != cur->arrays.end() && !it->second.empty()) {
            cur = &it->second.back();
        } else if (auto jt = cur->tables.find(path[i]); jt != cur->tables.end()) {
            cur = &jt->second;
        } else {
            throw ParseError(line, "parent table '" + path[i] + "' is not defined");
        }
    }
    return cur;
}

}  // namespace

Table parse(std::string_view text) {
    Table root;
    Table* current = &root;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

        LineParser p(raw, line_no);
        if (p.at_end_or_comment()) continue;

        if (p.consume('[')) {
            const bool is_array = p.consume('[');
            const auto path = p.dotted_key();
            p.expect(']');
            if (is_array) p.expect(']');
            if (!p.at_end_or_comment()) p.fail("unexpected text after table header");

            Table* parent = resolve_parent(root, path, line_no);
            const std::string& name = path.back();
            if (is_array) {
                if (parent->tables.count(name)) p.fail("'" + name + "' is already a table");
                auto& vec = parent->arrays[name];
                vec.emplace_back();
                vec.back().line = line_no;
                current = &vec.back();
            } else {
                if (parent->tables.count(name) || parent->arrays.count(name)) {
                    p.fail("table '" + name + "' defined twice");
                }
                Table& t = parent->tables[name];
                t.line = line_no;
                current = &t;
            }
            continue;
        }

        const std::string key = p.key();
        p.expect('=');
        Value v = p.value();
        if (!p.at_end_or_comment()) p.fail("unexpected text after value");
        if (current->find(key)) p.fail("duplicate key '" + key + "'");
        current->entries.emplace_back(key, std::move(v));
    }
    return root;
}

}  // namespace energylab::toml
