#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gotflow {

/// Ordered JSON tree that, unlike the usual DOM types, keeps duplicate object
/// keys side by side in document order. The workflow DSL needs this: real
/// documents carry two sibling "output" arrays per node and both must survive
/// until normalization classifies their entries.
class JsonValue {
public:
    struct Member;
    using Array = std::vector<JsonValue>;
    using Object = std::vector<Member>;
    using Storage = std::variant<std::nullptr_t, bool, std::int64_t, std::uint64_t,
                                 double, std::string, Array, Object>;

    JsonValue() : value(nullptr) {}
    JsonValue(Storage v) : value(std::move(v)) {}  // NOLINT(google-explicit-constructor)

    /// Parse a complete UTF-8 document. Throws ParseError with the byte
    /// offset on malformed input. Nesting deeper than 256 levels is rejected
    /// so arbitrary byte fuzz cannot exhaust the stack.
    static JsonValue parse(std::string_view text);

    bool is_null() const { return std::holds_alternative<std::nullptr_t>(value); }
    bool is_bool() const { return std::holds_alternative<bool>(value); }
    bool is_string() const { return std::holds_alternative<std::string>(value); }
    bool is_array() const { return std::holds_alternative<Array>(value); }
    bool is_object() const { return std::holds_alternative<Object>(value); }
    bool is_number() const {
        return std::holds_alternative<std::int64_t>(value) ||
               std::holds_alternative<std::uint64_t>(value) ||
               std::holds_alternative<double>(value);
    }

    const std::string& as_string() const { return std::get<std::string>(value); }
    bool as_bool() const { return std::get<bool>(value); }
    const Array& as_array() const { return std::get<Array>(value); }
    const Object& as_object() const { return std::get<Object>(value); }

    /// First member with the given key, or nullptr.
    const JsonValue* find(std::string_view key) const;

    /// Canonical text: 2-space indent, members in stored order, shortest
    /// round-trip number form. Appends to `out`.
    void write(std::string& out, int indent = 0) const;
    std::string dump() const;

    bool operator==(const JsonValue& other) const;

    Storage value;
};

struct JsonValue::Member {
    std::string key;
    JsonValue value;

    bool operator==(const Member& other) const = default;
};

/// JSON string escaping shared by every writer in the project.
void append_json_escaped(std::string& out, std::string_view s);

}  // namespace gotflow
