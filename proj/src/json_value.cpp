#include "gotflow/json_value.hpp"

#include <charconv>
#include <cstdio>

#include <json.hpp>

#include "gotflow/errors.hpp"

namespace gotflow {

namespace {

constexpr int kMaxDepth = 256;

// SAX handler assembling a JsonValue tree. Object members are appended, never
// merged, so duplicate keys stay visible to the DSL normalizer.
class TreeBuilder {
public:
    JsonValue take_root() { return std::move(root_); }

    bool null() { return emplace(nullptr); }
    bool boolean(bool v) { return emplace(v); }
    bool number_integer(std::int64_t v) { return emplace(v); }
    bool number_unsigned(std::uint64_t v) { return emplace(v); }
    bool number_float(double v, const std::string&) { return emplace(v); }
    bool string(std::string& v) { return emplace(std::move(v)); }
    bool binary(nlohmann::json::binary_t&) { return fail("binary values are not valid JSON"); }

    bool start_object(std::size_t) {
        if (static_cast<int>(stack_.size()) >= kMaxDepth) return fail("document nested too deeply");
        stack_.push_back({JsonValue(JsonValue::Object{}), take_pending()});
        return true;
    }

    bool key(std::string& k) {
        pending_key_ = std::move(k);
        return true;
    }

    bool end_object() { return pop(); }

    bool start_array(std::size_t) {
        if (static_cast<int>(stack_.size()) >= kMaxDepth) return fail("document nested too deeply");
        stack_.push_back({JsonValue(JsonValue::Array{}), take_pending()});
        return true;
    }

    bool end_array() { return pop(); }

    bool parse_error(std::size_t position, const std::string&, const nlohmann::json::exception& ex) {
        if (error_.empty()) {
            error_ = ex.what();
            error_pos_ = position;
        }
        return false;
    }

    const std::string& error() const { return error_; }
    std::size_t error_pos() const { return error_pos_; }

private:
    struct StackEntry {
        JsonValue node;
        std::string key_in_parent;  // captured when the container opened
    };

    bool fail(std::string msg) {
        error_ = std::move(msg);
        error_pos_ = 0;
        return false;
    }

    std::string take_pending() {
        std::string key = std::move(pending_key_);
        pending_key_.clear();
        return key;
    }

    bool emplace(JsonValue::Storage v) {
        JsonValue node(std::move(v));
        if (stack_.empty()) {
            root_ = std::move(node);
            return true;
        }
        return attach(std::move(node), take_pending());
    }

    bool attach(JsonValue node, std::string key) {
        JsonValue& parent = stack_.back().node;
        if (parent.is_array()) {
            std::get<JsonValue::Array>(parent.value).push_back(std::move(node));
        } else {
            std::get<JsonValue::Object>(parent.value)
                .push_back(JsonValue::Member{std::move(key), std::move(node)});
        }
        return true;
    }

    bool pop() {
        StackEntry done = std::move(stack_.back());
        stack_.pop_back();
        if (stack_.empty()) {
            root_ = std::move(done.node);
            return true;
        }
        return attach(std::move(done.node), std::move(done.key_in_parent));
    }

    std::vector<StackEntry> stack_;
    std::string pending_key_;
    JsonValue root_;
    std::string error_;
    std::size_t error_pos_ = 0;
};

void append_number(std::string& out, double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    std::string_view text(buf, static_cast<std::size_t>(res.ptr - buf));
    out.append(text);
    // Ensure the token still reads as a floating literal after round-trip.
    if (text.find('.') == std::string_view::npos && text.find('e') == std::string_view::npos &&
        text.find("inf") == std::string_view::npos && text.find("nan") == std::string_view::npos) {
        out.append(".0");
    }
}

void append_indent(std::string& out, int indent) {
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
}

}  // namespace

JsonValue JsonValue::parse(std::string_view text) {
    TreeBuilder builder;
    const bool ok = nlohmann::json::sax_parse(text.begin(), text.end(), &builder);
    if (!ok) {
        std::string msg = builder.error().empty() ? "JSON parse failed" : builder.error();
        throw ParseError(msg, builder.error_pos());
    }
    return builder.take_root();
}

const JsonValue* JsonValue::find(std::string_view key) const {
    if (!is_object()) return nullptr;
    for (const Member& m : as_object()) {
        if (m.key == key) return &m.value;
    }
    return nullptr;
}

void JsonValue::write(std::string& out, int indent) const {
    struct Writer {
        std::string& out;
        int indent;

        void operator()(std::nullptr_t) const { out.append("null"); }
        void operator()(bool v) const { out.append(v ? "true" : "false"); }
        void operator()(std::int64_t v) const { out.append(std::to_string(v)); }
        void operator()(std::uint64_t v) const { out.append(std::to_string(v)); }
        void operator()(double v) const { append_number(out, v); }
        void operator()(const std::string& v) const { append_json_escaped(out, v); }
        void operator()(const Array& arr) const {
            if (arr.empty()) {
                out.append("[]");
                return;
            }
            out.push_back('[');
            for (std::size_t i = 0; i < arr.size(); ++i) {
                out.push_back('\n');
                append_indent(out, indent + 1);
                arr[i].write(out, indent + 1);
                if (i + 1 < arr.size()) out.push_back(',');
            }
            out.push_back('\n');
            append_indent(out, indent);
            out.push_back(']');
        }
        void operator()(const Object& obj) const {
            if (obj.empty()) {
                out.append("{}");
                return;
            }
            out.push_back('{');
            for (std::size_t i = 0; i < obj.size(); ++i) {
                out.push_back('\n');
                append_indent(out, indent + 1);
                append_json_escaped(out, obj[i].key);
                out.append(": ");
                obj[i].value.write(out, indent + 1);
                if (i + 1 < obj.size()) out.push_back(',');
            }
            out.push_back('\n');
            append_indent(out, indent);
            out.push_back('}');
        }
    };
    std::visit(Writer{out, indent}, value);
}

std::string JsonValue::dump() const {
    std::string out;
    write(out, 0);
    return out;
}

bool JsonValue::operator==(const JsonValue& other) const {
    return value == other.value;
}

void append_json_escaped(std::string& out, std::string_view s) {
    out.push_back('"');
    for (unsigned char c : s) {
        switch (c) {
            case '"': out.append("\\\""); break;
            case '\\': out.append("\\\\"); break;
            case '\b': out.append("\\b"); break;
            case '\f': out.append("\\f"); break;
            case '\n': out.append("\\n"); break;
            case '\r': out.append("\\r"); break;
            case '\t': out.append("\\t"); break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out.append(buf);
                } else {
                    out.push_back(static_cast<char>(c));
                }
        }
    }
    out.push_back('"');
}

}  // namespace gotflow
