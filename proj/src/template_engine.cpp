#include "gotflow/template_engine.hpp"

#include <set>

#include "gotflow/errors.hpp"

namespace gotflow {

namespace {

bool is_name_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

bool is_name_char(char c) { return is_name_start(c) || (c >= '0' && c <= '9'); }

struct Token {
    std::size_t begin;   // offset of '#'
    std::size_t end;     // offset one past '}'
    std::string_view name;
};

// Shared scanner; throws on any `#{` that does not form a valid placeholder.
std::vector<Token> scan(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i + 1 < text.size()) {
        if (text[i] != '#' || text[i + 1] != '{') {
            ++i;
            continue;
        }
        const std::size_t open = i;
        std::size_t j = i + 2;
        while (j < text.size() && is_name_char(text[j])) ++j;
        const std::string_view name = text.substr(open + 2, j - (open + 2));
        if (j >= text.size() || text[j] != '}' || name.empty() || !is_name_start(name[0])) {
            throw UnterminatedPlaceholder(
                "malformed placeholder opening at byte " + std::to_string(open), open);
        }
        tokens.push_back({open, j + 1, name});
        i = j + 1;
    }
    return tokens;
}

}  // namespace

const std::string* ParameterScope::lookup(std::string_view name) const {
    const std::string key(name);
    for (const auto* layer : layers_) {
        if (layer == nullptr) continue;
        auto it = layer->find(key);
        if (it != layer->end()) return &it->second;
    }
    return nullptr;
}

std::vector<std::string> extract_placeholders(std::string_view text) {
    std::vector<std::string> out;
    std::set<std::string, std::less<>> seen;
    for (const Token& t : scan(text)) {
        if (seen.insert(std::string(t.name)).second) {
            out.emplace_back(t.name);
        }
    }
    return out;
}

std::string render_template(std::string_view text, const ParameterScope& scope) {
    const std::vector<Token> tokens = scan(text);

    std::vector<std::string> unresolved;
    std::set<std::string> reported;
    for (const Token& t : tokens) {
        if (scope.lookup(t.name) == nullptr && reported.insert(std::string(t.name)).second) {
            unresolved.emplace_back(t.name);
        }
    }
    if (!unresolved.empty()) {
        std::string names;
        for (const std::string& n : unresolved) {
            if (!names.empty()) names.append(", ");
            names.append(n);
        }
        throw RenderError("unresolved template parameters: " + names, unresolved);
    }

    std::string out;
    out.reserve(text.size());
    std::size_t copied = 0;
    for (const Token& t : tokens) {
        out.append(text.substr(copied, t.begin - copied));
        out.append(*scope.lookup(t.name));
        copied = t.end;
    }
    out.append(text.substr(copied));
    return out;
}

std::string resolve(std::string_view name, const ParameterScope& scope) {
    const std::string* value = scope.lookup(name);
    if (value == nullptr) throw NameNotFound(std::string(name));
    return *value;
}

}  // namespace gotflow
