#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace gotflow {

/// Layered name lookup, highest precedence first: node literals, then the
/// run's variable store, then the workflow parameter files merged in
/// declaration order. Holds pointers only; callers keep the maps alive.
class ParameterScope {
public:
    ParameterScope() = default;

    /// Layers ordered highest precedence first.
    explicit ParameterScope(std::vector<const std::map<std::string, std::string>*> layers)
        : layers_(std::move(layers)) {}

    void push_layer(const std::map<std::string, std::string>* layer) {
        layers_.push_back(layer);
    }

    /// First hit wins; nullptr when no layer defines the name.
    const std::string* lookup(std::string_view name) const;

private:
    std::vector<const std::map<std::string, std::string>*> layers_;
};

/// Placeholder names found in a template, duplicates removed, first
/// occurrence order. A placeholder is `#{` name `}` with an identifier name;
/// any other `#{` opening throws UnterminatedPlaceholder with its offset.
std::vector<std::string> extract_placeholders(std::string_view text);

/// Single-pass expansion: each placeholder is replaced by its resolved value
/// verbatim. Values are never re-scanned, so `#{` inside a value survives
/// as-is. Throws RenderError listing every unresolved name at once.
std::string render_template(std::string_view text, const ParameterScope& scope);

/// Resolve one name through the scope; throws NameNotFound otherwise.
std::string resolve(std::string_view name, const ParameterScope& scope);

}  // namespace gotflow
