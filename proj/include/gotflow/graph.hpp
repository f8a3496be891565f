#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gotflow/dsl.hpp"

namespace gotflow {

enum class EdgeKind { static_edge, on_true, on_false };
enum class Severity { error, warning, info };

const char* to_string(EdgeKind k);
const char* to_string(Severity s);

struct Edge {
    std::string from;
    std::string to;
    EdgeKind kind = EdgeKind::static_edge;

    bool operator==(const Edge&) const = default;
};

struct Diagnostic {
    Severity severity = Severity::error;
    std::string code;     // short stable identifier, e.g. "unknown-target"
    std::string node_id;  // empty when not tied to one node
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

/// Directed thought-graph derived from a spec. Edges come only from
/// next_nodes and forward_paths; entry nodes are those with in-degree 0, in
/// declaration order. Immutable once built.
struct WorkflowGraph {
    std::vector<FlowNode> nodes;  // declaration order
    std::unordered_map<std::string, std::size_t> index_of;
    std::vector<Edge> edges;  // derivation order
    std::vector<std::string> entry_ids;
    ExtraFields workflow_extra;  // unknown top-level keys, for diagnostics

    const FlowNode* find(std::string_view id) const;
    bool has_node(std::string_view id) const { return index_of.count(std::string(id)) > 0; }
};

/// Derive the graph. Dangling edge targets are kept as edges to missing ids;
/// validate_graph reports them.
WorkflowGraph build_graph(const WorkflowSpec& spec);

/// Static checks before any execution. Errors: unknown edge target, directed
/// cycle (with one witness), a decision maker whose forward paths do not
/// cover true and false exactly once, a node without exactly one
/// prompt_template input, two declared writers of one variable. Warnings:
/// node unreachable from every entry, a condition reading a variable that no
/// node declares writing (the decision maker's own response covers it at run
/// time). Unknown document keys surface as info diagnostics.
std::vector<Diagnostic> validate_graph(const WorkflowGraph& graph);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// Stable order: nodes sorted by (longest distance from an entry,
/// declaration index), so every edge goes forward and ties follow the
/// document. Throws CycleError with a witness cycle.
std::vector<std::string> topological_order(const WorkflowGraph& graph);

/// Graphviz text: executors as boxes, decision makers as diamonds, branch
/// edges labeled YES / NO.
std::string export_dot(const WorkflowGraph& graph);

/// Convenience for the CLI and the mutation tests: parse + build + validate,
/// folding a ParseError into a single error diagnostic instead of throwing.
std::vector<Diagnostic> collect_diagnostics(std::string_view workflow_text);

}  // namespace gotflow
