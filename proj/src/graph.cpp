#include "gotflow/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "gotflow/errors.hpp"

namespace gotflow {

namespace {

std::string join_cycle(const std::vector<std::string>& cycle) {
    std::string out;
    for (const std::string& id : cycle) {
        if (!out.empty()) out.append(" -> ");
        out.append(id);
    }
    out.append(" -> ");
    out.append(cycle.front());
    return out;
}

// DFS over existing-node edges; returns one cycle rotated so the node with
// the smallest declaration index comes first, or empty if acyclic.
std::vector<std::string> find_cycle(const WorkflowGraph& graph) {
    const std::size_t n = graph.nodes.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const Edge& e : graph.edges) {
        auto from = graph.index_of.find(e.from);
        auto to = graph.index_of.find(e.to);
        if (from != graph.index_of.end() && to != graph.index_of.end()) {
            adj[from->second].push_back(to->second);
        }
    }

    enum class Mark { white, grey, black };
    std::vector<Mark> mark(n, Mark::white);
    std::vector<std::size_t> path;

    // Iterative DFS keeping the active path for witness extraction.
    struct Frame {
        std::size_t node;
        std::size_t next_child = 0;
    };
    for (std::size_t start = 0; start < n; ++start) {
        if (mark[start] != Mark::white) continue;
        std::vector<Frame> stack{{start}};
        mark[start] = Mark::grey;
        path.push_back(start);
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next_child < adj[f.node].size()) {
                const std::size_t child = adj[f.node][f.next_child++];
                if (mark[child] == Mark::grey) {
                    auto it = std::find(path.begin(), path.end(), child);
                    std::vector<std::size_t> cycle(it, path.end());
                    auto min_it = std::min_element(cycle.begin(), cycle.end());
                    std::rotate(cycle.begin(), min_it, cycle.end());
                    std::vector<std::string> ids;
                    for (std::size_t idx : cycle) ids.push_back(graph.nodes[idx].id);
                    return ids;
                }
                if (mark[child] == Mark::white) {
                    mark[child] = Mark::grey;
                    path.push_back(child);
                    stack.push_back({child});
                }
            } else {
                mark[f.node] = Mark::black;
                path.pop_back();
                stack.pop_back();
            }
        }
    }
    return {};
}

}  // namespace

const char* to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::static_edge: return "static";
        case EdgeKind::on_true: return "on_true";
        case EdgeKind::on_false: return "on_false";
    }
    return "?";
}

const char* to_string(Severity s) {
    switch (s) {
        case Severity::error: return "error";
        case Severity::warning: return "warning";
        case Severity::info: return "info";
    }
    return "?";
}

const FlowNode* WorkflowGraph::find(std::string_view id) const {
    auto it = index_of.find(std::string(id));
    return it == index_of.end() ? nullptr : &nodes[it->second];
}

WorkflowGraph build_graph(const WorkflowSpec& spec) {
    WorkflowGraph graph;
    graph.nodes = spec.nodes;
    graph.workflow_extra = spec.extra;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        graph.index_of.emplace(graph.nodes[i].id, i);
    }
    for (const FlowNode& node : graph.nodes) {
        if (node.kind == NodeKind::executor) {
            for (const std::string& target : node.next_nodes) {
                graph.edges.push_back({node.id, target, EdgeKind::static_edge});
            }
        } else {
            for (const ForwardPath& path : node.forward_paths) {
                const EdgeKind kind =
                    path.condition_result ? EdgeKind::on_true : EdgeKind::on_false;
                for (const std::string& target : path.next_nodes) {
                    graph.edges.push_back({node.id, target, kind});
                }
            }
        }
    }
    std::vector<bool> has_in(graph.nodes.size(), false);
    for (const Edge& e : graph.edges) {
        auto it = graph.index_of.find(e.to);
        if (it != graph.index_of.end()) has_in[it->second] = true;
    }
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        if (!has_in[i]) graph.entry_ids.push_back(graph.nodes[i].id);
    }
    return graph;
}

std::vector<Diagnostic> validate_graph(const WorkflowGraph& graph) {
    std::vector<Diagnostic> out;

    for (const Edge& e : graph.edges) {
        if (!graph.has_node(e.to)) {
            out.push_back({Severity::error, "unknown-target", e.from,
                           "unknown target id '" + e.to + "'"});
        }
    }

    for (const FlowNode& node : graph.nodes) {
        if (node.kind != NodeKind::decision_maker) continue;
        int true_paths = 0;
        int false_paths = 0;
        for (const ForwardPath& p : node.forward_paths) {
            (p.condition_result ? true_paths : false_paths) += 1;
        }
        if (true_paths == 0) {
            out.push_back({Severity::error, "missing-branch", node.id,
                           "decision maker lacks a condition_result=true forward path"});
        }
        if (false_paths == 0) {
            out.push_back({Severity::error, "missing-branch", node.id,
                           "decision maker lacks a condition_result=false forward path"});
        }
        if (true_paths > 1 || false_paths > 1) {
            out.push_back({Severity::error, "duplicate-branch", node.id,
                           "decision maker declares a condition_result more than once"});
        }
    }

    for (const FlowNode& node : graph.nodes) {
        int templates = 0;
        for (const InputParameter& p : node.inputs) {
            if (p.kind == InputKind::prompt_template) ++templates;
        }
        if (templates == 0) {
            out.push_back({Severity::error, "missing-prompt-template", node.id,
                           "node declares no prompt_template input"});
        } else if (templates > 1) {
            out.push_back({Severity::error, "multiple-prompt-templates", node.id,
                           "node declares more than one prompt_template input"});
        }
    }

    {
        std::map<std::string, std::vector<std::string>> writers;
        for (const FlowNode& node : graph.nodes) {
            for (const OutputBinding& b : node.outputs) {
                if (b.kind == OutputKind::variable) writers[b.name].push_back(node.id);
            }
        }
        for (const auto& [name, nodes] : writers) {
            if (nodes.size() > 1) {
                std::string list;
                for (const std::string& id : nodes) {
                    if (!list.empty()) list.append(", ");
                    list.append(id);
                }
                out.push_back({Severity::error, "duplicate-writer", nodes.front(),
                               "variable '" + name + "' is written by multiple nodes: " + list});
            }
        }

        // Condition leaves must read something that gets written; a decision
        // maker's own response stands in when nothing else does, so this is
        // advisory.
        for (const FlowNode& node : graph.nodes) {
            if (!node.condition) continue;
            std::vector<const Condition*> leaves{&*node.condition};
            for (std::size_t i = 0; i < leaves.size(); ++i) {
                if (leaves[i]->composed) {
                    for (const Condition& kid : leaves[i]->children) leaves.push_back(&kid);
                }
            }
            std::set<std::string> seen;
            for (const Condition* leaf : leaves) {
                if (leaf->composed) continue;
                const std::string& var = leaf->data_source.name;
                if (writers.count(var) == 0 && seen.insert(var).second) {
                    out.push_back({Severity::warning, "no-writer", node.id,
                                   "condition reads variable '" + var +
                                       "' that no node declares writing; the decision "
                                       "maker's own response will be used"});
                }
            }
        }
    }

    if (auto cycle = find_cycle(graph); !cycle.empty()) {
        out.push_back({Severity::error, "cycle", cycle.front(),
                       "workflow contains a cycle: " + join_cycle(cycle)});
    }

    {
        std::set<std::string> reachable(graph.entry_ids.begin(), graph.entry_ids.end());
        std::deque<std::string> frontier(graph.entry_ids.begin(), graph.entry_ids.end());
        std::multimap<std::string, std::string> adj;
        for (const Edge& e : graph.edges) {
            if (graph.has_node(e.to)) adj.emplace(e.from, e.to);
        }
        while (!frontier.empty()) {
            const std::string id = frontier.front();
            frontier.pop_front();
            auto [lo, hi] = adj.equal_range(id);
            for (auto it = lo; it != hi; ++it) {
                if (reachable.insert(it->second).second) frontier.push_back(it->second);
            }
        }
        for (const FlowNode& node : graph.nodes) {
            if (!reachable.count(node.id)) {
                out.push_back({Severity::warning, "unreachable", node.id,
                               "node is unreachable from every entry node"});
            }
        }
    }

    for (const auto& [key, value] : graph.workflow_extra) {
        out.push_back(
            {Severity::info, "unknown-key", "", "ignoring unknown key \"" + key + "\""});
    }
    for (const FlowNode& node : graph.nodes) {
        for (const auto& [key, value] : node.extra) {
            out.push_back({Severity::info, "unknown-key", node.id,
                           "ignoring unknown key \"" + key + "\""});
        }
    }

    return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::error; });
}

std::vector<std::string> topological_order(const WorkflowGraph& graph) {
    const std::size_t n = graph.nodes.size();
    std::vector<std::vector<std::size_t>> adj(n);
    std::vector<std::size_t> in_degree(n, 0);
    for (const Edge& e : graph.edges) {
        auto from = graph.index_of.find(e.from);
        auto to = graph.index_of.find(e.to);
        if (from == graph.index_of.end() || to == graph.index_of.end()) continue;
        adj[from->second].push_back(to->second);
        ++in_degree[to->second];
    }

    std::vector<std::size_t> level(n, 0);
    std::deque<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (in_degree[i] == 0) ready.push_back(i);
    }
    std::size_t processed = 0;
    while (!ready.empty()) {
        const std::size_t u = ready.front();
        ready.pop_front();
        ++processed;
        for (std::size_t v : adj[u]) {
            level[v] = std::max(level[v], level[u] + 1);
            if (--in_degree[v] == 0) ready.push_back(v);
        }
    }
    if (processed != n) {
        auto cycle = find_cycle(graph);
        throw CycleError("workflow contains a cycle: " + join_cycle(cycle), cycle);
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return level[a] != level[b] ? level[a] < level[b] : a < b;
    });
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t i : order) ids.push_back(graph.nodes[i].id);
    return ids;
}

std::string export_dot(const WorkflowGraph& graph) {
    auto quoted = [](const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') out.push_back('\\');
            out.push_back(c);
        }
        out.push_back('"');
        return out;
    };

    std::string out = "digraph workflow {\n";
    out.append("  rankdir=TB;\n");
    for (const FlowNode& node : graph.nodes) {
        out.append("  ");
        out.append(quoted(node.id));
        out.append(node.kind == NodeKind::decision_maker ? " [shape=diamond];\n"
                                                         : " [shape=box];\n");
    }
    for (const Edge& e : graph.edges) {
        out.append("  ");
        out.append(quoted(e.from));
        out.append(" -> ");
        out.append(quoted(e.to));
        if (e.kind == EdgeKind::on_true) {
            out.append(" [label=\"YES\"]");
        } else if (e.kind == EdgeKind::on_false) {
            out.append(" [label=\"NO\"]");
        }
        out.append(";\n");
    }
    out.append("}\n");
    return out;
}

std::vector<Diagnostic> collect_diagnostics(std::string_view workflow_text) {
    WorkflowSpec spec;
    try {
        spec = parse_workflow(workflow_text);
    } catch (const ParseError& ex) {
        return {{Severity::error, "parse", ex.node_id, ex.what()}};
    }
    return validate_graph(build_graph(spec));
}

}  // namespace gotflow
