#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gotflow/backend.hpp"
#include "gotflow/dsl.hpp"
#include "gotflow/graph.hpp"
#include "gotflow/run_store.hpp"

namespace gotflow {

struct RunConfig {
    int max_concurrency = 1;  // 1 is the reference semantics
    std::optional<std::filesystem::path> output_dir_override;
    std::map<std::string, std::string> env;  // ${NAME} expansion
    GenerationSettings settings;
    bool record_cassette = true;

    // Replay support: adopt the identity of a previous run so the new trace
    // can be compared byte for byte.
    std::optional<std::string> run_id_override;
    std::optional<std::string> started_override;
    std::optional<std::string> finished_override;
};

/// Mutable context of one run. Variables are single-assignment; a node
/// leaves pending exactly once; skipped nodes write nothing.
struct RunState {
    std::map<std::string, std::string> variables;
    std::map<std::string, NodeStatus> status;
    std::set<std::string> frontier;  // ids currently ready to resolve
    std::map<std::string, std::string> parameters;  // merged parameter files
    std::map<std::string, std::string> env;
    std::filesystem::path run_dir;  // resolved output directory for this run
    std::set<std::string> declared_writers;  // variables some node declares writing
    GenerationSettings settings;
};

enum class FailureKind { validation, no_entry, node_failure };

struct RunFailure {
    FailureKind kind = FailureKind::node_failure;
    std::string node_id;  // empty for run-level failures
    std::string message;
};

/// Result of run_workflow: the (possibly partial) trace plus the failure
/// that ended the run early, if any.
struct RunOutcome {
    RunTrace trace;
    std::filesystem::path run_dir;
    std::map<std::string, std::string> variables;
    std::map<std::string, NodeStatus> status;
    std::optional<RunFailure> failure;

    bool ok() const { return !failure.has_value(); }
};

/// Execute a workflow end to end. Entry nodes all start; a node runs once
/// every predecessor is resolved and at least one taken edge reaches it;
/// nodes reachable only through not-taken branches are skipped. The first
/// node failure aborts the run (in-flight work finishes, the rest stays
/// pending). Ready nodes are dispatched in topological-index order, up to
/// config.max_concurrency at a time.
///
/// The run directory {output_dir}/{run_id}/ receives trace.jsonl, the
/// cassette (unless disabled), and every node file output. Throws PathError
/// if the output directory template references an unset variable; node-level
/// errors are reported through RunOutcome::failure instead.
RunOutcome run_workflow(const WorkflowSpec& spec, LLMBackend& backend,
                        const RunConfig& config);

/// Render the node's prompt, call the backend, and bind outputs. The prompt
/// template path is expanded against state.env and read from disk. Errors
/// (render, backend, I/O) propagate tagged with the node id in the message.
NodeResult execute_node(const FlowNode& node, RunState& state, LLMBackend& backend);

/// Comparison after normalizing both sides: trim ASCII whitespace, strip one
/// trailing '.', case-fold. contains is substring search on the normalized
/// strings. Composed conditions short-circuit left to right. Throws
/// EvalError naming a missing variable.
bool evaluate_condition(const Condition& cond, const RunState& state);

std::string normalize_answer(std::string_view text);

/// The matching path's next_nodes, verbatim. Branch coverage is guaranteed
/// by validation; an uncovered result returns the empty list.
std::vector<std::string> select_forward_paths(bool result,
                                              const std::vector<ForwardPath>& paths);

struct Bindings {
    std::vector<VariableBinding> variables;
    std::vector<FileBinding> files;
};

/// Write the node's declared outputs: variables into the store (single
/// assignment enforced), files under state.run_dir. A decision maker whose
/// condition reads a variable that no node declares writing additionally
/// binds its raw response to that variable.
Bindings bind_outputs(const FlowNode& node, const std::string& response, RunState& state);

}  // namespace gotflow
