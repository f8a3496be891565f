#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace gotflow::testing {

/// Unique directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Run the built CLI binary with the given arguments. `unset_vars` names
/// environment variables removed for the child.
CliResult run_cli(const std::vector<std::string>& args,
                  const std::vector<std::string>& unset_vars = {});

// --- random workflow generation -------------------------------------------

struct GenOptions {
    int min_nodes = 1;
    int max_nodes = 12;
    double p_decision = 0.3;
    bool with_extras = false;
    /// Every node's prompt_template points here; leave empty for documents
    /// that are only parsed, never run.
    std::string template_path = "${GF_ROOT}/tpl.txt";
    /// Force at least this many decision makers (when node count allows).
    int min_decisions = 0;
};

struct GeneratedWorkflow {
    std::string json;
    int node_count = 0;
    int edge_count = 0;  // next_nodes entries plus forward-path targets
};

/// Random DAG workflow document: edges only point at later nodes, ids and
/// output variables are unique, every node carries one prompt_template.
/// Decision conditions compare a fresh variable (self-bound at run time)
/// against "ok" or "nope", so a mock defaulting to "ok" drives both branches.
GeneratedWorkflow generate_workflow(std::mt19937& rng, const GenOptions& options);

// --- independent checkers ---------------------------------------------------

struct DotSummary {
    bool ok = false;
    std::string error;
    int node_statements = 0;
    int edge_statements = 0;
};

/// Minimal independent DOT reader: tokenizes and checks the subset grammar
/// digraph ID { stmt* } with quoted-id node and edge statements.
DotSummary parse_dot(const std::string& text);

/// All simple cycles of the edge list, each rotated so the lexicographically
/// smallest node id leads. Node ids are compared by their position in `ids`.
std::vector<std::vector<std::string>> enumerate_cycles(
    const std::vector<std::string>& ids,
    const std::vector<std::pair<std::string, std::string>>& edges);

}  // namespace gotflow::testing
