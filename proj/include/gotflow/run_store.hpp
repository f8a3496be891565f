#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gotflow/backend.hpp"

namespace gotflow {

enum class NodeStatus { pending, running, done, skipped, failed };

const char* to_string(NodeStatus s);
NodeStatus node_status_from_string(const std::string& s);

struct VariableBinding {
    std::string name;
    std::string value;

    bool operator==(const VariableBinding&) const = default;
};

struct FileBinding {
    std::string name;    // relative to the run directory
    std::string sha256;  // digest of the written bytes

    bool operator==(const FileBinding&) const = default;
};

struct Decision {
    bool condition_value = false;
    std::vector<std::string> next_nodes;

    bool operator==(const Decision&) const = default;
};

struct NodeResult {
    std::string node_id;
    std::string rendered_prompt;
    std::string response;
    std::vector<VariableBinding> variables;
    std::vector<FileBinding> files;
    std::optional<Decision> decision;  // present iff the node is a decision maker

    bool operator==(const NodeResult&) const = default;
};

/// One trace record: an executed node (status done or failed) or a skip
/// marker for a node bypassed by routing.
struct TraceStep {
    NodeStatus status = NodeStatus::done;  // done | skipped | failed
    NodeResult result;                     // node_id only, for skips
    std::string error;                     // failed steps

    bool operator==(const TraceStep&) const = default;
};

struct RunConfigSnapshot {
    int max_concurrency = 1;
    std::map<std::string, std::string> env;
    GenerationSettings settings;

    bool operator==(const RunConfigSnapshot&) const = default;
};

/// Append-only record of one run, sufficient together with its cassette to
/// replay the run without network access: the canonical workflow text rides
/// along in the header.
struct RunTrace {
    int schema_version = 1;
    std::string run_id;
    std::string spec_digest;    // sha256 of workflow_text
    std::string workflow_text;  // canonical serialized spec
    std::string started;
    std::string finished;  // empty while the run is open / after a crash
    RunConfigSnapshot config;
    std::vector<TraceStep> steps;  // execution order
    std::map<std::string, NodeStatus> final_status;

    bool operator==(const RunTrace&) const = default;
};

/// Streams a trace to disk as JSON lines: one header line, one line per
/// step, one finish line. Every append writes a complete line and flushes,
/// so a crash leaves a loadable prefix.
class TraceWriter {
public:
    TraceWriter(std::filesystem::path path, const RunTrace& header);

    void append_step(const TraceStep& step);
    void finish(const std::string& finished_timestamp,
                const std::map<std::string, NodeStatus>& final_status);

    const std::filesystem::path& path() const { return path_; }

private:
    void write_line(const std::string& line);

    std::filesystem::path path_;
    std::ofstream out_;
};

/// Serialize a whole trace into the same JSON-lines form TraceWriter
/// produces; save(load(f)) is byte-identical to f.
std::string trace_to_jsonl(const RunTrace& trace);
void save_trace(const RunTrace& trace, const std::filesystem::path& path);

/// Strict loader. Throws TraceError naming the byte offset of the first
/// malformed line, or reporting both versions on a schema mismatch. A trace
/// without a finish line loads with `finished` empty (crash leftover).
RunTrace load_trace_text(std::string_view text);
RunTrace load_trace(const std::filesystem::path& path);

/// Atomic write (temp file + rename) of one node output. `name` must carry
/// no path separators; parent directories are created. Returns the final
/// path.
std::filesystem::path write_output_file(const std::filesystem::path& output_dir,
                                        const std::string& name, std::string_view content);

}  // namespace gotflow
