#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gotflow/json_value.hpp"

namespace gotflow {

/// Unrecognized keys found while parsing, preserved in document order so a
/// spec round-trips losslessly. They carry no meaning for execution.
using ExtraFields = std::vector<std::pair<std::string, JsonValue>>;

enum class NodeKind { executor, decision_maker };
enum class InputKind { prompt_template, output_variable, literal };
enum class OutputKind { variable, file };
enum class ConditionOperator { equal, not_equal, contains };
enum class Combinator { all, any };

const char* to_string(NodeKind k);
const char* to_string(InputKind k);
const char* to_string(OutputKind k);
const char* to_string(ConditionOperator op);
const char* to_string(Combinator c);

struct ParameterFileRef {
    std::string suffix;     // provenance label only; does not namespace keys
    std::string file_path;  // path template, may contain ${NAME}
    ExtraFields extra;

    bool operator==(const ParameterFileRef&) const = default;
};

struct InputParameter {
    std::string name;
    InputKind kind = InputKind::literal;
    /// prompt_template: path template of the template file.
    /// output_variable: the upstream variable name (same as `name`).
    /// literal: the inline value.
    std::string value;
    ExtraFields extra;

    bool operator==(const InputParameter&) const = default;
};

struct OutputBinding {
    OutputKind kind = OutputKind::variable;
    std::string name;  // variable name, or file name with no path separators
    ExtraFields extra;

    bool operator==(const OutputBinding&) const = default;
};

struct DataSource {
    std::string name;  // only the output_variable source kind exists

    bool operator==(const DataSource&) const = default;
};

/// Comparison tree evaluated over the variable store. A leaf compares one
/// variable against an operand; a composed node combines >= 2 children with
/// all/any short-circuit semantics (the composed form goes beyond the usual
/// single-equality documents, see README).
struct Condition {
    bool composed = false;

    // leaf
    DataSource data_source;
    ConditionOperator op = ConditionOperator::equal;
    std::string operand;

    // composed
    Combinator combinator = Combinator::all;
    std::vector<Condition> children;

    ExtraFields extra;

    bool operator==(const Condition&) const = default;
};

struct ForwardPath {
    bool condition_result = false;
    std::vector<std::string> next_nodes;  // may be empty: the branch terminates
    ExtraFields extra;

    bool operator==(const ForwardPath&) const = default;
};

struct FlowNode {
    std::string id;
    std::string description;
    NodeKind kind = NodeKind::executor;
    std::vector<InputParameter> inputs;   // declaration order
    std::vector<OutputBinding> outputs;   // declaration order
    std::vector<std::string> next_nodes;  // executor routing
    std::optional<Condition> condition;   // decision-maker routing
    std::vector<ForwardPath> forward_paths;
    ExtraFields extra;

    bool is_decision_maker() const { return kind == NodeKind::decision_maker; }
    const InputParameter* prompt_template() const;
    std::vector<const InputParameter*> literals() const;
    std::vector<const InputParameter*> consumed_variables() const;

    bool operator==(const FlowNode&) const = default;
};

/// Parsed, normalized form of one DSL document. Normalization folds
/// output-typed "output" entries back into their semantic buckets: every
/// output_variable entry is an input, every variable/file entry an output,
/// with duplicate sibling arrays merged in document order.
struct WorkflowSpec {
    std::string output_dir_path;  // path template
    std::vector<ParameterFileRef> parameter_files;
    std::vector<FlowNode> nodes;  // declaration order, stable across round-trips
    ExtraFields extra;

    const FlowNode* find_node(std::string_view id) const;

    bool operator==(const WorkflowSpec&) const = default;
};

/// Flat map of common string parameters. std::map so iteration is sorted.
using ParameterSet = std::map<std::string, std::string>;

/// Parse a complete UTF-8 DSL document into a normalized spec.
/// Throws ParseError for malformed JSON (position-bearing), a missing
/// required key (names the key and node id), an unknown node type string, a
/// duplicate node id, and similar shape defects. Unknown keys are preserved
/// in `extra` and ignored semantically.
WorkflowSpec parse_workflow(std::string_view text);

/// Canonical text form: 2-space indent, fixed schema key order, node order
/// preserved. parse(serialize(s)) is structurally equal to s, and serialize
/// is a fixed point of its own output.
std::string serialize_workflow(const WorkflowSpec& spec);

/// Parse a parameter file: a JSON object whose values are all strings.
/// Values are kept byte-exact, embedded newlines included.
ParameterSet load_parameter_file(std::string_view text);

/// Replace every `${NAME}` with env.at(NAME). A run of `$` directly before
/// `{` collapses to a single `$` first, so "$${GF_ROOT}/a" expands like
/// "${GF_ROOT}/a". Throws PathError naming the first unresolved variable.
std::string expand_path_variables(std::string_view path,
                                  const std::map<std::string, std::string>& env);

/// Variable names referenced by ${NAME} in one path template, first
/// occurrence order. Malformed references throw like expansion does.
std::vector<std::string> path_variables(std::string_view path);

/// Every path variable a spec references: output_dir_path, parameter file
/// paths, prompt template paths.
std::vector<std::string> referenced_path_variables(const WorkflowSpec& spec);

}  // namespace gotflow
