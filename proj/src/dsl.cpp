#include "gotflow/dsl.hpp"

#include <algorithm>
#include <unordered_set>

#include "gotflow/errors.hpp"

namespace gotflow {

namespace {

std::string require_string(const JsonValue& obj, const std::string& key,
                           const std::string& node_id) {
    const JsonValue* v = obj.find(key);
    if (v == nullptr) {
        std::string where = node_id.empty() ? "document" : "node '" + node_id + "'";
        throw ParseError("missing required key \"" + key + "\" in " + where,
                         std::nullopt, node_id, key);
    }
    if (!v->is_string()) {
        std::string where = node_id.empty() ? "document" : "node '" + node_id + "'";
        throw ParseError("key \"" + key + "\" in " + where + " must be a string",
                         std::nullopt, node_id, key);
    }
    return v->as_string();
}

std::vector<std::string> string_array(const JsonValue& v, const std::string& key,
                                      const std::string& node_id) {
    if (!v.is_array()) {
        throw ParseError("key \"" + key + "\" in node '" + node_id + "' must be an array",
                         std::nullopt, node_id, key);
    }
    std::vector<std::string> out;
    for (const JsonValue& item : v.as_array()) {
        if (!item.is_string()) {
            throw ParseError("entries of \"" + key + "\" in node '" + node_id +
                                 "' must be strings",
                             std::nullopt, node_id, key);
        }
        out.push_back(item.as_string());
    }
    return out;
}

InputParameter parse_input_parameter(const JsonValue& v, const std::string& node_id) {
    if (!v.is_object()) {
        throw ParseError("input parameter in node '" + node_id + "' must be an object",
                         std::nullopt, node_id, "input_parameters");
    }
    InputParameter p;
    p.name = require_string(v, "name", node_id);
    if (p.name.empty()) {
        throw ParseError("input parameter name in node '" + node_id + "' is empty",
                         std::nullopt, node_id, "name");
    }
    const std::string type = require_string(v, "type", node_id);
    std::unordered_set<std::string> known = {"name", "type"};
    if (type == "prompt_template") {
        p.kind = InputKind::prompt_template;
        p.value = require_string(v, "file_path", node_id);
        known.insert("file_path");
    } else if (type == "output_variable") {
        p.kind = InputKind::output_variable;
        p.value = p.name;  // the name names the upstream variable
    } else if (type == "literal") {
        p.kind = InputKind::literal;
        p.value = require_string(v, "value", node_id);
        known.insert("value");
    } else {
        throw ParseError("unknown input parameter type \"" + type + "\" in node '" +
                             node_id + "'",
                         std::nullopt, node_id, "type");
    }
    for (const JsonValue::Member& m : v.as_object()) {
        if (!known.count(m.key)) p.extra.emplace_back(m.key, m.value);
    }
    return p;
}

OutputBinding parse_output_binding(const JsonValue& v, const std::string& node_id) {
    OutputBinding b;
    const std::string type = require_string(v, "type", node_id);
    b.kind = type == "file" ? OutputKind::file : OutputKind::variable;
    b.name = require_string(v, "name", node_id);
    if (b.name.empty()) {
        throw ParseError("output name in node '" + node_id + "' is empty", std::nullopt,
                         node_id, "name");
    }
    if (b.kind == OutputKind::file &&
        b.name.find_first_of("/\\") != std::string::npos) {
        throw ParseError("output file name \"" + b.name + "\" in node '" + node_id +
                             "' contains a path separator",
                         std::nullopt, node_id, "name");
    }
    for (const JsonValue::Member& m : v.as_object()) {
        if (m.key != "type" && m.key != "name") b.extra.emplace_back(m.key, m.value);
    }
    return b;
}

Condition parse_condition(const JsonValue& v, const std::string& node_id) {
    if (!v.is_object()) {
        throw ParseError("condition in node '" + node_id + "' must be an object",
                         std::nullopt, node_id, "condition");
    }
    const JsonValue* composed = v.find("is_composed");
    if (composed == nullptr || !composed->is_bool()) {
        throw ParseError("missing required key \"is_composed\" in condition of node '" +
                             node_id + "'",
                         std::nullopt, node_id, "is_composed");
    }
    Condition c;
    c.composed = composed->as_bool();
    std::unordered_set<std::string> known = {"is_composed"};
    if (!c.composed) {
        const JsonValue* ds = v.find("data_source");
        if (ds == nullptr || !ds->is_object()) {
            throw ParseError("missing required key \"data_source\" in condition of node '" +
                                 node_id + "'",
                             std::nullopt, node_id, "data_source");
        }
        const std::string ds_type = require_string(*ds, "type", node_id);
        if (ds_type != "output_variable") {
            throw ParseError("unknown data source type \"" + ds_type + "\" in node '" +
                                 node_id + "'",
                             std::nullopt, node_id, "data_source");
        }
        c.data_source.name = require_string(*ds, "name", node_id);
        const std::string op = require_string(v, "operator", node_id);
        if (op == "equal") {
            c.op = ConditionOperator::equal;
        } else if (op == "not_equal") {
            c.op = ConditionOperator::not_equal;
        } else if (op == "contains") {
            c.op = ConditionOperator::contains;
        } else {
            throw ParseError("unknown operator \"" + op + "\" in node '" + node_id + "'",
                             std::nullopt, node_id, "operator");
        }
        c.operand = require_string(v, "operand", node_id);
        known.insert({"data_source", "operator", "operand"});
    } else {
        const std::string comb = require_string(v, "combinator", node_id);
        if (comb == "all") {
            c.combinator = Combinator::all;
        } else if (comb == "any") {
            c.combinator = Combinator::any;
        } else {
            throw ParseError("unknown combinator \"" + comb + "\" in node '" + node_id + "'",
                             std::nullopt, node_id, "combinator");
        }
        const JsonValue* kids = v.find("conditions");
        if (kids == nullptr || !kids->is_array()) {
            throw ParseError("missing required key \"conditions\" in composed condition of node '" +
                                 node_id + "'",
                             std::nullopt, node_id, "conditions");
        }
        for (const JsonValue& kid : kids->as_array()) {
            c.children.push_back(parse_condition(kid, node_id));
        }
        if (c.children.size() < 2) {
            throw ParseError("composed condition in node '" + node_id +
                                 "' needs at least 2 children",
                             std::nullopt, node_id, "conditions");
        }
        known.insert({"combinator", "conditions"});
    }
    for (const JsonValue::Member& m : v.as_object()) {
        if (!known.count(m.key)) c.extra.emplace_back(m.key, m.value);
    }
    return c;
}

ForwardPath parse_forward_path(const JsonValue& v, const std::string& node_id) {
    if (!v.is_object()) {
        throw ParseError("forward path in node '" + node_id + "' must be an object",
                         std::nullopt, node_id, "forward_paths");
    }
    ForwardPath p;
    const JsonValue* result = v.find("condition_result");
    if (result == nullptr || !result->is_bool()) {
        throw ParseError("missing required key \"condition_result\" in node '" + node_id + "'",
                         std::nullopt, node_id, "condition_result");
    }
    p.condition_result = result->as_bool();
    const JsonValue* next = v.find("next_nodes");
    if (next == nullptr) {
        throw ParseError("missing required key \"next_nodes\" in forward path of node '" +
                             node_id + "'",
                         std::nullopt, node_id, "next_nodes");
    }
    p.next_nodes = string_array(*next, "next_nodes", node_id);
    for (const JsonValue::Member& m : v.as_object()) {
        if (m.key != "condition_result" && m.key != "next_nodes") {
            p.extra.emplace_back(m.key, m.value);
        }
    }
    return p;
}

FlowNode parse_node(const JsonValue& v) {
    if (!v.is_object()) {
        throw ParseError("flow_items entries must be objects", std::nullopt, {}, "flow_items");
    }
    FlowNode node;
    node.id = require_string(v, "id", "");
    if (node.id.empty()) {
        throw ParseError("node id is empty", std::nullopt, {}, "id");
    }
    if (const JsonValue* d = v.find("description"); d != nullptr && d->is_string()) {
        node.description = d->as_string();
    }
    const std::string type = require_string(v, "type", node.id);
    if (type == "executor") {
        node.kind = NodeKind::executor;
    } else if (type == "decision_maker") {
        node.kind = NodeKind::decision_maker;
    } else {
        throw ParseError("unknown node type \"" + type + "\" in node '" + node.id + "'",
                         std::nullopt, node.id, "type");
    }

    // Walk members in document order so duplicate "output" arrays merge the
    // way they appear: output_variable entries become inputs, variable/file
    // entries become outputs.
    bool saw_next = false;
    for (const JsonValue::Member& m : v.as_object()) {
        if (m.key == "id" || m.key == "description" || m.key == "type") continue;
        if (m.key == "input_parameters") {
            if (!m.value.is_array()) {
                throw ParseError("key \"input_parameters\" in node '" + node.id +
                                     "' must be an array",
                                 std::nullopt, node.id, "input_parameters");
            }
            for (const JsonValue& item : m.value.as_array()) {
                node.inputs.push_back(parse_input_parameter(item, node.id));
            }
        } else if (m.key == "output") {
            if (!m.value.is_array()) {
                throw ParseError("key \"output\" in node '" + node.id + "' must be an array",
                                 std::nullopt, node.id, "output");
            }
            for (const JsonValue& item : m.value.as_array()) {
                if (!item.is_object()) {
                    throw ParseError("output entries in node '" + node.id +
                                         "' must be objects",
                                     std::nullopt, node.id, "output");
                }
                const std::string entry_type = require_string(item, "type", node.id);
                if (entry_type == "output_variable") {
                    InputParameter p;
                    p.name = require_string(item, "name", node.id);
                    p.kind = InputKind::output_variable;
                    p.value = p.name;
                    for (const JsonValue::Member& em : item.as_object()) {
                        if (em.key != "type" && em.key != "name") {
                            p.extra.emplace_back(em.key, em.value);
                        }
                    }
                    node.inputs.push_back(std::move(p));
                } else if (entry_type == "variable" || entry_type == "file") {
                    node.outputs.push_back(parse_output_binding(item, node.id));
                } else {
                    throw ParseError("unknown output type \"" + entry_type + "\" in node '" +
                                         node.id + "'",
                                     std::nullopt, node.id, "output");
                }
            }
        } else if (m.key == "next_nodes") {
            node.next_nodes = string_array(m.value, "next_nodes", node.id);
            saw_next = true;
        } else if (m.key == "condition") {
            node.condition = parse_condition(m.value, node.id);
        } else if (m.key == "forward_paths") {
            if (!m.value.is_array()) {
                throw ParseError("key \"forward_paths\" in node '" + node.id +
                                     "' must be an array",
                                 std::nullopt, node.id, "forward_paths");
            }
            for (const JsonValue& item : m.value.as_array()) {
                node.forward_paths.push_back(parse_forward_path(item, node.id));
            }
        } else {
            node.extra.emplace_back(m.key, m.value);
        }
    }

    if (node.kind == NodeKind::executor) {
        if (!saw_next) {
            throw ParseError("missing required key \"next_nodes\" in node '" + node.id + "'",
                             std::nullopt, node.id, "next_nodes");
        }
        if (node.condition || !node.forward_paths.empty()) {
            throw ParseError("executor node '" + node.id +
                                 "' must not carry condition or forward_paths",
                             std::nullopt, node.id, "condition");
        }
    } else {
        if (!node.condition) {
            throw ParseError("missing required key \"condition\" in node '" + node.id + "'",
                             std::nullopt, node.id, "condition");
        }
        if (node.forward_paths.empty()) {
            throw ParseError("missing required key \"forward_paths\" in node '" + node.id + "'",
                             std::nullopt, node.id, "forward_paths");
        }
        if (saw_next) {
            throw ParseError("decision maker '" + node.id +
                                 "' must route via forward_paths, not next_nodes",
                             std::nullopt, node.id, "next_nodes");
        }
    }
    return node;
}

// --- canonical serialization -------------------------------------------

void write_extras(std::string& out, const ExtraFields& extra, int indent) {
    for (const auto& [key, value] : extra) {
        out.append(",\n");
        out.append(static_cast<std::size_t>(indent) * 2, ' ');
        append_json_escaped(out, key);
        out.append(": ");
        value.write(out, indent);
    }
}

void write_string_member(std::string& out, const char* key, const std::string& value,
                         int indent, bool first = false) {
    if (!first) out.append(",\n");
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    append_json_escaped(out, key);
    out.append(": ");
    append_json_escaped(out, value);
}

void write_string_list(std::string& out, const char* key,
                       const std::vector<std::string>& values, int indent) {
    out.append(",\n");
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    append_json_escaped(out, key);
    out.append(": [");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out.append(", ");
        append_json_escaped(out, values[i]);
    }
    out.push_back(']');
}

void write_condition(std::string& out, const Condition& c, int indent);

void write_condition_body(std::string& out, const Condition& c, int indent) {
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    out.append("\"is_composed\": ");
    out.append(c.composed ? "true" : "false");
    if (!c.composed) {
        out.append(",\n");
        out.append(static_cast<std::size_t>(indent) * 2, ' ');
        out.append("\"data_source\": {\n");
        out.append(static_cast<std::size_t>(indent + 1) * 2, ' ');
        out.append("\"type\": \"output_variable\",\n");
        out.append(static_cast<std::size_t>(indent + 1) * 2, ' ');
        out.append("\"name\": ");
        append_json_escaped(out, c.data_source.name);
        out.push_back('\n');
        out.append(static_cast<std::size_t>(indent) * 2, ' ');
        out.push_back('}');
        write_string_member(out, "operator", to_string(c.op), indent);
        write_string_member(out, "operand", c.operand, indent);
    } else {
        write_string_member(out, "combinator", to_string(c.combinator), indent);
        out.append(",\n");
        out.append(static_cast<std::size_t>(indent) * 2, ' ');
        out.append("\"conditions\": [\n");
        for (std::size_t i = 0; i < c.children.size(); ++i) {
            out.append(static_cast<std::size_t>(indent + 1) * 2, ' ');
            write_condition(out, c.children[i], indent + 1);
            if (i + 1 < c.children.size()) out.push_back(',');
            out.push_back('\n');
        }
        out.append(static_cast<std::size_t>(indent) * 2, ' ');
        out.push_back(']');
    }
    write_extras(out, c.extra, indent);
}

void write_condition(std::string& out, const Condition& c, int indent) {
    out.append("{\n");
    write_condition_body(out, c, indent + 1);
    out.push_back('\n');
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    out.push_back('}');
}

void write_input_parameter(std::string& out, const InputParameter& p, int indent) {
    out.append("{\n");
    write_string_member(out, "name", p.name, indent + 1, true);
    write_string_member(out, "type", to_string(p.kind), indent + 1);
    if (p.kind == InputKind::prompt_template) {
        write_string_member(out, "file_path", p.value, indent + 1);
    } else if (p.kind == InputKind::literal) {
        write_string_member(out, "value", p.value, indent + 1);
    }
    write_extras(out, p.extra, indent + 1);
    out.push_back('\n');
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    out.push_back('}');
}

void write_output_binding(std::string& out, const OutputBinding& b, int indent) {
    out.append("{\n");
    write_string_member(out, "type", to_string(b.kind), indent + 1, true);
    write_string_member(out, "name", b.name, indent + 1);
    write_extras(out, b.extra, indent + 1);
    out.push_back('\n');
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    out.push_back('}');
}

template <typename T, typename WriteFn>
void write_object_list(std::string& out, const char* key, const std::vector<T>& items,
                       int indent, WriteFn write_fn) {
    out.append(",\n");
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    append_json_escaped(out, key);
    out.append(": [");
    if (items.empty()) {
        out.push_back(']');
        return;
    }
    out.push_back('\n');
    for (std::size_t i = 0; i < items.size(); ++i) {
        out.append(static_cast<std::size_t>(indent + 1) * 2, ' ');
        write_fn(out, items[i], indent + 1);
        if (i + 1 < items.size()) out.push_back(',');
        out.push_back('\n');
    }
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    out.push_back(']');
}

void write_node(std::string& out, const FlowNode& node, int indent) {
    out.append("{\n");
    write_string_member(out, "id", node.id, indent + 1, true);
    write_string_member(out, "description", node.description, indent + 1);
    write_string_member(out, "type", to_string(node.kind), indent + 1);
    write_object_list(out, "input_parameters", node.inputs, indent + 1,
                      write_input_parameter);
    write_object_list(out, "output", node.outputs, indent + 1, write_output_binding);
    if (node.kind == NodeKind::executor) {
        write_string_list(out, "next_nodes", node.next_nodes, indent + 1);
    } else {
        out.append(",\n");
        out.append(static_cast<std::size_t>(indent + 1) * 2, ' ');
        out.append("\"condition\": ");
        write_condition(out, *node.condition, indent + 1);
        write_object_list(out, "forward_paths", node.forward_paths, indent + 1,
                          [](std::string& o, const ForwardPath& p, int ind) {
                              o.append("{\n");
                              o.append(static_cast<std::size_t>(ind + 1) * 2, ' ');
                              o.append("\"condition_result\": ");
                              o.append(p.condition_result ? "true" : "false");
                              write_string_list(o, "next_nodes", p.next_nodes, ind + 1);
                              write_extras(o, p.extra, ind + 1);
                              o.push_back('\n');
                              o.append(static_cast<std::size_t>(ind) * 2, ' ');
                              o.push_back('}');
                          });
    }
    write_extras(out, node.extra, indent + 1);
    out.push_back('\n');
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    out.push_back('}');
}

}  // namespace

const char* to_string(NodeKind k) {
    return k == NodeKind::executor ? "executor" : "decision_maker";
}

const char* to_string(InputKind k) {
    switch (k) {
        case InputKind::prompt_template: return "prompt_template";
        case InputKind::output_variable: return "output_variable";
        case InputKind::literal: return "literal";
    }
    return "?";
}

const char* to_string(OutputKind k) {
    return k == OutputKind::variable ? "variable" : "file";
}

const char* to_string(ConditionOperator op) {
    switch (op) {
        case ConditionOperator::equal: return "equal";
        case ConditionOperator::not_equal: return "not_equal";
        case ConditionOperator::contains: return "contains";
    }
    return "?";
}

const char* to_string(Combinator c) { return c == Combinator::all ? "all" : "any"; }

const InputParameter* FlowNode::prompt_template() const {
    for (const InputParameter& p : inputs) {
        if (p.kind == InputKind::prompt_template) return &p;
    }
    return nullptr;
}

std::vector<const InputParameter*> FlowNode::literals() const {
    std::vector<const InputParameter*> out;
    for (const InputParameter& p : inputs) {
        if (p.kind == InputKind::literal) out.push_back(&p);
    }
    return out;
}

std::vector<const InputParameter*> FlowNode::consumed_variables() const {
    std::vector<const InputParameter*> out;
    for (const InputParameter& p : inputs) {
        if (p.kind == InputKind::output_variable) out.push_back(&p);
    }
    return out;
}

const FlowNode* WorkflowSpec::find_node(std::string_view id) const {
    for (const FlowNode& node : nodes) {
        if (node.id == id) return &node;
    }
    return nullptr;
}

WorkflowSpec parse_workflow(std::string_view text) {
    const JsonValue doc = JsonValue::parse(text);
    if (!doc.is_object()) {
        throw ParseError("workflow document must be a JSON object");
    }

    WorkflowSpec spec;
    spec.output_dir_path = require_string(doc, "output_dir_path", "");

    bool saw_flow_items = false;
    for (const JsonValue::Member& m : doc.as_object()) {
        if (m.key == "output_dir_path") continue;
        if (m.key == "input_parameters") {
            if (!m.value.is_array()) {
                throw ParseError("key \"input_parameters\" must be an array", std::nullopt, {},
                                 "input_parameters");
            }
            for (const JsonValue& item : m.value.as_array()) {
                if (!item.is_object()) {
                    throw ParseError("entries of workflow \"input_parameters\" must be objects",
                                     std::nullopt, {}, "input_parameters");
                }
                ParameterFileRef ref;
                ref.suffix = require_string(item, "suffix", "");
                ref.file_path = require_string(item, "file_path", "");
                if (ref.suffix.empty() || ref.file_path.empty()) {
                    throw ParseError("parameter file refs need non-empty suffix and file_path",
                                     std::nullopt, {}, "input_parameters");
                }
                for (const JsonValue::Member& em : item.as_object()) {
                    if (em.key != "suffix" && em.key != "file_path") {
                        ref.extra.emplace_back(em.key, em.value);
                    }
                }
                spec.parameter_files.push_back(std::move(ref));
            }
        } else if (m.key == "flow_items") {
            saw_flow_items = true;
            if (!m.value.is_array()) {
                throw ParseError("key \"flow_items\" must be an array", std::nullopt, {},
                                 "flow_items");
            }
            for (const JsonValue& item : m.value.as_array()) {
                spec.nodes.push_back(parse_node(item));
            }
        } else {
            spec.extra.emplace_back(m.key, m.value);
        }
    }

    if (!saw_flow_items) {
        throw ParseError("missing required key \"flow_items\" in document", std::nullopt, {},
                         "flow_items");
    }
    if (spec.nodes.empty()) {
        throw ParseError("nodes list is empty", std::nullopt, {}, "flow_items");
    }

    std::unordered_set<std::string> seen;
    for (const FlowNode& node : spec.nodes) {
        if (!seen.insert(node.id).second) {
            throw ParseError("duplicate node id '" + node.id + "'", std::nullopt, node.id, "id");
        }
    }
    return spec;
}

std::string serialize_workflow(const WorkflowSpec& spec) {
    std::string out;
    out.append("{\n");
    write_string_member(out, "output_dir_path", spec.output_dir_path, 1, true);
    write_object_list(out, "input_parameters", spec.parameter_files, 1,
                      [](std::string& o, const ParameterFileRef& ref, int ind) {
                          o.append("{\n");
                          write_string_member(o, "suffix", ref.suffix, ind + 1, true);
                          write_string_member(o, "file_path", ref.file_path, ind + 1);
                          write_extras(o, ref.extra, ind + 1);
                          o.push_back('\n');
                          o.append(static_cast<std::size_t>(ind) * 2, ' ');
                          o.push_back('}');
                      });
    write_object_list(out, "flow_items", spec.nodes, 1, write_node);
    write_extras(out, spec.extra, 1);
    out.append("\n}\n");
    return out;
}

ParameterSet load_parameter_file(std::string_view text) {
    const JsonValue doc = JsonValue::parse(text);
    if (!doc.is_object()) {
        throw ParseError("parameter file must be a JSON object");
    }
    ParameterSet params;
    for (const JsonValue::Member& m : doc.as_object()) {
        if (!m.value.is_string()) {
            throw ParseError("parameter \"" + m.key + "\" must be a string", std::nullopt, {},
                             m.key);
        }
        params[m.key] = m.value.as_string();
    }
    return params;
}

namespace {

// Walks a path template, invoking on_literal for plain spans and on_variable
// for each ${NAME}. Runs of '$' directly before '{' collapse to one.
template <typename LiteralFn, typename VariableFn>
void scan_path_template(std::string_view path, LiteralFn on_literal, VariableFn on_variable) {
    auto is_name_start = [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
    };
    auto is_name_char = [&](char c) { return is_name_start(c) || (c >= '0' && c <= '9'); };

    std::size_t i = 0;
    while (i < path.size()) {
        if (path[i] != '$') {
            std::size_t j = path.find('$', i);
            if (j == std::string_view::npos) j = path.size();
            on_literal(path.substr(i, j - i));
            i = j;
            continue;
        }
        std::size_t run_end = i;
        while (run_end < path.size() && path[run_end] == '$') ++run_end;
        if (run_end >= path.size() || path[run_end] != '{') {
            on_literal(path.substr(i, run_end - i));
            i = run_end;
            continue;
        }
        std::size_t name_begin = run_end + 1;
        std::size_t j = name_begin;
        while (j < path.size() && is_name_char(path[j])) ++j;
        if (j >= path.size() || path[j] != '}' || j == name_begin ||
            !is_name_start(path[name_begin])) {
            throw PathError("malformed ${...} reference in path \"" + std::string(path) + "\"");
        }
        on_variable(path.substr(name_begin, j - name_begin));
        i = j + 1;
    }
}

}  // namespace

std::string expand_path_variables(std::string_view path,
                                  const std::map<std::string, std::string>& env) {
    std::string out;
    out.reserve(path.size());
    scan_path_template(
        path, [&](std::string_view literal) { out.append(literal); },
        [&](std::string_view name) {
            auto it = env.find(std::string(name));
            if (it == env.end()) {
                throw PathError("unresolved path variable ${" + std::string(name) + "}",
                                std::string(name));
            }
            out.append(it->second);
        });
    return out;
}

std::vector<std::string> path_variables(std::string_view path) {
    std::vector<std::string> names;
    scan_path_template(
        path, [](std::string_view) {},
        [&](std::string_view name) {
            const std::string key(name);
            if (std::find(names.begin(), names.end(), key) == names.end()) {
                names.push_back(key);
            }
        });
    return names;
}

std::vector<std::string> referenced_path_variables(const WorkflowSpec& spec) {
    std::vector<std::string> names;
    auto add_all = [&](std::string_view path) {
        for (std::string& name : path_variables(path)) {
            if (std::find(names.begin(), names.end(), name) == names.end()) {
                names.push_back(std::move(name));
            }
        }
    };
    add_all(spec.output_dir_path);
    for (const ParameterFileRef& ref : spec.parameter_files) add_all(ref.file_path);
    for (const FlowNode& node : spec.nodes) {
        for (const InputParameter& p : node.inputs) {
            if (p.kind == InputKind::prompt_template) add_all(p.value);
        }
    }
    return names;
}

}  // namespace gotflow
