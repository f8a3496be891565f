#include "gotflow/engine.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <mutex>
#include <thread>

#include "gotflow/errors.hpp"
#include "gotflow/template_engine.hpp"
#include "gotflow/util.hpp"

namespace gotflow {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read file " + path.string());
    }
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

struct RenderedCall {
    std::string prompt;
    std::string response;
};

// The slow half of node execution: template expansion and the backend call.
// Reads only from `state`, so concurrent callers hand it a snapshot.
RenderedCall render_and_complete(const FlowNode& node, const RunState& state,
                                 LLMBackend& backend) {
    const InputParameter* tpl = node.prompt_template();
    if (tpl == nullptr) {
        throw RenderError("node '" + node.id + "' has no prompt_template input", {});
    }
    const std::string tpl_path = expand_path_variables(tpl->value, state.env);
    const std::string tpl_text = read_file(tpl_path);

    std::map<std::string, std::string> literals;
    for (const InputParameter* p : node.literals()) {
        literals[p->name] = p->value;
    }
    ParameterScope scope({&literals, &state.variables, &state.parameters});

    RenderedCall call;
    call.prompt = render_template(tpl_text, scope);
    call.response = backend.complete(node.id, call.prompt, state.settings);
    return call;
}

// Bind + route; mutates the store, so the scheduler serializes calls.
NodeResult finalize_node(const FlowNode& node, RenderedCall call, RunState& state) {
    NodeResult result;
    result.node_id = node.id;
    result.rendered_prompt = std::move(call.prompt);
    result.response = std::move(call.response);

    Bindings bindings = bind_outputs(node, result.response, state);
    result.variables = std::move(bindings.variables);
    result.files = std::move(bindings.files);

    if (node.kind == NodeKind::decision_maker) {
        Decision decision;
        decision.condition_value = evaluate_condition(*node.condition, state);
        decision.next_nodes =
            select_forward_paths(decision.condition_value, node.forward_paths);
        result.decision = std::move(decision);
    }
    return result;
}

std::map<std::string, std::string> merged_parameters(const WorkflowSpec& spec,
                                                     const RunConfig& config) {
    std::map<std::string, std::string> merged;
    for (const ParameterFileRef& ref : spec.parameter_files) {
        const std::string path = expand_path_variables(ref.file_path, config.env);
        const ParameterSet params = load_parameter_file(read_file(path));
        for (const auto& [k, v] : params) merged[k] = v;  // later files win
    }
    return merged;
}

}  // namespace

std::string normalize_answer(std::string_view text) {
    std::string out = trim_ascii(text);
    if (!out.empty() && out.back() == '.') out.pop_back();
    return to_lower_ascii(out);
}

bool evaluate_condition(const Condition& cond, const RunState& state) {
    if (cond.composed) {
        if (cond.combinator == Combinator::all) {
            for (const Condition& child : cond.children) {
                if (!evaluate_condition(child, state)) return false;
            }
            return true;
        }
        for (const Condition& child : cond.children) {
            if (evaluate_condition(child, state)) return true;
        }
        return false;
    }

    auto it = state.variables.find(cond.data_source.name);
    if (it == state.variables.end()) {
        throw EvalError("condition reads missing variable '" + cond.data_source.name + "'",
                        cond.data_source.name);
    }
    const std::string lhs = normalize_answer(it->second);
    const std::string rhs = normalize_answer(cond.operand);
    switch (cond.op) {
        case ConditionOperator::equal: return lhs == rhs;
        case ConditionOperator::not_equal: return lhs != rhs;
        case ConditionOperator::contains: return lhs.find(rhs) != std::string::npos;
    }
    return false;
}

std::vector<std::string> select_forward_paths(bool result,
                                              const std::vector<ForwardPath>& paths) {
    for (const ForwardPath& path : paths) {
        if (path.condition_result == result) return path.next_nodes;
    }
    return {};
}

Bindings bind_outputs(const FlowNode& node, const std::string& response, RunState& state) {
    Bindings bindings;
    auto write_variable = [&](const std::string& name) {
        auto [it, inserted] = state.variables.emplace(name, response);
        if (!inserted) {
            throw EvalError("variable '" + name + "' already written (single assignment)",
                            name);
        }
        bindings.variables.push_back({name, response});
    };

    for (const OutputBinding& out : node.outputs) {
        if (out.kind == OutputKind::variable) {
            write_variable(out.name);
        } else {
            write_output_file(state.run_dir, out.name, response);
            bindings.files.push_back({out.name, sha256_hex(response)});
        }
    }

    // Self-binding: the condition needs its data source, and nothing else in
    // the workflow declares writing it, so the node's own answer stands in.
    if (node.kind == NodeKind::decision_maker && node.condition && !node.condition->composed) {
        const std::string& var = node.condition->data_source.name;
        if (state.declared_writers.count(var) == 0 && state.variables.count(var) == 0) {
            write_variable(var);
        }
    }
    return bindings;
}

NodeResult execute_node(const FlowNode& node, RunState& state, LLMBackend& backend) {
    auto tag = [&](const char* what) { return "node '" + node.id + "': " + what; };
    try {
        return finalize_node(node, render_and_complete(node, state, backend), state);
    } catch (const RenderError& ex) {
        throw RenderError(tag(ex.what()), ex.unresolved);
    } catch (const UnterminatedPlaceholder& ex) {
        throw UnterminatedPlaceholder(tag(ex.what()), ex.byte_offset);
    } catch (const BackendError& ex) {
        throw BackendError(ex.kind, tag(ex.what()), ex.status_code);
    } catch (const PathError& ex) {
        throw PathError(tag(ex.what()), ex.variable);
    } catch (const EvalError& ex) {
        throw EvalError(tag(ex.what()), ex.variable);
    } catch (const std::exception& ex) {
        throw IoError(tag(ex.what()));
    }
}

RunOutcome run_workflow(const WorkflowSpec& spec, LLMBackend& backend,
                        const RunConfig& config) {
    RunOutcome outcome;

    const WorkflowGraph graph = build_graph(spec);
    {
        const std::vector<Diagnostic> diagnostics = validate_graph(graph);
        if (has_errors(diagnostics)) {
            std::string detail;
            for (const Diagnostic& d : diagnostics) {
                if (d.severity != Severity::error) continue;
                if (!detail.empty()) detail.append("; ");
                detail.append(d.message);
            }
            outcome.failure = RunFailure{FailureKind::validation, "",
                                         "workflow failed validation: " + detail};
            return outcome;
        }
    }
    if (graph.entry_ids.empty()) {
        outcome.failure = RunFailure{FailureKind::no_entry, "", "no entry nodes"};
        return outcome;
    }

    const std::vector<std::string> topo = topological_order(graph);
    std::unordered_map<std::string, std::size_t> topo_index;
    for (std::size_t i = 0; i < topo.size(); ++i) topo_index.emplace(topo[i], i);

    // Resolve the run directory and open the trace before touching any node.
    const std::string workflow_text = serialize_workflow(spec);
    RunTrace trace;
    trace.run_id = config.run_id_override.value_or(uuid4());
    trace.spec_digest = sha256_hex(workflow_text);
    trace.workflow_text = workflow_text;
    trace.started = config.started_override.value_or(utc_timestamp_now());
    trace.config.max_concurrency = config.max_concurrency;
    trace.config.env = config.env;
    trace.config.settings = config.settings;

    const std::filesystem::path base_dir =
        config.output_dir_override.value_or(std::filesystem::path(
            expand_path_variables(spec.output_dir_path, config.env)));
    const std::filesystem::path run_dir = base_dir / trace.run_id;
    std::error_code ec;
    std::filesystem::create_directories(run_dir, ec);
    if (ec) {
        throw IoError("cannot create run directory " + run_dir.string() + ": " + ec.message());
    }
    outcome.run_dir = run_dir;

    RunState state;
    state.env = config.env;
    state.run_dir = run_dir;
    state.settings = config.settings;
    state.parameters = merged_parameters(spec, config);
    for (const FlowNode& node : graph.nodes) {
        state.status[node.id] = NodeStatus::pending;
        for (const OutputBinding& out : node.outputs) {
            if (out.kind == OutputKind::variable) state.declared_writers.insert(out.name);
        }
    }

    std::shared_ptr<LLMBackend> effective(&backend, [](LLMBackend*) {});
    if (config.record_cassette) {
        effective = record_and_wrap(effective, run_dir / "cassette.jsonl");
    }

    TraceWriter writer(run_dir / "trace.jsonl", trace);

    // --- scheduling ------------------------------------------------------

    const std::size_t n = graph.nodes.size();
    std::vector<std::size_t> unresolved_preds(n, 0);
    std::vector<std::size_t> taken_in(n, 0);
    std::vector<std::size_t> in_degree(n, 0);
    for (const Edge& e : graph.edges) {
        auto to = graph.index_of.find(e.to);
        if (to == graph.index_of.end()) continue;
        ++unresolved_preds[to->second];
        ++in_degree[to->second];
    }

    // Ready set ordered by topological index.
    std::set<std::pair<std::size_t, std::size_t>> ready;  // (topo idx, node idx)
    auto make_ready = [&](std::size_t node_idx) {
        ready.insert({topo_index.at(graph.nodes[node_idx].id), node_idx});
        state.frontier.insert(graph.nodes[node_idx].id);
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (unresolved_preds[i] == 0) make_ready(i);
    }

    struct Completion {
        std::size_t node_idx;
        RenderedCall call;
        bool failed = false;
        std::string error;
    };
    std::mutex mu;
    std::condition_variable cv;
    std::deque<Completion> completions;
    std::map<std::size_t, std::thread> in_flight;

    bool aborting = false;

    auto record_step = [&](const TraceStep& step) {
        writer.append_step(step);
        trace.steps.push_back(step);
    };

    // Resolve a node's outgoing edges. `chosen_kind` carries the decision:
    // executors take every static edge, decision makers only the branch kind
    // they picked; skipped nodes take nothing.
    auto resolve_out_edges = [&](const FlowNode& node, std::optional<EdgeKind> taken_kind) {
        for (const Edge& e : graph.edges) {
            if (e.from != node.id) continue;
            auto to = graph.index_of.find(e.to);
            if (to == graph.index_of.end()) continue;
            if (taken_kind && e.kind == *taken_kind) ++taken_in[to->second];
            if (--unresolved_preds[to->second] == 0 &&
                state.status[e.to] == NodeStatus::pending) {
                make_ready(to->second);
            }
        }
    };

    auto process_completion = [&](Completion&& c) {
        const FlowNode& node = graph.nodes[c.node_idx];
        {
            auto it = in_flight.find(c.node_idx);
            it->second.join();
            in_flight.erase(it);
        }
        if (!c.failed) {
            try {
                NodeResult result = finalize_node(node, std::move(c.call), state);
                state.status[node.id] = NodeStatus::done;
                TraceStep step;
                step.status = NodeStatus::done;
                step.result = std::move(result);
                record_step(step);
                std::optional<EdgeKind> taken = EdgeKind::static_edge;
                if (node.kind == NodeKind::decision_maker) {
                    taken = step.result.decision->condition_value ? EdgeKind::on_true
                                                                  : EdgeKind::on_false;
                }
                resolve_out_edges(node, taken);
                return;
            } catch (const std::exception& ex) {
                c.failed = true;
                c.error = ex.what();
            }
        }
        state.status[node.id] = NodeStatus::failed;
        TraceStep step;
        step.status = NodeStatus::failed;
        step.result.node_id = node.id;
        step.result.rendered_prompt = std::move(c.call.prompt);
        step.result.response = std::move(c.call.response);
        step.error = c.error;
        record_step(step);
        if (!outcome.failure) {
            outcome.failure = RunFailure{FailureKind::node_failure, node.id,
                                         "node '" + node.id + "' failed: " + c.error};
        }
        aborting = true;  // fail fast; in-flight siblings still drain
    };

    try {
    while (true) {
        // Process skips and dispatch executions in topological order.
        bool progressed = true;
        while (progressed && !aborting) {
            progressed = false;
            for (auto it = ready.begin(); it != ready.end();) {
                const std::size_t node_idx = it->second;
                const FlowNode& node = graph.nodes[node_idx];
                const bool runnable = taken_in[node_idx] > 0 || in_degree[node_idx] == 0;
                if (!runnable) {
                    it = ready.erase(it);
                    state.frontier.erase(node.id);
                    state.status[node.id] = NodeStatus::skipped;
                    TraceStep step;
                    step.status = NodeStatus::skipped;
                    step.result.node_id = node.id;
                    record_step(step);
                    resolve_out_edges(node, std::nullopt);
                    progressed = true;
                    break;  // ready mutated; restart the scan
                }
                if (in_flight.size() <
                    static_cast<std::size_t>(std::max(1, config.max_concurrency))) {
                    it = ready.erase(it);
                    state.frontier.erase(node.id);
                    state.status[node.id] = NodeStatus::running;
                    RunState snapshot = state;  // workers read a stable copy
                    std::thread worker([&, node_idx, snapshot = std::move(snapshot)]() mutable {
                        Completion c;
                        c.node_idx = node_idx;
                        try {
                            c.call = render_and_complete(graph.nodes[node_idx], snapshot,
                                                         *effective);
                        } catch (const std::exception& ex) {
                            c.failed = true;
                            c.error = ex.what();
                        }
                        std::lock_guard<std::mutex> lock(mu);
                        completions.push_back(std::move(c));
                        cv.notify_one();
                    });
                    in_flight.emplace(node_idx, std::move(worker));
                    progressed = true;
                    break;
                }
                ++it;  // at capacity; keep scanning for skippable nodes
            }
        }

        if (in_flight.empty()) break;

        Completion c;
        {
            std::unique_lock<std::mutex> lock(mu);
            cv.wait(lock, [&] { return !completions.empty(); });
            c = std::move(completions.front());
            completions.pop_front();
        }
        process_completion(std::move(c));
    }
    } catch (...) {
        for (auto& [idx, thread] : in_flight) thread.join();
        throw;
    }

    trace.finished = config.finished_override.value_or(utc_timestamp_now());
    trace.final_status = state.status;
    writer.finish(trace.finished, trace.final_status);

    outcome.trace = std::move(trace);
    outcome.variables = std::move(state.variables);
    outcome.status = outcome.trace.final_status;
    return outcome;
}

}  // namespace gotflow
