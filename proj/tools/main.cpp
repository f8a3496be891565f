#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gotflow/backend.hpp"
#include "gotflow/dsl.hpp"
#include "gotflow/engine.hpp"
#include "gotflow/errors.hpp"
#include "gotflow/graph.hpp"
#include "gotflow/run_store.hpp"
#include "gotflow/scaffold.hpp"
#include "gotflow/util.hpp"

namespace fs = std::filesystem;
using namespace gotflow;

namespace {

// Exit codes, stable across subcommands: 0 success, 1 run-time/workflow
// failure, 2 usage, environment, or validation problems.
constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

std::string read_file_or_exit(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read " << path.string() << "\n";
        std::exit(kUsage);
    }
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

void print_diagnostics(const std::vector<Diagnostic>& diagnostics) {
    for (const Diagnostic& d : diagnostics) {
        std::cerr << to_string(d.severity) << ": " << d.code << ": "
                  << (d.node_id.empty() ? "-" : d.node_id) << ": " << d.message << "\n";
    }
}

std::map<std::string, std::string> parse_env_flags(const std::vector<std::string>& flags) {
    std::map<std::string, std::string> out;
    for (const std::string& flag : flags) {
        const std::size_t eq = flag.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "error: --env expects KEY=VALUE, got \"" << flag << "\"\n";
            std::exit(kUsage);
        }
        out[flag.substr(0, eq)] = flag.substr(eq + 1);
    }
    return out;
}

// Resolve every ${NAME} the workflow references: --env wins, then the
// process environment, then `defaults` (a replayed run's recorded env).
std::map<std::string, std::string> resolve_env(
    const WorkflowSpec& spec, const std::map<std::string, std::string>& flag_env,
    const std::map<std::string, std::string>& defaults) {
    std::map<std::string, std::string> env = flag_env;
    for (const std::string& name : referenced_path_variables(spec)) {
        if (env.count(name)) continue;
        if (const char* value = std::getenv(name.c_str())) {
            env[name] = value;
        } else if (auto it = defaults.find(name); it != defaults.end()) {
            env[name] = it->second;
        } else {
            std::cerr << "error: path variable ${" << name
                      << "} is not set; pass --env " << name << "=... or export it\n";
            std::exit(kUsage);
        }
    }
    return env;
}

int cmd_validate(const fs::path& workflow_path) {
    const std::string text = read_file_or_exit(workflow_path);
    const std::vector<Diagnostic> diagnostics = collect_diagnostics(text);
    print_diagnostics(diagnostics);
    return has_errors(diagnostics) ? kFailure : kOk;
}

int cmd_graph(const fs::path& workflow_path, const std::optional<fs::path>& out_path) {
    const std::string text = read_file_or_exit(workflow_path);
    WorkflowSpec spec;
    try {
        spec = parse_workflow(text);
    } catch (const ParseError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kUsage;
    }
    const std::string dot = export_dot(build_graph(spec));
    if (!out_path) {
        std::cout << dot;
        return kOk;
    }
    std::ofstream out(*out_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        std::cerr << "error: cannot write " << out_path->string() << "\n";
        return kUsage;
    }
    out << dot;
    return kOk;
}

struct RunFlags {
    std::string backend = "mock";
    std::optional<fs::path> script;
    std::optional<fs::path> cassette;
    std::optional<fs::path> out_dir;
    std::optional<int> max_concurrency;
    std::optional<std::string> model;
    std::vector<std::string> env;
    bool no_record = false;
};

int cmd_run(const fs::path& workflow_path, const RunFlags& flags) {
    const std::string text = read_file_or_exit(workflow_path);
    WorkflowSpec spec;
    try {
        spec = parse_workflow(text);
    } catch (const ParseError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kUsage;
    }
    {
        const std::vector<Diagnostic> diagnostics = validate_graph(build_graph(spec));
        print_diagnostics(diagnostics);
        if (has_errors(diagnostics)) return kUsage;
    }

    RunConfig config;
    config.record_cassette = !flags.no_record;

    // Replaying a recorded run adopts its identity so traces can be diffed.
    std::map<std::string, std::string> env_defaults;
    std::shared_ptr<LLMBackend> backend;
    if (flags.backend == "mock") {
        if (!flags.script) {
            std::cerr << "error: --backend mock requires --script\n";
            return kUsage;
        }
        try {
            backend = std::make_shared<MockBackend>(
                MockScript::from_json(read_file_or_exit(*flags.script)));
        } catch (const BackendError& ex) {
            std::cerr << "error: " << ex.what() << "\n";
            return kUsage;
        }
    } else if (flags.backend == "replay") {
        if (!flags.cassette) {
            std::cerr << "error: --backend replay requires --cassette\n";
            return kUsage;
        }
        try {
            backend = std::make_shared<ReplayBackend>(
                ReplayBackend::from_cassette_file(*flags.cassette));
        } catch (const std::exception& ex) {
            std::cerr << "error: " << ex.what() << "\n";
            return kUsage;
        }
        const fs::path sibling_trace = flags.cassette->parent_path() / "trace.jsonl";
        if (fs::exists(sibling_trace)) {
            try {
                const RunTrace original = load_trace(sibling_trace);
                config.run_id_override = original.run_id;
                config.started_override = original.started;
                config.finished_override = original.finished;
                config.max_concurrency = original.config.max_concurrency;
                config.settings = original.config.settings;
                env_defaults = original.config.env;
            } catch (const std::exception& ex) {
                std::cerr << "warning: cannot adopt run metadata from "
                          << sibling_trace.string() << ": " << ex.what() << "\n";
            }
        }
    } else if (flags.backend == "http") {
        try {
            backend = std::make_shared<HttpBackend>(HttpBackendOptions::from_env());
        } catch (const BackendError& ex) {
            std::cerr << "error: " << ex.what() << "\n";
            return kUsage;
        }
    } else {
        std::cerr << "error: unknown backend \"" << flags.backend << "\"\n";
        return kUsage;
    }

    if (flags.max_concurrency) config.max_concurrency = *flags.max_concurrency;
    if (flags.model) config.settings.model = *flags.model;
    if (flags.out_dir) config.output_dir_override = *flags.out_dir;
    config.env = resolve_env(spec, parse_env_flags(flags.env), env_defaults);

    RunOutcome outcome;
    try {
        outcome = run_workflow(spec, *backend, config);
    } catch (const PathError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kUsage;
    } catch (const IoError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kUsage;
    }
    if (outcome.failure && outcome.failure->kind != FailureKind::node_failure) {
        std::cerr << "error: " << outcome.failure->message << "\n";
        return kUsage;
    }

    std::cout << "run_id: " << outcome.trace.run_id << "\n";
    std::cout << "run_dir: " << outcome.run_dir.string() << "\n";
    for (const FlowNode& node : spec.nodes) {
        std::cout << node.id << ": " << to_string(outcome.status.at(node.id)) << "\n";
    }
    if (outcome.failure) {
        std::cerr << "error: " << outcome.failure->message << "\n";
        return kFailure;
    }
    return kOk;
}

int cmd_replay(const fs::path& trace_path) {
    RunTrace original;
    try {
        original = load_trace(trace_path);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kUsage;
    }
    const fs::path cassette = trace_path.parent_path() / "cassette.jsonl";
    if (!fs::exists(cassette)) {
        std::cerr << "error: no cassette next to the trace at " << cassette.string() << "\n";
        return kUsage;
    }

    WorkflowSpec spec;
    try {
        spec = parse_workflow(original.workflow_text);
    } catch (const ParseError& ex) {
        std::cerr << "error: embedded workflow does not parse: " << ex.what() << "\n";
        return kUsage;
    }

    ReplayBackend backend = ReplayBackend::from_cassette_file(cassette);
    RunConfig config;
    config.max_concurrency = original.config.max_concurrency;
    config.env = original.config.env;
    config.settings = original.config.settings;
    config.run_id_override = original.run_id;
    config.started_override = original.started;
    config.finished_override = original.finished;
    config.output_dir_override = fs::temp_directory_path() / ("gotflow-replay-" + uuid4());

    RunOutcome outcome;
    try {
        outcome = run_workflow(spec, backend, config);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kFailure;
    }

    // Verify: identical final statuses and, per node, identical responses and
    // output hashes.
    auto summarize = [](const RunTrace& trace) {
        std::map<std::string, std::string> digest;
        for (const TraceStep& step : trace.steps) {
            if (step.status == NodeStatus::skipped) {
                digest[step.result.node_id] = "skipped";
                continue;
            }
            std::string entry = "response:" + sha256_hex(step.result.response);
            for (const VariableBinding& b : step.result.variables) {
                entry += ";var:" + b.name + ":" + sha256_hex(b.value);
            }
            for (const FileBinding& b : step.result.files) {
                entry += ";file:" + b.name + ":" + b.sha256;
            }
            digest[step.result.node_id] = std::move(entry);
        }
        return digest;
    };

    bool identical = outcome.trace.final_status == original.final_status &&
                     summarize(outcome.trace) == summarize(original);
    // The replayed files must also hash to what the new trace recorded.
    for (const TraceStep& step : outcome.trace.steps) {
        for (const FileBinding& b : step.result.files) {
            std::ifstream in(outcome.run_dir / b.name, std::ios::binary);
            std::string bytes((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
            if (!in || sha256_hex(bytes) != b.sha256) identical = false;
        }
    }

    std::cout << (identical ? "replay: identical\n" : "replay: MISMATCH\n");
    if (outcome.failure) {
        std::cerr << "error: " << outcome.failure->message << "\n";
        return kFailure;
    }
    return identical ? kOk : kFailure;
}

int cmd_init(const fs::path& dir) {
    std::error_code ec;
    if (fs::exists(dir) && !fs::is_empty(dir, ec)) {
        std::cerr << "error: " << dir.string() << " exists and is not empty\n";
        return kUsage;
    }
    scaffold::BundlePaths paths;
    try {
        paths = scaffold::write_ads_bundle(dir);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kUsage;
    }
    std::cout << "workflow: " << paths.workflow.string() << "\n";
    std::cout << "mock scripts: " << paths.mock_yes.string() << ", "
              << paths.mock_no.string() << "\n";
    std::cout << "run it with:\n";
    std::cout << "  gotflow run " << paths.workflow.string() << " --backend mock --script "
              << paths.mock_yes.string() << " --env GF_ROOT=" << paths.root.string() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph-of-thought workflow engine: validate, visualize, run, and replay "
                 "JSON-defined LLM workflows"};
    app.require_subcommand(1);

    std::string workflow_arg;
    std::string out_arg;
    std::string trace_arg;
    std::string dir_arg;
    RunFlags run_flags;

    CLI::App* validate = app.add_subcommand("validate", "statically check a workflow");
    validate->add_option("workflow", workflow_arg, "workflow JSON document")->required();

    CLI::App* graph = app.add_subcommand("graph", "export the workflow graph as DOT");
    graph->add_option("workflow", workflow_arg, "workflow JSON document")->required();
    graph->add_option("--out", out_arg, "output DOT file (default: stdout)");

    CLI::App* run = app.add_subcommand("run", "execute a workflow");
    run->add_option("workflow", workflow_arg, "workflow JSON document")->required();
    run->add_option("--backend", run_flags.backend, "mock | replay | http")
        ->check(CLI::IsMember({"mock", "replay", "http"}));
    std::string script_arg, cassette_arg, out_dir_arg, model_arg;
    run->add_option("--script", script_arg, "mock script: JSON object node id -> response");
    run->add_option("--cassette", cassette_arg, "cassette file for --backend replay");
    run->add_option("--max-concurrency", run_flags.max_concurrency,
                    "run up to N independent nodes at once (default 1)");
    run->add_option("--env", run_flags.env, "KEY=VALUE for ${KEY} path variables")
        ->take_all();
    run->add_option("--out-dir", out_dir_arg, "override the workflow's output directory");
    run->add_option("--model", model_arg, "model name for the http backend");
    run->add_flag("--no-record", run_flags.no_record, "skip writing a cassette");

    CLI::App* replay = app.add_subcommand("replay", "re-execute a recorded run and verify it");
    replay->add_option("trace", trace_arg, "trace.jsonl of a recorded run")->required();

    CLI::App* init = app.add_subcommand("init", "write the packaged example bundle");
    init->add_option("dir", dir_arg, "target directory (must be empty or absent)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (validate->parsed()) return cmd_validate(workflow_arg);
    if (graph->parsed()) {
        return cmd_graph(workflow_arg,
                         out_arg.empty() ? std::nullopt : std::optional<fs::path>(out_arg));
    }
    if (run->parsed()) {
        if (!script_arg.empty()) run_flags.script = script_arg;
        if (!cassette_arg.empty()) run_flags.cassette = cassette_arg;
        if (!out_dir_arg.empty()) run_flags.out_dir = out_dir_arg;
        if (!model_arg.empty()) run_flags.model = model_arg;
        return cmd_run(workflow_arg, run_flags);
    }
    if (replay->parsed()) return cmd_replay(trace_arg);
    if (init->parsed()) return cmd_init(dir_arg);
    return kUsage;
}
