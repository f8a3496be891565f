// Acceptance suite: fixture- and property-based checks over the whole
// engine. Prints one PASS/FAIL line per criterion; exits non-zero if any
// criterion fails.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "gotflow/engine.hpp"
#include "gotflow/errors.hpp"
#include "gotflow/graph.hpp"
#include "gotflow/scaffold.hpp"
#include "gotflow/template_engine.hpp"
#include "gotflow/util.hpp"
#include "test_util.hpp"

using namespace gotflow;
using gotflow::testing::GenOptions;
using gotflow::testing::TempDir;
using gotflow::testing::generate_workflow;
using gotflow::testing::read_file;
using gotflow::testing::write_file;

namespace {

struct Criterion {
    std::string name;
    std::function<void()> run;  // throws std::runtime_error on failure
};

void require(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error(what);
}

std::set<std::string> with_status(const RunOutcome& outcome, NodeStatus status) {
    std::set<std::string> out;
    for (const auto& [id, st] : outcome.status) {
        if (st == status) out.insert(id);
    }
    return out;
}

std::set<std::string> output_files(const std::filesystem::path& run_dir) {
    std::set<std::string> out;
    for (const auto& entry : std::filesystem::directory_iterator(run_dir)) {
        const std::string name = entry.path().filename().string();
        if (name != "trace.jsonl" && name != "cassette.jsonl") out.insert(name);
    }
    return out;
}

RunOutcome run_ads(const scaffold::BundlePaths& paths, const WorkflowSpec& spec,
                   const std::string& answer, double* seconds) {
    MockScript script;
    script.rules.push_back({MockRule::Match::node_id, "determine_data_feature", answer});
    script.default_response = "analysis text";
    MockBackend backend(script);
    RunConfig config;
    config.env["GF_ROOT"] = paths.root.string();
    const auto start = std::chrono::steady_clock::now();
    RunOutcome outcome = run_workflow(spec, backend, config);
    if (seconds) {
        *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return outcome;
}

// 1. YES branch of the packaged two-branch workflow.
void criterion_yes_branch() {
    TempDir dir;
    const auto paths = scaffold::write_ads_bundle(dir.path());
    const WorkflowSpec spec = parse_workflow(read_file(paths.workflow));
    double seconds = 0;
    const RunOutcome outcome = run_ads(paths, spec, "yes", &seconds);
    require(outcome.ok(), "run failed: " + (outcome.failure ? outcome.failure->message : ""));
    require(with_status(outcome, NodeStatus::done) ==
                std::set<std::string>{"data_reader", "determine_data_feature",
                                      "data_trend_miner", "quantitative_analysis"},
            "executed set is wrong");
    require(with_status(outcome, NodeStatus::skipped) ==
                std::set<std::string>{"qualitative_analysis_1", "qualitative_analysis_2"},
            "skipped set is wrong");
    require(output_files(outcome.run_dir) ==
                std::set<std::string>{"quantitative_analysis_output.txt"},
            "expected exactly quantitative_analysis_output.txt");
    require(seconds < 1.0, "run took " + std::to_string(seconds) + "s (>= 1s)");
}

// 2. NO branch.
void criterion_no_branch() {
    TempDir dir;
    const auto paths = scaffold::write_ads_bundle(dir.path());
    const WorkflowSpec spec = parse_workflow(read_file(paths.workflow));
    double seconds = 0;
    const RunOutcome outcome = run_ads(paths, spec, "no", &seconds);
    require(outcome.ok(), "run failed");
    require(with_status(outcome, NodeStatus::done) ==
                std::set<std::string>{"data_reader", "determine_data_feature",
                                      "qualitative_analysis_1", "qualitative_analysis_2"},
            "executed set is wrong");
    require(with_status(outcome, NodeStatus::skipped) ==
                std::set<std::string>{"data_trend_miner", "quantitative_analysis"},
            "skipped set is wrong");
    require(output_files(outcome.run_dir) ==
                std::set<std::string>{"qualitative_analysis_1_output.txt",
                                      "qualitative_analysis_2_output.txt"},
            "expected exactly the two qualitative output files");
    require(seconds < 1.0, "run took " + std::to_string(seconds) + "s (>= 1s)");
}

// 3. Template exactness against the checked-in golden rendering.
void criterion_template_exactness() {
    const ParameterSet params = load_parameter_file(scaffold::ads_trend_json());
    const std::map<std::string, std::string> variables{{"data_reader_output", "D"}};
    ParameterScope scope({&variables, &params});
    const std::string rendered = render_template(scaffold::ads_decision_template(), scope);

    require(rendered.find("Large Advertising Company") != std::string::npos,
            "missing organization value");
    require(rendered.find("Coffee Producer") != std::string::npos, "missing customer value");
    require(rendered.find(params.at("content")) != std::string::npos,
            "missing the full content paragraph");
    require(rendered.find("****\nD\n****") != std::string::npos,
            "missing D between the **** fences");
    require(rendered.find("#{") == std::string::npos, "placeholder syntax left in output");

    const std::filesystem::path golden =
        std::filesystem::path(GOTFLOW_SOURCE_DIR) / "tests" / "golden" /
        "decision_prompt_golden.txt";
    const std::string expected = read_file(golden);
    require(!expected.empty(), "golden file missing: " + golden.string());
    require(rendered == expected, "rendered text differs from the golden file");
}

// 4. parse -> serialize -> parse structural equality.
void criterion_round_trip() {
    const WorkflowSpec ads = parse_workflow(scaffold::ads_workflow_json());
    require(parse_workflow(serialize_workflow(ads)) == ads, "Ads round-trip failed");

    std::mt19937 rng(424242);
    GenOptions options;
    options.max_nodes = 20;
    options.with_extras = true;
    for (int i = 0; i < 200; ++i) {
        const auto doc = generate_workflow(rng, options);
        const WorkflowSpec spec = parse_workflow(doc.json);
        if (!(parse_workflow(serialize_workflow(spec)) == spec)) {
            throw std::runtime_error("round-trip failed on generated spec #" +
                                     std::to_string(i));
        }
    }
}

// 5. Validator mutation suite.
void criterion_mutations() {
    const std::string good = scaffold::ads_workflow_json();
    require(!has_errors(collect_diagnostics(good)), "unmutated bundle must have zero errors");

    auto mutate = [&](const std::string& from, const std::string& to) {
        std::string text = good;
        const std::size_t at = text.find(from);
        require(at != std::string::npos, "mutation anchor not found: " + from);
        text.replace(at, from.size(), to);
        return text;
    };

    struct Mutation {
        const char* label;
        std::string text;
    };
    const Mutation all[] = {
        {"dangling id", mutate("\"next_nodes\": [\"determine_data_feature\"]",
                               "\"next_nodes\": [\"missing_node\"]")},
        {"duplicate id", mutate("\"id\": \"data_trend_miner\"", "\"id\": \"data_reader\"")},
        {"missing false-branch",
         mutate("\"condition_result\": false", "\"condition_result\": true")},
        {"cycle", mutate("\"name\": \"quantitative_analysis_output.txt\"\n      }],\n      "
                         "\"next_nodes\": []",
                         "\"name\": \"quantitative_analysis_output.txt\"\n      }],\n      "
                         "\"next_nodes\": [\"data_reader\"]")},
        {"self-loop", mutate("\"next_nodes\": [\"determine_data_feature\"]",
                             "\"next_nodes\": [\"data_reader\"]")},
        {"empty id", mutate("\"id\": \"data_reader\"", "\"id\": \"\"")},
        {"unknown operator", mutate("\"operator\": \"equal\"", "\"operator\": \"similar\"")},
        {"unknown node type", mutate("\"type\": \"decision_maker\"", "\"type\": \"oracle\"")},
        {"missing prompt_template",
         mutate("\"type\": \"prompt_template\",\n          \"file_path\": "
                "\"${GF_ROOT}/data/workflows/Ads/prompts/sum_data_reader.txt\"",
                "\"type\": \"literal\",\n          \"value\": \"inline\"")},
        {"duplicate variable writer",
         mutate("{\n        \"type\": \"variable\",\n        \"name\": "
                "\"data_trend_miner_output\"\n      }",
                "{\n        \"type\": \"variable\",\n        \"name\": "
                "\"data_reader_output\"\n      }")},
    };
    for (const Mutation& m : all) {
        if (!has_errors(collect_diagnostics(m.text))) {
            throw std::runtime_error(std::string("mutation \"") + m.label +
                                     "\" produced no error diagnostic");
        }
    }
}

// 6. Condition truth table, 15 cells.
void criterion_truth_table() {
    struct Cell {
        const char* response;
        ConditionOperator op;
        bool expected;
    };
    // hand-enumerated oracle from the normalization rule (trim ASCII
    // whitespace, strip one trailing '.', case-fold) with operand "yes"
    const Cell table[] = {
        {"yes", ConditionOperator::equal, true},
        {"yes", ConditionOperator::not_equal, false},
        {"yes", ConditionOperator::contains, true},
        {"Yes.", ConditionOperator::equal, true},
        {"Yes.", ConditionOperator::not_equal, false},
        {"Yes.", ConditionOperator::contains, true},
        {"  YES ", ConditionOperator::equal, true},
        {"  YES ", ConditionOperator::not_equal, false},
        {"  YES ", ConditionOperator::contains, true},
        {"no", ConditionOperator::equal, false},
        {"no", ConditionOperator::not_equal, true},
        {"no", ConditionOperator::contains, false},
        {"maybe", ConditionOperator::equal, false},
        {"maybe", ConditionOperator::not_equal, true},
        {"maybe", ConditionOperator::contains, false},
    };
    int cell = 0;
    for (const Cell& c : table) {
        RunState state;
        state.variables["x"] = c.response;
        Condition cond;
        cond.data_source.name = "x";
        cond.op = c.op;
        cond.operand = "yes";
        if (evaluate_condition(cond, state) != c.expected) {
            throw std::runtime_error("truth table cell " + std::to_string(cell) +
                                     " mismatch for response \"" + c.response + "\"");
        }
        ++cell;
    }
    require(cell == 15, "expected 15 cells");
}

// 7a. Record with the mock, replay from the cassette: byte-identical traces
// and files. 7b. max_concurrency=4 on a 12-node DAG with two decision
// makers matches the sequential run.
void criterion_determinism_and_replay() {
    TempDir dir;
    const auto paths = scaffold::write_ads_bundle(dir.path());
    const WorkflowSpec spec = parse_workflow(read_file(paths.workflow));

    MockScript script;
    script.rules.push_back({MockRule::Match::node_id, "determine_data_feature", "yes"});
    script.default_response = "analysis text";
    MockBackend mock(script);

    RunConfig config;
    config.env["GF_ROOT"] = paths.root.string();
    TempDir out1;
    config.output_dir_override = out1.path();
    const RunOutcome first = run_workflow(spec, mock, config);
    require(first.ok(), "recording run failed");

    ReplayBackend replay = ReplayBackend::from_cassette_file(first.run_dir / "cassette.jsonl");
    RunConfig replay_config = config;
    TempDir out2;
    replay_config.output_dir_override = out2.path();
    replay_config.run_id_override = first.trace.run_id;
    replay_config.started_override = first.trace.started;
    replay_config.finished_override = first.trace.finished;
    const RunOutcome second = run_workflow(spec, replay, replay_config);
    require(second.ok(), "replay run failed");

    require(read_file(first.run_dir / "trace.jsonl") ==
                read_file(second.run_dir / "trace.jsonl"),
            "replayed trace differs");
    require(output_files(first.run_dir) == output_files(second.run_dir),
            "replayed file set differs");
    for (const std::string& name : output_files(first.run_dir)) {
        require(read_file(first.run_dir / name) == read_file(second.run_dir / name),
                "replayed file differs: " + name);
    }

    // 7b: parallel vs sequential equivalence on a generated DAG.
    std::mt19937 rng(777001);
    GenOptions options;
    options.min_nodes = 12;
    options.max_nodes = 12;
    options.min_decisions = 2;
    TempDir gen_dir;
    write_file(gen_dir.path() / "tpl.txt", "task body");
    MockScript gen_script;
    gen_script.default_response = "ok";
    MockBackend gen_mock(gen_script);

    const auto doc = generate_workflow(rng, options);
    const WorkflowSpec gen_spec = parse_workflow(doc.json);
    int decision_makers = 0;
    for (const FlowNode& node : gen_spec.nodes) {
        if (node.kind == NodeKind::decision_maker) ++decision_makers;
    }
    require(gen_spec.nodes.size() == 12, "generated DAG must have 12 nodes");
    require(decision_makers >= 2, "generated DAG must have two decision makers");

    RunConfig seq;
    seq.env["GF_ROOT"] = gen_dir.path().string();
    TempDir seq_out;
    seq.output_dir_override = seq_out.path();
    RunConfig par = seq;
    par.max_concurrency = 4;
    TempDir par_out;
    par.output_dir_override = par_out.path();

    const RunOutcome a = run_workflow(gen_spec, gen_mock, seq);
    const RunOutcome b = run_workflow(gen_spec, gen_mock, par);
    require(a.ok() && b.ok(), "generated runs failed");
    require(a.variables == b.variables, "variable stores differ between 1 and 4 workers");
    require(a.status == b.status, "status maps differ between 1 and 4 workers");
    require(output_files(a.run_dir) == output_files(b.run_dir), "file sets differ");
    for (const std::string& name : output_files(a.run_dir)) {
        require(read_file(a.run_dir / name) == read_file(b.run_dir / name),
                "file content differs: " + name);
    }
}

// 8. Topological soundness on 500 random DAGs; engine trace order agrees.
void criterion_topological_soundness() {
    std::mt19937 rng(880088);
    GenOptions options;
    options.min_nodes = 1;
    options.max_nodes = 30;

    TempDir dir;
    write_file(dir.path() / "tpl.txt", "body");
    MockScript script;
    script.default_response = "ok";
    MockBackend backend(script);

    for (int i = 0; i < 500; ++i) {
        const auto doc = generate_workflow(rng, options);
        const WorkflowSpec spec = parse_workflow(doc.json);
        const WorkflowGraph graph = build_graph(spec);
        const std::vector<std::string> order = topological_order(graph);

        std::map<std::string, std::size_t> position;
        for (std::size_t k = 0; k < order.size(); ++k) position[order[k]] = k;
        require(position.size() == graph.nodes.size(), "order is not a permutation");
        for (const Edge& e : graph.edges) {
            if (position.at(e.from) >= position.at(e.to)) {
                throw std::runtime_error("edge precedence violated in DAG #" +
                                         std::to_string(i));
            }
        }

        // engine trace order must respect the same precedences
        RunConfig config;
        config.env["GF_ROOT"] = dir.path().string();
        config.record_cassette = false;
        TempDir out;
        config.output_dir_override = out.path();
        const RunOutcome outcome = run_workflow(spec, backend, config);
        require(outcome.ok(), "generated run failed in DAG #" + std::to_string(i));
        std::map<std::string, std::size_t> trace_pos;
        for (std::size_t k = 0; k < outcome.trace.steps.size(); ++k) {
            trace_pos[outcome.trace.steps[k].result.node_id] = k;
        }
        require(trace_pos.size() == graph.nodes.size(),
                "trace does not cover every node in DAG #" + std::to_string(i));
        for (const Edge& e : graph.edges) {
            if (trace_pos.at(e.from) >= trace_pos.at(e.to)) {
                throw std::runtime_error("trace order violated an edge in DAG #" +
                                         std::to_string(i));
            }
        }
    }
}

// 9. Fuzz: random byte inputs must parse or raise ParseError, never crash.
void criterion_fuzz() {
    std::mt19937 rng(990099);
    std::uniform_int_distribution<int> len_dist(0, 300);
    std::uniform_int_distribution<int> byte_dist(0, 255);
    const std::string seed_doc = scaffold::ads_workflow_json();

    for (int i = 0; i < 10000; ++i) {
        std::string input;
        if (i % 3 == 0) {
            // structured mutation: flip bytes inside a valid document
            input = seed_doc;
            std::uniform_int_distribution<std::size_t> pos_dist(0, input.size() - 1);
            const int flips = 1 + (i % 8);
            for (int f = 0; f < flips; ++f) {
                input[pos_dist(rng)] = static_cast<char>(byte_dist(rng));
            }
        } else {
            const int len = len_dist(rng);
            input.reserve(static_cast<std::size_t>(len));
            for (int k = 0; k < len; ++k) {
                input.push_back(static_cast<char>(byte_dist(rng)));
            }
        }
        try {
            (void)parse_workflow(input);
        } catch (const ParseError&) {
            // the accepted failure mode
        }
    }
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"1. two-branch fixture, YES path: executed/skipped sets and single output file",
         criterion_yes_branch},
        {"2. two-branch fixture, NO path: executed/skipped sets and two output files",
         criterion_no_branch},
        {"3. template rendering matches the independent golden byte for byte",
         criterion_template_exactness},
        {"4. parse/serialize round-trip on the bundle and 200 generated specs",
         criterion_round_trip},
        {"5. validator mutation suite: 10 single-field breakages all caught",
         criterion_mutations},
        {"6. condition truth table (15 cells) matches the hand-enumerated oracle",
         criterion_truth_table},
        {"7. determinism: cassette replay byte-identical; 4-way run matches sequential",
         criterion_determinism_and_replay},
        {"8. topological soundness and trace order on 500 random DAGs",
         criterion_topological_soundness},
        {"9. fuzz: 10,000 arbitrary inputs parse or fail cleanly",
         criterion_fuzz},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        try {
            c.run();
            std::cout << "PASS  " << c.name << "\n";
        } catch (const std::exception& ex) {
            ++failures;
            std::cout << "FAIL  " << c.name << " — " << ex.what() << "\n";
        }
    }
    if (failures != 0) {
        std::cout << failures << " criterion(s) failed\n";
    }
    return failures == 0 ? 0 : 1;
}
