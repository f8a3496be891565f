#include "gotflow/run_store.hpp"

#include <json.hpp>

#include "gotflow/util.hpp"

namespace gotflow {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

ordered_json settings_json(const GenerationSettings& s) {
    return ordered_json{{"model", s.model},
                        {"temperature", s.temperature},
                        {"max_tokens", s.max_tokens},
                        {"timeout", s.timeout_seconds}};
}

std::string header_line(const RunTrace& trace) {
    ordered_json j;
    j["type"] = "run";
    j["schema_version"] = trace.schema_version;
    j["run_id"] = trace.run_id;
    j["spec_digest"] = trace.spec_digest;
    j["started"] = trace.started;
    ordered_json config;
    config["max_concurrency"] = trace.config.max_concurrency;
    config["env"] = ordered_json::object();
    for (const auto& [k, v] : trace.config.env) config["env"][k] = v;
    config["settings"] = settings_json(trace.config.settings);
    j["config"] = std::move(config);
    j["workflow"] = trace.workflow_text;
    return j.dump();
}

std::string step_line(const TraceStep& step) {
    ordered_json j;
    if (step.status == NodeStatus::skipped) {
        j["type"] = "skip";
        j["node_id"] = step.result.node_id;
        return j.dump();
    }
    j["type"] = "step";
    j["node_id"] = step.result.node_id;
    j["status"] = to_string(step.status);
    j["prompt"] = step.result.rendered_prompt;
    j["response"] = step.result.response;
    ordered_json bindings = ordered_json::array();
    for (const VariableBinding& b : step.result.variables) {
        bindings.push_back(ordered_json{{"kind", "variable"}, {"name", b.name}, {"value", b.value}});
    }
    for (const FileBinding& b : step.result.files) {
        bindings.push_back(ordered_json{{"kind", "file"}, {"name", b.name}, {"sha256", b.sha256}});
    }
    j["bindings"] = std::move(bindings);
    if (step.result.decision) {
        j["decision"] = ordered_json{{"result", step.result.decision->condition_value},
                                     {"next_nodes", step.result.decision->next_nodes}};
    }
    if (step.status == NodeStatus::failed) {
        j["error"] = step.error;
    }
    return j.dump();
}

std::string finish_line(const RunTrace& trace) {
    ordered_json j;
    j["type"] = "finish";
    j["finished"] = trace.finished;
    ordered_json status = ordered_json::object();
    for (const auto& [id, st] : trace.final_status) status[id] = to_string(st);
    j["status"] = std::move(status);
    return j.dump();
}

TraceStep parse_step_record(const nlohmann::json& j, std::size_t offset) {
    TraceStep step;
    try {
        if (j.at("type") == "skip") {
            step.status = NodeStatus::skipped;
            step.result.node_id = j.at("node_id").get<std::string>();
            return step;
        }
        step.status = node_status_from_string(j.at("status").get<std::string>());
        step.result.node_id = j.at("node_id").get<std::string>();
        step.result.rendered_prompt = j.at("prompt").get<std::string>();
        step.result.response = j.at("response").get<std::string>();
        for (const auto& b : j.at("bindings")) {
            if (b.at("kind") == "variable") {
                step.result.variables.push_back(
                    {b.at("name").get<std::string>(), b.at("value").get<std::string>()});
            } else {
                step.result.files.push_back(
                    {b.at("name").get<std::string>(), b.at("sha256").get<std::string>()});
            }
        }
        if (j.contains("decision")) {
            Decision d;
            d.condition_value = j.at("decision").at("result").get<bool>();
            d.next_nodes =
                j.at("decision").at("next_nodes").get<std::vector<std::string>>();
            step.result.decision = std::move(d);
        }
        if (j.contains("error")) step.error = j.at("error").get<std::string>();
    } catch (const nlohmann::json::exception& ex) {
        throw TraceError("malformed step record at byte " + std::to_string(offset) + ": " +
                             ex.what(),
                         offset);
    }
    return step;
}

}  // namespace

const char* to_string(NodeStatus s) {
    switch (s) {
        case NodeStatus::pending: return "pending";
        case NodeStatus::running: return "running";
        case NodeStatus::done: return "done";
        case NodeStatus::skipped: return "skipped";
        case NodeStatus::failed: return "failed";
    }
    return "?";
}

NodeStatus node_status_from_string(const std::string& s) {
    if (s == "pending") return NodeStatus::pending;
    if (s == "running") return NodeStatus::running;
    if (s == "done") return NodeStatus::done;
    if (s == "skipped") return NodeStatus::skipped;
    if (s == "failed") return NodeStatus::failed;
    throw TraceError("unknown node status \"" + s + "\"");
}

TraceWriter::TraceWriter(std::filesystem::path path, const RunTrace& header)
    : path_(std::move(path)) {
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) {
        throw IoError("cannot open trace file " + path_.string());
    }
    write_line(header_line(header));
}

void TraceWriter::append_step(const TraceStep& step) { write_line(step_line(step)); }

void TraceWriter::finish(const std::string& finished_timestamp,
                         const std::map<std::string, NodeStatus>& final_status) {
    RunTrace tail;
    tail.finished = finished_timestamp;
    tail.final_status = final_status;
    write_line(finish_line(tail));
}

void TraceWriter::write_line(const std::string& line) {
    out_ << line << '\n';
    out_.flush();
    if (!out_) {
        throw IoError("failed writing trace file " + path_.string());
    }
}

std::string trace_to_jsonl(const RunTrace& trace) {
    std::string out = header_line(trace);
    out.push_back('\n');
    for (const TraceStep& step : trace.steps) {
        out.append(step_line(step));
        out.push_back('\n');
    }
    if (!trace.finished.empty() || !trace.final_status.empty()) {
        out.append(finish_line(trace));
        out.push_back('\n');
    }
    return out;
}

void save_trace(const RunTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open trace file " + path.string());
    }
    out << trace_to_jsonl(trace);
    out.flush();
    if (!out) {
        throw IoError("failed writing trace file " + path.string());
    }
}

RunTrace load_trace_text(std::string_view text) {
    RunTrace trace;
    bool have_header = false;
    bool have_finish = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const std::string_view line = text.substr(pos, eol - pos);
        const std::size_t offset = pos;
        pos = eol + 1;
        if (line.empty()) continue;

        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& ex) {
            throw TraceError("malformed trace line at byte " + std::to_string(offset) + ": " +
                                 ex.what(),
                             offset);
        }
        const std::string type = j.value("type", "");
        if (!have_header) {
            if (type != "run") {
                throw TraceError("trace must begin with a run header, found \"" + type +
                                     "\" at byte " + std::to_string(offset),
                                 offset);
            }
            const int version = j.value("schema_version", -1);
            if (version != kSchemaVersion) {
                throw TraceError("trace schema version mismatch: file has " +
                                 std::to_string(version) + ", this reader supports " +
                                 std::to_string(kSchemaVersion));
            }
            try {
                trace.schema_version = version;
                trace.run_id = j.at("run_id").get<std::string>();
                trace.spec_digest = j.at("spec_digest").get<std::string>();
                trace.started = j.at("started").get<std::string>();
                trace.workflow_text = j.at("workflow").get<std::string>();
                const auto& config = j.at("config");
                trace.config.max_concurrency = config.at("max_concurrency").get<int>();
                for (const auto& [k, v] : config.at("env").items()) {
                    trace.config.env[k] = v.get<std::string>();
                }
                trace.config.settings = GenerationSettings{};
                const auto& s = config.at("settings");
                trace.config.settings.model = s.at("model").get<std::string>();
                trace.config.settings.temperature = s.at("temperature").get<double>();
                trace.config.settings.max_tokens = s.at("max_tokens").get<int>();
                trace.config.settings.timeout_seconds = s.at("timeout").get<double>();
            } catch (const nlohmann::json::exception& ex) {
                throw TraceError("malformed run header at byte " + std::to_string(offset) +
                                     ": " + ex.what(),
                                 offset);
            }
            have_header = true;
        } else if (type == "step" || type == "skip") {
            if (have_finish) {
                throw TraceError("step record after finish at byte " + std::to_string(offset),
                                 offset);
            }
            trace.steps.push_back(parse_step_record(j, offset));
        } else if (type == "finish") {
            try {
                trace.finished = j.at("finished").get<std::string>();
                for (const auto& [id, st] : j.at("status").items()) {
                    trace.final_status[id] = node_status_from_string(st.get<std::string>());
                }
            } catch (const nlohmann::json::exception& ex) {
                throw TraceError("malformed finish record at byte " + std::to_string(offset) +
                                     ": " + ex.what(),
                                 offset);
            }
            have_finish = true;
        } else {
            throw TraceError("unknown trace record type \"" + type + "\" at byte " +
                                 std::to_string(offset),
                             offset);
        }
    }
    if (!have_header) {
        throw TraceError("trace file has no run header");
    }
    return trace;
}

RunTrace load_trace(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open trace file " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_trace_text(text);
}

std::filesystem::path write_output_file(const std::filesystem::path& output_dir,
                                        const std::string& name, std::string_view content) {
    if (name.empty() || name.find_first_of("/\\") != std::string::npos) {
        throw IoError("output file name \"" + name + "\" must be a bare file name");
    }
    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + output_dir.string() + ": " +
                      ec.message());
    }
    const std::filesystem::path final_path = output_dir / name;
    const std::filesystem::path tmp_path = output_dir / (name + ".tmp-" + uuid4());
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + tmp_path.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp_path, ec);
            throw IoError("failed writing " + tmp_path.string());
        }
    }
    std::filesystem::rename(tmp_path, final_path, ec);
    if (ec) {
        std::filesystem::remove(tmp_path, ec);
        throw IoError("cannot move output into place at " + final_path.string());
    }
    return final_path;
}

}  // namespace gotflow
