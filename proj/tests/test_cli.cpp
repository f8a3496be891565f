#include <doctest.h>

#include <algorithm>

#include "gotflow/run_store.hpp"
#include "gotflow/scaffold.hpp"
#include "test_util.hpp"

using namespace gotflow;
using gotflow::testing::CliResult;
using gotflow::testing::TempDir;
using gotflow::testing::read_file;
using gotflow::testing::run_cli;
using gotflow::testing::write_file;

namespace {

int count_lines_with(const std::string& text, const std::string& needle) {
    int count = 0;
    std::size_t pos = 0;
    while (true) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) break;
        if (text.substr(pos, eol - pos).find(needle) != std::string::npos) ++count;
        pos = eol + 1;
    }
    return count;
}

struct Bundle {
    TempDir dir;
    scaffold::BundlePaths paths;
    Bundle() { paths = scaffold::write_ads_bundle(dir.path()); }
    std::string root() const { return paths.root.string(); }
    std::string workflow() const { return paths.workflow.string(); }
};

}  // namespace

TEST_CASE("validate: packaged bundle passes") {
    Bundle b;
    const CliResult r = run_cli({"validate", b.workflow()});
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
    CHECK(count_lines_with(r.err, "warning: no-writer") == 1);
}

TEST_CASE("validate: missing file exits 2") {
    const CliResult r = run_cli({"validate", "/no/such/file.json"});
    CHECK(r.exit_code == 2);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("validate: dangling target exits 1 with one error line") {
    Bundle b;
    std::string text = read_file(b.paths.workflow);
    const std::string needle = "\"next_nodes\": [\"determine_data_feature\"]";
    text.replace(text.find(needle), needle.size(), "\"next_nodes\": [\"nope\"]");
    write_file(b.dir.path() / "broken.json", text);

    const CliResult r = run_cli({"validate", (b.dir.path() / "broken.json").string()});
    CHECK(r.exit_code == 1);
    CHECK(count_lines_with(r.err, "error:") == 1);
    CHECK(r.err.find("unknown target id 'nope'") != std::string::npos);
}

TEST_CASE("graph: writes DOT") {
    Bundle b;
    const auto dot_path = b.dir.path() / "flow.dot";
    const CliResult r = run_cli({"graph", b.workflow(), "--out", dot_path.string()});
    CHECK(r.exit_code == 0);
    const std::string dot = read_file(dot_path);
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(count_lines_with(dot, "[shape=") == 6);
    CHECK(count_lines_with(dot, " -> ") == 5);

    SUBCASE("stdout by default") {
        const CliResult r2 = run_cli({"graph", b.workflow()});
        CHECK(r2.exit_code == 0);
        CHECK(r2.out == dot);
    }
}

TEST_CASE("run: YES branch prints statuses and exits 0") {
    Bundle b;
    const CliResult r = run_cli({"run", b.workflow(), "--backend", "mock", "--script",
                                 b.paths.mock_yes.string(), "--env", "GF_ROOT=" + b.root()});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("run_id: ") != std::string::npos);
    CHECK(count_lines_with(r.out, ": done") == 4);
    CHECK(count_lines_with(r.out, ": skipped") == 2);
}

TEST_CASE("run: missing GF_ROOT names the variable and exits 2") {
    Bundle b;
    const CliResult r = run_cli({"run", b.workflow(), "--backend", "mock", "--script",
                                 b.paths.mock_yes.string()},
                                /*unset_vars=*/{"GF_ROOT"});
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("GF_ROOT") != std::string::npos);
}

TEST_CASE("run: usage errors exit 2") {
    Bundle b;
    SUBCASE("unknown backend") {
        const CliResult r = run_cli({"run", b.workflow(), "--backend", "psychic"});
        CHECK(r.exit_code == 2);
    }
    SUBCASE("mock without script") {
        const CliResult r =
            run_cli({"run", b.workflow(), "--backend", "mock", "--env", "GF_ROOT=" + b.root()});
        CHECK(r.exit_code == 2);
    }
    SUBCASE("no subcommand") {
        const CliResult r = run_cli({});
        CHECK(r.exit_code == 2);
    }
}

TEST_CASE("run: node failure exits 1") {
    Bundle b;
    write_file(b.dir.path() / "empty_script.json", "{}");
    const CliResult r =
        run_cli({"run", b.workflow(), "--backend", "mock", "--script",
                 (b.dir.path() / "empty_script.json").string(), "--env", "GF_ROOT=" + b.root()});
    CHECK(r.exit_code == 1);
    CHECK(count_lines_with(r.out, ": failed") == 1);
    CHECK(r.err.find("no mock rule matched") != std::string::npos);
}

TEST_CASE("run then replay: cassette reproduces the run byte for byte") {
    Bundle b;
    const CliResult first =
        run_cli({"run", b.workflow(), "--backend", "mock", "--script",
                 b.paths.mock_no.string(), "--env", "GF_ROOT=" + b.root()});
    REQUIRE(first.exit_code == 0);

    // pull run_dir from stdout
    const std::string marker = "run_dir: ";
    const std::size_t at = first.out.find(marker);
    REQUIRE(at != std::string::npos);
    const std::string run_dir =
        first.out.substr(at + marker.size(),
                         first.out.find('\n', at) - at - marker.size());

    SUBCASE("replay subcommand verifies the recording") {
        const CliResult r = run_cli({"replay", run_dir + "/trace.jsonl"});
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("replay: identical") != std::string::npos);
    }

    SUBCASE("run --backend replay emits a byte-identical trace") {
        const std::string out_dir = (b.dir.path() / "replay-out").string();
        const CliResult r =
            run_cli({"run", b.workflow(), "--backend", "replay", "--cassette",
                     run_dir + "/cassette.jsonl", "--out-dir", out_dir, "--env",
                     "GF_ROOT=" + b.root()});
        REQUIRE(r.exit_code == 0);
        const std::size_t at2 = r.out.find(marker);
        REQUIRE(at2 != std::string::npos);
        const std::string run_dir2 =
            r.out.substr(at2 + marker.size(), r.out.find('\n', at2) - at2 - marker.size());
        CHECK(read_file(run_dir2 + "/trace.jsonl") == read_file(run_dir + "/trace.jsonl"));
        CHECK(read_file(run_dir2 + "/cassette.jsonl") == read_file(run_dir + "/cassette.jsonl"));
    }
}

TEST_CASE("init: scaffold validates and runs") {
    TempDir dir;
    const std::string target = (dir.path() / "bundle").string();
    const CliResult r = run_cli({"init", target});
    REQUIRE(r.exit_code == 0);

    const CliResult v = run_cli({"validate", target + "/workflow.json"});
    CHECK(v.exit_code == 0);

    const CliResult run = run_cli({"run", target + "/workflow.json", "--backend", "mock",
                                   "--script", target + "/mock_yes.json", "--env",
                                   "GF_ROOT=" + target});
    CHECK(run.exit_code == 0);

    SUBCASE("init refuses a non-empty directory") {
        const CliResult again = run_cli({"init", target});
        CHECK(again.exit_code == 2);
        CHECK(again.err.find("not empty") != std::string::npos);
    }
}

TEST_CASE("diagnostics go to stderr, results to stdout") {
    Bundle b;
    const CliResult r = run_cli({"run", b.workflow(), "--backend", "mock", "--script",
                                 b.paths.mock_yes.string(), "--env", "GF_ROOT=" + b.root()});
    REQUIRE(r.exit_code == 0);
    // the self-binding warning is on stderr, never stdout
    CHECK(r.out.find("no-writer") == std::string::npos);
    CHECK(r.err.find("no-writer") != std::string::npos);
    // statuses are on stdout, not stderr
    CHECK(r.err.find(": done") == std::string::npos);
}
