// End-to-end tests for the command-line tool: every subcommand, every exit
// code, and the report formats, run against the real binary.

#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "irkit/gxl.hpp"
#include "json.hpp"
#include "support/builders.hpp"
#include "support/iso.hpp"

using namespace irkit;
using namespace irkit::testing;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

CliResult run_with_redirect(const std::string& args, const char* redirect) {
    std::string cmd = std::string(IRKIT_CLI_PATH) + " " + args + " " + redirect;
    CliResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buffer[4096];
    while (std::size_t n = std::fread(buffer, 1, sizeof buffer, pipe))
        result.output.append(buffer, n);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

CliResult run_cli(const std::string& args) { return run_with_redirect(args, "2>&1"); }

// stderr is unbuffered and would interleave unpredictably with buffered
// stdout; drop it when the test parses the stdout payload.
CliResult run_cli_stdout(const std::string& args) {
    return run_with_redirect(args, "2>/dev/null");
}

// A per-test scratch directory under the system temp dir.
struct ScratchDir {
    fs::path path;
    explicit ScratchDir(const std::string& tag) {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("irkit_cli_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write_graph(const ScratchDir& dir, const std::string& name, const Graph& g) {
    std::string path = dir.file(name);
    write_gxl_file(g, path);
    return path;
}

Graph broken_graph() {
    Graph g = minplus();
    op(g, NodeKind::Start, g.unique_node(NodeKind::StartBlock));  // second entry point
    return g;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("verify accepts a well-formed graph and rejects a broken one") {
    ScratchDir dir("verify");
    std::string good = write_graph(dir, "good.gxl", minplus());
    std::string bad = write_graph(dir, "bad.gxl", broken_graph());

    CliResult ok = run_cli("verify " + good);
    CHECK(ok.exit_code == 0);

    CliResult fail = run_cli("verify " + bad);
    CHECK(fail.exit_code == 1);
    CHECK(fail.output.find("R1 error") != std::string::npos);
    CHECK(fail.output.find("fails verification") != std::string::npos);
}

TEST_CASE("verify --json emits machine-readable diagnostics") {
    ScratchDir dir("verify_json");
    std::string good = write_graph(dir, "good.gxl", minplus());
    std::string bad = write_graph(dir, "bad.gxl", broken_graph());

    CliResult ok = run_cli_stdout("verify --json " + good);
    CHECK(ok.exit_code == 0);
    CHECK(nlohmann::json::parse(ok.output).is_array());
    CHECK(nlohmann::json::parse(ok.output).empty());

    CliResult fail = run_cli_stdout("verify --json " + bad);
    CHECK(fail.exit_code == 1);
    auto diags = nlohmann::json::parse(fail.output);
    REQUIRE(diags.is_array());
    REQUIRE(!diags.empty());
    CHECK(diags[0]["rule"] == "R1");
    CHECK(diags[0]["severity"] == "error");
}

TEST_CASE("optimize writes the reduced graph and a report") {
    ScratchDir dir("optimize");
    std::string input = write_graph(dir, "in.gxl", minplus_const());
    std::string output = dir.file("out.gxl");

    CliResult r = run_cli_stdout("optimize " + input + " -o " + output + " --report json");
    CHECK(r.exit_code == 0);
    auto report = nlohmann::json::parse(r.output);
    CHECK(report["reached_fixpoint"] == true);
    CHECK(report["nodes_before"] == 16);
    CHECK(report["nodes_after"] == 8);

    Graph result = parse_gxl_file(output);
    auto iso = isomorphic(result, minplus_const_optimized());
    CHECK_MESSAGE(iso.isomorphic, iso.mismatch);

    CliResult text = run_cli("optimize " + input + " -o " + output);
    CHECK(text.exit_code == 0);
    CHECK(text.output.find("optimize: 16 -> 8 nodes") != std::string::npos);
}

TEST_CASE("optimize validates its rule list up front") {
    ScratchDir dir("rules");
    std::string input = write_graph(dir, "in.gxl", minplus_const());
    std::string output = dir.file("out.gxl");

    CliResult good = run_cli("optimize " + input + " -o " + output +
                             " --rules fold-const,dead-nodes");
    CHECK(good.exit_code == 0);
    CHECK(fs::exists(output));

    std::string untouched = dir.file("never_written.gxl");
    CliResult bad = run_cli("optimize " + input + " -o " + untouched + " --rules no-such-rule");
    CHECK(bad.exit_code == 2);
    CHECK(!fs::exists(untouched));  // rejected before any work started
}

TEST_CASE("optimize refuses an input that fails verification") {
    ScratchDir dir("optimize_bad");
    std::string input = write_graph(dir, "bad.gxl", broken_graph());
    CliResult r = run_cli("optimize " + input + " -o " + dir.file("out.gxl"));
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("fails verification") != std::string::npos);
    CHECK(!fs::exists(dir.file("out.gxl")));
}

TEST_CASE("isel lowers a graph, optionally optimizing first") {
    ScratchDir dir("isel");
    std::string pre = write_graph(dir, "pre.gxl", minplus_const_optimized());
    std::string raw = write_graph(dir, "raw.gxl", minplus_const());

    CliResult direct = run_cli_stdout("isel " + pre + " -o " + dir.file("direct.gxl") +
                                      " --report json");
    CHECK(direct.exit_code == 0);
    auto report = nlohmann::json::parse(direct.output);
    CHECK(report["total_target_ops"] == 2);
    auto direct_iso = isomorphic(parse_gxl_file(dir.file("direct.gxl")),
                                 minplus_const_selected());
    CHECK_MESSAGE(direct_iso.isomorphic, direct_iso.mismatch);

    CliResult piped = run_cli("isel --optimize " + raw + " -o " + dir.file("piped.gxl") +
                              " --sequential --report json");
    CHECK(piped.exit_code == 0);
    auto piped_iso = isomorphic(parse_gxl_file(dir.file("piped.gxl")),
                                minplus_const_selected());
    CHECK_MESSAGE(piped_iso.isomorphic, piped_iso.mismatch);

    CliResult jobs = run_cli("isel --jobs 4 " + pre + " -o " + dir.file("jobs.gxl"));
    CHECK(jobs.exit_code == 0);
    CHECK(slurp(dir.file("jobs.gxl")) == slurp(dir.file("direct.gxl")));
}

TEST_CASE("dot renders a graph description") {
    ScratchDir dir("dot");
    std::string input = write_graph(dir, "in.gxl", minplus());

    CliResult flat = run_cli("dot " + input + " -o " + dir.file("flat.dot"));
    CHECK(flat.exit_code == 0);
    std::string flat_text = slurp(dir.file("flat.dot"));
    CHECK(flat_text.find("digraph") != std::string::npos);
    CHECK(flat_text.find("Cond") != std::string::npos);

    CliResult clustered =
        run_cli("dot --cluster-blocks " + input + " -o " + dir.file("clustered.dot"));
    CHECK(clustered.exit_code == 0);
    CHECK(slurp(dir.file("clustered.dot")).find("subgraph cluster_") != std::string::npos);
}

TEST_CASE("IO failures exit with the IO status") {
    ScratchDir dir("io");
    CliResult missing = run_cli("verify " + dir.file("nonexistent.gxl"));
    CHECK(missing.exit_code == 3);
    CHECK(missing.output.find("error:") != std::string::npos);

    std::string junk = dir.file("junk.gxl");
    std::ofstream(junk) << "this is not xml at all";
    CliResult malformed = run_cli("verify " + junk);
    CHECK(malformed.exit_code == 3);
}

TEST_CASE("usage errors exit with the usage status") {
    CliResult no_sub = run_cli("");
    CHECK(no_sub.exit_code == 2);

    CliResult unknown = run_cli("frobnicate x.gxl");
    CHECK(unknown.exit_code == 2);

    CliResult missing_output = run_cli("optimize whatever.gxl");
    CHECK(missing_output.exit_code == 2);

    CliResult help = run_cli("--help");
    CHECK(help.exit_code == 0);
    CHECK(help.output.find("verify") != std::string::npos);
    CHECK(help.output.find("isel") != std::string::npos);
}

TEST_CASE("bench sweeps a directory and keeps going past bad files") {
    ScratchDir dir("bench");
    write_graph(dir, "a_good.gxl", minplus_const());
    std::ofstream(dir.file("b_bad.gxl")) << "<graphml>wrong format</graphml>";
    write_graph(dir, "c_also_good.gxl", minplus());
    std::string records_path = dir.file("records.json");

    CliResult r = run_cli("bench " + dir.path.string() + " --json " + records_path +
                          " --jobs 2");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("a_good.gxl: optimize") != std::string::npos);
    CHECK(r.output.find("b_bad.gxl: load failed") != std::string::npos);
    CHECK(r.output.find("c_also_good.gxl: isel") != std::string::npos);

    auto records = nlohmann::json::parse(slurp(records_path));
    REQUIRE(records.is_array());
    CHECK(records.size() == 5);  // two phases per good file, one failure record
    std::size_t failures = 0;
    for (const auto& record : records)
        if (record.contains("error")) ++failures;
    CHECK(failures == 1);
    for (const auto& record : records) {
        if (record.contains("error")) continue;
        CHECK(record["wall_ms"].is_number());
        CHECK(record.contains("peak_rss_bytes"));
    }
}

TEST_CASE("bench rejects unusable directories") {
    ScratchDir dir("bench_bad");
    CliResult missing = run_cli("bench " + dir.file("nonexistent_dir"));
    CHECK(missing.exit_code == 3);

    fs::create_directories(dir.file("empty"));
    CliResult empty = run_cli("bench " + dir.file("empty"));
    CHECK(empty.exit_code == 3);
    CHECK(empty.output.find("no .gxl files") != std::string::npos);
}
