// irkit — verify, optimize, select, export, and benchmark program graphs.

#include <sys/resource.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "irkit/dot.hpp"
#include "irkit/gxl.hpp"
#include "irkit/optimize.hpp"
#include "irkit/select.hpp"
#include "irkit/verify.hpp"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

// Process-wide resident-set high-water mark, or nullopt where unsupported.
std::optional<std::size_t> peak_rss_bytes() {
    rusage usage{};
    if (getrusage(RUSAGE_SELF, &usage) != 0 || usage.ru_maxrss <= 0) return std::nullopt;
    return static_cast<std::size_t>(usage.ru_maxrss) * 1024;  // ru_maxrss is in KiB on Linux
}

irkit::Graph load_graph(const std::string& path) { return irkit::parse_gxl_file(path); }

// Verifies and prints diagnostics; returns false when errors were found.
bool gate_verify(const irkit::Graph& graph, const std::string& path, bool json) {
    auto diags = irkit::verify(graph);
    if (json)
        std::cout << irkit::diagnostics_to_json(diags) << '\n';
    else if (!diags.empty())
        std::cout << irkit::diagnostics_to_text(diags);
    if (irkit::has_errors(diags)) {
        std::cerr << "error: " << path << " fails verification\n";
        return false;
    }
    return true;
}

int cmd_verify(const std::string& input, bool json) {
    irkit::Graph graph = load_graph(input);
    return gate_verify(graph, input, json) ? kExitOk : kExitVerification;
}

int cmd_optimize(const std::string& input, const std::string& output,
                 const std::vector<std::string>& rules, std::size_t max_iterations,
                 bool verify_each_round, const std::string& report_format) {
    irkit::Graph graph = load_graph(input);
    if (!gate_verify(graph, input, false)) return kExitVerification;

    irkit::OptConfig config;
    config.rules.insert(rules.begin(), rules.end());
    config.max_iterations = max_iterations;
    config.verify_each_round = verify_each_round;
    auto report = irkit::optimize(graph, config);

    irkit::write_gxl_file(graph, output);
    if (report_format == "json")
        std::cout << irkit::pass_report_to_json(report) << '\n';
    else if (report_format == "text")
        std::cout << irkit::pass_report_to_text(report);
    return kExitOk;
}

int cmd_isel(const std::string& input, const std::string& output, bool sequential,
             unsigned jobs, bool optimize_first, const std::string& report_format) {
    irkit::Graph graph = load_graph(input);
    if (!gate_verify(graph, input, false)) return kExitVerification;

    if (optimize_first) {
        auto opt_report = irkit::optimize(graph);
        if (report_format == "text") std::cout << irkit::pass_report_to_text(opt_report);
    }
    irkit::SelectOptions options;
    options.sequential = sequential;
    options.jobs = jobs;
    auto report = irkit::select(graph, options);

    irkit::write_gxl_file(graph, output);
    if (report_format == "json")
        std::cout << irkit::selection_report_to_json(report) << '\n';
    else if (report_format == "text")
        std::cout << irkit::selection_report_to_text(report);
    return kExitOk;
}

int cmd_dot(const std::string& input, const std::string& output, bool cluster_blocks) {
    irkit::Graph graph = load_graph(input);
    irkit::write_dot_file(graph, cluster_blocks, output);
    return kExitOk;
}

// One benchmark record per completed phase per file, plus one failure record
// when processing stops early.
nlohmann::json bench_file(const std::string& path) {
    nlohmann::json records = nlohmann::json::array();
    auto rss = [] {
        auto peak = peak_rss_bytes();
        return peak ? nlohmann::json(*peak) : nlohmann::json(nullptr);
    };
    try {
        irkit::Graph graph = irkit::parse_gxl_file(path);
        auto diags = irkit::verify(graph);
        if (irkit::has_errors(diags)) {
            records.push_back({{"file", path},
                               {"phase", "verify"},
                               {"error", "verification failed"},
                               {"diagnostics", irkit::diagnostics_to_json(diags)}});
            return records;
        }

        std::size_t nodes_before = graph.node_count();
        auto opt = irkit::optimize(graph);
        records.push_back({{"file", path},
                           {"phase", "optimize"},
                           {"rule_counts", opt.applications},
                           {"nodes_before", nodes_before},
                           {"nodes_after", graph.node_count()},
                           {"wall_ms", opt.wall_ms},
                           {"peak_rss_bytes", rss()}});

        nodes_before = graph.node_count();
        auto sel = irkit::select(graph);
        records.push_back(
            {{"file", path},
             {"phase", "isel"},
             {"rule_counts", sel.selected},
             {"nodes_before", nodes_before},
             {"nodes_after", graph.node_count()},
             {"wall_ms", sel.phase_ms[0] + sel.phase_ms[1] + sel.phase_ms[2]},
             {"peak_rss_bytes", rss()}});
    } catch (const std::exception& e) {
        records.push_back({{"file", path}, {"phase", "load"}, {"error", e.what()}});
    }
    return records;
}

int cmd_bench(const std::string& dir, const std::string& json_out, unsigned jobs) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    try {
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".gxl")
                files.push_back(entry.path().string());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "error: no .gxl files in " << dir << '\n';
        return kExitIo;
    }

    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    std::vector<nlohmann::json> per_file(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= files.size()) return;
            per_file[i] = bench_file(files[i]);
        }
    };
    if (jobs <= 1 || files.size() == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < std::min<std::size_t>(jobs, files.size()); ++w)
            threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    nlohmann::json all = nlohmann::json::array();
    for (std::size_t i = 0; i < files.size(); ++i) {
        for (auto& record : per_file[i]) {
            if (record.contains("error")) {
                std::cout << files[i] << ": " << record["phase"].get<std::string>()
                          << " failed: " << record["error"].get<std::string>() << '\n';
            } else {
                std::cout << files[i] << ": " << record["phase"].get<std::string>() << " "
                          << record["nodes_before"] << " -> " << record["nodes_after"]
                          << " nodes, " << record["wall_ms"].get<double>() << " ms\n";
            }
            all.push_back(std::move(record));
        }
    }
    if (!json_out.empty()) {
        std::ofstream out(json_out, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot open " << json_out << " for writing\n";
            return kExitIo;
        }
        out << all.dump(2) << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Program-graph toolkit: verification, local optimization, "
                 "instruction selection, GXL/DOT export"};
    app.require_subcommand(1);

    std::string input, output, report_format, json_out;
    std::vector<std::string> rules;
    std::size_t max_iterations = 100;
    bool json = false, verify_each_round = false, sequential = false;
    bool optimize_first = false, cluster_blocks = false;
    unsigned jobs = 0;

    auto* verify_cmd = app.add_subcommand("verify", "Check a graph against the structural rules");
    verify_cmd->add_option("input", input, "Input GXL file")->required();
    verify_cmd->add_flag("--json", json, "Emit diagnostics as JSON");

    auto* opt_cmd = app.add_subcommand("optimize", "Run local optimizations to fixpoint");
    opt_cmd->add_option("input", input, "Input GXL file")->required();
    opt_cmd->add_option("-o,--output", output, "Output GXL file")->required();
    opt_cmd->add_option("--rules", rules, "Enabled rules (default: all)")
        ->delimiter(',')
        ->check(CLI::IsMember({irkit::kRuleFoldConst, irkit::kRuleFoldCond, irkit::kRuleFoldPhi,
                               irkit::kRuleReassociate, irkit::kRuleUnreachableBlocks,
                               irkit::kRuleEmptyBlocks, irkit::kRuleDeadNodes}));
    opt_cmd->add_option("--max-iterations", max_iterations, "Fixpoint round cap")
        ->check(CLI::PositiveNumber);
    opt_cmd->add_flag("--verify-each-round", verify_each_round,
                      "Re-verify the graph after every rule application");
    opt_cmd->add_option("--report", report_format, "Report format")
        ->check(CLI::IsMember({"json", "text"}))
        ->default_val("text");

    auto* isel_cmd = app.add_subcommand("isel", "Select target instructions");
    isel_cmd->add_option("input", input, "Input GXL file")->required();
    isel_cmd->add_option("-o,--output", output, "Output GXL file")->required();
    isel_cmd->add_flag("--sequential", sequential, "Disable parallel selection phases");
    isel_cmd->add_option("--jobs", jobs, "Worker count (default: hardware concurrency)");
    isel_cmd->add_flag("--optimize", optimize_first, "Run the optimizer first");
    isel_cmd->add_option("--report", report_format, "Report format")
        ->check(CLI::IsMember({"json", "text"}))
        ->default_val("text");

    auto* dot_cmd = app.add_subcommand("dot", "Export Graphviz DOT");
    dot_cmd->add_option("input", input, "Input GXL file")->required();
    dot_cmd->add_option("-o,--output", output, "Output DOT file")->required();
    dot_cmd->add_flag("--cluster-blocks", cluster_blocks,
                      "Group operations into one cluster per block");

    auto* bench_cmd = app.add_subcommand("bench", "Optimize + select every .gxl in a directory");
    bench_cmd->add_option("dir", input, "Corpus directory")->required();
    bench_cmd->add_option("--json", json_out, "Write records to this JSON file");
    bench_cmd->add_option("--jobs", jobs, "Concurrent files (default: hardware concurrency)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;  // --help and friends exit cleanly
    }

    try {
        if (app.got_subcommand(verify_cmd)) return cmd_verify(input, json);
        if (app.got_subcommand(opt_cmd))
            return cmd_optimize(input, output, rules, max_iterations, verify_each_round,
                                report_format);
        if (app.got_subcommand(isel_cmd))
            return cmd_isel(input, output, sequential, jobs, optimize_first, report_format);
        if (app.got_subcommand(dot_cmd)) return cmd_dot(input, output, cluster_blocks);
        if (app.got_subcommand(bench_cmd)) return cmd_bench(input, json_out, jobs);
    } catch (const irkit::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitUsage;
}
