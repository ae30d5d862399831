// Command-line front end. Links only the C API.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "padmm/padmm.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRun = 3;
constexpr int kExitInternal = 70;

int exit_for(int status) {
    switch (status) {
        case PADMM_PARSE: return kExitConfig;
        case PADMM_IO: return kExitUsage;
        case PADMM_INTERNAL_ASSERTION: return kExitInternal;
        default: return kExitRun;
    }
}

int report_error(int status) {
    std::cerr << "padmm: [" << padmm_status_name(status) << "] " << padmm_last_error() << "\n";
    if (status == PADMM_INTERNAL_ASSERTION) std::cerr << "padmm: INTERNAL ASSERTION FAILURE: a certified statement failed\n";
    return exit_for(status);
}

bool write_file(const std::filesystem::path& path, const char* data) {
    std::ofstream out(path, std::ios::binary);
    out << data;
    return static_cast<bool>(out);
}

struct Options {
    std::string config;
    std::string out = "padmm-out";
    int threads = 1;
    long long seed = -1;
};

int run(const std::string& expected_kind, const Options& o) {
    padmm_config* cfg = nullptr;
    if (int rc = padmm_config_load(o.config.c_str(), &cfg); rc != PADMM_OK) return report_error(rc);
    const std::string kind = padmm_config_kind(cfg);
    if (!expected_kind.empty() && kind != expected_kind) {
        std::cerr << "padmm: config " << o.config << " has kind '" << kind << "', not '" << expected_kind << "'\n";
        padmm_config_free(cfg);
        return kExitConfig;
    }
    if (o.seed >= 0) padmm_config_set_seed(cfg, static_cast<uint64_t>(o.seed));
    padmm_report* rep = nullptr;
    const int rc = padmm_run(cfg, o.threads, &rep);
    padmm_config_free(cfg);
    if (rc != PADMM_OK) return report_error(rc);

    std::error_code ec;
    std::filesystem::create_directories(o.out, ec);
    const std::string stem = std::filesystem::path(o.config).stem().string();
    const auto txt = std::filesystem::path(o.out) / (stem + ".txt");
    const auto jsonl = std::filesystem::path(o.out) / (stem + ".jsonl");
    const bool ok = !ec && write_file(txt, padmm_report_text(rep)) && write_file(jsonl, padmm_report_jsonl(rep));
    std::cout << padmm_report_text(rep);
    const bool internal = padmm_report_internal_failure(rep) != 0;
    padmm_report_free(rep);
    if (!ok) {
        std::cerr << "padmm: cannot write reports under " << o.out << "\n";
        return kExitUsage;
    }
    std::cout << "wrote " << txt.string() << " and " << jsonl.string() << "\n";
    if (internal) {
        std::cerr << "padmm: INTERNAL ASSERTION FAILURE recorded in the report: a certified statement failed\n";
        return kExitInternal;
    }
    return 0;
}

int check_config(const std::string& path) {
    padmm_config* cfg = nullptr;
    if (int rc = padmm_config_load(path.c_str(), &cfg); rc != PADMM_OK) return report_error(rc);
    char* text = nullptr;
    const int rc = padmm_config_emit(cfg, &text);
    padmm_config_free(cfg);
    if (rc != PADMM_OK) return report_error(rc);
    std::cout << text;
    padmm_string_free(text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"padmm: p-adic formal groups, torsion and unlikely intersections"};
    app.set_version_flag("--version", std::string(padmm_version()));
    app.require_subcommand(1);
    Options o;
    std::string selected;

    auto add_run_flags = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "experiment config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "report directory")->envname("PADMM_OUT");
        sub->add_option("--threads", o.threads, "worker threads")->envname("PADMM_THREADS")->check(CLI::Range(1, 256));
        sub->add_option("--seed", o.seed, "seed for sampled experiments")->check(CLI::NonNegativeNumber);
    };
    const char* kinds[] = {"axioms",   "torsion-table",  "tate-voloch-scan", "covering",
                           "dynamics", "rigid-subtorus", "boxall",           "galois-invariance"};
    for (const char* k : kinds) {
        auto* sub = app.add_subcommand(k, std::string("run a ") + k + " experiment");
        add_run_flags(sub);
        sub->callback([&, k] { selected = k; });
    }
    auto* any = app.add_subcommand("run", "run the experiment named by the config's kind");
    add_run_flags(any);
    any->callback([&] { selected = "*"; });
    std::string check_path;
    auto* check = app.add_subcommand("check-config", "parse a config and print its canonical form");
    check->add_option("config", check_path, "config file")->required()->check(CLI::ExistingFile);
    check->callback([&] { selected = "check"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }
    if (selected == "check") return check_config(check_path);
    return run(selected == "*" ? "" : selected, o);
}
