// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: one subcommand per pipeline stage plus `pipeline`.
// Exit status: 0 success, 1 invalid input or configuration, 2 runtime failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "uvpbr/error.h"
#include "uvpbr/parallel.h"
#include "uvpbr/pipeline.h"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kFailure = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uvpbr: UV-space PBR texture reconstruction pipeline"};
    app.require_subcommand(0, 1);

    std::string config_path;
    std::string out_dir = "uvpbr_out";
    int threads = 0;
    std::optional<std::uint64_t> seed;
    bool dump_defaults = false;
    app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", seed, "Override the configuration seed");
    app.add_flag("--dump-defaults", dump_defaults, "Print the effective configuration and exit");

    const std::vector<std::pair<std::string, std::string>> commands{
        {"gen", "Generate a synthetic reference scene"},
        {"extract", "Extract a mesh from the density grid"},
        {"unwrap", "Build the UV atlas and texel attributes"},
        {"backproject", "Back-project the input views into UV space"},
        {"fuse", "Fuse the view maps and inpaint unseen texels"},
        {"decompose", "Fit diffuse, roughness and metalness maps"},
        {"render", "Render textures under novel lighting"},
        {"eval", "Score geometry and renders against the reference"},
        {"pipeline", "Run every stage in order"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        uvpbr::PipelineConfig config = config_path.empty() ? uvpbr::PipelineConfig{} : uvpbr::load_config(config_path);
        if (seed) {
            config.seed = *seed;
            config.eval.align.seed = *seed;
            config.decompose.options.seed = *seed;
        }
        if (dump_defaults) {
            std::cout << uvpbr::config_to_json(config).dump(2) << '\n';
            return kOk;
        }
        if (app.get_subcommands().empty()) {
            std::cerr << app.help();
            return kInvalid;
        }
        uvpbr::set_thread_count(threads);

        const std::string command = app.get_subcommands().front()->get_name();
        std::vector<uvpbr::StageRecord> records;
        if (command == "pipeline")
            records = uvpbr::run_pipeline(config, out_dir);
        else
            records.push_back(uvpbr::run_stage(command, config, out_dir));
        for (const auto& r : records)
            std::fprintf(stderr, "%-12s %8.2f s  %zu outputs\n", r.stage.c_str(), r.seconds, r.outputs.size());
        return kOk;
    } catch (const uvpbr::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return kFailure;
    }
}
