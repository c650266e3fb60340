// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uvpbr/decompose.h"
#include "uvpbr/metrics.h"
#include "uvpbr/scenegen.h"

namespace uvpbr {

struct GenConfig {
    std::string shape = "sphere";
    int resolution = 64;
    int gt_resolution = 128;  // reference mesh is extracted at this finer resolution
    ShapeParams shape_params;
    std::string pattern = "two_material";
    PbrParams texture{.period = 32};
    int texel_size = 1024;
    std::string lighting = "three_point";
    double light_intensity = 1.0;
    std::string rig = "six_view";
    RigOptions rig_options;
    int spp = 64;
    std::string novel_lighting = "gradient_sky";
    double novel_intensity = 1.0;
};

struct ExtractConfig {
    std::string grid;  // grid stem; empty selects gen/density
    double iso_level = 0.5;
};

struct UnwrapConfig {
    std::string mesh;  // empty selects extract/mesh.obj
    int texel_size = 1024;
    int gutter = 2;
    int dilation = 4;
};

struct BackprojectConfig {
    std::string views;    // directory of view_XX images; empty selects gen/views
    std::string cameras;  // empty selects gen/cameras.json
    int view_count = 6;
    double depth_bias = 0.0;  // <= 0 selects 1e-3 x scene diagonal
    double cos_threshold = 0.1;
};

struct FuseConfig {
    bool inpaint = true;
};

struct DecomposeConfig {
    std::string lights;  // empty selects gen/lights.json
    DecomposeOptions options;
};

struct RenderConfig {
    std::string mesh;     // empty selects unwrap/atlas_mesh.obj
    std::string pbr;      // empty selects decompose/pbr
    std::string cameras;  // empty generates `rig`
    std::string lights;   // empty selects gen/novel_lights.json
    std::string output;   // empty selects render/
    std::string rig = "eval32";
    int width = 320;
    int height = 320;
    int spp = 16;
    bool include_reference = true;  // also render the generated reference scene
};

struct EvalConfig {
    std::string pred_mesh;  // empty selects extract/mesh.obj
    std::string gt_mesh;    // empty selects gen/gt_mesh.obj
    int samples = 100000;
    double threshold = 0.1;
    AlignOptions align;
    LossWeights loss_weights;
};

struct PipelineConfig {
    std::uint64_t seed = 0;
    GenConfig gen;
    ExtractConfig extract;
    UnwrapConfig unwrap;
    BackprojectConfig backproject;
    FuseConfig fuse;
    DecomposeConfig decompose;
    RenderConfig render;
    EvalConfig eval;
};

/// Complete configuration document with every default filled in.
nlohmann::json config_to_json(const PipelineConfig& config);
/// Parses and validates a (possibly partial) configuration over the defaults.
/// Throws InputError naming the offending field, e.g. "unwrap.texel_size".
PipelineConfig config_from_json(const nlohmann::json& doc);
PipelineConfig load_config(const std::filesystem::path& path);

inline const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names{"gen",  "extract",   "unwrap", "backproject",
                                                "fuse", "decompose", "render", "eval"};
    return names;
}

struct StageRecord {
    std::string stage;
    std::vector<std::filesystem::path> inputs;   // relative to the output directory when inside it
    std::vector<std::filesystem::path> outputs;
    std::string config_hash;
    double seconds = 0;
};

/// Runs one stage, reading earlier artifacts from `out`, and records it in
/// `out/manifest.json`. Throws InputError for unknown stages or missing inputs.
StageRecord run_stage(const std::string& stage, const PipelineConfig& config, const std::filesystem::path& out);
/// Runs every stage in order.
std::vector<StageRecord> run_pipeline(const PipelineConfig& config, const std::filesystem::path& out);

std::string sha256_file(const std::filesystem::path& path);
std::string sha256_string(const std::string& data);
/// Hash of the stage's configuration section plus the seed.
std::string stage_config_hash(const std::string& stage, const PipelineConfig& config);

}  // namespace uvpbr
