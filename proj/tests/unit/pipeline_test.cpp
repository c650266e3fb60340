// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "uvpbr/error.h"
#include "uvpbr/pipeline.h"

namespace uvpbr {
namespace {

using nlohmann::json;

std::string error_of(const json& doc) {
    try {
        config_from_json(doc);
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

TEST(PipelineConfig, DefaultsRoundTrip) {
    json a = config_to_json(PipelineConfig{});
    json b = config_to_json(config_from_json(a));
    EXPECT_EQ(a, b);
    EXPECT_EQ(config_from_json(json::object()).unwrap.texel_size, 1024);
    EXPECT_EQ(a.at("gen").at("texel_size"), 1024);
}

TEST(PipelineConfig, PartialOverridesKeepOtherDefaults) {
    PipelineConfig c = config_from_json({{"seed", 9}, {"unwrap", {{"texel_size", 256}}}});
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.unwrap.texel_size, 256);
    EXPECT_EQ(c.unwrap.gutter, 2);
    EXPECT_EQ(c.eval.loss_weights.lambda_z, 0.5);
}

TEST(PipelineConfig, ErrorsNameTheField) {
    EXPECT_NE(error_of({{"unwrap", {{"texel_size", -4}}}}).find("unwrap.texel_size"), std::string::npos);
    EXPECT_NE(error_of({{"unwrap", {{"texel_sise", 64}}}}).find("unwrap.texel_sise"), std::string::npos);
    EXPECT_NE(error_of({{"gen", {{"spp", "many"}}}}).find("gen.spp"), std::string::npos);
    EXPECT_NE(error_of({{"gen", {{"shape", "teapot"}}}}).find("gen.shape"), std::string::npos);
    EXPECT_NE(error_of({{"eval", {{"loss_weights", {{"lambda_z", -1.0}}}}}}).find("lambda_z"), std::string::npos);
    EXPECT_NE(error_of({{"gen", {{"texture", {{"diffuse_a", {0.1, 2.0, 0.3}}}}}}}).find("gen.texture.diffuse_a"),
              std::string::npos);
    EXPECT_NE(error_of({{"bogus", 1}}).find("bogus"), std::string::npos);
    EXPECT_NE(error_of(json::array()).find("object"), std::string::npos);
}

TEST(PipelineConfig, LoadReportsBadFiles) {
    auto p = std::filesystem::temp_directory_path() / "uvpbr_bad_config.json";
    {
        std::ofstream f(p);
        f << "{ not json";
    }
    EXPECT_THROW(load_config(p), InputError);
    EXPECT_THROW(load_config(p.string() + ".missing"), InputError);
}

TEST(Hashing, Sha256KnownVector) {
    EXPECT_EQ(sha256_string("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    auto p = std::filesystem::temp_directory_path() / "uvpbr_sha.txt";
    {
        std::ofstream f(p, std::ios::binary);
        f << "abc";
    }
    EXPECT_EQ(sha256_file(p), sha256_string("abc"));
}

TEST(Hashing, StageHashTracksItsOwnSection) {
    PipelineConfig a, b;
    b.render.spp = 3;
    EXPECT_EQ(stage_config_hash("unwrap", a), stage_config_hash("unwrap", b));
    EXPECT_NE(stage_config_hash("render", a), stage_config_hash("render", b));
    b.seed = 1;
    EXPECT_NE(stage_config_hash("unwrap", a), stage_config_hash("unwrap", b));
}

TEST(Pipeline, UnknownStageAndMissingInputs) {
    auto out = std::filesystem::temp_directory_path() / "uvpbr_pipeline_empty";
    std::filesystem::remove_all(out);
    std::filesystem::create_directories(out);
    EXPECT_THROW(run_stage("polish", PipelineConfig{}, out), InputError);
    EXPECT_THROW(run_stage("extract", PipelineConfig{}, out), InputError);
    EXPECT_EQ(stage_names().size(), 8u);
}

}  // namespace
}  // namespace uvpbr
