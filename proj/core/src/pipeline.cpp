// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include "uvpbr/pipeline.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "uvpbr/atlas.h"
#include "uvpbr/backproject.h"
#include "uvpbr/error.h"
#include "uvpbr/fuse.h"
#include "uvpbr/isosurface.h"
#include "uvpbr/relight.h"

namespace uvpbr {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

namespace {

json vec3_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

// Reads fields of one configuration object, rejecting unknown keys and
// reporting errors with the dotted field path.
class Section {
  public:
    Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
        if (!doc_.is_object()) throw InputError("config: '" + display() + "' must be an object");
    }

    template <typename T>
    void get(const std::string& key, T& out) {
        seen_.insert(key);
        if (!doc_.contains(key)) return;
        const json& v = doc_.at(key);
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw InputError("");
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer()) throw InputError("");
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!v.is_number()) throw InputError("");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw InputError("");
            }
            out = v.get<T>();
        } catch (const std::exception&) {
            throw InputError("config: field '" + field(key) + "' has the wrong type");
        }
    }

    void get(const std::string& key, Vec3& out) {
        seen_.insert(key);
        if (!doc_.contains(key)) return;
        const json& v = doc_.at(key);
        if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
            throw InputError("config: field '" + field(key) + "' must be an array of three numbers");
        out = {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
    }

    Section child(const std::string& key) {
        seen_.insert(key);
        static const json empty = json::object();
        return Section(doc_.contains(key) ? doc_.at(key) : empty, field(key));
    }

    void finish() const {
        for (const auto& [key, value] : doc_.items())
            if (!seen_.contains(key)) throw InputError("config: unknown field '" + field(key) + "'");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  private:
    std::string display() const { return path_.empty() ? "<root>" : path_; }
    const json& doc_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw InputError("config: field '" + field + "' " + what);
}

void require_one_of(const std::string& value, std::initializer_list<const char*> options, const std::string& field) {
    for (const char* o : options)
        if (value == o) return;
    std::string list;
    for (const char* o : options) list += (list.empty() ? "" : ", ") + std::string(o);
    throw InputError("config: field '" + field + "' must be one of " + list + " (got '" + value + "')");
}

void require_unit_rgb(const Rgb& c, const std::string& field) {
    require(min_component(c) >= 0 && max_component(c) <= 1, field, "must lie in [0, 1]");
}

}  // namespace

json config_to_json(const PipelineConfig& c) {
    const GenConfig& g = c.gen;
    const DecomposeOptions& d = c.decompose.options;
    const AlignOptions& a = c.eval.align;
    json doc;
    doc["seed"] = c.seed;
    doc["gen"] = {
        {"shape", g.shape},
        {"resolution", g.resolution},
        {"gt_resolution", g.gt_resolution},
        {"shape_params",
         {{"radius", g.shape_params.radius},
          {"half_size", g.shape_params.half_size},
          {"major_radius", g.shape_params.major_radius},
          {"minor_radius", g.shape_params.minor_radius},
          {"center_a", vec3_json(g.shape_params.center_a)},
          {"center_b", vec3_json(g.shape_params.center_b)},
          {"radius_a", g.shape_params.radius_a},
          {"radius_b", g.shape_params.radius_b}}},
        {"pattern", g.pattern},
        {"texture",
         {{"diffuse_a", vec3_json(g.texture.diffuse_a)},
          {"diffuse_b", vec3_json(g.texture.diffuse_b)},
          {"roughness", g.texture.roughness},
          {"metalness", g.texture.metalness},
          {"period", g.texture.period},
          {"roughness_from", g.texture.roughness_from},
          {"roughness_to", g.texture.roughness_to}}},
        {"texel_size", g.texel_size},
        {"lighting", g.lighting},
        {"light_intensity", g.light_intensity},
        {"rig", g.rig},
        {"rig_options",
         {{"width", g.rig_options.width},
          {"height", g.rig_options.height},
          {"radius", g.rig_options.radius},
          {"fov_y_deg", g.rig_options.fov_y_deg}}},
        {"spp", g.spp},
        {"novel_lighting", g.novel_lighting},
        {"novel_intensity", g.novel_intensity},
    };
    doc["extract"] = {{"grid", c.extract.grid}, {"iso_level", c.extract.iso_level}};
    doc["unwrap"] = {{"mesh", c.unwrap.mesh},
                     {"texel_size", c.unwrap.texel_size},
                     {"gutter", c.unwrap.gutter},
                     {"dilation", c.unwrap.dilation}};
    doc["backproject"] = {{"views", c.backproject.views},
                          {"cameras", c.backproject.cameras},
                          {"view_count", c.backproject.view_count},
                          {"depth_bias", c.backproject.depth_bias},
                          {"cos_threshold", c.backproject.cos_threshold}};
    doc["fuse"] = {{"inpaint", c.fuse.inpaint}};
    doc["decompose"] = {{"lights", c.decompose.lights},
                        {"env_samples", d.env_samples},
                        {"shadow_bias", d.shadow_bias},
                        {"shadows", d.shadows},
                        {"iterations", d.fit.iterations},
                        {"equivalence_tolerance", d.fit.equivalence_tolerance},
                        {"max_albedo_spread", d.fit.max_albedo_spread},
                        {"max_residual", d.fit.max_residual},
                        {"max_albedo_stddev", d.fit.max_albedo_stddev},
                        {"noise_floor", d.fit.noise_floor}};
    doc["render"] = {{"mesh", c.render.mesh},       {"pbr", c.render.pbr},
                     {"cameras", c.render.cameras}, {"lights", c.render.lights},
                     {"output", c.render.output},   {"rig", c.render.rig},
                     {"width", c.render.width},     {"height", c.render.height},
                     {"spp", c.render.spp},         {"include_reference", c.render.include_reference}};
    doc["eval"] = {{"pred_mesh", c.eval.pred_mesh},
                   {"gt_mesh", c.eval.gt_mesh},
                   {"samples", c.eval.samples},
                   {"threshold", c.eval.threshold},
                   {"align",
                    {{"yaw_steps", a.yaw_steps},
                     {"scale_steps", a.scale_steps},
                     {"scale_min", a.scale_min},
                     {"scale_max", a.scale_max},
                     {"icp_iterations", a.icp_iterations},
                     {"samples", a.samples},
                     {"coarse_samples", a.coarse_samples},
                     {"refine_candidates", a.refine_candidates},
                     {"threshold", a.threshold}}},
                   {"loss_weights", c.eval.loss_weights}};
    return doc;
}

PipelineConfig config_from_json(const json& doc) {
    PipelineConfig c;
    Section root(doc, "");
    root.get("seed", c.seed);

    {
        GenConfig& g = c.gen;
        Section s = root.child("gen");
        s.get("shape", g.shape);
        s.get("resolution", g.resolution);
        s.get("gt_resolution", g.gt_resolution);
        Section sp = s.child("shape_params");
        sp.get("radius", g.shape_params.radius);
        sp.get("half_size", g.shape_params.half_size);
        sp.get("major_radius", g.shape_params.major_radius);
        sp.get("minor_radius", g.shape_params.minor_radius);
        sp.get("center_a", g.shape_params.center_a);
        sp.get("center_b", g.shape_params.center_b);
        sp.get("radius_a", g.shape_params.radius_a);
        sp.get("radius_b", g.shape_params.radius_b);
        sp.finish();
        s.get("pattern", g.pattern);
        Section tx = s.child("texture");
        tx.get("diffuse_a", g.texture.diffuse_a);
        tx.get("diffuse_b", g.texture.diffuse_b);
        tx.get("roughness", g.texture.roughness);
        tx.get("metalness", g.texture.metalness);
        tx.get("period", g.texture.period);
        tx.get("roughness_from", g.texture.roughness_from);
        tx.get("roughness_to", g.texture.roughness_to);
        tx.finish();
        s.get("texel_size", g.texel_size);
        s.get("lighting", g.lighting);
        s.get("light_intensity", g.light_intensity);
        s.get("rig", g.rig);
        Section ro = s.child("rig_options");
        ro.get("width", g.rig_options.width);
        ro.get("height", g.rig_options.height);
        ro.get("radius", g.rig_options.radius);
        ro.get("fov_y_deg", g.rig_options.fov_y_deg);
        ro.finish();
        s.get("spp", g.spp);
        s.get("novel_lighting", g.novel_lighting);
        s.get("novel_intensity", g.novel_intensity);
        s.finish();

        require_one_of(g.shape, {"sphere", "cube", "torus", "union"}, "gen.shape");
        require(g.resolution >= 8, "gen.resolution", "must be >= 8");
        require(g.gt_resolution >= 8, "gen.gt_resolution", "must be >= 8");
        require(g.shape_params.radius > 0, "gen.shape_params.radius", "must be positive");
        require(g.shape_params.half_size > 0, "gen.shape_params.half_size", "must be positive");
        require(g.shape_params.major_radius > 0, "gen.shape_params.major_radius", "must be positive");
        require(g.shape_params.minor_radius > 0, "gen.shape_params.minor_radius", "must be positive");
        require(g.shape_params.radius_a > 0, "gen.shape_params.radius_a", "must be positive");
        require(g.shape_params.radius_b > 0, "gen.shape_params.radius_b", "must be positive");
        require_one_of(g.pattern, {"constant", "checker", "gradient", "two_material"}, "gen.pattern");
        require_unit_rgb(g.texture.diffuse_a, "gen.texture.diffuse_a");
        require_unit_rgb(g.texture.diffuse_b, "gen.texture.diffuse_b");
        require(g.texture.roughness >= 0 && g.texture.roughness <= 1, "gen.texture.roughness", "must lie in [0, 1]");
        require(g.texture.metalness >= 0 && g.texture.metalness <= 1, "gen.texture.metalness", "must lie in [0, 1]");
        require(g.texture.period >= 1, "gen.texture.period", "must be >= 1");
        require(g.texture.roughness_from >= 0 && g.texture.roughness_from <= 1, "gen.texture.roughness_from",
                "must lie in [0, 1]");
        require(g.texture.roughness_to >= 0 && g.texture.roughness_to <= 1, "gen.texture.roughness_to",
                "must lie in [0, 1]");
        require(g.texel_size >= 16, "gen.texel_size", "must be >= 16");
        require_one_of(g.lighting, {"uniform", "three_point", "gradient_sky"}, "gen.lighting");
        require(g.light_intensity >= 0, "gen.light_intensity", "must be >= 0");
        require_one_of(g.rig, {"six_view", "eval32"}, "gen.rig");
        require(g.rig_options.width >= 1, "gen.rig_options.width", "must be >= 1");
        require(g.rig_options.height >= 1, "gen.rig_options.height", "must be >= 1");
        require(g.rig_options.radius > 0, "gen.rig_options.radius", "must be positive");
        require(g.rig_options.fov_y_deg > 0 && g.rig_options.fov_y_deg < 180, "gen.rig_options.fov_y_deg",
                "must lie in (0, 180)");
        require(g.spp >= 1, "gen.spp", "must be >= 1");
        require_one_of(g.novel_lighting, {"uniform", "three_point", "gradient_sky"}, "gen.novel_lighting");
        require(g.novel_intensity >= 0, "gen.novel_intensity", "must be >= 0");
    }
    {
        Section s = root.child("extract");
        s.get("grid", c.extract.grid);
        s.get("iso_level", c.extract.iso_level);
        s.finish();
        require(c.extract.iso_level > 0 && c.extract.iso_level < 1, "extract.iso_level", "must lie in (0, 1)");
    }
    {
        Section s = root.child("unwrap");
        s.get("mesh", c.unwrap.mesh);
        s.get("texel_size", c.unwrap.texel_size);
        s.get("gutter", c.unwrap.gutter);
        s.get("dilation", c.unwrap.dilation);
        s.finish();
        require(c.unwrap.texel_size >= 16, "unwrap.texel_size", "must be >= 16");
        require(c.unwrap.gutter >= 0, "unwrap.gutter", "must be >= 0");
        require(c.unwrap.dilation >= 0, "unwrap.dilation", "must be >= 0");
    }
    {
        Section s = root.child("backproject");
        s.get("views", c.backproject.views);
        s.get("cameras", c.backproject.cameras);
        s.get("view_count", c.backproject.view_count);
        s.get("depth_bias", c.backproject.depth_bias);
        s.get("cos_threshold", c.backproject.cos_threshold);
        s.finish();
        require(c.backproject.view_count >= 1, "backproject.view_count", "must be >= 1");
        require(c.backproject.depth_bias >= 0, "backproject.depth_bias", "must be >= 0");
        require(c.backproject.cos_threshold >= 0 && c.backproject.cos_threshold < 1, "backproject.cos_threshold",
                "must lie in [0, 1)");
    }
    {
        Section s = root.child("fuse");
        s.get("inpaint", c.fuse.inpaint);
        s.finish();
    }
    {
        DecomposeOptions& d = c.decompose.options;
        Section s = root.child("decompose");
        s.get("lights", c.decompose.lights);
        s.get("env_samples", d.env_samples);
        s.get("shadow_bias", d.shadow_bias);
        s.get("shadows", d.shadows);
        s.get("iterations", d.fit.iterations);
        s.get("equivalence_tolerance", d.fit.equivalence_tolerance);
        s.get("max_albedo_spread", d.fit.max_albedo_spread);
        s.get("max_residual", d.fit.max_residual);
        s.get("max_albedo_stddev", d.fit.max_albedo_stddev);
        s.get("noise_floor", d.fit.noise_floor);
        s.finish();
        require(d.env_samples >= 1, "decompose.env_samples", "must be >= 1");
        require(d.shadow_bias >= 0, "decompose.shadow_bias", "must be >= 0");
        require(d.fit.iterations >= 0, "decompose.iterations", "must be >= 0");
        require(d.fit.equivalence_tolerance >= 0, "decompose.equivalence_tolerance", "must be >= 0");
        require(d.fit.max_albedo_spread >= 0, "decompose.max_albedo_spread", "must be >= 0");
        require(d.fit.max_residual >= 0, "decompose.max_residual", "must be >= 0");
        require(d.fit.max_albedo_stddev >= 0, "decompose.max_albedo_stddev", "must be >= 0");
        require(d.fit.noise_floor >= 0, "decompose.noise_floor", "must be >= 0");
    }
    {
        Section s = root.child("render");
        s.get("mesh", c.render.mesh);
        s.get("pbr", c.render.pbr);
        s.get("cameras", c.render.cameras);
        s.get("lights", c.render.lights);
        s.get("output", c.render.output);
        s.get("rig", c.render.rig);
        s.get("width", c.render.width);
        s.get("height", c.render.height);
        s.get("spp", c.render.spp);
        s.get("include_reference", c.render.include_reference);
        s.finish();
        require_one_of(c.render.rig, {"six_view", "eval32"}, "render.rig");
        require(c.render.width >= 1, "render.width", "must be >= 1");
        require(c.render.height >= 1, "render.height", "must be >= 1");
        require(c.render.spp >= 1, "render.spp", "must be >= 1");
    }
    {
        AlignOptions& a = c.eval.align;
        Section s = root.child("eval");
        s.get("pred_mesh", c.eval.pred_mesh);
        s.get("gt_mesh", c.eval.gt_mesh);
        s.get("samples", c.eval.samples);
        s.get("threshold", c.eval.threshold);
        Section al = s.child("align");
        al.get("yaw_steps", a.yaw_steps);
        al.get("scale_steps", a.scale_steps);
        al.get("scale_min", a.scale_min);
        al.get("scale_max", a.scale_max);
        al.get("icp_iterations", a.icp_iterations);
        al.get("samples", a.samples);
        al.get("coarse_samples", a.coarse_samples);
        al.get("refine_candidates", a.refine_candidates);
        al.get("threshold", a.threshold);
        al.finish();
        Section lw = s.child("loss_weights");
        LossWeights& w = c.eval.loss_weights;
        lw.get("lambda_z", w.lambda_z);
        lw.get("lambda_M", w.lambda_M);
        lw.get("lambda_n", w.lambda_n);
        lw.get("lambda_1", w.lambda_1);
        lw.get("lambda_2", w.lambda_2);
        lw.get("lambda_3", w.lambda_3);
        lw.get("n_views", w.n_views);
        lw.finish();
        s.finish();
        require(c.eval.samples >= 1, "eval.samples", "must be >= 1");
        require(c.eval.threshold > 0, "eval.threshold", "must be positive");
        require(a.yaw_steps >= 1, "eval.align.yaw_steps", "must be >= 1");
        require(a.scale_steps >= 1, "eval.align.scale_steps", "must be >= 1");
        require(a.scale_min > 0, "eval.align.scale_min", "must be positive");
        require(a.scale_max >= a.scale_min, "eval.align.scale_max", "must be >= eval.align.scale_min");
        require(a.icp_iterations >= 0, "eval.align.icp_iterations", "must be >= 0");
        require(a.samples >= 1, "eval.align.samples", "must be >= 1");
        require(a.coarse_samples >= 1, "eval.align.coarse_samples", "must be >= 1");
        require(a.refine_candidates >= 1, "eval.align.refine_candidates", "must be >= 1");
        require(a.threshold > 0, "eval.align.threshold", "must be positive");
        for (const auto& [name, value] : {std::pair{"lambda_z", w.lambda_z}, std::pair{"lambda_M", w.lambda_M},
                                          std::pair{"lambda_n", w.lambda_n}, std::pair{"lambda_1", w.lambda_1},
                                          std::pair{"lambda_2", w.lambda_2}, std::pair{"lambda_3", w.lambda_3}})
            require(value >= 0, std::string("eval.loss_weights.") + name, "must be >= 0");
        require(w.n_views >= 1, "eval.loss_weights.n_views", "must be >= 1");
    }
    root.finish();
    c.eval.align.seed = c.seed;
    c.decompose.options.seed = c.seed;
    return c;
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("config: cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw InputError("config: " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(doc);
}

// ---------------------------------------------------------------------------
// Hashing

namespace {

std::string to_hex(const unsigned char* digest, unsigned int len) {
    static const char* kHex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 15];
    }
    return out;
}

class Sha256 {
  public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw Error("sha256: init failed");
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;
    void update(const void* data, std::size_t n) {
        if (EVP_DigestUpdate(ctx_, data, n) != 1) throw Error("sha256: update failed");
    }
    std::string hex() {
        unsigned char digest[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_, digest, &len) != 1) throw Error("sha256: final failed");
        return to_hex(digest, len);
    }

  private:
    EVP_MD_CTX* ctx_;
};

}  // namespace

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("sha256: cannot open " + path.string());
    Sha256 h;
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

std::string sha256_string(const std::string& data) {
    Sha256 h;
    h.update(data.data(), data.size());
    return h.hex();
}

std::string stage_config_hash(const std::string& stage, const PipelineConfig& config) {
    json doc = config_to_json(config);
    json section = {{"seed", doc["seed"]}, {stage, doc.value(stage, json::object())}};
    // Render and eval read generation settings (reference scene), so include them.
    if (stage == "render" || stage == "eval" || stage == "decompose" || stage == "backproject")
        section["gen"] = doc["gen"];
    if (stage == "decompose" || stage == "render") section["unwrap"] = doc["unwrap"];
    return sha256_string(section.dump());
}

// ---------------------------------------------------------------------------
// Stages

namespace {

struct StageIo {
    std::vector<fs::path> inputs;
    std::vector<fs::path> outputs;

    void in(const fs::path& p) {
        if (!fs::exists(p)) throw InputError("missing input file: " + p.string());
        inputs.push_back(p);
    }
    void in_all(const std::vector<fs::path>& ps) {
        for (const auto& p : ps) in(p);
    }
    void out(const fs::path& p) { outputs.push_back(p); }
    void out_all(const std::vector<fs::path>& ps) { outputs.insert(outputs.end(), ps.begin(), ps.end()); }
};

fs::path or_default(const std::string& configured, const fs::path& fallback) {
    return configured.empty() ? fallback : fs::path(configured);
}

fs::path ensure_dir(const fs::path& dir) {
    fs::create_directories(dir);
    return dir;
}

std::string indexed(const std::string& prefix, std::size_t k, const std::string& ext) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%02zu%s", prefix.c_str(), k, ext.c_str());
    return buf;
}

void write_json(const fs::path& path, const json& doc, StageIo& io) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    io.out(path);
}

TexelGrid read_grid_input(const fs::path& stem, StageIo& io) {
    io.in(with_suffix(stem, ".json"));
    TexelGrid g = read_texel_grid(stem);
    for (const std::string& name : g.plane_names()) io.inputs.push_back(with_suffix(stem, "_" + name + ".pfm"));
    io.inputs.push_back(with_suffix(stem, "_valid.pfm"));
    return g;
}

void write_preview(const fs::path& path, const Image& img, RowOrder order, StageIo& io) {
    write_png(path, img, order);
    io.out(path);
}

PbrTextures read_pbr_input(const fs::path& stem, StageIo& io) {
    PbrTextures pbr;
    pbr.maps = read_grid_input(stem, io);
    pbr.require_planes();
    return pbr;
}

std::vector<ViewMapSet> read_view_sets(const fs::path& dir, int count, StageIo& io) {
    std::vector<ViewMapSet> sets;
    for (int k = 0; k < count; ++k) {
        ViewMapSet s;
        s.maps = read_grid_input(dir / indexed("view", static_cast<std::size_t>(k), ""), io);
        sets.push_back(std::move(s));
    }
    return sets;
}

void stage_gen(const PipelineConfig& c, const fs::path& out, StageIo& io) {
    const GenConfig& g = c.gen;
    fs::path dir = ensure_dir(out / "gen");

    DensityGrid grid = gen_density(g.shape, g.resolution, g.shape_params);
    write_grid(dir / "density", grid);
    io.out(dir / "density.raw");
    io.out(dir / "density.json");

    DensityGrid fine = gen_density(g.shape, g.gt_resolution, g.shape_params);
    TriMesh reference = marching_cubes(fine, kDefaultIsoLevel);
    if (reference.empty()) throw Error("gen: the reference shape produced an empty surface");
    Atlas atlas = unwrap(reference, g.texel_size, {c.unwrap.gutter});
    TexelGrid attributes = rasterize_attributes(atlas);
    PbrTextures pbr = gen_pbr(g.pattern, g.texel_size, g.texture, &attributes);
    pbr.maps = dilate_gutters(pbr.maps, c.unwrap.dilation);
    write_obj(dir / "gt_mesh.obj", atlas.mesh);
    io.out(dir / "gt_mesh.obj");
    io.out_all(write_pbr(dir / "gt_pbr", pbr));

    EnvLight light = gen_env(g.lighting, {.intensity = g.light_intensity});
    io.out_all(write_lighting(dir / "lights.json", light));
    EnvLight novel = gen_env(g.novel_lighting, {.intensity = g.novel_intensity});
    io.out_all(write_lighting(dir / "novel_lights.json", novel));

    std::vector<Camera> cams = gen_rig(g.rig, g.rig_options);
    write_cameras(dir / "cameras.json", cams);
    io.out(dir / "cameras.json");

    fs::path views = ensure_dir(dir / "views");
    for (std::size_t k = 0; k < cams.size(); ++k) {
        RenderResult r = render_pbr(atlas.mesh, pbr, cams[k], light, {.spp = g.spp, .seed = c.seed + k});
        write_pfm(views / indexed("view", k, ".pfm"), r.color, RowOrder::TopDown);
        io.out(views / indexed("view", k, ".pfm"));
        write_preview(views / indexed("view", k, ".png"), r.color, RowOrder::TopDown, io);
    }
}

void stage_extract(const PipelineConfig& c, const fs::path& out, StageIo& io) {
    fs::path stem = or_default(c.extract.grid, out / "gen" / "density");
    io.in(with_suffix(stem, ".json"));
    io.in(with_suffix(stem, ".raw"));
    DensityGrid grid = read_grid(stem);
    TriMesh mesh = marching_cubes(grid, c.extract.iso_level);
    if (mesh.empty()) throw Error("extract: the iso-surface is empty at level " + std::to_string(c.extract.iso_level));
    fs::path dir = ensure_dir(out / "extract");
    write_obj(dir / "mesh.obj", mesh);
    io.out(dir / "mesh.obj");
    write_json(dir / "stats.json",
               {{"vertices", mesh.vertices.size()},
                {"faces", mesh.faces.size()},
                {"components", connected_components(mesh)},
                {"euler_characteristic", euler_characteristic(mesh)}},
               io);
}

void stage_unwrap(const PipelineConfig& c, const fs::path& out, StageIo& io) {
    fs::path mesh_path = or_default(c.unwrap.mesh, out / "extract" / "mesh.obj");
    io.in(mesh_path);
    TriMesh mesh = read_obj(mesh_path);
    if (!mesh.has_normals()) mesh = vertex_normals(mesh).mesh;
    Atlas atlas = unwrap(mesh, c.unwrap.texel_size, {c.unwrap.gutter});
    RasterStats stats;
    TexelGrid attributes = rasterize_attributes(atlas, &stats);
    fs::path dir = ensure_dir(out / "unwrap");
    write_obj(dir / "atlas_mesh.obj", atlas.mesh);
    io.out(dir / "atlas_mesh.obj");
    io.out_all(write_texel_grid(dir / "attributes", attributes));
    write_json(dir / "stats.json",
               {{"charts", atlas.charts.size()},
                {"valid_texels", attributes.valid_count()},
                {"overlap_texels", stats.overlap_texels},
                {"texels_per_unit", atlas.texels_per_unit}},
               io);
}

Image read_view_image(const fs::path& dir, std::size_t k, StageIo& io) {
    fs::path pfm = dir / indexed("view", k, ".pfm");
    fs::path png = dir / indexed("view", k, ".png");
    fs::path path = fs::exists(pfm) ? pfm : png;
    io.in(path);
    return read_image(path, RowOrder::TopDown);
}

void stage_backproject(const PipelineConfig& c, const fs::path& out, StageIo& io) {
    const BackprojectConfig& b = c.backproject;
    io.in(out / "unwrap" / "atlas_mesh.obj");
    TriMesh mesh = read_obj(out / "unwrap" / "atlas_mesh.obj");
    TexelGrid attributes = read_grid_input(out / "unwrap" / "attributes", io);
    fs::path cam_path = or_default(b.cameras, out / "gen" / "cameras.json");
    io.in(cam_path);
    std::vector<Camera> cams = read_cameras(cam_path);
    if (static_cast<int>(cams.size()) != b.view_count)
        throw InputError("backproject: " + cam_path.string() + " lists " + std::to_string(cams.size()) +
                         " cameras but backproject.view_count is " + std::to_string(b.view_count));
    fs::path view_dir = or_default(b.views, out / "gen" / "views");
    std::vector<View> views;
    for (std::size_t k = 0; k < cams.size(); ++k) views.push_back({read_view_image(view_dir, k, io), cams[k]});

    BackprojectResult result =
        backproject_all(attributes, mesh, views, {.depth_bias = b.depth_bias, .cos_threshold = b.cos_threshold});
    fs::path dir = ensure_dir(out / "backproject");
    json per_view = json::array();
    for (std::size_t k = 0; k < result.sets.size(); ++k) {
        io.out_all(write_texel_grid(dir / indexed("view", k, ""), result.sets[k].maps));
        per_view.push_back(result.sets[k].maps.valid_count());
    }
    write_json(dir / "coverage.json",
               {{"valid_texels", result.valid_texels},
                {"seen_texels", result.seen_texels},
                {"union_coverage", result.union_coverage()},
                {"visible_per_view", per_view}},
               io);
}

void stage_fuse(const PipelineConfig& c, const fs::path& out, StageIo& io) {
    TexelGrid attributes = read_grid_input(out / "unwrap" / "attributes", io);
    std::vector<ViewMapSet> sets = read_view_sets(out / "backproject", c.backproject.view_count, io);
    TexelGrid fused = fuse_views(sets);
    std::size_t observed = fused.valid_count();
    InpaintStats stats;
    if (c.fuse.inpaint) fused = pull_push_inpaint(fused, attributes.valid_mask(), {"color"}, &stats);
    fs::path dir = ensure_dir(out / "fuse");
    io.out_all(write_texel_grid(dir / "fused", fused));
    write_preview(dir / "fused_color.png", fused.plane("color"), RowOrder::BottomUp, io);
    write_json(dir / "stats.json",
               {{"observed_texels", observed},
                {"inpainted_texels", stats.filled},
                {"mid_gray_fallback", stats.used_fallback}},
               io);
}

EnvLight read_lights_input(const fs::path& path, StageIo& io) {
    io.in(path);
    EnvLight light = read_lighting(path);
    std::ifstream in(path);
    json doc = json::parse(in);
    if (doc.contains("env") && doc["env"].is_string()) {
        fs::path env = doc["env"].get<std::string>();
        io.in(env.is_relative() ? path.parent_path() / env : env);
    }
    return light;
}

void stage_decompose(const PipelineConfig& c, const fs::path& out, StageIo& io) {
    io.in(out / "unwrap" / "atlas_mesh.obj");
    TriMesh mesh = read_obj(out / "unwrap" / "atlas_mesh.obj");
    TexelGrid attributes = read_grid_input(out / "unwrap" / "attributes", io);
    std::vector<ViewMapSet> sets = read_view_sets(out / "backproject", c.backproject.view_count, io);
    TexelGrid fused = read_grid_input(out / "fuse" / "fused", io);
    EnvLight light = read_lights_input(or_default(c.decompose.lights, out / "gen" / "lights.json"), io);

    DecomposeResult result = decompose_texture(fused, sets, attributes, mesh, light, c.decompose.options);
    PbrTextures pbr = result.pbr;
    pbr.maps = dilate_gutters(pbr.maps, c.unwrap.dilation);
    fs::path dir = ensure_dir(out / "decompose");
    io.out_all(write_pbr(dir / "pbr", pbr));
    io.out_all(write_texel_grid(dir / "diagnostics", result.diagnostics));
    json residuals = json::array();
    for (double r : result.view_residuals) residuals.push_back(std::isfinite(r) ? json(r) : json(nullptr));
    write_json(dir / "stats.json",
               {{"fitted_texels", result.fitted_texels},
                {"confident_texels", result.confident_texels},
                {"view_residuals", residuals}},
               io);
}

void stage_render(const PipelineConfig& c, const fs::path& out, StageIo& io) {
    const RenderConfig& r = c.render;
    fs::path mesh_path = or_default(r.mesh, out / "unwrap" / "atlas_mesh.obj");
    io.in(mesh_path);
    TriMesh mesh = read_obj(mesh_path);
    if (!mesh.has_normals()) mesh = vertex_normals(mesh).mesh;
    PbrTextures pbr = read_pbr_input(or_default(r.pbr, out / "decompose" / "pbr"), io);
    EnvLight light = read_lights_input(or_default(r.lights, out / "gen" / "novel_lights.json"), io);
    std::vector<Camera> cams;
    if (!r.cameras.empty()) {
        io.in(r.cameras);
        cams = read_cameras(r.cameras);
    } else {
        cams = gen_rig(r.rig, {.width = r.width, .height = r.height});
    }
    fs::path dir = ensure_dir(or_default(r.output, out / "render"));
    write_cameras(dir / "cameras.json", cams);
    io.out(dir / "cameras.json");

    auto render_set = [&](const TriMesh& m, const PbrTextures& p, const std::string& prefix) {
        for (std::size_t k = 0; k < cams.size(); ++k) {
            RenderResult img = render_pbr(m, p, cams[k], light, {.spp = r.spp, .seed = c.seed + k});
            write_pfm(dir / indexed(prefix, k, ".pfm"), img.color, RowOrder::TopDown);
            io.out(dir / indexed(prefix, k, ".pfm"));
            write_preview(dir / indexed(prefix, k, ".png"), img.color, RowOrder::TopDown, io);
        }
    };
    render_set(mesh, pbr, "pred");
    if (r.include_reference) {
        io.in(out / "gen" / "gt_mesh.obj");
        TriMesh reference = read_obj(out / "gen" / "gt_mesh.obj");
        PbrTextures reference_pbr = read_pbr_input(out / "gen" / "gt_pbr", io);
        render_set(reference, reference_pbr, "gt");
    }
}

json similarity_json(const Similarity& t) {
    return {{"rotation", t.rotation.m}, {"scale", t.scale}, {"translation", vec3_json(t.translation)}};
}

// Image metrics expect display-range values; renders are clamped like the PNG previews.
Image clamp_unit(Image img) {
    for (float& v : img.data()) v = std::clamp(v, 0.0f, 1.0f);
    return img;
}

void stage_eval(const PipelineConfig& c, const fs::path& out, StageIo& io) {
    const EvalConfig& e = c.eval;
    fs::path pred_path = or_default(e.pred_mesh, out / "extract" / "mesh.obj");
    fs::path gt_path = or_default(e.gt_mesh, out / "gen" / "gt_mesh.obj");
    io.in(pred_path);
    io.in(gt_path);
    TriMesh pred = read_obj(pred_path), gt = read_obj(gt_path);

    AlignResult aligned = align(pred, gt, e.align);
    PointSetScore before = evaluate_geometry(pred, gt, Similarity{}, e.samples, e.threshold, c.seed);
    PointSetScore after = evaluate_geometry(pred, gt, aligned.transform, e.samples, e.threshold, c.seed);

    json report;
    report["cd"] = after.chamfer;
    report["fscore"] = after.fscore;
    report["precision"] = after.precision;
    report["recall"] = after.recall;
    report["unaligned"] = {{"cd", before.chamfer}, {"fscore", before.fscore}};
    report["transform"] = similarity_json(aligned.transform);
    report["align_fallbacks"] = aligned.fallbacks;
    report["loss_weights"] = e.loss_weights;

    fs::path render_dir = or_default(c.render.output, out / "render");
    std::size_t pairs = 0;
    double psnr_sum = 0, ssim_sum = 0, l0_sum = 0;
    for (std::size_t k = 0;; ++k) {
        fs::path p = render_dir / indexed("pred", k, ".pfm"), g = render_dir / indexed("gt", k, ".pfm");
        if (!fs::exists(p) || !fs::exists(g)) break;
        io.in(p);
        io.in(g);
        Image a = clamp_unit(read_pfm(p, RowOrder::TopDown, 3)), b = clamp_unit(read_pfm(g, RowOrder::TopDown, 3));
        psnr_sum += psnr(a, b);
        ssim_sum += ssim(a, b);
        l0_sum += loss_l0(a, b, e.loss_weights).total();
        ++pairs;
    }
    report["render_pairs"] = pairs;
    report["psnr_mean"] = pairs ? json(psnr_sum / pairs) : json(nullptr);
    report["ssim_mean"] = pairs ? json(ssim_sum / pairs) : json(nullptr);
    report["loss_l0_mean"] = pairs ? json(l0_sum / pairs) : json(nullptr);
    fs::path dir = ensure_dir(out / "eval");
    write_json(dir / "report.json", report, io);
}

fs::path relative_to(const fs::path& p, const fs::path& base) {
    fs::path abs = fs::weakly_canonical(p), root = fs::weakly_canonical(base);
    fs::path rel = abs.lexically_relative(root);
    if (!rel.empty() && *rel.begin() != "..") return rel;
    return abs;
}

json file_list(const std::vector<fs::path>& files, const fs::path& out) {
    json list = json::array();
    std::set<std::string> seen;
    for (const fs::path& f : files) {
        std::string rel = relative_to(f, out).generic_string();
        if (!seen.insert(rel).second) continue;
        list.push_back({{"path", rel}, {"sha256", sha256_file(f)}});
    }
    return list;
}

void record_manifest(const StageRecord& rec, const StageIo& io, const fs::path& out) {
    fs::path path = out / "manifest.json";
    json manifest = json::object();
    if (fs::exists(path)) {
        std::ifstream in(path);
        try {
            manifest = json::parse(in);
        } catch (const json::exception&) {
            manifest = json::object();
        }
    }
    if (!manifest.contains("stages") || !manifest["stages"].is_object()) manifest["stages"] = json::object();
    manifest["stages"][rec.stage] = {{"inputs", file_list(io.inputs, out)},
                                     {"outputs", file_list(io.outputs, out)},
                                     {"config_hash", rec.config_hash},
                                     {"seconds", rec.seconds}};
    std::ofstream o(path);
    if (!o) throw Error("cannot write " + path.string());
    o << manifest.dump(2) << '\n';
}

}  // namespace

StageRecord run_stage(const std::string& stage, const PipelineConfig& config, const fs::path& out) {
    using Fn = void (*)(const PipelineConfig&, const fs::path&, StageIo&);
    static const std::map<std::string, Fn> table{
        {"gen", stage_gen},   {"extract", stage_extract},     {"unwrap", stage_unwrap},
        {"backproject", stage_backproject}, {"fuse", stage_fuse}, {"decompose", stage_decompose},
        {"render", stage_render}, {"eval", stage_eval}};
    auto it = table.find(stage);
    if (it == table.end()) throw InputError("unknown stage '" + stage + "'");
    fs::create_directories(out);

    StageIo io;
    auto t0 = std::chrono::steady_clock::now();
    it->second(config, out, io);
    auto t1 = std::chrono::steady_clock::now();

    StageRecord rec;
    rec.stage = stage;
    rec.config_hash = stage_config_hash(stage, config);
    rec.seconds = std::chrono::duration<double>(t1 - t0).count();
    for (const auto& p : io.inputs) rec.inputs.push_back(relative_to(p, out));
    for (const auto& p : io.outputs) rec.outputs.push_back(relative_to(p, out));
    record_manifest(rec, io, out);
    return rec;
}

std::vector<StageRecord> run_pipeline(const PipelineConfig& config, const fs::path& out) {
    std::vector<StageRecord> records;
    for (const std::string& stage : stage_names()) records.push_back(run_stage(stage, config, out));
    return records;
}

}  // namespace uvpbr
