#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "restorex/annotations.hpp"
#include "restorex/fixtures.hpp"
#include "restorex/gradcam.hpp"
#include "restorex/image.hpp"
#include "restorex/manifest.hpp"
#include "restorex/quality.hpp"
#include "restorex/similarity.hpp"
#include "restorex/tensor.hpp"

using namespace restorex;
using restorex::testing::TempDir;
using restorex::testing::code_of;
using restorex::testing::read_bytes;

namespace {

namespace fs = std::filesystem;

std::vector<std::string> relative_files(const fs::path& root) {
    std::vector<std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file())
            files.push_back(entry.path().lexically_relative(root).generic_string());
    std::sort(files.begin(), files.end());
    return files;
}

FixtureSpec small_spec() {
    FixtureSpec spec;
    spec.seed = 7;
    spec.n_images = 2;
    spec.n_stages = 2;
    spec.tensor_channels = 2;
    spec.tensor_height = 4;
    spec.tensor_width = 4;
    spec.image_width = 32;
    spec.image_height = 32;
    return spec;
}

} // namespace

TEST_SUITE("fixtures") {

TEST_CASE("identical specs produce byte-identical trees") {
    TempDir a;
    TempDir b;
    FixtureSpec spec = small_spec();
    generate_fixtures(spec, a.path());
    generate_fixtures(spec, b.path());

    auto files_a = relative_files(a.path());
    auto files_b = relative_files(b.path());
    REQUIRE(files_a == files_b);
    CHECK(files_a.size() > 8); // manifest, similarity, gt, stage files, pngs, tensors
    for (const auto& rel : files_a) {
        CAPTURE(rel);
        CHECK(read_bytes(a.path() / rel) == read_bytes(b.path() / rel));
    }

    // a different seed must actually change something
    TempDir c;
    FixtureSpec reseeded = spec;
    reseeded.seed = 8;
    generate_fixtures(reseeded, c.path());
    bool any_difference = false;
    for (const auto& rel : relative_files(c.path()))
        if (read_bytes(a.path() / rel) != read_bytes(c.path() / rel)) any_difference = true;
    CHECK(any_difference);
}

TEST_CASE("phi targets are hit exactly when target*n_images is integral") {
    TempDir dir;
    FixtureSpec spec;
    spec.seed = 99;
    spec.n_images = 100;
    spec.n_stages = 5;
    spec.phi_targets = {0.11, 0.01, 0.01, 0.17, 0.48};
    spec.with_images = false;
    spec.with_tensors = false;
    auto result = generate_fixtures(spec, dir.path());

    auto manifest = load_manifest_file(result.manifest_path);
    auto table = SimilarityTable::load_file(result.similarity_path.string());
    auto trajectory = run_manifest(manifest, table, GuidancePolicy{}, PairingMode::primary_object, 4);

    REQUIRE(trajectory.stages.size() == 5);
    CHECK(trajectory.stages[0].quality.phi == 0.11);
    CHECK(trajectory.stages[1].quality.phi == 0.01);
    CHECK(trajectory.stages[2].quality.phi == 0.01);
    CHECK(trajectory.stages[3].quality.phi == 0.17);
    CHECK(trajectory.stages[4].quality.phi == 0.48);

    // one steep drop, then a plateau and recovery: flag once, never stop
    CHECK(trajectory.stages[0].decision == Decision::Continue);
    CHECK(trajectory.stages[1].decision == Decision::Flag);
    CHECK(trajectory.stages[2].decision == Decision::Continue);
    CHECK(trajectory.stages[3].decision == Decision::Continue);
    CHECK(trajectory.stages[4].decision == Decision::Continue);
    CHECK_FALSE(trajectory.stop_recommended());
    CHECK_FALSE(trajectory.rollback_to.has_value());
}

TEST_CASE("spec validation") {
    TempDir dir;
    auto expect_range_error = [&](FixtureSpec spec) {
        CHECK(code_of([&] { generate_fixtures(spec, dir.path()); }) == errc::range_error);
    };

    FixtureSpec spec = small_spec();
    spec.n_images = 0;
    expect_range_error(spec);

    spec = small_spec();
    spec.n_stages = 0;
    expect_range_error(spec);

    spec = small_spec();
    spec.phi_targets = {0.5}; // n_stages is 2
    expect_range_error(spec);

    spec = small_spec();
    spec.phi_targets = {0.5, 1.5};
    expect_range_error(spec);

    spec = small_spec();
    spec.tensor_channels = 0;
    expect_range_error(spec);

    spec = small_spec();
    spec.image_width = 31;
    expect_range_error(spec);
}

TEST_CASE("generated tree loads end to end") {
    TempDir dir;
    FixtureSpec spec = small_spec();
    auto result = generate_fixtures(spec, dir.path());

    auto manifest = load_manifest_file(result.manifest_path);
    REQUIRE(manifest.stages.size() == 2);
    CHECK(manifest.stages[0].epoch_first == 1);
    CHECK(manifest.stages[0].epoch_last == 20);
    CHECK(manifest.stages[1].epoch_first == 21);
    CHECK(manifest.stages[1].epoch_last == 40);

    for (const auto& stage : manifest.stages) {
        auto detections = load_detections_file(stage.detections_path.string());
        CHECK(detections.images.size() == 2);
        CHECK(detections.images[0].id == "img_0001");

        REQUIRE(stage.attention_dir.has_value());
        Tensor3 features = read_tensor_file(*stage.attention_dir / "img_0001.features.rxt");
        Tensor3 gradients = read_tensor_file(*stage.attention_dir / "img_0001.gradients.rxt");
        CHECK(features.channels == 2);
        CHECK(features.height == 4);
        CHECK(features.width == 4);
        HeatMap heat = normalize(cam(features, neuron_weights(gradients)));
        for (float v : heat.values) {
            CHECK(v >= 0.0f);
            CHECK(v <= 1.0f);
        }

        REQUIRE(stage.restored_dir.has_value());
        Image8 restored = read_png(*stage.restored_dir / "img_0001.png");
        CHECK(restored.width == 32);
        CHECK(restored.height == 32);
    }

    auto gt = load_ground_truth_file((dir.path() / "ground_truth.json").string());
    REQUIRE(gt.images.size() == 2);
    CHECK(gt.images[1].id == "img_0002");
    for (const auto& image : gt.images) {
        REQUIRE(!image.objects.empty());
        CHECK(image.objects[0].primary);
    }

    auto table = SimilarityTable::load_file(result.similarity_path.string());
    CHECK(table.similarity("taxi", "car") == 1);

    Image8 input = read_png(dir.path() / "input" / "img_0001.png");
    CHECK(input.width == 32);
    CHECK(input.height == 32);

    // scoring the generated stages works without target phis too
    auto trajectory = run_manifest(manifest, table, GuidancePolicy{}, PairingMode::primary_object, 2);
    CHECK(trajectory.stages.size() == 2);
    for (const auto& stage : trajectory.stages) {
        CHECK(stage.quality.n == 2);
        CHECK(stage.quality.phi >= 0.0);
        CHECK(stage.quality.phi <= 1.0);
    }
}

TEST_CASE("per-detection pairing scores generated stages") {
    TempDir dir;
    FixtureSpec spec;
    spec.seed = 11;
    spec.n_images = 8;
    spec.n_stages = 3;
    spec.with_images = false;
    spec.with_tensors = false;
    auto result = generate_fixtures(spec, dir.path());

    auto manifest = load_manifest_file(result.manifest_path);
    auto table = SimilarityTable::load_file(result.similarity_path.string());
    auto trajectory = run_manifest(manifest, table, GuidancePolicy{}, PairingMode::per_detection, 2);
    REQUIRE(trajectory.stages.size() == 3);
    for (const auto& stage : trajectory.stages) {
        CHECK(stage.quality.n >= 1);
        CHECK(stage.quality.phi >= 0.0);
        CHECK(stage.quality.phi <= 1.0);
    }
}

} // TEST_SUITE
