#include <doctest.h>

#include <string>

#include "helpers.hpp"
#include "restorex/annotations.hpp"

using namespace restorex;
using restorex::testing::code_of;

namespace {

std::string det_doc(const std::string& detections_json) {
    return R"({"images":[{"id":"img1","width":100,"height":100,"detections":)" + detections_json +
           "}]}";
}

std::string gt_doc(const std::string& objects_json) {
    return R"({"images":[{"id":"img1","width":100,"height":100,"objects":)" + objects_json + "}]}";
}

} // namespace

TEST_SUITE("annotations") {

TEST_CASE("one detection parses with all fields") {
    auto doc = parse_detections(
        det_doc(R"([{"box":[0,0,10,10],"label":"car","score":0.9,"explain_prob":0.75}])"));
    REQUIRE(doc.images.size() == 1);
    REQUIRE(doc.images[0].detections.size() == 1);
    const Detection& det = doc.images[0].detections[0];
    CHECK(det.image_id == "img1");
    CHECK(det.box == BoundingBox{0, 0, 10, 10});
    CHECK(det.label == "car");
    CHECK(det.score == 0.9);
    CHECK(det.explain_prob == 0.75);

    auto bare = parse_detections(det_doc(R"([{"box":[0,0,10,10],"label":"car","score":0.9}])"));
    CHECK_FALSE(bare.images[0].detections[0].explain_prob.has_value());
}

TEST_CASE("score and explain_prob are unit-interval") {
    CHECK(code_of([] {
              parse_detections(det_doc(R"([{"box":[0,0,1,1],"label":"car","score":1.5}])"));
          }) == errc::range_error);
    CHECK(code_of([] {
              parse_detections(
                  det_doc(R"([{"box":[0,0,1,1],"label":"car","score":0.5,"explain_prob":-0.1}])"));
          }) == errc::range_error);
}

TEST_CASE("detections group per image") {
    auto doc = parse_detections(R"({"images":[
        {"id":"a","width":10,"height":10,"detections":[
            {"box":[0,0,1,1],"label":"car","score":0.1},
            {"box":[0,0,2,2],"label":"bus","score":0.2}]},
        {"id":"b","width":10,"height":10,"detections":[
            {"box":[0,0,3,3],"label":"person","score":0.3}]}]})");
    REQUIRE(doc.images.size() == 2);
    CHECK(doc.images[0].detections.size() == 2);
    CHECK(doc.images[1].detections.size() == 1);
    CHECK(doc.images[1].detections[0].image_id == "b");
}

TEST_CASE("boxes must be finite, ordered, nonnegative") {
    CHECK(code_of([] {
              parse_detections(det_doc(R"([{"box":[5,0,5,10],"label":"car","score":0.5}])"));
          }) == errc::box_error);
    CHECK(code_of([] {
              parse_detections(det_doc(R"([{"box":[10,0,5,10],"label":"car","score":0.5}])"));
          }) == errc::box_error);
    CHECK(code_of([] {
              parse_detections(det_doc(R"([{"box":[-1,0,5,10],"label":"car","score":0.5}])"));
          }) == errc::box_error);
    CHECK(code_of([] {
              parse_detections(det_doc(R"([{"box":[0,0,5],"label":"car","score":0.5}])"));
          }) == errc::schema_error);
}

TEST_CASE("schema violations are typed") {
    CHECK(code_of([] { parse_detections("not json"); }) == errc::schema_error);
    CHECK(code_of([] { parse_detections(R"({"images":{}})"); }) == errc::schema_error);
    CHECK(code_of([] {
              parse_detections(det_doc(R"([{"box":[0,0,1,1],"score":0.5}])"));
          }) == errc::schema_error); // label missing
    CHECK(code_of([] {
              parse_detections(R"({"images":[{"id":"a","width":10,"height":10,"detections":[]},
                                             {"id":"a","width":10,"height":10,"detections":[]}]})");
          }) == errc::schema_error); // duplicate image id
    CHECK(code_of([] {
              parse_detections(R"({"images":[{"id":"a","width":0,"height":10,"detections":[]}]})");
          }) == errc::schema_error); // non-positive dims
}

TEST_CASE("ground truth primary flag") {
    auto doc = parse_ground_truth(
        gt_doc(R"([{"box":[0,0,10,10],"label":"car","primary":true},
                   {"box":[0,0,5,5],"label":"bus"}])"));
    CHECK(doc.images[0].objects[0].primary);
    CHECK_FALSE(doc.images[0].objects[1].primary);

    CHECK(code_of([] {
              parse_ground_truth(gt_doc(R"([{"box":[0,0,10,10],"label":"car","primary":true},
                                            {"box":[0,0,5,5],"label":"bus","primary":true}])"));
          }) == errc::primary_conflict);
}

TEST_CASE("file loaders annotate the path") {
    restorex::testing::TempDir dir;
    auto path = dir / "bad.json";
    restorex::testing::write_text_file(path, "not json");
    try {
        load_detections_file(path.string());
        FAIL("expected schema_error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::schema_error);
        CHECK(std::string(e.what()).find("bad.json") != std::string::npos);
    }
    CHECK(code_of([&] { load_ground_truth_file((dir / "missing.json").string()); }) ==
          errc::io_error);
}

} // TEST_SUITE
