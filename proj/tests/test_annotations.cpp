#include <sstream>

#include "doctest.h"
#include "nsd/annotations.hpp"

using namespace nsd;

TEST_CASE("annotations: all-zero file gives an all-zero mask of the right shape") {
    std::istringstream in(
        "time_s,expert1,expert2,expert3\n"
        "0,0,0,0\n1,0,0,0\n2,0,0,0\n3,0,0,0\n4,0,0,0\n"
        "5,0,0,0\n6,0,0,0\n7,0,0,0\n8,0,0,0\n9,0,0,0\n");
    const edf::AnnotationTrack t = edf::read_annotations_csv(in, 10);
    CHECK(t.experts == 3);
    REQUIRE(t.mask.size() == 3);
    CHECK(t.duration_s() == 10);
    for (const auto& row : t.mask)
        for (auto v : row) CHECK(v == 0);
    CHECK(t.warnings.empty());
}

TEST_CASE("annotations: marks land on the right expert and second") {
    std::istringstream in(
        "time_s,expert1,expert2\n"
        "0,1,0\n1,0,1\n2,1,1\n");
    const edf::AnnotationTrack t = edf::read_annotations_csv(in, 3);
    CHECK(t.mask[0][0] == 1);
    CHECK(t.mask[1][0] == 0);
    CHECK(t.mask[0][1] == 0);
    CHECK(t.mask[1][1] == 1);
    CHECK(t.mask[0][2] == 1);
    CHECK(t.mask[1][2] == 1);
}

TEST_CASE("annotations: non-binary value is rejected with its row") {
    std::istringstream in(
        "time_s,expert1\n"
        "0,0\n1,2\n");
    CHECK_THROWS_AS(edf::read_annotations_csv(in, 2), NonBinaryAnnotation);
}

TEST_CASE("annotations: duplicate timestamp is rejected") {
    std::istringstream in(
        "time_s,expert1\n"
        "0,0\n0,1\n");
    CHECK_THROWS_AS(edf::read_annotations_csv(in, 2), DuplicateTimestamp);
}

TEST_CASE("annotations: missing trailing seconds are zero-filled with a warning") {
    std::istringstream in(
        "time_s,expert1,expert2,expert3\n"
        "0,1,1,1\n1,0,0,0\n2,0,1,0\n3,0,0,0\n4,1,0,0\n");
    const edf::AnnotationTrack t = edf::read_annotations_csv(in, 8);
    CHECK(t.duration_s() == 8);
    for (int e = 0; e < 3; ++e)
        for (int s = 5; s < 8; ++s) CHECK(t.mask[e][s] == 0);
    CHECK(t.warnings.size() == 1);
}

TEST_CASE("annotations: write/read round trip") {
    std::istringstream in(
        "time_s,expert1,expert2\n"
        "0,1,0\n1,0,1\n2,1,1\n3,0,0\n");
    const edf::AnnotationTrack t = edf::read_annotations_csv(in, 4);

    std::stringstream out;
    edf::write_annotations_csv(out, t);
    const edf::AnnotationTrack back = edf::read_annotations_csv(out, 4);
    CHECK(back.experts == t.experts);
    CHECK(back.mask == t.mask);
}
