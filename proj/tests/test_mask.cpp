#include "mask.hpp"

#include <algorithm>

#include "doctest.h"
#include "error.hpp"
#include "test_support.hpp"

using namespace trackseg;
using namespace testsupport;

TEST_CASE("rle encoding of basic rasters") {
    // single foreground pixel at row 1, col 1 of a 3x3 grid
    const BoolGrid single = grid_from_rows({"...", ".#.", "..."});
    CHECK(rle_encode(single).counts == std::vector<uint32_t>{4, 1, 4});

    const BoolGrid blank = grid_from_rows({"..", ".."});
    CHECK(rle_encode(blank).counts == std::vector<uint32_t>{4});

    const BoolGrid full = grid_from_rows({"##", "##"});
    CHECK(rle_encode(full).counts == std::vector<uint32_t>{0, 4});
}

TEST_CASE("rle decode inverts encode") {
    const BinaryMask mask{3, 3, {4, 1, 4}};
    const BoolGrid grid = rle_decode(mask);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x) CHECK(grid.at(x, y) == (x == 1 && y == 1));

    const BinaryMask full{5, 4, {0, 20}};
    const BoolGrid all = rle_decode(full);
    CHECK(std::count(all.cells.begin(), all.cells.end(), 1) == 20);
}

TEST_CASE("rle round-trip matches the reference encoder on random grids") {
    TestRng rng(42);
    for (int trial = 0; trial < 1000; ++trial) {
        const int w = rng.uniform_int(1, 12);
        const int h = rng.uniform_int(1, 12);
        const BoolGrid grid = random_grid(rng, w, h, rng.uniform());
        const BinaryMask mask = rle_encode(grid);
        CHECK(mask.counts == reference_rle_counts(grid));
        const BoolGrid back = rle_decode(mask);
        CHECK(back.cells == grid.cells);
    }
}

TEST_CASE("malformed masks are rejected") {
    CHECK_THROWS_AS(rle_decode(BinaryMask{3, 3, {4, 1, 3}}), Error);   // sum mismatch
    CHECK_THROWS_AS(rle_decode(BinaryMask{3, 3, {4, 0, 5}}), Error);   // interior zero
    CHECK_THROWS_AS(rle_decode(BinaryMask{0, 3, {0}}), Error);         // bad canvas
    CHECK_THROWS_AS(rle_encode(BoolGrid()), Error);                    // empty grid
}

TEST_CASE("compressed text codec stores the documented delta form") {
    const BinaryMask mask{3, 3, {4, 1, 4}};
    const std::string text = compressed_rle_encode(mask);
    // third count is stored as 4 - 4 = 0
    CHECK(text == reference_string_encode({4, 1, 4}));
    CHECK(text.back() == '0');
    const BinaryMask back = compressed_rle_decode(text, 3, 3);
    CHECK(mask_equal(back, mask));
}

TEST_CASE("compressed text codec round-trips against the reference codec") {
    TestRng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const int w = rng.uniform_int(1, 24);
        const int h = rng.uniform_int(1, 24);
        const BoolGrid grid = random_grid(rng, w, h, rng.uniform());
        const BinaryMask mask = rle_encode(grid);

        const std::string text = compressed_rle_encode(mask);
        CHECK(text == reference_string_encode(mask.counts));
        CHECK(reference_string_decode(text) == mask.counts);

        const BinaryMask back = compressed_rle_decode(text, h, w);
        CHECK(mask_equal(back, mask));
    }
}

TEST_CASE("compressed text codec rejects malformed strings") {
    const BinaryMask mask{3, 3, {4, 1, 4}};
    const std::string good = compressed_rle_encode(mask);

    std::string bad = good;
    bad[0] = static_cast<char>(47);  // below the character range
    CHECK_THROWS_AS(compressed_rle_decode(bad, 3, 3), Error);
    bad[0] = static_cast<char>(112);  // above the character range
    CHECK_THROWS_AS(compressed_rle_decode(bad, 3, 3), Error);

    // truncated continuation
    std::string truncated = good;
    truncated.back() = static_cast<char>(truncated.back() + 32);
    CHECK_THROWS_AS(compressed_rle_decode(truncated, 3, 3), Error);

    // decodes fine but does not cover the canvas
    CHECK_THROWS_AS(compressed_rle_decode(good, 4, 4), Error);
}

TEST_CASE("mask iou") {
    SUBCASE("identical non-empty masks give 1") {
        const BinaryMask m = rle_encode(grid_from_rows({"##.", "##.", "..."}));
        CHECK(mask_iou(m, m) == doctest::Approx(1.0));
    }

    SUBCASE("two 10x10 squares overlapping in a 5x10 strip give 1/3") {
        // canvas 15x10: squares at x in [0,10) and x in [5,15)
        BoolGrid left(15, 10), right(15, 10);
        for (int y = 0; y < 10; ++y)
            for (int x = 0; x < 15; ++x) {
                left.set(x, y, x < 10);
                right.set(x, y, x >= 5);
            }
        CHECK(mask_iou(rle_encode(left), rle_encode(right)) == doctest::Approx(1.0 / 3.0));
    }

    SUBCASE("disjoint masks give 0") {
        const BinaryMask a = rle_encode(grid_from_rows({"#.", ".."}));
        const BinaryMask b = rle_encode(grid_from_rows({".#", ".."}));
        CHECK(mask_iou(a, b) == 0.0);
    }

    SUBCASE("two empty masks give 0") {
        CHECK(mask_iou(empty_mask(4, 4), empty_mask(4, 4)) == 0.0);
    }

    SUBCASE("canvas mismatch is an error") {
        CHECK_THROWS_AS(mask_iou(empty_mask(4, 4), empty_mask(5, 4)), Error);
    }

    SUBCASE("symmetry and range on random masks") {
        TestRng rng(99);
        for (int trial = 0; trial < 50; ++trial) {
            const BinaryMask a = rle_encode(random_grid(rng, 8, 8, 0.4));
            const BinaryMask b = rle_encode(random_grid(rng, 8, 8, 0.4));
            const double ab = mask_iou(a, b);
            CHECK(ab == mask_iou(b, a));
            CHECK(ab >= 0.0);
            CHECK(ab <= 1.0);
        }
    }
}

TEST_CASE("mask area and center") {
    const BinaryMask square = rle_encode(grid_from_rows({"##", "##"}));
    CHECK(mask_area(square) == 4);
    const auto [cx, cy] = mask_center(square);
    CHECK(cx == doctest::Approx(0.5));
    CHECK(cy == doctest::Approx(0.5));

    BoolGrid one(8, 10);
    one.set(3, 7, true);
    const auto [px, py] = mask_center(rle_encode(one));
    CHECK(px == doctest::Approx(3.0));
    CHECK(py == doctest::Approx(7.0));

    // L-shape {(0,0), (0,1), (1,1)} in (x, y) coordinates
    BoolGrid ell(3, 3);
    ell.set(0, 0, true);
    ell.set(0, 1, true);
    ell.set(1, 1, true);
    const auto [lx, ly] = mask_center(rle_encode(ell));
    CHECK(lx == doctest::Approx(1.0 / 3.0));
    CHECK(ly == doctest::Approx(2.0 / 3.0));

    CHECK_THROWS_AS(mask_center(empty_mask(4, 4)), Error);

    // area equals the sum of the foreground runs
    TestRng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const BoolGrid grid = random_grid(rng, 9, 7, 0.5);
        uint64_t expected = 0;
        for (uint8_t c : grid.cells) expected += c;
        CHECK(mask_area(rle_encode(grid)) == expected);
    }
}

TEST_CASE("resolve_overlaps") {
    SUBCASE("identical masks: the higher score keeps every pixel") {
        const BinaryMask m = rle_encode(grid_from_rows({"##", ".."}));
        FrameMaskSet fs{0, {{m, 0.9}, {m, 0.6}}};
        const FrameMaskSet out = resolve_overlaps(fs);
        CHECK(mask_equal(out.masks[0].mask, m));
        CHECK(mask_empty(out.masks[1].mask));
    }

    SUBCASE("disjoint masks are unchanged") {
        const BinaryMask a = rle_encode(grid_from_rows({"#.", ".."}));
        const BinaryMask b = rle_encode(grid_from_rows({"..", ".#"}));
        const FrameMaskSet out = resolve_overlaps(FrameMaskSet{0, {{a, 0.5}, {b, 0.4}}});
        CHECK(mask_equal(out.masks[0].mask, a));
        CHECK(mask_equal(out.masks[1].mask, b));
    }

    SUBCASE("equal priorities break toward the earlier mask") {
        const BinaryMask m = rle_encode(grid_from_rows({"##"}));
        const FrameMaskSet out = resolve_overlaps(FrameMaskSet{0, {{m, 0.5}, {m, 0.5}}});
        CHECK(mask_equal(out.masks[0].mask, m));
        CHECK(mask_empty(out.masks[1].mask));
    }

    SUBCASE("matches the per-pixel argmax oracle on random stacks") {
        TestRng rng(31);
        for (int trial = 0; trial < 60; ++trial) {
            const int w = 7, h = 6;
            const int n = rng.uniform_int(1, 5);
            FrameMaskSet fs;
            fs.frame = 0;
            std::vector<BoolGrid> grids;
            for (int i = 0; i < n; ++i) {
                grids.push_back(random_grid(rng, w, h, 0.5));
                fs.masks.push_back({rle_encode(grids.back()), rng.uniform()});
            }
            const FrameMaskSet out = resolve_overlaps(fs);

            // oracle: every foreground pixel goes to the best (priority, -index)
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    int winner = -1;
                    for (int i = 0; i < n; ++i) {
                        if (!grids[static_cast<size_t>(i)].at(x, y)) continue;
                        if (winner < 0 || fs.masks[static_cast<size_t>(i)].priority >
                                              fs.masks[static_cast<size_t>(winner)].priority)
                            winner = i;
                    }
                    for (int i = 0; i < n; ++i) {
                        const BoolGrid got = rle_decode(out.masks[static_cast<size_t>(i)].mask);
                        CHECK(got.at(x, y) == (i == winner));
                    }
                }
            }

            // pairwise disjoint, union preserved, never grows
            uint64_t before = 0, after = 0;
            for (int i = 0; i < n; ++i) {
                before += mask_area(fs.masks[static_cast<size_t>(i)].mask);
                after += mask_area(out.masks[static_cast<size_t>(i)].mask);
                for (int j = i + 1; j < n; ++j)
                    CHECK(mask_intersection_area(out.masks[static_cast<size_t>(i)].mask,
                                                 out.masks[static_cast<size_t>(j)].mask) == 0);
            }
            CHECK(after <= before);
        }
    }
}
