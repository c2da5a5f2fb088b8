#include "assignment.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "doctest.h"
#include "error.hpp"
#include "test_support.hpp"

using namespace trackseg;
using namespace testsupport;

namespace {

CostMatrix matrix_from(std::initializer_list<std::initializer_list<double>> rows) {
    CostMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows.begin()->size()));
    int r = 0;
    for (const auto& row : rows) {
        int c = 0;
        for (double v : row) m.at(r, c++) = v;
        ++r;
    }
    return m;
}

}  // namespace

TEST_CASE("single cell matrix") {
    const CostMatrix m = matrix_from({{7.0}});
    const auto pairs = solve_assignment(m);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0] == std::pair<int, int>{0, 0});
    CHECK(assignment_cost(m, pairs) == doctest::Approx(7.0));
}

TEST_CASE("2x2 example prefers the cross pairing") {
    const CostMatrix m = matrix_from({{1.0, 2.0}, {3.0, 5.0}});
    const auto pairs = solve_assignment(m);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0] == std::pair<int, int>{0, 1});
    CHECK(pairs[1] == std::pair<int, int>{1, 0});
    CHECK(assignment_cost(m, pairs) == doctest::Approx(5.0));
}

TEST_CASE("empty matrix is rejected") {
    CHECK_THROWS_AS(solve_assignment(CostMatrix()), Error);
    CHECK_THROWS_AS(solve_assignment(CostMatrix(0, 3)), Error);
}

TEST_CASE("random square matrices match the exhaustive oracle") {
    TestRng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = rng.uniform_int(1, 7);
        CostMatrix m(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) m.at(r, c) = rng.uniform_int(0, 1000);
        const auto pairs = solve_assignment(m);
        const OracleResult oracle = assignment_oracle(m);
        REQUIRE(pairs.size() == oracle.size);
        CHECK(assignment_cost(m, pairs) == oracle.cost);
    }
}

TEST_CASE("rectangular matrices match the oracle over all injections") {
    TestRng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const int rows = rng.uniform_int(1, 6);
        const int cols = rng.uniform_int(1, 6);
        CostMatrix m(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) m.at(r, c) = rng.uniform_int(-500, 500);
        const auto pairs = solve_assignment(m);
        const OracleResult oracle = assignment_oracle(m);
        REQUIRE(pairs.size() == oracle.size);
        REQUIRE(pairs.size() == static_cast<size_t>(std::min(rows, cols)));
        CHECK(assignment_cost(m, pairs) == oracle.cost);
    }
}

TEST_CASE("2x3 example") {
    const CostMatrix m = matrix_from({{4.0, 1.0, 3.0}, {2.0, 0.0, 5.0}});
    const auto pairs = solve_assignment(m);
    const OracleResult oracle = assignment_oracle(m);
    REQUIRE(pairs.size() == 2);
    CHECK(assignment_cost(m, pairs) == oracle.cost);
}

TEST_CASE("forbidden cells are never matched and the matching stays maximal") {
    TestRng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const int rows = rng.uniform_int(1, 5);
        const int cols = rng.uniform_int(1, 5);
        CostMatrix m(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                m.at(r, c) = rng.uniform_int(0, 100);
                if (rng.uniform() < 0.4) m.forbid(r, c);
            }
        const auto pairs = solve_assignment(m);
        for (const auto& [r, c] : pairs) CHECK(!m.is_forbidden(r, c));
        const OracleResult oracle = assignment_oracle(m);
        REQUIRE(pairs.size() == oracle.size);
        CHECK(assignment_cost(m, pairs) == oracle.cost);
    }
}

TEST_CASE("fully forbidden matrix yields an empty matching") {
    CostMatrix m(2, 2);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) m.forbid(r, c);
    CHECK(solve_assignment(m).empty());
}

TEST_CASE("row and column shifts keep the matching optimal") {
    TestRng rng(14);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = rng.uniform_int(2, 5);
        CostMatrix m(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) m.at(r, c) = rng.uniform_int(0, 100);
        const double base_cost = assignment_cost(m, solve_assignment(m));

        CostMatrix shifted = m;
        const int row = rng.uniform_int(0, n - 1);
        const double delta = rng.uniform_int(1, 50);
        for (int c = 0; c < n; ++c) shifted.at(row, c) += delta;
        const double shifted_cost = assignment_cost(shifted, solve_assignment(shifted));
        CHECK(shifted_cost == doctest::Approx(base_cost + delta));
    }
}

TEST_CASE("output pairs are unique in both coordinates") {
    TestRng rng(15);
    CostMatrix m(6, 6);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) m.at(r, c) = rng.uniform();
    const auto pairs = solve_assignment(m);
    std::set<int> rows, cols;
    for (const auto& [r, c] : pairs) {
        CHECK(rows.insert(r).second);
        CHECK(cols.insert(c).second);
    }
}

TEST_CASE("ties resolve to the lexicographically smallest pair sequence") {
    // all-zero matrix: any permutation is optimal, the identity is smallest
    CostMatrix zeros(4, 4);
    const auto pairs = solve_assignment(zeros);
    REQUIRE(pairs.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(pairs[static_cast<size_t>(i)] == std::pair<int, int>{i, i});

    // two optimal solutions with equal cost: {(0,0),(1,1)} and {(0,1),(1,0)}
    const CostMatrix tied = matrix_from({{1.0, 2.0}, {2.0, 3.0}});
    const auto tied_pairs = solve_assignment(tied);
    REQUIRE(tied_pairs.size() == 2);
    CHECK(tied_pairs[0] == std::pair<int, int>{0, 0});
    CHECK(tied_pairs[1] == std::pair<int, int>{1, 1});

    CHECK(solve_assignment(tied) == solve_assignment(tied));  // stable across calls
}

TEST_CASE("non-finite costs are rejected") {
    CostMatrix m(1, 2);
    m.at(0, 0) = std::numeric_limits<double>::infinity();
    m.at(0, 1) = 1.0;
    CHECK_THROWS_AS(solve_assignment(m), Error);
    m.at(0, 0) = 0.0;
    CHECK(solve_assignment(m).size() == 1);
}
