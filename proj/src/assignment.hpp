#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace trackseg {

struct CostMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> costs;       // rows*cols, row-major, finite where not forbidden
    std::vector<uint8_t> forbidden;  // empty, or rows*cols flags

    CostMatrix() = default;
    CostMatrix(int r, int c) : rows(r), cols(c), costs(static_cast<size_t>(r) * c, 0.0) {}

    double at(int r, int c) const { return costs[static_cast<size_t>(r) * cols + c]; }
    double& at(int r, int c) { return costs[static_cast<size_t>(r) * cols + c]; }
    bool is_forbidden(int r, int c) const {
        return !forbidden.empty() && forbidden[static_cast<size_t>(r) * cols + c] != 0;
    }
    void forbid(int r, int c) {
        if (forbidden.empty()) forbidden.assign(static_cast<size_t>(rows) * cols, 0);
        forbidden[static_cast<size_t>(r) * cols + c] = 1;
    }
};

// Minimum-cost assignment over the non-forbidden cells. Returns the
// maximum-size minimum-cost matching as (row, col) pairs sorted by row;
// among optimal matchings the lexicographically smallest pair sequence is
// returned. Throws on an empty matrix or non-finite costs.
std::vector<std::pair<int, int>> solve_assignment(const CostMatrix& matrix);

// Total cost of a matching, summed in pair order.
double assignment_cost(const CostMatrix& matrix, const std::vector<std::pair<int, int>>& pairs);

}  // namespace trackseg
