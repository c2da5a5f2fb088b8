#include "assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace trackseg {

namespace {

// O(n^3) Kuhn-Munkres with potentials on a square matrix. Fills the
// row -> col matching and the final dual values (tight cells satisfy
// a[r][c] == u[r] + v[c]).
void hungarian_square(const std::vector<double>& a, int n, std::vector<int>& match_row,
                      std::vector<double>& u_out, std::vector<double>& v_out) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<double> minv(n + 1);
    std::vector<char> used(n + 1);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = a[static_cast<size_t>(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    match_row.assign(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) match_row[p[j] - 1] = j - 1;
    u_out.assign(n, 0.0);
    v_out.assign(n, 0.0);
    for (int i = 1; i <= n; ++i) u_out[i - 1] = u[i];
    for (int j = 1; j <= n; ++j) v_out[j - 1] = v[j];
}

struct TightGraph {
    int n = 0;
    const std::vector<double>* a = nullptr;
    const std::vector<double>* u = nullptr;
    const std::vector<double>* v = nullptr;
    double eps = 0.0;

    bool tight(int r, int c) const {
        return (*a)[static_cast<size_t>(r) * n + c] - (*u)[r] - (*v)[c] <= eps;
    }
};

bool augment(const TightGraph& g, int row, std::vector<int>& match_col, std::vector<int>& match_row,
             std::vector<char>& visited, const std::vector<char>& fixed_col) {
    for (int c = 0; c < g.n; ++c) {
        if (fixed_col[c] || visited[c] || !g.tight(row, c)) continue;
        visited[c] = 1;
        if (match_col[c] < 0 ||
            augment(g, match_col[c], match_col, match_row, visited, fixed_col)) {
            match_col[c] = row;
            match_row[row] = c;
            return true;
        }
    }
    return false;
}

// Rewrites the matching into the one whose real (row, col) output sequence is
// lexicographically smallest among matchings supported on tight cells, which
// by complementary slackness are exactly the optimal ones.
void lexicographic_normalize(const TightGraph& g, std::vector<int>& match_row,
                             const std::vector<char>& is_real_col) {
    const int n = g.n;
    std::vector<int> match_col(n, -1);
    for (int r = 0; r < n; ++r) {
        if (match_row[r] < 0) return;  // defensive: incomplete matching, keep as-is
        if (!g.tight(r, match_row[r])) return;
        match_col[match_row[r]] = r;
    }

    std::vector<char> fixed_col(n, 0);
    std::vector<int> col_order;
    col_order.reserve(n);
    for (int c = 0; c < n; ++c)
        if (is_real_col[c]) col_order.push_back(c);
    for (int c = 0; c < n; ++c)
        if (!is_real_col[c]) col_order.push_back(c);

    std::vector<char> visited(n);
    for (int r = 0; r < n; ++r) {
        for (int c : col_order) {
            if (fixed_col[c] || !g.tight(r, c)) continue;
            if (match_row[r] == c) break;  // already the best available column
            // Try to re-route the displaced row through the freed column.
            const int old_col = match_row[r];
            const int displaced = match_col[c];
            match_row[r] = c;
            match_col[c] = r;
            match_row[displaced] = -1;
            match_col[old_col] = -1;
            std::fill(visited.begin(), visited.end(), 0);
            visited[c] = 1;  // the freshly claimed column may not be re-routed
            if (augment(g, displaced, match_col, match_row, visited, fixed_col)) break;
            match_row[displaced] = c;
            match_col[c] = displaced;
            match_row[r] = old_col;
            match_col[old_col] = r;
        }
        fixed_col[match_row[r]] = 1;
    }
}

}  // namespace

std::vector<std::pair<int, int>> solve_assignment(const CostMatrix& matrix) {
    if (matrix.rows < 1 || matrix.cols < 1)
        fail(ErrorKind::InvalidArgument, "solve_assignment: matrix must have at least one row and column");
    if (matrix.costs.size() != static_cast<size_t>(matrix.rows) * matrix.cols)
        fail(ErrorKind::InvalidArgument, "solve_assignment: cost buffer does not match dimensions");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    size_t real_cells = 0;
    for (int r = 0; r < matrix.rows; ++r) {
        for (int c = 0; c < matrix.cols; ++c) {
            if (matrix.is_forbidden(r, c)) continue;
            const double v = matrix.at(r, c);
            if (!std::isfinite(v))
                fail(ErrorKind::InvalidArgument, "solve_assignment: non-finite cost entry");
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            ++real_cells;
        }
    }
    if (real_cells == 0) return {};

    const int n = std::max(matrix.rows, matrix.cols);
    const int k = std::min(matrix.rows, matrix.cols);
    const double range = hi - lo;
    const double sentinel = range * k + 2.0;

    // Shifted square matrix: real cells in [0, range], pads and forbidden
    // cells at the sentinel. One sentinel edge always costs more than any
    // arrangement of real edges, so the solver maximizes real matches first.
    std::vector<double> a(static_cast<size_t>(n) * n, sentinel);
    for (int r = 0; r < matrix.rows; ++r)
        for (int c = 0; c < matrix.cols; ++c)
            if (!matrix.is_forbidden(r, c)) a[static_cast<size_t>(r) * n + c] = matrix.at(r, c) - lo;

    std::vector<int> match_row;
    std::vector<double> u, v;
    hungarian_square(a, n, match_row, u, v);

    TightGraph g;
    g.n = n;
    g.a = &a;
    g.u = &u;
    g.v = &v;
    g.eps = 1e-9 * std::max(1.0, sentinel);

    std::vector<char> is_real_col(n, 0);
    for (int c = 0; c < matrix.cols && c < n; ++c) is_real_col[c] = 1;
    lexicographic_normalize(g, match_row, is_real_col);

    std::vector<std::pair<int, int>> pairs;
    for (int r = 0; r < matrix.rows; ++r) {
        const int c = match_row[r];
        if (c < 0 || c >= matrix.cols) continue;
        if (matrix.is_forbidden(r, c)) continue;
        pairs.emplace_back(r, c);
    }
    return pairs;
}

double assignment_cost(const CostMatrix& matrix, const std::vector<std::pair<int, int>>& pairs) {
    double total = 0.0;
    for (const auto& [r, c] : pairs) total += matrix.at(r, c);
    return total;
}

}  // namespace trackseg
