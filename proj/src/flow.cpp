#include "flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "error.hpp"

namespace trackseg {

namespace {

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

GrayFrame downsample_half(const GrayFrame& src) {
    const int w = src.width, h = src.height;
    GrayFrame smooth(w, h);
    // separable [1 2 1]/4 with replicated border
    GrayFrame tmp(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            tmp.at(x, y) = 0.25f * src.at(clampi(x - 1, 0, w - 1), y) + 0.5f * src.at(x, y) +
                           0.25f * src.at(clampi(x + 1, 0, w - 1), y);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            smooth.at(x, y) = 0.25f * tmp.at(x, clampi(y - 1, 0, h - 1)) + 0.5f * tmp.at(x, y) +
                              0.25f * tmp.at(x, clampi(y + 1, 0, h - 1));

    GrayFrame out((w + 1) / 2, (h + 1) / 2);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) out.at(x, y) = smooth.at(2 * x, 2 * y);
    return out;
}

// Per-pixel SAD of a window x window patch for one displacement, over the
// whole image, with replicated borders on both the patch and the sample.
std::vector<float> compute_sad_map(const GrayFrame& prev, const GrayFrame& next, int dx, int dy,
                                   int window) {
    const int w = prev.width, h = prev.height, hw = window / 2;
    std::vector<float> diff(static_cast<size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        const int sy = clampi(y + dy, 0, h - 1);
        for (int x = 0; x < w; ++x) {
            const int sx = clampi(x + dx, 0, w - 1);
            diff[static_cast<size_t>(y) * w + x] = std::fabs(prev.at(x, y) - next.at(sx, sy));
        }
    }

    std::vector<float> horiz(diff.size());
    std::vector<double> prefix(static_cast<size_t>(std::max(w, h)) + 1);
    for (int y = 0; y < h; ++y) {
        const float* row = diff.data() + static_cast<size_t>(y) * w;
        prefix[0] = 0.0;
        for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + row[x];
        for (int x = 0; x < w; ++x) {
            const int lo = x - hw, hi = x + hw;
            double s = prefix[std::min(hi, w - 1) + 1] - prefix[std::max(lo, 0)];
            if (lo < 0) s += static_cast<double>(-lo) * row[0];
            if (hi > w - 1) s += static_cast<double>(hi - (w - 1)) * row[w - 1];
            horiz[static_cast<size_t>(y) * w + x] = static_cast<float>(s);
        }
    }

    std::vector<float> out(diff.size());
    for (int x = 0; x < w; ++x) {
        prefix[0] = 0.0;
        for (int y = 0; y < h; ++y) prefix[y + 1] = prefix[y] + horiz[static_cast<size_t>(y) * w + x];
        for (int y = 0; y < h; ++y) {
            const int lo = y - hw, hi = y + hw;
            double s = prefix[std::min(hi, h - 1) + 1] - prefix[std::max(lo, 0)];
            if (lo < 0) s += static_cast<double>(-lo) * horiz[x];
            if (hi > h - 1) s += static_cast<double>(hi - (h - 1)) * horiz[static_cast<size_t>(h - 1) * w + x];
            out[static_cast<size_t>(y) * w + x] = static_cast<float>(s);
        }
    }
    return out;
}

// Direct patch SAD; gives up row-wise once the sum exceeds `bound` (callers
// only compare against values <= bound, so the exact tail is irrelevant).
float sad_direct(const GrayFrame& prev, const GrayFrame& next, int x, int y, int dx, int dy,
                 int window, float bound) {
    const int w = prev.width, h = prev.height, hw = window / 2;
    double s = 0.0;
    for (int ty = -hw; ty <= hw; ++ty) {
        const int qy = clampi(y + ty, 0, h - 1);
        const int sy = clampi(qy + dy, 0, h - 1);
        for (int tx = -hw; tx <= hw; ++tx) {
            const int qx = clampi(x + tx, 0, w - 1);
            const int sx = clampi(qx + dx, 0, w - 1);
            s += std::fabs(prev.at(qx, qy) - next.at(sx, sy));
        }
        if (s > bound) return static_cast<float>(s);
    }
    return static_cast<float>(s);
}

// 3x3 median; drops isolated bad estimates before they seed the next level
std::vector<int> median3x3(const std::vector<int>& src, int w, int h) {
    std::vector<int> out(src.size());
    int window[9];
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int n = 0;
            for (int ty = -1; ty <= 1; ++ty) {
                const int yy = clampi(y + ty, 0, h - 1);
                for (int tx = -1; tx <= 1; ++tx) {
                    const int xx = clampi(x + tx, 0, w - 1);
                    window[n++] = src[static_cast<size_t>(yy) * w + xx];
                }
            }
            std::nth_element(window, window + 4, window + 9);
            out[static_cast<size_t>(y) * w + x] = window[4];
        }
    }
    return out;
}

struct SadCache {
    const GrayFrame* prev = nullptr;
    const GrayFrame* next = nullptr;
    int window = 0;
    size_t cap = 0;
    size_t build_threshold = 0;  // probes of one displacement before it earns a map
    std::unordered_map<int64_t, std::vector<float>> maps;
    std::unordered_map<int64_t, size_t> probes;

    static int64_t key(int dx, int dy) {
        return (static_cast<int64_t>(dx + (1 << 20)) << 22) | static_cast<int64_t>(dy + (1 << 20));
    }

    const std::vector<float>* lookup(int dx, int dy) const {
        const auto it = maps.find(key(dx, dy));
        return it != maps.end() ? &it->second : nullptr;
    }

    // Counts a per-pixel probe; materializes the full-image map once the
    // displacement has been asked for often enough to amortize it.
    const std::vector<float>* probe(int dx, int dy) {
        const int64_t k = key(dx, dy);
        const size_t count = ++probes[k];
        if (count < build_threshold || maps.size() >= cap) return nullptr;
        auto it = maps.find(k);
        if (it == maps.end())
            it = maps.emplace(k, compute_sad_map(*prev, *next, dx, dy, window)).first;
        return &it->second;
    }
};

}  // namespace

FlowField estimate_flow(const GrayFrame& prev, const GrayFrame& next, const FlowParams& params) {
    if (prev.width != next.width || prev.height != next.height)
        fail(ErrorKind::InvalidArgument, "estimate_flow: frame dimensions differ");
    if (prev.width <= 0 || prev.height <= 0)
        fail(ErrorKind::InvalidArgument, "estimate_flow: frame dimensions must be positive");
    if (params.levels < 1) fail(ErrorKind::InvalidArgument, "estimate_flow: levels must be >= 1");
    if (params.window < 3 || params.window % 2 == 0)
        fail(ErrorKind::InvalidArgument, "estimate_flow: window must be odd and >= 3");

    std::vector<GrayFrame> pyr_prev{prev}, pyr_next{next};
    for (int l = 1; l < params.levels; ++l) {
        const GrayFrame& last = pyr_prev.back();
        if (std::min(last.width, last.height) < 2 * params.window) break;
        pyr_prev.push_back(downsample_half(pyr_prev.back()));
        pyr_next.push_back(downsample_half(pyr_next.back()));
    }

    const int radius = params.window;
    std::vector<std::pair<int, int>> deltas;
    deltas.reserve(static_cast<size_t>(2 * radius + 1) * (2 * radius + 1));
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) deltas.emplace_back(dx, dy);
    std::sort(deltas.begin(), deltas.end(), [](const auto& a, const auto& b) {
        const int ma = std::abs(a.first) + std::abs(a.second);
        const int mb = std::abs(b.first) + std::abs(b.second);
        if (ma != mb) return ma < mb;
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    });

    std::vector<int> flow_x, flow_y;
    int cw = 0, ch = 0;
    for (int level = static_cast<int>(pyr_prev.size()) - 1; level >= 0; --level) {
        const GrayFrame& lp = pyr_prev[level];
        const GrayFrame& ln = pyr_next[level];
        const int w = lp.width, h = lp.height;

        std::vector<int> base_x(static_cast<size_t>(w) * h, 0), base_y(static_cast<size_t>(w) * h, 0);
        if (!flow_x.empty()) {
            const std::vector<int> cmx = median3x3(flow_x, cw, ch);
            const std::vector<int> cmy = median3x3(flow_y, cw, ch);
            for (int y = 0; y < h; ++y) {
                const int csy = std::min(y / 2, ch - 1);
                for (int x = 0; x < w; ++x) {
                    const int csx = std::min(x / 2, cw - 1);
                    base_x[static_cast<size_t>(y) * w + x] = 2 * cmx[static_cast<size_t>(csy) * cw + csx];
                    base_y[static_cast<size_t>(y) * w + x] = 2 * cmy[static_cast<size_t>(csy) * cw + csx];
                }
            }
        }

        SadCache cache;
        cache.prev = &lp;
        cache.next = &ln;
        cache.window = params.window;
        const size_t budget_bytes = 256ull * 1024 * 1024;
        cache.cap = std::max<size_t>(8, budget_bytes / (static_cast<size_t>(w) * h * sizeof(float)));
        cache.build_threshold = std::max<size_t>(64, static_cast<size_t>(w) * h / 4);

        // pixels sharing a base reuse the resolved per-candidate SAD maps
        std::vector<const float*> maps(deltas.size(), nullptr);
        int cached_bx = std::numeric_limits<int>::min(), cached_by = cached_bx;

        std::vector<int> out_x(static_cast<size_t>(w) * h), out_y(static_cast<size_t>(w) * h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const size_t p = static_cast<size_t>(y) * w + x;
                const int bx = base_x[p], by = base_y[p];
                if (bx != cached_bx || by != cached_by) {
                    for (size_t i = 0; i < deltas.size(); ++i) {
                        const std::vector<float>* map =
                            cache.lookup(bx + deltas[i].first, by + deltas[i].second);
                        maps[i] = map ? map->data() : nullptr;
                    }
                    cached_bx = bx;
                    cached_by = by;
                }
                float best = std::numeric_limits<float>::infinity();
                int best_dx = bx, best_dy = by;
                for (size_t i = 0; i < deltas.size(); ++i) {
                    float cost;
                    if (maps[i] != nullptr) {
                        cost = maps[i][p];
                    } else {
                        const int dx = bx + deltas[i].first, dy = by + deltas[i].second;
                        const std::vector<float>* map = cache.probe(dx, dy);
                        if (map != nullptr) {
                            maps[i] = map->data();
                            cost = maps[i][p];
                        } else {
                            cost = sad_direct(lp, ln, x, y, dx, dy, params.window, best);
                        }
                    }
                    if (cost < best) {
                        best = cost;
                        best_dx = bx + deltas[i].first;
                        best_dy = by + deltas[i].second;
                        if (best == 0.0f) break;  // SAD cannot go lower, ties never replace
                    }
                }
                out_x[p] = best_dx;
                out_y[p] = best_dy;
            }
        }
        flow_x = std::move(out_x);
        flow_y = std::move(out_y);
        cw = w;
        ch = h;
    }

    // final 3x3 box smoothing
    FlowField field(prev.width, prev.height);
    const int w = prev.width, h = prev.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double sx = 0.0, sy = 0.0;
            for (int ty = -1; ty <= 1; ++ty) {
                const int yy = clampi(y + ty, 0, h - 1);
                for (int tx = -1; tx <= 1; ++tx) {
                    const int xx = clampi(x + tx, 0, w - 1);
                    sx += flow_x[static_cast<size_t>(yy) * w + xx];
                    sy += flow_y[static_cast<size_t>(yy) * w + xx];
                }
            }
            field.dx[static_cast<size_t>(y) * w + x] = static_cast<float>(sx / 9.0);
            field.dy[static_cast<size_t>(y) * w + x] = static_cast<float>(sy / 9.0);
        }
    }
    return field;
}

BinaryMask warp_mask(const BinaryMask& mask, const FlowField& flow) {
    if (mask.width != flow.width || mask.height != flow.height)
        fail(ErrorKind::InvalidArgument, "warp_mask: mask and flow dimensions differ");
    validate_mask(mask);

    BoolGrid out(mask.width, mask.height);
    uint64_t pos = 0;
    bool value = false;
    for (uint32_t count : mask.counts) {
        if (value) {
            for (uint64_t p = pos; p < pos + count; ++p) {
                const int x = static_cast<int>(p / mask.height);
                const int y = static_cast<int>(p % mask.height);
                const size_t idx = static_cast<size_t>(y) * mask.width + x;
                const long nx = std::lround(static_cast<double>(x) + flow.dx[idx]);
                const long ny = std::lround(static_cast<double>(y) + flow.dy[idx]);
                if (nx >= 0 && nx < mask.width && ny >= 0 && ny < mask.height)
                    out.set(static_cast<int>(nx), static_cast<int>(ny), true);
            }
        }
        pos += count;
        value = !value;
    }
    return rle_encode(out);
}

}  // namespace trackseg
