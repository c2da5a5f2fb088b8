#include "propagator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "error.hpp"

namespace trackseg {

const char* reference_side_name(ReferenceSide side) {
    return side == ReferenceSide::Head ? "head" : "tail";
}

GeometricPropagator::GeometricPropagator(int search_radius, double blur_sigma)
    : search_radius_(search_radius), blur_sigma_(blur_sigma) {
    if (search_radius_ < 1)
        fail(ErrorKind::InvalidArgument, "geometric propagator: search radius must be >= 1");
    if (blur_sigma_ < 0.0)
        fail(ErrorKind::InvalidArgument, "geometric propagator: blur sigma must be >= 0");
}

namespace {

struct MaskedPatch {
    std::vector<int> xs, ys;
    std::vector<float> values;
};

// Samples up to `cap` foreground pixels (deterministic stride) with their
// reference intensities.
MaskedPatch sample_patch(const GrayFrame& image, const BinaryMask& mask, size_t cap) {
    MaskedPatch patch;
    const BoolGrid grid = rle_decode(mask);
    size_t area = 0;
    for (uint8_t c : grid.cells) area += c;
    const size_t stride = std::max<size_t>(1, area / cap);
    size_t seen = 0;
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            if (!grid.at(x, y)) continue;
            if (seen++ % stride != 0) continue;
            patch.xs.push_back(x);
            patch.ys.push_back(y);
            patch.values.push_back(image.at(x, y));
        }
    }
    return patch;
}

// Mean-normalized correlation over the in-bounds subset of the patch shifted
// by (tx, ty). Returns -2 when too few pixels land inside the canvas.
double ncc_score(const MaskedPatch& patch, const GrayFrame& query, int tx, int ty) {
    const size_t n = patch.xs.size();
    std::vector<float> qv;
    qv.reserve(n);
    double sum_m = 0.0, sum_q = 0.0;
    size_t used = 0;
    std::vector<size_t> index;
    index.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        const int qx = patch.xs[i] + tx;
        const int qy = patch.ys[i] + ty;
        if (qx < 0 || qx >= query.width || qy < 0 || qy >= query.height) continue;
        index.push_back(i);
        qv.push_back(query.at(qx, qy));
        sum_m += patch.values[i];
        sum_q += qv.back();
        ++used;
    }
    if (used < std::max<size_t>(8, n / 4)) return -2.0;
    const double mu_m = sum_m / used, mu_q = sum_q / used;
    double cov = 0.0, var_m = 0.0, var_q = 0.0;
    for (size_t k = 0; k < used; ++k) {
        const double dm = patch.values[index[k]] - mu_m;
        const double dq = qv[k] - mu_q;
        cov += dm * dq;
        var_m += dm * dm;
        var_q += dq * dq;
    }
    if (var_m <= 1e-12 || var_q <= 1e-12) return 0.0;
    return cov / std::sqrt(var_m * var_q);
}

void gaussian_blur_inplace(Heatmap& map, double sigma) {
    if (sigma <= 0.0) return;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(static_cast<size_t>(2 * radius + 1));
    for (int t = -radius; t <= radius; ++t)
        kernel[t + radius] = std::exp(-0.5 * (t * t) / (sigma * sigma));

    const int w = map.width, h = map.height;
    // truncated kernel renormalized at the borders so mass stays in [0, 1]
    std::vector<float> tmp(map.values.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0, wsum = 0.0;
            for (int t = -radius; t <= radius; ++t) {
                const int xx = x + t;
                if (xx < 0 || xx >= w) continue;
                acc += kernel[t + radius] * map.values[static_cast<size_t>(y) * w + xx];
                wsum += kernel[t + radius];
            }
            tmp[static_cast<size_t>(y) * w + x] = static_cast<float>(acc / wsum);
        }
    }
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) {
            double acc = 0.0, wsum = 0.0;
            for (int t = -radius; t <= radius; ++t) {
                const int yy = y + t;
                if (yy < 0 || yy >= h) continue;
                acc += kernel[t + radius] * tmp[static_cast<size_t>(yy) * w + x];
                wsum += kernel[t + radius];
            }
            map.values[static_cast<size_t>(y) * w + x] =
                std::clamp(static_cast<float>(acc / wsum), 0.0f, 1.0f);
        }
    }
}

}  // namespace

Heatmap GeometricPropagator::propagate(const PropagatorMemory& memory,
                                       const PropagationQuery& query) const {
    if (memory.references.empty() || memory.references.size() > 2)
        fail(ErrorKind::InvalidArgument, "geometric propagator: memory must hold 1 or 2 references");
    if (query.image == nullptr)
        fail(ErrorKind::InvalidArgument, "geometric propagator: query image missing");

    const GrayFrame& target = *query.image;
    Heatmap heat(target.width, target.height);

    for (const auto& ref : memory.references) {
        if (ref.image == nullptr)
            fail(ErrorKind::InvalidArgument, "geometric propagator: reference image missing");
        if (ref.image->width != target.width || ref.image->height != target.height)
            fail(ErrorKind::InvalidArgument, "geometric propagator: reference/query canvas mismatch");
        if (mask_empty(ref.mask))
            fail(ErrorKind::InvalidArgument, "geometric propagator: reference mask is empty");

        const MaskedPatch patch = sample_patch(*ref.image, ref.mask, 512);
        double best_score = -3.0;
        int best_tx = 0, best_ty = 0;
        for (int ty = -search_radius_; ty <= search_radius_; ++ty) {
            for (int tx = -search_radius_; tx <= search_radius_; ++tx) {
                const double score = ncc_score(patch, target, tx, ty);
                const bool better =
                    score > best_score ||
                    (score == best_score &&
                     (std::abs(tx) + std::abs(ty) < std::abs(best_tx) + std::abs(best_ty) ||
                      (std::abs(tx) + std::abs(ty) == std::abs(best_tx) + std::abs(best_ty) &&
                       (ty < best_ty || (ty == best_ty && tx < best_tx)))));
                if (better) {
                    best_score = score;
                    best_tx = tx;
                    best_ty = ty;
                }
            }
        }

        // translate the full reference mask by the winning offset
        const BoolGrid grid = rle_decode(ref.mask);
        const float weight = 1.0f / static_cast<float>(memory.references.size());
        for (int y = 0; y < grid.height; ++y) {
            for (int x = 0; x < grid.width; ++x) {
                if (!grid.at(x, y)) continue;
                const int nx = x + best_tx, ny = y + best_ty;
                if (nx < 0 || nx >= heat.width || ny < 0 || ny >= heat.height) continue;
                heat.values[static_cast<size_t>(ny) * heat.width + nx] += weight;
            }
        }
    }

    gaussian_blur_inplace(heat, blur_sigma_);
    for (auto& v : heat.values) v = std::clamp(v, 0.0f, 1.0f);
    return heat;
}

ExternalHeatmapAdapter::ExternalHeatmapAdapter(std::filesystem::path root, std::string video_name)
    : root_(std::move(root)), video_(std::move(video_name)) {}

std::filesystem::path ExternalHeatmapAdapter::heatmap_path(int tracklet_id, ReferenceSide side,
                                                           int query_frame) const {
    return root_ / video_ /
           (std::to_string(tracklet_id) + "_" + reference_side_name(side) + "_" +
            std::to_string(query_frame) + ".hmap");
}

Heatmap ExternalHeatmapAdapter::propagate(const PropagatorMemory& memory,
                                          const PropagationQuery& query) const {
    return read_heatmap(heatmap_path(memory.tracklet_id, memory.side, query.frame));
}

namespace {

uint32_t read_u32_le(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

void write_u32_le(std::ostream& os, uint32_t v) {
    const unsigned char bytes[4] = {static_cast<unsigned char>(v & 0xff),
                                    static_cast<unsigned char>((v >> 8) & 0xff),
                                    static_cast<unsigned char>((v >> 16) & 0xff),
                                    static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(bytes), 4);
}

}  // namespace

Heatmap read_heatmap(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open heatmap file: " + path.string());
    unsigned char header[12];
    if (!in.read(reinterpret_cast<char*>(header), sizeof header))
        fail(ErrorKind::Parse, "heatmap file truncated: " + path.string());
    if (std::memcmp(header, "HMAP", 4) != 0)
        fail(ErrorKind::Parse, "bad heatmap magic: " + path.string());
    const uint32_t w = read_u32_le(header + 4);
    const uint32_t h = read_u32_le(header + 8);
    if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20))
        fail(ErrorKind::Parse, "bad heatmap dimensions: " + path.string());

    Heatmap map(static_cast<int>(w), static_cast<int>(h));
    std::vector<unsigned char> raw(map.values.size() * 4);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
        fail(ErrorKind::Parse, "heatmap file truncated: " + path.string());
    for (size_t i = 0; i < map.values.size(); ++i) {
        const uint32_t bits = read_u32_le(raw.data() + 4 * i);
        float v;
        std::memcpy(&v, &bits, sizeof v);
        if (std::isnan(v)) fail(ErrorKind::Parse, "heatmap contains NaN: " + path.string());
        map.values[i] = std::clamp(v, 0.0f, 1.0f);
    }
    return map;
}

void write_heatmap(const std::filesystem::path& path, const Heatmap& heatmap) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot create heatmap file: " + path.string());
    out.write("HMAP", 4);
    write_u32_le(out, static_cast<uint32_t>(heatmap.width));
    write_u32_le(out, static_cast<uint32_t>(heatmap.height));
    for (float v : heatmap.values) {
        uint32_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        write_u32_le(out, bits);
    }
    if (!out) fail(ErrorKind::Io, "failed writing heatmap file: " + path.string());
}

}  // namespace trackseg
