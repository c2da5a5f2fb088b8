#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "image.hpp"
#include "mask.hpp"

namespace trackseg {

// Soft per-pixel object response in [0, 1].
struct Heatmap {
    int width = 0;
    int height = 0;
    std::vector<float> values;

    Heatmap() = default;
    Heatmap(int w, int h) : width(w), height(h), values(static_cast<size_t>(w) * h, 0.0f) {}
};

enum class ReferenceSide { Head, Tail };

const char* reference_side_name(ReferenceSide side);

struct Reference {
    const GrayFrame* image = nullptr;
    BinaryMask mask;
    int frame = 0;
};

// One to two reference (frame, mask) pairs taken from one end of a tracklet.
struct PropagatorMemory {
    int tracklet_id = 0;
    ReferenceSide side = ReferenceSide::Tail;
    std::vector<Reference> references;
};

struct PropagationQuery {
    const GrayFrame* image = nullptr;
    int frame = 0;
};

class MaskPropagator {
public:
    virtual ~MaskPropagator() = default;

    // Answers where the remembered object is in the query frame. Must be safe
    // for concurrent read-only use. Throws on failure; the caller skips the
    // affected pair.
    virtual Heatmap propagate(const PropagatorMemory& memory, const PropagationQuery& query) const = 0;
};

// Estimates one translation per reference by maximizing normalized
// cross-correlation of the intensities under the reference mask, shifts the
// mask there, averages over references, and softens with a Gaussian blur.
class GeometricPropagator : public MaskPropagator {
public:
    explicit GeometricPropagator(int search_radius = 32, double blur_sigma = 2.0);

    Heatmap propagate(const PropagatorMemory& memory, const PropagationQuery& query) const override;

private:
    int search_radius_;
    double blur_sigma_;
};

// Loads precomputed heatmaps from `root/video/{tracklet}_{side}_{frame}.hmap`,
// so an offline propagation model can be plugged in file by file.
class ExternalHeatmapAdapter : public MaskPropagator {
public:
    ExternalHeatmapAdapter(std::filesystem::path root, std::string video_name);

    Heatmap propagate(const PropagatorMemory& memory, const PropagationQuery& query) const override;

    std::filesystem::path heatmap_path(int tracklet_id, ReferenceSide side, int query_frame) const;

private:
    std::filesystem::path root_;
    std::string video_;
};

// Raster file: "HMAP" magic, u32 width, u32 height, then width*height
// little-endian f32 values row-major. Values are clamped to [0, 1] on load.
Heatmap read_heatmap(const std::filesystem::path& path);
void write_heatmap(const std::filesystem::path& path, const Heatmap& heatmap);

}  // namespace trackseg
