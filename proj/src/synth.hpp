#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "detection.hpp"
#include "glta.hpp"
#include "image.hpp"

namespace trackseg {

// Deterministic generator; identical across platforms, unlike the standard
// library distributions.
struct SplitMix64 {
    uint64_t state = 0;

    uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double next_gaussian() {
        // Box-Muller, one value per draw
        const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }
};

enum class ShapeKind { Rectangle, Disk };

struct Waypoint {
    int frame = 0;
    double x = 0.0;
    double y = 0.0;
};

struct ObjectSpec {
    ShapeKind shape = ShapeKind::Rectangle;
    int width = 0, height = 0;  // rectangle
    int radius = 0;             // disk
    uint64_t texture_seed = 0;
    int class_id = 0;
    std::vector<Waypoint> waypoints;  // frame-ascending, positions are centers
};

struct OccluderSpec {
    int x = 0, y = 0, width = 0, height = 0;
    uint64_t texture_seed = 0;
};

struct FragmentGap {
    int object_index = 0;
    int first_frame = 0;
    int last_frame = 0;  // inclusive
};

struct SceneSpec {
    int width = 256;
    int height = 256;
    double fps = 30.0;
    int frame_count = 0;
    uint64_t seed = 0;
    std::vector<ObjectSpec> objects;  // earlier objects are nearer
    std::vector<OccluderSpec> occluders;
    double dropout = 0.0;
    double score_noise = 0.0;
    std::vector<FragmentGap> gaps;
};

SceneSpec parse_scene_spec(std::istream& in, const std::string& origin);
SceneSpec load_scene_spec(const std::string& path);

struct RenderedScene {
    std::vector<GrayFrame> frames;
    std::vector<Tracklet> gt_tracks;                  // one per object with visible entries
    std::vector<std::vector<Detection>> detections;   // per frame
    VideoMeta meta;
};

// Ground-truth masks are exact and pairwise disjoint (nearer objects and
// occluders win); detections are ground-truth masks minus dropouts and
// forced gaps, with scores clamp(1 - |noise|, 0, 1).
RenderedScene render(const SceneSpec& spec);

}  // namespace trackseg
