#pragma once

#include <vector>

#include "image.hpp"
#include "mask.hpp"

namespace trackseg {

// Dense per-pixel displacement from the previous frame to the next one.
struct FlowField {
    int width = 0;
    int height = 0;
    std::vector<float> dx;
    std::vector<float> dy;

    FlowField() = default;
    FlowField(int w, int h)
        : width(w), height(h), dx(static_cast<size_t>(w) * h, 0.0f), dy(static_cast<size_t>(w) * h, 0.0f) {}
};

struct FlowParams {
    int levels = 3;  // pyramid octaves, >= 1
    int window = 7;  // odd patch size, also the per-level search radius
};

// Coarse-to-fine block matching: a Gaussian pyramid of `levels` octaves, a
// per-pixel integer search of +-window around the upsampled coarser estimate
// minimizing window x window SAD (border replicated), and a final 3x3 box
// smoothing of the field.
FlowField estimate_flow(const GrayFrame& prev, const GrayFrame& next, const FlowParams& params);

// Forward warp: every foreground pixel moves to its rounded destination,
// destinations off the canvas are dropped, collisions collapse to one pixel.
BinaryMask warp_mask(const BinaryMask& mask, const FlowField& flow);

}  // namespace trackseg
