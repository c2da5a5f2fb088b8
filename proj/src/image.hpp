#pragma once

#include <cstdint>
#include <vector>

namespace trackseg {

// Grayscale intensity raster, row-major, values in [0, 1].
struct GrayFrame {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    GrayFrame() = default;
    GrayFrame(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h, 0.0f) {}

    float at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    float& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
};

// Rec.601 luma weights.
GrayFrame rgb_to_gray(int width, int height, const std::vector<uint8_t>& rgb_interleaved);

}  // namespace trackseg
