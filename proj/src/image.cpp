#include "image.hpp"

#include "error.hpp"

namespace trackseg {

GrayFrame rgb_to_gray(int width, int height, const std::vector<uint8_t>& rgb_interleaved) {
    if (width <= 0 || height <= 0)
        fail(ErrorKind::InvalidArgument, "rgb_to_gray: dimensions must be positive");
    if (rgb_interleaved.size() != static_cast<size_t>(width) * height * 3)
        fail(ErrorKind::InvalidArgument, "rgb_to_gray: buffer does not match dimensions");
    GrayFrame out(width, height);
    for (size_t p = 0; p < out.data.size(); ++p) {
        const float r = rgb_interleaved[3 * p + 0] / 255.0f;
        const float g = rgb_interleaved[3 * p + 1] / 255.0f;
        const float b = rgb_interleaved[3 * p + 2] / 255.0f;
        out.data[p] = 0.299f * r + 0.587f * g + 0.114f * b;
    }
    return out;
}

}  // namespace trackseg
