#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "image.hpp"

namespace trackseg {

// Reads an 8-bit grayscale or RGB image (PGM/PPM binary or ASCII, or a
// non-interlaced 8-bit PNG) as intensities in [0, 1]; color inputs are
// converted with Rec.601 luma weights.
GrayFrame read_gray_image(const std::filesystem::path& path);

void write_pgm(const std::filesystem::path& path, const GrayFrame& frame);

// Frame files (*.pgm *.ppm *.pnm *.png) in natural filename order: digit runs
// compare numerically, everything else byte-wise.
std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir);

bool natural_less(const std::string& a, const std::string& b);

}  // namespace trackseg
