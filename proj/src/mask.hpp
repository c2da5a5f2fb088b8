#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace trackseg {

// Dense boolean raster, row-major.
struct BoolGrid {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> cells;

    BoolGrid() = default;
    BoolGrid(int w, int h) : width(w), height(h), cells(static_cast<size_t>(w) * h, 0) {}

    bool at(int x, int y) const { return cells[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { cells[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
};

// Run-length encoded binary mask in column-major pixel order. Runs alternate
// background/foreground and start with a background run (0 when the first
// pixel is foreground); no other run may be zero. This canonical form is
// unique for a given raster.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<uint32_t> counts;
};

struct ScoredMask {
    BinaryMask mask;
    double priority = 0.0;
};

struct FrameMaskSet {
    int frame = 0;
    std::vector<ScoredMask> masks;
};

// Throws ErrorKind::Parse when the counts sequence is not canonical for the
// stated canvas.
void validate_mask(const BinaryMask& mask);

BinaryMask rle_encode(const BoolGrid& grid);
BoolGrid rle_decode(const BinaryMask& mask);

// Text codec: counts with every value from index 2 onward replaced by its
// difference from the count two positions earlier, each value serialized
// low-bits-first in 5-bit groups, one group per character (bit 5 set while
// more groups follow, char = group + 48).
std::string compressed_rle_encode(const BinaryMask& mask);
BinaryMask compressed_rle_decode(const std::string& text, int height, int width);

uint64_t mask_area(const BinaryMask& mask);
uint64_t mask_intersection_area(const BinaryMask& a, const BinaryMask& b);
double mask_iou(const BinaryMask& a, const BinaryMask& b);

// Mean (x, y) of the foreground pixels. Throws on an empty mask.
std::pair<double, double> mask_center(const BinaryMask& mask);

BinaryMask empty_mask(int width, int height);
bool mask_empty(const BinaryMask& mask);
bool mask_equal(const BinaryMask& a, const BinaryMask& b);

// Assigns every contested pixel to the highest-priority mask containing it
// (ties broken by lower list index). Output masks are pairwise disjoint and
// keep their input positions; masks may come back empty.
FrameMaskSet resolve_overlaps(const FrameMaskSet& input);

}  // namespace trackseg
