#include "mask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"

namespace trackseg {

void validate_mask(const BinaryMask& mask) {
    if (mask.width <= 0 || mask.height <= 0)
        fail(ErrorKind::InvalidArgument, "mask: canvas dimensions must be positive");
    if (mask.counts.empty())
        fail(ErrorKind::Parse, "mask: empty counts sequence");
    uint64_t sum = 0;
    for (size_t i = 0; i < mask.counts.size(); ++i) {
        if (i > 0 && mask.counts[i] == 0)
            fail(ErrorKind::Parse, "mask: zero-length run at index " + std::to_string(i));
        sum += mask.counts[i];
    }
    const uint64_t total = static_cast<uint64_t>(mask.width) * mask.height;
    if (sum != total)
        fail(ErrorKind::Parse, "mask: counts sum " + std::to_string(sum) + " != " +
                                   std::to_string(total) + " pixels");
}

BinaryMask rle_encode(const BoolGrid& grid) {
    if (grid.width <= 0 || grid.height <= 0)
        fail(ErrorKind::InvalidArgument, "rle_encode: grid dimensions must be positive");
    if (grid.cells.size() != static_cast<size_t>(grid.width) * grid.height)
        fail(ErrorKind::InvalidArgument, "rle_encode: cell buffer does not match dimensions");

    BinaryMask out;
    out.width = grid.width;
    out.height = grid.height;
    bool current = false;
    uint32_t run = 0;
    for (int x = 0; x < grid.width; ++x) {
        for (int y = 0; y < grid.height; ++y) {
            const bool v = grid.at(x, y);
            if (v == current) {
                ++run;
            } else {
                out.counts.push_back(run);
                current = v;
                run = 1;
            }
        }
    }
    out.counts.push_back(run);
    return out;
}

BoolGrid rle_decode(const BinaryMask& mask) {
    validate_mask(mask);
    BoolGrid grid(mask.width, mask.height);
    uint64_t pos = 0;
    bool value = false;
    for (uint32_t count : mask.counts) {
        if (value) {
            for (uint64_t p = pos; p < pos + count; ++p) {
                const int x = static_cast<int>(p / mask.height);
                const int y = static_cast<int>(p % mask.height);
                grid.set(x, y, true);
            }
        }
        pos += count;
        value = !value;
    }
    return grid;
}

std::string compressed_rle_encode(const BinaryMask& mask) {
    validate_mask(mask);
    std::string out;
    const auto& counts = mask.counts;
    for (size_t i = 0; i < counts.size(); ++i) {
        long long x = static_cast<long long>(counts[i]);
        if (i >= 2) x -= static_cast<long long>(counts[i - 2]);
        bool more = true;
        while (more) {
            int group = static_cast<int>(x & 0x1f);
            x >>= 5;
            more = (group & 0x10) ? (x != -1) : (x != 0);
            if (more) group |= 0x20;
            out.push_back(static_cast<char>(group + 48));
        }
    }
    return out;
}

BinaryMask compressed_rle_decode(const std::string& text, int height, int width) {
    if (width <= 0 || height <= 0)
        fail(ErrorKind::InvalidArgument, "compressed_rle_decode: canvas dimensions must be positive");

    std::vector<uint32_t> counts;
    size_t p = 0;
    while (p < text.size()) {
        long long x = 0;
        int k = 0;
        bool more = true;
        while (more) {
            if (p >= text.size())
                fail(ErrorKind::Parse, "compressed_rle_decode: truncated value at end of string");
            const int c = static_cast<unsigned char>(text[p]) - 48;
            if (c < 0 || c > 63)
                fail(ErrorKind::Parse, "compressed_rle_decode: character out of range at position " +
                                           std::to_string(p));
            if (5 * k >= 60)
                fail(ErrorKind::Parse, "compressed_rle_decode: run length overflow at position " +
                                           std::to_string(p));
            x |= static_cast<long long>(c & 0x1f) << (5 * k);
            more = (c & 0x20) != 0;
            ++p;
            ++k;
            if (!more && (c & 0x10)) x |= ~((1LL << (5 * k)) - 1);
        }
        if (counts.size() >= 2) x += static_cast<long long>(counts[counts.size() - 2]);
        if (x < 0 || x > 0xffffffffLL)
            fail(ErrorKind::Parse, "compressed_rle_decode: run length out of range");
        counts.push_back(static_cast<uint32_t>(x));
    }

    BinaryMask mask{width, height, std::move(counts)};
    validate_mask(mask);
    return mask;
}

uint64_t mask_area(const BinaryMask& mask) {
    uint64_t area = 0;
    for (size_t i = 1; i < mask.counts.size(); i += 2) area += mask.counts[i];
    return area;
}

uint64_t mask_intersection_area(const BinaryMask& a, const BinaryMask& b) {
    if (a.width != b.width || a.height != b.height)
        fail(ErrorKind::InvalidArgument, "mask_intersection_area: canvas mismatch");
    validate_mask(a);
    validate_mask(b);

    uint64_t inter = 0;
    uint64_t remaining = static_cast<uint64_t>(a.width) * a.height;
    size_t ia = 0, ib = 0;
    uint64_t ra = a.counts[0], rb = b.counts[0];
    bool va = false, vb = false;
    while (remaining > 0) {
        while (ra == 0) {
            ra = a.counts[++ia];
            va = !va;
        }
        while (rb == 0) {
            rb = b.counts[++ib];
            vb = !vb;
        }
        const uint64_t step = std::min(ra, rb);
        if (va && vb) inter += step;
        ra -= step;
        rb -= step;
        remaining -= step;
    }
    return inter;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
    const uint64_t inter = mask_intersection_area(a, b);
    const uint64_t uni = mask_area(a) + mask_area(b) - inter;
    if (uni == 0) return 0.0;  // two empty masks never match
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::pair<double, double> mask_center(const BinaryMask& mask) {
    validate_mask(mask);
    uint64_t pos = 0;
    uint64_t n = 0;
    double sum_x = 0.0, sum_y = 0.0;
    bool value = false;
    for (uint32_t count : mask.counts) {
        if (value) {
            for (uint64_t p = pos; p < pos + count; ++p) {
                sum_x += static_cast<double>(p / mask.height);
                sum_y += static_cast<double>(p % mask.height);
            }
            n += count;
        }
        pos += count;
        value = !value;
    }
    if (n == 0) fail(ErrorKind::InvalidArgument, "mask_center: empty mask has no center");
    return {sum_x / static_cast<double>(n), sum_y / static_cast<double>(n)};
}

BinaryMask empty_mask(int width, int height) {
    if (width <= 0 || height <= 0)
        fail(ErrorKind::InvalidArgument, "empty_mask: canvas dimensions must be positive");
    return BinaryMask{width, height, {static_cast<uint32_t>(static_cast<uint64_t>(width) * height)}};
}

bool mask_empty(const BinaryMask& mask) { return mask_area(mask) == 0; }

bool mask_equal(const BinaryMask& a, const BinaryMask& b) {
    return a.width == b.width && a.height == b.height && a.counts == b.counts;
}

FrameMaskSet resolve_overlaps(const FrameMaskSet& input) {
    if (input.masks.empty()) return input;
    const int w = input.masks[0].mask.width;
    const int h = input.masks[0].mask.height;
    for (const auto& sm : input.masks) {
        if (sm.mask.width != w || sm.mask.height != h)
            fail(ErrorKind::InvalidArgument, "resolve_overlaps: canvas mismatch");
    }

    std::vector<size_t> order(input.masks.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t lhs, size_t rhs) {
        return input.masks[lhs].priority > input.masks[rhs].priority;
    });

    FrameMaskSet out = input;
    std::vector<uint8_t> claimed(static_cast<size_t>(w) * h, 0);
    for (size_t idx : order) {
        BoolGrid grid = rle_decode(input.masks[idx].mask);
        for (size_t p = 0; p < grid.cells.size(); ++p) {
            if (!grid.cells[p]) continue;
            if (claimed[p])
                grid.cells[p] = 0;
            else
                claimed[p] = 1;
        }
        out.masks[idx].mask = rle_encode(grid);
    }
    return out;
}

}  // namespace trackseg
