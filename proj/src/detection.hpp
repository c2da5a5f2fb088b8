#pragma once

#include <vector>

#include "mask.hpp"

namespace trackseg {

struct ClassScore {
    int class_id = 0;
    double score = 0.0;
};

// One frame's mask hypothesis. `score` is the maximum over labels and is
// maintained by make_detection / merge_multiclass.
struct Detection {
    int frame = 0;
    BinaryMask mask;
    std::vector<ClassScore> labels;
    double score = 0.0;
};

Detection make_detection(int frame, BinaryMask mask, std::vector<ClassScore> labels);

// The label this detection votes for: highest score, ties to the lower id.
ClassScore top_label(const Detection& det);

struct TrackletEntry {
    int frame = 0;
    Detection det;
};

// Frames strictly increasing, at most one entry per frame.
struct Tracklet {
    int id = 0;
    std::vector<TrackletEntry> entries;

    int first_frame() const { return entries.front().frame; }
    int last_frame() const { return entries.back().frame; }
    const BinaryMask& first_mask() const { return entries.front().det.mask; }
    const BinaryMask& last_mask() const { return entries.back().det.mask; }
    double max_score() const;
    size_t length() const { return entries.size(); }
};

// The class occurring in the most entries, counting each entry's top label;
// ties broken by the higher summed score, then the lower class id.
int dominant_class(const Tracklet& tracklet);

}  // namespace trackseg
