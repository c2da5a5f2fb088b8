#pragma once

#include <vector>

#include "detection.hpp"
#include "propagator.hpp"

namespace trackseg {

struct VideoMeta {
    double fps = 30.0;
    int height = 0;
    int width = 0;
};

// Thresholds gating which tracklet pairs are worth a similarity evaluation.
struct PairGates {
    double max_gap_seconds = 1.5;
    double max_center_dist = 0.2;
    int max_frame_overlap = 1;
};

// Orders a pair so the earlier-starting tracklet comes first (ties by id).
std::pair<const Tracklet*, const Tracklet*> order_pair(const Tracklet& a, const Tracklet& b);

// Seconds between the first tracklet's last mask and the second's first mask.
double temporal_cost(const Tracklet& first, const Tracklet& second, const VideoMeta& meta);

// L1 distance of the boundary mask centroids scaled by 2/(H+W).
double spatial_cost(const Tracklet& first, const Tracklet& second, const VideoMeta& meta);

// Number of frames where both tracklets have an entry.
int overlap_cost(const Tracklet& a, const Tracklet& b);

// Same dominant class and all three costs within their gates (inclusive).
bool is_admissible(const Tracklet& a, const Tracklet& b, const PairGates& gates,
                   const VideoMeta& meta);

// 1-based entry indices of the boundary reference mask and the farther one
// (offset back from / forward of the boundary); falls back to the smaller
// offset, then to the boundary entry alone.
std::vector<int> select_reference_indices(const Tracklet& tracklet, ReferenceSide side, int offset,
                                          int fallback_offset);

// Flat-vector cosine between a heatmap and a 0/1 mask; 0 when either is zero.
double cosine_similarity(const Heatmap& heatmap, const BinaryMask& mask);

// Propagates each tracklet's references to the other's reference frames and
// averages the cosine similarity of the produced heatmaps against the masks
// found there (up to four comparisons). `first` must appear first.
double tracklet_similarity(const Tracklet& first, const Tracklet& second,
                           const std::vector<GrayFrame>& frames, const MaskPropagator& propagator,
                           int ref_offset, int ref_fallback);

struct GltaParams {
    double merge_similarity_min = 0.30;
    PairGates gates;
    int ref_offset = 5;
    int ref_offset_fallback = 2;
    int threads = 0;  // 0 = hardware concurrency
};

// Scores every admissible pair once, then greedily merges the best-scoring
// pairs above the threshold while re-checking the frame-overlap gate on the
// merged frame sets. A tracklet can be merged repeatedly. On a frame
// collision the higher-score entry survives.
std::vector<Tracklet> greedy_merge(const std::vector<Tracklet>& tracklets,
                                   const std::vector<GrayFrame>& frames, const VideoMeta& meta,
                                   const MaskPropagator& propagator, const GltaParams& params);

// Drops tracks whose best detection score is below the floor.
std::vector<Tracklet> prune_low_confidence(std::vector<Tracklet> tracks, double score_floor);

}  // namespace trackseg
