#pragma once

#include <vector>

#include "detection.hpp"
#include "flow.hpp"

namespace trackseg {

// Keeps detections with score > score_min and mask area > area_min, in order.
std::vector<Detection> filter_detections(const std::vector<Detection>& dets, double score_min,
                                         double area_min);

// Collapses same-frame detections whose mutual mask IoU exceeds iou_min into
// multi-class hypotheses: connected components of the overlap graph, geometry
// of the highest-scored member, union of label sets (max score per class).
std::vector<Detection> merge_multiclass(const std::vector<Detection>& frame_dets, double iou_min);

struct FrameMatch {
    int prev_index = 0;
    int next_index = 0;
    double iou = 0.0;  // warped-mask IoU
};

struct AssociationResult {
    std::vector<FrameMatch> matches;
    std::vector<int> unmatched_next;
};

// Warps the previous masks along the flow, matches them to the next frame's
// detections by minimum total negative IoU, and keeps pairs above iou_min.
AssociationResult associate_frames(const std::vector<BinaryMask>& prev_masks, const FlowField& flow,
                                   const std::vector<Detection>& next_dets, double iou_min);

struct StaParams {
    double match_iou_min = 0.15;
    FlowParams flow;
    int threads = 0;  // 0 = hardware concurrency
};

// Links pre-filtered, class-merged detections of consecutive frames into
// tracklets, resolves per-frame overlaps by detection score, and drops
// single-entry tracklets. Tracklet ids are assigned in creation order (1-based).
std::vector<Tracklet> build_tracklets(const std::vector<GrayFrame>& frames,
                                      const std::vector<std::vector<Detection>>& dets_per_frame,
                                      const StaParams& params);

}  // namespace trackseg
