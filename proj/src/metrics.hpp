#pragma once

#include <string>
#include <vector>

#include "detection.hpp"

namespace trackseg {

// Detection/association/combined accuracy per IoU threshold alpha plus their
// means over alpha. combined[i] == sqrt(detection[i] * association[i]).
struct EvalResult {
    std::vector<double> alphas;
    std::vector<double> detection;    // DetA per alpha
    std::vector<double> association;  // AssA per alpha
    std::vector<double> combined;     // HOTA per alpha

    double detection_mean = 0.0;
    double association_mean = 0.0;
    double combined_mean = 0.0;
};

// Hungarian matching maximizing summed IoU among pairs with IoU >= alpha.
// Returns (gt index, pred index) true-positive pairs.
std::vector<std::pair<int, int>> match_frame(const std::vector<BinaryMask>& gt_masks,
                                             const std::vector<BinaryMask>& pred_masks, double alpha);

// Evaluates predicted tracks against ground truth per class present in the
// ground truth, macro-averaged; alphas run 0.05..0.95 in steps of 0.05.
EvalResult evaluate(const std::vector<Tracklet>& gt_tracks, const std::vector<Tracklet>& pred_tracks);

std::string report_plain_text(const EvalResult& result);
std::string report_machine_text(const EvalResult& result);

}  // namespace trackseg
