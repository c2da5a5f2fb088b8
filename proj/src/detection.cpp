#include "detection.hpp"

#include <algorithm>
#include <map>

#include "error.hpp"

namespace trackseg {

Detection make_detection(int frame, BinaryMask mask, std::vector<ClassScore> labels) {
    if (labels.empty()) fail(ErrorKind::InvalidArgument, "detection: label set must be non-empty");
    Detection det;
    det.frame = frame;
    det.mask = std::move(mask);
    det.labels = std::move(labels);
    det.score = 0.0;
    for (const auto& l : det.labels) det.score = std::max(det.score, l.score);
    return det;
}

ClassScore top_label(const Detection& det) {
    if (det.labels.empty()) fail(ErrorKind::InvalidArgument, "detection: label set must be non-empty");
    ClassScore best = det.labels.front();
    for (const auto& l : det.labels) {
        if (l.score > best.score || (l.score == best.score && l.class_id < best.class_id)) best = l;
    }
    return best;
}

double Tracklet::max_score() const {
    double best = 0.0;
    for (const auto& e : entries) best = std::max(best, e.det.score);
    return best;
}

int dominant_class(const Tracklet& tracklet) {
    if (tracklet.entries.empty())
        fail(ErrorKind::InvalidArgument, "dominant_class: tracklet has no entries");
    std::map<int, std::pair<int, double>> votes;  // class -> (count, summed score)
    for (const auto& e : tracklet.entries) {
        const ClassScore label = top_label(e.det);
        auto& v = votes[label.class_id];
        v.first += 1;
        v.second += label.score;
    }
    int best_class = votes.begin()->first;
    auto best = votes.begin()->second;
    for (const auto& [cls, v] : votes) {
        if (v.first > best.first || (v.first == best.first && v.second > best.second)) {
            best_class = cls;
            best = v;
        }
    }
    return best_class;
}

}  // namespace trackseg
