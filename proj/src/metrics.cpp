#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "assignment.hpp"
#include "error.hpp"

namespace trackseg {

namespace {

std::vector<double> alpha_grid() {
    std::vector<double> alphas;
    for (int i = 1; i <= 19; ++i) alphas.push_back(0.05 * i);
    return alphas;
}

std::vector<std::pair<int, int>> match_from_iou(const std::vector<std::vector<double>>& iou,
                                                double alpha) {
    const int rows = static_cast<int>(iou.size());
    const int cols = rows > 0 ? static_cast<int>(iou[0].size()) : 0;
    if (rows == 0 || cols == 0) return {};
    CostMatrix costs(rows, cols);
    bool any_allowed = false;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            costs.at(r, c) = -iou[r][c];
            if (iou[r][c] >= alpha)
                any_allowed = true;
            else
                costs.forbid(r, c);
        }
    }
    if (!any_allowed) return {};
    return solve_assignment(costs);
}

struct ClassEval {
    std::vector<double> detection;
    std::vector<double> association;
};

ClassEval evaluate_class(const std::vector<const Tracklet*>& gt, const std::vector<const Tracklet*>& pred,
                         const std::vector<double>& alphas) {
    struct FrameDets {
        std::vector<int> gt_ids, pred_ids;
        std::vector<const BinaryMask*> gt_masks, pred_masks;
        std::vector<std::vector<double>> iou;
    };
    std::map<int, FrameDets> frames;
    std::map<int, int> gt_total, pred_total;

    for (const Tracklet* t : gt) {
        for (const auto& e : t->entries) {
            frames[e.frame].gt_ids.push_back(t->id);
            frames[e.frame].gt_masks.push_back(&e.det.mask);
            gt_total[t->id] += 1;
        }
    }
    for (const Tracklet* t : pred) {
        for (const auto& e : t->entries) {
            frames[e.frame].pred_ids.push_back(t->id);
            frames[e.frame].pred_masks.push_back(&e.det.mask);
            pred_total[t->id] += 1;
        }
    }

    double gt_count = 0.0, pred_count = 0.0;
    for (const auto& [id, c] : gt_total) gt_count += c;
    for (const auto& [id, c] : pred_total) pred_count += c;

    for (auto& [frame, fd] : frames) {
        fd.iou.assign(fd.gt_masks.size(), std::vector<double>(fd.pred_masks.size(), 0.0));
        for (size_t r = 0; r < fd.gt_masks.size(); ++r)
            for (size_t c = 0; c < fd.pred_masks.size(); ++c)
                fd.iou[r][c] = mask_iou(*fd.gt_masks[r], *fd.pred_masks[c]);
    }

    ClassEval out;
    for (double alpha : alphas) {
        std::map<std::pair<int, int>, double> tpa;  // (gt id, pred id) -> shared TP count
        std::vector<std::pair<int, int>> tp_ids;
        for (auto& [frame, fd] : frames) {
            for (const auto& [r, c] : match_from_iou(fd.iou, alpha)) {
                const std::pair<int, int> ids{fd.gt_ids[r], fd.pred_ids[c]};
                tpa[ids] += 1.0;
                tp_ids.push_back(ids);
            }
        }

        const double tp = static_cast<double>(tp_ids.size());
        const double det_a = gt_count + pred_count - tp > 0.0
                                 ? tp / (gt_count + pred_count - tp)
                                 : 1.0;
        double ass_a = 0.0;
        if (!tp_ids.empty()) {
            double sum = 0.0;
            for (const auto& ids : tp_ids) {
                const double shared = tpa[ids];
                sum += shared / (gt_total[ids.first] + pred_total[ids.second] - shared);
            }
            ass_a = sum / tp;
        }
        out.detection.push_back(det_a);
        out.association.push_back(ass_a);
    }
    return out;
}

}  // namespace

std::vector<std::pair<int, int>> match_frame(const std::vector<BinaryMask>& gt_masks,
                                             const std::vector<BinaryMask>& pred_masks, double alpha) {
    std::vector<std::vector<double>> iou(gt_masks.size(), std::vector<double>(pred_masks.size(), 0.0));
    for (size_t r = 0; r < gt_masks.size(); ++r)
        for (size_t c = 0; c < pred_masks.size(); ++c) iou[r][c] = mask_iou(gt_masks[r], pred_masks[c]);
    return match_from_iou(iou, alpha);
}

EvalResult evaluate(const std::vector<Tracklet>& gt_tracks, const std::vector<Tracklet>& pred_tracks) {
    EvalResult result;
    result.alphas = alpha_grid();
    const size_t n_alpha = result.alphas.size();

    if (gt_tracks.empty()) {
        const double value = pred_tracks.empty() ? 1.0 : 0.0;
        result.detection.assign(n_alpha, value);
        result.association.assign(n_alpha, value);
        result.combined.assign(n_alpha, value);
        result.detection_mean = result.association_mean = result.combined_mean = value;
        return result;
    }

    std::set<int> classes;
    for (const auto& t : gt_tracks) classes.insert(dominant_class(t));

    std::vector<ClassEval> per_class;
    for (int cls : classes) {
        std::vector<const Tracklet*> gt, pred;
        for (const auto& t : gt_tracks)
            if (dominant_class(t) == cls) gt.push_back(&t);
        for (const auto& t : pred_tracks)
            if (dominant_class(t) == cls) pred.push_back(&t);
        per_class.push_back(evaluate_class(gt, pred, result.alphas));
    }

    for (size_t i = 0; i < n_alpha; ++i) {
        double det = 0.0, ass = 0.0;
        for (const auto& ce : per_class) {
            det += ce.detection[i];
            ass += ce.association[i];
        }
        det /= static_cast<double>(per_class.size());
        ass /= static_cast<double>(per_class.size());
        result.detection.push_back(det);
        result.association.push_back(ass);
        result.combined.push_back(std::sqrt(det * ass));
    }

    for (size_t i = 0; i < n_alpha; ++i) {
        result.detection_mean += result.detection[i];
        result.association_mean += result.association[i];
        result.combined_mean += result.combined[i];
    }
    result.detection_mean /= static_cast<double>(n_alpha);
    result.association_mean /= static_cast<double>(n_alpha);
    result.combined_mean /= static_cast<double>(n_alpha);
    return result;
}

std::string report_plain_text(const EvalResult& result) {
    std::string out;
    char buf[160];
    out += "alpha     DetA      AssA      HOTA\n";
    for (size_t i = 0; i < result.alphas.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.2f  %.6f  %.6f  %.6f\n", result.alphas[i],
                      result.detection[i], result.association[i], result.combined[i]);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "mean  %.6f  %.6f  %.6f\n", result.detection_mean,
                  result.association_mean, result.combined_mean);
    out += buf;
    return out;
}

std::string report_machine_text(const EvalResult& result) {
    std::string out;
    char buf[96];
    std::snprintf(buf, sizeof buf, "HOTA = %.6f\n", result.combined_mean);
    out += buf;
    std::snprintf(buf, sizeof buf, "DetA = %.6f\n", result.detection_mean);
    out += buf;
    std::snprintf(buf, sizeof buf, "AssA = %.6f\n", result.association_mean);
    out += buf;
    for (size_t i = 0; i < result.alphas.size(); ++i) {
        std::snprintf(buf, sizeof buf, "HOTA_%.2f = %.6f\n", result.alphas[i], result.combined[i]);
        out += buf;
        std::snprintf(buf, sizeof buf, "DetA_%.2f = %.6f\n", result.alphas[i], result.detection[i]);
        out += buf;
        std::snprintf(buf, sizeof buf, "AssA_%.2f = %.6f\n", result.alphas[i], result.association[i]);
        out += buf;
    }
    return out;
}

}  // namespace trackseg
