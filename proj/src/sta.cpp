#include "sta.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <thread>

#include "assignment.hpp"
#include "error.hpp"

namespace trackseg {

std::vector<Detection> filter_detections(const std::vector<Detection>& dets, double score_min,
                                         double area_min) {
    if (score_min < 0.0 || score_min > 1.0)
        fail(ErrorKind::InvalidArgument, "filter_detections: score threshold outside [0,1]");
    if (area_min < 0.0) fail(ErrorKind::InvalidArgument, "filter_detections: area threshold negative");
    std::vector<Detection> out;
    out.reserve(dets.size());
    for (const auto& det : dets) {
        if (det.score > score_min && static_cast<double>(mask_area(det.mask)) > area_min)
            out.push_back(det);
    }
    return out;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

std::vector<Detection> merge_multiclass(const std::vector<Detection>& frame_dets, double iou_min) {
    if (frame_dets.size() < 2) return frame_dets;
    const int frame = frame_dets.front().frame;
    for (const auto& det : frame_dets)
        if (det.frame != frame)
            fail(ErrorKind::InvalidArgument, "merge_multiclass: detections span multiple frames");

    const size_t n = frame_dets.size();
    UnionFind uf(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (mask_iou(frame_dets[i].mask, frame_dets[j].mask) > iou_min)
                uf.unite(static_cast<int>(i), static_cast<int>(j));

    std::map<int, std::vector<size_t>> components;  // root -> member indices (ascending)
    for (size_t i = 0; i < n; ++i) components[uf.find(static_cast<int>(i))].push_back(i);

    std::vector<Detection> out;
    out.reserve(components.size());
    for (const auto& [root, members] : components) {
        size_t geometry = members.front();
        std::map<int, double> class_scores;
        for (size_t m : members) {
            if (frame_dets[m].score > frame_dets[geometry].score) geometry = m;
            for (const auto& l : frame_dets[m].labels) {
                auto it = class_scores.find(l.class_id);
                if (it == class_scores.end() || l.score > it->second) class_scores[l.class_id] = l.score;
            }
        }
        std::vector<ClassScore> labels;
        labels.reserve(class_scores.size());
        for (const auto& [cls, score] : class_scores) labels.push_back({cls, score});
        out.push_back(make_detection(frame, frame_dets[geometry].mask, std::move(labels)));
    }
    return out;
}

AssociationResult associate_frames(const std::vector<BinaryMask>& prev_masks, const FlowField& flow,
                                   const std::vector<Detection>& next_dets, double iou_min) {
    AssociationResult result;
    if (prev_masks.empty() || next_dets.empty()) {
        result.unmatched_next.resize(next_dets.size());
        std::iota(result.unmatched_next.begin(), result.unmatched_next.end(), 0);
        return result;
    }

    std::vector<BinaryMask> warped;
    warped.reserve(prev_masks.size());
    for (const auto& m : prev_masks) warped.push_back(warp_mask(m, flow));

    CostMatrix costs(static_cast<int>(prev_masks.size()), static_cast<int>(next_dets.size()));
    for (int i = 0; i < costs.rows; ++i)
        for (int j = 0; j < costs.cols; ++j)
            costs.at(i, j) = -mask_iou(warped[i], next_dets[j].mask);

    std::vector<char> next_taken(next_dets.size(), 0);
    for (const auto& [i, j] : solve_assignment(costs)) {
        const double iou = -costs.at(i, j);
        if (iou > iou_min) {
            result.matches.push_back({i, j, iou});
            next_taken[j] = 1;
        }
    }
    for (size_t j = 0; j < next_dets.size(); ++j)
        if (!next_taken[j]) result.unmatched_next.push_back(static_cast<int>(j));
    return result;
}

namespace {

std::vector<FlowField> compute_flows(const std::vector<GrayFrame>& frames, const FlowParams& params,
                                     int threads) {
    if (frames.size() < 2) return {};
    const size_t n = frames.size() - 1;
    std::vector<FlowField> flows(n);
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));

    if (workers == 1) {
        for (size_t i = 0; i < n; ++i) flows[i] = estimate_flow(frames[i], frames[i + 1], params);
        return flows;
    }

    std::atomic<size_t> cursor{0};
    std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (;;) {
                    const size_t i = cursor.fetch_add(1);
                    if (i >= n) break;
                    flows[i] = estimate_flow(frames[i], frames[i + 1], params);
                }
            } catch (...) {
                errors[static_cast<size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return flows;
}

}  // namespace

std::vector<Tracklet> build_tracklets(const std::vector<GrayFrame>& frames,
                                      const std::vector<std::vector<Detection>>& dets_per_frame,
                                      const StaParams& params) {
    if (frames.size() != dets_per_frame.size())
        fail(ErrorKind::InvalidArgument, "build_tracklets: frame and detection counts differ");
    if (frames.empty()) return {};

    const std::vector<FlowField> flows = compute_flows(frames, params.flow, params.threads);

    std::vector<Tracklet> tracklets;
    int next_id = 1;
    auto start_tracklet = [&](int frame, const Detection& det) {
        Tracklet t;
        t.id = next_id++;
        t.entries.push_back({frame, det});
        tracklets.push_back(std::move(t));
        return static_cast<int>(tracklets.size()) - 1;
    };

    std::vector<int> active;  // indices of tracklets whose last entry is the current frame
    for (const auto& det : dets_per_frame[0]) active.push_back(start_tracklet(0, det));

    for (size_t t = 0; t + 1 < frames.size(); ++t) {
        const auto& next_dets = dets_per_frame[t + 1];
        std::vector<int> new_active;
        if (active.empty() || next_dets.empty()) {
            for (const auto& det : next_dets)
                new_active.push_back(start_tracklet(static_cast<int>(t) + 1, det));
        } else {
            std::vector<BinaryMask> prev_masks;
            prev_masks.reserve(active.size());
            for (int idx : active) prev_masks.push_back(tracklets[idx].last_mask());
            const AssociationResult assoc =
                associate_frames(prev_masks, flows[t], next_dets, params.match_iou_min);
            for (const auto& m : assoc.matches) {
                const int idx = active[m.prev_index];
                tracklets[idx].entries.push_back({static_cast<int>(t) + 1, next_dets[m.next_index]});
                new_active.push_back(idx);
            }
            for (int j : assoc.unmatched_next)
                new_active.push_back(start_tracklet(static_cast<int>(t) + 1, next_dets[j]));
        }
        active = std::move(new_active);
    }

    // per-frame non-overlap pass, most confident mask first
    for (size_t f = 0; f < frames.size(); ++f) {
        std::vector<std::pair<size_t, size_t>> holders;  // (tracklet, entry)
        FrameMaskSet fs;
        fs.frame = static_cast<int>(f);
        for (size_t i = 0; i < tracklets.size(); ++i) {
            const auto& entries = tracklets[i].entries;
            for (size_t e = 0; e < entries.size(); ++e) {
                if (entries[e].frame == static_cast<int>(f)) {
                    holders.emplace_back(i, e);
                    fs.masks.push_back({entries[e].det.mask, entries[e].det.score});
                }
            }
        }
        if (holders.size() < 2) continue;
        const FrameMaskSet resolved = resolve_overlaps(fs);
        for (size_t k = 0; k < holders.size(); ++k)
            tracklets[holders[k].first].entries[holders[k].second].det.mask = resolved.masks[k].mask;
    }

    std::vector<Tracklet> out;
    for (auto& t : tracklets) {
        std::erase_if(t.entries, [](const TrackletEntry& e) { return mask_empty(e.det.mask); });
        if (t.entries.size() >= 2) out.push_back(std::move(t));
    }
    return out;
}

}  // namespace trackseg
