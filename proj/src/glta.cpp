#include "glta.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <thread>

#include "error.hpp"

namespace trackseg {

std::pair<const Tracklet*, const Tracklet*> order_pair(const Tracklet& a, const Tracklet& b) {
    const auto key_a = std::make_pair(a.first_frame(), a.id);
    const auto key_b = std::make_pair(b.first_frame(), b.id);
    if (key_b < key_a) return {&b, &a};
    return {&a, &b};
}

double temporal_cost(const Tracklet& first, const Tracklet& second, const VideoMeta& meta) {
    if (meta.fps <= 0.0) fail(ErrorKind::InvalidArgument, "temporal_cost: fps must be positive");
    return std::abs(first.last_frame() - second.first_frame()) / meta.fps;
}

double spatial_cost(const Tracklet& first, const Tracklet& second, const VideoMeta& meta) {
    if (meta.height <= 0 || meta.width <= 0)
        fail(ErrorKind::InvalidArgument, "spatial_cost: canvas dimensions must be positive");
    const auto [ax, ay] = mask_center(first.last_mask());
    const auto [bx, by] = mask_center(second.first_mask());
    const double l1 = std::abs(ax - bx) + std::abs(ay - by);
    return 2.0 / (meta.height + meta.width) * l1;
}

int overlap_cost(const Tracklet& a, const Tracklet& b) {
    int overlap = 0;
    size_t ia = 0, ib = 0;
    while (ia < a.entries.size() && ib < b.entries.size()) {
        const int fa = a.entries[ia].frame, fb = b.entries[ib].frame;
        if (fa == fb) {
            ++overlap;
            ++ia;
            ++ib;
        } else if (fa < fb) {
            ++ia;
        } else {
            ++ib;
        }
    }
    return overlap;
}

bool is_admissible(const Tracklet& a, const Tracklet& b, const PairGates& gates,
                   const VideoMeta& meta) {
    if (dominant_class(a) != dominant_class(b)) return false;
    const auto [first, second] = order_pair(a, b);
    return temporal_cost(*first, *second, meta) <= gates.max_gap_seconds &&
           spatial_cost(*first, *second, meta) <= gates.max_center_dist &&
           overlap_cost(*first, *second) <= gates.max_frame_overlap;
}

std::vector<int> select_reference_indices(const Tracklet& tracklet, ReferenceSide side, int offset,
                                          int fallback_offset) {
    const int n = static_cast<int>(tracklet.length());
    if (n < 2) fail(ErrorKind::InvalidArgument, "select_reference_indices: tracklet shorter than 2");

    if (side == ReferenceSide::Tail) {
        int farther = n - offset - 1;
        if (farther < 1) farther = n - fallback_offset - 1;
        if (farther < 1) return {n};
        return {n, farther};
    }
    int farther = offset;
    if (farther > n || farther <= 1) farther = fallback_offset;
    if (farther > n || farther <= 1) return {1};
    return {1, farther};
}

double cosine_similarity(const Heatmap& heatmap, const BinaryMask& mask) {
    if (heatmap.width != mask.width || heatmap.height != mask.height)
        fail(ErrorKind::InvalidArgument, "cosine_similarity: canvas mismatch");
    validate_mask(mask);

    double dot = 0.0;
    uint64_t pos = 0;
    bool value = false;
    for (uint32_t count : mask.counts) {
        if (value) {
            for (uint64_t p = pos; p < pos + count; ++p) {
                const int x = static_cast<int>(p / mask.height);
                const int y = static_cast<int>(p % mask.height);
                dot += heatmap.values[static_cast<size_t>(y) * heatmap.width + x];
            }
        }
        pos += count;
        value = !value;
    }

    double norm_h_sq = 0.0;
    for (float v : heatmap.values) norm_h_sq += static_cast<double>(v) * v;
    const double norm_m = std::sqrt(static_cast<double>(mask_area(mask)));
    if (norm_h_sq <= 0.0 || norm_m <= 0.0) return 0.0;
    return dot / (std::sqrt(norm_h_sq) * norm_m);
}

namespace {

PropagatorMemory build_memory(const Tracklet& tracklet, ReferenceSide side,
                              const std::vector<int>& indices, const std::vector<GrayFrame>& frames) {
    PropagatorMemory memory;
    memory.tracklet_id = tracklet.id;
    memory.side = side;
    for (int idx : indices) {
        const TrackletEntry& entry = tracklet.entries[static_cast<size_t>(idx) - 1];
        if (entry.frame < 0 || entry.frame >= static_cast<int>(frames.size()))
            fail(ErrorKind::Runtime, "tracklet entry references frame " + std::to_string(entry.frame) +
                                         " outside the video");
        memory.references.push_back({&frames[entry.frame], entry.det.mask, entry.frame});
    }
    return memory;
}

}  // namespace

double tracklet_similarity(const Tracklet& first, const Tracklet& second,
                           const std::vector<GrayFrame>& frames, const MaskPropagator& propagator,
                           int ref_offset, int ref_fallback) {
    const std::vector<int> tail = select_reference_indices(first, ReferenceSide::Tail, ref_offset, ref_fallback);
    const std::vector<int> head = select_reference_indices(second, ReferenceSide::Head, ref_offset, ref_fallback);

    const PropagatorMemory mem_first = build_memory(first, ReferenceSide::Tail, tail, frames);
    const PropagatorMemory mem_second = build_memory(second, ReferenceSide::Head, head, frames);

    double sum = 0.0;
    int count = 0;
    for (int idx : head) {
        const TrackletEntry& entry = second.entries[static_cast<size_t>(idx) - 1];
        const Heatmap heat = propagator.propagate(mem_first, {&frames[entry.frame], entry.frame});
        sum += cosine_similarity(heat, entry.det.mask);
        ++count;
    }
    for (int idx : tail) {
        const TrackletEntry& entry = first.entries[static_cast<size_t>(idx) - 1];
        const Heatmap heat = propagator.propagate(mem_second, {&frames[entry.frame], entry.frame});
        sum += cosine_similarity(heat, entry.det.mask);
        ++count;
    }
    return sum / count;
}

namespace {

struct CandidatePair {
    size_t a = 0, b = 0;       // indices into the input tracklet vector, a starts first
    double similarity = -std::numeric_limits<double>::infinity();
};

struct MergeForest {
    std::vector<int> parent;
    std::vector<Tracklet> merged;              // valid at roots
    std::vector<std::pair<int, int>> earliest;  // (start frame, id) of earliest member, at roots

    int find(int v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    }
};

std::vector<TrackletEntry> merge_entries(const std::vector<TrackletEntry>& keep_side,
                                         const std::vector<TrackletEntry>& other_side) {
    std::vector<TrackletEntry> out;
    out.reserve(keep_side.size() + other_side.size());
    size_t i = 0, j = 0;
    while (i < keep_side.size() || j < other_side.size()) {
        if (j >= other_side.size()) {
            out.push_back(keep_side[i++]);
        } else if (i >= keep_side.size()) {
            out.push_back(other_side[j++]);
        } else if (keep_side[i].frame < other_side[j].frame) {
            out.push_back(keep_side[i++]);
        } else if (other_side[j].frame < keep_side[i].frame) {
            out.push_back(other_side[j++]);
        } else {
            // frame collision: the higher-score entry survives, keep_side wins ties
            out.push_back(other_side[j].det.score > keep_side[i].det.score ? other_side[j]
                                                                           : keep_side[i]);
            ++i;
            ++j;
        }
    }
    return out;
}

}  // namespace

std::vector<Tracklet> greedy_merge(const std::vector<Tracklet>& tracklets,
                                   const std::vector<GrayFrame>& frames, const VideoMeta& meta,
                                   const MaskPropagator& propagator, const GltaParams& params) {
    const size_t n = tracklets.size();
    if (n == 0) return {};

    std::vector<size_t> by_start(n);
    std::iota(by_start.begin(), by_start.end(), 0);
    std::sort(by_start.begin(), by_start.end(), [&](size_t lhs, size_t rhs) {
        return std::make_pair(tracklets[lhs].first_frame(), tracklets[lhs].id) <
               std::make_pair(tracklets[rhs].first_frame(), tracklets[rhs].id);
    });

    std::vector<CandidatePair> pairs;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            const Tracklet& first = tracklets[by_start[i]];
            const Tracklet& second = tracklets[by_start[j]];
            if (is_admissible(first, second, params.gates, meta))
                pairs.push_back({by_start[i], by_start[j], 0.0});
        }
    }

    // similarities are evaluated once per admissible pair, in parallel
    {
        int workers = params.threads > 0 ? params.threads
                                         : static_cast<int>(std::thread::hardware_concurrency());
        workers = std::max(1, std::min<int>(workers, static_cast<int>(std::max<size_t>(pairs.size(), 1))));
        std::atomic<size_t> cursor{0};
        auto evaluate_pair = [&](CandidatePair& pair) {
            try {
                pair.similarity =
                    tracklet_similarity(tracklets[pair.a], tracklets[pair.b], frames, propagator,
                                        params.ref_offset, params.ref_offset_fallback);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "warning: similarity for tracklets %d/%d skipped: %s\n",
                             tracklets[pair.a].id, tracklets[pair.b].id, e.what());
                pair.similarity = -std::numeric_limits<double>::infinity();
            }
        };
        if (workers == 1 || pairs.size() <= 1) {
            for (auto& pair : pairs) evaluate_pair(pair);
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) {
                pool.emplace_back([&]() {
                    for (;;) {
                        const size_t i = cursor.fetch_add(1);
                        if (i >= pairs.size()) break;
                        evaluate_pair(pairs[i]);
                    }
                });
            }
            for (auto& t : pool) t.join();
        }
    }

    std::sort(pairs.begin(), pairs.end(), [&](const CandidatePair& lhs, const CandidatePair& rhs) {
        if (lhs.similarity != rhs.similarity) return lhs.similarity > rhs.similarity;
        if (tracklets[lhs.a].id != tracklets[rhs.a].id) return tracklets[lhs.a].id < tracklets[rhs.a].id;
        return tracklets[lhs.b].id < tracklets[rhs.b].id;
    });

    MergeForest forest;
    forest.parent.resize(n);
    std::iota(forest.parent.begin(), forest.parent.end(), 0);
    forest.merged = tracklets;
    forest.earliest.resize(n);
    for (size_t i = 0; i < n; ++i)
        forest.earliest[i] = {tracklets[i].first_frame(), tracklets[i].id};

    for (const auto& pair : pairs) {
        if (!(pair.similarity > params.merge_similarity_min)) break;
        const int ra = forest.find(static_cast<int>(pair.a));
        const int rb = forest.find(static_cast<int>(pair.b));
        if (ra == rb) continue;
        // the overlap gate is re-checked against the current merged frame sets
        if (overlap_cost(forest.merged[ra], forest.merged[rb]) > params.gates.max_frame_overlap)
            continue;

        const int keep = forest.earliest[ra] <= forest.earliest[rb] ? ra : rb;
        const int drop = keep == ra ? rb : ra;
        forest.merged[keep].entries =
            merge_entries(forest.merged[keep].entries, forest.merged[drop].entries);
        forest.earliest[keep] = std::min(forest.earliest[ra], forest.earliest[rb]);
        forest.parent[drop] = keep;
        forest.merged[drop].entries.clear();
    }

    std::vector<Tracklet> out;
    for (size_t i = 0; i < n; ++i) {
        if (forest.find(static_cast<int>(i)) != static_cast<int>(i)) continue;
        Tracklet track = std::move(forest.merged[i]);
        track.id = forest.earliest[i].second;
        out.push_back(std::move(track));
    }
    std::sort(out.begin(), out.end(), [](const Tracklet& a, const Tracklet& b) { return a.id < b.id; });
    return out;
}

std::vector<Tracklet> prune_low_confidence(std::vector<Tracklet> tracks, double score_floor) {
    std::erase_if(tracks, [&](const Tracklet& t) { return t.max_score() < score_floor; });
    return tracks;
}

}  // namespace trackseg
