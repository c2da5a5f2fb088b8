#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "detection.hpp"
#include "glta.hpp"

namespace trackseg {

struct PipelineConfig {
    double det_score_min = 0.5;          // detections must score strictly higher
    double det_area_min = 128.0;         // pixels, strictly bigger
    double multiclass_merge_iou = 0.5;   // same-frame merge threshold, strictly higher
    double match_iou_min = 0.15;         // consecutive-frame match threshold, strictly higher
    double merge_similarity_min = 0.30;  // long-term merge threshold, strictly higher
    double pair_max_gap_seconds = 1.5;
    double pair_max_center_dist = 0.2;
    int pair_max_frame_overlap = 1;
    int ref_offset = 5;
    int ref_offset_fallback = 2;
    double track_score_floor = 0.90;  // tracks scoring below this are dropped
    int flow_levels = 3;
    int flow_window = 7;
    std::string propagator = "geometric";  // or "external:DIR"
    int propagator_search_radius = 32;
    double heatmap_sigma = 2.0;
    std::string video_name;  // external heatmap subdirectory; defaults to the frames dir name
    int threads = 0;         // 0 = hardware concurrency
};

// Applies one key; unknown keys and unparsable values are Parse errors.
void config_set(PipelineConfig& config, const std::string& key, const std::string& value);

// Flat "key = value" file, '#' comments.
PipelineConfig load_config(const std::filesystem::path& path);

// Sidecar "key = value" file with fps, height and width.
VideoMeta read_meta(const std::filesystem::path& path);
void write_meta(const std::filesystem::path& path, const VideoMeta& meta);

// Detections file, one per line: frame_index class_id score img_h img_w rle
std::vector<std::vector<Detection>> read_detections(const std::filesystem::path& path,
                                                    const VideoMeta& meta, int frame_count);
void write_detections(const std::filesystem::path& path,
                      const std::vector<std::vector<Detection>>& per_frame);

// Tracks file, one entry per line: frame_index track_id class_id score img_h img_w rle
// sorted by frame then track id.
void write_tracks(const std::filesystem::path& path, const std::vector<Tracklet>& tracks);
std::vector<Tracklet> read_tracks(const std::filesystem::path& path);

}  // namespace trackseg
