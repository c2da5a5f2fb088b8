#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "io.hpp"
#include "metrics.hpp"
#include "propagator.hpp"
#include "synth.hpp"

namespace trackseg {

struct VideoInput {
    std::vector<GrayFrame> frames;
    std::vector<std::vector<Detection>> detections;  // one list per frame
    VideoMeta meta;
};

struct PipelineRun {
    std::vector<Tracklet> sta_tracks;  // after short-term association and singleton pruning
    std::vector<Tracklet> tracks;      // after long-term merging and confidence pruning
};

// Stage order: filter, multi-class merge, consecutive-frame association with
// per-frame overlap resolution and singleton pruning, greedy long-term
// merging, low-confidence pruning. A null propagator selects the one named
// in the config.
PipelineRun run_pipeline(const VideoInput& input, const PipelineConfig& config,
                         const MaskPropagator* propagator = nullptr);

std::unique_ptr<MaskPropagator> make_propagator(const PipelineConfig& config,
                                                const std::string& default_video_name);

VideoInput load_video_input(const std::filesystem::path& frames_dir,
                            const std::filesystem::path& detections_path);

// File-level driver: loads frames + meta + detections, runs the pipeline and
// writes the tracks file.
void run_tracking(const PipelineConfig& config, const std::filesystem::path& frames_dir,
                  const std::filesystem::path& detections_path,
                  const std::filesystem::path& output_path);

EvalResult evaluate_files(const std::filesystem::path& gt_path,
                          const std::filesystem::path& pred_path);

// Renders a scene spec into out_dir: frames/*.pgm, meta.txt, dets.txt, gt.txt.
void render_scene_files(const std::filesystem::path& spec_path,
                        const std::filesystem::path& out_dir);
void write_scene_files(const RenderedScene& scene, const std::filesystem::path& out_dir);

}  // namespace trackseg
