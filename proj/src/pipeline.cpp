#include "pipeline.hpp"

#include <cstdio>

#include "error.hpp"
#include "image_io.hpp"
#include "sta.hpp"

namespace trackseg {

std::unique_ptr<MaskPropagator> make_propagator(const PipelineConfig& config,
                                                const std::string& default_video_name) {
    if (config.propagator == "geometric")
        return std::make_unique<GeometricPropagator>(config.propagator_search_radius,
                                                     config.heatmap_sigma);
    if (config.propagator.rfind("external:", 0) == 0) {
        const std::string dir = config.propagator.substr(9);
        if (dir.empty())
            fail(ErrorKind::InvalidArgument, "propagator: external directory must not be empty");
        const std::string video =
            config.video_name.empty() ? default_video_name : config.video_name;
        return std::make_unique<ExternalHeatmapAdapter>(dir, video);
    }
    fail(ErrorKind::InvalidArgument, "propagator: unknown choice '" + config.propagator + "'");
}

PipelineRun run_pipeline(const VideoInput& input, const PipelineConfig& config,
                         const MaskPropagator* propagator) {
    if (input.frames.size() != input.detections.size())
        fail(ErrorKind::InvalidArgument, "pipeline: frame and detection counts differ");
    for (const auto& frame : input.frames)
        if (frame.width != input.meta.width || frame.height != input.meta.height)
            fail(ErrorKind::InvalidArgument, "pipeline: frame size does not match the video metadata");
    for (const auto& dets : input.detections)
        for (const auto& det : dets)
            if (det.mask.width != input.meta.width || det.mask.height != input.meta.height)
                fail(ErrorKind::InvalidArgument, "pipeline: mask canvas does not match the video metadata");

    std::vector<std::vector<Detection>> staged(input.detections.size());
    for (size_t f = 0; f < input.detections.size(); ++f) {
        const std::vector<Detection> kept =
            filter_detections(input.detections[f], config.det_score_min, config.det_area_min);
        staged[f] = merge_multiclass(kept, config.multiclass_merge_iou);
    }

    StaParams sta;
    sta.match_iou_min = config.match_iou_min;
    sta.flow.levels = config.flow_levels;
    sta.flow.window = config.flow_window;
    sta.threads = config.threads;

    PipelineRun run;
    run.sta_tracks = build_tracklets(input.frames, staged, sta);

    std::unique_ptr<MaskPropagator> owned;
    if (propagator == nullptr) {
        owned = make_propagator(config, "video");
        propagator = owned.get();
    }

    GltaParams glta;
    glta.merge_similarity_min = config.merge_similarity_min;
    glta.gates.max_gap_seconds = config.pair_max_gap_seconds;
    glta.gates.max_center_dist = config.pair_max_center_dist;
    glta.gates.max_frame_overlap = config.pair_max_frame_overlap;
    glta.ref_offset = config.ref_offset;
    glta.ref_offset_fallback = config.ref_offset_fallback;
    glta.threads = config.threads;

    run.tracks = greedy_merge(run.sta_tracks, input.frames, input.meta, *propagator, glta);
    run.tracks = prune_low_confidence(std::move(run.tracks), config.track_score_floor);
    return run;
}

VideoInput load_video_input(const std::filesystem::path& frames_dir,
                            const std::filesystem::path& detections_path) {
    VideoInput input;
    input.meta = read_meta(frames_dir / "meta.txt");

    const std::vector<std::filesystem::path> files = list_frame_files(frames_dir);
    if (files.empty()) fail(ErrorKind::Io, "no frame images found in " + frames_dir.string());
    input.frames.reserve(files.size());
    for (const auto& file : files) {
        GrayFrame frame = read_gray_image(file);
        if (frame.width != input.meta.width || frame.height != input.meta.height)
            fail(ErrorKind::Parse, file.string() + ": frame size does not match meta.txt");
        input.frames.push_back(std::move(frame));
    }

    input.detections =
        read_detections(detections_path, input.meta, static_cast<int>(input.frames.size()));
    return input;
}

void run_tracking(const PipelineConfig& config, const std::filesystem::path& frames_dir,
                  const std::filesystem::path& detections_path,
                  const std::filesystem::path& output_path) {
    const VideoInput input = load_video_input(frames_dir, detections_path);
    const std::unique_ptr<MaskPropagator> propagator =
        make_propagator(config, frames_dir.filename().string());
    const PipelineRun run = run_pipeline(input, config, propagator.get());
    write_tracks(output_path, run.tracks);
}

EvalResult evaluate_files(const std::filesystem::path& gt_path,
                          const std::filesystem::path& pred_path) {
    const std::vector<Tracklet> gt = read_tracks(gt_path);
    const std::vector<Tracklet> pred = read_tracks(pred_path);
    if (!gt.empty() && !pred.empty()) {
        const BinaryMask& a = gt.front().entries.front().det.mask;
        const BinaryMask& b = pred.front().entries.front().det.mask;
        if (a.width != b.width || a.height != b.height)
            fail(ErrorKind::InvalidArgument,
                 "evaluate: ground truth and prediction canvases differ");
    }
    return evaluate(gt, pred);
}

void write_scene_files(const RenderedScene& scene, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir / "frames");
    char name[32];
    for (size_t f = 0; f < scene.frames.size(); ++f) {
        std::snprintf(name, sizeof name, "%06zu.pgm", f);
        write_pgm(out_dir / "frames" / name, scene.frames[f]);
    }
    write_meta(out_dir / "frames" / "meta.txt", scene.meta);
    write_detections(out_dir / "dets.txt", scene.detections);
    write_tracks(out_dir / "gt.txt", scene.gt_tracks);
}

void render_scene_files(const std::filesystem::path& spec_path,
                        const std::filesystem::path& out_dir) {
    const SceneSpec spec = load_scene_spec(spec_path.string());
    write_scene_files(render(spec), out_dir);
}

}  // namespace trackseg
