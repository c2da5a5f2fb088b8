#include "io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "error.hpp"

namespace trackseg {

namespace {

[[noreturn]] void line_fail(const std::filesystem::path& path, int line, const std::string& message) {
    fail(ErrorKind::Parse, path.string() + ":" + std::to_string(line) + ": " + message);
}

bool parse_double(const std::string& s, double& out) {
    try {
        size_t used = 0;
        out = std::stod(s, &used);
        return used == s.size();
    } catch (...) {
        return false;
    }
}

bool parse_int(const std::string& s, int& out) {
    try {
        size_t used = 0;
        out = std::stoi(s, &used);
        return used == s.size();
    } catch (...) {
        return false;
    }
}

// "key = value" lines; '#' comments; returns (key, value) pairs in order.
std::vector<std::pair<std::string, std::string>> read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open file: " + path.string());
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const size_t eq = line.find('=');
        std::string key, value;
        if (eq == std::string::npos) {
            std::istringstream check(line);
            std::string token;
            if (check >> token) line_fail(path, line_no, "expected 'key = value'");
            continue;  // blank line
        }
        auto trim = [](std::string s) {
            const size_t b = s.find_first_not_of(" \t\r");
            const size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        key = trim(line.substr(0, eq));
        value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) line_fail(path, line_no, "expected 'key = value'");
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

}  // namespace

void config_set(PipelineConfig& config, const std::string& key, const std::string& value) {
    auto bad_value = [&]() {
        fail(ErrorKind::Parse, "config: bad value '" + value + "' for key '" + key + "'");
    };
    auto as_double = [&](double lo, double hi) {
        double v = 0.0;
        if (!parse_double(value, v) || v < lo || v > hi) bad_value();
        return v;
    };
    auto as_int = [&](int lo, int hi) {
        int v = 0;
        if (!parse_int(value, v) || v < lo || v > hi) bad_value();
        return v;
    };

    if (key == "det_score_min") {
        config.det_score_min = as_double(0.0, 1.0);
    } else if (key == "det_area_min") {
        config.det_area_min = as_double(0.0, 1e12);
    } else if (key == "multiclass_merge_iou") {
        config.multiclass_merge_iou = as_double(0.0, 1.0);
    } else if (key == "match_iou_min") {
        config.match_iou_min = as_double(0.0, 1.0);
    } else if (key == "merge_similarity_min") {
        config.merge_similarity_min = as_double(-1.0, 1.0);
    } else if (key == "pair_max_gap_seconds") {
        config.pair_max_gap_seconds = as_double(0.0, 1e9);
    } else if (key == "pair_max_center_dist") {
        config.pair_max_center_dist = as_double(0.0, 1e9);
    } else if (key == "pair_max_frame_overlap") {
        config.pair_max_frame_overlap = as_int(0, 1 << 30);
    } else if (key == "ref_offset") {
        config.ref_offset = as_int(0, 1 << 30);
    } else if (key == "ref_offset_fallback") {
        config.ref_offset_fallback = as_int(0, 1 << 30);
    } else if (key == "track_score_floor") {
        config.track_score_floor = as_double(0.0, 1.0);
    } else if (key == "flow_levels") {
        config.flow_levels = as_int(1, 16);
    } else if (key == "flow_window") {
        config.flow_window = as_int(3, 99);
        if (config.flow_window % 2 == 0) bad_value();
    } else if (key == "propagator") {
        if (value != "geometric" && value.rfind("external:", 0) != 0) bad_value();
        config.propagator = value;
    } else if (key == "propagator_search_radius") {
        config.propagator_search_radius = as_int(1, 4096);
    } else if (key == "heatmap_sigma") {
        config.heatmap_sigma = as_double(0.0, 256.0);
    } else if (key == "video_name") {
        config.video_name = value;
    } else if (key == "threads") {
        config.threads = as_int(0, 1024);
    } else {
        fail(ErrorKind::Parse, "config: unknown key '" + key + "'");
    }
}

PipelineConfig load_config(const std::filesystem::path& path) {
    PipelineConfig config;
    for (const auto& [key, value] : read_key_values(path)) config_set(config, key, value);
    return config;
}

VideoMeta read_meta(const std::filesystem::path& path) {
    VideoMeta meta;
    bool saw_fps = false, saw_h = false, saw_w = false;
    for (const auto& [key, value] : read_key_values(path)) {
        if (key == "fps") {
            if (!parse_double(value, meta.fps) || meta.fps <= 0.0)
                fail(ErrorKind::Parse, path.string() + ": bad fps value");
            saw_fps = true;
        } else if (key == "height") {
            if (!parse_int(value, meta.height) || meta.height <= 0)
                fail(ErrorKind::Parse, path.string() + ": bad height value");
            saw_h = true;
        } else if (key == "width") {
            if (!parse_int(value, meta.width) || meta.width <= 0)
                fail(ErrorKind::Parse, path.string() + ": bad width value");
            saw_w = true;
        } else {
            fail(ErrorKind::Parse, path.string() + ": unknown key '" + key + "'");
        }
    }
    if (!saw_fps || !saw_h || !saw_w)
        fail(ErrorKind::Parse, path.string() + ": fps, height and width are all required");
    return meta;
}

void write_meta(const std::filesystem::path& path, const VideoMeta& meta) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot create file: " + path.string());
    char buf[96];
    std::snprintf(buf, sizeof buf, "fps = %.9g\nheight = %d\nwidth = %d\n", meta.fps, meta.height,
                  meta.width);
    out << buf;
    if (!out) fail(ErrorKind::Io, "failed writing file: " + path.string());
}

std::vector<std::vector<Detection>> read_detections(const std::filesystem::path& path,
                                                    const VideoMeta& meta, int frame_count) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open detections file: " + path.string());

    std::vector<std::vector<Detection>> per_frame(static_cast<size_t>(std::max(frame_count, 0)));
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        int frame = 0, class_id = 0, img_h = 0, img_w = 0;
        double score = 0.0;
        std::string rle, extra;
        if (!(ls >> frame)) {
            std::istringstream check(line);
            std::string token;
            if (check >> token) line_fail(path, line_no, "malformed detection line");
            continue;  // blank line
        }
        if (!(ls >> class_id >> score >> img_h >> img_w >> rle))
            line_fail(path, line_no, "malformed detection line");
        if (ls >> extra) line_fail(path, line_no, "trailing tokens");
        if (frame < 0) line_fail(path, line_no, "negative frame index");
        if (frame >= frame_count)
            line_fail(path, line_no, "frame index " + std::to_string(frame) + " beyond the video (" +
                                         std::to_string(frame_count) + " frames)");
        if (class_id < 0) line_fail(path, line_no, "negative class id");
        if (score < 0.0 || score > 1.0) line_fail(path, line_no, "score outside [0,1]");
        if (img_h != meta.height || img_w != meta.width)
            line_fail(path, line_no, "mask canvas does not match the video metadata");
        BinaryMask mask;
        try {
            mask = compressed_rle_decode(rle, img_h, img_w);
        } catch (const Error& e) {
            line_fail(path, line_no, e.what());
        }
        per_frame[static_cast<size_t>(frame)].push_back(
            make_detection(frame, std::move(mask), {{class_id, score}}));
    }
    return per_frame;
}

void write_detections(const std::filesystem::path& path,
                      const std::vector<std::vector<Detection>>& per_frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot create detections file: " + path.string());
    char buf[64];
    for (const auto& dets : per_frame) {
        for (const auto& det : dets) {
            const ClassScore label = top_label(det);
            std::snprintf(buf, sizeof buf, " %d %.6f ", label.class_id, label.score);
            out << det.frame << buf << det.mask.height << " " << det.mask.width << " "
                << compressed_rle_encode(det.mask) << "\n";
        }
    }
    if (!out) fail(ErrorKind::Io, "failed writing detections file: " + path.string());
}

void write_tracks(const std::filesystem::path& path, const std::vector<Tracklet>& tracks) {
    struct Line {
        int frame, track_id, class_id;
        double score;
        const BinaryMask* mask;
    };
    std::vector<Line> lines;
    for (const auto& track : tracks) {
        const int cls = dominant_class(track);
        for (const auto& e : track.entries)
            lines.push_back({e.frame, track.id, cls, e.det.score, &e.det.mask});
    }
    std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
        return std::make_pair(a.frame, a.track_id) < std::make_pair(b.frame, b.track_id);
    });

    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot create tracks file: " + path.string());
    char buf[64];
    for (const auto& l : lines) {
        std::snprintf(buf, sizeof buf, " %.6f ", l.score);
        out << l.frame << " " << l.track_id << " " << l.class_id << buf << l.mask->height << " "
            << l.mask->width << " " << compressed_rle_encode(*l.mask) << "\n";
    }
    if (!out) fail(ErrorKind::Io, "failed writing tracks file: " + path.string());
}

std::vector<Tracklet> read_tracks(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open tracks file: " + path.string());

    std::map<int, Tracklet> by_id;
    std::string line;
    int line_no = 0;
    int canvas_h = 0, canvas_w = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        int frame = 0, track_id = 0, class_id = 0, img_h = 0, img_w = 0;
        double score = 0.0;
        std::string rle, extra;
        if (!(ls >> frame)) {
            std::istringstream check(line);
            std::string token;
            if (check >> token) line_fail(path, line_no, "malformed track line");
            continue;
        }
        if (!(ls >> track_id >> class_id >> score >> img_h >> img_w >> rle))
            line_fail(path, line_no, "malformed track line");
        if (ls >> extra) line_fail(path, line_no, "trailing tokens");
        if (frame < 0) line_fail(path, line_no, "negative frame index");
        if (score < 0.0 || score > 1.0) line_fail(path, line_no, "score outside [0,1]");
        if (canvas_h == 0) {
            canvas_h = img_h;
            canvas_w = img_w;
        } else if (img_h != canvas_h || img_w != canvas_w) {
            line_fail(path, line_no, "mask canvas differs from earlier lines");
        }
        BinaryMask mask;
        try {
            mask = compressed_rle_decode(rle, img_h, img_w);
        } catch (const Error& e) {
            line_fail(path, line_no, e.what());
        }
        Tracklet& t = by_id[track_id];
        t.id = track_id;
        t.entries.push_back({frame, make_detection(frame, std::move(mask), {{class_id, score}})});
    }

    std::vector<Tracklet> tracks;
    tracks.reserve(by_id.size());
    for (auto& [id, t] : by_id) {
        std::sort(t.entries.begin(), t.entries.end(),
                  [](const TrackletEntry& a, const TrackletEntry& b) { return a.frame < b.frame; });
        for (size_t i = 1; i < t.entries.size(); ++i) {
            if (t.entries[i].frame == t.entries[i - 1].frame)
                fail(ErrorKind::Parse, path.string() + ": track " + std::to_string(id) +
                                           " has two entries for frame " +
                                           std::to_string(t.entries[i].frame));
        }
        tracks.push_back(std::move(t));
    }
    return tracks;
}

}  // namespace trackseg
