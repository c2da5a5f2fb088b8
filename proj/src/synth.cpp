#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace trackseg {

namespace {

[[noreturn]] void parse_fail(const std::string& origin, int line, const std::string& message) {
    fail(ErrorKind::Parse, origin + ":" + std::to_string(line) + ": " + message);
}

double lerp_position(const std::vector<Waypoint>& wps, int frame, bool x_axis) {
    auto value = [&](const Waypoint& w) { return x_axis ? w.x : w.y; };
    if (frame <= wps.front().frame) return value(wps.front());
    if (frame >= wps.back().frame) return value(wps.back());
    for (size_t i = 1; i < wps.size(); ++i) {
        if (frame <= wps[i].frame) {
            const Waypoint& a = wps[i - 1];
            const Waypoint& b = wps[i];
            if (b.frame == a.frame) return value(b);
            const double t = static_cast<double>(frame - a.frame) / (b.frame - a.frame);
            return value(a) + t * (value(b) - value(a));
        }
    }
    return value(wps.back());
}

float noise_value(uint64_t seed, int x, int y) {
    SplitMix64 rng{seed ^ (static_cast<uint64_t>(static_cast<uint32_t>(x)) * 0x9e3779b97f4a7c15ull) ^
                   (static_cast<uint64_t>(static_cast<uint32_t>(y)) * 0xc2b2ae3d27d4eb4full)};
    return static_cast<float>(rng.next_double());
}

// two octaves so downsampled frames keep usable texture
float texture_value(uint64_t seed, int x, int y, float lo, float hi) {
    const int bx = x >= 0 ? x / 4 : (x - 3) / 4;
    const int by = y >= 0 ? y / 4 : (y - 3) / 4;
    const float coarse = noise_value(seed ^ 0xa5a5a5a5ull, bx, by);
    const float fine = noise_value(seed, x, y);
    return lo + (0.6f * coarse + 0.4f * fine) * (hi - lo);
}

struct PlacedObject {
    int cx = 0, cy = 0;
    int min_x = 0, max_x = 0, min_y = 0, max_y = 0;  // inclusive bounding box
    const ObjectSpec* spec = nullptr;

    bool contains(int x, int y) const {
        if (x < min_x || x > max_x || y < min_y || y > max_y) return false;
        if (spec->shape == ShapeKind::Rectangle) return true;
        const long dx = x - cx, dy = y - cy;
        return dx * dx + dy * dy <= static_cast<long>(spec->radius) * spec->radius;
    }
};

PlacedObject place_object(const ObjectSpec& obj, int frame) {
    PlacedObject p;
    p.spec = &obj;
    p.cx = static_cast<int>(std::lround(lerp_position(obj.waypoints, frame, true)));
    p.cy = static_cast<int>(std::lround(lerp_position(obj.waypoints, frame, false)));
    if (obj.shape == ShapeKind::Rectangle) {
        p.min_x = p.cx - obj.width / 2;
        p.max_x = p.min_x + obj.width - 1;
        p.min_y = p.cy - obj.height / 2;
        p.max_y = p.min_y + obj.height - 1;
    } else {
        p.min_x = p.cx - obj.radius;
        p.max_x = p.cx + obj.radius;
        p.min_y = p.cy - obj.radius;
        p.max_y = p.cy + obj.radius;
    }
    return p;
}

void validate_spec(const SceneSpec& spec) {
    if (spec.width <= 0 || spec.height <= 0)
        fail(ErrorKind::InvalidArgument, "scene: canvas dimensions must be positive");
    if (spec.frame_count < 1) fail(ErrorKind::InvalidArgument, "scene: frame count must be >= 1");
    if (spec.fps <= 0.0) fail(ErrorKind::InvalidArgument, "scene: fps must be positive");
    if (spec.dropout < 0.0 || spec.dropout > 1.0)
        fail(ErrorKind::InvalidArgument, "scene: dropout probability outside [0,1]");
    if (spec.score_noise < 0.0)
        fail(ErrorKind::InvalidArgument, "scene: score noise must be >= 0");
    for (size_t i = 0; i < spec.objects.size(); ++i) {
        const ObjectSpec& obj = spec.objects[i];
        if (obj.waypoints.empty())
            fail(ErrorKind::InvalidArgument, "scene: object " + std::to_string(i) + " has no waypoints");
        int last_frame = -1;
        for (const auto& w : obj.waypoints) {
            if (w.frame < last_frame)
                fail(ErrorKind::InvalidArgument,
                     "scene: object " + std::to_string(i) + " waypoints out of order");
            last_frame = w.frame;
            if (w.x < 0 || w.x >= spec.width || w.y < 0 || w.y >= spec.height)
                fail(ErrorKind::InvalidArgument,
                     "scene: object " + std::to_string(i) + " waypoint outside the canvas");
        }
        if (obj.shape == ShapeKind::Rectangle && (obj.width <= 0 || obj.height <= 0))
            fail(ErrorKind::InvalidArgument, "scene: rectangle size must be positive");
        if (obj.shape == ShapeKind::Disk && obj.radius <= 0)
            fail(ErrorKind::InvalidArgument, "scene: disk radius must be positive");
    }
    for (const auto& gap : spec.gaps) {
        if (gap.object_index < 0 || gap.object_index >= static_cast<int>(spec.objects.size()))
            fail(ErrorKind::InvalidArgument, "scene: fragment gap names an unknown object");
        if (gap.first_frame > gap.last_frame)
            fail(ErrorKind::InvalidArgument, "scene: fragment gap range is inverted");
    }
}

}  // namespace

SceneSpec parse_scene_spec(std::istream& in, const std::string& origin) {
    SceneSpec spec;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string directive;
        if (!(ls >> directive)) continue;

        auto want = [&](auto& value, const char* what) {
            if (!(ls >> value)) parse_fail(origin, line_no, std::string("expected ") + what);
        };

        if (directive == "canvas") {
            want(spec.width, "canvas width");
            want(spec.height, "canvas height");
        } else if (directive == "fps") {
            want(spec.fps, "fps value");
        } else if (directive == "frames") {
            want(spec.frame_count, "frame count");
        } else if (directive == "seed") {
            want(spec.seed, "seed value");
        } else if (directive == "dropout") {
            want(spec.dropout, "dropout probability");
        } else if (directive == "score_noise") {
            want(spec.score_noise, "score noise sigma");
        } else if (directive == "fragment") {
            FragmentGap gap;
            want(gap.object_index, "object index");
            want(gap.first_frame, "first frame");
            want(gap.last_frame, "last frame");
            spec.gaps.push_back(gap);
        } else if (directive == "occluder") {
            OccluderSpec occ;
            want(occ.x, "occluder x");
            want(occ.y, "occluder y");
            want(occ.width, "occluder width");
            want(occ.height, "occluder height");
            std::string kw;
            want(kw, "'texture'");
            if (kw != "texture") parse_fail(origin, line_no, "expected 'texture'");
            want(occ.texture_seed, "texture seed");
            spec.occluders.push_back(occ);
        } else if (directive == "object") {
            ObjectSpec obj;
            std::string shape;
            want(shape, "shape kind");
            if (shape == "rect") {
                obj.shape = ShapeKind::Rectangle;
                want(obj.width, "rectangle width");
                want(obj.height, "rectangle height");
            } else if (shape == "disk") {
                obj.shape = ShapeKind::Disk;
                want(obj.radius, "disk radius");
            } else {
                parse_fail(origin, line_no, "unknown shape '" + shape + "'");
            }
            std::string kw;
            while (ls >> kw) {
                if (kw == "class") {
                    want(obj.class_id, "class id");
                } else if (kw == "texture") {
                    want(obj.texture_seed, "texture seed");
                } else if (kw == "waypoint") {
                    Waypoint w;
                    want(w.frame, "waypoint frame");
                    want(w.x, "waypoint x");
                    want(w.y, "waypoint y");
                    obj.waypoints.push_back(w);
                } else {
                    parse_fail(origin, line_no, "unknown object attribute '" + kw + "'");
                }
            }
            spec.objects.push_back(std::move(obj));
        } else {
            parse_fail(origin, line_no, "unknown directive '" + directive + "'");
        }
        std::string extra;
        if (ls >> extra) parse_fail(origin, line_no, "trailing tokens after directive");
    }

    try {
        validate_spec(spec);
    } catch (const Error& e) {
        fail(ErrorKind::Parse, origin + ": " + e.what());
    }
    return spec;
}

SceneSpec load_scene_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open scene spec: " + path);
    return parse_scene_spec(in, path);
}

RenderedScene render(const SceneSpec& spec) {
    validate_spec(spec);
    const int w = spec.width, h = spec.height;
    const size_t n_objects = spec.objects.size();

    RenderedScene scene;
    scene.meta = VideoMeta{spec.fps, h, w};
    scene.frames.reserve(static_cast<size_t>(spec.frame_count));
    scene.detections.assign(static_cast<size_t>(spec.frame_count), {});

    std::vector<Tracklet> gt(n_objects);
    for (size_t i = 0; i < n_objects; ++i) gt[i].id = static_cast<int>(i) + 1;

    std::vector<std::vector<BinaryMask>> gt_masks(static_cast<size_t>(spec.frame_count));

    const uint64_t background_seed = spec.seed ^ 0xb0c4de5eedull;
    for (int f = 0; f < spec.frame_count; ++f) {
        std::vector<PlacedObject> placed;
        placed.reserve(n_objects);
        for (const auto& obj : spec.objects) placed.push_back(place_object(obj, f));

        GrayFrame img(w, h);
        std::vector<BoolGrid> grids(n_objects, BoolGrid(w, h));
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const OccluderSpec* occ = nullptr;
                for (const auto& o : spec.occluders) {
                    if (x >= o.x && x < o.x + o.width && y >= o.y && y < o.y + o.height) {
                        occ = &o;
                        break;
                    }
                }
                if (occ != nullptr) {
                    img.at(x, y) = texture_value(occ->texture_seed, x, y, 0.20f, 0.60f);
                    continue;
                }
                int owner = -1;
                for (size_t i = 0; i < n_objects; ++i) {
                    if (placed[i].contains(x, y)) {
                        owner = static_cast<int>(i);
                        break;
                    }
                }
                if (owner >= 0) {
                    grids[static_cast<size_t>(owner)].set(x, y, true);
                    img.at(x, y) = texture_value(spec.objects[static_cast<size_t>(owner)].texture_seed,
                                                 x - placed[static_cast<size_t>(owner)].cx,
                                                 y - placed[static_cast<size_t>(owner)].cy, 0.45f, 1.0f);
                } else {
                    img.at(x, y) = texture_value(background_seed, x, y, 0.05f, 0.35f);
                }
            }
        }
        scene.frames.push_back(std::move(img));

        gt_masks[static_cast<size_t>(f)].reserve(n_objects);
        for (size_t i = 0; i < n_objects; ++i) {
            BinaryMask mask = rle_encode(grids[i]);
            if (!mask_empty(mask)) {
                gt[i].entries.push_back(
                    {f, make_detection(f, mask, {{spec.objects[i].class_id, 1.0}})});
            }
            gt_masks[static_cast<size_t>(f)].push_back(std::move(mask));
        }
    }

    // corruption pass: one deterministic stream, frames then objects
    SplitMix64 rng{spec.seed ^ 0xdececedeull};
    for (int f = 0; f < spec.frame_count; ++f) {
        for (size_t i = 0; i < n_objects; ++i) {
            const BinaryMask& mask = gt_masks[static_cast<size_t>(f)][i];
            if (mask_empty(mask)) continue;
            const double u = rng.next_double();
            const double z = rng.next_gaussian();
            bool gapped = false;
            for (const auto& gap : spec.gaps) {
                if (gap.object_index == static_cast<int>(i) && f >= gap.first_frame &&
                    f <= gap.last_frame) {
                    gapped = true;
                    break;
                }
            }
            if (gapped || u < spec.dropout) continue;
            const double score = std::clamp(1.0 - std::abs(z * spec.score_noise), 0.0, 1.0);
            scene.detections[static_cast<size_t>(f)].push_back(
                make_detection(f, mask, {{spec.objects[i].class_id, score}}));
        }
    }

    for (auto& t : gt)
        if (!t.entries.empty()) scene.gt_tracks.push_back(std::move(t));
    return scene;
}

}  // namespace trackseg
