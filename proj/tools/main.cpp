// Command line driver for the trackseg shared library.

#include <cstdio>
#include <fstream>
#include <string>

#include "CLI11.hpp"
#include "trackseg/trackseg.h"

namespace {

int report_failure(const char* what, trackseg_status status) {
    std::fprintf(stderr, "%s failed (%s): %s\n", what, trackseg_status_name(status),
                 trackseg_last_error());
    return static_cast<int>(status);
}

int write_text_file(const std::string& path, const char* text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        std::fprintf(stderr, "cannot write %s\n", path.c_str());
        return static_cast<int>(TRACKSEG_ERR_IO);
    }
    return 0;
}

int print_report(const char* gt_path, const char* pred_path, const std::string& report_path) {
    trackseg_report* report = nullptr;
    trackseg_status status = trackseg_evaluate(gt_path, pred_path, &report);
    if (status != TRACKSEG_OK) return report_failure("eval", status);

    const char* text = nullptr;
    trackseg_report_text(report, 0, &text);
    std::fputs(text, stdout);

    int rc = 0;
    if (!report_path.empty()) {
        const char* machine = nullptr;
        trackseg_report_text(report, 1, &machine);
        rc = write_text_file(report_path, machine);
    }
    trackseg_report_free(report);
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mask tracking: short-term association plus long-term tracklet merging"};
    app.require_subcommand(1);

    std::string config_path, frames_dir, dets_path, out_path, eval_gt, propagator;
    CLI::App* track = app.add_subcommand("track", "run the tracking pipeline on one video");
    track->add_option("--config", config_path, "pipeline configuration file")->required();
    track->add_option("--frames", frames_dir, "directory with frame images and meta.txt")->required();
    track->add_option("--dets", dets_path, "detections file")->required();
    track->add_option("--out", out_path, "output tracks file")->required();
    track->add_option("--eval", eval_gt, "ground-truth tracks file to evaluate against");
    track->add_option("--propagator", propagator, "geometric or external:DIR");

    std::string spec_path, synth_out;
    CLI::App* synth = app.add_subcommand("synth", "render a synthetic scene");
    synth->add_option("--spec", spec_path, "scene description file")->required();
    synth->add_option("--out", synth_out, "output directory")->required();

    std::string gt_path, pred_path, report_path;
    CLI::App* eval = app.add_subcommand("eval", "evaluate predicted tracks against ground truth");
    eval->add_option("--gt", gt_path, "ground-truth tracks file")->required();
    eval->add_option("--pred", pred_path, "predicted tracks file")->required();
    eval->add_option("--report", report_path, "also write a machine-readable report here");

    CLI11_PARSE(app, argc, argv);

    if (track->parsed()) {
        trackseg_config* config = nullptr;
        trackseg_status status = trackseg_config_load(config_path.c_str(), &config);
        if (status != TRACKSEG_OK) return report_failure("config", status);
        if (!propagator.empty()) {
            status = trackseg_config_set(config, "propagator", propagator.c_str());
            if (status != TRACKSEG_OK) {
                trackseg_config_free(config);
                return report_failure("config", status);
            }
        }
        status = trackseg_track(config, frames_dir.c_str(), dets_path.c_str(), out_path.c_str());
        trackseg_config_free(config);
        if (status != TRACKSEG_OK) return report_failure("track", status);

        if (!eval_gt.empty())
            return print_report(eval_gt.c_str(), out_path.c_str(), out_path + ".eval.txt");
        return 0;
    }

    if (synth->parsed()) {
        const trackseg_status status = trackseg_synth(spec_path.c_str(), synth_out.c_str());
        if (status != TRACKSEG_OK) return report_failure("synth", status);
        return 0;
    }

    return print_report(gt_path.c_str(), pred_path.c_str(), report_path);
}
