#include "trackseg/trackseg.h"

#include <cstdio>
#include <map>
#include <memory>
#include <string>

#include "error.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "pipeline.hpp"

struct trackseg_config {
    trackseg::PipelineConfig config;
};

struct trackseg_report {
    std::map<std::string, double> values;
    std::string plain_text;
    std::string machine_text;
};

namespace {

thread_local std::string g_last_error;

trackseg_status to_status(trackseg::ErrorKind kind) {
    switch (kind) {
        case trackseg::ErrorKind::InvalidArgument: return TRACKSEG_ERR_INVALID_ARGUMENT;
        case trackseg::ErrorKind::Io: return TRACKSEG_ERR_IO;
        case trackseg::ErrorKind::Parse: return TRACKSEG_ERR_PARSE;
        case trackseg::ErrorKind::Runtime: return TRACKSEG_ERR_RUNTIME;
    }
    return TRACKSEG_ERR_RUNTIME;
}

template <typename Fn>
trackseg_status guarded(Fn&& fn) {
    try {
        fn();
        return TRACKSEG_OK;
    } catch (const trackseg::Error& e) {
        g_last_error = e.what();
        return to_status(e.kind());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TRACKSEG_ERR_RUNTIME;
    }
}

trackseg_status invalid(const char* message) {
    g_last_error = message;
    return TRACKSEG_ERR_INVALID_ARGUMENT;
}

trackseg_report* build_report(const trackseg::EvalResult& result) {
    auto* report = new trackseg_report;
    report->values["HOTA"] = result.combined_mean;
    report->values["DetA"] = result.detection_mean;
    report->values["AssA"] = result.association_mean;
    char key[32];
    for (size_t i = 0; i < result.alphas.size(); ++i) {
        std::snprintf(key, sizeof key, "HOTA_%.2f", result.alphas[i]);
        report->values[key] = result.combined[i];
        std::snprintf(key, sizeof key, "DetA_%.2f", result.alphas[i]);
        report->values[key] = result.detection[i];
        std::snprintf(key, sizeof key, "AssA_%.2f", result.alphas[i]);
        report->values[key] = result.association[i];
    }
    report->plain_text = trackseg::report_plain_text(result);
    report->machine_text = trackseg::report_machine_text(result);
    return report;
}

}  // namespace

extern "C" {

const char* trackseg_version(void) { return "0.1.0"; }

const char* trackseg_status_name(trackseg_status status) {
    switch (status) {
        case TRACKSEG_OK: return "ok";
        case TRACKSEG_ERR_INVALID_ARGUMENT: return "invalid argument";
        case TRACKSEG_ERR_IO: return "io error";
        case TRACKSEG_ERR_PARSE: return "parse error";
        case TRACKSEG_ERR_RUNTIME: return "runtime error";
    }
    return "unknown status";
}

const char* trackseg_last_error(void) { return g_last_error.c_str(); }

trackseg_status trackseg_config_create(trackseg_config** out_config) {
    if (out_config == nullptr) return invalid("config_create: out_config is null");
    return guarded([&]() { *out_config = new trackseg_config; });
}

trackseg_status trackseg_config_load(const char* path, trackseg_config** out_config) {
    if (path == nullptr) return invalid("config_load: path is null");
    if (out_config == nullptr) return invalid("config_load: out_config is null");
    return guarded([&]() {
        auto config = std::make_unique<trackseg_config>();
        config->config = trackseg::load_config(path);
        *out_config = config.release();
    });
}

trackseg_status trackseg_config_set(trackseg_config* config, const char* key, const char* value) {
    if (config == nullptr) return invalid("config_set: config is null");
    if (key == nullptr || value == nullptr) return invalid("config_set: key or value is null");
    return guarded([&]() { trackseg::config_set(config->config, key, value); });
}

void trackseg_config_free(trackseg_config* config) { delete config; }

trackseg_status trackseg_track(const trackseg_config* config, const char* frames_dir,
                               const char* detections_path, const char* output_path) {
    if (config == nullptr) return invalid("track: config is null");
    if (frames_dir == nullptr || detections_path == nullptr || output_path == nullptr)
        return invalid("track: a path argument is null");
    return guarded(
        [&]() { trackseg::run_tracking(config->config, frames_dir, detections_path, output_path); });
}

trackseg_status trackseg_evaluate(const char* ground_truth_path, const char* predictions_path,
                                  trackseg_report** out_report) {
    if (ground_truth_path == nullptr || predictions_path == nullptr)
        return invalid("evaluate: a path argument is null");
    if (out_report == nullptr) return invalid("evaluate: out_report is null");
    return guarded([&]() {
        const trackseg::EvalResult result =
            trackseg::evaluate_files(ground_truth_path, predictions_path);
        *out_report = build_report(result);
    });
}

trackseg_status trackseg_report_value(const trackseg_report* report, const char* key,
                                      double* out_value) {
    if (report == nullptr) return invalid("report_value: report is null");
    if (key == nullptr || out_value == nullptr) return invalid("report_value: key or out_value is null");
    const auto it = report->values.find(key);
    if (it == report->values.end()) {
        g_last_error = std::string("report_value: unknown key '") + key + "'";
        return TRACKSEG_ERR_INVALID_ARGUMENT;
    }
    *out_value = it->second;
    return TRACKSEG_OK;
}

trackseg_status trackseg_report_text(const trackseg_report* report, int machine_readable,
                                     const char** out_text) {
    if (report == nullptr) return invalid("report_text: report is null");
    if (out_text == nullptr) return invalid("report_text: out_text is null");
    *out_text = machine_readable ? report->machine_text.c_str() : report->plain_text.c_str();
    return TRACKSEG_OK;
}

void trackseg_report_free(trackseg_report* report) { delete report; }

trackseg_status trackseg_synth(const char* spec_path, const char* output_dir) {
    if (spec_path == nullptr || output_dir == nullptr)
        return invalid("synth: a path argument is null");
    return guarded([&]() { trackseg::render_scene_files(spec_path, output_dir); });
}

}  // extern "C"
