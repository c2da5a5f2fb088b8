#ifndef TRACKSEG_H
#define TRACKSEG_H

/* C interface to the trackseg mask-tracking engine. Handles are opaque and
 * must be released with the matching *_free call. Functions return
 * TRACKSEG_OK on success; on failure trackseg_last_error() describes what
 * went wrong (the message is thread-local and valid until the next failing
 * call on the same thread). */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum trackseg_status {
    TRACKSEG_OK = 0,
    TRACKSEG_ERR_INVALID_ARGUMENT = 1,
    TRACKSEG_ERR_IO = 2,
    TRACKSEG_ERR_PARSE = 3,
    TRACKSEG_ERR_RUNTIME = 4
} trackseg_status;

typedef struct trackseg_config trackseg_config;
typedef struct trackseg_report trackseg_report;

const char* trackseg_version(void);
const char* trackseg_status_name(trackseg_status status);
const char* trackseg_last_error(void);

/* Configuration ---------------------------------------------------------- */

/* A fresh configuration carries the stock pipeline defaults. */
trackseg_status trackseg_config_create(trackseg_config** out_config);

/* Loads a flat "key = value" file; unknown keys are errors. */
trackseg_status trackseg_config_load(const char* path, trackseg_config** out_config);

trackseg_status trackseg_config_set(trackseg_config* config, const char* key, const char* value);

void trackseg_config_free(trackseg_config* config);

/* Pipeline ---------------------------------------------------------------- */

/* Runs detection filtering, short-term association and long-term merging on
 * one video. frames_dir holds the frame images plus a meta.txt sidecar;
 * detections_path is the per-line detections file; the resulting tracks file
 * is written to output_path. */
trackseg_status trackseg_track(const trackseg_config* config, const char* frames_dir,
                               const char* detections_path, const char* output_path);

/* Evaluation -------------------------------------------------------------- */

trackseg_status trackseg_evaluate(const char* ground_truth_path, const char* predictions_path,
                                  trackseg_report** out_report);

/* Known keys: HOTA, DetA, AssA, and per-threshold variants HOTA_0.05 up to
 * HOTA_0.95 (likewise for DetA and AssA). */
trackseg_status trackseg_report_value(const trackseg_report* report, const char* key,
                                      double* out_value);

/* Borrowed pointer into the report; machine_readable selects the
 * line-delimited "key = value" form over the human-readable table. */
trackseg_status trackseg_report_text(const trackseg_report* report, int machine_readable,
                                     const char** out_text);

void trackseg_report_free(trackseg_report* report);

/* Synthetic scenes --------------------------------------------------------- */

/* Renders a scene description into output_dir: a frames/ directory of PGM
 * images with meta.txt, plus dets.txt and gt.txt. */
trackseg_status trackseg_synth(const char* spec_path, const char* output_dir);

#ifdef __cplusplus
}
#endif

#endif /* TRACKSEG_H */
