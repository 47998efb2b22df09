/*
 * Progressive code-switching laboratory - C API.
 *
 * The shared library wraps the C++ core behind an opaque session handle.
 * Configure a session with key=value pairs (or a config file), then run one
 * of the commands: synth, measure, train, eval, export, ablate. Every call
 * returns a status code; pcs_last_error() describes the most recent failure.
 */
#ifndef PCS_H
#define PCS_H

#include <stddef.h>

#if defined(_WIN32)
#define PCS_API __declspec(dllexport)
#else
#define PCS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pcs_status {
    PCS_OK = 0,
    PCS_ERR_CONFIG = 1,   /* bad or missing configuration */
    PCS_ERR_DATA = 2,     /* malformed input files or values */
    PCS_ERR_TRAINING = 3, /* divergence or numeric failure during training */
    PCS_ERR_IO = 4,       /* filesystem errors */
    PCS_ERR_INVALID = 5,  /* null handles, bad arguments */
    PCS_ERR_INTERNAL = 6
} pcs_status;

typedef struct pcs_session pcs_session;

/* Library version string, e.g. "pcs 0.1.0". Never NULL. */
PCS_API const char* pcs_version(void);

PCS_API pcs_status pcs_session_create(pcs_session** out_session);
PCS_API void pcs_session_destroy(pcs_session* session);

/* Set one configuration key. Unknown keys are rejected with PCS_ERR_CONFIG. */
PCS_API pcs_status pcs_session_set(pcs_session* session, const char* key, const char* value);

/* Read back a key's effective value (override or default) into buf. Returns
 * PCS_ERR_INVALID if buf is too small; required size goes to *out_len. */
PCS_API pcs_status pcs_session_get(pcs_session* session, const char* key, char* buf,
                                   size_t buf_len, size_t* out_len);

/* Load "key=value" lines; '#' starts a comment. */
PCS_API pcs_status pcs_session_load_config(pcs_session* session, const char* path);

/* Message for the session's most recent failure; empty string if none. */
PCS_API const char* pcs_last_error(const pcs_session* session);

PCS_API pcs_status pcs_run_synth(pcs_session* session);
PCS_API pcs_status pcs_run_measure(pcs_session* session);
PCS_API pcs_status pcs_run_train(pcs_session* session);
PCS_API pcs_status pcs_run_eval(pcs_session* session);
PCS_API pcs_status pcs_run_export(pcs_session* session);
PCS_API pcs_status pcs_run_ablate(pcs_session* session);

/* Run a command by name ("synth", "measure", "train", "eval", "export",
 * "ablate"); convenience for CLI-style dispatch. */
PCS_API pcs_status pcs_run(pcs_session* session, const char* command);

#ifdef __cplusplus
}
#endif

#endif /* PCS_H */
