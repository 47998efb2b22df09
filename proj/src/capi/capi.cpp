#include "pcs.h"

#include <cstring>
#include <string>

#include "core/common.hpp"
#include "core/experiment.hpp"

struct pcs_session {
    pcs::ExperimentConfig config;
    std::string last_error;
};

namespace {

pcs_status classify(const std::exception& e) {
    if (dynamic_cast<const pcs::ConfigError*>(&e)) return PCS_ERR_CONFIG;
    if (dynamic_cast<const pcs::DataError*>(&e)) return PCS_ERR_DATA;
    if (dynamic_cast<const pcs::TrainingError*>(&e)) return PCS_ERR_TRAINING;
    if (dynamic_cast<const pcs::NumericError*>(&e)) return PCS_ERR_TRAINING;
    if (dynamic_cast<const pcs::IoError*>(&e)) return PCS_ERR_IO;
    return PCS_ERR_INTERNAL;
}

template <typename Fn>
pcs_status guarded(pcs_session* session, Fn&& fn) {
    if (!session) return PCS_ERR_INVALID;
    session->last_error.clear();
    try {
        fn();
        return PCS_OK;
    } catch (const std::exception& e) {
        session->last_error = e.what();
        return classify(e);
    } catch (...) {
        session->last_error = "unknown error";
        return PCS_ERR_INTERNAL;
    }
}

}  // namespace

extern "C" {

const char* pcs_version(void) { return pcs::version_string(); }

pcs_status pcs_session_create(pcs_session** out_session) {
    if (!out_session) return PCS_ERR_INVALID;
    try {
        *out_session = new pcs_session();
        return PCS_OK;
    } catch (...) {
        *out_session = nullptr;
        return PCS_ERR_INTERNAL;
    }
}

void pcs_session_destroy(pcs_session* session) { delete session; }

pcs_status pcs_session_set(pcs_session* session, const char* key, const char* value) {
    if (!key || !value) {
        if (session) session->last_error = "null key or value";
        return PCS_ERR_INVALID;
    }
    return guarded(session, [&] { session->config.set(key, value); });
}

pcs_status pcs_session_get(pcs_session* session, const char* key, char* buf, size_t buf_len,
                           size_t* out_len) {
    if (!session || !key) return PCS_ERR_INVALID;
    session->last_error.clear();
    try {
        const std::string value = session->config.get(key);
        if (out_len) *out_len = value.size() + 1;
        if (!buf || buf_len < value.size() + 1) {
            session->last_error = "buffer too small";
            return PCS_ERR_INVALID;
        }
        std::memcpy(buf, value.c_str(), value.size() + 1);
        return PCS_OK;
    } catch (const std::exception& e) {
        session->last_error = e.what();
        return classify(e);
    }
}

pcs_status pcs_session_load_config(pcs_session* session, const char* path) {
    if (!path) {
        if (session) session->last_error = "null path";
        return PCS_ERR_INVALID;
    }
    return guarded(session, [&] { session->config.load_file(path); });
}

const char* pcs_last_error(const pcs_session* session) {
    return session ? session->last_error.c_str() : "";
}

pcs_status pcs_run(pcs_session* session, const char* command) {
    if (!command) {
        if (session) session->last_error = "null command";
        return PCS_ERR_INVALID;
    }
    return guarded(session, [&] { pcs::run_command(command, session->config); });
}

pcs_status pcs_run_synth(pcs_session* session) { return pcs_run(session, "synth"); }
pcs_status pcs_run_measure(pcs_session* session) { return pcs_run(session, "measure"); }
pcs_status pcs_run_train(pcs_session* session) { return pcs_run(session, "train"); }
pcs_status pcs_run_eval(pcs_session* session) { return pcs_run(session, "eval"); }
pcs_status pcs_run_export(pcs_session* session) { return pcs_run(session, "export"); }
pcs_status pcs_run_ablate(pcs_session* session) { return pcs_run(session, "ablate"); }

}  // extern "C"
