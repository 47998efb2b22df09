// Command-line front end. Links only the C API.
#include <cstdio>
#include <cstring>
#include <string>

#include "pcs.h"

namespace {

void print_usage(const char* prog) {
    std::fprintf(stderr,
                 "Usage: %s <command> [--config FILE] [--key=value ...]\n"
                 "\n"
                 "Commands:\n"
                 "  synth    generate a synthetic multilingual benchmark (out_dir, seed, synth.*)\n"
                 "  measure  pretrain the difficulty measurer, cache relevance profiles\n"
                 "           (task_dir, out_dir, seed, measure.*)\n"
                 "  train    curriculum training for one mode (task_dir, out_dir, mode, seeds)\n"
                 "  eval     accuracy table for a checkpoint (checkpoint, task_dir, out_dir)\n"
                 "  export   similarity/embedding/learning-curve CSVs (export.kind, ...)\n"
                 "  ablate   run several modes with a shared measurer (modes, seeds, ...)\n"
                 "\n"
                 "Modes: pcs no_cl ratio_cl grad_cl anti_cl tgt_only no_scheduler no_cs\n"
                 "Flags mirror config keys: --train.batch_size=16 --curriculum.delta=0.1 ...\n"
                 "Exit codes: 0 ok, 1 config, 2 data, 3 training, 4 io, 5 usage, 6 internal\n",
                 prog);
}

int fail(pcs_session* session, pcs_status status, const char* what) {
    std::fprintf(stderr, "error (%s): %s\n", what,
                 session ? pcs_last_error(session) : "no session");
    return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        print_usage(argv[0]);
        return static_cast<int>(PCS_ERR_INVALID);
    }
    const std::string command = argv[1];
    if (command == "--help" || command == "-h" || command == "help") {
        print_usage(argv[0]);
        return 0;
    }
    if (command == "--version") {
        std::printf("%s\n", pcs_version());
        return 0;
    }

    pcs_session* session = nullptr;
    if (pcs_session_create(&session) != PCS_OK) {
        std::fprintf(stderr, "error: cannot create session\n");
        return static_cast<int>(PCS_ERR_INTERNAL);
    }

    pcs_status status = PCS_OK;
    for (int i = 2; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--config") {
            if (i + 1 >= argc) {
                std::fprintf(stderr, "error: --config needs a path\n");
                pcs_session_destroy(session);
                return static_cast<int>(PCS_ERR_INVALID);
            }
            status = pcs_session_load_config(session, argv[++i]);
            if (status != PCS_OK) {
                const int code = fail(session, status, "config file");
                pcs_session_destroy(session);
                return code;
            }
            continue;
        }
        if (arg.rfind("--", 0) != 0) {
            std::fprintf(stderr, "error: unexpected argument '%s'\n", arg.c_str());
            pcs_session_destroy(session);
            return static_cast<int>(PCS_ERR_INVALID);
        }
        arg.erase(0, 2);
        std::string key, value;
        const std::size_t eq = arg.find('=');
        if (eq != std::string::npos) {
            key = arg.substr(0, eq);
            value = arg.substr(eq + 1);
        } else if (i + 1 < argc) {
            key = arg;
            value = argv[++i];
        } else {
            std::fprintf(stderr, "error: flag '--%s' needs a value\n", arg.c_str());
            pcs_session_destroy(session);
            return static_cast<int>(PCS_ERR_INVALID);
        }
        status = pcs_session_set(session, key.c_str(), value.c_str());
        if (status != PCS_OK) {
            const int code = fail(session, status, key.c_str());
            pcs_session_destroy(session);
            return code;
        }
    }

    status = pcs_run(session, command.c_str());
    int code = 0;
    if (status != PCS_OK) code = fail(session, status, command.c_str());
    pcs_session_destroy(session);
    return code;
}
