#pragma once

#include <map>
#include <string>
#include <vector>

#include "common.hpp"

namespace pcs {

// Flat key=value experiment configuration. Keys are fixed up front; unknown
// keys are rejected so manifests stay diffable and typos fail fast.
class ExperimentConfig {
public:
    ExperimentConfig() = default;

    static const std::map<std::string, std::string>& defaults();
    static bool known_key(const std::string& key);

    void set(const std::string& key, const std::string& value);
    void load_file(const std::string& path);  // key=value lines, '#' comments

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const;  // falls back to the default
    std::string require(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::size_t get_size(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<std::string> get_list(const std::string& key) const;  // comma separated
    std::vector<std::uint64_t> get_seeds() const;

    // Effective configuration (defaults overlaid with overrides), echoed into
    // every output manifest.
    std::map<std::string, std::string> echo() const;

private:
    std::map<std::string, std::string> values_;
};

// Command entry points shared by the C API and (through it) the CLI. Each
// writes its outputs plus a manifest under out_dir and prints a short
// deterministic summary to stdout.
void run_synth(const ExperimentConfig& config);
void run_measure(const ExperimentConfig& config);
void run_train(const ExperimentConfig& config);
void run_eval(const ExperimentConfig& config);
void run_export(const ExperimentConfig& config);
void run_ablate(const ExperimentConfig& config);

void run_command(const std::string& command, const ExperimentConfig& config);

}  // namespace pcs
