#ifndef ADCNN_CONFIG_HPP
#define ADCNN_CONFIG_HPP

#include <cstdint>
#include <string>

#include "adcnn/dataset.hpp"
#include "adcnn/network.hpp"
#include "adcnn/scanner.hpp"

namespace adcnn {

/// Knobs for the synthetic data generator.
struct SynthConfig {
    std::size_t count = 600;      // total ROIs, balanced between the classes
    std::size_t image_size = 64;  // square ROI extent
    std::size_t exams = 0;        // whole exams to synthesize
    std::size_t exam_height = 1024;
    std::size_t exam_width = 1024;

    void validate() const;
};

/// Everything a run needs, mirrored by the JSON config file. Flags override
/// file values; unknown keys are rejected.
struct RunConfig {
    std::uint64_t seed = 0;
    NetworkConfig network;
    TrainingConfig train;
    SplitRatios split;
    SplitMode split_mode = SplitMode::roi_level;
    ScanGrid scan;
    SynthConfig synth;
    std::string dir = ".";

    void validate() const;
};

/// Parses the JSON config file; a file with only whitespace yields defaults.
/// Errors name the offending dotted key.
RunConfig load_config(const std::string& path);

/// JSON rendering of the resolved config (the run-log echo).
std::string dump_config(const RunConfig& config);

const char* to_string(SplitMode mode);
SplitMode split_mode_from_string(const std::string& s);

} // namespace adcnn

#endif // ADCNN_CONFIG_HPP
