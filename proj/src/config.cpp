#include "adcnn/config.hpp"

#include <fstream>
#include <json.hpp>

#include "adcnn/error.hpp"

namespace adcnn {

using nlohmann::json;

void SynthConfig::validate() const {
    if (count == 0) throw ConfigError("synth.count must be >= 1");
    if (count % 2 != 0) throw ConfigError("synth.count must be even (balanced classes)");
    if (image_size == 0) throw ConfigError("synth.image_size must be >= 1");
    if (exams > 0 && (exam_height % 4 != 0 || exam_width % 4 != 0))
        throw ConfigError("synth.exam_height/exam_width must be multiples of 4");
}

void RunConfig::validate() const {
    network.validate();
    train.validate();
    split.validate();
    scan.validate();
    synth.validate();
    if (dir.empty()) throw ConfigError("paths.dir must not be empty");
}

const char* to_string(SplitMode mode) {
    return mode == SplitMode::roi_level ? "roi-level" : "paper-faithful";
}

SplitMode split_mode_from_string(const std::string& s) {
    if (s == "roi-level") return SplitMode::roi_level;
    if (s == "paper-faithful") return SplitMode::paper_faithful;
    throw ConfigError("split.mode must be 'roi-level' or 'paper-faithful', got '" + s + "'");
}

namespace {

[[noreturn]] void bad_key(const std::string& key, const char* why) {
    throw ConfigError("config key '" + key + "': " + why);
}

template <typename T>
T number_at(const json& v, const std::string& key) {
    if (!v.is_number()) bad_key(key, "expected a number");
    return v.get<T>();
}

std::size_t size_at(const json& v, const std::string& key) {
    if (!v.is_number_unsigned()) bad_key(key, "expected a non-negative integer");
    return v.get<std::size_t>();
}

std::string string_at(const json& v, const std::string& key) {
    if (!v.is_string()) bad_key(key, "expected a string");
    return v.get<std::string>();
}

void expect_object(const json& v, const std::string& key) {
    if (!v.is_object()) bad_key(key, "expected an object");
}

} // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    RunConfig cfg;
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return cfg;

    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    expect_object(root, "(root)");

    for (const auto& [key, value] : root.items()) {
        if (key == "seed") {
            cfg.seed = size_at(value, "seed");
        } else if (key == "network") {
            expect_object(value, "network");
            for (const auto& [k, v] : value.items()) {
                const std::string dotted = "network." + k;
                if (k == "input_size") cfg.network.input_size = size_at(v, dotted);
                else if (k == "kernel_size") cfg.network.kernel_size = size_at(v, dotted);
                else if (k == "base_filters") cfg.network.base_filters = size_at(v, dotted);
                else if (k == "target_map") cfg.network.target_map = size_at(v, dotted);
                else if (k == "classes") cfg.network.classes = size_at(v, dotted);
                else bad_key(dotted, "unknown key");
            }
        } else if (key == "train") {
            expect_object(value, "train");
            for (const auto& [k, v] : value.items()) {
                const std::string dotted = "train." + k;
                if (k == "batch_size") cfg.train.batch_size = size_at(v, dotted);
                else if (k == "learning_rate") cfg.train.learning_rate = number_at<double>(v, dotted);
                else if (k == "momentum") cfg.train.momentum = number_at<double>(v, dotted);
                else if (k == "max_epochs") cfg.train.max_epochs = size_at(v, dotted);
                else if (k == "patience") cfg.train.patience = size_at(v, dotted);
                else bad_key(dotted, "unknown key");
            }
        } else if (key == "split") {
            expect_object(value, "split");
            for (const auto& [k, v] : value.items()) {
                const std::string dotted = "split." + k;
                if (k == "train") cfg.split.train = number_at<double>(v, dotted);
                else if (k == "validation") cfg.split.validation = number_at<double>(v, dotted);
                else if (k == "test") cfg.split.test = number_at<double>(v, dotted);
                else if (k == "mode") cfg.split_mode = split_mode_from_string(string_at(v, dotted));
                else bad_key(dotted, "unknown key");
            }
        } else if (key == "scan") {
            expect_object(value, "scan");
            for (const auto& [k, v] : value.items()) {
                const std::string dotted = "scan." + k;
                if (k == "roi_size") cfg.scan.roi_size = size_at(v, dotted);
                else if (k == "stride") cfg.scan.stride = size_at(v, dotted);
                else if (k == "coverage_min") cfg.scan.coverage_min = number_at<double>(v, dotted);
                else bad_key(dotted, "unknown key");
            }
        } else if (key == "synth") {
            expect_object(value, "synth");
            for (const auto& [k, v] : value.items()) {
                const std::string dotted = "synth." + k;
                if (k == "count") cfg.synth.count = size_at(v, dotted);
                else if (k == "image_size") cfg.synth.image_size = size_at(v, dotted);
                else if (k == "exams") cfg.synth.exams = size_at(v, dotted);
                else if (k == "exam_height") cfg.synth.exam_height = size_at(v, dotted);
                else if (k == "exam_width") cfg.synth.exam_width = size_at(v, dotted);
                else bad_key(dotted, "unknown key");
            }
        } else if (key == "paths") {
            expect_object(value, "paths");
            for (const auto& [k, v] : value.items()) {
                const std::string dotted = "paths." + k;
                if (k == "dir") cfg.dir = string_at(v, dotted);
                else bad_key(dotted, "unknown key");
            }
        } else {
            bad_key(key, "unknown key");
        }
    }
    return cfg;
}

std::string dump_config(const RunConfig& cfg) {
    json root;
    root["seed"] = cfg.seed;
    root["network"] = {{"input_size", cfg.network.input_size},
                       {"kernel_size", cfg.network.kernel_size},
                       {"base_filters", cfg.network.base_filters},
                       {"target_map", cfg.network.target_map},
                       {"classes", cfg.network.classes}};
    root["train"] = {{"batch_size", cfg.train.batch_size},
                     {"learning_rate", cfg.train.learning_rate},
                     {"momentum", cfg.train.momentum},
                     {"max_epochs", cfg.train.max_epochs},
                     {"patience", cfg.train.patience}};
    root["split"] = {{"train", cfg.split.train},
                     {"validation", cfg.split.validation},
                     {"test", cfg.split.test},
                     {"mode", to_string(cfg.split_mode)}};
    root["scan"] = {{"roi_size", cfg.scan.roi_size},
                    {"stride", cfg.scan.stride},
                    {"coverage_min", cfg.scan.coverage_min}};
    root["synth"] = {{"count", cfg.synth.count},
                     {"image_size", cfg.synth.image_size},
                     {"exams", cfg.synth.exams},
                     {"exam_height", cfg.synth.exam_height},
                     {"exam_width", cfg.synth.exam_width}};
    root["paths"] = {{"dir", cfg.dir}};
    return root.dump(2);
}

} // namespace adcnn
