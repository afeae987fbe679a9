#pragma once

#include "cds/image.hpp"
#include "cds/random.hpp"
#include "cds/types.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>

namespace cds {

/// Deployment settings. Keys may be given nested (`{"images": {"dir": ...}}`)
/// or flat (`{"images.dir": ...}`); flat wins when both are present.
///
///   images.dir, images.width, images.height, images.synth_seed
///   degrade.alpha, degrade.beta
///   grid.cols, grid.rows, password.length
///   challenge.ttl_seconds, trace.max_length_override
///   service.debug_reasons, service.listen_addr, service.static_dir
///   storage.dir, study.log
///
/// Relative paths are resolved against the config file's directory.
struct ServiceConfig {
    GridSpec grid{4, 6};
    std::size_t password_length = 5;
    std::chrono::seconds ttl{120};
    std::optional<std::size_t> max_length_override;
    bool debug_reasons = false;
    std::string listen_addr = "127.0.0.1:8080";

    /// Empty: use a synthesized catalog.
    std::filesystem::path images_dir;
    Dims image_dims{160, 120};
    Seed synth_seed = 1;
    DegradeParams degrade;

    /// Empty: keep users and tickets in memory only.
    std::filesystem::path storage_dir;
    std::filesystem::path static_dir;
    std::filesystem::path study_log;
};

ServiceConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ServiceConfig load_config(const std::filesystem::path& file);

/// Splits "host:port"; throws InvalidConfig.
std::pair<std::string, int> split_listen_addr(const std::string& addr);

}  // namespace cds
