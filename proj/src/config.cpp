#include "cds/config.hpp"

#include "cds/error.hpp"

#include <fstream>

namespace cds {

namespace {

const nlohmann::json* lookup(const nlohmann::json& doc, const std::string& dotted) {
    if (auto it = doc.find(dotted); it != doc.end()) {
        return &*it;
    }
    const nlohmann::json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = dotted.find('.', start);
        const std::string part = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!node->is_object()) {
            return nullptr;
        }
        auto it = node->find(part);
        if (it == node->end()) {
            return nullptr;
        }
        node = &*it;
        if (dot == std::string::npos) {
            return node;
        }
        start = dot + 1;
    }
}

template <typename T>
void read(const nlohmann::json& doc, const std::string& key, T& out) {
    if (const auto* v = lookup(doc, key); v && !v->is_null()) {
        try {
            out = v->get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::InvalidConfig, key + ": " + e.what());
        }
    }
}

void read_path(const nlohmann::json& doc, const std::string& key, const std::filesystem::path& base,
               std::filesystem::path& out) {
    std::string raw;
    read(doc, key, raw);
    if (!raw.empty()) {
        const std::filesystem::path p(raw);
        out = p.is_relative() && !base.empty() ? base / p : p;
    }
}

}  // namespace

ServiceConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) {
        throw Error(Errc::InvalidConfig, "config must be a JSON object");
    }
    ServiceConfig cfg;
    int cols = cfg.grid.cols();
    int rows = cfg.grid.rows();
    read(doc, "grid.cols", cols);
    read(doc, "grid.rows", rows);
    try {
        cfg.grid = GridSpec(cols, rows);
    } catch (const Error& e) {
        throw Error(Errc::InvalidConfig, e.what());
    }

    read(doc, "password.length", cfg.password_length);
    if (cfg.password_length < 1 || cfg.password_length + 2 > cfg.grid.cell_count()) {
        throw Error(Errc::InvalidConfig, "password.length must be in 1..cells-2");
    }
    long long ttl = cfg.ttl.count();
    read(doc, "challenge.ttl_seconds", ttl);
    if (ttl < 1) {
        throw Error(Errc::InvalidConfig, "challenge.ttl_seconds must be positive");
    }
    cfg.ttl = std::chrono::seconds(ttl);

    if (const auto* v = lookup(doc, "trace.max_length_override"); v && !v->is_null()) {
        std::size_t override_len = 0;
        read(doc, "trace.max_length_override", override_len);
        if (override_len < 1) {
            throw Error(Errc::InvalidConfig, "trace.max_length_override must be positive");
        }
        cfg.max_length_override = override_len;
    }
    read(doc, "service.debug_reasons", cfg.debug_reasons);
    read(doc, "service.listen_addr", cfg.listen_addr);
    split_listen_addr(cfg.listen_addr);

    read_path(doc, "images.dir", base_dir, cfg.images_dir);
    read(doc, "images.width", cfg.image_dims.width);
    read(doc, "images.height", cfg.image_dims.height);
    if (cfg.image_dims.width < 1 || cfg.image_dims.height < 1) {
        throw Error(Errc::InvalidConfig, "images.width and images.height must be positive");
    }
    read(doc, "images.synth_seed", cfg.synth_seed);
    read(doc, "degrade.alpha", cfg.degrade.alpha);
    read(doc, "degrade.beta", cfg.degrade.beta);
    validate_degrade(cfg.degrade);

    read_path(doc, "storage.dir", base_dir, cfg.storage_dir);
    read_path(doc, "service.static_dir", base_dir, cfg.static_dir);
    read_path(doc, "study.log", base_dir, cfg.study_log);
    return cfg;
}

ServiceConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw Error(Errc::IoError, "cannot read config " + file.string());
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidConfig, file.string() + ": " + e.what());
    }
    return config_from_json(doc, file.parent_path());
}

std::pair<std::string, int> split_listen_addr(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == addr.size()) {
        throw Error(Errc::InvalidConfig, "listen address must be host:port, got '" + addr + "'");
    }
    int port = 0;
    try {
        std::size_t used = 0;
        port = std::stoi(addr.substr(colon + 1), &used);
        if (used != addr.size() - colon - 1) {
            throw std::invalid_argument("trailing characters");
        }
    } catch (const std::exception&) {
        throw Error(Errc::InvalidConfig, "bad port in '" + addr + "'");
    }
    if (port < 0 || port > 65535) {
        throw Error(Errc::InvalidConfig, "port out of range in '" + addr + "'");
    }
    return {addr.substr(0, colon), port};
}

}  // namespace cds
