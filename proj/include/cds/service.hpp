#pragma once

#include "cds/config.hpp"
#include "cds/image.hpp"
#include "cds/scheme.hpp"
#include "cds/store.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace cds {

/// What the client receives for a challenge. Never carries pass-images.
struct ChallengePayload {
    std::string nonce;
    GridSpec grid;
    std::vector<std::string> cells;  ///< catalog key per cell, row-major
    Cell head_cell = 0;
    Cell tail_cell = 0;
    std::int64_t expires_at_ms = 0;
    std::size_t max_len = 0;

    nlohmann::json to_json() const;
};

struct EnrollResult {
    UserRecord record;
    ChallengePayload confirmation;
};

/// Challenge-response front end over a Store. Thread-safe.
class AuthService {
public:
    using ClockFn = std::function<TimePoint()>;

    AuthService(ServiceConfig config, ImageCatalog catalog, std::unique_ptr<Store> store,
                ClockFn clock = [] { return Clock::now(); });

    /// Catalog from `images.dir` (or synthesized), truncated to one image per
    /// cell; store from `storage.dir`.
    static std::unique_ptr<AuthService> open(const ServiceConfig& config, ClockFn clock = [] { return Clock::now(); });

    EnrollResult enroll(const std::string& user, const std::vector<std::string>& image_keys);
    ChallengePayload issue_challenge(const std::string& user);
    Decision verify_submission(const std::string& user, const std::string& nonce, const Polyline& polyline);

    /// PNG of the degraded image in `cell` of the challenge.
    std::vector<std::uint8_t> challenge_image(const std::string& nonce, Cell cell) const;
    /// PNG of a catalog image at full quality (enrollment picker).
    std::vector<std::uint8_t> catalog_image(const std::string& key) const;
    std::vector<std::string> catalog_keys() const;

    const ServiceConfig& config() const noexcept { return config_; }
    const ImageCatalog& catalog() const noexcept { return catalog_; }
    std::optional<UserRecord> find_user(const std::string& user) const { return store_->find_user(user); }

private:
    ChallengePayload issue_for(const UserRecord& record);
    Password password_of(const UserRecord& record) const;
    void log_attempt(const std::string& user, const ChallengeTicket& ticket, bool success, std::int64_t now_ms);

    ServiceConfig config_;
    ImageCatalog catalog_;
    std::unique_ptr<Store> store_;
    ClockFn clock_;

    std::mutex log_mutex_;
    std::map<std::string, int> attempts_;
};

std::int64_t to_unix_ms(TimePoint tp);

}  // namespace cds
