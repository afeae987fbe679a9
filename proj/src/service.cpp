#include "cds/service.hpp"

#include "cds/error.hpp"
#include "cds/study.hpp"

#include <algorithm>
#include <set>

namespace cds {

std::int64_t to_unix_ms(TimePoint tp) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(tp.time_since_epoch()).count();
}

nlohmann::json ChallengePayload::to_json() const {
    return {{"nonce", nonce},
            {"grid", {{"cols", grid.cols()}, {"rows", grid.rows()}}},
            {"cells", cells},
            {"head_cell", head_cell},
            {"tail_cell", tail_cell},
            {"expires_at", expires_at_ms},
            {"max_len", max_len}};
}

AuthService::AuthService(ServiceConfig config, ImageCatalog catalog, std::unique_ptr<Store> store, ClockFn clock)
    : config_(std::move(config)), catalog_(std::move(catalog)), store_(std::move(store)), clock_(std::move(clock)) {
    if (catalog_.size() != config_.grid.cell_count()) {
        throw Error(Errc::WrongImageCount, "display catalog has " + std::to_string(catalog_.size()) +
                                               " images, grid needs " + std::to_string(config_.grid.cell_count()));
    }
    if (!config_.study_log.empty() && std::filesystem::exists(config_.study_log)) {
        for (const auto& r : study::load_sessions(config_.study_log)) {
            attempts_[r.user] = std::max(attempts_[r.user], r.trial);
        }
    }
}

std::unique_ptr<AuthService> AuthService::open(const ServiceConfig& config, ClockFn clock) {
    ImageCatalog catalog = config.images_dir.empty()
                               ? synth_catalog(config.grid.cell_count(), config.synth_seed, config.image_dims)
                               : load_catalog(config.images_dir, config.image_dims, config.grid);
    return std::make_unique<AuthService>(config, catalog.truncated(config.grid.cell_count()),
                                         std::make_unique<JsonLinesStore>(config.storage_dir), std::move(clock));
}

EnrollResult AuthService::enroll(const std::string& user, const std::vector<std::string>& image_keys) {
    if (user.empty()) {
        throw Error(Errc::BadRequest, "user id must be non-empty");
    }
    if (image_keys.size() != config_.password_length) {
        throw Error(Errc::WrongPasswordLength, "expected " + std::to_string(config_.password_length) +
                                                   " pass-images, got " + std::to_string(image_keys.size()));
    }
    std::set<std::string> seen;
    for (const auto& key : image_keys) {
        if (!catalog_.id_of(key)) {
            throw Error(Errc::UnknownImageId, "image is not in the catalog");
        }
        if (!seen.insert(key).second) {
            throw Error(Errc::DuplicatePassImage, "pass-images must be distinct");
        }
    }

    UserRecord record{user, image_keys, UserState::PendingConfirmation, to_unix_ms(clock_())};
    if (!store_->insert_user(record)) {
        throw Error(Errc::DuplicateUser, "user already enrolled");
    }
    return {record, issue_for(record)};
}

ChallengePayload AuthService::issue_challenge(const std::string& user) {
    const auto record = store_->find_user(user);
    if (!record) {
        throw Error(Errc::UnknownUser, "no such user");
    }
    return issue_for(*record);
}

Password AuthService::password_of(const UserRecord& record) const {
    Password password;
    for (const auto& key : record.pass_images) {
        const auto id = catalog_.id_of(key);
        if (!id) {
            throw Error(Errc::UnknownImageId, "stored pass-image no longer in catalog");
        }
        password.image_ids.push_back(*id);
    }
    return password;
}

ChallengePayload AuthService::issue_for(const UserRecord& record) {
    const TimePoint now = clock_();
    ChallengeConfig cc;
    cc.max_len_override = config_.max_length_override;
    cc.ttl = config_.ttl;
    cc.degrade = config_.degrade;
    const auto ids = catalog_.ids();
    const Challenge challenge = generate_challenge(password_of(record), ids, config_.grid, cc, random_seed(), now);

    ChallengeTicket ticket;
    ticket.nonce = challenge.nonce;
    ticket.user = record.user;
    ticket.confirmation = record.state == UserState::PendingConfirmation;
    ticket.grid = challenge.grid;
    for (ImageId id : challenge.layout.cell_to_image) {
        ticket.layout.push_back(catalog_.key_of(id));
    }
    ticket.head_cell = challenge.head_cell;
    ticket.tail_cell = challenge.tail_cell;
    ticket.max_len = challenge.max_len;
    ticket.degrade = challenge.degrade;
    ticket.issued_at_ms = to_unix_ms(now);
    ticket.expires_at_ms = to_unix_ms(challenge.expires_at);

    // Expired tickets linger one extra TTL so late submissions still get
    // ExpiredNonce rather than UnknownNonce.
    const auto ttl_ms = std::chrono::duration_cast<std::chrono::milliseconds>(config_.ttl).count();
    store_->purge_expired(ticket.issued_at_ms - ttl_ms);
    store_->insert_ticket(ticket);

    return {ticket.nonce, ticket.grid,           ticket.layout, ticket.head_cell,
            ticket.tail_cell, ticket.expires_at_ms, ticket.max_len};
}

Decision AuthService::verify_submission(const std::string& user, const std::string& nonce, const Polyline& polyline) {
    if (polyline.points.empty()) {
        throw Error(Errc::EmptyPolyline, "polyline has no points");
    }
    auto record = store_->find_user(user);
    if (!record) {
        throw Error(Errc::UnknownUser, "no such user");
    }
    const std::int64_t now_ms = to_unix_ms(clock_());
    const ConsumeResult consumed = store_->consume_ticket(nonce, user, now_ms);
    switch (consumed.status) {
        case ConsumeStatus::Unknown: throw Error(Errc::UnknownNonce, "no such challenge");
        case ConsumeStatus::Expired: throw Error(Errc::ExpiredNonce, "challenge expired");
        case ConsumeStatus::AlreadyConsumed: throw Error(Errc::ConsumedNonce, "challenge already used");
        case ConsumeStatus::Consumed: break;
    }
    const ChallengeTicket& ticket = *consumed.ticket;

    Challenge challenge;
    challenge.nonce = ticket.nonce;
    challenge.grid = ticket.grid;
    for (const auto& key : ticket.layout) {
        const auto id = catalog_.id_of(key);
        if (!id) {
            throw Error(Errc::UnknownImageId, "challenge image no longer in catalog");
        }
        challenge.layout.cell_to_image.push_back(*id);
    }
    challenge.head_cell = ticket.head_cell;
    challenge.tail_cell = ticket.tail_cell;
    challenge.max_len = ticket.max_len;
    challenge.degrade = ticket.degrade;

    Decision decision;
    try {
        decision = verify_trace(challenge, password_of(*record), map_polyline_to_cells(polyline, ticket.grid));
    } catch (const Error& e) {
        if (e.code() != Errc::InvalidRange) {
            throw;
        }
        decision = Decision::reject(Reason::Discontinuous);
    }

    if (decision.accepted && ticket.confirmation && record->state == UserState::PendingConfirmation) {
        record->state = UserState::Active;
        store_->update_user(*record);
    }
    log_attempt(user, ticket, decision.accepted, now_ms);
    return decision;
}

void AuthService::log_attempt(const std::string& user, const ChallengeTicket& ticket, bool success,
                              std::int64_t now_ms) {
    if (config_.study_log.empty()) {
        return;
    }
    std::lock_guard lock(log_mutex_);
    study::SessionRecord r;
    r.timestamp_ms = now_ms;
    r.user = user;
    r.scheme = "CDS";
    r.trial = ++attempts_[user];
    r.success = success;
    r.duration_s = static_cast<double>(std::max<std::int64_t>(1, now_ms - ticket.issued_at_ms)) / 1000.0;
    study::append_session(config_.study_log, r);
}

std::vector<std::uint8_t> AuthService::challenge_image(const std::string& nonce, Cell cell) const {
    const auto ticket = store_->find_ticket(nonce);
    if (!ticket) {
        throw Error(Errc::UnknownNonce, "no such challenge");
    }
    if (to_unix_ms(clock_()) >= ticket->expires_at_ms) {
        throw Error(Errc::ExpiredNonce, "challenge expired");
    }
    if (cell >= ticket->layout.size()) {
        throw Error(Errc::CellOutOfRange, "cell " + std::to_string(cell) + " outside the grid");
    }
    const auto id = catalog_.id_of(ticket->layout[cell]);
    if (!id) {
        throw Error(Errc::UnknownImageId, "challenge image no longer in catalog");
    }
    return encode_png(degrade_image(catalog_.raster(*id), ticket->degrade));
}

std::vector<std::uint8_t> AuthService::catalog_image(const std::string& key) const {
    const auto id = catalog_.id_of(key);
    if (!id) {
        throw Error(Errc::UnknownImageId, "image is not in the catalog");
    }
    return encode_png(catalog_.raster(*id));
}

std::vector<std::string> AuthService::catalog_keys() const {
    std::vector<std::string> keys;
    for (ImageId id : catalog_.ids()) {
        keys.push_back(catalog_.key_of(id));
    }
    return keys;
}

}  // namespace cds
