#pragma once

#include "cds/types.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace cds {

enum class UserState { PendingConfirmation, Active };

std::string_view to_string(UserState state) noexcept;

struct UserRecord {
    std::string user;
    /// Catalog keys (content hashes), story order.
    std::vector<std::string> pass_images;
    UserState state = UserState::PendingConfirmation;
    std::int64_t created_at_ms = 0;

    friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

/// A persisted challenge. Layout cells refer to catalog keys so tickets stay
/// meaningful across restarts.
struct ChallengeTicket {
    std::string nonce;
    std::string user;
    bool confirmation = false;
    GridSpec grid;
    std::vector<std::string> layout;
    Cell head_cell = 0;
    Cell tail_cell = 0;
    std::size_t max_len = 0;
    DegradeParams degrade;
    std::int64_t issued_at_ms = 0;
    std::int64_t expires_at_ms = 0;
    bool consumed = false;

    friend bool operator==(const ChallengeTicket&, const ChallengeTicket&) = default;
};

enum class ConsumeStatus { Consumed, Unknown, Expired, AlreadyConsumed };

struct ConsumeResult {
    ConsumeStatus status = ConsumeStatus::Unknown;
    std::optional<ChallengeTicket> ticket;
};

/// Storage behind the auth service. Implementations must make
/// `consume_ticket` atomic: across any set of concurrent callers for one
/// nonce, at most one sees ConsumeStatus::Consumed.
class Store {
public:
    virtual ~Store() = default;

    /// False if the user already exists.
    virtual bool insert_user(const UserRecord& record) = 0;
    virtual void update_user(const UserRecord& record) = 0;
    virtual std::optional<UserRecord> find_user(const std::string& user) const = 0;

    virtual void insert_ticket(const ChallengeTicket& ticket) = 0;
    virtual std::optional<ChallengeTicket> find_ticket(const std::string& nonce) const = 0;
    /// Marks the ticket consumed if it exists, belongs to `user`, has not
    /// expired at `now_ms` and was not consumed before.
    virtual ConsumeResult consume_ticket(const std::string& nonce, const std::string& user, std::int64_t now_ms) = 0;
    /// Drops tickets that expired before `cutoff_ms`.
    virtual std::size_t purge_expired(std::int64_t cutoff_ms) = 0;
    virtual std::size_t ticket_count() const = 0;
};

/// In-memory maps mirrored to two append-only JSON-lines files
/// (`users.jsonl`, `tickets.jsonl`) in `dir`; the last line for a key wins.
/// Files are compacted when the store is opened. An empty `dir` keeps
/// everything in memory.
class JsonLinesStore final : public Store {
public:
    explicit JsonLinesStore(std::filesystem::path dir = {});

    bool insert_user(const UserRecord& record) override;
    void update_user(const UserRecord& record) override;
    std::optional<UserRecord> find_user(const std::string& user) const override;

    void insert_ticket(const ChallengeTicket& ticket) override;
    std::optional<ChallengeTicket> find_ticket(const std::string& nonce) const override;
    ConsumeResult consume_ticket(const std::string& nonce, const std::string& user, std::int64_t now_ms) override;
    std::size_t purge_expired(std::int64_t cutoff_ms) override;
    std::size_t ticket_count() const override;

private:
    void load();
    void rewrite();
    void append(std::ofstream& file, const std::string& line);

    std::filesystem::path dir_;
    mutable std::shared_mutex users_mutex_;
    std::map<std::string, UserRecord> users_;
    mutable std::mutex tickets_mutex_;
    std::map<std::string, ChallengeTicket> tickets_;
    std::ofstream users_log_;
    std::ofstream tickets_log_;
};

std::string user_to_json_line(const UserRecord& record);
UserRecord user_from_json_line(const std::string& line);
std::string ticket_to_json_line(const ChallengeTicket& ticket);
ChallengeTicket ticket_from_json_line(const std::string& line);

}  // namespace cds
