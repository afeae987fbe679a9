#include "cds/store.hpp"

#include "cds/error.hpp"

#include <nlohmann/json.hpp>

#include <sstream>

namespace cds {

using nlohmann::json;

std::string_view to_string(UserState state) noexcept {
    return state == UserState::Active ? "active" : "pending_confirmation";
}

std::string user_to_json_line(const UserRecord& r) {
    return json{{"user", r.user},
                {"pass_images", r.pass_images},
                {"state", to_string(r.state)},
                {"created_at_ms", r.created_at_ms}}
        .dump();
}

namespace {

UserRecord parse_user(const std::string& line) {
    const json j = json::parse(line);
    UserRecord r;
    r.user = j.at("user").get<std::string>();
    r.pass_images = j.at("pass_images").get<std::vector<std::string>>();
    const auto state = j.at("state").get<std::string>();
    if (state == "active") {
        r.state = UserState::Active;
    } else if (state == "pending_confirmation") {
        r.state = UserState::PendingConfirmation;
    } else {
        throw Error(Errc::CorruptRecord, "unknown user state '" + state + "'");
    }
    r.created_at_ms = j.at("created_at_ms").get<std::int64_t>();
    return r;
}

}  // namespace

std::string ticket_to_json_line(const ChallengeTicket& t) {
    return json{{"nonce", t.nonce},
                {"user", t.user},
                {"confirmation", t.confirmation},
                {"grid", {{"cols", t.grid.cols()}, {"rows", t.grid.rows()}}},
                {"layout", t.layout},
                {"head_cell", t.head_cell},
                {"tail_cell", t.tail_cell},
                {"max_len", t.max_len},
                {"degrade", {{"alpha", t.degrade.alpha}, {"beta", t.degrade.beta}}},
                {"issued_at_ms", t.issued_at_ms},
                {"expires_at_ms", t.expires_at_ms},
                {"consumed", t.consumed}}
        .dump();
}

namespace {

ChallengeTicket parse_ticket(const std::string& line) {
    const json j = json::parse(line);
    ChallengeTicket t;
    t.nonce = j.at("nonce").get<std::string>();
    t.user = j.at("user").get<std::string>();
    t.confirmation = j.at("confirmation").get<bool>();
    t.grid = GridSpec(j.at("grid").at("cols").get<int>(), j.at("grid").at("rows").get<int>());
    t.layout = j.at("layout").get<std::vector<std::string>>();
    t.head_cell = j.at("head_cell").get<Cell>();
    t.tail_cell = j.at("tail_cell").get<Cell>();
    t.max_len = j.at("max_len").get<std::size_t>();
    t.degrade.alpha = j.at("degrade").at("alpha").get<double>();
    t.degrade.beta = j.at("degrade").at("beta").get<double>();
    t.issued_at_ms = j.at("issued_at_ms").get<std::int64_t>();
    t.expires_at_ms = j.at("expires_at_ms").get<std::int64_t>();
    t.consumed = j.at("consumed").get<bool>();
    return t;
}

}  // namespace

namespace {

template <typename Parse>
auto parse_or_corrupt(const std::string& line, Parse parse) {
    try {
        return parse(line);
    } catch (const json::exception& e) {
        throw Error(Errc::CorruptRecord, e.what());
    }
}

}  // namespace

UserRecord user_from_json_line(const std::string& line) {
    return parse_or_corrupt(line, parse_user);
}

ChallengeTicket ticket_from_json_line(const std::string& line) {
    return parse_or_corrupt(line, parse_ticket);
}

namespace {

const char* kUsersFile = "users.jsonl";
const char* kTicketsFile = "tickets.jsonl";

/// Complete lines of `path`. A final line without '\n' is an interrupted
/// append and is dropped.
std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::vector<std::string> lines;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return lines;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    std::size_t start = 0;
    while (true) {
        const auto nl = text.find('\n', start);
        if (nl == std::string::npos) {
            break;
        }
        if (nl > start) {
            lines.push_back(text.substr(start, nl - start));
        }
        start = nl + 1;
    }
    return lines;
}

void write_atomically(const std::filesystem::path& path, const std::vector<std::string>& lines) {
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        for (const auto& line : lines) {
            out << line << '\n';
        }
        if (!out) {
            throw Error(Errc::IoError, "cannot write " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string tombstone(const std::string& nonce) {
    return json{{"nonce", nonce}, {"deleted", true}}.dump();
}

}  // namespace

JsonLinesStore::JsonLinesStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (dir_.empty()) {
        return;
    }
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) {
        throw Error(Errc::IoError, "cannot create storage dir " + dir_.string() + ": " + ec.message());
    }
    load();
    rewrite();
    users_log_.open(dir_ / kUsersFile, std::ios::app | std::ios::binary);
    tickets_log_.open(dir_ / kTicketsFile, std::ios::app | std::ios::binary);
    if (!users_log_ || !tickets_log_) {
        throw Error(Errc::IoError, "cannot open storage files in " + dir_.string());
    }
}

void JsonLinesStore::load() {
    std::size_t n = 0;
    try {
        for (const auto& line : read_lines(dir_ / kUsersFile)) {
            ++n;
            auto record = user_from_json_line(line);
            users_[record.user] = std::move(record);
        }
        n = 0;
        for (const auto& line : read_lines(dir_ / kTicketsFile)) {
            ++n;
            const json j = json::parse(line);
            if (j.value("deleted", false)) {
                tickets_.erase(j.at("nonce").get<std::string>());
                continue;
            }
            auto ticket = ticket_from_json_line(line);
            tickets_[ticket.nonce] = std::move(ticket);
        }
    } catch (const json::exception& e) {
        throw Error(Errc::CorruptRecord, "storage line " + std::to_string(n) + ": " + e.what());
    }
}

void JsonLinesStore::rewrite() {
    std::vector<std::string> lines;
    for (const auto& [user, record] : users_) {
        lines.push_back(user_to_json_line(record));
    }
    write_atomically(dir_ / kUsersFile, lines);
    lines.clear();
    for (const auto& [nonce, ticket] : tickets_) {
        lines.push_back(ticket_to_json_line(ticket));
    }
    write_atomically(dir_ / kTicketsFile, lines);
}

void JsonLinesStore::append(std::ofstream& file, const std::string& line) {
    if (dir_.empty()) {
        return;
    }
    file << line << '\n';
    file.flush();
    if (!file) {
        throw Error(Errc::IoError, "storage write failed in " + dir_.string());
    }
}

bool JsonLinesStore::insert_user(const UserRecord& record) {
    std::unique_lock lock(users_mutex_);
    if (!users_.emplace(record.user, record).second) {
        return false;
    }
    append(users_log_, user_to_json_line(record));
    return true;
}

void JsonLinesStore::update_user(const UserRecord& record) {
    std::unique_lock lock(users_mutex_);
    auto it = users_.find(record.user);
    if (it == users_.end()) {
        throw Error(Errc::UnknownUser, "no such user");
    }
    it->second = record;
    append(users_log_, user_to_json_line(record));
}

std::optional<UserRecord> JsonLinesStore::find_user(const std::string& user) const {
    std::shared_lock lock(users_mutex_);
    auto it = users_.find(user);
    if (it == users_.end()) {
        return std::nullopt;
    }
    return it->second;
}

void JsonLinesStore::insert_ticket(const ChallengeTicket& ticket) {
    std::lock_guard lock(tickets_mutex_);
    tickets_[ticket.nonce] = ticket;
    append(tickets_log_, ticket_to_json_line(ticket));
}

std::optional<ChallengeTicket> JsonLinesStore::find_ticket(const std::string& nonce) const {
    std::lock_guard lock(tickets_mutex_);
    auto it = tickets_.find(nonce);
    if (it == tickets_.end()) {
        return std::nullopt;
    }
    return it->second;
}

ConsumeResult JsonLinesStore::consume_ticket(const std::string& nonce, const std::string& user,
                                             std::int64_t now_ms) {
    std::lock_guard lock(tickets_mutex_);
    auto it = tickets_.find(nonce);
    if (it == tickets_.end() || it->second.user != user) {
        return {ConsumeStatus::Unknown, std::nullopt};
    }
    ChallengeTicket& ticket = it->second;
    if (ticket.consumed) {
        return {ConsumeStatus::AlreadyConsumed, std::nullopt};
    }
    if (now_ms >= ticket.expires_at_ms) {
        return {ConsumeStatus::Expired, std::nullopt};
    }
    ticket.consumed = true;
    append(tickets_log_, ticket_to_json_line(ticket));
    return {ConsumeStatus::Consumed, ticket};
}

std::size_t JsonLinesStore::purge_expired(std::int64_t cutoff_ms) {
    std::lock_guard lock(tickets_mutex_);
    std::size_t removed = 0;
    for (auto it = tickets_.begin(); it != tickets_.end();) {
        if (it->second.expires_at_ms < cutoff_ms) {
            append(tickets_log_, tombstone(it->first));
            it = tickets_.erase(it);
            ++removed;
        } else {
            ++it;
        }
    }
    return removed;
}

std::size_t JsonLinesStore::ticket_count() const {
    std::lock_guard lock(tickets_mutex_);
    return tickets_.size();
}

}  // namespace cds
