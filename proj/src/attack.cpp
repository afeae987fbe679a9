#include "cds/attack.hpp"

#include "cds/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace cds {

std::uint64_t password_space(std::uint64_t catalog_size, std::uint64_t length) {
    if (length < 1 || length > catalog_size) {
        throw Error(Errc::InvalidRange, "password length must be in 1..N");
    }
    std::uint64_t total = 1;
    for (std::uint64_t k = 0; k < length; ++k) {
        const std::uint64_t factor = catalog_size - k;
        if (total > UINT64_MAX / factor) {
            throw Error(Errc::SpaceTooLarge, "password space overflows 64 bits");
        }
        total *= factor;
    }
    return total;
}

double entropy_bits(std::uint64_t catalog_size, std::uint64_t length) {
    if (length < 1 || length > catalog_size) {
        throw Error(Errc::InvalidRange, "password length must be in 1..N");
    }
    double bits = 0.0;
    for (std::uint64_t k = 0; k < length; ++k) {
        bits += std::log2(static_cast<double>(catalog_size - k));
    }
    return bits;
}

PasswordEnumerator::PasswordEnumerator(std::uint32_t catalog_size, std::uint32_t length, std::uint64_t guard)
    : catalog_size_(catalog_size), current_(length), used_(catalog_size, false) {
    if (password_space(catalog_size, length) > guard) {
        throw Error(Errc::SpaceTooLarge, "enumeration of " + std::to_string(catalog_size) + "P" +
                                             std::to_string(length) + " exceeds guard");
    }
}

bool PasswordEnumerator::next(std::vector<ImageId>& out) {
    if (done_) {
        return false;
    }
    const std::size_t n = current_.size();
    // Smallest unused value strictly greater than `after`, or catalog_size_.
    auto next_free = [&](std::uint32_t after_plus_one) {
        std::uint32_t v = after_plus_one;
        while (v < catalog_size_ && used_[v]) {
            ++v;
        }
        return v;
    };
    if (!started_) {
        started_ = true;
        for (std::size_t i = 0; i < n; ++i) {
            current_[i] = ImageId{next_free(0)};
            used_[current_[i].value] = true;
        }
        out = current_;
        return true;
    }
    // Advance the rightmost position that can still increase, then refill
    // the suffix with the smallest free values.
    std::size_t pos = n;
    while (pos > 0) {
        --pos;
        used_[current_[pos].value] = false;
        const std::uint32_t v = next_free(current_[pos].value + 1);
        if (v < catalog_size_) {
            current_[pos] = ImageId{v};
            used_[v] = true;
            for (std::size_t i = pos + 1; i < n; ++i) {
                current_[i] = ImageId{next_free(0)};
                used_[current_[i].value] = true;
            }
            out = current_;
            return true;
        }
    }
    done_ = true;
    return false;
}

std::vector<std::vector<ImageId>> enumerate_passwords(std::uint32_t catalog_size, std::uint32_t length,
                                                      std::uint64_t guard) {
    PasswordEnumerator it(catalog_size, length, guard);
    std::vector<std::vector<ImageId>> out;
    out.reserve(password_space(catalog_size, length));
    std::vector<ImageId> tuple;
    while (it.next(tuple)) {
        out.push_back(tuple);
    }
    return out;
}

double RateEstimate::rate() const noexcept {
    return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
}

double RateEstimate::sigma() const noexcept {
    if (trials == 0) {
        return 0.0;
    }
    const double p = rate();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

double RateEstimate::lower_3sigma() const noexcept {
    return std::max(0.0, rate() - 3.0 * sigma());
}

double RateEstimate::upper_3sigma() const noexcept {
    return std::min(1.0, rate() + 3.0 * sigma());
}

bool RateEstimate::within_3sigma_of(double p) const noexcept {
    if (trials == 0) {
        return false;
    }
    const double bound = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    return std::abs(rate() - p) <= bound;
}

namespace {

std::vector<ImageId> random_password(Rng& rng, std::size_t catalog_size, std::size_t length) {
    std::vector<ImageId> pool(catalog_size);
    for (std::size_t i = 0; i < catalog_size; ++i) {
        pool[i] = ImageId{static_cast<std::uint32_t>(i)};
    }
    for (std::size_t i = 0; i < length; ++i) {
        std::swap(pool[i], pool[i + uniform_below(rng, catalog_size - i)]);
    }
    pool.resize(length);
    return pool;
}

std::vector<ImageId> catalog_for(const GridSpec& grid) {
    std::vector<ImageId> ids(grid.cell_count());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        ids[i] = ImageId{static_cast<std::uint32_t>(i)};
    }
    return ids;
}

Challenge lab_challenge(const SchemeConfig& config, const Password& password,
                        std::span<const ImageId> catalog, Seed seed) {
    ChallengeConfig cc;
    cc.max_len_override = config.max_len_override;
    return generate_challenge(password, catalog, config.grid, cc, seed);
}

}  // namespace

GuessAttackReport simulate_guess_attack(const SchemeConfig& config, std::uint64_t trials, Seed seed,
                                        GuessMode mode) {
    if (trials < 1) {
        throw Error(Errc::InvalidRange, "guess attack needs at least one trial");
    }
    const auto catalog = catalog_for(config.grid);
    GuessAttackReport report;
    report.password_match.trials = trials;
    report.trace_accept.trials = trials;
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, t));
        const Password truth{random_password(rng, catalog.size(), config.password_length)};
        const Challenge challenge = lab_challenge(config, truth, catalog, rng());
        const Password guess =
            mode == GuessMode::ForceTruth ? truth : Password{random_password(rng, catalog.size(), config.password_length)};

        if (guess.image_ids == truth.image_ids) {
            ++report.password_match.successes;
        }
        if (verify_trace(challenge, truth, synthesize_trace(challenge, guess)).accepted) {
            ++report.trace_accept.successes;
        }
    }
    return report;
}

Observation observe_session(const Challenge& challenge, const CellTrace& trace, double retention, Seed seed) {
    if (!(retention >= 0.0 && retention <= 1.0)) {
        throw Error(Errc::InvalidRange, "retention must be in [0, 1]");
    }
    if (trace.cells.empty()) {
        throw Error(Errc::InvalidRange, "cannot observe an empty trace");
    }
    Observation obs;
    obs.session_id = challenge.nonce;
    obs.layout = challenge.layout.cell_to_image;
    obs.head_image = challenge.layout.image_at(challenge.head_cell);
    obs.tail_image = challenge.layout.image_at(challenge.tail_cell);

    Rng rng(seed);
    const auto images = trace_images(challenge.layout, trace);
    obs.image_sequence.reserve(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        const bool endpoint = i == 0 || i + 1 == images.size();
        if (endpoint || uniform_unit(rng) < retention) {
            obs.image_sequence.emplace_back(images[i]);
        } else {
            obs.image_sequence.emplace_back(std::nullopt);
        }
    }
    return obs;
}

bool embeds_in(std::span<const ImageId> tuple, std::span<const std::optional<ImageId>> pattern) noexcept {
    std::size_t matched = 0;
    for (const auto& slot : pattern) {
        if (matched == tuple.size()) {
            break;
        }
        if (!slot || *slot == tuple[matched]) {
            ++matched;
        }
    }
    return matched == tuple.size();
}

std::span<const ImageId> CandidateSet::at(std::size_t index) const {
    return {flat_.data() + index * length_, length_};
}

bool CandidateSet::contains(std::span<const ImageId> tuple) const {
    if (tuple.size() != length_) {
        return false;
    }
    std::size_t lo = 0;
    std::size_t hi = size();
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        const auto probe = at(mid);
        if (std::lexicographical_compare(probe.begin(), probe.end(), tuple.begin(), tuple.end())) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    return lo < size() && std::equal(tuple.begin(), tuple.end(), at(lo).begin());
}

void CandidateSet::push_back(std::span<const ImageId> tuple) {
    flat_.insert(flat_.end(), tuple.begin(), tuple.end());
}

CandidateTracker::CandidateTracker(std::size_t length, std::uint64_t guard)
    : length_(length), guard_(guard), set_(length) {
    if (length < 1) {
        throw Error(Errc::InvalidRange, "candidate tuples need length >= 1");
    }
}

void CandidateTracker::add(const Observation& observation) {
    excluded_.push_back(observation.head_image);
    excluded_.push_back(observation.tail_image);
    const auto is_excluded = [&](ImageId id) {
        return std::find(excluded_.begin(), excluded_.end(), id) != excluded_.end();
    };
    const auto& pattern = observation.image_sequence;

    if (count_++ > 0) {
        set_.retain_if([&](std::span<const ImageId> tuple) {
            return std::none_of(tuple.begin(), tuple.end(), is_excluded) && embeds_in(tuple, pattern);
        });
        return;
    }

    std::vector<ImageId> universe;
    for (ImageId id : observation.layout) {
        if (!is_excluded(id)) {
            universe.push_back(id);
        }
    }
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());

    // next_match[p][u]: first position >= p whose slot matches universe[u]
    // (the image itself or an unseen crossing); pattern.size() if none.
    const std::size_t len = pattern.size();
    std::vector<std::size_t> next_match((len + 1) * universe.size(), len);
    for (std::size_t p = len; p-- > 0;) {
        for (std::size_t u = 0; u < universe.size(); ++u) {
            const bool hit = !pattern[p] || *pattern[p] == universe[u];
            next_match[p * universe.size() + u] = hit ? p : next_match[(p + 1) * universe.size() + u];
        }
    }

    // Depth-first in increasing image order, so tuples come out sorted and
    // each is produced once. Greedy earliest matching is exact for
    // subsequence embedding.
    std::vector<ImageId> tuple(length_);
    std::vector<bool> used(universe.size(), false);
    std::uint64_t produced = 0;
    auto extend = [&](auto& self, std::size_t depth, std::size_t pos) -> void {
        if (depth == length_) {
            if (++produced > guard_) {
                throw Error(Errc::SpaceTooLarge, "candidate set exceeds guard of " + std::to_string(guard_));
            }
            set_.push_back(tuple);
            return;
        }
        if (pos >= len) {
            return;
        }
        for (std::size_t u = 0; u < universe.size(); ++u) {
            if (used[u]) {
                continue;
            }
            const std::size_t at = next_match[pos * universe.size() + u];
            if (at == len) {
                continue;
            }
            used[u] = true;
            tuple[depth] = universe[u];
            self(self, depth + 1, at + 1);
            used[u] = false;
        }
    };
    extend(extend, 0, 0);
}

CandidateSet intersect_candidates(std::span<const Observation> observations, std::size_t length,
                                  std::uint64_t guard) {
    CandidateTracker tracker(length, guard);
    for (const auto& obs : observations) {
        tracker.add(obs);
    }
    return tracker.candidates();
}

ShoulderSurfReport shoulder_surf_experiment(const SchemeConfig& config, const ShoulderSurfParams& params,
                                            Seed seed) {
    if (params.sessions < 1 || params.trials < 1) {
        throw Error(Errc::InvalidRange, "shoulder-surf experiment needs sessions >= 1 and trials >= 1");
    }
    const auto catalog = catalog_for(config.grid);
    ShoulderSurfReport report;
    std::vector<std::vector<double>> sizes(params.sessions);
    std::vector<std::size_t> truth_hits(params.sessions, 0);

    for (std::uint64_t t = 0; t < params.trials; ++t) {
        Rng rng(derive_seed(seed, t));
        const Password truth{random_password(rng, catalog.size(), config.password_length)};
        CandidateTracker tracker(config.password_length, params.guard);
        for (std::size_t s = 0; s < params.sessions; ++s) {
            const Challenge challenge = lab_challenge(config, truth, catalog, rng());
            CellTrace trace = synthesize_trace(challenge, truth);
            if (params.jitter_budget > 0) {
                trace = jitter_trace(trace, challenge, truth, params.jitter_budget, rng());
            }
            tracker.add(observe_session(challenge, trace, params.retention, rng()));

            const bool has_truth = tracker.candidates().contains(truth.image_ids);
            report.rows.push_back({t, s + 1, tracker.candidates().size(), has_truth});
            sizes[s].push_back(static_cast<double>(tracker.candidates().size()));
            truth_hits[s] += has_truth ? 1 : 0;
        }
    }

    for (std::size_t s = 0; s < params.sessions; ++s) {
        auto& v = sizes[s];
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size();
        const double median = m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
        double sum = 0.0;
        for (double x : v) {
            sum += x;
        }
        report.summary.push_back({s + 1, median, sum / static_cast<double>(m),
                                  static_cast<double>(truth_hits[s]) / static_cast<double>(m)});
    }
    return report;
}

void write_table(std::ostream& out, const ShoulderSurfReport& report) {
    out << "trial,observations,candidates,contains_truth\n";
    for (const auto& row : report.rows) {
        out << row.trial << ',' << row.observations << ',' << row.candidates << ','
            << (row.contains_truth ? 1 : 0) << '\n';
    }
}

void write_summary(std::ostream& out, const ShoulderSurfReport& report) {
    out << "observations,median,mean,truth_rate\n";
    const auto precision = out.precision(10);
    for (const auto& s : report.summary) {
        out << s.observations << ',' << s.median << ',' << s.mean << ',' << s.truth_rate << '\n';
    }
    out.precision(precision);
}

}  // namespace cds
