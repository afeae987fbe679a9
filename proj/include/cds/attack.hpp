#pragma once

#include "cds/random.hpp"
#include "cds/scheme.hpp"
#include "cds/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cds {

inline constexpr std::uint64_t kDefaultSpaceGuard = 10'000'000;

/// N * (N-1) * ... * (N-n+1); ordered choices of n distinct images.
std::uint64_t password_space(std::uint64_t catalog_size, std::uint64_t length);

double entropy_bits(std::uint64_t catalog_size, std::uint64_t length);

/// Lexicographic walk over all ordered n-tuples of distinct values in [0, N).
class PasswordEnumerator {
public:
    PasswordEnumerator(std::uint32_t catalog_size, std::uint32_t length,
                       std::uint64_t guard = kDefaultSpaceGuard);

    /// Writes the next tuple into `out`; false once exhausted.
    bool next(std::vector<ImageId>& out);

private:
    std::uint32_t catalog_size_;
    std::vector<ImageId> current_;
    std::vector<bool> used_;
    bool started_ = false;
    bool done_ = false;
};

std::vector<std::vector<ImageId>> enumerate_passwords(std::uint32_t catalog_size, std::uint32_t length,
                                                      std::uint64_t guard = kDefaultSpaceGuard);

/// Grid and password length; the catalog is exactly one image per cell.
struct SchemeConfig {
    GridSpec grid;
    std::size_t password_length = 5;
    std::optional<std::size_t> max_len_override;
};

struct RateEstimate {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;

    double rate() const noexcept;
    /// Binomial standard error at the observed rate.
    double sigma() const noexcept;
    double lower_3sigma() const noexcept;
    double upper_3sigma() const noexcept;
    /// |rate - p| <= 3 * sqrt(p (1 - p) / trials)
    bool within_3sigma_of(double p) const noexcept;
};

enum class GuessMode { Uniform, ForceTruth };

struct GuessAttackReport {
    /// Guessed password equals the true password.
    RateEstimate password_match;
    /// The guess's synthesized trace is accepted by the verifier. Includes
    /// traces that happen to cross the true images in order on the way to the
    /// guessed ones, so this is >= password_match.
    RateEstimate trace_accept;
};

GuessAttackReport simulate_guess_attack(const SchemeConfig& config, std::uint64_t trials, Seed seed,
                                        GuessMode mode = GuessMode::Uniform);

/// What a shoulder-surfer recorded of one session. Missed interior crossings
/// stay in the sequence as std::nullopt: the observer knows a crossing
/// happened but not which image it was.
struct Observation {
    std::string session_id;
    bool layout_known = true;
    std::vector<ImageId> layout;
    std::vector<std::optional<ImageId>> image_sequence;
    ImageId head_image;
    ImageId tail_image;
};

Observation observe_session(const Challenge& challenge, const CellTrace& trace, double retention, Seed seed);

/// True when `tuple` embeds in order into `pattern`, std::nullopt matching any image.
bool embeds_in(std::span<const ImageId> tuple, std::span<const std::optional<ImageId>> pattern) noexcept;

/// Sorted set of ordered n-tuples, stored flat.
class CandidateSet {
public:
    CandidateSet() = default;
    explicit CandidateSet(std::size_t length) : length_(length) {}

    std::size_t length() const noexcept { return length_; }
    std::size_t size() const noexcept { return length_ == 0 ? 0 : flat_.size() / length_; }
    bool empty() const noexcept { return flat_.empty(); }
    std::span<const ImageId> at(std::size_t index) const;
    bool contains(std::span<const ImageId> tuple) const;

    /// Appends; tuples must arrive in increasing lexicographic order.
    void push_back(std::span<const ImageId> tuple);
    template <typename Keep>
    void retain_if(Keep keep);

private:
    std::size_t length_ = 0;
    std::vector<ImageId> flat_;
};

template <typename Keep>
void CandidateSet::retain_if(Keep keep) {
    std::size_t write = 0;
    for (std::size_t read = 0; read < size(); ++read) {
        const std::span<const ImageId> tuple(flat_.data() + read * length_, length_);
        if (keep(tuple)) {
            std::copy(tuple.begin(), tuple.end(), flat_.begin() + static_cast<std::ptrdiff_t>(write * length_));
            ++write;
        }
    }
    flat_.resize(write * length_);
}

/// Incremental knowledge state of the observer: after each observation the
/// set holds every n-tuple of distinct images that embeds into all
/// observations so far and avoids all of their head and tail images.
class CandidateTracker {
public:
    explicit CandidateTracker(std::size_t length, std::uint64_t guard = kDefaultSpaceGuard);

    void add(const Observation& observation);
    const CandidateSet& candidates() const noexcept { return set_; }
    std::size_t observations() const noexcept { return count_; }

private:
    std::size_t length_;
    std::uint64_t guard_;
    std::size_t count_ = 0;
    std::vector<ImageId> excluded_;
    CandidateSet set_;
};

CandidateSet intersect_candidates(std::span<const Observation> observations, std::size_t length,
                                  std::uint64_t guard = kDefaultSpaceGuard);

struct ShoulderSurfRow {
    std::uint64_t trial = 0;
    std::size_t observations = 0;
    std::size_t candidates = 0;
    bool contains_truth = false;
};

struct ShoulderSurfSummary {
    std::size_t observations = 0;
    double median = 0.0;
    double mean = 0.0;
    double truth_rate = 0.0;
};

struct ShoulderSurfReport {
    std::vector<ShoulderSurfRow> rows;
    std::vector<ShoulderSurfSummary> summary;
};

struct ShoulderSurfParams {
    std::size_t sessions = 3;
    double retention = 1.0;
    std::uint64_t trials = 20;
    std::size_t jitter_budget = 0;
    std::uint64_t guard = kDefaultSpaceGuard;
};

ShoulderSurfReport shoulder_surf_experiment(const SchemeConfig& config, const ShoulderSurfParams& params,
                                            Seed seed);

/// Delimited table with header `trial,observations,candidates,contains_truth`.
void write_table(std::ostream& out, const ShoulderSurfReport& report);
/// `observations,median,mean,truth_rate`
void write_summary(std::ostream& out, const ShoulderSurfReport& report);

}  // namespace cds
