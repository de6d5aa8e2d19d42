#pragma once

#include <atomic>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bjj/stationary.hpp"
#include "bjj/units.hpp"

namespace bjj {

/// On-disk store of stationary solves, one file per key.
///
/// Files carry a SHA-256 trailer over their payload; anything that fails to
/// parse or verify counts as a miss and leaves a warning. Writes go through
/// a temporary file and a rename, so concurrent writers of the same key are
/// harmless (they write identical bytes).
class ModeCache {
public:
    /// A disabled cache: every lookup misses and nothing is written.
    ModeCache() = default;
    explicit ModeCache(std::filesystem::path dir);

    /// $BJJ_CACHE_DIR, else $XDG_CACHE_HOME/bjj-sim, else ~/.cache/bjj-sim.
    static std::filesystem::path default_dir();

    bool enabled() const { return enabled_; }
    const std::filesystem::path& dir() const { return dir_; }

    std::optional<StationaryState> load(const std::string& key);
    void store(const std::string& key, const StationaryState& state);

    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }
    std::vector<std::string> warnings() const;

    std::filesystem::path path_for(const std::string& key) const;

private:
    void warn(std::string message);

    bool enabled_ = false;
    std::filesystem::path dir_;
    std::atomic<std::size_t> hits_{0};
    std::atomic<std::size_t> misses_{0};
    mutable std::mutex mutex_;
    std::vector<std::string> warnings_;
};

/// Content key of one stationary solve: every input that can change the
/// result, with doubles serialized exactly.
std::string stationary_key(const TrapConfig& cfg, double x_min, double x_max, std::size_t n_points,
                           const SolverSettings& settings, double gN, Parity parity);

/// Serialization used by the cache; exposed for tests.
std::string encode_state(const StationaryState& s);
std::optional<StationaryState> decode_state(const std::string& bytes);

}  // namespace bjj
