#include "bjj/cache.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "bjj/config.hpp"

namespace bjj {

namespace {

constexpr char magic[8] = {'B', 'J', 'J', 'S', 'T', 'A', 'T', '1'};
constexpr std::size_t digest_size = 64;  // hex

template <class T>
void put(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

template <class T>
bool take(const std::string& in, std::size_t& pos, T& v) {
    if (pos + sizeof(T) > in.size()) return false;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return true;
}

/// Exact text for a double: its bit pattern.
std::string bits(double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof u);
    std::ostringstream os;
    os << std::hex << u;
    return os.str();
}

}  // namespace

std::string encode_state(const StationaryState& s) {
    std::string out(magic, sizeof magic);
    put<std::uint64_t>(out, s.psi.size());
    put(out, s.energy);
    put(out, s.chemical_potential);
    put(out, s.interaction);
    put(out, s.residual);
    put<std::uint64_t>(out, s.iterations);
    put<std::int32_t>(out, static_cast<std::int32_t>(s.parity));
    for (double v : s.psi) put(out, v);
    out += sha256_hex(out);
    return out;
}

std::optional<StationaryState> decode_state(const std::string& bytes) {
    if (bytes.size() < sizeof magic + digest_size) return std::nullopt;
    const std::string payload = bytes.substr(0, bytes.size() - digest_size);
    if (sha256_hex(payload) != bytes.substr(bytes.size() - digest_size)) return std::nullopt;
    if (payload.compare(0, sizeof magic, magic, sizeof magic) != 0) return std::nullopt;
    std::size_t pos = sizeof magic;
    StationaryState s;
    std::uint64_t n = 0, iterations = 0;
    std::int32_t parity = 0;
    if (!take(payload, pos, n) || !take(payload, pos, s.energy) || !take(payload, pos, s.chemical_potential) ||
        !take(payload, pos, s.interaction) || !take(payload, pos, s.residual) || !take(payload, pos, iterations) ||
        !take(payload, pos, parity))
        return std::nullopt;
    if (parity < 0 || parity > 2 || payload.size() - pos != n * sizeof(double)) return std::nullopt;
    s.iterations = iterations;
    s.parity = static_cast<Parity>(parity);
    s.psi.resize(n);
    for (auto& v : s.psi) take(payload, pos, v);
    return s;
}

std::string stationary_key(const TrapConfig& cfg, double x_min, double x_max, std::size_t n_points,
                           const SolverSettings& settings, double gN, Parity parity) {
    nlohmann::json k = {
        {"format", "bjj-stationary-1"},
        {"trap",
         {{"atom_number", bits(cfg.atom_number)},
          {"scattering_length", bits(cfg.scattering_length)},
          {"primary_depth", bits(cfg.primary_depth)},
          {"secondary_depth", bits(cfg.secondary_depth)},
          {"primary_period", bits(cfg.primary_period)},
          {"secondary_period", bits(cfg.secondary_period)},
          {"radial_frequency", bits(cfg.radial_frequency)},
          {"tilt", bits(cfg.tilt)}}},
        {"grid", {{"x_min", bits(x_min)}, {"x_max", bits(x_max)}, {"n_points", n_points}}},
        {"solver",
         {{"imaginary_step", bits(settings.imaginary_step)},
          {"energy_tolerance", bits(settings.energy_tolerance)},
          {"residual_tolerance", bits(settings.residual_tolerance)},
          {"max_iterations", settings.max_iterations},
          {"kinetic", static_cast<int>(settings.kinetic)}}},
        {"gN", bits(gN)},
        {"parity", to_string(parity)},
    };
    return content_hash(k);
}

ModeCache::ModeCache(std::filesystem::path dir) : enabled_(true), dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) {
        warn("cache directory " + dir_.string() + " unusable (" + ec.message() + "); caching disabled");
        enabled_ = false;
    }
}

std::filesystem::path ModeCache::default_dir() {
    if (const char* d = std::getenv("BJJ_CACHE_DIR"); d && *d) return d;
    if (const char* d = std::getenv("XDG_CACHE_HOME"); d && *d) return std::filesystem::path(d) / "bjj-sim";
    if (const char* h = std::getenv("HOME"); h && *h) return std::filesystem::path(h) / ".cache" / "bjj-sim";
    return std::filesystem::current_path() / ".bjj-cache";
}

std::filesystem::path ModeCache::path_for(const std::string& key) const { return dir_ / (key + ".bin"); }

std::optional<StationaryState> ModeCache::load(const std::string& key) {
    if (!enabled_) return std::nullopt;
    const auto path = path_for(key);
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        ++misses_;
        return std::nullopt;
    }
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    auto s = decode_state(bytes);
    if (!s) {
        warn("corrupt cache entry " + path.string() + " ignored");
        ++misses_;
        return std::nullopt;
    }
    ++hits_;
    return s;
}

void ModeCache::store(const std::string& key, const StationaryState& state) {
    if (!enabled_) return;
    const auto path = path_for(key);
    // Unique per thread so concurrent writers never share a temporary.
    std::ostringstream tmp_name;
    tmp_name << path.string() << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id());
    const std::string tmp = tmp_name.str();
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) {
            warn("cannot write cache entry " + path.string());
            return;
        }
        f << encode_state(state);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) warn("cannot finalize cache entry " + path.string() + ": " + ec.message());
}

void ModeCache::warn(std::string message) {
    std::cerr << "warning: " << message << '\n';
    std::lock_guard lock(mutex_);
    warnings_.push_back(std::move(message));
}

std::vector<std::string> ModeCache::warnings() const {
    std::lock_guard lock(mutex_);
    return warnings_;
}

}  // namespace bjj
