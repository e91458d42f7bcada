#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace featforge {

// Process exit codes used by the CLI. Library errors carry the code of the
// pipeline stage they abort.
enum class ExitCode : int {
    Ok = 0,
    Failure = 1,
    Config = 2,
    Data = 3,
    Extraction = 4,
    Training = 5,
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
    ExitCode code() const { return code_; }

private:
    ExitCode code_;
};

struct ConfigError : Error {
    explicit ConfigError(std::string msg) : Error(ExitCode::Config, std::move(msg)) {}
};
struct DataError : Error {
    explicit DataError(std::string msg) : Error(ExitCode::Data, std::move(msg)) {}
};
struct ExtractionError : Error {
    explicit ExtractionError(std::string msg) : Error(ExitCode::Extraction, std::move(msg)) {}
};
struct TrainingError : Error {
    explicit TrainingError(std::string msg) : Error(ExitCode::Training, std::move(msg)) {}
};

// 32-bit FNV-1a over raw bytes.
constexpr std::uint32_t fnv1a32(std::string_view bytes) {
    std::uint32_t h = 2166136261u;
    for (unsigned char b : std::string_view(bytes)) {
        h ^= b;
        h *= 16777619u;
    }
    return h;
}

// Uniform double in [0,1) from the top 53 bits of one engine draw. Used
// instead of std::uniform_real_distribution so that seeded runs produce the
// same stream on every standard library.
inline double rand_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Fisher-Yates shuffle with an explicit index derivation; std::shuffle is
// implementation-defined.
template <typename T>
void fy_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(v[i - 1], v[j]);
    }
}

// Shortest decimal form that round-trips the exact double (via to_chars).
std::string format_double(double v);

// Whole file as a string; throws DataError if unreadable.
std::string read_file(const std::string& path);

// Splits on '\n', dropping one trailing empty fragment and any '\r' before
// the newline.
std::vector<std::string> split_lines(std::string_view text);

// Minimal stderr logger, level set once by the controller from the run config.
namespace log {

enum class Level : int { Error = 0, Info = 1, Debug = 2 };

void set_level(Level lv);
Level level();
void error(const std::string& msg);
void info(const std::string& msg);
void debug(const std::string& msg);

}  // namespace log

}  // namespace featforge
