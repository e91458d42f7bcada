#include "featforge/common.hpp"

#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace featforge {

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.emplace_back(line);
        start = nl + 1;
    }
    return lines;
}

namespace log {

namespace {
std::atomic<Level> g_level{Level::Info};

void emit(const char* tag, const std::string& msg) {
    std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
    std::fflush(stderr);
}
}  // namespace

void set_level(Level lv) { g_level.store(lv); }
Level level() { return g_level.load(); }

void error(const std::string& msg) { emit("error", msg); }

void info(const std::string& msg) {
    if (static_cast<int>(g_level.load()) >= static_cast<int>(Level::Info)) emit("info", msg);
}

void debug(const std::string& msg) {
    if (static_cast<int>(g_level.load()) >= static_cast<int>(Level::Debug)) emit("debug", msg);
}

}  // namespace log

}  // namespace featforge
