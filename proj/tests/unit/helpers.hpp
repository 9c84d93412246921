#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "restorex/errors.hpp"

namespace restorex::testing {

/// Run fn and report the typed error code it threw, or nullopt if it
/// returned normally. Keeps error assertions one-liners.
template <typename Fn>
std::optional<errc> code_of(Fn&& fn) {
    try {
        std::forward<Fn>(fn)();
        return std::nullopt;
    } catch (const Error& e) {
        return e.code();
    }
}

/// Unique scratch directory, removed on scope exit.
class TempDir {
public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        auto base = std::filesystem::temp_directory_path();
        path_ = base / ("restorex_test_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace restorex::testing
