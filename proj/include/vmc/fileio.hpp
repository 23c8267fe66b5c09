#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include <zlib.h>

namespace vmc {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[nodiscard]] inline bool is_gzip_path(const std::filesystem::path& path) { return path.extension() == ".gz"; }

/// Reads a whole file; `.gz` files are inflated transparently.
[[nodiscard]] inline std::string read_text_file(const std::filesystem::path& path) {
    if (is_gzip_path(path)) {
        std::unique_ptr<gzFile_s, decltype(&gzclose)> gz(gzopen(path.c_str(), "rb"), &gzclose);
        if (!gz) throw IoError("cannot open " + path.string());
        std::string out;
        char buf[1 << 14];
        int n = 0;
        while ((n = gzread(gz.get(), buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
        if (n < 0) throw IoError("corrupt gzip stream in " + path.string());
        return out;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes `content` to `path`, gzip-compressed when the extension is `.gz`.
inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (is_gzip_path(path)) {
        // Fixed level and no name/mtime in the header keeps output reproducible.
        std::unique_ptr<gzFile_s, decltype(&gzclose)> gz(gzopen(path.c_str(), "wb6"), &gzclose);
        if (!gz) throw IoError("cannot write " + path.string());
        if (!content.empty() &&
            gzwrite(gz.get(), content.data(), static_cast<unsigned>(content.size())) != static_cast<int>(content.size())) {
            throw IoError("short gzip write to " + path.string());
        }
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace vmc
