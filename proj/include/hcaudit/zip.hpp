#pragma once

// Read-only ZIP archive access for workbook packages. Supports stored and
// deflated entries; ZIP64 archives are rejected.

#include <hcaudit/errors.hpp>

#include <zlib.h>

#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hcaudit {

class ZipArchive {
public:
    struct Entry {
        std::string name;
        std::uint16_t method = 0;
        std::uint32_t crc = 0;
        std::uint32_t compressed_size = 0;
        std::uint32_t uncompressed_size = 0;
        std::uint32_t local_header_offset = 0;
    };

    static ZipArchive open(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open '" + path + "'");
        std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (in.bad()) throw IoError("cannot read '" + path + "'");
        return ZipArchive(std::move(data));
    }

    explicit ZipArchive(std::string data) : data_(std::move(data)) { read_directory(); }

    const std::vector<Entry>& entries() const { return entries_; }

    /// Looks up a part name; ZIP names are compared case-insensitively as
    /// package part names are.
    const Entry* find(std::string_view name) const {
        for (const auto& e : entries_)
            if (e.name == name) return &e;
        for (const auto& e : entries_) {
            if (e.name.size() != name.size()) continue;
            bool same = true;
            for (std::size_t i = 0; i < name.size() && same; ++i)
                same = std::tolower(static_cast<unsigned char>(e.name[i])) ==
                       std::tolower(static_cast<unsigned char>(name[i]));
            if (same) return &e;
        }
        return nullptr;
    }

    bool contains(std::string_view name) const { return find(name) != nullptr; }

    std::string read(std::string_view name) const {
        const Entry* e = find(name);
        if (!e) throw FormatError("package part '" + std::string(name) + "' not found");
        return extract(*e);
    }

    std::optional<std::string> read_if_present(std::string_view name) const {
        const Entry* e = find(name);
        if (!e) return std::nullopt;
        return extract(*e);
    }

private:
    std::string data_;
    std::vector<Entry> entries_;

    std::uint16_t u16(std::size_t off) const {
        if (off + 2 > data_.size()) throw FormatError("truncated ZIP structure");
        auto b = reinterpret_cast<const unsigned char*>(data_.data()) + off;
        return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    }

    std::uint32_t u32(std::size_t off) const {
        if (off + 4 > data_.size()) throw FormatError("truncated ZIP structure");
        auto b = reinterpret_cast<const unsigned char*>(data_.data()) + off;
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }

    void read_directory() {
        constexpr std::uint32_t kEocd = 0x06054b50;
        constexpr std::uint32_t kCentral = 0x02014b50;
        if (data_.size() < 22) throw FormatError("not a ZIP package (too short)");
        // The end-of-central-directory record sits within the last 64 KiB + 22 bytes.
        std::size_t lowest = data_.size() > 65557 ? data_.size() - 65557 : 0;
        std::optional<std::size_t> eocd;
        for (std::size_t p = data_.size() - 22 + 1; p-- > lowest;) {
            if (u32(p) == kEocd) {
                eocd = p;
                break;
            }
        }
        if (!eocd) throw FormatError("not a ZIP package (no end of central directory)");
        std::uint16_t count = u16(*eocd + 10);
        std::uint32_t dir_offset = u32(*eocd + 16);
        if (dir_offset == 0xFFFFFFFFu || count == 0xFFFF)
            throw FormatError("ZIP64 packages are not supported");
        std::size_t p = dir_offset;
        for (std::uint16_t i = 0; i < count; ++i) {
            if (u32(p) != kCentral) throw FormatError("corrupt ZIP central directory");
            Entry e;
            e.method = u16(p + 10);
            e.crc = u32(p + 16);
            e.compressed_size = u32(p + 20);
            e.uncompressed_size = u32(p + 24);
            std::uint16_t name_len = u16(p + 28);
            std::uint16_t extra_len = u16(p + 30);
            std::uint16_t comment_len = u16(p + 32);
            e.local_header_offset = u32(p + 42);
            if (p + 46 + name_len > data_.size()) throw FormatError("truncated ZIP central directory");
            e.name = data_.substr(p + 46, name_len);
            entries_.push_back(std::move(e));
            p += 46 + name_len + extra_len + comment_len;
        }
    }

    std::string extract(const Entry& e) const {
        constexpr std::uint32_t kLocal = 0x04034b50;
        std::size_t p = e.local_header_offset;
        if (u32(p) != kLocal) throw FormatError("corrupt ZIP local header for '" + e.name + "'");
        std::size_t start = p + 30 + u16(p + 26) + u16(p + 28);
        if (start + e.compressed_size > data_.size())
            throw FormatError("truncated ZIP entry '" + e.name + "'");
        std::string out;
        if (e.method == 0) {
            out = data_.substr(start, e.compressed_size);
        } else if (e.method == 8) {
            out = inflate_raw(std::string_view(data_).substr(start, e.compressed_size),
                              e.uncompressed_size, e.name);
        } else {
            throw FormatError("unsupported compression method " + std::to_string(e.method) +
                              " for '" + e.name + "'");
        }
        auto crc = crc32(0L, reinterpret_cast<const Bytef*>(out.data()), static_cast<uInt>(out.size()));
        if (crc != e.crc) throw FormatError("CRC mismatch in '" + e.name + "'");
        return out;
    }

    static std::string inflate_raw(std::string_view in, std::uint32_t expected_size,
                                   const std::string& name) {
        z_stream zs{};
        if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw FormatError("zlib initialisation failed");
        // One spare byte so an oversized stream is detected instead of truncated.
        std::string out(static_cast<std::size_t>(expected_size) + 1, '\0');
        zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
        zs.avail_in = static_cast<uInt>(in.size());
        zs.next_out = reinterpret_cast<Bytef*>(out.data());
        zs.avail_out = static_cast<uInt>(out.size());
        int rc = inflate(&zs, Z_FINISH);
        std::size_t produced = zs.total_out;
        inflateEnd(&zs);
        if (rc != Z_STREAM_END || produced != expected_size)
            throw FormatError("corrupt deflate stream in '" + name + "'");
        out.resize(produced);
        return out;
    }
};

}  // namespace hcaudit
