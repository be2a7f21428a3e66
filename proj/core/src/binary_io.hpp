#pragma once

// Little-endian length-prefixed serialization shared by the index and model files.

#include "screensearch/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace screensearch::detail {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

class BinaryWriter {
public:
    template <typename T>
        requires std::is_arithmetic_v<T>
    void put(T value) {
        const auto* p = reinterpret_cast<const char*>(&value);
        buffer_.append(p, sizeof(T));
    }

    void put_string(std::string_view s) {
        put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
        buffer_.append(s.data(), s.size());
    }

    void put_magic(std::string_view magic, std::uint32_t version) {
        buffer_.append(magic.data(), magic.size());
        put(version);
    }

    const std::string& bytes() const { return buffer_; }
    std::string take() { return std::move(buffer_); }

private:
    std::string buffer_;
};

class BinaryReader {
public:
    explicit BinaryReader(std::string_view bytes) : bytes_(bytes) {}

    template <typename T>
        requires std::is_arithmetic_v<T>
    T get() {
        need(sizeof(T));
        T value;
        std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }

    std::string get_string() {
        const auto n = get<std::uint32_t>();
        need(n);
        std::string s(bytes_.substr(pos_, n));
        pos_ += n;
        return s;
    }

    /// Checks the magic tag and returns the stored version.
    std::uint32_t expect_magic(std::string_view magic) {
        need(magic.size());
        if (bytes_.substr(pos_, magic.size()) != magic) {
            throw ParseError("bad file header: expected \"" + std::string(magic) + "\"");
        }
        pos_ += magic.size();
        return get<std::uint32_t>();
    }

    /// Count prefix, sanity-checked against the bytes left.
    std::size_t get_count(std::size_t min_bytes_each = 1) {
        const auto n = get<std::uint64_t>();
        if (min_bytes_each > 0 && n > remaining() / min_bytes_each) {
            throw ParseError("corrupt file: count " + std::to_string(n) + " exceeds remaining data");
        }
        return static_cast<std::size_t>(n);
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }
    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) {
            throw ParseError("truncated file");
        }
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

std::string read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, std::string_view bytes);

} // namespace screensearch::detail
