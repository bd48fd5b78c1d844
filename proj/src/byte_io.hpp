#pragma once

#include "gcmvs/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

namespace gcmvs::detail {

template <class T>
T byteswap_value(T v)
{
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
        std::swap(raw[i], raw[sizeof(T) - 1 - i]);
    std::memcpy(&v, raw, sizeof(T));
    return v;
}

template <class T>
T load_scalar(const std::uint8_t* p, bool little_endian)
{
    T v;
    std::memcpy(&v, p, sizeof(T));
    if (little_endian != (std::endian::native == std::endian::little))
        v = byteswap_value(v);
    return v;
}

template <class T>
void append_le(std::vector<std::uint8_t>& out, T v)
{
    if constexpr (std::endian::native != std::endian::little)
        v = byteswap_value(v);
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    out.insert(out.end(), raw, raw + sizeof(T));
}

inline void append_text(std::vector<std::uint8_t>& out, const std::string& s)
{
    out.insert(out.end(), s.begin(), s.end());
}

/// Forward-only cursor over a byte buffer that reports offsets on failure.
class ByteCursor
{
public:
    ByteCursor(std::span<const std::uint8_t> bytes, std::string format)
        : bytes_(bytes), format_(std::move(format))
    {}

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }
    bool at_end() const { return pos_ >= bytes_.size(); }
    std::uint8_t peek() const { return bytes_[pos_]; }
    const std::uint8_t* data() const { return bytes_.data() + pos_; }

    [[noreturn]] void fail(const std::string& what) const { fail_at(what, pos_); }
    [[noreturn]] void fail_at(const std::string& what, std::size_t at) const
    {
        throw ParseError(format_ + ": " + what, at, ParseError::Unit::Byte);
    }

    void skip(std::size_t n)
    {
        if (remaining() < n)
            fail("truncated payload");
        pos_ += n;
    }

    template <class T>
    T read(bool little_endian)
    {
        if (remaining() < sizeof(T))
            fail("truncated payload");
        const T v = load_scalar<T>(data(), little_endian);
        pos_ += sizeof(T);
        return v;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::string format_;
    std::size_t pos_ = 0;
};

} // namespace gcmvs::detail
