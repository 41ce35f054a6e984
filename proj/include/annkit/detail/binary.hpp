// Copyright 2026-present the annkit project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "annkit/errors.hpp"

namespace annkit::detail {

// Little-endian encoding of fixed-width scalars and arrays.

template <typename T>
using UnsignedOf = std::conditional_t<sizeof(T) == 1, std::uint8_t,
                                      std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>;

template <typename T>
void
store_le(T value, unsigned char* out) noexcept {
    static_assert(sizeof(T) == 1 || sizeof(T) == 4 || sizeof(T) == 8);
    auto bits = std::bit_cast<UnsignedOf<T>>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out[i] = static_cast<unsigned char>(bits >> (8 * i));
    }
}

template <typename T>
T
load_le(const unsigned char* in) noexcept {
    UnsignedOf<T> bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        bits |= static_cast<UnsignedOf<T>>(in[i]) << (8 * i);
    }
    return std::bit_cast<T>(bits);
}

class ByteWriter {
public:
    explicit ByteWriter(std::ostream& out) : out_(out) {
    }

    template <typename T>
    void
    put(T value) {
        unsigned char buf[sizeof(T)];
        store_le(value, buf);
        out_.write(reinterpret_cast<const char*>(buf), sizeof(T));
    }

    template <typename T>
    void
    put_array(std::span<const T> values) {
        if constexpr (std::endian::native == std::endian::little) {
            out_.write(reinterpret_cast<const char*>(values.data()),
                       static_cast<std::streamsize>(values.size_bytes()));
        } else {
            for (const T& v : values) {
                put(v);
            }
        }
    }

    void
    put_bytes(const char* data, std::size_t n) {
        out_.write(data, static_cast<std::streamsize>(n));
    }

private:
    std::ostream& out_;
};

/// Bounds-checked reader over an in-memory buffer. Failures raise
/// FormatError carrying the byte offset.
class ByteReader {
public:
    explicit ByteReader(std::span<const unsigned char> data) : data_(data) {
    }

    std::size_t
    offset() const noexcept {
        return pos_;
    }
    std::size_t
    remaining() const noexcept {
        return data_.size() - pos_;
    }

    void
    require(std::size_t bytes, const char* what) const {
        if (bytes > remaining()) {
            throw FormatError(std::string("truncated file while reading ") + what, pos_);
        }
    }

    template <typename T>
    T
    get(const char* what) {
        require(sizeof(T), what);
        const T v = load_le<T>(data_.data() + pos_);
        pos_ += sizeof(T);
        return v;
    }

    template <typename T>
    std::vector<T>
    get_array(std::size_t count, const char* what) {
        if (count > remaining() / sizeof(T)) {
            throw FormatError(std::string("truncated file while reading ") + what, pos_);
        }
        std::vector<T> out(count);
        if constexpr (std::endian::native == std::endian::little) {
            std::memcpy(out.data(), data_.data() + pos_, count * sizeof(T));
        } else {
            for (std::size_t i = 0; i < count; ++i) {
                out[i] = load_le<T>(data_.data() + pos_ + i * sizeof(T));
            }
        }
        pos_ += count * sizeof(T);
        return out;
    }

    void
    get_bytes(char* out, std::size_t n, const char* what) {
        require(n, what);
        std::memcpy(out, data_.data() + pos_, n);
        pos_ += n;
    }

private:
    std::span<const unsigned char> data_;
    std::size_t pos_ = 0;
};

}  // namespace annkit::detail
