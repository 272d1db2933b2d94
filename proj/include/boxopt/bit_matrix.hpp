// Copyright 2026 The boxopt Authors
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

#ifndef BOXOPT_BIT_MATRIX_HPP_
#define BOXOPT_BIT_MATRIX_HPP_

// Bit-packed boolean vectors and row-major matrices.
//
// Layout: bit (p, b) lives in word p * stride + b / 64 at bit b % 64, least
// significant bit first. Padding bits past the last column are always zero.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "boxopt/error.hpp"

namespace boxopt {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t bits) {
  return (bits + kWordBits - 1) / kWordBits;
}

// Calls fn(index) for every set bit of `words`, ascending.
template <typename Fn>
void for_each_set_bit(std::span<const Word> words, Fn&& fn) {
  for (std::size_t i = 0; i < words.size(); ++i) {
    Word w = words[i];
    while (w != 0) {
      fn(i * kWordBits + static_cast<std::size_t>(std::countr_zero(w)));
      w &= w - 1;
    }
  }
}

class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size)
      : size_(size), words_(words_for(size), 0) {}

  std::size_t size() const { return size_; }

  bool get(std::size_t i) const {
    check(i);
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1u;
  }

  void set(std::size_t i, bool v = true) {
    check(i);
    const Word mask = Word{1} << (i % kWordBits);
    if (v) {
      words_[i / kWordBits] |= mask;
    } else {
      words_[i / kWordBits] &= ~mask;
    }
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (Word w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  std::vector<std::size_t> ones() const {
    std::vector<std::size_t> out;
    for_each_set_bit(words(), [&](std::size_t i) { out.push_back(i); });
    return out;
  }

  std::span<const Word> words() const { return words_; }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  void check(std::size_t i) const {
    if (i >= size_) {
      throw IndexError("bit index " + std::to_string(i) + " out of range " +
                       std::to_string(size_));
    }
  }

  std::size_t size_ = 0;
  std::vector<Word> words_;
};

class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows),
        cols_(cols),
        stride_(words_for(cols)),
        words_(rows * stride_, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t stride() const { return stride_; }
  std::size_t memory_bytes() const { return words_.capacity() * sizeof(Word); }

  bool get(std::size_t p, std::size_t b) const {
    check(p, b);
    return (words_[p * stride_ + b / kWordBits] >> (b % kWordBits)) & 1u;
  }

  void set(std::size_t p, std::size_t b, bool v = true) {
    check(p, b);
    Word& w = words_[p * stride_ + b / kWordBits];
    const Word mask = Word{1} << (b % kWordBits);
    if (v) {
      w |= mask;
    } else {
      w &= ~mask;
    }
  }

  std::span<const Word> row(std::size_t p) const {
    if (p >= rows_) throw IndexError("row " + std::to_string(p) + " out of range");
    return {words_.data() + p * stride_, stride_};
  }

  // Distinct rows may be written concurrently.
  std::span<Word> mutable_row(std::size_t p) {
    if (p >= rows_) throw IndexError("row " + std::to_string(p) + " out of range");
    return {words_.data() + p * stride_, stride_};
  }

  std::span<const Word> words() const { return words_; }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  void check(std::size_t p, std::size_t b) const {
    if (p >= rows_ || b >= cols_) {
      throw IndexError("entry (" + std::to_string(p) + "," + std::to_string(b) +
                       ") out of range " + std::to_string(rows_) + "x" +
                       std::to_string(cols_));
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t stride_ = 0;
  std::vector<Word> words_;
};

// ---------------------------------------------------------------------------
// Binary format: "BOXF" | u32 version = 1 | u64 rows | u64 cols | u64 stride
// | rows * stride u64 words. All integers little-endian.

inline constexpr char kFitMagic[4] = {'B', 'O', 'X', 'F'};
inline constexpr std::uint32_t kFitVersion = 1;

namespace bit_matrix_internal {

template <typename T>
void put_le(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<unsigned char>(v >> (8 * i));
  }
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, std::size_t& offset, const char* what) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) {
    throw FormatError(std::string("truncated while reading ") + what, offset);
  }
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(buf[i]) << (8 * i);
  }
  offset += sizeof(T);
  return v;
}

}  // namespace bit_matrix_internal

inline void serialize(const BitMatrix& m, std::ostream& out) {
  using bit_matrix_internal::put_le;
  out.write(kFitMagic, 4);
  put_le<std::uint32_t>(out, kFitVersion);
  put_le<std::uint64_t>(out, m.rows());
  put_le<std::uint64_t>(out, m.cols());
  put_le<std::uint64_t>(out, m.stride());
  for (Word w : m.words()) put_le<std::uint64_t>(out, w);
  if (!out) throw Error("failed writing fit matrix");
}

inline BitMatrix deserialize(std::istream& in) {
  using bit_matrix_internal::get_le;
  std::size_t offset = 0;
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kFitMagic, 4) != 0) {
    throw FormatError("bad magic, expected BOXF", offset);
  }
  offset = 4;
  const auto version = get_le<std::uint32_t>(in, offset, "version");
  if (version != kFitVersion) {
    throw FormatError("unsupported version " + std::to_string(version),
                      offset - 4);
  }
  const auto rows = get_le<std::uint64_t>(in, offset, "row count");
  const auto cols = get_le<std::uint64_t>(in, offset, "column count");
  const auto stride = get_le<std::uint64_t>(in, offset, "stride");
  if (stride != words_for(cols)) {
    throw FormatError("stride " + std::to_string(stride) +
                          " inconsistent with column count",
                      offset - 8);
  }
  if (stride != 0 && rows > (std::uint64_t{1} << 40) / stride) {
    throw FormatError("matrix too large", offset - 24);
  }
  BitMatrix m(rows, cols);
  const std::size_t tail_bits = cols % kWordBits;
  const Word pad_mask = tail_bits == 0 ? 0 : ~((Word{1} << tail_bits) - 1);
  for (std::size_t p = 0; p < rows; ++p) {
    auto row = m.mutable_row(p);
    for (std::size_t i = 0; i < stride; ++i) {
      const std::size_t at = offset;
      row[i] = get_le<std::uint64_t>(in, offset, "matrix word");
      if (i + 1 == stride && (row[i] & pad_mask) != 0) {
        throw FormatError("nonzero padding bits", at);
      }
    }
  }
  return m;
}

}  // namespace boxopt

#endif  // BOXOPT_BIT_MATRIX_HPP_
