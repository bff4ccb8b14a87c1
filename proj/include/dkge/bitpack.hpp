#pragma once

// Bit-packed ±1 code matrices and the popcount scoring kernels.
//
// Convention: bit value 1 encodes +1, 0 encodes -1. Coordinate j of a code
// lives at bit (j % 64) of word (j / 64), LSB first. Pad bits past the code
// length are kept at 0 after every mutation, so the three-way XOR popcount
// needs no masking: the triple product h_j * r_j * t_j is +1 exactly when
// bit(h) ^ bit(r) ^ bit(t) is 1, hence
//
//   (h x r)^T t = 2 * popcount(h ^ r ^ t) - k
//   d(h x r, t) = k - popcount(h ^ r ^ t)
//
// Code file format (.dkgb), all little-endian:
//   magic   "DKGB" (4 bytes)
//   version u16 = 1
//   k       u32   code length in bits
//   count   u64   number of codes
//   words   count * ceil(k/64) x u64, pad bits zero (validated on read)

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace dkge {

enum class TriplePosition { head, tail };

// Borrowed view of one packed code.
struct PackedCodeView {
    std::span<const uint64_t> words;
    uint32_t k = 0;
};

// Owning packed code.
struct PackedCode {
    uint32_t k = 0;
    std::vector<uint64_t> words;

    PackedCodeView view() const { return {words, k}; }
};

class BinaryCodeMatrix {
public:
    BinaryCodeMatrix() = default;
    // All codes start at -1 (all-zero words).
    BinaryCodeMatrix(uint32_t k, uint64_t count);
    // Adopts packed words; throws if the size is wrong or any pad bit is set.
    static BinaryCodeMatrix from_words(uint32_t k, uint64_t count, std::vector<uint64_t> words);

    uint32_t code_length() const { return k_; }
    uint64_t count() const { return count_; }
    size_t words_per_code() const { return words_per_code_; }

    PackedCodeView code(uint64_t i) const;
    void set_code(uint64_t i, std::span<const int8_t> signs);
    std::vector<int8_t> unpack_code(uint64_t i) const;

    // Coordinate accessors, sign in {-1, +1}.
    int sign_at(uint64_t i, uint32_t j) const;
    void set_sign(uint64_t i, uint32_t j, int sign);

    std::span<const uint64_t> raw_words() const { return words_; }
    bool operator==(const BinaryCodeMatrix&) const = default;

private:
    void check_index(uint64_t i) const;

    uint32_t k_ = 0;
    uint64_t count_ = 0;
    size_t words_per_code_ = 0;
    std::vector<uint64_t> words_;
};

PackedCode pack(std::span<const int8_t> signs);
std::vector<int8_t> unpack(PackedCodeView code);

// (h x r)^T t over the ±1 coordinates; range [-k, k], parity of k.
int64_t triple_score(PackedCodeView h, PackedCodeView r, PackedCodeView t);

// Hamming distance between the Hadamard product h x r and t; range [0, k].
int64_t hamming_translation_distance(PackedCodeView h, PackedCodeView r, PackedCodeView t);

// out[i] = triple_score with candidate i substituted at `position`, `fixed`
// keeping the other entity role. The kernel is symmetric in h and t, so
// `position` is bookkeeping only; results are bit-identical to a per-triple
// loop either way.
std::vector<int64_t> score_all_candidates(PackedCodeView fixed, PackedCodeView rel,
                                          const BinaryCodeMatrix& candidates,
                                          TriplePosition position);

void write_codes(const BinaryCodeMatrix& m, const std::filesystem::path& path);
BinaryCodeMatrix read_codes(const std::filesystem::path& path);

}  // namespace dkge
