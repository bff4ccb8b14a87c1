#include "dkge/bitpack.hpp"

#include <bit>
#include <fstream>
#include <stdexcept>

#include "dkge/io.hpp"

namespace dkge {

namespace {

constexpr char kMagic[4] = {'D', 'K', 'G', 'B'};
constexpr uint16_t kVersion = 1;

size_t words_for(uint32_t k) { return (static_cast<size_t>(k) + 63) / 64; }

// Mask of the valid (non-pad) bits of the last word; ~0 when k % 64 == 0.
uint64_t last_word_mask(uint32_t k) {
    const uint32_t rem = k % 64;
    return rem == 0 ? ~uint64_t{0} : (uint64_t{1} << rem) - 1;
}

void pack_into(std::span<const int8_t> signs, uint64_t* words, uint32_t k) {
    const size_t nwords = words_for(k);
    for (size_t w = 0; w < nwords; ++w) words[w] = 0;
    for (uint32_t j = 0; j < k; ++j) {
        const int8_t s = signs[j];
        if (s != 1 && s != -1) throw std::invalid_argument("code element not in {-1, +1}");
        if (s == 1) words[j / 64] |= uint64_t{1} << (j % 64);
    }
}

int64_t xor3_popcount(PackedCodeView h, PackedCodeView r, PackedCodeView t) {
    if (h.k != r.k || h.k != t.k) throw std::invalid_argument("mismatched code length");
    int64_t pop = 0;
    const size_t n = h.words.size();
    for (size_t w = 0; w < n; ++w) pop += std::popcount(h.words[w] ^ r.words[w] ^ t.words[w]);
    return pop;
}

}  // namespace

BinaryCodeMatrix::BinaryCodeMatrix(uint32_t k, uint64_t count)
    : k_(k), count_(count), words_per_code_(words_for(k)), words_(words_per_code_ * count, 0) {
    if (k == 0) throw std::invalid_argument("code length must be at least 1");
}

BinaryCodeMatrix BinaryCodeMatrix::from_words(uint32_t k, uint64_t count,
                                              std::vector<uint64_t> words) {
    BinaryCodeMatrix m(k, count);
    if (words.size() != m.words_per_code_ * count)
        throw std::invalid_argument("word buffer size does not match k and count");
    const uint64_t mask = last_word_mask(k);
    for (uint64_t i = 0; i < count; ++i)
        if ((words[(i + 1) * m.words_per_code_ - 1] & ~mask) != 0)
            throw std::runtime_error("nonzero pad bits");
    m.words_ = std::move(words);
    return m;
}

void BinaryCodeMatrix::check_index(uint64_t i) const {
    if (i >= count_) throw std::out_of_range("code index out of range");
}

PackedCodeView BinaryCodeMatrix::code(uint64_t i) const {
    check_index(i);
    return {std::span<const uint64_t>(words_.data() + i * words_per_code_, words_per_code_), k_};
}

void BinaryCodeMatrix::set_code(uint64_t i, std::span<const int8_t> signs) {
    check_index(i);
    if (signs.size() != k_) throw std::invalid_argument("sign sequence length != code length");
    pack_into(signs, words_.data() + i * words_per_code_, k_);
}

std::vector<int8_t> BinaryCodeMatrix::unpack_code(uint64_t i) const { return unpack(code(i)); }

int BinaryCodeMatrix::sign_at(uint64_t i, uint32_t j) const {
    check_index(i);
    if (j >= k_) throw std::out_of_range("coordinate out of range");
    return (words_[i * words_per_code_ + j / 64] >> (j % 64)) & 1u ? +1 : -1;
}

void BinaryCodeMatrix::set_sign(uint64_t i, uint32_t j, int sign) {
    check_index(i);
    if (j >= k_) throw std::out_of_range("coordinate out of range");
    if (sign != 1 && sign != -1) throw std::invalid_argument("code element not in {-1, +1}");
    uint64_t& w = words_[i * words_per_code_ + j / 64];
    const uint64_t bit = uint64_t{1} << (j % 64);
    if (sign == 1)
        w |= bit;
    else
        w &= ~bit;
}

PackedCode pack(std::span<const int8_t> signs) {
    if (signs.empty()) throw std::invalid_argument("code length must be at least 1");
    PackedCode code;
    code.k = static_cast<uint32_t>(signs.size());
    code.words.assign(words_for(code.k), 0);
    pack_into(signs, code.words.data(), code.k);
    return code;
}

std::vector<int8_t> unpack(PackedCodeView code) {
    std::vector<int8_t> signs(code.k);
    for (uint32_t j = 0; j < code.k; ++j)
        signs[j] = (code.words[j / 64] >> (j % 64)) & 1u ? int8_t{1} : int8_t{-1};
    return signs;
}

int64_t triple_score(PackedCodeView h, PackedCodeView r, PackedCodeView t) {
    return 2 * xor3_popcount(h, r, t) - static_cast<int64_t>(h.k);
}

int64_t hamming_translation_distance(PackedCodeView h, PackedCodeView r, PackedCodeView t) {
    return static_cast<int64_t>(h.k) - xor3_popcount(h, r, t);
}

std::vector<int64_t> score_all_candidates(PackedCodeView fixed, PackedCodeView rel,
                                          const BinaryCodeMatrix& candidates,
                                          [[maybe_unused]] TriplePosition position) {
    if (fixed.k != rel.k || fixed.k != candidates.code_length())
        throw std::invalid_argument("mismatched code length");
    const size_t nwords = candidates.words_per_code();
    const uint64_t* cand = candidates.raw_words().data();
    std::vector<int64_t> out(candidates.count());
    for (uint64_t i = 0; i < candidates.count(); ++i, cand += nwords) {
        int64_t pop = 0;
        for (size_t w = 0; w < nwords; ++w)
            pop += std::popcount(fixed.words[w] ^ rel.words[w] ^ cand[w]);
        out[i] = 2 * pop - static_cast<int64_t>(fixed.k);
    }
    return out;
}

void write_codes(const BinaryCodeMatrix& m, const std::filesystem::path& path) {
    io::AtomicFile file(path);
    auto& out = file.stream();
    out.write(kMagic, 4);
    io::write_u16(out, kVersion);
    io::write_u32(out, m.code_length());
    io::write_u64(out, m.count());
    for (uint64_t w : m.raw_words()) io::write_u64(out, w);
    file.commit();
}

BinaryCodeMatrix read_codes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in) throw std::runtime_error("truncated file: " + path.string());
    if (std::string_view(magic, 4) != std::string_view(kMagic, 4))
        throw std::runtime_error("bad magic: not a DKGB code file: " + path.string());
    const uint16_t version = io::read_u16(in);
    if (version != kVersion)
        throw std::runtime_error("unsupported DKGB version " + std::to_string(version));
    const uint32_t k = io::read_u32(in);
    if (k == 0) throw std::runtime_error("invalid code length 0 in " + path.string());
    const uint64_t count = io::read_u64(in);

    std::vector<uint64_t> words(words_for(k) * count);
    for (uint64_t& w : words) w = io::read_u64(in);
    if (in.peek() != std::char_traits<char>::eof())
        throw std::runtime_error("trailing bytes after code data in " + path.string());
    try {
        return BinaryCodeMatrix::from_words(k, count, std::move(words));
    } catch (const std::runtime_error&) {
        throw std::runtime_error("nonzero pad bits in " + path.string());
    }
}

}  // namespace dkge
