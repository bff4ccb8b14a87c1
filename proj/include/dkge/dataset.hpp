#pragma once

// Triple file parsing, vocabularies, splits, and the filtered-ranking index.
//
// Input files are UTF-8, one `head<TAB>relation<TAB>tail` per line. The
// vocabulary covers the union of train/valid/test in first-appearance order
// (train first), so evaluation entities are never out of vocabulary and runs
// are reproducible from the same files.
//
// Bundle format (.dkgd), all little-endian:
//   magic   "DKGD" (4 bytes)
//   version u16 = 1
//   n, m    u64, u64
//   entity names, relation names   (u32 length + bytes each)
//   per split (train, valid, test): count u64, then count x (h u32, r u32, t u32)

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace dkge {

struct Triple {
    uint32_t h = 0;
    uint32_t r = 0;
    uint32_t t = 0;

    bool operator==(const Triple&) const = default;
};

struct TripleHash {
    size_t operator()(const Triple& x) const {
        uint64_t v = (static_cast<uint64_t>(x.h) << 32) | x.t;
        v ^= 0x9e3779b97f4a7c15ull + static_cast<uint64_t>(x.r);
        v *= 0xff51afd7ed558ccdull;
        v ^= v >> 33;
        return static_cast<size_t>(v);
    }
};

using TripleSet = std::vector<Triple>;

enum class Split { train, valid, test };
const char* split_name(Split s);

class Vocabulary {
public:
    uint32_t entity_id(const std::string& name);    // get-or-create
    uint32_t relation_id(const std::string& name);  // get-or-create
    std::optional<uint32_t> find_entity(const std::string& name) const;
    std::optional<uint32_t> find_relation(const std::string& name) const;
    const std::string& entity_name(uint32_t id) const { return entity_names_.at(id); }
    const std::string& relation_name(uint32_t id) const { return relation_names_.at(id); }
    uint64_t entity_count() const { return entity_names_.size(); }
    uint64_t relation_count() const { return relation_names_.size(); }
    const std::vector<std::string>& entity_names() const { return entity_names_; }
    const std::vector<std::string>& relation_names() const { return relation_names_; }

    bool operator==(const Vocabulary& o) const {
        return entity_names_ == o.entity_names_ && relation_names_ == o.relation_names_;
    }

private:
    std::vector<std::string> entity_names_;
    std::vector<std::string> relation_names_;
    std::unordered_map<std::string, uint32_t> entity_index_;
    std::unordered_map<std::string, uint32_t> relation_index_;
};

struct Dataset {
    Vocabulary vocab;
    TripleSet train;
    TripleSet valid;
    TripleSet test;

    const TripleSet& split(Split s) const;
};

// Duplicate lines within a split are dropped with a warning on stderr; a
// malformed line (not exactly 3 tab-separated fields) raises with its line
// number; an empty train split raises. Per-split counts are logged.
Dataset load_dataset(const std::filesystem::path& train_path,
                     const std::filesystem::path& valid_path,
                     const std::filesystem::path& test_path);

struct SelfLoopRemoval {
    TripleSet triples;
    uint64_t removed = 0;
};

// Drops triples with h == t: their score is independent of the entity code,
// so they carry no training signal. Evaluation keeps them.
SelfLoopRemoval remove_self_loops(const TripleSet& ts);

// Known-true lookups for the filtered ranking protocol. Immutable once built.
class FilterIndex {
public:
    static FilterIndex build(const Dataset& ds, std::span<const Split> splits);

    bool contains(const Triple& x) const;
    std::span<const uint32_t> tails_of(uint32_t h, uint32_t r) const;  // sorted
    std::span<const uint32_t> heads_of(uint32_t r, uint32_t t) const;  // sorted

private:
    static uint64_t key(uint32_t a, uint32_t b) { return (static_cast<uint64_t>(a) << 32) | b; }

    std::unordered_map<uint64_t, std::vector<uint32_t>> tails_;
    std::unordered_map<uint64_t, std::vector<uint32_t>> heads_;
};

void write_bundle(const Dataset& ds, const std::filesystem::path& path);
Dataset read_bundle(const std::filesystem::path& path);

}  // namespace dkge
