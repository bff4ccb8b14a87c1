#include "dkge/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "dkge/io.hpp"

namespace dkge {

namespace {

constexpr char kMagic[4] = {'D', 'K', 'G', 'D'};
constexpr uint16_t kVersion = 1;

void parse_split(const std::filesystem::path& path, Split split, Vocabulary& vocab,
                 TripleSet& out) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());

    std::unordered_set<Triple, TripleHash> seen;
    uint64_t dropped = 0;
    std::string line;
    for (uint64_t lineno = 1; std::getline(in, line); ++lineno) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const size_t tab1 = line.find('\t');
        const size_t tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos ||
            line.find('\t', tab2 + 1) != std::string::npos || tab1 == 0 || tab2 == tab1 + 1 ||
            tab2 + 1 == line.size()) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": malformed line (expected head<TAB>relation<TAB>tail)");
        }
        Triple x;
        x.h = vocab.entity_id(line.substr(0, tab1));
        x.r = vocab.relation_id(line.substr(tab1 + 1, tab2 - tab1 - 1));
        x.t = vocab.entity_id(line.substr(tab2 + 1));
        if (!seen.insert(x).second) {
            ++dropped;
            continue;
        }
        out.push_back(x);
    }
    if (dropped > 0)
        std::fprintf(stderr, "[dkge] warning: %s split dropped %llu duplicate line(s) from %s\n",
                     split_name(split), static_cast<unsigned long long>(dropped),
                     path.string().c_str());
}

}  // namespace

const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::valid: return "valid";
        case Split::test: return "test";
    }
    return "?";
}

uint32_t Vocabulary::entity_id(const std::string& name) {
    auto it = entity_index_.find(name);
    if (it != entity_index_.end()) return it->second;
    const auto id = static_cast<uint32_t>(entity_names_.size());
    entity_names_.push_back(name);
    entity_index_.emplace(name, id);
    return id;
}

uint32_t Vocabulary::relation_id(const std::string& name) {
    auto it = relation_index_.find(name);
    if (it != relation_index_.end()) return it->second;
    const auto id = static_cast<uint32_t>(relation_names_.size());
    relation_names_.push_back(name);
    relation_index_.emplace(name, id);
    return id;
}

std::optional<uint32_t> Vocabulary::find_entity(const std::string& name) const {
    auto it = entity_index_.find(name);
    if (it == entity_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<uint32_t> Vocabulary::find_relation(const std::string& name) const {
    auto it = relation_index_.find(name);
    if (it == relation_index_.end()) return std::nullopt;
    return it->second;
}

const TripleSet& Dataset::split(Split s) const {
    switch (s) {
        case Split::valid: return valid;
        case Split::test: return test;
        case Split::train: break;
    }
    return train;
}

Dataset load_dataset(const std::filesystem::path& train_path,
                     const std::filesystem::path& valid_path,
                     const std::filesystem::path& test_path) {
    Dataset ds;
    parse_split(train_path, Split::train, ds.vocab, ds.train);
    parse_split(valid_path, Split::valid, ds.vocab, ds.valid);
    parse_split(test_path, Split::test, ds.vocab, ds.test);
    if (ds.train.empty()) throw std::runtime_error("empty train split: " + train_path.string());
    std::fprintf(stderr,
                 "[dkge] loaded %llu entities, %llu relations; train=%zu valid=%zu test=%zu\n",
                 static_cast<unsigned long long>(ds.vocab.entity_count()),
                 static_cast<unsigned long long>(ds.vocab.relation_count()), ds.train.size(),
                 ds.valid.size(), ds.test.size());
    return ds;
}

SelfLoopRemoval remove_self_loops(const TripleSet& ts) {
    SelfLoopRemoval out;
    out.triples.reserve(ts.size());
    for (const Triple& x : ts) {
        if (x.h == x.t)
            ++out.removed;
        else
            out.triples.push_back(x);
    }
    if (out.removed > 0)
        std::fprintf(stderr, "[dkge] removed %llu self-loop triple(s) from training input\n",
                     static_cast<unsigned long long>(out.removed));
    return out;
}

FilterIndex FilterIndex::build(const Dataset& ds, std::span<const Split> splits) {
    if (splits.empty()) throw std::invalid_argument("filter index needs at least one split");
    FilterIndex idx;
    for (Split s : splits) {
        for (const Triple& x : ds.split(s)) {
            idx.tails_[key(x.h, x.r)].push_back(x.t);
            idx.heads_[key(x.r, x.t)].push_back(x.h);
        }
    }
    auto dedupe = [](std::unordered_map<uint64_t, std::vector<uint32_t>>& m) {
        for (auto& [k, v] : m) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        }
    };
    dedupe(idx.tails_);
    dedupe(idx.heads_);
    return idx;
}

bool FilterIndex::contains(const Triple& x) const {
    auto tails = tails_of(x.h, x.r);
    return std::binary_search(tails.begin(), tails.end(), x.t);
}

std::span<const uint32_t> FilterIndex::tails_of(uint32_t h, uint32_t r) const {
    auto it = tails_.find(key(h, r));
    if (it == tails_.end()) return {};
    return it->second;
}

std::span<const uint32_t> FilterIndex::heads_of(uint32_t r, uint32_t t) const {
    auto it = heads_.find(key(r, t));
    if (it == heads_.end()) return {};
    return it->second;
}

void write_bundle(const Dataset& ds, const std::filesystem::path& path) {
    io::AtomicFile file(path);
    auto& out = file.stream();
    out.write(kMagic, 4);
    io::write_u16(out, kVersion);
    io::write_u64(out, ds.vocab.entity_count());
    io::write_u64(out, ds.vocab.relation_count());
    for (const auto& name : ds.vocab.entity_names()) io::write_string(out, name);
    for (const auto& name : ds.vocab.relation_names()) io::write_string(out, name);
    for (Split s : {Split::train, Split::valid, Split::test}) {
        const TripleSet& ts = ds.split(s);
        io::write_u64(out, ts.size());
        for (const Triple& x : ts) {
            io::write_u32(out, x.h);
            io::write_u32(out, x.r);
            io::write_u32(out, x.t);
        }
    }
    file.commit();
}

Dataset read_bundle(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in) throw std::runtime_error("truncated file: " + path.string());
    if (std::string_view(magic, 4) != std::string_view(kMagic, 4))
        throw std::runtime_error("bad magic: not a DKGD bundle: " + path.string());
    const uint16_t version = io::read_u16(in);
    if (version != kVersion)
        throw std::runtime_error("unsupported DKGD version " + std::to_string(version));

    Dataset ds;
    const uint64_t n = io::read_u64(in);
    const uint64_t m = io::read_u64(in);
    for (uint64_t i = 0; i < n; ++i) ds.vocab.entity_id(io::read_string(in));
    for (uint64_t i = 0; i < m; ++i) ds.vocab.relation_id(io::read_string(in));
    if (ds.vocab.entity_count() != n || ds.vocab.relation_count() != m)
        throw std::runtime_error("duplicate vocabulary entries in " + path.string());

    for (TripleSet* ts : {&ds.train, &ds.valid, &ds.test}) {
        const uint64_t count = io::read_u64(in);
        ts->reserve(count);
        for (uint64_t i = 0; i < count; ++i) {
            Triple x;
            x.h = io::read_u32(in);
            x.r = io::read_u32(in);
            x.t = io::read_u32(in);
            if (x.h >= n || x.t >= n || x.r >= m)
                throw std::runtime_error("triple index out of vocabulary bounds in " +
                                         path.string());
            ts->push_back(x);
        }
    }
    return ds;
}

}  // namespace dkge
