#include "dkge/io.hpp"

#include <stdexcept>
#include <vector>

namespace dkge::io {

namespace {

void write_le(std::ostream& out, uint64_t v, int bytes) {
    unsigned char b[8];
    for (int i = 0; i < bytes; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), bytes);
    if (!out) throw std::runtime_error("write failed");
}

uint64_t read_le(std::istream& in, int bytes) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), bytes);
    if (!in) throw std::runtime_error("truncated file: unexpected end of data");
    uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
}

}  // namespace

void write_u16(std::ostream& out, uint16_t v) { write_le(out, v, 2); }
void write_u32(std::ostream& out, uint32_t v) { write_le(out, v, 4); }
void write_u64(std::ostream& out, uint64_t v) { write_le(out, v, 8); }
void write_f64(std::ostream& out, double v) { write_le(out, std::bit_cast<uint64_t>(v), 8); }

void write_string(std::ostream& out, const std::string& s) {
    if (s.size() > UINT32_MAX) throw std::invalid_argument("string too long to serialize");
    write_u32(out, static_cast<uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!out) throw std::runtime_error("write failed");
}

uint16_t read_u16(std::istream& in) { return static_cast<uint16_t>(read_le(in, 2)); }
uint32_t read_u32(std::istream& in) { return static_cast<uint32_t>(read_le(in, 4)); }
uint64_t read_u64(std::istream& in) { return read_le(in, 8); }
double read_f64(std::istream& in) { return std::bit_cast<double>(read_le(in, 8)); }

std::string read_string(std::istream& in) {
    const uint32_t len = read_u32(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (!in) throw std::runtime_error("truncated file: unexpected end of data");
    return s;
}

AtomicFile::AtomicFile(std::filesystem::path path)
    : final_(std::move(path)), tmp_(final_.string() + ".tmp") {
    if (final_.has_parent_path()) std::filesystem::create_directories(final_.parent_path());
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open for writing: " + tmp_.string());
}

AtomicFile::~AtomicFile() {
    if (!committed_) {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(tmp_, ec);
    }
}

void AtomicFile::commit() {
    out_.flush();
    if (!out_) throw std::runtime_error("write failed: " + tmp_.string());
    out_.close();
    std::filesystem::rename(tmp_, final_);
    committed_ = true;
}

}  // namespace dkge::io
