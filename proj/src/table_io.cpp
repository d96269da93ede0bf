// RZC1 coefficient cache.
//
//   "RZC1" | u64 cutoff | u8 flags | u16 label_len | label (UTF-8)
//   | values (8-byte IEEE-754 or 16-byte signed, little-endian)
//   | u64 FNV-1a of the value block
//
// flags bit 0: non-negative table; bit 1: exact-integer (i128) values.

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "rz/coeffs.hpp"
#include "rz/error.hpp"

namespace rz {

namespace {

constexpr char kMagic[4] = {'R', 'Z', 'C', '1'};
constexpr std::uint8_t kFlagNonneg = 0x1;
constexpr std::uint8_t kFlagExact = 0x2;

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::vector<unsigned char> header(std::uint64_t cutoff, std::uint8_t flags, const std::string& label) {
  if (label.size() > 0xFFFF) fail(Errc::invalid_argument, "table label longer than 65535 bytes");
  std::vector<unsigned char> out(kMagic, kMagic + 4);
  put_u64(out, cutoff);
  out.push_back(flags);
  out.push_back(static_cast<unsigned char>(label.size() & 0xFF));
  out.push_back(static_cast<unsigned char>(label.size() >> 8));
  out.insert(out.end(), label.begin(), label.end());
  return out;
}

void write_file(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(Errc::io, "cannot open " + tmp.string() + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) fail(Errc::io, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(Errc::io, "rename failed: " + path.string() + ": " + ec.message());
}

struct Parsed {
  std::uint64_t cutoff = 0;
  std::uint8_t flags = 0;
  std::string label;
  std::vector<unsigned char> bytes;
  std::size_t value_start = 0;
};

Parsed parse(const std::filesystem::path& path, std::size_t value_width) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(Errc::io, "cannot open " + path.string());
  Parsed r;
  r.bytes.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
  const auto& b = r.bytes;
  if (b.size() < 4) fail(Errc::malformed_header, path.string() + ": file shorter than magic");
  if (std::memcmp(b.data(), kMagic, 3) != 0 || b[3] != '1')
    fail(Errc::version_mismatch, path.string() + ": unknown magic/version");
  if (b.size() < 4 + 8 + 1 + 2) fail(Errc::malformed_header, path.string() + ": truncated header");
  r.cutoff = get_u64(b.data() + 4);
  r.flags = b[12];
  std::size_t label_len = b[13] | (static_cast<std::size_t>(b[14]) << 8);
  if (r.flags & ~(kFlagNonneg | kFlagExact))
    fail(Errc::malformed_header, path.string() + ": unknown flag bits");
  if (r.cutoff == 0) fail(Errc::malformed_header, path.string() + ": zero cutoff");
  if (b.size() < 15 + label_len) fail(Errc::malformed_header, path.string() + ": truncated label");
  r.label.assign(reinterpret_cast<const char*>(b.data() + 15), label_len);
  r.value_start = 15 + label_len;
  const bool exact = (r.flags & kFlagExact) != 0;
  if (exact != (value_width == 16))
    fail(Errc::version_mismatch, path.string() + (exact ? ": exact-integer table, expected real values"
                                                        : ": real table, expected exact integers"));
  if (r.cutoff > (b.size() - r.value_start) / value_width)
    fail(Errc::checksum_mismatch, path.string() + ": value block truncated");
  const std::size_t block = r.cutoff * value_width;
  if (b.size() != r.value_start + block + 8)
    fail(Errc::checksum_mismatch, path.string() + ": value block length does not match cutoff");
  std::uint64_t stored = get_u64(b.data() + r.value_start + block);
  std::uint64_t actual = fnv1a64(std::span(b.data() + r.value_start, block));
  if (stored != actual) fail(Errc::checksum_mismatch, path.string() + ": checksum mismatch");
  return r;
}

}  // namespace

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void save_table(const CoeffTable& t, const std::filesystem::path& path) {
  std::vector<unsigned char> out = header(t.cutoff(), t.nonneg() ? kFlagNonneg : 0, t.source_label());
  const std::size_t start = out.size();
  for (double v : t.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  std::uint64_t sum = fnv1a64(std::span(out.data() + start, out.size() - start));
  put_u64(out, sum);
  write_file(path, out);
}

CoeffTable load_table(const std::filesystem::path& path) {
  Parsed r = parse(path, 8);
  std::vector<double> values(r.cutoff);
  for (std::size_t i = 0; i < r.cutoff; ++i)
    values[i] = std::bit_cast<double>(get_u64(r.bytes.data() + r.value_start + 8 * i));
  return CoeffTable(std::move(values), (r.flags & kFlagNonneg) != 0, r.label);
}

void save_exact_table(std::span<const __int128> values, const std::string& label,
                      const std::filesystem::path& path) {
  require(!values.empty(), "save_exact_table: empty table");
  std::vector<unsigned char> out = header(values.size(), kFlagExact, label);
  const std::size_t start = out.size();
  for (__int128 v : values) {
    auto u = static_cast<unsigned __int128>(v);
    put_u64(out, static_cast<std::uint64_t>(u));
    put_u64(out, static_cast<std::uint64_t>(u >> 64));
  }
  std::uint64_t sum = fnv1a64(std::span(out.data() + start, out.size() - start));
  put_u64(out, sum);
  write_file(path, out);
}

std::vector<__int128> load_exact_table(const std::filesystem::path& path, std::string* label) {
  Parsed r = parse(path, 16);
  std::vector<__int128> values(r.cutoff);
  for (std::size_t i = 0; i < r.cutoff; ++i) {
    const unsigned char* p = r.bytes.data() + r.value_start + 16 * i;
    unsigned __int128 u = (static_cast<unsigned __int128>(get_u64(p + 8)) << 64) | get_u64(p);
    values[i] = static_cast<__int128>(u);
  }
  if (label) *label = r.label;
  return values;
}

}  // namespace rz
