#include "pvrag/index/binary_io.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "pvrag/core/errors.hpp"

namespace pvrag::index {

void ByteWriter::u16(std::uint16_t v) {
  buf_ += static_cast<char>(v & 0xFF);
  buf_ += static_cast<char>((v >> 8) & 0xFF);
}

void ByteWriter::u32(std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) buf_ += static_cast<char>((v >> shift) & 0xFF);
}

void ByteWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::bytes(std::string_view raw) { buf_.append(raw); }

void ByteWriter::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  bytes(s);
}

void ByteWriter::write_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  if (!out) throw Error("write failed: " + path.string());
}

ByteReader::ByteReader(std::string data, std::string source)
    : data_(std::move(data)), source_(std::move(source)) {}

ByteReader ByteReader::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ByteReader(std::move(data), path.string());
}

void ByteReader::fail(std::string_view message) const {
  std::string where = source_.empty() ? std::string{} : source_ + ": ";
  throw FormatError(where + std::string(message) + " at byte offset " + std::to_string(pos_));
}

void ByteReader::need(std::size_t n, std::string_view what) const {
  if (data_.size() - pos_ < n) {
    fail("truncated file: expected " + std::to_string(n) + " bytes for " + std::string(what) +
         ", " + std::to_string(data_.size() - pos_) + " available");
  }
}

std::uint16_t ByteReader::u16(std::string_view what) {
  need(2, what);
  const auto* p = reinterpret_cast<const unsigned char*>(data_.data() + pos_);
  pos_ += 2;
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t ByteReader::u32(std::string_view what) {
  need(4, what);
  const auto* p = reinterpret_cast<const unsigned char*>(data_.data() + pos_);
  pos_ += 4;
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float ByteReader::f32(std::string_view what) { return std::bit_cast<float>(u32(what)); }

std::string ByteReader::bytes(std::size_t n, std::string_view what) {
  need(n, what);
  std::string out = data_.substr(pos_, n);
  pos_ += n;
  return out;
}

std::string ByteReader::str(std::string_view what) {
  const std::uint32_t n = u32(what);
  return bytes(n, what);
}

}  // namespace pvrag::index
