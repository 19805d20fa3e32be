#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace pvrag::index {

/// Little-endian append-only byte buffer.
class ByteWriter {
 public:
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void f32(float v);
  void bytes(std::string_view raw);
  /// u32 length prefix followed by the raw bytes.
  void str(std::string_view s);

  const std::string& buffer() const noexcept { return buf_; }
  void write_file(const std::filesystem::path& path) const;

 private:
  std::string buf_;
};

/// Little-endian cursor over an in-memory file. Every read checks bounds and
/// reports the byte offset of the failure.
class ByteReader {
 public:
  explicit ByteReader(std::string data, std::string source = {});
  static ByteReader from_file(const std::filesystem::path& path);

  std::uint16_t u16(std::string_view what);
  std::uint32_t u32(std::string_view what);
  float f32(std::string_view what);
  std::string bytes(std::size_t n, std::string_view what);
  std::string str(std::string_view what);

  std::size_t offset() const noexcept { return pos_; }
  bool at_end() const noexcept { return pos_ == data_.size(); }
  [[noreturn]] void fail(std::string_view message) const;

 private:
  void need(std::size_t n, std::string_view what) const;

  std::string data_;
  std::string source_;
  std::size_t pos_ = 0;
};

}  // namespace pvrag::index
