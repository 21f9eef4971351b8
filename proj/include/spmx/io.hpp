#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <string_view>

#include "spmx/error.hpp"

namespace spmx {

class ByteSource {
 public:
  virtual ~ByteSource() = default;
  // Fills up to `cap` bytes; returns 0 at end of input.
  virtual size_t read(char* dst, size_t cap) = 0;
};

class ByteSink {
 public:
  virtual ~ByteSink() = default;
  virtual void write(const char* data, size_t n) = 0;
  virtual void flush() {}
};

class MemorySource final : public ByteSource {
 public:
  explicit MemorySource(std::string_view data) : data_(data) {}
  size_t read(char* dst, size_t cap) override {
    const size_t n = std::min(cap, data_.size() - pos_);
    std::memcpy(dst, data_.data() + pos_, n);
    pos_ += n;
    return n;
  }

 private:
  std::string_view data_;
  size_t pos_ = 0;
};

class FileSource final : public ByteSource {
 public:
  explicit FileSource(const std::string& path) : file_(std::fopen(path.c_str(), "rb")) {
    if (!file_) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for reading");
  }
  ~FileSource() override {
    if (file_) std::fclose(file_);
  }
  FileSource(const FileSource&) = delete;
  FileSource& operator=(const FileSource&) = delete;

  size_t read(char* dst, size_t cap) override { return std::fread(dst, 1, cap, file_); }

 private:
  FILE* file_;
};

class StringSink final : public ByteSink {
 public:
  void write(const char* data, size_t n) override { out_.append(data, n); }
  const std::string& str() const { return out_; }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class FileSink final : public ByteSink {
 public:
  explicit FileSink(const std::string& path) : file_(std::fopen(path.c_str(), "wb")) {
    if (!file_) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  }
  explicit FileSink(FILE* borrowed) : file_(borrowed), owned_(false) {}
  ~FileSink() override {
    if (file_ && owned_) std::fclose(file_);
  }
  FileSink(const FileSink&) = delete;
  FileSink& operator=(const FileSink&) = delete;

  void write(const char* data, size_t n) override {
    if (std::fwrite(data, 1, n, file_) != n) {
      throw Error(ErrorCode::IoError, "short write");
    }
  }
  void flush() override { std::fflush(file_); }

 private:
  FILE* file_;
  bool owned_ = true;
};

class NullSink final : public ByteSink {
 public:
  void write(const char*, size_t) override {}
};

}  // namespace spmx
