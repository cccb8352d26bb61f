#pragma once

#include <string>

namespace exknet::io {

// Writes `bytes` to `path` via a temp file in the same directory plus rename,
// so readers never observe a partial file.
void atomic_write(const std::string& path, const std::string& bytes);

std::string read_file(const std::string& path);

}  // namespace exknet::io
