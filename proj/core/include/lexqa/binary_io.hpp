#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lexqa::io {

void write_u32_le(std::ostream& out, std::uint32_t value);
std::uint32_t read_u32_le(std::istream& in);
void write_f32_le(std::ostream& out, float value);
float read_f32_le(std::istream& in);

std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary sibling file and renames it into place.
void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace lexqa::io
