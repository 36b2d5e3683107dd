#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace lgplan {

// Throws FileNotFound if the file cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

// Creates parent directories as needed; throws Error on failure.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace lgplan
