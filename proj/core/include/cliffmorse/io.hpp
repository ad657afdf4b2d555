#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace cliffmorse {

// shortest decimal form that parses back to the identical double
std::string format_double(double x);
double parse_double(std::string_view s);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view content);

} // namespace cliffmorse
