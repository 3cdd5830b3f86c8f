#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "anobench/errors.hpp"

namespace anobench::csv {

// The file formats here are plain comma-separated fields with no quoting;
// IDs never contain commas (the column grammar already bans '_', and the
// writers validate separators).

std::vector<std::string_view> split(std::string_view line, char sep = ',');

// Shortest round-trip representation of a double (std::to_chars).
std::string format_double(double v);

double parse_double(std::string_view text);   // throws DataError
int64_t parse_int(std::string_view text);     // throws DataError

std::ofstream open_output(const std::string& path);  // throws IoError
std::ifstream open_input(const std::string& path);   // throws MissingInputError

// Reads one line, tolerating a trailing '\r'. Returns false on EOF.
bool getline(std::istream& in, std::string& line);

}  // namespace anobench::csv
