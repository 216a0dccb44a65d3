#pragma once

#include <string>
#include <vector>

namespace specorr::textio {

// One surviving data line with its 1-based line number in the original file.
struct Line {
    int number = 0;
    std::string text;
};

// Reads a whitespace-separated decimal text file. Blank lines and lines whose
// first non-space character is '#' are dropped.
std::vector<Line> read_data_lines(const std::string& path);

std::vector<std::string> split_ws(const std::string& text);

// Both throw std::runtime_error naming `context` on malformed input.
// parse_double accepts any value strtod does, including inf/nan; callers that
// need finite values check separately so the error can say so.
double parse_double(const std::string& token, const std::string& context);
long parse_long(const std::string& token, const std::string& context);

} // namespace specorr::textio
