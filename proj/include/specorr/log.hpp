#pragma once

#include <iostream>
#include <string>

namespace specorr {

// Single stream insertion so concurrent workers do not interleave mid-line.
inline void warn(const std::string& msg) {
    std::cerr << ("warning: " + msg + "\n");
}

} // namespace specorr
