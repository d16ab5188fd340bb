#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace crack {

// Number of worker threads: CRACK_THREADS if set, else hardware concurrency.
int worker_threads();

// Runs fn(i) for i in [0, n). Work items must be independent; results must be
// written to disjoint slots so that the output does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// FNV-1a 64-bit digest, used for the manifest file inventory.
std::uint64_t fnv1a64(const void* data, std::size_t n);
std::string fnv1a64_hex(const std::string& bytes);

// Formats a double with 17 significant digits (lossless round-trip).
std::string format_g17(double x);

std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);

}  // namespace crack
