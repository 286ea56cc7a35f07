#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace bellforge {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ULL);
std::uint64_t fnv1a(std::string_view s);

// Named, indexed generator stream derived from one root seed.
std::mt19937_64 substream(std::uint64_t root, std::string_view name, std::uint64_t index = 0);
double uniform01(std::mt19937_64& rng);

// Worker count: BELLFORGE_THREADS if set, otherwise hardware concurrency.
unsigned thread_count();
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

std::string base64_encode(const std::vector<unsigned char>& bytes);
std::vector<unsigned char> base64_decode(std::string_view text);

std::string hex64(std::uint64_t v);

}  // namespace bellforge
