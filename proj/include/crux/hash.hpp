#pragma once

#include <cstdint>
#include <string_view>

namespace crux {

// 64-bit FNV-1a over UTF-8 bytes. Server selection is this hash modulo the
// member count of a canonically sorted member list, so any implementation
// that speaks the plan format picks identical servers.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// splitmix64 finalizer; used to derive independent sub-seeds from a run seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace crux
