#include "npmr/rng.hpp"

namespace npmr {

std::uint64_t Rng::mix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng Rng::substream(std::uint64_t stream) const
{
    return Rng(mix(seed_ ^ mix(stream + 0x632be59bd9b4e019ULL)));
}

} // namespace npmr
