#include "frogsim/rng.hpp"

namespace frogsim {

namespace hashing {

std::uint64_t particle_prefix(std::uint64_t seed, const Site& site, std::uint64_t particle_index) noexcept {
    std::uint64_t h = mix64(seed ^ 0x6A09E667F3BCC909ULL);
    h = absorb(h, static_cast<std::uint64_t>(site.dim()));
    for (int i = 0; i < site.dim(); ++i) h = absorb(h, static_cast<std::uint32_t>(site[i]));
    return absorb(h, particle_index);
}

} // namespace hashing

std::uint64_t raw_bits(const StreamKey& key) noexcept {
    const auto prefix = hashing::particle_prefix(key.seed, key.site, key.particle_index);
    return hashing::finish(prefix, key.stream, key.counter1, key.counter2);
}

double uniform(const StreamKey& key) noexcept { return hashing::to_unit(raw_bits(key)); }

Direction direction(const StreamKey& key, int dim) noexcept {
    return Direction::from_index(hashing::to_direction_index(uniform(key), dim));
}

Direction RandomnessSource::jump_direction(const Site& birth_site, std::uint64_t j, std::uint64_t n) const noexcept {
    return direction(StreamKey{seed_, Stream::Jump, birth_site, j, n, 0}, birth_site.dim());
}

Site RandomnessSource::walk_position(const Site& birth_site, std::uint64_t j, std::uint64_t n) const {
    Site pos = birth_site;
    const auto prefix = hashing::particle_prefix(seed_, birth_site, j);
    for (std::uint64_t m = 0; m < n; ++m) {
        const double u = hashing::to_unit(hashing::finish(prefix, Stream::Jump, m, 0));
        const auto dir = Direction::from_index(hashing::to_direction_index(u, birth_site.dim()));
        pos[dir.axis] += dir.sign;
    }
    return pos;
}

std::uint64_t replica_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
    // The replica seed key uses a one-dimensional origin and particle index 0.
    return raw_bits(StreamKey{base_seed, Stream::Aux, Site::origin(1), 0, index, 0});
}

KeyedBitGenerator::KeyedBitGenerator(const StreamKey& key) noexcept
    : base_(hashing::absorb(hashing::absorb(hashing::particle_prefix(key.seed, key.site, key.particle_index),
                                            static_cast<std::uint64_t>(key.stream)),
                            key.counter1)),
      counter_(key.counter2) {}

} // namespace frogsim
