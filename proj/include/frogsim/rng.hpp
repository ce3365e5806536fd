#pragma once

#include <cstdint>
#include <limits>

#include "frogsim/lattice.hpp"

namespace frogsim {

/// Independent randomness families of one realization.
enum class Stream : std::uint8_t { EtaField = 0, Jump = 1, Delay = 2, TieBreak = 3, Aux = 4 };

/// Address of one random number. Particles are addressed by their birth site
/// and index for their whole life; `counter1` is the jump index (or time) and
/// `counter2` the delay sub-counter.
struct StreamKey {
    std::uint64_t seed = 0;
    Stream stream = Stream::Aux;
    Site site;
    std::uint64_t particle_index = 0;
    std::uint64_t counter1 = 0;
    std::uint64_t counter2 = 0;
};

namespace hashing {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Folds one field into a running hash; a bijection in `x` for fixed `h`.
constexpr std::uint64_t absorb(std::uint64_t h, std::uint64_t x) noexcept { return mix64(h + kGolden * (x + 1)); }

/// Hash of (seed, site, particle index); shared prefix of every per-particle key.
std::uint64_t particle_prefix(std::uint64_t seed, const Site& site, std::uint64_t particle_index) noexcept;

constexpr std::uint64_t finish(std::uint64_t prefix, Stream stream, std::uint64_t c1, std::uint64_t c2) noexcept {
    return absorb(absorb(absorb(prefix, static_cast<std::uint64_t>(stream)), c1), c2);
}

constexpr double to_unit(std::uint64_t h) noexcept { return static_cast<double>(h >> 11) * 0x1.0p-53; }

constexpr int to_direction_index(double u, int dim) noexcept {
    const int idx = static_cast<int>(u * (2 * dim));
    return idx < 2 * dim ? idx : 2 * dim - 1;
}

} // namespace hashing

/// Raw 64-bit output for a key; a pure function of all key fields.
std::uint64_t raw_bits(const StreamKey& key) noexcept;

/// Uniform on [0,1), a pure function of the key.
double uniform(const StreamKey& key) noexcept;

/// Uniform over the 2d directions: floor(uniform(key) * 2d) in canonical order.
Direction direction(const StreamKey& key, int dim) noexcept;

/// One realization of all randomness, identified by its seed. Copies are
/// cheap and refer to the same realization.
class RandomnessSource {
public:
    explicit RandomnessSource(std::uint64_t seed = 0) noexcept : seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    StreamKey key(Stream stream, const Site& site, std::uint64_t particle_index = 0, std::uint64_t counter1 = 0,
                  std::uint64_t counter2 = 0) const {
        return StreamKey{seed_, stream, site, particle_index, counter1, counter2};
    }

    double uniform(Stream stream, const Site& site, std::uint64_t j = 0, std::uint64_t c1 = 0,
                   std::uint64_t c2 = 0) const noexcept {
        return frogsim::uniform(StreamKey{seed_, stream, site, j, c1, c2});
    }

    /// Direction of the n-th jump (0-based) of particle (birth_site, j).
    Direction jump_direction(const Site& birth_site, std::uint64_t j, std::uint64_t n) const noexcept;

    /// Birth site plus the first n jumps of particle (birth_site, j).
    Site walk_position(const Site& birth_site, std::uint64_t j, std::uint64_t n) const;

private:
    std::uint64_t seed_;
};

/// Free-function form of RandomnessSource::walk_position.
inline Site walk_position(const RandomnessSource& source, const Site& birth_site, std::uint64_t j, std::uint64_t n) {
    return source.walk_position(birth_site, j, n);
}

/// Seed of replica `index` derived from a base seed on the Aux stream.
std::uint64_t replica_seed(std::uint64_t base_seed, std::uint64_t index) noexcept;

/// UniformRandomBitGenerator reading successive counter2 values of one key.
class KeyedBitGenerator {
public:
    using result_type = std::uint64_t;

    explicit KeyedBitGenerator(const StreamKey& key) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return hashing::absorb(base_, counter_++); }

private:
    std::uint64_t base_;
    std::uint64_t counter_;
};

} // namespace frogsim
