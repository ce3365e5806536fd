#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace frogsim {

/// Largest supported lattice dimension.
inline constexpr int kMaxDim = 8;

/// A point of Z^d. Coordinates beyond `dim()` are kept at zero so that
/// equality and hashing only depend on the meaningful prefix.
class Site {
public:
    Site() = default;
    explicit Site(int dim);
    Site(std::initializer_list<std::int32_t> coords);

    static Site origin(int dim) { return Site(dim); }
    /// (n, 0, ..., 0)
    static Site axis_point(int dim, std::int32_t n);

    int dim() const noexcept { return dim_; }
    std::int32_t operator[](int i) const noexcept { return coords_[static_cast<std::size_t>(i)]; }
    std::int32_t& operator[](int i) noexcept { return coords_[static_cast<std::size_t>(i)]; }

    Site operator+(const Site& o) const;
    Site operator-(const Site& o) const;

    friend bool operator==(const Site& a, const Site& b) noexcept {
        return a.dim_ == b.dim_ && a.coords_ == b.coords_;
    }
    friend bool operator!=(const Site& a, const Site& b) noexcept { return !(a == b); }
    /// Lexicographic on coordinates; dimension breaks ties.
    friend bool operator<(const Site& a, const Site& b) noexcept;

    std::string to_string() const;

private:
    std::array<std::int32_t, kMaxDim> coords_{};
    std::int32_t dim_ = 0;
};

/// Parses "(1,-2)" or "1,-2" or "3". Throws std::invalid_argument.
Site parse_site(std::string_view text);

struct SiteHash {
    std::size_t operator()(const Site& s) const noexcept;
};

/// A unit step: `axis` in [0, d), `sign` is -1 or +1.
struct Direction {
    int axis = 0;
    int sign = 1;

    /// Canonical index in [0, 2d): axis ascending, -1 before +1.
    int index() const noexcept { return 2 * axis + (sign > 0 ? 1 : 0); }
    static Direction from_index(int i) noexcept { return {i / 2, (i % 2 == 0) ? -1 : 1}; }

    friend bool operator==(const Direction&, const Direction&) = default;
};

std::int64_t l1_norm(const Site& s) noexcept;
std::int64_t l1_distance(const Site& a, const Site& b) noexcept;

Site shifted(const Site& s, Direction dir);

/// The 2d nearest neighbours in canonical order (axis ascending, -1 before +1).
std::vector<Site> neighbors(const Site& s);

/// Number of lattice points x in Z^d with ||x||_1 <= r.
std::int64_t diamond_point_count(int dim, std::int64_t r);

} // namespace frogsim
