#include "frogsim/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <stdexcept>

namespace frogsim {

Site::Site(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) {
        throw std::invalid_argument("dimension must be in [1, " + std::to_string(kMaxDim) + "], got " +
                                    std::to_string(dim));
    }
}

Site::Site(std::initializer_list<std::int32_t> coords) : Site(static_cast<int>(coords.size())) {
    std::copy(coords.begin(), coords.end(), coords_.begin());
}

Site Site::axis_point(int dim, std::int32_t n) {
    Site s(dim);
    s.coords_[0] = n;
    return s;
}

Site Site::operator+(const Site& o) const {
    Site r = *this;
    for (int i = 0; i < dim_; ++i) r[i] += o[i];
    return r;
}

Site Site::operator-(const Site& o) const {
    Site r = *this;
    for (int i = 0; i < dim_; ++i) r[i] -= o[i];
    return r;
}

bool operator<(const Site& a, const Site& b) noexcept {
    if (a.coords_ != b.coords_) return a.coords_ < b.coords_;
    return a.dim_ < b.dim_;
}

std::string Site::to_string() const {
    std::string out = "(";
    for (int i = 0; i < dim_; ++i) {
        if (i) out += ',';
        out += std::to_string(coords_[static_cast<std::size_t>(i)]);
    }
    out += ')';
    return out;
}

Site parse_site(std::string_view text) {
    auto trim = [](std::string_view v) {
        while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
        while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
        return v;
    };
    text = trim(text);
    if (!text.empty() && text.front() == '(') {
        if (text.back() != ')') throw std::invalid_argument("unbalanced parenthesis in site '" + std::string(text) + "'");
        text = text.substr(1, text.size() - 2);
    }
    std::vector<std::int32_t> coords;
    while (true) {
        const auto comma = text.find(',');
        const auto field = trim(text.substr(0, comma));
        std::int32_t value = 0;
        const auto* first = field.data();
        const auto* last = field.data() + field.size();
        if (!field.empty() && *first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (field.empty() || ec != std::errc{} || ptr != last) {
            throw std::invalid_argument("malformed site coordinate '" + std::string(field) + "'");
        }
        coords.push_back(value);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    if (coords.size() > static_cast<std::size_t>(kMaxDim)) throw std::invalid_argument("site has too many coordinates");
    Site s(static_cast<int>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) s[static_cast<int>(i)] = coords[i];
    return s;
}

std::size_t SiteHash::operator()(const Site& s) const noexcept {
    auto mix = [](std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(static_cast<std::uint64_t>(s.dim()));
    for (int i = 0; i < s.dim(); ++i) {
        h = mix(h + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s[i])) + 1));
    }
    return static_cast<std::size_t>(h);
}

std::int64_t l1_norm(const Site& s) noexcept {
    std::int64_t n = 0;
    for (int i = 0; i < s.dim(); ++i) n += std::abs(static_cast<std::int64_t>(s[i]));
    return n;
}

std::int64_t l1_distance(const Site& a, const Site& b) noexcept {
    std::int64_t n = 0;
    for (int i = 0; i < a.dim(); ++i) n += std::abs(static_cast<std::int64_t>(a[i]) - b[i]);
    return n;
}

Site shifted(const Site& s, Direction dir) {
    Site r = s;
    r[dir.axis] += dir.sign;
    return r;
}

std::vector<Site> neighbors(const Site& s) {
    std::vector<Site> out;
    out.reserve(static_cast<std::size_t>(2 * s.dim()));
    for (int i = 0; i < 2 * s.dim(); ++i) out.push_back(shifted(s, Direction::from_index(i)));
    return out;
}

std::int64_t diamond_point_count(int dim, std::int64_t r) {
    if (r < 0) return 0;
    // sum_k 2^k C(d,k) C(r,k)
    std::int64_t total = 0;
    std::int64_t choose_d = 1; // C(d,k)
    std::int64_t choose_r = 1; // C(r,k)
    std::int64_t pow2 = 1;
    for (int k = 0; k <= dim; ++k) {
        if (k > r) break;
        total += pow2 * choose_d * choose_r;
        choose_d = choose_d * (dim - k) / (k + 1);
        choose_r = choose_r * (r - k) / (k + 1);
        pow2 *= 2;
    }
    return total;
}

} // namespace frogsim
