#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subiso/errors.hpp"

namespace subiso {

using big_count = boost::multiprecision::cpp_int;

/// Exact binomial coefficient C(n, r); zero when r > n.
inline big_count binomial(std::uint64_t n, std::uint64_t r) {
    if (r > n) {
        return 0;
    }
    r = std::min(r, n - r);
    big_count out = 1;
    for (std::uint64_t i = 1; i <= r; ++i) {
        out *= n - r + i;
        out /= i;
    }
    return out;
}

/// Exact decimal up to 30 digits, otherwise "d.ddde+N".
inline std::string format_count(const big_count& x) {
    const std::string digits = x.str();
    if (digits.size() <= 30) {
        return digits;
    }
    return digits.substr(0, 1) + "." + digits.substr(1, 3) + "e+" + std::to_string(digits.size() - 1);
}

/// Number of weak compositions of `total` into `parts` parts.
inline big_count composition_count(std::uint64_t total, std::uint64_t parts) {
    if (parts == 0) {
        return total == 0 ? 1 : 0;
    }
    return binomial(total + parts - 1, parts - 1);
}

/// Streams the weak compositions of `total` into `parts` non-negative parts in
/// lexicographic order, starting at (0, ..., 0, total) and ending at (total, 0, ..., 0).
class composition_stream {
public:
    composition_stream(std::uint64_t total, std::size_t parts) : total_(total), parts_(parts) {
        if (parts == 0) {
            throw contract_error("composition_stream: parts must be >= 1");
        }
    }

    /// Checks the count against `cap` before any work happens.
    static composition_stream capped(std::uint64_t total, std::size_t parts, const big_count& cap,
                                     bool force = false) {
        const auto count = composition_count(total, parts);
        if (!force && count > cap) {
            throw refusal_error("enumeration refused: C(" + std::to_string(total + parts - 1) + "," +
                                std::to_string(parts - 1) + ") = " + format_count(count) +
                                " sequences exceed the cap of " + cap.str());
        }
        return composition_stream(total, parts);
    }

    /// Next composition, or nullopt once exhausted.
    std::optional<std::vector<std::uint64_t>> next() {
        if (done_) {
            return std::nullopt;
        }
        if (!started_) {
            started_ = true;
            current_.assign(parts_, 0);
            current_.back() = total_;
            ++index_;
            return current_;
        }
        // Rightmost position i < last whose increment still leaves room: the
        // suffix after i holds the remainder, so i can grow iff that suffix is non-empty.
        const std::size_t last = parts_ - 1;
        std::uint64_t suffix = current_[last];
        std::size_t i = last;
        while (i > 0) {
            --i;
            if (suffix > 0) {
                ++current_[i];
                --suffix;
                for (std::size_t j = i + 1; j < last; ++j) {
                    current_[j] = 0;
                }
                current_[last] = suffix;
                ++index_;
                return current_;
            }
            suffix += current_[i];
        }
        done_ = true;
        return std::nullopt;
    }

    /// 0-based index of the composition most recently returned.
    std::uint64_t index() const noexcept { return index_ - 1; }

private:
    std::uint64_t total_;
    std::size_t parts_;
    std::vector<std::uint64_t> current_;
    std::uint64_t index_ = 0;
    bool started_ = false;
    bool done_ = false;
};

/// Position of `a` in the lexicographic order that composition_stream follows.
inline big_count composition_rank(const std::vector<std::uint64_t>& a) {
    if (a.empty()) {
        throw contract_error("composition_rank: empty composition");
    }
    std::uint64_t remaining = 0;
    for (auto x : a) {
        remaining += x;
    }
    big_count rank = 0;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        for (std::uint64_t v = 0; v < a[i]; ++v) {
            rank += composition_count(remaining - v, a.size() - i - 1);
        }
        remaining -= a[i];
    }
    return rank;
}

} // namespace subiso
