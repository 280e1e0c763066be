#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace lrex {

/// Walker/Vose alias table: O(n) build, O(1) draw from one 64-bit word.
class AliasTable {
public:
    AliasTable() = default;
    explicit AliasTable(const std::vector<double>& weights);

    std::size_t size() const { return prob_.size(); }

    template <class Rng>
    std::size_t sample(Rng& rng) const {
        // Top 53 bits give a uniform in [0, 1); its integer part picks the column.
        double x = static_cast<double>(rng() >> 11) * 0x1.0p-53 * static_cast<double>(prob_.size());
        auto i = static_cast<std::size_t>(x);
        if (i >= prob_.size()) i = prob_.size() - 1;
        return (x - static_cast<double>(i)) < prob_[i] ? i : alias_[i];
    }

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

}  // namespace lrex
