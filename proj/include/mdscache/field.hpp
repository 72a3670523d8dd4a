/**************************************************************************
 * field.hpp
 *
 * Copyright 2026 The mdscache Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 **************************************************************************/

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "errors.hpp"

namespace mdscache {

/// A coded or message symbol. GF(2^8) elements use the low byte only.
using Symbol = std::uint16_t;

inline constexpr std::uint32_t kPrimitivePoly8 = 0x11D;
inline constexpr std::uint32_t kPrimitivePoly16 = 0x1100B;

inline std::uint32_t default_primitive_poly(unsigned width) {
    return width == 8 ? kPrimitivePoly8 : kPrimitivePoly16;
}

/// GF(2^w) for w in {8, 16}, table driven (log/antilog). Addition is XOR.
class GaloisField {
public:
    GaloisField(unsigned width, std::uint32_t primitive_poly)
        : width_(width), poly_(primitive_poly) {
        if (width != 8 && width != 16) throw CodecError("field width must be 8 or 16");
        if ((primitive_poly >> width) != 1U) throw CodecError("primitive polynomial degree does not match width");
        const std::size_t order = std::size_t{1} << width;
        log_.assign(order, 0);
        exp_.assign(2 * (order - 1), 0);
        std::uint32_t x = 1;
        for (std::size_t i = 0; i < order - 1; ++i) {
            if (i != 0 && x == 1) throw CodecError("polynomial is not primitive");
            exp_[i] = static_cast<Symbol>(x);
            log_[x] = static_cast<std::uint32_t>(i);
            x <<= 1U;
            if (x & order) x ^= primitive_poly;
        }
        if (x != 1) throw CodecError("polynomial is not primitive");
        for (std::size_t i = order - 1; i < exp_.size(); ++i) exp_[i] = exp_[i - (order - 1)];
    }

    static const GaloisField& gf8() {
        static const GaloisField field(8, kPrimitivePoly8);
        return field;
    }
    static const GaloisField& gf16() {
        static const GaloisField field(16, kPrimitivePoly16);
        return field;
    }
    static const GaloisField& get(unsigned width) {
        if (width == 8) return gf8();
        if (width == 16) return gf16();
        throw CodecError("field width must be 8 or 16");
    }

    unsigned width() const { return width_; }
    std::uint32_t primitive_poly() const { return poly_; }
    /// Number of field elements, 2^w.
    std::size_t order() const { return std::size_t{1} << width_; }
    /// Order of the multiplicative group, 2^w - 1.
    std::size_t group_order() const { return order() - 1; }

    static Symbol add(Symbol a, Symbol b) { return a ^ b; }

    Symbol mul(Symbol a, Symbol b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[log_[a] + log_[b]];
    }

    Symbol div(Symbol a, Symbol b) const {
        if (b == 0) throw CodecError("division by zero in GF(2^w)");
        if (a == 0) return 0;
        return exp_[log_[a] + group_order() - log_[b]];
    }

    Symbol inv(Symbol a) const { return div(1, a); }

    /// alpha^i for the primitive element alpha = x.
    Symbol exp(std::size_t i) const { return exp_[i % group_order()]; }

    std::uint32_t log(Symbol a) const {
        if (a == 0) throw CodecError("log of zero in GF(2^w)");
        return log_[a];
    }

    /// Test hook: overwrite one antilog entry so arithmetic becomes wrong.
    /// Only meant for negative-control runs of the self test.
    void corrupt_antilog_entry(std::size_t i, Symbol value) {
        exp_[i % exp_.size()] = value;
    }

private:
    unsigned width_;
    std::uint32_t poly_;
    std::vector<std::uint32_t> log_;
    std::vector<Symbol> exp_;
};

} // namespace mdscache
