/**************************************************************************
 * mds.hpp
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

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "field.hpp"

namespace mdscache {

/// Systematic Reed-Solomon code of length n over F message symbols.
/// Coded index i is the evaluation of the message polynomial at alpha^i;
/// the polynomial is the unique one of degree < F that takes the message
/// values at alpha^0 .. alpha^(F-1).
struct CodecConfig {
    std::uint64_t message_len = 0;
    std::uint64_t code_len = 0;
    unsigned field_width = 16;
    std::uint32_t primitive_poly = kPrimitivePoly16;

    friend bool operator==(const CodecConfig&, const CodecConfig&) = default;
};

inline void to_json(nlohmann::json& j, const CodecConfig& c) {
    char poly[16];
    std::snprintf(poly, sizeof poly, "0x%x", static_cast<unsigned>(c.primitive_poly));
    j = nlohmann::json{{"F", c.message_len},
                       {"n", c.code_len},
                       {"field_width", c.field_width},
                       {"generator", {{"family", "systematic-reed-solomon"},
                                      {"primitive_poly", poly},
                                      {"points", "alpha^i, i = 0..n-1"}}}};
}

inline void from_json(const nlohmann::json& j, CodecConfig& c) {
    c.message_len = j.at("F").get<std::uint64_t>();
    c.code_len = j.at("n").get<std::uint64_t>();
    c.field_width = j.value("field_width", 16U);
    c.primitive_poly = default_primitive_poly(c.field_width);
    if (j.contains("generator") && j["generator"].contains("primitive_poly")) {
        c.primitive_poly = static_cast<std::uint32_t>(
            std::stoul(j["generator"]["primitive_poly"].get<std::string>(), nullptr, 0));
    }
}

/// One received coded symbol.
struct CodedPoint {
    std::uint64_t index;
    Symbol value;
};

class ReedSolomonCodec {
public:
    explicit ReedSolomonCodec(const CodecConfig& config)
        : ReedSolomonCodec(config, GaloisField::get(config.field_width)) {}

    ReedSolomonCodec(const CodecConfig& config, const GaloisField& field)
        : config_(config), field_(&field) {
        if (field.width() != config.field_width) throw CodecError("field width does not match codec config");
        if (config.message_len == 0) throw CodecError("message length must be positive");
        if (config.code_len < config.message_len) throw CodecError("code length below message length");
        if (config.code_len > field.group_order()) {
            throw CodecError("code length " + std::to_string(config.code_len) +
                             " exceeds field capacity " + std::to_string(field.group_order()));
        }
        if (config.code_len > config.message_len) {
            systematic_weights_ = barycentric_weights(systematic_nodes());
        }
    }

    const CodecConfig& config() const { return config_; }
    const GaloisField& field() const { return *field_; }

    Symbol point(std::uint64_t index) const { return field_->exp(index); }

    std::vector<Symbol> encode(std::span<const Symbol> message) const {
        const auto f = config_.message_len;
        if (message.size() != f) {
            throw CodecError("message length " + std::to_string(message.size()) + " != " + std::to_string(f));
        }
        check_symbols(message);
        std::vector<Symbol> out(message.begin(), message.end());
        out.reserve(config_.code_len);
        const auto nodes = systematic_nodes();
        for (std::uint64_t i = f; i < config_.code_len; ++i) {
            out.push_back(interpolate(nodes, systematic_weights_, message, point(i)));
        }
        return out;
    }

    /// Reconstructs the message from any F coded symbols with distinct indices.
    std::vector<Symbol> decode(std::span<const CodedPoint> points) const {
        const auto f = config_.message_len;
        std::vector<CodedPoint> sorted(points.begin(), points.end());
        std::sort(sorted.begin(), sorted.end(),
                  [](const CodedPoint& a, const CodedPoint& b) { return a.index < b.index; });
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (sorted[i].index >= config_.code_len) {
                throw CodecError("coded index " + std::to_string(sorted[i].index) + " out of range");
            }
            if (i > 0 && sorted[i].index == sorted[i - 1].index) {
                throw CodecError("duplicate coded index " + std::to_string(sorted[i].index));
            }
        }
        if (sorted.size() < f) throw InsufficientSymbols(sorted.size(), f);
        sorted.resize(f);

        std::vector<Symbol> message(f, 0);
        if (sorted.back().index == f - 1) {
            for (const auto& p : sorted) message[p.index] = p.value;
            return message;
        }
        std::vector<Symbol> nodes, values;
        nodes.reserve(f);
        values.reserve(f);
        for (const auto& p : sorted) {
            nodes.push_back(point(p.index));
            values.push_back(p.value);
        }
        check_symbols(values);
        const auto weights = barycentric_weights(nodes);
        for (std::uint64_t t = 0; t < f; ++t) message[t] = interpolate(nodes, weights, values, point(t));
        return message;
    }

    /// Coefficients c with codeword[index] = sum_j c[j] * message[j].
    std::vector<Symbol> generator_row(std::uint64_t index) const {
        const auto f = config_.message_len;
        if (index >= config_.code_len) throw CodecError("coded index out of range");
        std::vector<Symbol> row(f, 0);
        if (index < f) {
            row[index] = 1;
            return row;
        }
        const auto nodes = systematic_nodes();
        const Symbol x = point(index);
        Symbol ell = 1;
        for (Symbol node : nodes) ell = field_->mul(ell, GaloisField::add(x, node));
        for (std::uint64_t j = 0; j < f; ++j) {
            row[j] = field_->div(field_->mul(ell, systematic_weights_[j]), GaloisField::add(x, nodes[j]));
        }
        return row;
    }

private:
    std::vector<Symbol> systematic_nodes() const {
        std::vector<Symbol> nodes(config_.message_len);
        for (std::uint64_t i = 0; i < nodes.size(); ++i) nodes[i] = point(i);
        return nodes;
    }

    // w_j = 1 / prod_{m != j} (x_j - x_m)
    std::vector<Symbol> barycentric_weights(std::span<const Symbol> nodes) const {
        std::vector<Symbol> w(nodes.size());
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            Symbol prod = 1;
            for (std::size_t m = 0; m < nodes.size(); ++m) {
                if (m != j) prod = field_->mul(prod, GaloisField::add(nodes[j], nodes[m]));
            }
            w[j] = field_->inv(prod);
        }
        return w;
    }

    Symbol interpolate(std::span<const Symbol> nodes, std::span<const Symbol> weights,
                       std::span<const Symbol> values, Symbol x) const {
        Symbol ell = 1;
        Symbol sum = 0;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const Symbol diff = GaloisField::add(x, nodes[j]);
            if (diff == 0) return values[j];
            ell = field_->mul(ell, diff);
            sum ^= field_->div(field_->mul(weights[j], values[j]), diff);
        }
        return field_->mul(ell, sum);
    }

    void check_symbols(std::span<const Symbol> symbols) const {
        if (field_->width() == 16) return;
        for (Symbol s : symbols) {
            if (s >= field_->order()) throw CodecError("symbol exceeds field width");
        }
    }

    CodecConfig config_;
    const GaloisField* field_;
    std::vector<Symbol> systematic_weights_;
};

inline std::vector<Symbol> mds_encode(std::span<const Symbol> message, const CodecConfig& config) {
    return ReedSolomonCodec(config).encode(message);
}

inline std::vector<Symbol> mds_decode(std::span<const CodedPoint> points, const CodecConfig& config) {
    return ReedSolomonCodec(config).decode(points);
}

} // namespace mdscache
