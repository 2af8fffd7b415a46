/**
 * @file quantize.hpp
 * @brief Symmetric per-layer affine quantization of real weights.
 * @license Apache-2.0
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rnsnet/tensor.hpp"

namespace rnsnet {

struct QuantizationSpec {
    unsigned weight_bits = 6;
    unsigned activation_bits = 6;
};

struct QuantizedWeights {
    IntTensor values;
    double scale = 1.0;  ///< quantized = round(real * scale)
};

/**
 * @brief Maps real weights to integers with a per-layer symmetric scale.
 *
 * scale = (2^(W-1)-1) / max|w|; outputs are round(w * scale), rounding
 * halves away from zero, clamped to +-(2^(W-1)-1). An all-zero tensor has
 * no usable scale and quantizes to zeros with scale 1.
 */
inline QuantizedWeights quantize(const std::vector<double>& weights,
                                 std::vector<std::size_t> shape, const QuantizationSpec& spec) {
    if (shape_elems(shape) != weights.size())
        throw std::invalid_argument("quantize: weight count does not match shape");
    if (spec.weight_bits < 2 || spec.weight_bits > 32)
        throw std::invalid_argument("quantize: weight_bits must be in [2, 32]");

    double max_abs = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w))
            throw std::invalid_argument("quantize: weights must be finite");
        max_abs = std::max(max_abs, std::fabs(w));
    }

    QuantizedWeights out;
    out.values.shape = std::move(shape);
    out.values.data.resize(weights.size(), 0);
    if (max_abs == 0.0) {
        out.scale = 1.0;
        return out;
    }

    const std::int64_t qmax = (std::int64_t{1} << (spec.weight_bits - 1)) - 1;
    out.scale = static_cast<double>(qmax) / max_abs;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const std::int64_t q = std::llround(weights[i] * out.scale);  // half away from zero
        out.values.data[i] = std::clamp(q, -qmax, qmax);
    }
    return out;
}

}  // namespace rnsnet
