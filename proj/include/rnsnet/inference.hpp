/**
 * @file inference.hpp
 * @brief Layer evaluation in a plain-integer path and an RNS path.
 *
 * Both paths share one traversal; they differ only in the element ring.
 * The integer path computes exact 64-bit MACs and is the reference; the
 * RNS path encodes weights and activations with the wrap-around signed
 * mapping and evaluates every MAC, ReLU and the final argmax on residue
 * tuples. Whenever the overflow bound holds, the two are bit-identical.
 *
 * No re-quantization happens between layers: activations grow, and
 * check_overflow_bound is the contract that growth stays inside the
 * signed range so wraparound is unobservable.
 *
 * @license Apache-2.0
 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rnsnet/network.hpp"
#include "rnsnet/rns_core.hpp"
#include "rnsnet/tensor.hpp"

namespace rnsnet {

/// A network evaluates to a tensor, or to a class index when it ends in ArgMax.
using InferenceResult = std::variant<IntTensor, std::size_t>;

/// Worst-case accumulator magnitude per layer, saturated at uint64 max.
struct LayerBound {
    std::size_t index{};
    std::string kind;
    std::uint64_t max_abs{};
    bool ok{};
};

struct OverflowReport {
    bool pass = true;
    std::vector<LayerBound> layers;

    /// Index of the first violating layer; only meaningful when !pass.
    std::size_t first_violation() const {
        for (const LayerBound& b : layers)
            if (!b.ok) return b.index;
        return layers.size();
    }
};

namespace detail {

inline std::uint64_t sat_u64(unsigned __int128 v) {
    const unsigned __int128 cap = ~std::uint64_t{0};
    return v > cap ? ~std::uint64_t{0} : static_cast<std::uint64_t>(v);
}

}  // namespace detail

/**
 * @brief Propagates worst-case activation magnitudes through the network.
 *
 * Input activations start at 2^(A-1)-1. Each conv/fc layer contributes
 * max over outputs of sum|w| * act + |bias|, which then becomes the next
 * activation magnitude (no inter-layer rescaling exists to shrink it).
 * The network passes iff every layer bound is at most (M-1)/2.
 */
inline OverflowReport check_overflow_bound(const NetworkSpec& net, const ModuliSet& ms) {
    OverflowReport report;
    unsigned __int128 act = (std::uint64_t{1} << (net.activation_bits - 1)) - 1;

    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const LayerSpec& layer = net.layers[i];
        unsigned __int128 bound = act;
        if (const Conv2D* conv = std::get_if<Conv2D>(&layer)) {
            unsigned __int128 worst = 0;
            const std::size_t per_out = conv->in_channels * conv->kernel_h * conv->kernel_w;
            for (std::size_t oc = 0; oc < conv->out_channels; ++oc) {
                unsigned __int128 wsum = 0;
                for (std::size_t k = 0; k < per_out; ++k) {
                    const std::int64_t w = conv->weights.data[oc * per_out + k];
                    wsum += static_cast<std::uint64_t>(w < 0 ? -w : w);
                }
                unsigned __int128 b = wsum * act;
                if (conv->bias) {
                    const std::int64_t bv = conv->bias->data[oc];
                    b += static_cast<std::uint64_t>(bv < 0 ? -bv : bv);
                }
                worst = std::max(worst, b);
            }
            bound = worst;
            act = worst;
        } else if (const FullyConnected* fc = std::get_if<FullyConnected>(&layer)) {
            unsigned __int128 worst = 0;
            for (std::size_t o = 0; o < fc->out_features; ++o) {
                unsigned __int128 wsum = 0;
                for (std::size_t k = 0; k < fc->in_features; ++k) {
                    const std::int64_t w = fc->weights.data[o * fc->in_features + k];
                    wsum += static_cast<std::uint64_t>(w < 0 ? -w : w);
                }
                unsigned __int128 b = wsum * act;
                if (fc->bias) {
                    const std::int64_t bv = fc->bias->data[o];
                    b += static_cast<std::uint64_t>(bv < 0 ? -bv : bv);
                }
                worst = std::max(worst, b);
            }
            bound = worst;
            act = worst;
        }
        report.layers.push_back(LayerBound{i, layer_kind(layer), detail::sat_u64(bound),
                                           bound <= ms.pos_max});
        if (!report.layers.back().ok) report.pass = false;
    }
    return report;
}

/// MACs contributed by one layer: X*Y for fully-connected,
/// out_h*out_w*C_out*C_in*K_x*K_y for conv. ReLU and ArgMax count zero.
inline std::uint64_t count_macs(const LayerSpec& layer, const std::vector<std::size_t>& in_shape,
                                std::size_t layer_index) {
    if (const Conv2D* conv = std::get_if<Conv2D>(&layer)) {
        const std::vector<std::size_t> out = layer_output_shape(layer, in_shape, layer_index);
        return std::uint64_t{out[1]} * out[2] * conv->out_channels * conv->in_channels *
               conv->kernel_h * conv->kernel_w;
    }
    if (const FullyConnected* fc = std::get_if<FullyConnected>(&layer))
        return std::uint64_t{fc->out_features} * fc->in_features;
    return 0;
}

inline std::vector<std::uint64_t> per_layer_macs(const NetworkSpec& net) {
    std::vector<std::uint64_t> out;
    std::vector<std::size_t> shape = net.input_shape;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        out.push_back(count_macs(net.layers[i], shape, i));
        shape = layer_output_shape(net.layers[i], shape, i);
    }
    return out;
}

inline std::uint64_t count_macs(const NetworkSpec& net) {
    std::uint64_t total = 0;
    for (std::uint64_t m : per_layer_macs(net)) total += m;
    return total;
}

namespace detail {

/// Element ring of the reference path: exact 64-bit signed arithmetic.
struct IntOps {
    using Value = std::int64_t;
    Value from_signed(std::int64_t v) const { return v; }
    Value zero() const { return 0; }
    Value add(Value a, Value b) const { return a + b; }
    Value mul(Value a, Value b) const { return a * b; }
    Value relu(Value v) const { return std::max<Value>(v, 0); }
    std::size_t argmax(std::span<const Value> xs) const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (xs[i] > xs[best]) best = i;  // ties keep the lowest index
        return best;
    }
};

/// Element ring of the RNS path: residue tuples under one ModuliSet.
struct RnsOps {
    const ModuliSet& ms;
    using Value = RnsInt;
    Value from_signed(std::int64_t v) const { return encode_signed(v, ms); }
    Value zero() const { return RnsInt{}; }
    Value add(const Value& a, const Value& b) const { return rns_add(a, b, ms); }
    Value mul(const Value& a, const Value& b) const { return rns_mul(a, b, ms); }
    Value relu(const Value& v) const { return rns_relu(v, ms); }
    std::size_t argmax(std::span<const Value> xs) const { return rns_argmax(xs, ms); }
};

template <typename Ops>
std::vector<typename Ops::Value> lift_tensor(const Ops& ops, const IntTensor& t) {
    std::vector<typename Ops::Value> out;
    out.reserve(t.data.size());
    for (std::int64_t v : t.data) out.push_back(ops.from_signed(v));
    return out;
}

template <typename Ops>
std::vector<typename Ops::Value> eval_conv(const Ops& ops, const Conv2D& conv,
                                           const std::vector<typename Ops::Value>& in,
                                           const std::vector<std::size_t>& in_shape,
                                           const std::vector<std::size_t>& out_shape) {
    using Value = typename Ops::Value;
    const std::size_t in_h = in_shape[1], in_w = in_shape[2];
    const std::size_t out_h = out_shape[1], out_w = out_shape[2];
    const std::vector<Value> weights = lift_tensor(ops, conv.weights);
    std::vector<Value> bias;
    if (conv.bias) bias = lift_tensor(ops, *conv.bias);

    std::vector<Value> out(conv.out_channels * out_h * out_w, ops.zero());
    for (std::size_t oc = 0; oc < conv.out_channels; ++oc)
        for (std::size_t oy = 0; oy < out_h; ++oy)
            for (std::size_t ox = 0; ox < out_w; ++ox) {
                Value acc = conv.bias ? bias[oc] : ops.zero();
                for (std::size_t ic = 0; ic < conv.in_channels; ++ic)
                    for (std::size_t ky = 0; ky < conv.kernel_h; ++ky)
                        for (std::size_t kx = 0; kx < conv.kernel_w; ++kx) {
                            // zero padding: out-of-range taps contribute nothing
                            const std::int64_t iy = static_cast<std::int64_t>(oy * conv.stride_h + ky) -
                                                    static_cast<std::int64_t>(conv.pad_h);
                            const std::int64_t ix = static_cast<std::int64_t>(ox * conv.stride_w + kx) -
                                                    static_cast<std::int64_t>(conv.pad_w);
                            if (iy < 0 || ix < 0 || iy >= static_cast<std::int64_t>(in_h) ||
                                ix >= static_cast<std::int64_t>(in_w))
                                continue;
                            const Value& w =
                                weights[((oc * conv.in_channels + ic) * conv.kernel_h + ky) *
                                            conv.kernel_w + kx];
                            const Value& x = in[(ic * in_h + static_cast<std::size_t>(iy)) * in_w +
                                               static_cast<std::size_t>(ix)];
                            acc = ops.add(acc, ops.mul(w, x));
                        }
                out[(oc * out_h + oy) * out_w + ox] = acc;
            }
    return out;
}

template <typename Ops>
std::vector<typename Ops::Value> eval_fc(const Ops& ops, const FullyConnected& fc,
                                         const std::vector<typename Ops::Value>& in) {
    using Value = typename Ops::Value;
    const std::vector<Value> weights = lift_tensor(ops, fc.weights);
    std::vector<Value> bias;
    if (fc.bias) bias = lift_tensor(ops, *fc.bias);

    std::vector<Value> out(fc.out_features, ops.zero());
    for (std::size_t o = 0; o < fc.out_features; ++o) {
        Value acc = fc.bias ? bias[o] : ops.zero();
        for (std::size_t k = 0; k < fc.in_features; ++k)
            acc = ops.add(acc, ops.mul(weights[o * fc.in_features + k], in[k]));
        out[o] = acc;
    }
    return out;
}

template <typename Ops>
std::variant<std::vector<typename Ops::Value>, std::size_t> evaluate(const Ops& ops,
                                                                     const NetworkSpec& net,
                                                                     const IntTensor& input) {
    using Value = typename Ops::Value;
    input.check();
    if (input.shape != net.input_shape)
        throw std::invalid_argument("infer: input shape does not match the network's input_shape");
    const std::int64_t act_max = (std::int64_t{1} << (net.activation_bits - 1)) - 1;
    for (std::int64_t v : input.data)
        if (v > act_max || v < -act_max)
            throw std::out_of_range("infer: input element " + std::to_string(v) +
                                    " outside the declared " + std::to_string(net.activation_bits) +
                                    "-bit activation range");

    std::vector<Value> values = lift_tensor(ops, input);
    std::vector<std::size_t> shape = net.input_shape;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const LayerSpec& layer = net.layers[i];
        const std::vector<std::size_t> out_shape = layer_output_shape(layer, shape, i);
        if (const Conv2D* conv = std::get_if<Conv2D>(&layer)) {
            values = eval_conv(ops, *conv, values, shape, out_shape);
        } else if (const FullyConnected* fc = std::get_if<FullyConnected>(&layer)) {
            values = eval_fc(ops, *fc, values);
        } else if (std::holds_alternative<ReLU>(layer)) {
            for (Value& v : values) v = ops.relu(v);
        } else {
            return ops.argmax(std::span<const Value>(values));  // final layer by validation
        }
        shape = out_shape;
    }
    return values;
}

}  // namespace detail

/// Reference evaluation: exact signed 64-bit MACs, no wraparound.
inline InferenceResult infer_int(const NetworkSpec& net, const IntTensor& input) {
    validate_network(net);
    detail::IntOps ops;
    auto result = detail::evaluate(ops, net, input);
    if (std::holds_alternative<std::size_t>(result)) return std::get<std::size_t>(result);

    IntTensor out;
    out.data = std::move(std::get<std::vector<std::int64_t>>(result));
    std::vector<std::size_t> shape = net.input_shape;
    for (std::size_t i = 0; i < net.layers.size(); ++i)
        shape = layer_output_shape(net.layers[i], shape, i);
    out.shape = shape;
    return out;
}

/**
 * @brief RNS evaluation; bit-exactly equal to infer_int whenever the
 *        overflow bound holds.
 *
 * Refuses to run on a network that fails check_overflow_bound, since
 * wraparound past (M-1)/2 would silently corrupt the signed reading.
 */
inline InferenceResult infer_rns(const NetworkSpec& net, const IntTensor& input,
                                 const ModuliSet& ms) {
    validate_network(net);
    const OverflowReport report = check_overflow_bound(net, ms);
    if (!report.pass) {
        const LayerBound& bad = report.layers[report.first_violation()];
        throw std::runtime_error("infer_rns: overflow bound violated at layer " +
                                 std::to_string(bad.index) + " (" + bad.kind + "): worst-case |acc| " +
                                 std::to_string(bad.max_abs) + " exceeds (M-1)/2 = " +
                                 std::to_string(ms.pos_max));
    }

    detail::RnsOps ops{ms};
    auto result = detail::evaluate(ops, net, input);
    if (std::holds_alternative<std::size_t>(result)) return std::get<std::size_t>(result);

    RnsTensor rns;
    rns.data = std::move(std::get<std::vector<RnsInt>>(result));
    std::vector<std::size_t> shape = net.input_shape;
    for (std::size_t i = 0; i < net.layers.size(); ++i)
        shape = layer_output_shape(net.layers[i], shape, i);
    rns.shape = shape;
    return decode_tensor(rns, ms);
}

}  // namespace rnsnet
