/**
 * @file network.hpp
 * @brief Layer and network descriptions with strict JSON load/store.
 *
 * The network file is a single JSON document:
 *   { "n": 7, "weight_bits": 6, "activation_bits": 6,
 *     "input_shape": [c, h, w], "layers": [ ... ] }
 * Layer objects carry flat row-major integer weight arrays ([out, in, kh, kw]
 * for conv, [out, in] for fully-connected). Weights may be omitted, which
 * stands for all zeros and keeps shape-only fixtures small. "same"/"valid"
 * padding strings resolve to explicit symmetric pads at load time. Floats
 * and unknown fields are rejected.
 *
 * @license Apache-2.0
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rnsnet/tensor.hpp"

namespace rnsnet {

struct Conv2D {
    std::size_t out_channels{}, in_channels{};
    std::size_t kernel_h{}, kernel_w{};
    std::size_t stride_h = 1, stride_w = 1;
    std::size_t pad_h = 0, pad_w = 0;
    IntTensor weights;                // [out, in, kh, kw]
    std::optional<IntTensor> bias;    // [out]
};

struct FullyConnected {
    std::size_t out_features{}, in_features{};
    IntTensor weights;                // [out, in]
    std::optional<IntTensor> bias;    // [out]
};

struct ReLU {};
struct ArgMax {};

using LayerSpec = std::variant<Conv2D, FullyConnected, ReLU, ArgMax>;

inline const char* layer_kind(const LayerSpec& layer) {
    if (std::holds_alternative<Conv2D>(layer)) return "conv2d";
    if (std::holds_alternative<FullyConnected>(layer)) return "fully_connected";
    if (std::holds_alternative<ReLU>(layer)) return "relu";
    return "argmax";
}

struct NetworkSpec {
    unsigned n = 7;
    unsigned weight_bits = 6;
    unsigned activation_bits = 6;
    std::vector<std::size_t> input_shape;
    std::vector<LayerSpec> layers;
};

namespace detail {

inline std::size_t conv_out_dim(std::size_t in, std::size_t pad, std::size_t kernel,
                                std::size_t stride, const std::string& where) {
    if (in + 2 * pad < kernel)
        throw std::invalid_argument(where + ": kernel larger than padded input");
    return (in + 2 * pad - kernel) / stride + 1;
}

}  // namespace detail

/// Output shape of one layer given its input shape. ArgMax yields shape [1]
/// (a class index), ReLU passes the shape through.
inline std::vector<std::size_t> layer_output_shape(const LayerSpec& layer,
                                                   const std::vector<std::size_t>& in_shape,
                                                   std::size_t layer_index) {
    const std::string where = "layer " + std::to_string(layer_index) + " (" + layer_kind(layer) + ")";
    if (const Conv2D* conv = std::get_if<Conv2D>(&layer)) {
        if (in_shape.size() != 3)
            throw std::invalid_argument(where + ": expects a [c, h, w] input, got rank " +
                                        std::to_string(in_shape.size()));
        if (in_shape[0] != conv->in_channels)
            throw std::invalid_argument(where + ": in_channels " + std::to_string(conv->in_channels) +
                                        " does not match input channels " + std::to_string(in_shape[0]));
        return {conv->out_channels,
                detail::conv_out_dim(in_shape[1], conv->pad_h, conv->kernel_h, conv->stride_h, where),
                detail::conv_out_dim(in_shape[2], conv->pad_w, conv->kernel_w, conv->stride_w, where)};
    }
    if (const FullyConnected* fc = std::get_if<FullyConnected>(&layer)) {
        if (shape_elems(in_shape) != fc->in_features)
            throw std::invalid_argument(where + ": in_features " + std::to_string(fc->in_features) +
                                        " does not match flattened input size " +
                                        std::to_string(shape_elems(in_shape)));
        return {fc->out_features};
    }
    if (std::holds_alternative<ArgMax>(layer)) return {1};
    return in_shape;  // ReLU
}

/// Validates shape chaining, weight dimensions, the weight-magnitude bound
/// and the ArgMax-is-last rule. Returns the network's output shape.
inline std::vector<std::size_t> validate_network(const NetworkSpec& net) {
    if (net.weight_bits < 2 || net.weight_bits > 32)
        throw std::invalid_argument("network: weight_bits must be in [2, 32]");
    if (net.activation_bits < 2 || net.activation_bits > 32)
        throw std::invalid_argument("network: activation_bits must be in [2, 32]");
    if (net.input_shape.empty())
        throw std::invalid_argument("network: input_shape must not be empty");

    const std::int64_t weight_max = (std::int64_t{1} << (net.weight_bits - 1)) - 1;
    auto check_weights = [&](const IntTensor& w, std::size_t expected, const std::string& where) {
        w.check();
        if (w.size() != expected)
            throw std::invalid_argument(where + ": expected " + std::to_string(expected) +
                                        " weights, got " + std::to_string(w.size()));
        for (std::int64_t v : w.data)
            if (v > weight_max || v < -weight_max)
                throw std::invalid_argument(where + ": weight " + std::to_string(v) +
                                            " exceeds the declared " + std::to_string(net.weight_bits) +
                                            "-bit bound " + std::to_string(weight_max));
    };

    std::vector<std::size_t> shape = net.input_shape;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const LayerSpec& layer = net.layers[i];
        const std::string where = "layer " + std::to_string(i) + " (" + layer_kind(layer) + ")";
        if (std::holds_alternative<ArgMax>(layer) && i + 1 != net.layers.size())
            throw std::invalid_argument(where + ": argmax is only allowed as the final layer");
        if (const Conv2D* conv = std::get_if<Conv2D>(&layer)) {
            if (conv->stride_h == 0 || conv->stride_w == 0)
                throw std::invalid_argument(where + ": stride must be positive");
            check_weights(conv->weights,
                          conv->out_channels * conv->in_channels * conv->kernel_h * conv->kernel_w,
                          where);
            if (conv->bias && conv->bias->size() != conv->out_channels)
                throw std::invalid_argument(where + ": bias length must equal out_channels");
        }
        if (const FullyConnected* fc = std::get_if<FullyConnected>(&layer)) {
            check_weights(fc->weights, fc->out_features * fc->in_features, where);
            if (fc->bias && fc->bias->size() != fc->out_features)
                throw std::invalid_argument(where + ": bias length must equal out_features");
        }
        shape = layer_output_shape(layer, shape, i);
    }
    return shape;
}

namespace detail {

inline std::size_t as_dim(const nlohmann::json& j, const std::string& where) {
    const std::int64_t v = as_int(j, where);
    if (v <= 0) throw std::invalid_argument(where + ": must be positive");
    return static_cast<std::size_t>(v);
}

inline IntTensor weights_from_json(const nlohmann::json& layer, const char* key,
                                   std::vector<std::size_t> shape, const std::string& where) {
    if (!layer.contains(key)) return IntTensor::zeros(std::move(shape));  // shape-only fixture
    IntTensor t;
    t.data = as_int_array(layer.at(key), where + "." + key);
    t.shape = std::move(shape);
    return t;  // length checked by validate_network
}

inline void parse_padding(const nlohmann::json& j, Conv2D& conv, const std::string& where) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "valid") {
            conv.pad_h = conv.pad_w = 0;
        } else if (s == "same") {
            if (conv.stride_h != 1 || conv.stride_w != 1)
                throw std::invalid_argument(where + ": \"same\" padding requires stride 1");
            if (conv.kernel_h % 2 == 0 || conv.kernel_w % 2 == 0)
                throw std::invalid_argument(where + ": \"same\" padding requires odd kernels");
            conv.pad_h = (conv.kernel_h - 1) / 2;
            conv.pad_w = (conv.kernel_w - 1) / 2;
        } else {
            throw std::invalid_argument(where + ": padding must be \"same\", \"valid\" or [ph, pw]");
        }
        return;
    }
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument(where + ": padding must be \"same\", \"valid\" or [ph, pw]");
    const std::int64_t ph = as_int(j[0], where + ".padding");
    const std::int64_t pw = as_int(j[1], where + ".padding");
    if (ph < 0 || pw < 0) throw std::invalid_argument(where + ": padding must be non-negative");
    conv.pad_h = static_cast<std::size_t>(ph);
    conv.pad_w = static_cast<std::size_t>(pw);
}

inline LayerSpec layer_from_json(const nlohmann::json& j, std::size_t index) {
    const std::string where = "layer " + std::to_string(index);
    if (!j.is_object() || !j.contains("type"))
        throw std::invalid_argument(where + ": expected an object with a \"type\" field");
    const std::string type = j.at("type").get<std::string>();

    if (type == "relu") {
        reject_unknown_keys(j, {"type"}, where);
        return ReLU{};
    }
    if (type == "argmax") {
        reject_unknown_keys(j, {"type"}, where);
        return ArgMax{};
    }
    if (type == "conv2d") {
        reject_unknown_keys(j,
                            {"type", "out_channels", "in_channels", "kernel_h", "kernel_w",
                             "stride_h", "stride_w", "padding", "weights", "bias"},
                            where);
        Conv2D conv;
        conv.out_channels = as_dim(j.at("out_channels"), where + ".out_channels");
        conv.in_channels = as_dim(j.at("in_channels"), where + ".in_channels");
        conv.kernel_h = as_dim(j.at("kernel_h"), where + ".kernel_h");
        conv.kernel_w = as_dim(j.at("kernel_w"), where + ".kernel_w");
        if (j.contains("stride_h")) conv.stride_h = as_dim(j.at("stride_h"), where + ".stride_h");
        if (j.contains("stride_w")) conv.stride_w = as_dim(j.at("stride_w"), where + ".stride_w");
        if (j.contains("padding")) parse_padding(j.at("padding"), conv, where);
        conv.weights = weights_from_json(
            j, "weights", {conv.out_channels, conv.in_channels, conv.kernel_h, conv.kernel_w}, where);
        if (j.contains("bias")) {
            IntTensor b;
            b.data = as_int_array(j.at("bias"), where + ".bias");
            b.shape = {b.data.size()};
            conv.bias = std::move(b);
        }
        return conv;
    }
    if (type == "fully_connected") {
        reject_unknown_keys(j, {"type", "out_features", "in_features", "weights", "bias"}, where);
        FullyConnected fc;
        fc.out_features = as_dim(j.at("out_features"), where + ".out_features");
        fc.in_features = as_dim(j.at("in_features"), where + ".in_features");
        fc.weights = weights_from_json(j, "weights", {fc.out_features, fc.in_features}, where);
        if (j.contains("bias")) {
            IntTensor b;
            b.data = as_int_array(j.at("bias"), where + ".bias");
            b.shape = {b.data.size()};
            fc.bias = std::move(b);
        }
        return fc;
    }
    throw std::invalid_argument(where + ": unknown layer type \"" + type + "\"");
}

}  // namespace detail

/// Parses and validates a network document.
inline NetworkSpec network_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw std::invalid_argument("network: expected a JSON object");
    detail::reject_unknown_keys(
        j, {"n", "weight_bits", "activation_bits", "input_shape", "layers"}, "network");
    for (const char* key : {"n", "weight_bits", "activation_bits", "input_shape", "layers"})
        if (!j.contains(key))
            throw std::invalid_argument(std::string("network: missing field \"") + key + "\"");

    NetworkSpec net;
    net.n = static_cast<unsigned>(detail::as_dim(j.at("n"), "network.n"));
    net.weight_bits = static_cast<unsigned>(detail::as_dim(j.at("weight_bits"), "network.weight_bits"));
    net.activation_bits =
        static_cast<unsigned>(detail::as_dim(j.at("activation_bits"), "network.activation_bits"));
    net.input_shape = detail::as_shape(j.at("input_shape"), "network.input_shape");
    if (!j.at("layers").is_array())
        throw std::invalid_argument("network.layers: expected an array");
    std::size_t index = 0;
    for (const auto& layer : j.at("layers"))
        net.layers.push_back(detail::layer_from_json(layer, index++));
    validate_network(net);
    return net;
}

inline NetworkSpec load_network(const std::string& path) {
    return network_from_json(detail::parse_file(path));
}

}  // namespace rnsnet
