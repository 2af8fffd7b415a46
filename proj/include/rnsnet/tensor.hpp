/**
 * @file tensor.hpp
 * @brief Shaped integer tensors in plain and RNS form, with strict JSON I/O.
 * @license Apache-2.0
 */

#pragma once

#include <cstdint>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rnsnet/rns_core.hpp"

namespace rnsnet {

inline std::size_t shape_elems(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           [](std::size_t a, std::size_t b) { return a * b; });
}

/// Row-major signed integer tensor.
struct IntTensor {
    std::vector<std::size_t> shape;
    std::vector<std::int64_t> data;

    static IntTensor zeros(std::vector<std::size_t> shape) {
        IntTensor t;
        t.data.assign(shape_elems(shape), 0);
        t.shape = std::move(shape);
        return t;
    }

    std::size_t size() const { return data.size(); }

    void check() const {
        if (shape_elems(shape) != data.size())
            throw std::invalid_argument("IntTensor: data length " + std::to_string(data.size()) +
                                        " does not match shape product " +
                                        std::to_string(shape_elems(shape)));
    }

    friend bool operator==(const IntTensor&, const IntTensor&) = default;
};

/// Row-major tensor of RNS residue tuples, all canonical under one ModuliSet.
struct RnsTensor {
    std::vector<std::size_t> shape;
    std::vector<RnsInt> data;

    std::size_t size() const { return data.size(); }
};

/// Encodes every element with the wrap-around signed mapping.
inline RnsTensor encode_tensor(const IntTensor& t, const ModuliSet& ms) {
    RnsTensor out;
    out.shape = t.shape;
    out.data.reserve(t.data.size());
    for (std::int64_t v : t.data) out.data.push_back(encode_signed(v, ms));
    return out;
}

/// Decodes every element back to its signed value.
inline IntTensor decode_tensor(const RnsTensor& t, const ModuliSet& ms) {
    IntTensor out;
    out.shape = t.shape;
    out.data.reserve(t.data.size());
    for (const RnsInt& r : t.data) out.data.push_back(decode_signed(r, ms));
    return out;
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known,
                                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) ok = true;
        if (!ok)
            throw std::invalid_argument(where + ": unknown field \"" + it.key() + "\"");
    }
}

inline std::int64_t as_int(const nlohmann::json& j, const std::string& where) {
    if (!j.is_number_integer())
        throw std::invalid_argument(where + ": expected an integer, got " + j.dump());
    return j.get<std::int64_t>();
}

inline std::vector<std::int64_t> as_int_array(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array())
        throw std::invalid_argument(where + ": expected an array");
    std::vector<std::int64_t> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(as_int(e, where));
    return out;
}

inline std::vector<std::size_t> as_shape(const nlohmann::json& j, const std::string& where) {
    std::vector<std::size_t> shape;
    for (std::int64_t d : as_int_array(j, where)) {
        if (d <= 0) throw std::invalid_argument(where + ": dimensions must be positive");
        shape.push_back(static_cast<std::size_t>(d));
    }
    return shape;
}

inline nlohmann::json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return j;
}

}  // namespace detail

/// Parses the tensor file format: {"shape": [...], "data": [...]}, integers only.
inline IntTensor tensor_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw std::invalid_argument("tensor: expected a JSON object");
    detail::reject_unknown_keys(j, {"shape", "data"}, "tensor");
    if (!j.contains("shape") || !j.contains("data"))
        throw std::invalid_argument("tensor: both \"shape\" and \"data\" are required");
    IntTensor t;
    t.shape = detail::as_shape(j.at("shape"), "tensor.shape");
    t.data = detail::as_int_array(j.at("data"), "tensor.data");
    t.check();
    return t;
}

inline nlohmann::json tensor_to_json(const IntTensor& t) {
    return nlohmann::json{{"shape", t.shape}, {"data", t.data}};
}

inline IntTensor load_tensor(const std::string& path) {
    return tensor_from_json(detail::parse_file(path));
}

}  // namespace rnsnet
