#pragma once

#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

namespace odtqc {

// Dense row-major real tensor.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> values;

    Tensor() = default;
    explicit Tensor(std::vector<int> s, double fill = 0.0) : shape(std::move(s)) {
        values.assign(count(shape), fill);
    }
    Tensor(std::vector<int> s, std::vector<double> v) : shape(std::move(s)), values(std::move(v)) {}

    static std::size_t count(const std::vector<int>& s) {
        return std::accumulate(s.begin(), s.end(), std::size_t{1},
                               [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
    }
    std::size_t size() const { return values.size(); }
    int dim(std::size_t i) const { return shape.at(i); }
};

}  // namespace odtqc
