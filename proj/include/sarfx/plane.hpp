#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sarfx/errors.hpp"

namespace sarfx {

/// Dense row-major 2D buffer. Row index is azimuth (Y), column index is range (X).
template <typename T>
class Plane {
public:
    Plane() = default;

    Plane(std::size_t height, std::size_t width, T fill = T{})
        : height_(height), width_(width), data_(height * width, fill) {}

    Plane(std::size_t height, std::size_t width, std::vector<T> data)
        : height_(height), width_(width), data_(std::move(data)) {
        if (data_.size() != height_ * width_) {
            throw DimensionError("plane payload does not match its dimensions");
        }
    }

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t row, std::size_t col) {
        assert(row < height_ && col < width_);
        return data_[row * width_ + col];
    }
    const T& operator()(std::size_t row, std::size_t col) const {
        assert(row < height_ && col < width_);
        return data_[row * width_ + col];
    }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::span<T> span() noexcept { return data_; }
    std::span<const T> span() const noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }
    std::vector<T>& data() noexcept { return data_; }

    bool same_shape(const Plane& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_;
    }
    template <typename U>
    bool same_shape(const Plane<U>& other) const noexcept {
        return height_ == other.height() && width_ == other.width();
    }

    friend bool operator==(const Plane& a, const Plane& b) {
        return a.height_ == b.height_ && a.width_ == b.width_ && a.data_ == b.data_;
    }

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<T> data_;
};

using RealPlane = Plane<double>;

}  // namespace sarfx
