#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hvae::nn {

/// Flat parameter storage. Layers own offsets into it, so optimizers,
/// gradient checks and serialization all work on one contiguous array.
class ParameterSet {
public:
    struct Block {
        std::string name;
        std::size_t offset = 0;
        std::size_t rows = 0;
        std::size_t cols = 0;
        std::size_t size() const { return rows * cols; }
    };

    /// Appends a zero-filled rows x cols block and returns its offset.
    std::size_t add(std::string name, std::size_t rows, std::size_t cols) {
        const std::size_t offset = values_.size();
        blocks_.push_back({std::move(name), offset, rows, cols});
        values_.resize(offset + rows * cols, 0.0);
        return offset;
    }

    std::size_t size() const { return values_.size(); }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    const std::vector<Block>& blocks() const { return blocks_; }

    void assign(std::span<const double> v) { values_.assign(v.begin(), v.end()); }

private:
    std::vector<Block> blocks_;
    std::vector<double> values_;
};

}  // namespace hvae::nn
