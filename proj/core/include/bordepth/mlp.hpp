#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bordepth {

/// Fully connected network with ReLU hidden layers and a linear output layer.
/// Parameters live in one flat vector: for each layer, weights (out x in, row-major) then biases.
class Mlp {
  public:
    Mlp() = default;
    /// He-normal weights, zero biases. `layer_sizes` includes input and output widths.
    Mlp(std::vector<std::size_t> layer_sizes, std::uint64_t seed);
    /// Adopts explicit parameters; throws DomainError on size mismatch.
    Mlp(std::vector<std::size_t> layer_sizes, std::vector<double> parameters);

    [[nodiscard]] std::vector<double> forward(std::span<const double> input) const;

    /// Backpropagates d(loss)/d(output) for one input and adds d(loss)/d(params) into `grad`.
    void accumulate_gradient(std::span<const double> input, std::span<const double> d_output,
                             std::span<double> grad) const;

    [[nodiscard]] const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
    [[nodiscard]] std::size_t input_size() const { return sizes_.empty() ? 0 : sizes_.front(); }
    [[nodiscard]] std::size_t output_size() const { return sizes_.empty() ? 0 : sizes_.back(); }
    [[nodiscard]] std::span<const double> parameters() const { return params_; }
    [[nodiscard]] std::span<double> parameters() { return params_; }
    [[nodiscard]] std::size_t parameter_count() const { return params_.size(); }

    friend bool operator==(const Mlp&, const Mlp&) = default;

  private:
    [[nodiscard]] static std::size_t count_parameters(const std::vector<std::size_t>& sizes);

    std::vector<std::size_t> sizes_;
    std::vector<double> params_;
};

class AdamOptimizer {
  public:
    AdamOptimizer() = default;
    explicit AdamOptimizer(std::size_t parameter_count, double learning_rate, double beta1 = 0.9,
                           double beta2 = 0.999, double epsilon = 1e-8);

    void step(std::span<double> params, std::span<const double> grad);

  private:
    double lr_ = 1e-3;
    double beta1_ = 0.9;
    double beta2_ = 0.999;
    double eps_ = 1e-8;
    std::uint64_t t_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
};

}  // namespace bordepth
