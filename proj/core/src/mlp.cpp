#include "bordepth/mlp.hpp"

#include <cmath>
#include <random>

#include "bordepth/errors.hpp"

namespace bordepth {

std::size_t Mlp::count_parameters(const std::vector<std::size_t>& sizes) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        n += sizes[l + 1] * sizes[l] + sizes[l + 1];
    }
    return n;
}

Mlp::Mlp(std::vector<std::size_t> layer_sizes, std::uint64_t seed) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) {
        throw DomainError("an MLP needs at least an input and an output layer");
    }
    params_.assign(count_parameters(sizes_), 0.0);
    std::mt19937_64 rng(seed);
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const std::size_t in = sizes_[l];
        const std::size_t out = sizes_[l + 1];
        std::normal_distribution<double> init(0.0, std::sqrt(2.0 / static_cast<double>(in)));
        for (std::size_t i = 0; i < in * out; ++i) {
            params_[offset + i] = init(rng);
        }
        offset += in * out + out;
    }
}

Mlp::Mlp(std::vector<std::size_t> layer_sizes, std::vector<double> parameters)
    : sizes_(std::move(layer_sizes)), params_(std::move(parameters)) {
    if (sizes_.size() < 2 || params_.size() != count_parameters(sizes_)) {
        throw DomainError("MLP parameter count does not match its layer sizes");
    }
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
    if (input.size() != input_size()) {
        throw DomainError("MLP input has the wrong width");
    }
    std::vector<double> act(input.begin(), input.end());
    std::vector<double> next;
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const std::size_t in = sizes_[l];
        const std::size_t out = sizes_[l + 1];
        const double* w = params_.data() + offset;
        const double* b = w + in * out;
        next.assign(out, 0.0);
        const bool hidden = l + 2 < sizes_.size();
        for (std::size_t o = 0; o < out; ++o) {
            double z = b[o];
            for (std::size_t i = 0; i < in; ++i) {
                z += w[o * in + i] * act[i];
            }
            next[o] = hidden && z < 0.0 ? 0.0 : z;
        }
        act.swap(next);
        offset += in * out + out;
    }
    return act;
}

void Mlp::accumulate_gradient(std::span<const double> input, std::span<const double> d_output,
                              std::span<double> grad) const {
    if (input.size() != input_size() || d_output.size() != output_size() ||
        grad.size() != params_.size()) {
        throw DomainError("MLP gradient buffers have the wrong shape");
    }
    const std::size_t layers = sizes_.size() - 1;
    // activations[l] is the input to layer l; activations[layers] the output.
    std::vector<std::vector<double>> activations(layers + 1);
    std::vector<std::size_t> offsets(layers);
    activations[0].assign(input.begin(), input.end());
    std::size_t offset = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        offsets[l] = offset;
        const std::size_t in = sizes_[l];
        const std::size_t out = sizes_[l + 1];
        const double* w = params_.data() + offset;
        const double* b = w + in * out;
        auto& a = activations[l + 1];
        a.assign(out, 0.0);
        const bool hidden = l + 1 < layers;
        for (std::size_t o = 0; o < out; ++o) {
            double z = b[o];
            for (std::size_t i = 0; i < in; ++i) {
                z += w[o * in + i] * activations[l][i];
            }
            a[o] = hidden && z < 0.0 ? 0.0 : z;
        }
        offset += in * out + out;
    }

    std::vector<double> delta(d_output.begin(), d_output.end());
    std::vector<double> prev;
    for (std::size_t l = layers; l-- > 0;) {
        const std::size_t in = sizes_[l];
        const std::size_t out = sizes_[l + 1];
        const double* w = params_.data() + offsets[l];
        double* gw = grad.data() + offsets[l];
        double* gb = gw + in * out;
        const auto& a_in = activations[l];
        prev.assign(in, 0.0);
        for (std::size_t o = 0; o < out; ++o) {
            const double d = delta[o];
            if (d == 0.0) {
                continue;
            }
            gb[o] += d;
            for (std::size_t i = 0; i < in; ++i) {
                gw[o * in + i] += d * a_in[i];
                prev[i] += d * w[o * in + i];
            }
        }
        if (l > 0) {
            // ReLU derivative of the layer that produced a_in.
            for (std::size_t i = 0; i < in; ++i) {
                if (!(a_in[i] > 0.0)) {
                    prev[i] = 0.0;
                }
            }
        }
        delta.swap(prev);
    }
}

AdamOptimizer::AdamOptimizer(std::size_t parameter_count, double learning_rate, double beta1,
                             double beta2, double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon),
      m_(parameter_count, 0.0),
      v_(parameter_count, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != m_.size() || grad.size() != m_.size()) {
        throw DomainError("Adam state does not match the parameter vector");
    }
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
    }
}

}  // namespace bordepth
