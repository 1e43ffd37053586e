#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

#include "fresco/rng.hpp"

namespace fresco {

// Feed-forward net with tanh hidden layers and a linear output layer,
// parameterized by one flat vector. Per layer the layout is weights in
// row-major [out][in] order followed by the biases.
struct MlpSpec {
    std::vector<int> dims;  // e.g. {7, 64, 64, 2}

    int layer_count() const { return static_cast<int>(dims.size()) - 1; }

    int param_count() const {
        int n = 0;
        for (int l = 0; l < layer_count(); ++l) n += dims[l] * dims[l + 1] + dims[l + 1];
        return n;
    }
};

// Caches layer activations for the backward pass. acts[0] is the input,
// acts[l+1] the output of layer l (post-tanh on hidden layers).
struct MlpWorkspace {
    std::vector<std::vector<double>> acts;
};

inline void mlp_forward(const MlpSpec& spec, std::span<const double> params,
                        std::span<const double> input, MlpWorkspace& ws) {
    const int layers = spec.layer_count();
    ws.acts.resize(layers + 1);
    ws.acts[0].assign(input.begin(), input.end());
    size_t off = 0;
    for (int l = 0; l < layers; ++l) {
        const int in = spec.dims[l], out = spec.dims[l + 1];
        const double* w = params.data() + off;
        const double* b = w + static_cast<size_t>(in) * out;
        const std::vector<double>& x = ws.acts[l];
        std::vector<double>& y = ws.acts[l + 1];
        y.assign(out, 0.0);
        for (int o = 0; o < out; ++o) {
            double acc = b[o];
            const double* row = w + static_cast<size_t>(o) * in;
            for (int i = 0; i < in; ++i) acc += row[i] * x[i];
            y[o] = (l + 1 < layers) ? std::tanh(acc) : acc;
        }
        off += static_cast<size_t>(in) * out + out;
    }
}

// Accumulates dLoss/dParams into grad given dLoss/dOutput, reusing the
// activations cached by mlp_forward with the same params.
inline void mlp_backward(const MlpSpec& spec, std::span<const double> params,
                         const MlpWorkspace& ws, std::span<const double> d_output,
                         std::span<double> grad) {
    const int layers = spec.layer_count();
    std::vector<double> delta(d_output.begin(), d_output.end());
    std::vector<double> delta_prev;

    // Offsets of each layer's parameter block.
    std::vector<size_t> offsets(layers);
    size_t off = 0;
    for (int l = 0; l < layers; ++l) {
        offsets[l] = off;
        off += static_cast<size_t>(spec.dims[l]) * spec.dims[l + 1] + spec.dims[l + 1];
    }

    for (int l = layers - 1; l >= 0; --l) {
        const int in = spec.dims[l], out = spec.dims[l + 1];
        const double* w = params.data() + offsets[l];
        double* gw = grad.data() + offsets[l];
        double* gb = gw + static_cast<size_t>(in) * out;
        const std::vector<double>& x = ws.acts[l];

        // Hidden layers stored post-tanh activations; fold in the
        // derivative 1 - y^2 (output layer is linear).
        if (l + 1 < layers) {
            const std::vector<double>& y = ws.acts[l + 1];
            for (int o = 0; o < out; ++o) delta[o] *= 1.0 - y[o] * y[o];
        }

        for (int o = 0; o < out; ++o) {
            double d = delta[o];
            double* grow = gw + static_cast<size_t>(o) * in;
            for (int i = 0; i < in; ++i) grow[i] += d * x[i];
            gb[o] += d;
        }

        if (l > 0) {
            delta_prev.assign(in, 0.0);
            for (int o = 0; o < out; ++o) {
                double d = delta[o];
                const double* row = w + static_cast<size_t>(o) * in;
                for (int i = 0; i < in; ++i) delta_prev[i] += d * row[i];
            }
            delta.swap(delta_prev);
        }
    }
}

// Glorot-uniform weights, zero biases. Draw order is fixed (layer by
// layer, row-major) so a seed fully determines the vector.
inline std::vector<double> mlp_init(const MlpSpec& spec, Rng& rng) {
    std::vector<double> params(spec.param_count(), 0.0);
    size_t off = 0;
    for (int l = 0; l < spec.layer_count(); ++l) {
        const int in = spec.dims[l], out = spec.dims[l + 1];
        double limit = std::sqrt(6.0 / (in + out));
        for (int i = 0; i < in * out; ++i) params[off + i] = rng.uniform(-limit, limit);
        off += static_cast<size_t>(in) * out + out;  // biases stay 0
    }
    return params;
}

}  // namespace fresco
