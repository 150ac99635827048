#pragma once

#include <cstdint>
#include <vector>

#include "metatrust/common.hpp"

namespace metatrust {

struct LogisticOptions {
    int max_iterations = 2000;
    double gradient_tolerance = 1e-7;
    double l2 = 1e-6;
    // Binary fit only: weight indices (0-based, bias excluded) constrained to
    // be non-negative via projected gradient steps.
    std::vector<size_t> nonneg_features;
};

// Softmax regression. weights[k] = (bias, w_1 .. w_F) for class k.
struct MultinomialModel {
    std::vector<std::vector<double>> weights;
    double training_accuracy = 0;
    bool converged = true;
    int iterations = 0;

    size_t classes() const { return weights.size(); }
    // Argmax class; ties break to the lowest index.
    size_t predict(const std::vector<double>& features) const;
    std::vector<double> probabilities(const std::vector<double>& features) const;
};

// Deterministic batch gradient descent with backtracking line search (the
// seed is accepted for interface stability; zero initialization makes the
// fit seed-independent). Throws DegenerateLabels when fewer than two classes
// are present. Non-convergence returns the best iterate with converged=false.
MultinomialModel fit_multinomial(const std::vector<std::vector<double>>& features,
                                 const std::vector<int>& labels, int num_classes,
                                 std::uint64_t seed, const LogisticOptions& opts = {});

struct BinaryModel {
    std::vector<double> weights;  // (bias, w_1 .. w_F)
    double training_accuracy = 0;
    bool converged = true;
    int iterations = 0;

    double score(const std::vector<double>& features) const;  // sigmoid output
};

BinaryModel fit_binary(const std::vector<std::vector<double>>& features,
                       const std::vector<int>& labels, std::uint64_t seed,
                       const LogisticOptions& opts = {});

}  // namespace metatrust
