#include "metatrust/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace metatrust {

namespace {

double dot_with_bias(const std::vector<double>& w, const std::vector<double>& x) {
    double acc = w[0];
    for (size_t i = 0; i < x.size(); ++i) acc += w[i + 1] * x[i];
    return acc;
}

void check_features(const std::vector<std::vector<double>>& x) {
    if (x.empty()) throw DegenerateLabels("training set is empty");
    for (const auto& row : x)
        if (row.size() != x.front().size())
            throw DimensionMismatch("feature rows differ in length");
}

}  // namespace

std::vector<double> MultinomialModel::probabilities(const std::vector<double>& x) const {
    std::vector<double> logits(weights.size());
    double max_logit = -1e300;
    for (size_t k = 0; k < weights.size(); ++k) {
        logits[k] = dot_with_bias(weights[k], x);
        max_logit = std::max(max_logit, logits[k]);
    }
    double z = 0;
    for (auto& l : logits) {
        l = std::exp(l - max_logit);
        z += l;
    }
    for (auto& l : logits) l /= z;
    return logits;
}

size_t MultinomialModel::predict(const std::vector<double>& x) const {
    auto p = probabilities(x);
    size_t best = 0;
    for (size_t k = 1; k < p.size(); ++k)
        if (p[k] > p[best]) best = k;
    return best;
}

MultinomialModel fit_multinomial(const std::vector<std::vector<double>>& x,
                                 const std::vector<int>& y, int num_classes,
                                 std::uint64_t /*seed*/, const LogisticOptions& opts) {
    check_features(x);
    if (x.size() != y.size()) throw DimensionMismatch("feature/label count mismatch");
    std::set<int> present(y.begin(), y.end());
    if (present.size() < 2)
        throw DegenerateLabels("multinomial fit needs at least two distinct labels");
    for (int label : present)
        if (label < 0 || label >= num_classes)
            throw MalformedInput("label outside [0, num_classes)");

    const size_t n = x.size();
    const size_t f = x.front().size();
    const size_t k = static_cast<size_t>(num_classes);

    std::vector<std::vector<double>> w(k, std::vector<double>(f + 1, 0.0));

    auto nll = [&](const std::vector<std::vector<double>>& weights) {
        double loss = 0;
        MultinomialModel tmp;
        tmp.weights = weights;
        for (size_t i = 0; i < n; ++i) {
            auto p = tmp.probabilities(x[i]);
            loss -= std::log(std::max(p[static_cast<size_t>(y[i])], 1e-300));
        }
        loss /= static_cast<double>(n);
        double reg = 0;
        for (const auto& row : weights)
            for (double v : row) reg += v * v;
        return loss + 0.5 * opts.l2 * reg;
    };

    MultinomialModel model;
    model.weights = w;
    double step = 1.0;
    double current = nll(w);
    int iter = 0;
    bool converged = false;

    for (; iter < opts.max_iterations; ++iter) {
        // Gradient of the mean NLL plus L2.
        std::vector<std::vector<double>> grad(k, std::vector<double>(f + 1, 0.0));
        MultinomialModel cur;
        cur.weights = w;
        for (size_t i = 0; i < n; ++i) {
            auto p = cur.probabilities(x[i]);
            for (size_t c = 0; c < k; ++c) {
                double diff = p[c] - (static_cast<size_t>(y[i]) == c ? 1.0 : 0.0);
                grad[c][0] += diff;
                for (size_t j = 0; j < f; ++j) grad[c][j + 1] += diff * x[i][j];
            }
        }
        double gmax = 0;
        for (size_t c = 0; c < k; ++c)
            for (size_t j = 0; j <= f; ++j) {
                grad[c][j] = grad[c][j] / static_cast<double>(n) + opts.l2 * w[c][j];
                gmax = std::max(gmax, std::abs(grad[c][j]));
            }
        if (gmax < opts.gradient_tolerance) {
            converged = true;
            break;
        }

        // Backtracking line search on the step size.
        bool accepted = false;
        for (int halvings = 0; halvings < 50; ++halvings) {
            std::vector<std::vector<double>> trial = w;
            for (size_t c = 0; c < k; ++c)
                for (size_t j = 0; j <= f; ++j) trial[c][j] -= step * grad[c][j];
            double trial_nll = nll(trial);
            if (trial_nll < current) {
                w = std::move(trial);
                current = trial_nll;
                step = std::min(step * 1.2, 1e4);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no descent direction at double precision
    }

    model.weights = w;
    model.converged = converged;
    model.iterations = iter;
    size_t correct = 0;
    for (size_t i = 0; i < n; ++i)
        if (model.predict(x[i]) == static_cast<size_t>(y[i])) ++correct;
    model.training_accuracy = static_cast<double>(correct) / static_cast<double>(n);
    return model;
}

double BinaryModel::score(const std::vector<double>& x) const {
    double z = dot_with_bias(weights, x);
    return 1.0 / (1.0 + std::exp(-z));
}

BinaryModel fit_binary(const std::vector<std::vector<double>>& x,
                       const std::vector<int>& y, std::uint64_t /*seed*/,
                       const LogisticOptions& opts) {
    check_features(x);
    if (x.size() != y.size()) throw DimensionMismatch("feature/label count mismatch");
    bool has0 = false, has1 = false;
    for (int label : y) {
        if (label == 0) has0 = true;
        else if (label == 1) has1 = true;
        else throw MalformedInput("binary labels must be 0 or 1");
    }
    if (!has0 || !has1)
        throw DegenerateLabels("binary fit needs both classes present");

    const size_t n = x.size();
    const size_t f = x.front().size();
    std::vector<double> w(f + 1, 0.0);

    auto project = [&opts](std::vector<double>& weights) {
        for (size_t idx : opts.nonneg_features)
            if (idx + 1 < weights.size()) weights[idx + 1] = std::max(weights[idx + 1], 0.0);
    };

    auto nll = [&](const std::vector<double>& weights) {
        double loss = 0;
        for (size_t i = 0; i < n; ++i) {
            double z = dot_with_bias(weights, x[i]);
            // log(1 + e^-|z|) form keeps the loss finite for large |z|
            double logp = z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
            double log1mp = logp - z;
            loss -= y[i] == 1 ? logp : log1mp;
        }
        loss /= static_cast<double>(n);
        double reg = 0;
        for (double v : weights) reg += v * v;
        return loss + 0.5 * opts.l2 * reg;
    };

    double step = 1.0;
    double current = nll(w);
    int iter = 0;
    bool converged = false;
    for (; iter < opts.max_iterations; ++iter) {
        std::vector<double> grad(f + 1, 0.0);
        for (size_t i = 0; i < n; ++i) {
            double z = dot_with_bias(w, x[i]);
            double p = 1.0 / (1.0 + std::exp(-z));
            double diff = p - static_cast<double>(y[i]);
            grad[0] += diff;
            for (size_t j = 0; j < f; ++j) grad[j + 1] += diff * x[i][j];
        }
        double gmax = 0;
        for (size_t j = 0; j <= f; ++j) {
            grad[j] = grad[j] / static_cast<double>(n) + opts.l2 * w[j];
            gmax = std::max(gmax, std::abs(grad[j]));
        }
        if (gmax < opts.gradient_tolerance) {
            converged = true;
            break;
        }
        bool accepted = false;
        for (int halvings = 0; halvings < 50; ++halvings) {
            std::vector<double> trial = w;
            for (size_t j = 0; j <= f; ++j) trial[j] -= step * grad[j];
            project(trial);
            double trial_nll = nll(trial);
            if (trial_nll < current) {
                w = std::move(trial);
                current = trial_nll;
                step = std::min(step * 1.2, 1e4);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }

    BinaryModel model;
    model.weights = w;
    model.converged = converged;
    model.iterations = iter;
    size_t correct = 0;
    for (size_t i = 0; i < n; ++i) {
        int pred = model.score(x[i]) >= 0.5 ? 1 : 0;
        if (pred == y[i]) ++correct;
    }
    model.training_accuracy = static_cast<double>(correct) / static_cast<double>(n);
    return model;
}

}  // namespace metatrust
