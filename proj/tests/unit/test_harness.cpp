// scratch probe (temporary)
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "metatrust/harness.hpp"
#include "metatrust/intention.hpp"

using namespace metatrust;

TEST_CASE("probe semantic bands by rank") {
    GeneratorConfig cfg;
    cfg.pairs_per_level = 100;
    cfg.levels = 4;
    cfg.seed = 1729;
    auto corpus = generate_eval_corpus(cfg);

    std::vector<ImageServiceRecord> all;
    for (const auto& p : corpus.pairs) {
        all.push_back(p.original);
        all.push_back(p.candidate);
    }

    for (auto rule : {RankRule::energy_threshold(0.90), RankRule::energy_threshold(0.70),
                      RankRule::fixed(5), RankRule::fixed(8), RankRule::fixed(12)}) {
        auto vec = build_vectorizer(all, Channel::Contextual, Weighting::TermFrequency);
        Matrix m = build_matrix(all, vec);
        auto space = fit_space(m, rule, vec);
        std::array<std::vector<double>, 4> by_level;
        for (const auto& p : corpus.pairs) {
            double d = channel_semantic_delta(p, space);
            by_level[ordinal(corpus.labels.at(p.candidate.id))].push_back(d);
        }
        std::printf("rule(kind=%d r=%zu theta=%.2f) -> r=%zu of n=%zu\n",
                    (int)rule.kind, rule.fixed_r, rule.energy, space.r,
                    space.config.vocabulary.size());
        const char* names[4] = {"L0 syn", "L1 syn", "L2 syn", "L3 rep"};
        for (int l = 0; l < 4; ++l) {
            auto& v = by_level[l];
            std::sort(v.begin(), v.end());
            std::printf("  %s: p05=%.3f p25=%.3f p50=%.3f p75=%.3f p95=%.3f\n", names[l],
                        v[v.size() / 20], v[v.size() / 4], v[v.size() / 2],
                        v[3 * v.size() / 4], v[19 * v.size() / 20]);
        }
    }
    CHECK(true);
}
