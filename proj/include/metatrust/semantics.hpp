#pragma once

#include <optional>
#include <string>
#include <vector>

#include "metatrust/matrix.hpp"
#include "metatrust/record.hpp"
#include "metatrust/svd.hpp"

namespace metatrust {

enum class Channel { Spatial, Temporal, Contextual };

const char* channel_name(Channel c);
Channel channel_from_name(const std::string& name);

// Channel-specific tokenization. Contextual uses the canonical text tokens;
// spatial tokenizes the categorical place fields and bins GPS into 0.1-degree
// grid cells; temporal emits labeled calendar tokens (y2015, mo04, d25, h11)
// from the record's primary timestamp.
std::vector<std::string> channel_tokens(const ImageServiceRecord& record, Channel channel);

enum class Weighting { Binary, TermFrequency, TfIdf };

const char* weighting_name(Weighting w);
Weighting weighting_from_name(const std::string& name);

struct VectorizerConfig {
    Channel channel = Channel::Contextual;
    Weighting weighting = Weighting::TermFrequency;
    std::vector<std::string> vocabulary;  // unique, ordered; defines columns
    int min_token_count = 1;
    std::vector<double> idf;  // parallel to vocabulary, filled for TfIdf
};

// Vocabulary over a corpus: tokens with total count >= min_token_count,
// lexicographically ordered. For TfIdf weighting the smoothed idf
// (ln((1+N)/(1+df)) + 1) is computed alongside.
VectorizerConfig build_vectorizer(const std::vector<ImageServiceRecord>& records,
                                  Channel channel, Weighting weighting,
                                  int min_token_count = 1);

// One record's row under the config's weighting; out-of-vocabulary tokens are
// dropped (an all-zero row is legal and embeds to the zero vector).
std::vector<double> vectorize(const ImageServiceRecord& record, const VectorizerConfig& config);

// Image-attribute matrix: row i is records[i], column order is the
// vocabulary. Throws EmptyCorpus / EmptyVocabulary.
Matrix build_matrix(const std::vector<ImageServiceRecord>& records,
                    const VectorizerConfig& config);

struct RankRule {
    enum class Kind { Fixed, Energy } kind = Kind::Energy;
    size_t fixed_r = 0;
    double energy = 0.90;

    static RankRule fixed(size_t r) { return {Kind::Fixed, r, 0}; }
    static RankRule energy_threshold(double theta) { return {Kind::Energy, 0, theta}; }
};

struct LatentVector {
    std::vector<double> values;
};

// Truncated SVD of one channel's image-attribute matrix. U rows are the
// training images' latent vectors.
struct SemanticSpace {
    Matrix u;               // m x r
    std::vector<double> s;  // r, non-increasing, >= 0
    Matrix v;               // n x r
    size_t r = 0;
    VectorizerConfig config;
};

// Energy rule keeps the smallest r with sum_{i<=r} s_i^2 / sum s^2 >= theta;
// fixed rule clamps to min(m, n). Throws ZeroMatrix.
SemanticSpace fit_space(const Matrix& m, const RankRule& rule, VectorizerConfig config = {});

// Folding-in projection v = x * V * diag(S)^-1; rows of the training matrix
// reproduce their U row. Throws RankDeficient when a retained singular value
// is zero, DimensionMismatch on a wrong-length row.
LatentVector embed(const std::vector<double>& record_row, const SemanticSpace& space);

// 1 - cosine similarity in [0, 2]; either vector all-zero -> 1.
double semantic_distance(const LatentVector& v_o, const LatentVector& v_m);

// embed both sides of the pair in the space and measure their distance.
double channel_semantic_delta(const ServicePair& pair, const SemanticSpace& space);

// Versioned model file; load reproduces distances bit-for-bit.
std::string serialize_space(const SemanticSpace& space);
SemanticSpace deserialize_space(const std::string& text);
void save_space(const SemanticSpace& space, const std::string& path);
SemanticSpace load_space(const std::string& path);

}  // namespace metatrust
