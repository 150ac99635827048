#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "metatrust/record.hpp"

namespace metatrust {

enum class SidecarFormat { JsonSidecar, CsvRow };

// Parses one sidecar into a record. JSON input is a flat object of string
// values plus "id"; CSV input is a header line of canonical tag names
// followed by exactly one data row. Unknown tags land in raw_tags untouched.
// Throws MalformedInput / SchemaViolation.
ImageServiceRecord parse_sidecar(std::string_view bytes, SidecarFormat format);

// Inverse of parse_sidecar for the JSON form: id plus raw_tags, keys sorted
// lexicographically, two-space indent, trailing newline.
std::string serialize_sidecar(const ImageServiceRecord& record);

// Corpus files are JSON arrays of sidecar objects, ordered by record id.
std::vector<ImageServiceRecord> load_corpus(const std::string& path);
void save_corpus(const std::vector<ImageServiceRecord>& records, const std::string& path);

// CSV corpus: canonical header row, one record per line, blank cell = absent.
std::vector<ImageServiceRecord> parse_csv_corpus(std::string_view bytes);
std::string serialize_csv_corpus(const std::vector<ImageServiceRecord>& records);

struct PairingRule {
    enum class Mode { IdPrefix, Tag } mode = Mode::IdPrefix;
    // For Mode::Tag: candidate records carry the original's id in this tag.
    std::string tag_name = "OriginalId";
};

struct PairingResult {
    std::vector<ServicePair> pairs;            // ordered by candidate id
    std::vector<std::string> unmatched;        // candidate ids with no original
};

// Matches every candidate to exactly one original (or reports it unmatched).
// The default rule strips the final "_suffix" segment of the candidate id.
// Throws DuplicateId when ids repeat within either corpus.
PairingResult pair_records(const std::vector<ImageServiceRecord>& originals,
                           const std::vector<ImageServiceRecord>& candidates,
                           const PairingRule& rule = {});

}  // namespace metatrust
