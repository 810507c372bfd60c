#pragma once
// Lexical retrieval over a protocol-document corpus (BM25 on overlapping token
// windows), retrieval-augmented prompt assembly, and multiple-choice grading.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "airkit/prompting.hpp"

namespace airkit {

struct DocumentRecord {
    std::string doc_id;
    std::string source;  // e.g. "3GPP Rel-17"
    std::string text;
    std::map<std::string, std::string> metadata;
};

struct Token {
    std::string term;  // lowercase ASCII alphanumerics
    std::size_t begin;
    std::size_t end;
};

// Lowercases ASCII and splits on every non-alphanumeric byte.
std::vector<Token> tokenize(std::string_view text);

struct Chunk {
    std::string doc_id;
    std::string source;
    std::size_t start_char = 0;
    std::size_t end_char = 0;  // exclusive
    std::string text;
    std::size_t token_count = 0;
};

struct IndexParams {
    std::size_t chunk_tokens = 256;
    std::size_t overlap_tokens = 64;
    double k1 = 1.2;
    double b = 0.75;
};

struct ScoredChunk {
    const Chunk* chunk;
    double score;
};

class ChunkIndex {
  public:
    ChunkIndex(IndexParams params, std::vector<Chunk> chunks);

    const IndexParams& params() const { return params_; }
    const std::vector<Chunk>& chunks() const { return chunks_; }
    const std::map<std::string, std::size_t>& document_frequencies() const { return df_; }
    double average_length() const { return avg_len_; }

    // Top-k by BM25, descending; ties by (doc_id, start_char). Zero scores are
    // dropped, so fewer than k results can come back.
    std::vector<ScoredChunk> retrieve(std::string_view query, std::size_t k) const;

    // {"params", "chunks", "df", "avg_len"} in that order.
    std::string to_json() const;
    static ChunkIndex from_json(std::string_view text);
    void save(const std::filesystem::path& path) const;
    static ChunkIndex load(const std::filesystem::path& path);

  private:
    struct Posting {
        std::size_t chunk;
        std::size_t tf;
    };

    IndexParams params_;
    std::vector<Chunk> chunks_;
    std::map<std::string, std::size_t> df_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    double avg_len_ = 0.0;
};

ChunkIndex ingest(std::span<const DocumentRecord> docs, std::size_t chunk_tokens = 256,
                  std::size_t overlap_tokens = 64);

std::vector<DocumentRecord> documents_from_json(std::string_view text);

struct McQuestion {
    std::string question;
    std::vector<std::string> options;
    std::size_t gold_index = 0;
    std::string category;
    std::string explanation;
};

// TeleQnA-shaped records: question, options (list), answer (0-based index or
// exact option text), category, optional explanation. Errors name the record.
std::vector<McQuestion> questions_from_json(std::string_view text);

RenderedPrompt augment(const McQuestion& question, std::span<const Chunk* const> contexts);

// Last standalone letter in A..(A + n - 1), case-insensitive.
std::optional<std::size_t> parse_choice(std::string_view response, std::size_t n_options);

struct CategoryScore {
    std::size_t correct = 0;
    std::size_t total = 0;
};

// "NN.NN" percent, rounded half up from the exact ratio.
std::string percent_string(std::size_t correct, std::size_t total);

struct EvalReport {
    std::map<std::string, CategoryScore> categories;
    std::size_t correct = 0;
    std::size_t total = 0;
    std::size_t unparseable = 0;

    std::string overall_pct() const { return percent_string(correct, total); }
    std::string to_json() const;
    std::string to_table() const;
};

EvalReport grade(std::span<const std::optional<std::size_t>> predictions, std::span<const McQuestion> questions);

}  // namespace airkit
