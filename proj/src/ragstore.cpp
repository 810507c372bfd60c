#include "airkit/ragstore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "airkit/error.hpp"

namespace airkit {

namespace {

bool is_alnum(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !is_alnum(static_cast<unsigned char>(text[i]))) ++i;
        if (i == text.size()) break;
        const std::size_t begin = i;
        std::string term;
        while (i < text.size() && is_alnum(static_cast<unsigned char>(text[i]))) {
            const char c = text[i];
            term.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c + ('a' - 'A')) : c);
            ++i;
        }
        out.push_back({std::move(term), begin, i});
    }
    return out;
}

ChunkIndex::ChunkIndex(IndexParams params, std::vector<Chunk> chunks)
    : params_(params), chunks_(std::move(chunks)) {
    std::size_t total_len = 0;
    for (std::size_t c = 0; c < chunks_.size(); ++c) {
        const auto tokens = tokenize(chunks_[c].text);
        if (tokens.size() != chunks_[c].token_count || tokens.empty()) {
            throw FormatError("chunk " + std::to_string(c) + " of " + chunks_[c].doc_id +
                              ": token_count does not match its text");
        }
        std::map<std::string, std::size_t> tf;
        for (const auto& t : tokens) ++tf[t.term];
        for (const auto& [term, count] : tf) {
            ++df_[term];
            postings_[term].push_back({c, count});
        }
        total_len += tokens.size();
    }
    avg_len_ = chunks_.empty() ? 0.0 : static_cast<double>(total_len) / static_cast<double>(chunks_.size());
}

std::vector<ScoredChunk> ChunkIndex::retrieve(std::string_view query, std::size_t k) const {
    if (k == 0) throw InvalidParameter("retrieve: k must be at least 1");
    std::set<std::string> terms;
    for (auto& t : tokenize(query)) terms.insert(std::move(t.term));

    const double n_chunks = static_cast<double>(chunks_.size());
    std::vector<double> scores(chunks_.size(), 0.0);
    for (const auto& term : terms) {
        const auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const double df = static_cast<double>(it->second.size());
        const double idf = std::log(1.0 + (n_chunks - df + 0.5) / (df + 0.5));
        for (const auto& p : it->second) {
            const double tf = static_cast<double>(p.tf);
            const double len_norm = 1.0 - params_.b + params_.b * static_cast<double>(chunks_[p.chunk].token_count) / avg_len_;
            scores[p.chunk] += idf * tf * (params_.k1 + 1.0) / (tf + params_.k1 * len_norm);
        }
    }

    std::vector<ScoredChunk> ranked;
    for (std::size_t c = 0; c < chunks_.size(); ++c) {
        if (scores[c] > 0.0) ranked.push_back({&chunks_[c], scores[c]});
    }
    std::sort(ranked.begin(), ranked.end(), [](const ScoredChunk& a, const ScoredChunk& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.chunk->doc_id != b.chunk->doc_id) return a.chunk->doc_id < b.chunk->doc_id;
        return a.chunk->start_char < b.chunk->start_char;
    });
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

std::string ChunkIndex::to_json() const {
    nlohmann::ordered_json j;
    j["params"] = {{"chunk_tokens", params_.chunk_tokens},
                   {"overlap_tokens", params_.overlap_tokens},
                   {"k1", params_.k1},
                   {"b", params_.b}};
    auto& chunks = j["chunks"] = nlohmann::ordered_json::array();
    for (const auto& c : chunks_) {
        chunks.push_back({{"doc_id", c.doc_id},
                          {"source", c.source},
                          {"start", c.start_char},
                          {"end", c.end_char},
                          {"token_count", c.token_count},
                          {"text", c.text}});
    }
    auto& df = j["df"] = nlohmann::ordered_json::object();
    for (const auto& [term, count] : df_) df[term] = count;
    j["avg_len"] = avg_len_;
    return j.dump();
}

ChunkIndex ChunkIndex::from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        const auto& p = j.at("params");
        IndexParams params{p.at("chunk_tokens").get<std::size_t>(), p.at("overlap_tokens").get<std::size_t>(),
                           p.at("k1").get<double>(), p.at("b").get<double>()};
        std::vector<Chunk> chunks;
        for (const auto& c : j.at("chunks")) {
            chunks.push_back({c.at("doc_id").get<std::string>(), c.at("source").get<std::string>(),
                              c.at("start").get<std::size_t>(), c.at("end").get<std::size_t>(),
                              c.at("text").get<std::string>(), c.at("token_count").get<std::size_t>()});
        }
        ChunkIndex index(params, std::move(chunks));
        std::map<std::string, std::size_t> stored_df;
        for (const auto& [term, count] : j.at("df").items()) stored_df[term] = count.get<std::size_t>();
        if (stored_df != index.df_) throw FormatError("index: stored document frequencies do not match chunks");
        if (std::abs(j.at("avg_len").get<double>() - index.avg_len_) > 1e-9 * std::max(1.0, index.avg_len_)) {
            throw FormatError("index: stored average length does not match chunks");
        }
        return index;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("index JSON: ") + e.what());
    }
}

void ChunkIndex::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write index " + path.string());
    out << to_json() << '\n';
}

ChunkIndex ChunkIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read index " + path.string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(text);
}

ChunkIndex ingest(std::span<const DocumentRecord> docs, std::size_t chunk_tokens, std::size_t overlap_tokens) {
    if (chunk_tokens == 0) throw InvalidParameter("chunk size must be at least 1 token");
    if (overlap_tokens >= chunk_tokens) throw InvalidParameter("chunk overlap must be smaller than the chunk size");
    if (docs.empty()) throw InvalidParameter("cannot index an empty corpus");

    std::unordered_set<std::string> seen;
    std::vector<Chunk> chunks;
    const std::size_t step = chunk_tokens - overlap_tokens;
    for (const auto& doc : docs) {
        if (!seen.insert(doc.doc_id).second) throw InvalidParameter("duplicate doc_id \"" + doc.doc_id + "\"");
        if (doc.text.empty()) throw InvalidParameter("document \"" + doc.doc_id + "\" has no text");
        const auto tokens = tokenize(doc.text);
        for (std::size_t first = 0; first < tokens.size(); first += step) {
            const std::size_t last = std::min(first + chunk_tokens, tokens.size());
            const std::size_t begin = tokens[first].begin;
            const std::size_t end = tokens[last - 1].end;
            chunks.push_back({doc.doc_id, doc.source, begin, end, doc.text.substr(begin, end - begin), last - first});
            if (last == tokens.size()) break;
        }
    }
    return ChunkIndex(IndexParams{chunk_tokens, overlap_tokens, 1.2, 0.75}, std::move(chunks));
}

std::vector<DocumentRecord> documents_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("documents JSON: ") + e.what());
    }
    if (!j.is_array()) throw FormatError("documents file must hold a JSON array");
    std::vector<DocumentRecord> docs;
    for (std::size_t i = 0; i < j.size(); ++i) {
        try {
            const auto& r = j[i];
            DocumentRecord doc{r.at("doc_id").get<std::string>(), r.value("source", std::string()),
                               r.at("text").get<std::string>(), {}};
            if (r.contains("metadata")) {
                for (const auto& [key, value] : r.at("metadata").items()) {
                    doc.metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
                }
            }
            docs.push_back(std::move(doc));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("document record " + std::to_string(i) + ": " + e.what());
        }
    }
    return docs;
}

std::vector<McQuestion> questions_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("question JSON: ") + e.what());
    }
    if (!j.is_array()) throw FormatError("question file must hold a JSON array");
    std::vector<McQuestion> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string where = "question record " + std::to_string(i) + ": ";
        try {
            const auto& r = j[i];
            McQuestion q;
            q.question = r.at("question").get<std::string>();
            q.options = r.at("options").get<std::vector<std::string>>();
            q.category = r.at("category").get<std::string>();
            q.explanation = r.value("explanation", std::string());
            if (q.options.size() < 2) throw FormatError(where + "needs at least two options");
            const auto& answer = r.at("answer");
            if (answer.is_number_integer()) {
                const auto idx = answer.get<long long>();
                if (idx < 0 || static_cast<std::size_t>(idx) >= q.options.size()) {
                    throw FormatError(where + "answer index " + std::to_string(idx) + " out of range");
                }
                q.gold_index = static_cast<std::size_t>(idx);
            } else if (answer.is_string()) {
                const auto text_answer = answer.get<std::string>();
                const auto it = std::find(q.options.begin(), q.options.end(), text_answer);
                if (it == q.options.end()) throw FormatError(where + "answer text matches no option");
                q.gold_index = static_cast<std::size_t>(it - q.options.begin());
            } else {
                throw FormatError(where + "answer must be an index or option text");
            }
            out.push_back(std::move(q));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(where + e.what());
        }
    }
    return out;
}

RenderedPrompt augment(const McQuestion& question, std::span<const Chunk* const> contexts) {
    if (question.options.size() > 26) throw InvalidParameter("at most 26 answer options are supported");
    if (question.options.size() < 2) throw InvalidParameter("a question needs at least two options");
    std::string user;
    if (!contexts.empty()) {
        user += "Use the following excerpts from the protocol knowledge base to answer the question.\n\n";
        for (std::size_t i = 0; i < contexts.size(); ++i) {
            const Chunk& c = *contexts[i];
            user += "[Context " + std::to_string(i + 1) + " | source: " + c.source + " | doc: " + c.doc_id +
                    " | chars " + std::to_string(c.start_char) + "-" + std::to_string(c.end_char) + "]\n";
            user += c.text;
            user += "\n\n";
        }
    }
    user += "Question: " + question.question + "\n";
    for (std::size_t i = 0; i < question.options.size(); ++i) {
        user += static_cast<char>('A' + i);
        user += ". " + question.options[i] + "\n";
    }
    const char last = static_cast<char>('A' + question.options.size() - 1);
    user += "\nAnswer with exactly one letter (A-";
    user += last;
    user += ").";
    return make_prompt("You are an expert in wireless communication protocols and standards.", std::move(user),
                       PromptStyle::ZeroShot);
}

std::optional<std::size_t> parse_choice(std::string_view response, std::size_t n_options) {
    if (n_options < 2 || n_options > 26) throw InvalidParameter("option count must lie in [2, 26]");
    std::optional<std::size_t> last;
    for (std::size_t i = 0; i < response.size(); ++i) {
        const auto c = static_cast<unsigned char>(response[i]);
        const unsigned char up = (c >= 'a' && c <= 'z') ? c - ('a' - 'A') : c;
        if (up < 'A' || up >= 'A' + n_options) continue;
        if (i > 0 && is_alnum(static_cast<unsigned char>(response[i - 1]))) continue;
        if (i + 1 < response.size() && is_alnum(static_cast<unsigned char>(response[i + 1]))) continue;
        last = up - 'A';
    }
    return last;
}

std::string percent_string(std::size_t correct, std::size_t total) {
    if (total == 0) return "0.00";
    // hundredths of a percent, rounded half up
    const unsigned long long h = (2ULL * 10000ULL * correct + total) / (2ULL * total);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%llu.%02llu", h / 100, h % 100);
    return buf;
}

EvalReport grade(std::span<const std::optional<std::size_t>> predictions, std::span<const McQuestion> questions) {
    if (predictions.size() != questions.size()) {
        throw LengthMismatch("grade: " + std::to_string(predictions.size()) + " predictions for " +
                             std::to_string(questions.size()) + " questions");
    }
    EvalReport report;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        auto& cat = report.categories[questions[i].category];
        ++cat.total;
        ++report.total;
        if (!predictions[i]) {
            ++report.unparseable;
        } else if (*predictions[i] == questions[i].gold_index) {
            ++cat.correct;
            ++report.correct;
        }
    }
    return report;
}

std::string EvalReport::to_json() const {
    nlohmann::ordered_json j;
    auto& cats = j["categories"] = nlohmann::ordered_json::object();
    for (const auto& [name, s] : categories) {
        cats[name] = {{"correct", s.correct}, {"total", s.total}, {"accuracy_pct", percent_string(s.correct, s.total)}};
    }
    j["overall_pct"] = overall_pct();
    j["unparseable"] = unparseable;
    return j.dump(2);
}

std::string EvalReport::to_table() const {
    std::size_t width = std::string_view("Overall").size();
    for (const auto& [name, s] : categories) width = std::max(width, name.size());
    auto row = [&](std::string_view name, std::size_t correct, std::size_t total) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " %8zu %8zu %9s%%\n", correct, total, percent_string(correct, total).c_str());
        std::string line(name);
        line.resize(width, ' ');
        return line + buf;
    };
    std::string header = "Category";
    header.resize(width, ' ');
    std::string out = header + "  correct    total  accuracy\n";
    for (const auto& [name, s] : categories) out += row(name, s.correct, s.total);
    out += row("Overall", correct, total);
    out += "Unparseable: " + std::to_string(unparseable) + "\n";
    return out;
}

}  // namespace airkit
