#pragma once
// Shared test fixtures: a synthetic corpus with unique "needle" phrases, a
// hand-counted multiple-choice set, and a helper that writes replay transcripts.

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "airkit/llm.hpp"
#include "airkit/ragstore.hpp"

namespace airkit::fixtures {

inline constexpr std::array<std::string_view, 20> kNeedlePhrases = {
    "orthogonal pilot reuse factor",         "beam failure recovery window",
    "random access preamble format",         "hybrid repeat codebook size",
    "sounding reference hopping pattern",    "discontinuous reception cycle length",
    "timing advance command granularity",    "bandwidth part switching delay",
    "quantization feedback resolution bits", "paging occasion offset rule",
    "cyclic prefix overhead ratio",          "handover interruption budget target",
    "uplink power headroom margin",          "carrier aggregation secondary cell",
    "broadcast payload master block",        "radio link monitoring threshold",
    "synchronization burst periodicity setting", "logical prioritization token bucket",
    "measurement gap repetition scheme",     "scheduling prohibit timer value",
};

// Document holding needle phrase i.
inline std::size_t needle_doc(std::size_t i) { return 5 * i + 2; }

inline std::string doc_id(std::size_t d) {
    std::string id = "doc-000";
    const std::string n = std::to_string(d);
    id.replace(id.size() - n.size(), n.size(), n);
    return id;
}

// Six-letter consonant-vowel filler words; none of the needle words has
// that shape, so every needle term occurs in exactly one document.
inline std::string filler_word(std::mt19937_64& rng) {
    static constexpr std::string_view kConsonants = "bdfgklmnprstvz";
    static constexpr std::string_view kVowels = "aeiou";
    std::string w;
    for (int s = 0; s < 3; ++s) {
        w += kConsonants[rng() % kConsonants.size()];
        w += kVowels[rng() % kVowels.size()];
    }
    return w;
}

// 100 documents of 300 filler tokens (two chunks at 256/64); needle phrase i
// sits at token 10 of document 5i+2, inside that document's first chunk only.
inline std::vector<DocumentRecord> needle_corpus(std::size_t n_docs = 100) {
    std::mt19937_64 rng(0x5eed);
    std::vector<DocumentRecord> docs;
    for (std::size_t d = 0; d < n_docs; ++d) {
        std::string text;
        for (std::size_t t = 0; t < 300; ++t) {
            if (t == 10 && d % 5 == 2 && d / 5 < kNeedlePhrases.size()) {
                text += std::string(kNeedlePhrases[d / 5]) + ' ';
            }
            text += filler_word(rng);
            text += (t % 17 == 16) ? ". " : " ";
        }
        text.pop_back();
        docs.push_back({doc_id(d), d < 50 ? "Release A" : "Release B", std::move(text), {}});
    }
    return docs;
}

struct ScriptedQuestion {
    McQuestion question;
    std::string response;  // canned model reply
};

// Ten questions in two categories. Replies are correct for 4 of 5 "Lexicon"
// questions and 3 of 5 "Standards specifications" questions; two of the wrong
// replies are unparseable. Expected: 80.00 / 60.00 / overall 70.00.
inline std::vector<ScriptedQuestion> graded_fixture() {
    auto q = [](std::string text, std::vector<std::string> options, std::size_t gold, std::string category) {
        McQuestion m;
        m.question = std::move(text);
        m.options = std::move(options);
        m.gold_index = gold;
        m.category = std::move(category);
        return m;
    };
    const std::string lex = "Lexicon";
    const std::string std_ = "Standards specifications";
    return {
        {q("What does the acronym OFDM expand to?",
           {"Orthogonal frequency-division multiplexing", "Optical fibre data modulation",
            "Open frame duplex mode", "Offset frequency detection method"},
           0, lex),
         "OFDM stands for orthogonal frequency-division multiplexing, so the answer is A."},
        {q("What is a cyclic prefix?", {"A routing header", "A copy of the symbol tail placed at its start",
                                        "A scrambling code", "A pilot tone"},
           1, lex),
         "B"},
        {q("What does HARQ combine?", {"Beams", "Carriers", "Retransmissions with forward error correction",
                                       "Cells"},
           2, lex),
         "The correct option is C."},
        {q("What is a resource block?", {"A group of subcarriers over one slot", "A billing unit",
                                         "A core network node", "A cipher"},
           0, lex),
         "Answer: (a)"},
        {q("What does SNR compare?", {"Signal and noise power", "Uplink and downlink rate",
                                      "Two antennas", "Delay and jitter"},
           0, lex),
         "I would go with D."},
        {q("Which body publishes the LTE specifications?", {"IEEE", "3GPP", "ITU-T", "IETF"}, 1, std_),
         "It is B."},
        {q("Which release introduced 5G NR?", {"Release 8", "Release 10", "Release 13", "Release 15"}, 3, std_),
         "D) Release 15"},
        {q("Which layer performs HARQ in NR?", {"PDCP", "RLC", "MAC", "RRC"}, 2, std_), "C"},
        {q("How many subcarriers form an NR resource block?", {"6", "12", "24", "48"}, 1, std_),
         "I cannot determine this."},
        {q("Which channel carries the master information block?", {"PBCH", "PDSCH", "PUCCH", "PRACH"}, 0, std_),
         "Not sure; it depends on the numerology."},
    };
}

inline std::vector<McQuestion> questions_of(const std::vector<ScriptedQuestion>& scripted) {
    std::vector<McQuestion> out;
    for (const auto& s : scripted) out.push_back(s.question);
    return out;
}

// The question file layout accepted by questions_from_json; alternates the
// index and option-text answer encodings.
inline std::string questions_json(const std::vector<McQuestion>& questions) {
    auto quote = [](const std::string& s) {
        std::string o = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') o += '\\';
            o += c;
        }
        return o + "\"";
    };
    std::string out = "[\n";
    for (std::size_t i = 0; i < questions.size(); ++i) {
        const auto& q = questions[i];
        out += "  {\"question\": " + quote(q.question) + ", \"options\": [";
        for (std::size_t o = 0; o < q.options.size(); ++o) out += (o ? ", " : "") + quote(q.options[o]);
        out += "], \"answer\": ";
        out += (i % 2 == 0) ? std::to_string(q.gold_index) : quote(q.options[q.gold_index]);
        out += ", \"category\": " + quote(q.category) + "}";
        out += (i + 1 < questions.size()) ? ",\n" : "\n";
    }
    return out + "]\n";
}

// Writes a replay transcript answering each prompt with the paired response,
// as recorded under `config` (model name and temperature form the key).
inline void write_replay(const std::filesystem::path& path, const BackendConfig& config,
                         const std::vector<std::pair<RenderedPrompt, std::string>>& exchanges) {
    TranscriptWriter writer(path, config);
    for (const auto& [prompt, response] : exchanges) {
        ChatExchange ex;
        ex.system_text = prompt.system_text;
        ex.user_text = prompt.user_text;
        ex.response_text = response;
        ex.model_name = config.model_name;
        ex.temperature = config.temperature;
        ex.prompt_fingerprint = prompt.fingerprint;
        ex.timestamp = "2024-01-01T00:00:00Z";
        writer.append(ex);
    }
}

// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(std::string_view name) {
    const auto dir = std::filesystem::temp_directory_path() / ("airkit_test_" + std::string(name));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace airkit::fixtures
