// Copyright 2026 The ofclip Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Caption preprocessing: word splitting, a rule-based plural lemmatizer and a
// lexicon-driven noun-chunk extractor.

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ofclip/error.hpp"
#include "ofclip/lexicon_data.hpp"

namespace ofclip {

/// Lowercased words. ASCII letters and digits form words, every other ASCII
/// byte separates them; bytes >= 0x80 are kept so UTF-8 words stay intact.
inline std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

namespace detail {

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline bool is_lower_alpha(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

// Irregular or suffix-ambiguous forms. Plural-only garments map to themselves.
inline const std::unordered_map<std::string_view, std::string_view>& lemma_exceptions() {
  static const std::unordered_map<std::string_view, std::string_view> table = {
      {"jeans", "jeans"},         {"trousers", "trousers"}, {"pants", "pants"},
      {"shorts", "shorts"},       {"leggings", "leggings"}, {"tights", "tights"},
      {"pajamas", "pajamas"},     {"pyjamas", "pyjamas"},   {"glasses", "glasses"},
      {"sunglasses", "sunglasses"}, {"overalls", "overalls"}, {"dungarees", "dungarees"},
      {"chinos", "chinos"},       {"joggers", "joggers"},   {"briefs", "briefs"},
      {"boxers", "boxers"},       {"clothes", "clothes"},   {"news", "news"},
      {"dresses", "dress"},       {"blouses", "blouse"},    {"purses", "purse"},
      {"cases", "case"},          {"vases", "vase"},        {"hoses", "hose"},
      {"bases", "base"},          {"ties", "tie"},          {"pies", "pie"},
      {"men", "man"},             {"women", "woman"},       {"children", "child"},
      {"feet", "foot"},           {"teeth", "tooth"},       {"knives", "knife"},
      {"scarves", "scarf"},       {"wolves", "wolf"},       {"leaves", "leaf"},
      {"shoes", "shoe"},          {"toes", "toe"},          {"heels", "heel"},
  };
  return table;
}

}  // namespace detail

/// Rule-based English lemma for plural nouns.
///
/// Order: exception table, then "-ies" -> "y", "-ses" -> "s",
/// "-xes"/"-ches"/"-shes" -> drop "es", then a bare trailing "s" is dropped
/// unless the word ends in "ss", "us" or "is" or has three letters or fewer.
/// Anything that is not lowercase ASCII letters comes back unchanged.
inline std::string lemmatize_token(std::string_view token) {
  using detail::ends_with;
  if (!detail::is_lower_alpha(token)) return std::string(token);
  const auto& ex = detail::lemma_exceptions();
  if (auto it = ex.find(token); it != ex.end()) return std::string(it->second);
  const std::string s(token);
  if (s.size() > 4 && ends_with(s, "ies")) return s.substr(0, s.size() - 3) + "y";
  if (s.size() > 4 && ends_with(s, "ses")) return s.substr(0, s.size() - 2);
  if (s.size() > 4 && (ends_with(s, "xes") || ends_with(s, "ches") || ends_with(s, "shes"))) {
    return s.substr(0, s.size() - 2);
  }
  if (s.size() > 3 && ends_with(s, "s") && !ends_with(s, "ss") && !ends_with(s, "us") &&
      !ends_with(s, "is")) {
    return s.substr(0, s.size() - 1);
  }
  return s;
}

enum class PosTag { Noun, Adjective, Number, Determiner, Preposition, Conjunction, Pronoun, Verb, Adverb };

/// Closed-class word list. Words not present are nouns.
class Lexicon {
 public:
  Lexicon() = default;

  static Lexicon parse(std::string_view text) {
    static const std::array<std::pair<std::string_view, PosTag>, 7> kSections = {{
        {"determiner", PosTag::Determiner},
        {"preposition", PosTag::Preposition},
        {"conjunction", PosTag::Conjunction},
        {"pronoun", PosTag::Pronoun},
        {"verb", PosTag::Verb},
        {"adverb", PosTag::Adverb},
        {"adjective", PosTag::Adjective},
    }};
    Lexicon lex;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool have_section = false;
    PosTag current = PosTag::Noun;
    while (std::getline(in, line)) {
      ++line_no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      if (line[first] == '[') {
        const auto close = line.find(']', first);
        if (close == std::string::npos) {
          fail(ErrorCode::ParseError, "lexicon line " + std::to_string(line_no) + ": unterminated section");
        }
        const std::string name = line.substr(first + 1, close - first - 1);
        auto it = std::find_if(kSections.begin(), kSections.end(),
                               [&](const auto& s) { return s.first == name; });
        if (it == kSections.end()) {
          fail(ErrorCode::ParseError, "lexicon line " + std::to_string(line_no) + ": unknown section '" + name + "'");
        }
        current = it->second;
        have_section = true;
        continue;
      }
      if (!have_section) {
        fail(ErrorCode::ParseError, "lexicon line " + std::to_string(line_no) + ": words before any section");
      }
      std::istringstream words(line);
      std::string w;
      while (words >> w) {
        for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        lex.tags_[w] = current;
      }
    }
    return lex;
  }

  static Lexicon load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open lexicon " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  static const Lexicon& builtin() {
    static const Lexicon lex = parse(kDefaultLexicon);
    return lex;
  }

  PosTag tag(const std::string& word) const {
    if (auto it = tags_.find(word); it != tags_.end()) return it->second;
    if (!word.empty() && std::all_of(word.begin(), word.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      return PosTag::Number;
    }
    return PosTag::Noun;
  }

  std::size_t size() const noexcept { return tags_.size(); }

 private:
  std::unordered_map<std::string, PosTag> tags_;
};

/// Clause punctuation ends a chunk; hyphens and apostrophes do not.
inline bool is_clause_break(char c) {
  return c == ',' || c == ';' || c == ':' || c == '.' || c == '!' || c == '?' || c == '(' || c == ')' ||
         c == '[' || c == ']' || c == '/' || c == '|';
}

/// Maximal runs of modifiers and nouns that end in a noun. Determiners,
/// every other closed-class word and clause punctuation break runs; trailing
/// modifiers after the last noun are dropped; the head noun is lemmatized.
inline std::vector<std::string> extract_noun_chunks(std::string_view caption,
                                                    const Lexicon& lexicon = Lexicon::builtin()) {
  if (split_words(caption).empty()) fail(ErrorCode::EmptyCaption, "caption has no words");

  std::vector<std::string> chunks;
  std::vector<std::string> run;
  std::ptrdiff_t last_noun = -1;
  auto flush = [&] {
    if (last_noun >= 0) {
      std::string chunk;
      for (std::ptrdiff_t i = 0; i <= last_noun; ++i) {
        if (i) chunk += ' ';
        const auto& w = run[static_cast<std::size_t>(i)];
        chunk += i == last_noun ? lemmatize_token(w) : w;
      }
      chunks.push_back(std::move(chunk));
    }
    run.clear();
    last_noun = -1;
  };
  std::size_t begin = 0;
  for (std::size_t end = 0; end <= caption.size(); ++end) {
    if (end < caption.size() && !is_clause_break(caption[end])) continue;
    for (auto& w : split_words(caption.substr(begin, end - begin))) {
      const PosTag t = lexicon.tag(w);
      if (t == PosTag::Noun || t == PosTag::Adjective || t == PosTag::Number) {
        run.push_back(std::move(w));
        if (t == PosTag::Noun) last_noun = static_cast<std::ptrdiff_t>(run.size()) - 1;
      } else {
        flush();
      }
    }
    flush();
    begin = end + 1;
  }
  return chunks;
}

/// Caption text used for training: chunks joined with ", ". Captions without
/// any chunk fall back to their lowercased words so t_i is never empty.
inline std::string chunk_caption(std::string_view caption, const Lexicon& lexicon = Lexicon::builtin()) {
  const auto chunks = extract_noun_chunks(caption, lexicon);
  const auto& parts = chunks.empty() ? split_words(caption) : chunks;
  const char* sep = chunks.empty() ? " " : ", ";
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace ofclip
