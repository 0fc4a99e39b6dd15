#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cogbert {

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 100;
inline constexpr int kClsId = 101;
inline constexpr int kSepId = 102;

// Additive attention-mask values. "-0" is stored as 0.0.
inline constexpr double kMaskKeep = 0.0;
inline constexpr double kMaskSuppress = -10000.0;

// Word-level vocabulary with BERT's reserved ids. Corpus words fill the
// free ids 1..99 first, then continue from 103.
class Vocab {
 public:
  Vocab();

  // Adds a word at the next free id; returns the existing id if present.
  int add(const std::string& word);

  int id(std::string_view word) const;  // kUnkId for unknown words
  bool contains(std::string_view word) const;
  const std::string& word(int id) const;  // throws IndexError for unassigned ids

  // max id + 1; at least 103.
  std::size_t size() const { return size_; }
  // Number of non-reserved words.
  std::size_t word_count() const { return word_to_id_.size() - 4; }

  static bool is_reserved(int id) {
    return id == kPadId || id == kUnkId || id == kClsId || id == kSepId;
  }

  // One "word<TAB>id" line per entry in id order, reserved tokens included.
  void save(const std::filesystem::path& path) const;
  static Vocab load(const std::filesystem::path& path);

  bool operator==(const Vocab& other) const { return id_to_word_ == other.id_to_word_; }

 private:
  void insert(const std::string& word, int id);

  std::unordered_map<std::string, int> word_to_id_;
  std::map<int, std::string> id_to_word_;
  int next_id_ = 1;
  std::size_t size_ = kSepId + 1;
};

// Lowercases, splits on whitespace, strips ASCII punctuation from every
// token and drops tokens that end up empty. Non-ASCII bytes are kept.
std::vector<std::string> preprocess(std::string_view text);

// Ids ordered by descending frequency, then lexicographically.
Vocab build_vocab(const std::vector<std::vector<std::string>>& corpus, std::size_t min_freq = 1);

struct TokenizedSentence {
  std::vector<int> ids;             // length max_len
  std::vector<double> base_mask;    // 0 at CLS/words/SEP, -10000 at PAD
  std::vector<int> token_type_ids;  // all 0
  std::size_t word_count = 0;       // content tokens kept
  std::size_t truncated = 0;        // content tokens dropped

  std::size_t max_len() const { return ids.size(); }
  // CLS + words + SEP
  std::size_t active_len() const { return word_count + 2; }
};

// [CLS] w1 .. wn [SEP] [PAD]...; words past max_len - 2 are dropped and counted.
TokenizedSentence encode(const std::vector<std::string>& words, const Vocab& vocab,
                         std::size_t max_len);

// Content words of an encoding; CLS, SEP and PAD are skipped.
std::vector<std::string> decode(const TokenizedSentence& sentence, const Vocab& vocab);

}  // namespace cogbert
