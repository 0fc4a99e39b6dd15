#include "cogbert/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cogbert/errors.hpp"

namespace cogbert {

namespace {

bool is_ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool keep_char(unsigned char c) {
  if (c >= 0x80) return true;
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

}  // namespace

Vocab::Vocab() {
  insert("[PAD]", kPadId);
  insert("[UNK]", kUnkId);
  insert("[CLS]", kClsId);
  insert("[SEP]", kSepId);
}

void Vocab::insert(const std::string& word, int id) {
  word_to_id_.emplace(word, id);
  id_to_word_.emplace(id, word);
  size_ = std::max(size_, static_cast<std::size_t>(id) + 1);
}

int Vocab::add(const std::string& word) {
  if (auto it = word_to_id_.find(word); it != word_to_id_.end()) return it->second;
  while (id_to_word_.count(next_id_)) ++next_id_;
  const int id = next_id_++;
  insert(word, id);
  return id;
}

int Vocab::id(std::string_view word) const {
  auto it = word_to_id_.find(std::string(word));
  return it == word_to_id_.end() ? kUnkId : it->second;
}

bool Vocab::contains(std::string_view word) const {
  return word_to_id_.count(std::string(word)) > 0;
}

const std::string& Vocab::word(int id) const {
  auto it = id_to_word_.find(id);
  if (it == id_to_word_.end()) throw IndexError("vocab id " + std::to_string(id) + " is unassigned");
  return it->second;
}

void Vocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write vocab file " + path.string());
  for (const auto& [id, word] : id_to_word_) out << word << '\t' << id << '\n';
}

Vocab Vocab::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read vocab file " + path.string());
  Vocab v;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw ValidationError("vocab line " + std::to_string(lineno) + " lacks a tab");
    }
    const std::string word = line.substr(0, tab);
    const int id = std::stoi(line.substr(tab + 1));
    if (is_reserved(id)) {
      if (v.word(id) != word) {
        throw ValidationError("vocab reserved id " + std::to_string(id) + " bound to " + word);
      }
      continue;
    }
    if (v.word_to_id_.count(word) || v.id_to_word_.count(id)) {
      throw ValidationError("duplicate vocab entry on line " + std::to_string(lineno));
    }
    v.insert(word, id);
  }
  v.next_id_ = 1;
  return v;
}

std::vector<std::string> preprocess(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  bool in_token = false;
  auto flush = [&] {
    if (!current.empty()) words.push_back(current);
    current.clear();
    in_token = false;
  };
  for (unsigned char c : text) {
    if (is_ascii_space(c)) {
      if (in_token) flush();
      continue;
    }
    in_token = true;
    if (!keep_char(c)) continue;
    if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    current.push_back(static_cast<char>(c));
  }
  flush();
  return words;
}

Vocab build_vocab(const std::vector<std::vector<std::string>>& corpus, std::size_t min_freq) {
  std::map<std::string, std::size_t> counts;
  for (const auto& sentence : corpus)
    for (const auto& w : sentence) ++counts[w];

  std::vector<std::pair<std::string, std::size_t>> entries;
  for (const auto& [w, n] : counts) {
    if (n >= min_freq) entries.emplace_back(w, n);
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocab vocab;
  for (const auto& [w, n] : entries) vocab.add(w);
  return vocab;
}

TokenizedSentence encode(const std::vector<std::string>& words, const Vocab& vocab,
                         std::size_t max_len) {
  if (max_len < 3) throw ValidationError("encode: max_len must be at least 3");
  TokenizedSentence out;
  out.ids.assign(max_len, kPadId);
  out.base_mask.assign(max_len, kMaskSuppress);
  out.token_type_ids.assign(max_len, 0);

  const std::size_t capacity = max_len - 2;
  out.word_count = std::min(words.size(), capacity);
  out.truncated = words.size() - out.word_count;

  out.ids[0] = kClsId;
  for (std::size_t i = 0; i < out.word_count; ++i) out.ids[i + 1] = vocab.id(words[i]);
  out.ids[out.word_count + 1] = kSepId;
  for (std::size_t i = 0; i < out.active_len(); ++i) out.base_mask[i] = kMaskKeep;
  return out;
}

std::vector<std::string> decode(const TokenizedSentence& sentence, const Vocab& vocab) {
  std::vector<std::string> words;
  for (int id : sentence.ids) {
    if (Vocab::is_reserved(id) && id != kUnkId) continue;
    words.push_back(vocab.word(id));
  }
  return words;
}

}  // namespace cogbert
