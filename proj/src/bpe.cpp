#include "numtok/bpe.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "numtok/errors.hpp"

namespace numtok {
namespace {

constexpr std::string_view kB64Alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= bytes.size()) {
    std::uint32_t v = (static_cast<unsigned char>(bytes[i]) << 16) |
                      (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                      static_cast<unsigned char>(bytes[i + 2]);
    out += kB64Alphabet[(v >> 18) & 63];
    out += kB64Alphabet[(v >> 12) & 63];
    out += kB64Alphabet[(v >> 6) & 63];
    out += kB64Alphabet[v & 63];
    i += 3;
  }
  const std::size_t rem = bytes.size() - i;
  if (rem == 1) {
    std::uint32_t v = static_cast<unsigned char>(bytes[i]) << 16;
    out += kB64Alphabet[(v >> 18) & 63];
    out += kB64Alphabet[(v >> 12) & 63];
    out += "==";
  } else if (rem == 2) {
    std::uint32_t v = (static_cast<unsigned char>(bytes[i]) << 16) |
                      (static_cast<unsigned char>(bytes[i + 1]) << 8);
    out += kB64Alphabet[(v >> 18) & 63];
    out += kB64Alphabet[(v >> 12) & 63];
    out += kB64Alphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::optional<std::string> base64_decode(std::string_view text) {
  if (text.empty() || text.size() % 4 != 0) return std::nullopt;
  std::array<int, 256> rev{};
  rev.fill(-1);
  for (int i = 0; i < 64; ++i) rev[static_cast<unsigned char>(kB64Alphabet[i])] = i;

  std::string out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int pad = 0;
    std::uint32_t v = 0;
    for (int j = 0; j < 4; ++j) {
      const char c = text[i + j];
      if (c == '=') {
        // Padding only in the last two slots of the final group.
        if (i + 4 != text.size() || j < 2) return std::nullopt;
        ++pad;
        v <<= 6;
        continue;
      }
      if (pad > 0) return std::nullopt;  // data after '='
      const int d = rev[static_cast<unsigned char>(c)];
      if (d < 0) return std::nullopt;
      v = (v << 6) | static_cast<std::uint32_t>(d);
    }
    out += static_cast<char>((v >> 16) & 0xff);
    if (pad < 2) out += static_cast<char>((v >> 8) & 0xff);
    if (pad < 1) out += static_cast<char>(v & 0xff);
  }
  return out;
}

// Non-overlapping, left-to-right bigram counts for one tokenized item.
void count_bigrams(const std::vector<std::string>& pieces,
                   std::map<std::pair<std::string, std::string>, std::uint64_t>& counts) {
  std::map<std::pair<std::string, std::string>, std::size_t> last_counted;
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    std::pair<std::string, std::string> pair{pieces[i], pieces[i + 1]};
    auto it = last_counted.find(pair);
    if (it != last_counted.end() && it->second + 1 == i) continue;  // overlaps previous count
    ++counts[pair];
    last_counted[pair] = i;
  }
}

// Replaces non-overlapping, left-to-right occurrences of (left,right) in place.
void apply_merge(std::vector<std::string>& pieces, const MergeRule& rule) {
  std::size_t write = 0;
  std::size_t read = 0;
  while (read < pieces.size()) {
    if (read + 1 < pieces.size() && pieces[read] == rule.left && pieces[read + 1] == rule.right) {
      pieces[write] = pieces[read] + pieces[read + 1];
      read += 2;
    } else {
      if (write != read) pieces[write] = std::move(pieces[read]);
      ++read;
    }
    ++write;
  }
  pieces.resize(write);
}

}  // namespace

Vocabulary Vocabulary::base_bytes() {
  Vocabulary v;
  v.tokens_.reserve(256);
  v.ranks_.reserve(256);
  for (int b = 0; b < 256; ++b) {
    v.tokens_.push_back(std::string(1, static_cast<char>(b)));
    v.ranks_.push_back(static_cast<std::uint32_t>(b));
  }
  v.index_entries();
  return v;
}

void Vocabulary::index_entries() {
  id_by_token_.clear();
  id_by_token_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    auto [it, inserted] = id_by_token_.emplace(tokens_[i], static_cast<TokenId>(i));
    if (!inserted) throw FormatError("vocabulary: duplicate token bytes");
  }
}

std::optional<TokenId> Vocabulary::id_of(std::string_view token) const {
  auto it = id_by_token_.find(token);
  if (it == id_by_token_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> Vocabulary::rank_of(std::string_view token) const {
  auto id = id_of(token);
  if (!id) return std::nullopt;
  return ranks_[*id];
}

Vocabulary Vocabulary::train(const std::vector<std::string>& corpus, std::size_t max_vocab) {
  if (corpus.empty()) throw std::invalid_argument("train: corpus is empty");
  if (max_vocab < 256) throw std::invalid_argument("train: max_vocab must be >= 256");

  Vocabulary vocab = base_bytes();

  std::vector<std::vector<std::string>> items;
  items.reserve(corpus.size());
  for (const auto& text : corpus) {
    std::vector<std::string> pieces;
    pieces.reserve(text.size());
    for (char c : text) pieces.emplace_back(1, c);
    items.push_back(std::move(pieces));
  }

  while (vocab.size() < max_vocab) {
    std::map<std::pair<std::string, std::string>, std::uint64_t> counts;
    for (const auto& pieces : items) count_bigrams(pieces, counts);

    // Highest count wins; std::map iteration order breaks ties
    // lexicographically on (left, right).
    const std::pair<std::string, std::string>* best = nullptr;
    std::uint64_t best_count = 1;  // require >= 2
    for (const auto& [pair, count] : counts) {
      if (count > best_count) {
        best_count = count;
        best = &pair;
      }
    }
    if (best == nullptr) break;

    MergeRule rule{best->first, best->second};
    const std::string merged = rule.left + rule.right;
    for (auto& pieces : items) apply_merge(pieces, rule);
    vocab.merges_.push_back(rule);
    if (vocab.id_by_token_.find(merged) == vocab.id_by_token_.end()) {
      const auto rank = static_cast<std::uint32_t>(vocab.tokens_.size());
      vocab.tokens_.push_back(merged);
      vocab.ranks_.push_back(rank);
      vocab.id_by_token_.emplace(merged, rank);
    }
  }
  return vocab;
}

Vocabulary Vocabulary::from_entries(std::vector<std::pair<std::string, std::uint32_t>> entries,
                                    std::vector<MergeRule> merges) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].second == entries[i - 1].second) {
      throw FormatError("vocabulary: duplicate rank " + std::to_string(entries[i].second));
    }
  }

  Vocabulary v;
  v.tokens_.reserve(entries.size());
  v.ranks_.reserve(entries.size());
  for (auto& [token, rank] : entries) {
    v.tokens_.push_back(std::move(token));
    v.ranks_.push_back(rank);
  }
  v.merges_ = std::move(merges);
  v.index_entries();

  for (int b = 0; b < 256; ++b) {
    const char c = static_cast<char>(b);
    if (v.id_by_token_.find(std::string_view(&c, 1)) == v.id_by_token_.end()) {
      std::ostringstream msg;
      msg << "vocabulary: missing single-byte token 0x" << std::hex << b;
      throw FormatError(msg.str());
    }
  }

  // Every multi-byte token must split into two strictly-lower-rank tokens.
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    const std::string& tok = v.tokens_[i];
    if (tok.size() < 2) continue;
    const std::uint32_t rank = v.ranks_[i];
    bool decomposable = false;
    for (std::size_t split = 1; split < tok.size() && !decomposable; ++split) {
      auto left = v.rank_of(std::string_view(tok).substr(0, split));
      auto right = v.rank_of(std::string_view(tok).substr(split));
      decomposable = left && right && *left < rank && *right < rank;
    }
    if (!decomposable) {
      throw FormatError("vocabulary: token at rank " + std::to_string(rank) +
                        " is not decomposable into lower-rank tokens");
    }
  }
  return v;
}

Vocabulary Vocabulary::load_rank_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open rank file: " + path);

  std::vector<std::pair<std::string, std::uint32_t>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": empty line");
    }
    const auto space = line.find(' ');
    if (space == std::string::npos || space == 0 || space + 1 >= line.size() ||
        line.find(' ', space + 1) != std::string::npos) {
      throw FormatError(path + ":" + std::to_string(line_no) +
                        ": expected \"base64 rank\"");
    }
    auto token = base64_decode(std::string_view(line).substr(0, space));
    if (!token) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": malformed base64");
    }
    const std::string_view rank_text = std::string_view(line).substr(space + 1);
    std::uint64_t rank = 0;
    for (char c : rank_text) {
      if (c < '0' || c > '9') {
        throw FormatError(path + ":" + std::to_string(line_no) + ": malformed rank");
      }
      rank = rank * 10 + static_cast<std::uint64_t>(c - '0');
      if (rank > std::numeric_limits<std::uint32_t>::max()) {
        throw FormatError(path + ":" + std::to_string(line_no) + ": rank out of range");
      }
    }
    entries.emplace_back(std::move(*token), static_cast<std::uint32_t>(rank));
  }
  if (entries.empty()) throw FormatError(path + ": empty rank file");

  try {
    return from_entries(std::move(entries));
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void Vocabulary::save_rank_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write rank file: " + path);
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out << base64_encode(tokens_[i]) << ' ' << ranks_[i] << '\n';
  }
  if (!out) throw IoError("failed writing rank file: " + path);
}

std::vector<TokenId> Vocabulary::segment(std::string_view text) const {
  if (text.empty()) return {};
  if (tokens_.empty()) throw FormatError("segment: empty vocabulary");
  return has_merges() ? segment_with_merges(text) : segment_with_ranks(text);
}

std::vector<std::string> Vocabulary::segment_pieces(std::string_view text) const {
  std::vector<std::string> out;
  for (TokenId id : segment(text)) out.push_back(tokens_[id]);
  return out;
}

std::vector<TokenId> Vocabulary::segment_with_merges(std::string_view text) const {
  std::vector<std::string> pieces;
  pieces.reserve(text.size());
  for (char c : text) pieces.emplace_back(1, c);
  for (const MergeRule& rule : merges_) apply_merge(pieces, rule);

  std::vector<TokenId> out;
  out.reserve(pieces.size());
  for (const auto& piece : pieces) {
    auto id = id_of(piece);
    if (!id) throw FormatError("segment: merged piece missing from vocabulary");
    out.push_back(*id);
  }
  return out;
}

// Lowest-rank-first merge inference for vocabularies without a merge list:
// repeatedly join the leftmost adjacent pair whose concatenation has the
// lowest rank in the vocabulary.
std::vector<TokenId> Vocabulary::segment_with_ranks(std::string_view text) const {
  // Piece i spans [starts[i], starts[i+1]).
  std::vector<std::size_t> starts(text.size() + 1);
  for (std::size_t i = 0; i <= text.size(); ++i) starts[i] = i;

  auto piece = [&](std::size_t i, std::size_t span) {
    return text.substr(starts[i], starts[i + span] - starts[i]);
  };

  while (starts.size() > 2) {
    std::uint32_t best_rank = std::numeric_limits<std::uint32_t>::max();
    std::size_t best_i = starts.size();
    for (std::size_t i = 0; i + 2 < starts.size(); ++i) {
      auto rank = rank_of(piece(i, 2));
      if (rank && *rank < best_rank) {
        best_rank = *rank;
        best_i = i;
      }
    }
    if (best_i == starts.size()) break;
    starts.erase(starts.begin() + static_cast<std::ptrdiff_t>(best_i) + 1);
  }

  std::vector<TokenId> out;
  out.reserve(starts.size() - 1);
  for (std::size_t i = 0; i + 1 < starts.size(); ++i) {
    auto id = id_of(piece(i, 1));
    if (!id) {
      // Single bytes are always present, so unmatched pieces cannot occur.
      throw FormatError("segment: piece missing from vocabulary");
    }
    out.push_back(*id);
  }
  return out;
}

}  // namespace numtok
