#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace numtok {

/// Index into a Vocabulary's rank-ordered entry list.
using TokenId = std::uint32_t;

/// One learned merge: adjacent occurrences of (left, right) join into left+right.
struct MergeRule {
  std::string left;
  std::string right;

  bool operator==(const MergeRule&) const = default;
};

/// Immutable byte-level BPE vocabulary.
///
/// Entries are kept sorted by ascending rank; lower rank approximates higher
/// corpus frequency. Trained vocabularies carry their merge list and segment
/// by replaying merges in creation order. Vocabularies loaded from rank files
/// have no merge list and segment by lowest-rank merge inference instead.
/// Instances are immutable after construction and safe to share across
/// threads.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// The 256 single-byte tokens at ranks 0-255, no merges.
  static Vocabulary base_bytes();

  /// Learns merges from `corpus` until `max_vocab` tokens exist or no bigram
  /// occurs at least twice. Bigrams are counted non-overlapping, left to
  /// right within each corpus item; ties break lexicographically on
  /// (left bytes, right bytes). Base bytes occupy ranks 0-255 and merges
  /// start at 256.
  static Vocabulary train(const std::vector<std::string>& corpus, std::size_t max_vocab);

  /// Reads "base64(token_bytes) rank" lines (LF-terminated, no header).
  /// Validates rank uniqueness, full single-byte coverage, and that every
  /// multi-byte token splits into two strictly-lower-rank tokens.
  static Vocabulary load_rank_file(const std::string& path);

  /// Builds a vocabulary from explicit (token bytes, rank) entries, running
  /// the same validation as load_rank_file.
  static Vocabulary from_entries(std::vector<std::pair<std::string, std::uint32_t>> entries,
                                 std::vector<MergeRule> merges = {});

  std::size_t size() const { return tokens_.size(); }
  bool has_merges() const { return !merges_.empty(); }
  const std::vector<MergeRule>& merges() const { return merges_; }

  const std::string& token_bytes(TokenId id) const { return tokens_.at(id); }
  std::uint32_t rank_at(TokenId id) const { return ranks_.at(id); }
  std::optional<TokenId> id_of(std::string_view token) const;
  std::optional<std::uint32_t> rank_of(std::string_view token) const;

  /// Deterministic segmentation; concatenating the pieces reproduces `text`.
  std::vector<TokenId> segment(std::string_view text) const;
  std::vector<std::string> segment_pieces(std::string_view text) const;

  void save_rank_file(const std::string& path) const;

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  void index_entries();
  std::vector<TokenId> segment_with_merges(std::string_view text) const;
  std::vector<TokenId> segment_with_ranks(std::string_view text) const;

  std::vector<std::string> tokens_;  // sorted by ascending rank
  std::vector<std::uint32_t> ranks_;
  std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>> id_by_token_;
  std::vector<MergeRule> merges_;
};

/// Rank of `token_bytes` if the vocabulary contains it; lower rank means the
/// token was created earlier, a proxy for higher term frequency.
inline std::optional<std::uint32_t> merge_rank(std::string_view token_bytes,
                                               const Vocabulary& vocab) {
  return vocab.rank_of(token_bytes);
}

}  // namespace numtok
