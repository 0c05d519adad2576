#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "numtok/bpe.hpp"

namespace numtok {

enum class Direction { L2R, R2L };

enum class ChunkMode {
  Chunked,      // fixed-size digit chunks in the given direction
  SingleDigit,  // one chunk per digit
  PureBpe,      // no imposed structure; segmentation comes from a vocabulary
};

/// The delimiters the lenient parser knows how to strip.
constexpr std::array<char, 5> kKnownDelimiters{',', ' ', '.', '$', '#'};

struct NumberFormatPolicy {
  Direction direction = Direction::L2R;
  int chunk_size = 3;
  std::optional<char> delimiter{};
  ChunkMode mode = ChunkMode::Chunked;

  bool operator==(const NumberFormatPolicy&) const = default;
};

// Common policies.
NumberFormatPolicy l2r_plain_policy();
NumberFormatPolicy l2r_delim_policy(char delimiter);
NumberFormatPolicy r2l_delim_policy(char delimiter);
NumberFormatPolicy single_digit_policy(char delimiter);

const char* to_string(Direction d);
const char* to_string(ChunkMode m);
std::string describe(const NumberFormatPolicy& policy);

/// Number of decimal digits (1 for zero).
int decimal_length(std::uint64_t n);
std::string to_digits(std::uint64_t n);
bool is_digit_string(std::string_view s);
/// Overflow-checked digit-string to value conversion.
std::optional<std::uint64_t> digits_to_value(std::string_view digits);

/// Splits a digit string into chunks of at most `chunk_size` digits. L2R: all
/// chunks except possibly the last are full; R2L: all except possibly the
/// first. Throws std::invalid_argument on an empty string or chunk_size < 1.
std::vector<std::string> chunk_digits(std::string_view digits, int chunk_size, Direction dir);

std::string render_number(std::uint64_t n, const NumberFormatPolicy& policy);

/// Exact inverse of render_number: delimiters must sit exactly where the
/// policy puts them and no other characters may appear.
std::optional<std::uint64_t> parse_number_strict(std::string_view text,
                                                 const NumberFormatPolicy& policy);

/// Strips known delimiters flanked by digits on both sides, then extracts the
/// first maximal digit run. nullopt when no digits are found or the value
/// overflows.
std::optional<std::uint64_t> parse_number_lenient(std::string_view text);

/// All maximal digit runs after delimiter stripping, in order of appearance.
/// Runs whose value overflows are dropped.
std::vector<std::uint64_t> extract_numbers_lenient(std::string_view text);

/// Which 3-digit strings "000".."999" have a dedicated single token.
/// `with_leading_space` tracks the " NNN" variant, which released
/// vocabularies distinguish from the bare form.
struct CoverageReport {
  std::array<bool, 1000> exact{};
  std::array<bool, 1000> with_leading_space{};
  int exact_count = 0;
  int space_count = 0;
};

CoverageReport three_digit_coverage(const Vocabulary& vocab);

/// 10x100 grid, rows = first digit, columns = last two digits, value 0/1.
void write_coverage_csv(const CoverageReport& report, std::ostream& out,
                        bool leading_space_variant = false);
nlohmann::json coverage_summary_json(const CoverageReport& report);

/// Tuple of token lengths a number splits into, most significant chunk first.
using PartitionShape = std::vector<int>;
using PartitionHistogram = std::map<PartitionShape, std::uint64_t>;

/// Partition shapes over all n-digit numbers (no leading zeros) under a
/// Chunked or SingleDigit policy. Every number of a given length shares one
/// shape, so this is closed-form; counts sum to 9*10^(n-1).
PartitionHistogram partition_histogram(const NumberFormatPolicy& policy, int n_digits);

/// Shapes from segmenting every n-digit number with `vocab` (pure BPE).
/// Enumerates all 9*10^(n-1) numbers; keep n modest.
PartitionHistogram partition_histogram(const Vocabulary& vocab, int n_digits);

void write_partition_csv(const PartitionHistogram& hist, std::ostream& out);
nlohmann::json partition_summary_json(const PartitionHistogram& hist);

}  // namespace numtok
