#include "numtok/numformat.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace numtok {
namespace {

bool is_known_delimiter(char c) {
  return std::find(kKnownDelimiters.begin(), kKnownDelimiters.end(), c) !=
         kKnownDelimiters.end();
}

bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

// Digit characters of `text` after dropping known delimiters that sit between
// two digits; every other character becomes a run separator ('\0').
std::string normalize_digit_stream(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (is_ascii_digit(c)) {
      out += c;
    } else if (is_known_delimiter(c) && i > 0 && i + 1 < text.size() &&
               is_ascii_digit(text[i - 1]) && is_ascii_digit(text[i + 1])) {
      continue;  // joining delimiter
    } else {
      out += '\0';
    }
  }
  return out;
}

}  // namespace

NumberFormatPolicy l2r_plain_policy() { return {Direction::L2R, 3, std::nullopt, ChunkMode::Chunked}; }

NumberFormatPolicy l2r_delim_policy(char delimiter) {
  return {Direction::L2R, 3, delimiter, ChunkMode::Chunked};
}

NumberFormatPolicy r2l_delim_policy(char delimiter) {
  return {Direction::R2L, 3, delimiter, ChunkMode::Chunked};
}

NumberFormatPolicy single_digit_policy(char delimiter) {
  return {Direction::L2R, 1, delimiter, ChunkMode::SingleDigit};
}

const char* to_string(Direction d) { return d == Direction::L2R ? "l2r" : "r2l"; }

const char* to_string(ChunkMode m) {
  switch (m) {
    case ChunkMode::Chunked: return "chunked";
    case ChunkMode::SingleDigit: return "single_digit";
    case ChunkMode::PureBpe: return "pure_bpe";
  }
  return "?";
}

std::string describe(const NumberFormatPolicy& policy) {
  std::ostringstream out;
  out << to_string(policy.mode) << ':' << to_string(policy.direction) << ':'
      << policy.chunk_size << ':';
  if (policy.delimiter) {
    out << '\'' << *policy.delimiter << '\'';
  } else {
    out << "none";
  }
  return out.str();
}

int decimal_length(std::uint64_t n) {
  int len = 1;
  while (n >= 10) {
    n /= 10;
    ++len;
  }
  return len;
}

std::string to_digits(std::uint64_t n) { return std::to_string(n); }

bool is_digit_string(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_ascii_digit);
}

std::optional<std::uint64_t> digits_to_value(std::string_view digits) {
  if (!is_digit_string(digits)) return std::nullopt;
  std::uint64_t value = 0;
  for (char c : digits) {
    const auto d = static_cast<std::uint64_t>(c - '0');
    if (value > (std::numeric_limits<std::uint64_t>::max() - d) / 10) return std::nullopt;
    value = value * 10 + d;
  }
  return value;
}

std::vector<std::string> chunk_digits(std::string_view digits, int chunk_size, Direction dir) {
  if (digits.empty()) throw std::invalid_argument("chunk_digits: empty digit string");
  if (chunk_size < 1) throw std::invalid_argument("chunk_digits: chunk size must be >= 1");

  const auto k = static_cast<std::size_t>(chunk_size);
  std::vector<std::string> chunks;
  chunks.reserve(digits.size() / k + 1);
  if (dir == Direction::L2R) {
    for (std::size_t i = 0; i < digits.size(); i += k) {
      chunks.emplace_back(digits.substr(i, k));
    }
  } else {
    // First chunk absorbs the remainder so all later chunks are full.
    const std::size_t head = digits.size() % k == 0 ? k : digits.size() % k;
    chunks.emplace_back(digits.substr(0, head));
    for (std::size_t i = head; i < digits.size(); i += k) {
      chunks.emplace_back(digits.substr(i, k));
    }
  }
  return chunks;
}

std::string render_number(std::uint64_t n, const NumberFormatPolicy& policy) {
  const std::string digits = to_digits(n);
  if (policy.mode == ChunkMode::PureBpe) return digits;

  std::vector<std::string> chunks;
  if (policy.mode == ChunkMode::SingleDigit) {
    for (char c : digits) chunks.emplace_back(1, c);
  } else {
    chunks = chunk_digits(digits, policy.chunk_size, policy.direction);
  }

  std::string out;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    if (i > 0 && policy.delimiter) out += *policy.delimiter;
    out += chunks[i];
  }
  return out;
}

std::optional<std::uint64_t> parse_number_strict(std::string_view text,
                                                 const NumberFormatPolicy& policy) {
  if (text.empty()) return std::nullopt;

  std::vector<std::string_view> groups;
  if (policy.delimiter && policy.mode != ChunkMode::PureBpe) {
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = text.find(*policy.delimiter, start);
      if (pos == std::string_view::npos) {
        groups.push_back(text.substr(start));
        break;
      }
      groups.push_back(text.substr(start, pos - start));
      start = pos + 1;
    }
  } else {
    groups.push_back(text);
  }

  std::string digits;
  for (const auto& g : groups) {
    if (!is_digit_string(g)) return std::nullopt;
    digits += g;
  }
  if (digits.size() > 1 && digits[0] == '0') return std::nullopt;  // leading zero

  // Group sizes must match what render_number would emit.
  if (policy.delimiter && policy.mode != ChunkMode::PureBpe) {
    if (policy.mode == ChunkMode::SingleDigit) {
      for (const auto& g : groups) {
        if (g.size() != 1) return std::nullopt;
      }
    } else {
      // L2R: the last group may be short; R2L: the first group may be.
      const auto k = static_cast<std::size_t>(policy.chunk_size);
      for (std::size_t i = 0; i < groups.size(); ++i) {
        const bool may_be_short =
            policy.direction == Direction::L2R ? i + 1 == groups.size() : i == 0;
        if (may_be_short) {
          if (groups[i].empty() || groups[i].size() > k) return std::nullopt;
        } else if (groups[i].size() != k) {
          return std::nullopt;
        }
      }
    }
  }

  return digits_to_value(digits);
}

std::optional<std::uint64_t> parse_number_lenient(std::string_view text) {
  const std::string stream = normalize_digit_stream(text);
  std::size_t i = 0;
  while (i < stream.size()) {
    if (stream[i] == '\0') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < stream.size() && stream[j] != '\0') ++j;
    return digits_to_value(std::string_view(stream).substr(i, j - i));
  }
  return std::nullopt;
}

std::vector<std::uint64_t> extract_numbers_lenient(std::string_view text) {
  const std::string stream = normalize_digit_stream(text);
  std::vector<std::uint64_t> out;
  std::size_t i = 0;
  while (i < stream.size()) {
    if (stream[i] == '\0') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < stream.size() && stream[j] != '\0') ++j;
    if (auto value = digits_to_value(std::string_view(stream).substr(i, j - i))) {
      out.push_back(*value);
    }
    i = j;
  }
  return out;
}

CoverageReport three_digit_coverage(const Vocabulary& vocab) {
  CoverageReport report;
  for (int v = 0; v < 1000; ++v) {
    std::string s(3, '0');
    s[0] = static_cast<char>('0' + v / 100);
    s[1] = static_cast<char>('0' + (v / 10) % 10);
    s[2] = static_cast<char>('0' + v % 10);
    report.exact[static_cast<std::size_t>(v)] = vocab.rank_of(s).has_value();
    report.with_leading_space[static_cast<std::size_t>(v)] = vocab.rank_of(" " + s).has_value();
    report.exact_count += report.exact[static_cast<std::size_t>(v)] ? 1 : 0;
    report.space_count += report.with_leading_space[static_cast<std::size_t>(v)] ? 1 : 0;
  }
  return report;
}

void write_coverage_csv(const CoverageReport& report, std::ostream& out,
                        bool leading_space_variant) {
  const auto& grid = leading_space_variant ? report.with_leading_space : report.exact;
  out << "first_digit";
  for (int c = 0; c < 100; ++c) {
    out << ',' << (c < 10 ? "0" : "") << c;
  }
  out << '\n';
  for (int r = 0; r < 10; ++r) {
    out << r;
    for (int c = 0; c < 100; ++c) {
      out << ',' << (grid[static_cast<std::size_t>(r * 100 + c)] ? 1 : 0);
    }
    out << '\n';
  }
}

nlohmann::json coverage_summary_json(const CoverageReport& report) {
  nlohmann::json missing = nlohmann::json::array();
  for (int v = 0; v < 1000; ++v) {
    if (!report.exact[static_cast<std::size_t>(v)]) {
      std::string s = std::to_string(v);
      missing.push_back(std::string(3 - s.size(), '0') + s);
    }
  }
  return nlohmann::json{{"covered", report.exact_count},
                        {"covered_with_leading_space", report.space_count},
                        {"total", 1000},
                        {"missing", std::move(missing)}};
}

namespace {

std::uint64_t pow10_u64(int e) {
  std::uint64_t v = 1;
  for (int i = 0; i < e; ++i) v *= 10;
  return v;
}

PartitionShape shape_of_pieces(const std::vector<std::string>& pieces) {
  PartitionShape shape;
  shape.reserve(pieces.size());
  for (const auto& p : pieces) shape.push_back(static_cast<int>(p.size()));
  return shape;
}

}  // namespace

PartitionHistogram partition_histogram(const NumberFormatPolicy& policy, int n_digits) {
  if (n_digits < 1 || n_digits > 12) {
    throw std::invalid_argument("partition_histogram: n_digits must be in [1,12]");
  }
  if (policy.mode == ChunkMode::PureBpe) {
    throw std::invalid_argument("partition_histogram: pure-BPE mode needs a vocabulary");
  }

  const std::uint64_t population = 9 * pow10_u64(n_digits - 1);
  PartitionShape shape;
  if (policy.mode == ChunkMode::SingleDigit) {
    shape.assign(static_cast<std::size_t>(n_digits), 1);
  } else {
    const std::string sample(static_cast<std::size_t>(n_digits), '1');
    for (const auto& chunk : chunk_digits(sample, policy.chunk_size, policy.direction)) {
      shape.push_back(static_cast<int>(chunk.size()));
    }
  }
  return {{std::move(shape), population}};
}

PartitionHistogram partition_histogram(const Vocabulary& vocab, int n_digits) {
  if (n_digits < 1 || n_digits > 12) {
    throw std::invalid_argument("partition_histogram: n_digits must be in [1,12]");
  }
  PartitionHistogram hist;
  const std::uint64_t lo = n_digits == 1 ? 1 : pow10_u64(n_digits - 1);
  const std::uint64_t hi = pow10_u64(n_digits);
  for (std::uint64_t v = lo; v < hi; ++v) {
    ++hist[shape_of_pieces(vocab.segment_pieces(to_digits(v)))];
  }
  return hist;
}

void write_partition_csv(const PartitionHistogram& hist, std::ostream& out) {
  out << "shape,count\n";
  for (const auto& [shape, count] : hist) {
    out << '"' << '(';
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (i > 0) out << ',';
      out << shape[i];
    }
    out << ')' << '"' << ',' << count << '\n';
  }
}

nlohmann::json partition_summary_json(const PartitionHistogram& hist) {
  nlohmann::json rows = nlohmann::json::array();
  std::uint64_t total = 0;
  for (const auto& [shape, count] : hist) {
    rows.push_back(nlohmann::json{{"shape", shape}, {"count", count}});
    total += count;
  }
  return nlohmann::json{{"partitions", std::move(rows)}, {"total", total}};
}

}  // namespace numtok
