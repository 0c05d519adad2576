#include "numtok/probgen.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "numtok/errors.hpp"
#include "numtok/numformat.hpp"

namespace numtok {
namespace {

constexpr std::uint64_t kDrawBudget = 1'000'000;

std::uint64_t pow10_u64(int e) {
  std::uint64_t v = 1;
  for (int i = 0; i < e; ++i) v *= 10;
  return v;
}

void check_spec(const ProblemSpec& spec) {
  if (spec.len_a < 1 || spec.len_b < 1) {
    throw ConfigError("problem spec: addend digit lengths must be at least 1");
  }
  if (spec.len_a > kMaxAddendDigits || spec.len_b > kMaxAddendDigits) {
    throw ConfigError("problem spec: addend digit lengths above " +
                      std::to_string(kMaxAddendDigits) +
                      " are not supported (64-bit sums)");
  }
  if (spec.count < 0) {
    throw ConfigError("problem spec: count must be non-negative");
  }
  if (spec.len_answer) {
    const int mx = std::max(spec.len_a, spec.len_b);
    if (*spec.len_answer != mx && *spec.len_answer != mx + 1) {
      throw ConfigError(
          "infeasible problem spec " + default_spec_id(spec) +
          ": a sum of " + std::to_string(spec.len_a) + "- and " +
          std::to_string(spec.len_b) + "-digit addends has " +
          std::to_string(mx) + " or " + std::to_string(mx + 1) + " digits");
    }
  }
}

std::vector<AdditionProblem> generate(
    const ProblemSpec& spec,
    const std::optional<std::pair<std::uint64_t, std::uint64_t>>& exclude) {
  check_spec(spec);
  const std::uint64_t lo_a = pow10_u64(spec.len_a - 1);
  const std::uint64_t hi_a = pow10_u64(spec.len_a) - 1;
  const std::uint64_t lo_b = pow10_u64(spec.len_b - 1);
  const std::uint64_t hi_b = pow10_u64(spec.len_b) - 1;
  const std::string label =
      spec.spec_id.empty() ? default_spec_id(spec) : spec.spec_id;

  std::mt19937_64 rng(spec.seed);
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  std::vector<AdditionProblem> out;
  out.reserve(static_cast<std::size_t>(spec.count));
  std::uint64_t draws = 0;
  while (out.size() < static_cast<std::size_t>(spec.count)) {
    if (++draws > kDrawBudget) {
      throw ConfigError("draw budget (" + std::to_string(kDrawBudget) +
                        ") exhausted generating spec " + label);
    }
    const std::uint64_t a = uniform_u64(rng, lo_a, hi_a);
    const std::uint64_t b = uniform_u64(rng, lo_b, hi_b);
    if (exclude && exclude->first == a && exclude->second == b) continue;
    const std::uint64_t sum = a + b;
    if (spec.len_answer && decimal_length(sum) != *spec.len_answer) continue;
    if (!seen.emplace(a, b).second) continue;

    AdditionProblem p;
    p.a = a;
    p.b = b;
    p.answer = sum;
    p.len_a = spec.len_a;
    p.len_b = spec.len_b;
    p.len_answer = decimal_length(sum);
    p.carries = count_carries(a, b);
    p.spec_id = label;
    p.index = static_cast<int>(out.size());
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::string to_string(LengthClass c) {
  return c == LengthClass::Match ? "match" : "mismatch";
}

std::uint64_t uniform_u64(std::mt19937_64& rng, std::uint64_t lo,
                          std::uint64_t hi) {
  if (lo > hi) throw ConfigError("uniform_u64: empty range");
  const std::uint64_t span = hi - lo + 1;
  if (span == 0) return rng();  // full 64-bit range
  // Reject draws below 2^64 mod span so the kept region is a whole number of
  // spans; plain modulo would bias toward small values.
  const std::uint64_t reject_below = (0 - span) % span;
  std::uint64_t r = rng();
  while (r < reject_below) r = rng();
  return lo + r % span;
}

int count_carries(std::uint64_t a, std::uint64_t b) {
  int carries = 0;
  unsigned carry = 0;
  while (a != 0 || b != 0) {
    const unsigned col = static_cast<unsigned>(a % 10) +
                         static_cast<unsigned>(b % 10) + carry;
    carry = col >= 10 ? 1u : 0u;
    carries += static_cast<int>(carry);
    a /= 10;
    b /= 10;
  }
  return carries;
}

LengthClass answer_length_class(const AdditionProblem& p) {
  return (p.len_answer == p.len_a || p.len_answer == p.len_b)
             ? LengthClass::Match
             : LengthClass::Mismatch;
}

std::string default_spec_id(const ProblemSpec& spec) {
  std::string id = std::to_string(spec.len_a) + "+" + std::to_string(spec.len_b);
  if (spec.len_answer) id += "=" + std::to_string(*spec.len_answer);
  return id;
}

AdditionProblem make_problem(std::uint64_t a, std::uint64_t b,
                             std::string spec_id, int index) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b) {
    throw ConfigError("make_problem: a + b overflows 64 bits");
  }
  AdditionProblem p;
  p.a = a;
  p.b = b;
  p.answer = a + b;
  p.len_a = decimal_length(a);
  p.len_b = decimal_length(b);
  p.len_answer = decimal_length(p.answer);
  p.carries = count_carries(a, b);
  p.spec_id = std::move(spec_id);
  p.index = index;
  return p;
}

std::vector<AdditionProblem> gen_problems(const ProblemSpec& spec) {
  return generate(spec, std::nullopt);
}

std::vector<AdditionProblem> sample_shots(const AdditionProblem& query,
                                          bool control_answer_length, int n,
                                          std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample_shots: n must be at least 1");
  ProblemSpec s;
  s.len_a = query.len_a;
  s.len_b = query.len_b;
  if (control_answer_length) s.len_answer = query.len_answer;
  s.count = n;
  s.seed = seed;
  s.spec_id = "shots:" + default_spec_id(s);
  return generate(s, std::make_pair(query.a, query.b));
}

void write_problems_jsonl(const std::string& path,
                          const std::vector<AdditionProblem>& problems) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& p : problems) {
    nlohmann::ordered_json j;
    j["a"] = p.a;
    j["b"] = p.b;
    j["answer"] = p.answer;
    j["len_a"] = p.len_a;
    j["len_b"] = p.len_b;
    j["len_answer"] = p.len_answer;
    j["carries"] = p.carries;
    j["spec_id"] = p.spec_id;
    j["index"] = p.index;
    out << j.dump() << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

std::vector<AdditionProblem> load_problems_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);

  std::vector<AdditionProblem> out;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw FormatError(path + ":" + std::to_string(lineno) + ": " + msg);
  };
  auto get_u64 = [&](const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) fail(std::string("missing field \"") + key + "\"");
    const auto& v = j.at(key);
    if (!v.is_number_unsigned() &&
        !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail(std::string("field \"") + key + "\" must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  };
  auto get_int = [&](const nlohmann::json& j, const char* key) {
    const std::uint64_t v = get_u64(j, key);
    if (v > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
      fail(std::string("field \"") + key + "\" out of range");
    }
    return static_cast<int>(v);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("bad JSON: ") + e.what());
    }
    if (!j.is_object()) fail("expected a JSON object");

    AdditionProblem p;
    p.a = get_u64(j, "a");
    p.b = get_u64(j, "b");
    p.answer = get_u64(j, "answer");
    p.len_a = get_int(j, "len_a");
    p.len_b = get_int(j, "len_b");
    p.len_answer = get_int(j, "len_answer");
    p.carries = get_int(j, "carries");
    if (!j.contains("spec_id") || !j.at("spec_id").is_string()) {
      fail("field \"spec_id\" must be a string");
    }
    p.spec_id = j.at("spec_id").get<std::string>();
    p.index = get_int(j, "index");

    if (p.a > std::numeric_limits<std::uint64_t>::max() - p.b) {
      fail("a + b overflows 64 bits");
    }
    if (p.answer != p.a + p.b) fail("answer does not equal a + b");
    if (p.len_a != decimal_length(p.a)) fail("len_a does not match a");
    if (p.len_b != decimal_length(p.b)) fail("len_b does not match b");
    if (p.len_answer != decimal_length(p.answer)) {
      fail("len_answer does not match answer");
    }
    if (p.carries != count_carries(p.a, p.b)) {
      fail("carries does not match column addition");
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace numtok
