#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace numtok {

// One length-controlled addition problem. `answer`, the length fields and
// `carries` are all derivable from (a, b); they are stored so that dataset
// files are self-describing and loaders can cross-check them.
struct AdditionProblem {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t answer = 0;
  int len_a = 0;
  int len_b = 0;
  int len_answer = 0;
  int carries = 0;
  std::string spec_id;
  int index = 0;

  bool operator==(const AdditionProblem&) const = default;
};

// Generation request: addend digit lengths, an optional required answer
// length, how many problems, and the RNG seed. Addend order is preserved;
// (8,7) and (7,8) are distinct specs.
struct ProblemSpec {
  int len_a = 0;
  int len_b = 0;
  std::optional<int> len_answer;
  int count = 0;
  std::uint64_t seed = 0;
  std::string spec_id;  // label written into generated problems; defaulted if empty

  bool operator==(const ProblemSpec&) const = default;
};

enum class LengthClass { Match, Mismatch };

std::string to_string(LengthClass c);

// Digit lengths above this would risk 64-bit overflow in a+b.
inline constexpr int kMaxAddendDigits = 18;

// Uniform draw from [lo, hi] using rejection, so results are identical on
// every platform (std::uniform_int_distribution is implementation-defined).
std::uint64_t uniform_u64(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi);

// Carry-outs produced by base-10 column addition of a and b.
int count_carries(std::uint64_t a, std::uint64_t b);

// Match when the answer is as long as either addend; Mismatch when it is one
// digit longer than both (the carry-out case).
LengthClass answer_length_class(const AdditionProblem& p);

// "spec_id" label used when ProblemSpec.spec_id is empty: "7+8" or "7+8=9".
std::string default_spec_id(const ProblemSpec& spec);

// Builds a problem from its addends, filling in every derived field.
AdditionProblem make_problem(std::uint64_t a, std::uint64_t b,
                             std::string spec_id = "", int index = 0);

// Generates exactly spec.count problems. Addends are uniform over
// [10^(len-1), 10^len); when len_answer is set, candidates are rejected until
// the sum has that length. Duplicate (a,b) pairs within the spec are
// rejected. Throws ConfigError for infeasible specs (answer length outside
// {max(len_a,len_b), max+1}) or when the draw budget (10^6) is exhausted.
std::vector<AdditionProblem> gen_problems(const ProblemSpec& spec);

// Samples n few-shot example problems for a query: same (len_a, len_b), same
// len_answer too when control_answer_length is set, never equal to the query
// itself, deterministic given seed.
std::vector<AdditionProblem> sample_shots(const AdditionProblem& query,
                                          bool control_answer_length, int n,
                                          std::uint64_t seed);

// JSON Lines dataset I/O. One object per line with fields a, b, answer,
// len_a, len_b, len_answer, carries, spec_id, index. The loader revalidates
// every derived field and throws FormatError on any inconsistency.
void write_problems_jsonl(const std::string& path,
                          const std::vector<AdditionProblem>& problems);
std::vector<AdditionProblem> load_problems_jsonl(const std::string& path);

}  // namespace numtok
