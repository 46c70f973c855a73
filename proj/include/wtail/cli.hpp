#pragma once

#include <exception>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "wtail/amse.hpp"
#include "wtail/distributions.hpp"

namespace wtail::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitNumerical = 4;

// Bad flag values that CLI11 cannot detect on its own.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Exit status for an exception escaping a subcommand.
int exit_code_for(const std::exception& e) noexcept;

// One positive real per line; blank lines and text after '#' are ignored.
// Throws ParseError for a non-numeric line, DomainError for a non-positive one.
std::vector<double> read_observations(std::istream& in);

// "log", "sqrt", "sqrt-b", "inv-b" or "fixed:K"; results are clamped to [2, n-1].
// The b-based rules evaluate b(log n) of the model and throw UndefinedRateError when it is 0.
KRule parse_k_rule(std::string_view text, const WeibullTailModel& model);

// Comma-separated list such as "V1,V3"; throws UsageError on unknown names or duplicates.
std::vector<EstimatorVariant> parse_variant_list(std::string_view text);

// Runs the command line (without the program name); never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wtail::cli
