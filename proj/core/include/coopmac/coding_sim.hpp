#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "coopmac/discrete.hpp"

namespace coopmac {

/// Parameters of one random superposition code.
struct CodebookSpec {
  int blocklength = 8;               // n
  double common_rate = 0.0;          // R0, bits/symbol
  std::vector<double> private_rates; // R1..Rp
  double epsilon = 0.05;             // typicality slack
  InputLaw law;
  DiscreteChannelSpec channel;
  std::uint64_t seed = 1;
  std::size_t memory_budget_symbols = 1u << 26;  // stored codeword symbols

  void validate() const;
};

/// Cloud centers u^n(w0) and satellites x_i^n(w0, w_i) drawn from the law.
struct Codebook {
  CodebookSpec spec;
  std::size_t common_messages = 1;            // M0 = ceil(2^{n R0})
  std::vector<std::size_t> private_messages;  // M_i = ceil(2^{n R_i})
  std::vector<std::uint8_t> cloud;            // [w0][t]
  // satellites[i][(w0 * M_i + w_i) * n + t]
  std::vector<std::vector<std::uint8_t>> satellites;

  double realized_common_rate() const;
  std::vector<double> realized_private_rates() const;
};

Codebook build_codebook(const CodebookSpec& spec);

struct MessageTuple {
  std::size_t common = 0;
  std::vector<std::size_t> privates;
  bool operator==(const MessageTuple&) const = default;
};

/// Per-receiver outcome: the unique jointly typical tuple, or nothing when
/// zero or several tuples were typical.
struct DecodeResult {
  std::vector<std::optional<MessageTuple>> per_receiver;
};

/// Pushes the message tuple through the memoryless channel (fresh noise from
/// `seed`) and runs strong-typicality decoding at every receiver.
DecodeResult transmit_and_decode(const Codebook& codebook, const MessageTuple& messages,
                                 std::uint64_t seed);

struct ErrorCurvePoint {
  int blocklength = 0;
  std::vector<double> nominal_rates;   // R0 first
  std::vector<double> realized_rates;  // log2(M)/n
  std::size_t trials = 0;
  std::size_t errors = 0;
  double error_rate = 0.0;
  double ci_low = 0.0;   // Wilson 95%
  double ci_high = 0.0;
};

/// Empirical error of the union event (any receiver wrong) over uniform
/// random messages; one codebook per blocklength, derived seeds per trial.
std::vector<ErrorCurvePoint> error_curve(const CodebookSpec& spec_template,
                                         const std::vector<int>& blocklengths,
                                         std::size_t trials, std::uint64_t seed);

}  // namespace coopmac
