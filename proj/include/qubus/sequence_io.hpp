#pragma once

#include <cstddef>
#include <istream>
#include <string>

#include "qubus/channels.hpp"

namespace qubus {

struct SequenceSpec {
  std::size_t n_qubits = 1;
  Sequence steps;
};

/// Reads the line-oriented sequence format:
///
///   qubits <n>
///   D [target=<k>] re=<f> im=<f>
///   R target=<k> theta=<f>
///   L l=<f>
///   I target=<k> chi=<f> gamma=<f> t=<f>
///
/// '#' starts a comment. Throws ParseError carrying the line number.
SequenceSpec parse_sequence(std::istream& in);
SequenceSpec parse_sequence_text(const std::string& text);
SequenceSpec read_sequence_file(const std::string& path);

/// Inverse of parse_sequence; numbers are written with 17 significant digits.
std::string format_sequence(const SequenceSpec& spec);

}  // namespace qubus
