#include "qubus/sequence_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "qubus/error.hpp"

namespace qubus {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream in(line.substr(0, line.find('#')));
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

double parse_double(std::size_t line, const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ParseError(line, "bad number for " + key + ": '" + text + "'");
  return value;
}

std::size_t parse_index(std::size_t line, const std::string& key, const std::string& text) {
  std::size_t value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ParseError(line, "bad index for " + key + ": '" + text + "'");
  }
  return value;
}

class KeyValues {
 public:
  KeyValues(std::size_t line, const std::vector<std::string>& tokens,
            const std::set<std::string>& allowed)
      : line_(line) {
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      const auto eq = tokens[i].find('=');
      if (eq == std::string::npos || eq == 0) throw ParseError(line, "expected key=value, got '" + tokens[i] + "'");
      std::string key = tokens[i].substr(0, eq);
      if (!allowed.contains(key)) throw ParseError(line, "unknown key '" + key + "' for step " + tokens[0]);
      if (!values_.emplace(key, tokens[i].substr(eq + 1)).second) {
        throw ParseError(line, "duplicate key '" + key + "'");
      }
    }
  }

  bool has(const std::string& key) const { return values_.contains(key); }

  double number(const std::string& key) const { return parse_double(line_, key, get(key)); }
  std::size_t index(const std::string& key) const { return parse_index(line_, key, get(key)); }

 private:
  const std::string& get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ParseError(line_, "missing key '" + key + "'");
    return it->second;
  }

  std::size_t line_;
  std::map<std::string, std::string> values_;
};

Step parse_step(std::size_t line, const std::vector<std::string>& tok) {
  const std::string& kind = tok[0];
  if (kind == "D") {
    KeyValues kv(line, tok, {"target", "re", "im"});
    Displace d{std::nullopt, cplx{kv.number("re"), kv.number("im")}};
    if (kv.has("target")) d.target = kv.index("target");
    return d;
  }
  if (kind == "R") {
    KeyValues kv(line, tok, {"target", "theta"});
    return Rotate{kv.index("target"), kv.number("theta")};
  }
  if (kind == "L") {
    KeyValues kv(line, tok, {"l"});
    return Loss{kv.number("l")};
  }
  if (kind == "I") {
    KeyValues kv(line, tok, {"target", "chi", "gamma", "t"});
    return Interact{kv.index("target"), CouplingSpec{kv.number("chi"), kv.number("gamma"), kv.number("t")}};
  }
  throw ParseError(line, "unknown step '" + kind + "'");
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

SequenceSpec parse_sequence(std::istream& in) {
  SequenceSpec spec;
  bool have_header = false;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto tok = tokenize(line);
    if (tok.empty()) continue;
    if (!have_header) {
      if (tok[0] != "qubits" || tok.size() != 2) throw ParseError(line_no, "expected header 'qubits <n>'");
      spec.n_qubits = parse_index(line_no, "qubits", tok[1]);
      if (spec.n_qubits == 0 || spec.n_qubits > kMaxQubits) {
        throw ParseError(line_no, "qubit count must be in 1.." + std::to_string(kMaxQubits));
      }
      have_header = true;
      continue;
    }
    Step step = parse_step(line_no, tok);
    try {
      check_sequence({step}, spec.n_qubits);
    } catch (const ValidationError& e) {
      std::string what = e.what();
      if (what.rfind("step 0: ", 0) == 0) what = what.substr(8);
      throw ParseError(line_no, what);
    }
    spec.steps.push_back(std::move(step));
  }
  if (!have_header) throw ParseError(line_no == 0 ? 1 : line_no, "missing header 'qubits <n>'");
  return spec;
}

SequenceSpec parse_sequence_text(const std::string& text) {
  std::istringstream in(text);
  return parse_sequence(in);
}

SequenceSpec read_sequence_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open sequence file '" + path + "'");
  return parse_sequence(in);
}

std::string format_sequence(const SequenceSpec& spec) {
  std::ostringstream out;
  out << "qubits " << spec.n_qubits << '\n';
  for (const auto& step : spec.steps) {
    if (const auto* d = std::get_if<Displace>(&step)) {
      out << 'D';
      if (d->target) out << " target=" << *d->target;
      out << " re=" << num(d->beta.real()) << " im=" << num(d->beta.imag()) << '\n';
    } else if (const auto* r = std::get_if<Rotate>(&step)) {
      out << "R target=" << r->target << " theta=" << num(r->theta) << '\n';
    } else if (const auto* l = std::get_if<Loss>(&step)) {
      out << "L l=" << num(l->l) << '\n';
    } else {
      const auto& i = std::get<Interact>(step);
      out << "I target=" << i.target << " chi=" << num(i.coupling.chi)
          << " gamma=" << num(i.coupling.gamma) << " t=" << num(i.coupling.t) << '\n';
    }
  }
  return out.str();
}

}  // namespace qubus
