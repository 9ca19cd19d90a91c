#include "sublis/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace sublis {
namespace {

bool skip_line(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

std::size_t parse_header_field(const std::string& tok, const char* key, std::size_t line_no) {
  const std::string prefix = std::string(key) + "=";
  if (tok.rfind(prefix, 0) != 0) throw ParseError(line_no, "expected " + prefix + "<int> in header");
  std::size_t v = 0;
  const char* first = tok.data() + prefix.size();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last)
    throw ParseError(line_no, "bad integer in header field " + tok);
  return v;
}

Value parse_slot(const std::string& tok, std::size_t line_no) {
  if (tok == "_") return kNull;
  Value v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(line_no, "bad slot value '" + tok + "'");
  if (v == kNull) throw ParseError(line_no, "slot value collides with the null marker");
  return v;
}

struct RawRead {
  BlockSequence values;
  std::vector<std::uint8_t> flags;
};

RawRead read_impl(std::istream& in, bool with_flags) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t n = 0, k = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    std::istringstream ss(line);
    std::string a, b, extra;
    ss >> a >> b;
    if (ss >> extra) throw ParseError(line_no, "trailing tokens in header");
    n = parse_header_field(a, "n", line_no);
    k = parse_header_field(b, "k", line_no);
    have_header = true;
    break;
  }
  if (!have_header) throw ParseError(line_no, "missing header line");
  RawRead out{BlockSequence(n, k), std::vector<std::uint8_t>(n * k, 0)};
  std::size_t block = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    if (block >= n) throw ParseError(line_no, "more blocks than declared n");
    std::istringstream ss(line);
    std::string tok;
    std::size_t slot = 0;
    bool in_flags = false;
    std::size_t flag_slot = 0;
    while (ss >> tok) {
      if (tok == "|") {
        if (!with_flags || in_flags) throw ParseError(line_no, "unexpected '|'");
        in_flags = true;
        continue;
      }
      if (in_flags) {
        if (tok != "0" && tok != "1") throw ParseError(line_no, "flag must be 0 or 1");
        if (flag_slot >= k) throw ParseError(line_no, "more flags than k");
        out.flags[block * k + flag_slot++] = tok == "1" ? 1 : 0;
        continue;
      }
      if (slot >= k) throw ParseError(line_no, "more slots than k");
      out.values.set(block, slot++, parse_slot(tok, line_no));
    }
    if (with_flags && !in_flags) throw ParseError(line_no, "missing flag column");
    if (with_flags && flag_slot != slot) throw ParseError(line_no, "flag count differs from slot count");
    ++block;
  }
  if (block != n) throw ParseError(line_no, "expected " + std::to_string(n) + " blocks, found " + std::to_string(block));
  return out;
}

}  // namespace

BlockSequence read_sequence(std::istream& in) { return read_impl(in, false).values; }

BlockSequence read_sequence_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_sequence(in);
}

void write_sequence(std::ostream& out, const BlockSequence& y) {
  out << "n=" << y.blocks() << " k=" << y.width() << "\n";
  for (std::size_t i = 0; i < y.blocks(); ++i) {
    for (std::size_t j = 0; j < y.width(); ++j) {
      if (j) out << ' ';
      const Value v = y.at(i, j);
      if (v == kNull)
        out << '_';
      else
        out << v;
    }
    out << "\n";
  }
}

void write_sequence_file(const std::string& path, const BlockSequence& y) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_sequence(out, y);
  if (!out) throw std::runtime_error("write failed for " + path);
}

FlaggedSequence read_flagged(std::istream& in) {
  auto raw = read_impl(in, true);
  return FlaggedSequence{std::move(raw.values), std::move(raw.flags)};
}

void write_flagged(std::ostream& out, const FlaggedSequence& f) {
  const auto& y = f.values;
  out << "n=" << y.blocks() << " k=" << y.width() << "\n";
  for (std::size_t i = 0; i < y.blocks(); ++i) {
    for (std::size_t j = 0; j < y.width(); ++j) {
      if (j) out << ' ';
      const Value v = y.at(i, j);
      if (v == kNull)
        out << '_';
      else
        out << v;
    }
    out << " |";
    for (std::size_t j = 0; j < y.width(); ++j) out << ' ' << int(f.flags[i * y.width() + j]);
    out << "\n";
  }
}

}  // namespace sublis
