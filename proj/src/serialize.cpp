#include "gfmm/serialize.hpp"

#include <charconv>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "gfmm/errors.hpp"

namespace gfmm {

namespace {

constexpr const char* kBoxesMagic = "gfmm-boxes";
constexpr const char* kModelMagic = "gfmm-model";
constexpr int kVersion = 1;

std::string fmt_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

template <class T>
T parse_number(const std::string& token, const char* what) {
  T value{};
  auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
    throw FormatError(fmt::format("bad {} '{}'", what, token));
  return value;
}

class Reader {
 public:
  explicit Reader(const std::string& text) : in_(text) {}

  std::vector<std::string> line(const std::string& tag) {
    std::string raw;
    do {
      if (!std::getline(in_, raw)) throw FormatError("unexpected end of input, expected '" + tag + "'");
      ++lineno_;
    } while (raw.empty());
    std::istringstream ls(raw);
    std::vector<std::string> tokens;
    for (std::string t; ls >> t;) tokens.push_back(t);
    if (tokens.empty() || tokens.front() != tag)
      throw FormatError(fmt::format("line {}: expected '{}'", lineno_, tag));
    tokens.erase(tokens.begin());
    return tokens;
  }

  bool done() {
    std::string rest;
    while (std::getline(in_, rest))
      if (!rest.empty()) return false;
    return true;
  }

 private:
  std::istringstream in_;
  std::size_t lineno_ = 0;
};

template <class T>
std::vector<T> parse_list(const std::vector<std::string>& tokens, std::size_t expect, const char* what) {
  if (tokens.size() != expect) throw FormatError(fmt::format("{}: expected {} values, got {}", what, expect, tokens.size()));
  std::vector<T> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(parse_number<T>(t, what));
  return out;
}

void write_box_lines(std::string& out, const std::vector<Hyperbox>& boxes) {
  out += fmt::format("count {}\n", boxes.size());
  for (const auto& b : boxes) {
    const char* kind = std::holds_alternative<BoundPair>(b.cat)    ? "pair"
                       : std::holds_alternative<BitStrings>(b.cat) ? "bits"
                                                                  : "none";
    out += fmt::format("box {} {} {} {} {}\n", b.label, b.cardinality, b.creation, b.n(), kind);
    out += "v";
    for (double x : b.v) out += " " + fmt_double(x);
    out += "\nw";
    for (double x : b.w) out += " " + fmt_double(x);
    out += "\n";
    if (const auto* bp = std::get_if<BoundPair>(&b.cat)) {
      out += fmt::format("e {} {}\n", bp->e.size(), fmt::join(bp->e, " "));
      out += fmt::format("f {} {}\n", bp->f.size(), fmt::join(bp->f, " "));
    } else if (const auto* bs = std::get_if<BitStrings>(&b.cat)) {
      out += fmt::format("s {}", bs->s.size());
      for (const auto& bits : bs->s) {
        std::string str;
        boost::to_string(bits, str);
        out += " " + std::to_string(bits.size()) + ":" + str;
      }
      out += "\n";
    }
  }
}

std::vector<Hyperbox> read_box_lines(Reader& r) {
  const auto count = parse_number<std::size_t>(r.line("count").at(0), "count");
  std::vector<Hyperbox> boxes;
  boxes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto head = r.line("box");
    if (head.size() != 5) throw FormatError("box header needs 5 fields");
    Hyperbox b;
    b.label = parse_number<int>(head[0], "label");
    b.cardinality = parse_number<std::uint64_t>(head[1], "cardinality");
    b.creation = parse_number<std::uint64_t>(head[2], "creation");
    const auto n = parse_number<std::size_t>(head[3], "dimension");
    b.v = parse_list<double>(r.line("v"), n, "v");
    b.w = parse_list<double>(r.line("w"), n, "w");
    if (head[4] == "pair") {
      BoundPair bp;
      for (auto* target : {&bp.e, &bp.f}) {
        auto tokens = r.line(target == &bp.e ? "e" : "f");
        if (tokens.empty()) throw FormatError("bound list without length");
        const auto len = parse_number<std::size_t>(tokens.front(), "length");
        tokens.erase(tokens.begin());
        *target = parse_list<int>(tokens, len, "bound");
      }
      b.cat = std::move(bp);
    } else if (head[4] == "bits") {
      auto tokens = r.line("s");
      if (tokens.empty()) throw FormatError("bit-string list without length");
      const auto len = parse_number<std::size_t>(tokens.front(), "length");
      if (tokens.size() != len + 1) throw FormatError("bit-string count mismatch");
      BitStrings bs;
      for (std::size_t j = 1; j < tokens.size(); ++j) {
        const auto colon = tokens[j].find(':');
        if (colon == std::string::npos) throw FormatError("bit string needs '<size>:<bits>'");
        const auto size = parse_number<std::size_t>(tokens[j].substr(0, colon), "bit-string size");
        const auto bits = tokens[j].substr(colon + 1);
        if (bits.size() != size || bits.find_first_not_of("01") != std::string::npos)
          throw FormatError("malformed bit string '" + tokens[j] + "'");
        bs.s.emplace_back(bits);
      }
      b.cat = std::move(bs);
    } else if (head[4] != "none") {
      throw FormatError("unknown categorical payload '" + head[4] + "'");
    }
    boxes.push_back(std::move(b));
  }
  return boxes;
}

void check_header(Reader& r, const char* magic) {
  const auto v = r.line(magic);
  if (v.size() != 1 || parse_number<int>(v[0], "version") != kVersion)
    throw FormatError(fmt::format("unsupported {} version", magic));
}

}  // namespace

std::string write_boxes(const std::vector<Hyperbox>& boxes) {
  std::string out = fmt::format("{} {}\n", kBoxesMagic, kVersion);
  write_box_lines(out, boxes);
  return out;
}

std::vector<Hyperbox> read_boxes(const std::string& text) {
  Reader r(text);
  check_header(r, kBoxesMagic);
  auto boxes = read_box_lines(r);
  if (!r.done()) throw FormatError("trailing content after box list");
  return boxes;
}

std::string write_model(const GfmmModel& model) {
  const auto& c = model.config();
  std::string out = fmt::format("{} {}\n", kModelMagic, kVersion);
  out += fmt::format("algorithm {}\nsimilarity {}\ntheta {}\ngamma {}\nsigma {}\ndims {}\n", to_string(c.algorithm),
                     to_string(c.similarity), fmt_double(c.theta), fmt_double(c.gamma), fmt_double(c.sigma),
                     model.dims());
  write_box_lines(out, model.boxes());
  return out;
}

GfmmModel read_model(const std::string& text) {
  Reader r(text);
  check_header(r, kModelMagic);
  NumericLearnerConfig c;
  c.algorithm = parse_algorithm(r.line("algorithm").at(0));
  c.similarity = parse_similarity(r.line("similarity").at(0));
  c.theta = parse_number<double>(r.line("theta").at(0), "theta");
  c.gamma = parse_number<double>(r.line("gamma").at(0), "gamma");
  c.sigma = parse_number<double>(r.line("sigma").at(0), "sigma");
  const auto dims = parse_number<std::size_t>(r.line("dims").at(0), "dims");
  auto boxes = read_box_lines(r);
  if (!r.done()) throw FormatError("trailing content after model");
  for (const auto& b : boxes)
    if (b.n() != dims) throw FormatError("box dimension does not match model");
  return GfmmModel(c, dims, std::move(boxes));
}

}  // namespace gfmm
