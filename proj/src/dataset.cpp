#include "gfmm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "gfmm/errors.hpp"

namespace gfmm {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

std::size_t FeatureSchema::numeric_count() const {
  return static_cast<std::size_t>(
      std::count_if(columns.begin(), columns.end(), [](const Column& c) { return c.kind == FeatureKind::Numeric; }));
}

std::size_t FeatureSchema::categorical_count() const { return columns.size() - numeric_count(); }

std::vector<std::string> FeatureSchema::numeric_names() const {
  std::vector<std::string> out;
  for (const auto& c : columns)
    if (c.kind == FeatureKind::Numeric) out.push_back(c.name);
  return out;
}

std::vector<std::string> FeatureSchema::categorical_names() const {
  std::vector<std::string> out;
  for (const auto& c : columns)
    if (c.kind == FeatureKind::Categorical) out.push_back(c.name);
  return out;
}

const std::vector<std::string>& FeatureSchema::domain(std::size_t categorical_index) const {
  static const std::vector<std::string> empty;
  auto names = categorical_names();
  if (categorical_index >= names.size()) throw SchemaError("categorical index out of range");
  auto it = categorical_domains.find(names[categorical_index]);
  return it == categorical_domains.end() ? empty : it->second;
}

void FeatureSchema::validate() const {
  std::set<std::string> seen;
  for (const auto& c : columns) {
    if (c.name.empty()) throw SchemaError("empty column name");
    if (!seen.insert(c.name).second) throw SchemaError("duplicate column '" + c.name + "'");
    if (c.name == class_column) throw SchemaError("class column '" + c.name + "' listed as a feature");
  }
  if (class_column.empty()) throw SchemaError("schema has no class column");
  for (const auto& [name, dom] : categorical_domains) {
    auto it = std::find_if(columns.begin(), columns.end(), [&](const Column& c) { return c.name == name; });
    if (it == columns.end() || it->kind != FeatureKind::Categorical)
      throw SchemaError("domain given for non-categorical column '" + name + "'");
    if (dom.empty()) throw EmptyDomain("empty domain for '" + name + "'");
    std::set<std::string> uniq(dom.begin(), dom.end());
    if (uniq.size() != dom.size()) throw SchemaError("duplicate value in domain of '" + name + "'");
  }
}

FeatureSchema FeatureSchema::parse(const std::string& text) {
  FeatureSchema schema;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::stringstream ls(t);
    std::string key, name, rest;
    ls >> key >> name;
    std::getline(ls, rest);
    rest = trim(rest);
    if (key == "column") {
      if (rest == "numeric") {
        schema.columns.push_back({name, FeatureKind::Numeric});
      } else if (rest == "categorical") {
        schema.columns.push_back({name, FeatureKind::Categorical});
      } else {
        throw SchemaError(fmt::format("line {}: unknown column kind '{}'", lineno, rest));
      }
    } else if (key == "class") {
      schema.class_column = name;
    } else if (key == "domain") {
      schema.categorical_domains[name] = split_list(rest);
    } else {
      throw SchemaError(fmt::format("line {}: unknown directive '{}'", lineno, key));
    }
  }
  schema.validate();
  return schema;
}

FeatureSchema FeatureSchema::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string FeatureSchema::to_text() const {
  std::string out;
  for (const auto& c : columns)
    out += fmt::format("column {} {}\n", c.name, c.kind == FeatureKind::Numeric ? "numeric" : "categorical");
  out += "class " + class_column + "\n";
  for (const auto& [name, dom] : categorical_domains) out += fmt::format("domain {} {}\n", name, fmt::join(dom, ","));
  return out;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    if (!s.label) throw MissingLabels("sample without label");
    out.push_back(*s.label);
  }
  return out;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.schema = schema;
  out.class_names = class_names;
  out.samples.reserve(indices.size());
  for (auto i : indices) out.samples.push_back(samples.at(i));
  return out;
}

Dataset Dataset::numeric_part() const {
  Dataset out;
  out.class_names = class_names;
  out.schema.class_column = schema.class_column;
  for (const auto& c : schema.columns)
    if (c.kind == FeatureKind::Numeric) out.schema.columns.push_back(c);
  out.samples.reserve(samples.size());
  for (const auto& s : samples) out.samples.push_back({s.lower, s.upper, {}, s.label});
  return out;
}

Dataset Dataset::categorical_part() const {
  Dataset out;
  out.class_names = class_names;
  out.schema.class_column = schema.class_column;
  out.schema.categorical_domains = schema.categorical_domains;
  for (const auto& c : schema.columns)
    if (c.kind == FeatureKind::Categorical) out.schema.columns.push_back(c);
  out.samples.reserve(samples.size());
  for (const auto& s : samples) out.samples.push_back({{}, {}, s.categorical, s.label});
  return out;
}

Dataset parse_csv(const std::string& text, const FeatureSchema& schema_in, Phase phase, const std::string& origin) {
  FeatureSchema schema = schema_in;
  schema.validate();
  std::stringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw MissingColumn(origin + ": empty file, no header row");
  auto header = split_csv_line(line);
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < header.size(); ++i) pos[header[i]] = i;

  auto find = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = pos.find(name);
    if (it == pos.end()) return std::nullopt;
    return it->second;
  };

  struct NumericSource {
    std::string name;
    std::size_t lo, hi;
  };
  std::vector<NumericSource> numeric;
  std::vector<std::pair<std::string, std::size_t>> categorical;
  for (const auto& c : schema.columns) {
    if (c.kind == FeatureKind::Numeric) {
      if (auto p = find(c.name)) {
        numeric.push_back({c.name, *p, *p});
      } else {
        auto lo = find(c.name + ".lo");
        auto hi = find(c.name + ".hi");
        if (!lo || !hi) throw MissingColumn(origin + ": missing column '" + c.name + "'");
        numeric.push_back({c.name, *lo, *hi});
      }
    } else {
      auto p = find(c.name);
      if (!p) throw MissingColumn(origin + ": missing column '" + c.name + "'");
      categorical.emplace_back(c.name, *p);
    }
  }
  auto class_pos = find(schema.class_column);
  if (!class_pos) throw MissingColumn(origin + ": missing class column '" + schema.class_column + "'");

  // Domains not declared in the schema are inferred from this file.
  std::vector<bool> inferred(categorical.size());
  std::vector<std::unordered_map<std::string, int>> lookup(categorical.size());
  for (std::size_t j = 0; j < categorical.size(); ++j) {
    auto& dom = schema.categorical_domains[categorical[j].first];
    inferred[j] = dom.empty();
    for (std::size_t v = 0; v < dom.size(); ++v) lookup[j][dom[v]] = static_cast<int>(v);
  }

  Dataset data;
  std::unordered_map<std::string, int> class_ids;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ArityMismatch(fmt::format("{}: row {} has {} cells, header has {}", origin, row, cells.size(), header.size()));
    MixedSample s;
    for (const auto& src : numeric) {
      double lo = 0, hi = 0;
      if (!parse_double(cells[src.lo], lo) || !parse_double(cells[src.hi], hi))
        throw NumericParseError(fmt::format("{}: row {}, column '{}': cannot parse number", origin, row, src.name));
      if (lo > hi)
        throw NumericParseError(fmt::format("{}: row {}, column '{}': lower bound exceeds upper", origin, row, src.name));
      s.lower.push_back(lo);
      s.upper.push_back(hi);
    }
    for (std::size_t j = 0; j < categorical.size(); ++j) {
      const auto& value = cells[categorical[j].second];
      if (value.empty())
        throw ArityMismatch(fmt::format("{}: row {}, column '{}': missing value", origin, row, categorical[j].first));
      auto it = lookup[j].find(value);
      if (it != lookup[j].end()) {
        s.categorical.push_back(it->second);
      } else if (inferred[j]) {
        auto& dom = schema.categorical_domains[categorical[j].first];
        int code = static_cast<int>(dom.size());
        dom.push_back(value);
        lookup[j][value] = code;
        s.categorical.push_back(code);
      } else if (phase == Phase::Test) {
        s.categorical.push_back(kUnseen);
      } else {
        throw UnknownCategory(
            fmt::format("{}: row {}, column '{}': value '{}' not in domain", origin, row, categorical[j].first, value));
      }
    }
    const auto& cls = cells[*class_pos];
    auto [it, inserted] = class_ids.try_emplace(cls, static_cast<int>(data.class_names.size()));
    if (inserted) data.class_names.push_back(cls);
    s.label = it->second;
    data.samples.push_back(std::move(s));
  }
  data.schema = std::move(schema);
  return data;
}

Dataset load_csv(const std::string& path, const FeatureSchema& schema, Phase phase) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), schema, phase, path);
}

Normalizer Normalizer::fit(const Dataset& train) {
  Normalizer norm;
  const std::size_t n = train.n();
  norm.min_.assign(n, std::numeric_limits<double>::infinity());
  norm.max_.assign(n, -std::numeric_limits<double>::infinity());
  for (const auto& s : train.samples) {
    for (std::size_t j = 0; j < n; ++j) {
      norm.min_[j] = std::min({norm.min_[j], s.lower[j], s.upper[j]});
      norm.max_[j] = std::max({norm.max_[j], s.lower[j], s.upper[j]});
    }
  }
  if (train.samples.empty()) {
    norm.min_.assign(n, 0.0);
    norm.max_.assign(n, 0.0);
  }
  return norm;
}

double Normalizer::transform_value(std::size_t j, double value) const {
  double range = max_[j] - min_[j];
  if (!(range > 0)) return 0.0;
  return std::clamp((value - min_[j]) / range, 0.0, 1.0);
}

double Normalizer::inverse_value(std::size_t j, double value) const {
  double range = max_[j] - min_[j];
  if (!(range > 0)) return min_[j];
  return min_[j] + value * range;
}

Dataset Normalizer::transform(const Dataset& data) const {
  if (data.n() != min_.size()) throw DimensionMismatch("normalizer arity does not match dataset");
  Dataset out = data;
  for (auto& s : out.samples) {
    for (std::size_t j = 0; j < min_.size(); ++j) {
      s.lower[j] = transform_value(j, s.lower[j]);
      s.upper[j] = transform_value(j, s.upper[j]);
    }
  }
  return out;
}

std::vector<Split> kfold_splits(const std::vector<int>& labels, std::size_t k, std::size_t repeats,
                                std::uint64_t seed) {
  if (k < 2) throw TooFewSamples("k must be at least 2");
  if (labels.size() < k) throw TooFewSamples(fmt::format("{} samples cannot form {} folds", labels.size(), k));
  std::map<int, std::size_t> counts;
  for (int c : labels) ++counts[c];
  bool stratified = std::all_of(counts.begin(), counts.end(), [&](const auto& kv) { return kv.second >= k; });

  std::vector<Split> out;
  for (std::size_t rep = 0; rep < repeats; ++rep) {
    std::mt19937_64 rng(seed * 1000003ULL + rep);
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    if (stratified) {
      // Deal the shuffled indices class by class so each fold receives a
      // near-equal share of every class.
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
    }
    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t i = 0; i < order.size(); ++i) folds[i % k].push_back(order[i]);
    for (std::size_t f = 0; f < k; ++f) {
      Split sp;
      sp.repeat = rep;
      sp.fold = f;
      sp.test = folds[f];
      for (std::size_t g = 0; g < k; ++g)
        if (g != f) sp.train.insert(sp.train.end(), folds[g].begin(), folds[g].end());
      std::sort(sp.train.begin(), sp.train.end());
      std::sort(sp.test.begin(), sp.test.end());
      out.push_back(std::move(sp));
    }
  }
  return out;
}

std::vector<Split> kfold_splits(const Dataset& data, std::size_t k, std::size_t repeats, std::uint64_t seed) {
  return kfold_splits(data.labels(), k, repeats, seed);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_halves(const std::vector<int>& labels,
                                                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < order.size(); ++i) (i % 2 == 0 ? out.first : out.second).push_back(order[i]);
  std::sort(out.first.begin(), out.first.end());
  std::sort(out.second.begin(), out.second.end());
  return out;
}

std::pair<Dataset, Dataset> generate_synthetic(SyntheticVariant variant, std::uint64_t seed,
                                               const SyntheticLayout& layout) {
  static const char* kNames[] = {"One", "Two", "Three", "Four", "Five", "Six", "Seven", "Eight", "Nine", "Ten"};
  const std::size_t domain_size = variant == SyntheticVariant::One ? 2 : 10;

  FeatureSchema schema;
  schema.columns = {{"x1", FeatureKind::Numeric}, {"x2", FeatureKind::Numeric}, {"x3", FeatureKind::Categorical}};
  schema.class_column = "class";
  schema.categorical_domains["x3"] = std::vector<std::string>(kNames, kNames + domain_size);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, layout.stddev);
  std::uniform_int_distribution<int> component(0, 1);
  std::uniform_int_distribution<int> category(0, static_cast<int>(domain_size) - 1);

  auto draw = [&](std::size_t per_class) {
    Dataset d;
    d.schema = schema;
    d.class_names = {"0", "1"};
    for (int cls = 0; cls < 2; ++cls) {
      const auto& means = cls == 0 ? layout.class0_means : layout.class1_means;
      for (std::size_t i = 0; i < per_class; ++i) {
        const auto& m = means[static_cast<std::size_t>(component(rng))];
        double x1 = m.first + noise(rng);
        double x2 = m.second + noise(rng);
        MixedSample s{{x1, x2}, {x1, x2}, {category(rng)}, cls};
        d.samples.push_back(std::move(s));
      }
    }
    if (layout.shuffle) std::shuffle(d.samples.begin(), d.samples.end(), rng);
    return d;
  };
  Dataset train = draw(layout.train_per_class);
  Dataset test = draw(layout.test_per_class);
  return {std::move(train), std::move(test)};
}

}  // namespace gfmm
