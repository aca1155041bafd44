#include "miqubo/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "miqubo/infotheory.hpp"
#include "miqubo/random.hpp"

namespace miqubo {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::string quote_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

void Dataset::validate() const {
  if (target.size() < 1) throw InputError("dataset has no samples");
  if (feature_names.size() != columns.size())
    throw InputError("dataset: feature name count does not match column count");
  std::unordered_set<std::string> seen;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (feature_names[j].empty()) throw InputError("dataset: empty feature name");
    if (!seen.insert(feature_names[j]).second)
      throw InputError("dataset: duplicate feature name '" + feature_names[j] + "'");
    const std::size_t len = std::visit([](const auto& c) { return c.size(); }, columns[j]);
    if (len != n_samples())
      throw InputError("dataset: column '" + feature_names[j] + "' has wrong length");
  }
}

Dataset parse_csv(std::istream& in, const std::string& target_name, const CsvOptions& options) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("csv: missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);

  const auto target_it = std::find(header.begin(), header.end(), target_name);
  if (target_it == header.end())
    throw InputError("csv: target column '" + target_name + "' not found");
  const auto target_col = static_cast<std::size_t>(target_it - header.begin());

  std::vector<std::vector<std::string>> cells(header.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw InputError("csv: row " + std::to_string(row) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header.size()));
    for (std::size_t j = 0; j < fields.size(); ++j) cells[j].push_back(trim(fields[j]));
  }
  if (row == 0) throw InputError("csv: no data rows");

  auto cell_error = [&](std::size_t r, std::size_t j) {
    return InputError("csv: cannot parse '" + cells[j][r] + "' as a number at row " +
                      std::to_string(r + 1) + ", column '" + header[j] + "'");
  };

  auto parse_numeric = [&](std::size_t j) {
    NumericColumn col(row);
    for (std::size_t r = 0; r < row; ++r)
      if (!parse_real(cells[j][r], col[r])) throw cell_error(r, j);
    return col;
  };

  Dataset d;
  d.target_name = target_name;
  const NumericColumn target = parse_numeric(target_col);
  d.target = Eigen::Map<const Eigen::VectorXd>(target.data(), static_cast<Eigen::Index>(row));

  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j == target_col) continue;
    ColumnKind kind;
    if (auto it = options.schema.find(header[j]); it != options.schema.end()) {
      kind = it->second;
    } else {
      // Numeric when most cells parse; stray text then surfaces as an error.
      std::size_t numeric = 0;
      double scratch;
      for (const auto& c : cells[j]) numeric += parse_real(c, scratch) ? 1 : 0;
      kind = 2 * numeric >= row ? ColumnKind::numeric : ColumnKind::categorical;
    }
    d.feature_names.push_back(header[j]);
    if (kind == ColumnKind::numeric)
      d.columns.emplace_back(parse_numeric(j));
    else
      d.columns.emplace_back(std::move(cells[j]));
  }
  d.validate();
  return d;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& target_name,
                 const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return parse_csv(in, target_name, options);
}

void write_csv(std::ostream& out, const Dataset& d) {
  for (const auto& name : d.feature_names) out << quote_cell(name) << ',';
  out << quote_cell(d.target_name) << '\n';
  for (std::size_t r = 0; r < d.n_samples(); ++r) {
    for (const auto& col : d.columns) {
      if (const auto* num = std::get_if<NumericColumn>(&col))
        out << format_real((*num)[r]);
      else
        out << quote_cell(std::get<CategoricalColumn>(col)[r]);
      out << ',';
    }
    out << format_real(d.target(static_cast<Eigen::Index>(r))) << '\n';
  }
}

EncodedDataset one_hot_encode(const Dataset& d) {
  d.validate();
  EncodedDataset e;
  e.target = d.target;
  e.target_name = d.target_name;
  e.raw_names = d.feature_names;

  const auto n = static_cast<Eigen::Index>(d.n_samples());
  std::vector<Eigen::VectorXd> cols;
  for (std::size_t j = 0; j < d.n_features(); ++j) {
    if (const auto* num = std::get_if<NumericColumn>(&d.columns[j])) {
      cols.emplace_back(Eigen::Map<const Eigen::VectorXd>(num->data(), n));
      e.feature_names.push_back(d.feature_names[j]);
      e.origin.push_back(j);
      continue;
    }
    const auto& cat = std::get<CategoricalColumn>(d.columns[j]);
    const std::set<std::string> values(cat.begin(), cat.end());
    for (const auto& value : values) {
      Eigen::VectorXd indicator(n);
      for (Eigen::Index r = 0; r < n; ++r)
        indicator(r) = cat[static_cast<std::size_t>(r)] == value ? 1.0 : 0.0;
      cols.push_back(std::move(indicator));
      e.feature_names.push_back(d.feature_names[j] + "_" + value);
      e.origin.push_back(j);
    }
  }
  e.matrix.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) e.matrix.col(static_cast<Eigen::Index>(j)) = cols[j];
  return e;
}

EncodedDataset EncodedDataset::select_columns(const std::vector<std::size_t>& columns) const {
  EncodedDataset out;
  out.target = target;
  out.target_name = target_name;
  out.raw_names = raw_names;
  out.matrix.resize(matrix.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] >= static_cast<std::size_t>(matrix.cols()))
      throw std::out_of_range("select_columns: column index out of range");
    out.matrix.col(static_cast<Eigen::Index>(c)) = matrix.col(static_cast<Eigen::Index>(columns[c]));
    out.feature_names.push_back(feature_names[columns[c]]);
    out.origin.push_back(origin[columns[c]]);
  }
  return out;
}

EncodedDataset EncodedDataset::select_rows(const std::vector<std::size_t>& rows) const {
  if (target.size() != matrix.rows()) throw InputError("select_rows: target length differs from row count");
  for (auto r : rows)
    if (r >= static_cast<std::size_t>(matrix.rows())) throw InputError("select_rows: row index out of range");
  EncodedDataset out = *this;
  out.matrix.resize(static_cast<Eigen::Index>(rows.size()), matrix.cols());
  out.target.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = static_cast<Eigen::Index>(rows[r]);
    out.matrix.row(static_cast<Eigen::Index>(r)) = matrix.row(src);
    out.target(static_cast<Eigen::Index>(r)) = target(src);
  }
  return out;
}

int discretize_column(const Eigen::Ref<const Eigen::VectorXd>& column, int bins,
                      Eigen::Ref<Eigen::VectorXi> codes) {
  if (bins < 2) throw InputError("discretize: bins must be >= 2");
  std::vector<double> distinct(column.data(), column.data() + column.size());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  if (distinct.size() <= static_cast<std::size_t>(bins)) {
    for (Eigen::Index r = 0; r < column.size(); ++r) {
      const auto it = std::lower_bound(distinct.begin(), distinct.end(), column(r));
      codes(r) = static_cast<int>(it - distinct.begin());
    }
    return static_cast<int>(std::max<std::size_t>(distinct.size(), 1));
  }

  const double lo = distinct.front();
  const double width = distinct.back() - lo;
  for (Eigen::Index r = 0; r < column.size(); ++r) {
    const double t = (column(r) - lo) / width * bins;
    codes(r) = std::clamp(static_cast<int>(std::ceil(t)) - 1, 0, bins - 1);
  }
  return bins;
}

DiscretizedTable discretize(const EncodedDataset& e, int bins) {
  if (bins < 2) throw InputError("discretize: bins must be >= 2");
  DiscretizedTable t;
  t.codes.resize(e.n_samples(), e.n_features());
  t.bin_counts.resize(static_cast<std::size_t>(e.n_features()));
  for (Eigen::Index j = 0; j < e.n_features(); ++j)
    t.bin_counts[static_cast<std::size_t>(j)] = discretize_column(e.matrix.col(j), bins, t.codes.col(j));
  t.target_codes.resize(e.n_samples());
  t.target_bin_count = discretize_column(e.target, bins, t.target_codes);
  return t;
}

EncodedDataset standardize(const EncodedDataset& e) {
  EncodedDataset out = e;
  out.matrix = standardize_columns(e.matrix);
  return out;
}

ColumnScaler ColumnScaler::fit(const Eigen::MatrixXd& x) {
  ColumnScaler s;
  s.mean = x.colwise().mean();
  s.scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double sd = std::sqrt((x.col(j).array() - s.mean(j)).square().mean());
    s.scale(j) = sd > 0.0 ? 1.0 / sd : 0.0;
  }
  return s;
}

Eigen::MatrixXd ColumnScaler::apply(const Eigen::MatrixXd& x) const {
  return ((x.rowwise() - mean).array().rowwise() * scale.array()).matrix();
}

// ---------------------------------------------------------------------------
// Synthetic data

namespace {

double response(double u) { return std::sin(1.5 * u) + 0.5 * u; }

struct SyntheticDraw {
  Dataset data;
  MiReport report;
};

SyntheticDraw draw_synthetic(const SyntheticProfile& p, double noise_scale) {
  const bool high = p.mi_concentration == MiConcentration::high;
  const auto n = static_cast<std::size_t>(p.n_samples);
  const auto m = static_cast<std::size_t>(p.n_informative);
  Rng rng(derive_seed(p.seed, 0x5157));

  // Informative drivers. High concentration: two dominant drivers and weak
  // tails. Low concentration: a gently decaying weight profile.
  std::vector<double> weights(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (high)
      weights[i] = i < 2 ? 1.0 - 0.1 * static_cast<double>(i) : 0.12 * noise_scale;
    else
      weights[i] = i == 0 ? 1.0 : 0.8 - 0.05 * static_cast<double>(i);
  }

  std::vector<NumericColumn> informative(m, NumericColumn(n));
  for (auto& col : informative)
    for (auto& v : col) v = rng.normal();

  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t r = 0; r < n; ++r)
      y(static_cast<Eigen::Index>(r)) += weights[i] * response(informative[i][r]);

  Dataset d;
  d.target_name = "target";
  for (std::size_t i = 0; i < m; ++i) {
    d.feature_names.push_back("informative_" + std::to_string(i));
    d.columns.emplace_back(informative[i]);
  }

  // Redundant features: noisy copies. Low concentration copies the dominant
  // driver so that MI ranking piles onto one source of information; high
  // concentration copies the weak tail so the top two stay unique.
  for (int t = 0; t < p.n_redundant; ++t) {
    NumericColumn col(n);
    std::size_t source = 0;
    double copy_noise = 0.25;
    if (high) {
      source = m > 2 ? 2 + static_cast<std::size_t>(t) % (m - 2) : 0;
      copy_noise = m > 2 ? 0.5 : 3.0 * noise_scale;
    } else {
      copy_noise = 0.25 * noise_scale;
    }
    for (std::size_t r = 0; r < n; ++r)
      col[r] = m > 0 ? informative[source][r] + copy_noise * rng.normal() : rng.normal();
    d.feature_names.push_back("redundant_" + std::to_string(t));
    d.columns.emplace_back(std::move(col));
  }

  for (int t = 0; t < p.n_noise; ++t) {
    NumericColumn col(n);
    for (auto& v : col) v = rng.normal();
    d.feature_names.push_back("noise_" + std::to_string(t));
    d.columns.emplace_back(std::move(col));
  }

  for (std::size_t c = 0; c < p.categorical_spec.size(); ++c) {
    const auto& spec = p.categorical_spec[c];
    std::vector<double> effect(static_cast<std::size_t>(spec.n_categories), 0.0);
    if (spec.informative)
      for (auto& e : effect) e = (high ? 0.1 * noise_scale : 0.3) * rng.normal();
    CategoricalColumn col(n);
    for (std::size_t r = 0; r < n; ++r) {
      const auto level = rng.below(static_cast<std::uint64_t>(spec.n_categories));
      col[r] = "c" + std::to_string(level);
      y(static_cast<Eigen::Index>(r)) += effect[level];
    }
    d.feature_names.push_back(spec.name.empty() ? "category_" + std::to_string(c) : spec.name);
    d.columns.emplace_back(std::move(col));
  }

  const double target_noise = high ? 0.1 * noise_scale : 0.2;
  for (Eigen::Index r = 0; r < y.size(); ++r) y(r) += target_noise * rng.normal();
  d.target = y;
  d.validate();

  const auto encoded = one_hot_encode(d);
  auto report = mi_report(discretize(encoded, p.check_bins), encoded.feature_names);
  return {std::move(d), std::move(report)};
}

}  // namespace

Dataset generate_synthetic(const SyntheticProfile& p) {
  if (p.n_samples < 10) throw InputError("synthetic profile: n_samples must be >= 10");
  if (p.n_informative < 0 || p.n_redundant < 0 || p.n_noise < 0)
    throw InputError("synthetic profile: feature counts must be non-negative");
  if (p.n_informative < 1) throw InputError("synthetic profile: need n_informative >= 1");
  for (const auto& c : p.categorical_spec)
    if (c.n_categories < 1) throw InputError("synthetic profile: n_categories must be >= 1");

  const bool high = p.mi_concentration == MiConcentration::high;
  double noise_scale = 1.0;
  double closest = high ? 0.0 : 1.0;
  for (int attempt = 0; attempt <= p.max_retries; ++attempt) {
    auto draw = draw_synthetic(p, noise_scale);
    const auto& mi = draw.report.mi;
    const double total = draw.report.total_mi;
    if (high) {
      if (draw.report.concentration >= 0.6) return std::move(draw.data);
      closest = std::max(closest, draw.report.concentration);
      noise_scale *= 0.7;  // shrink the weak tail and target noise
    } else {
      const double max_share = total > 0.0 ? mi.maxCoeff() / total : 1.0;
      if (max_share <= 0.25) return std::move(draw.data);
      closest = std::min(closest, max_share);
      noise_scale *= 1.3;  // decorrelate the redundant copies further
    }
  }
  std::ostringstream msg;
  msg << "synthetic profile: concentration target not reached after retries ("
      << (high ? "best top-2 share " : "best max share ") << closest << (high ? ", need >= 0.6" : ", need <= 0.25")
      << "); each continuous feature adds histogram bias, so use fewer features or more samples";
  throw InputError(msg.str());
}

}  // namespace miqubo
