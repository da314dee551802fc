#include "csonbr/tabular.hpp"

#include "csonbr/rng.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace csonbr {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool parse_number(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

std::string unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
        std::string out;
        const char q = s.front();
        for (std::size_t i = 1; i + 1 < s.size(); ++i) {
            if (s[i] == '\\' && i + 2 < s.size()) {
                out.push_back(s[++i]);
            } else if (s[i] == q && q == '"' && i + 2 < s.size() && s[i + 1] == '"') {
                out.push_back('"');
                ++i;
            } else {
                out.push_back(s[i]);
            }
        }
        return out;
    }
    return std::string(s);
}

// Splits on commas outside single or double quotes. Fields keep their quotes.
std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    char quote = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quote) {
            if (c == '\\') {
                ++i;
            } else if (c == quote) {
                quote = 0;
            }
        } else if (c == '\'' || c == '"') {
            quote = c;
        } else if (c == ',') {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    fields.push_back(line.substr(start));
    return fields;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

std::size_t resolve_target(const std::vector<std::string>& names, const TargetRef& target) {
    if (const auto* index = std::get_if<std::size_t>(&target)) {
        if (*index >= names.size())
            throw std::invalid_argument("target column index " + std::to_string(*index) + " out of range");
        return *index;
    }
    const auto& name = std::get<std::string>(target);
    if (name.empty()) return names.size() - 1;
    if (const auto it = std::find(names.begin(), names.end(), name); it != names.end())
        return static_cast<std::size_t>(it - names.begin());
    std::size_t index = 0;
    const auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), index);
    if (ec == std::errc{} && ptr == name.data() + name.size() && index < names.size()) return index;
    throw std::invalid_argument("unknown target column '" + name + "'");
}

void mark_target(Schema& schema, std::size_t target) {
    if (schema[target].categorical())
        throw std::invalid_argument("target column '" + schema[target].name + "' is categorical");
    schema[target].is_target = true;
}

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"'\n") == std::string::npos && !s.empty()) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

void validate_schema(const Schema& schema) {
    std::size_t targets = 0;
    for (const auto& a : schema) {
        if (a.is_target) {
            ++targets;
            if (a.categorical()) throw std::invalid_argument("target attribute '" + a.name + "' must be numeric");
        }
        if (a.categorical()) {
            if (a.categories.empty())
                throw std::invalid_argument("categorical attribute '" + a.name + "' has no categories");
            auto sorted = a.categories;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                throw std::invalid_argument("categorical attribute '" + a.name + "' has duplicate categories");
        } else if (!a.categories.empty()) {
            throw std::invalid_argument("numeric attribute '" + a.name + "' lists categories");
        }
    }
    if (targets != 1) throw std::invalid_argument("schema must have exactly one target attribute");
}

std::size_t target_index(const Schema& schema) {
    for (std::size_t i = 0; i < schema.size(); ++i)
        if (schema[i].is_target) return i;
    throw std::invalid_argument("schema has no target attribute");
}

Dataset::Dataset(Schema schema, std::vector<double> cells) : schema_(std::move(schema)), cells_(std::move(cells)) {
    validate_schema(schema_);
    target_ = target_index(schema_);
    const std::size_t d = schema_.size();
    if (cells_.size() % d != 0) throw std::invalid_argument("cell count is not a multiple of the schema width");
    rows_ = cells_.size() / d;
    for (std::size_t c = 0; c < d; ++c) {
        if (!schema_[c].categorical()) continue;
        const auto k = static_cast<double>(schema_[c].category_count());
        for (std::size_t r = 0; r < rows_; ++r) {
            const double v = cells_[r * d + c];
            if (is_missing(v)) continue;
            if (v < 0 || v >= k || v != std::floor(v))
                throw std::invalid_argument("invalid category index in column '" + schema_[c].name + "'");
        }
    }
}

std::vector<double> Dataset::column(std::size_t col) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, col);
    return out;
}

Dataset Dataset::select_rows(std::span<const std::size_t> indices) const {
    std::vector<double> cells;
    cells.reserve(indices.size() * cols());
    for (std::size_t r : indices) {
        const auto src = row(r);
        cells.insert(cells.end(), src.begin(), src.end());
    }
    return Dataset(schema_, std::move(cells));
}

bool operator==(const Dataset& a, const Dataset& b) {
    if (a.schema_ != b.schema_ || a.cells_.size() != b.cells_.size()) return false;
    for (std::size_t i = 0; i < a.cells_.size(); ++i) {
        const double x = a.cells_[i];
        const double y = b.cells_[i];
        if (Dataset::is_missing(x) != Dataset::is_missing(y)) return false;
        if (!Dataset::is_missing(x) && x != y) return false;
    }
    return true;
}

Dataset parse_csv(std::string_view text, const TargetRef& target) {
    const auto lines = split_lines(text);
    std::size_t header_line = 0;
    while (header_line < lines.size() && trim(lines[header_line]).empty()) ++header_line;
    if (header_line == lines.size()) throw ParseError("empty CSV input", 0);

    std::vector<std::string> names;
    for (auto f : split_fields(lines[header_line])) names.push_back(unquote(f));
    const std::size_t d = names.size();

    // First pass: raw fields per row, remembering source line numbers.
    std::vector<std::vector<std::string>> raw;
    for (std::size_t i = header_line + 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const auto fields = split_fields(lines[i]);
        if (fields.size() != d)
            throw ParseError("expected " + std::to_string(d) + " fields, found " + std::to_string(fields.size()), i + 1);
        auto& row = raw.emplace_back();
        for (auto f : fields) row.push_back(unquote(f));
    }
    if (raw.empty()) throw ParseError("CSV has no data rows", 0);

    Schema schema(d);
    std::vector<double> cells(raw.size() * d);
    for (std::size_t c = 0; c < d; ++c) {
        schema[c].name = names[c];
        bool numeric = true;
        for (const auto& row : raw) {
            const auto cell = trim(row[c]);
            double v;
            if (!cell.empty() && cell != "?" && !parse_number(cell, v)) {
                numeric = false;
                break;
            }
        }
        schema[c].kind = numeric ? AttributeKind::Numeric : AttributeKind::Categorical;
        std::unordered_map<std::string, std::size_t> index;
        for (std::size_t r = 0; r < raw.size(); ++r) {
            const std::string cell(trim(raw[r][c]));
            double& out = cells[r * d + c];
            if (cell.empty() || cell == "?") {
                out = Dataset::missing_value();
            } else if (numeric) {
                parse_number(cell, out);
            } else {
                auto [it, inserted] = index.try_emplace(cell, schema[c].categories.size());
                if (inserted) schema[c].categories.push_back(cell);
                out = static_cast<double>(it->second);
            }
        }
    }
    mark_target(schema, resolve_target(names, target));
    return Dataset(std::move(schema), std::move(cells));
}

Dataset parse_arff(std::string_view text, const TargetRef& target) {
    const auto lines = split_lines(text);
    Schema schema;
    std::vector<double> cells;
    bool in_data = false;

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const auto line = trim(lines[i]);
        if (line.empty() || line.front() == '%') continue;

        if (!in_data) {
            if (line.front() != '@') throw ParseError("expected a declaration", line_no);
            const auto space = line.find_first_of(" \t");
            const std::string keyword = lower(line.substr(0, space));
            const auto rest = space == std::string_view::npos ? std::string_view{} : trim(line.substr(space));
            if (keyword == "@relation") continue;
            if (keyword == "@data") {
                if (schema.empty()) throw ParseError("@data before any @attribute", line_no);
                in_data = true;
                continue;
            }
            if (keyword != "@attribute") throw ParseError("unknown declaration '" + std::string(keyword) + "'", line_no);

            // Attribute name: quoted or up to the next whitespace.
            std::size_t name_end = 0;
            if (!rest.empty() && (rest.front() == '\'' || rest.front() == '"')) {
                name_end = rest.find(rest.front(), 1);
                if (name_end == std::string_view::npos) throw ParseError("unterminated attribute name", line_no);
                ++name_end;
            } else {
                name_end = rest.find_first_of(" \t{");
                if (name_end == std::string_view::npos) throw ParseError("attribute without a type", line_no);
            }
            AttributeSchema attr;
            attr.name = unquote(rest.substr(0, name_end));
            const auto type = trim(rest.substr(name_end));
            if (type.empty()) throw ParseError("attribute without a type", line_no);
            if (type.front() == '{') {
                if (type.back() != '}') throw ParseError("unterminated nominal value list", line_no);
                attr.kind = AttributeKind::Categorical;
                for (auto f : split_fields(type.substr(1, type.size() - 2))) {
                    auto label = unquote(f);
                    if (label.empty()) continue;
                    if (std::find(attr.categories.begin(), attr.categories.end(), label) != attr.categories.end())
                        throw ParseError("duplicate nominal value '" + label + "'", line_no);
                    attr.categories.push_back(std::move(label));
                }
                if (attr.categories.empty()) throw ParseError("empty nominal value list", line_no);
            } else {
                const std::string t = lower(type);
                if (t == "numeric" || t == "real" || t == "integer") {
                    attr.kind = AttributeKind::Numeric;
                } else {
                    throw ParseError("unsupported attribute type '" + std::string(type) + "'", line_no);
                }
            }
            schema.push_back(std::move(attr));
            continue;
        }

        if (line.front() == '{') throw ParseError("sparse ARFF rows are not supported", line_no);
        const auto fields = split_fields(line);
        if (fields.size() != schema.size())
            throw ParseError("expected " + std::to_string(schema.size()) + " values, found " +
                                 std::to_string(fields.size()),
                             line_no);
        for (std::size_t c = 0; c < schema.size(); ++c) {
            const std::string value = unquote(fields[c]);
            if (value == "?") {
                cells.push_back(Dataset::missing_value());
            } else if (schema[c].categorical()) {
                const auto& cats = schema[c].categories;
                const auto it = std::find(cats.begin(), cats.end(), value);
                if (it == cats.end())
                    throw ParseError("value '" + value + "' not declared for attribute '" + schema[c].name + "'",
                                     line_no);
                cells.push_back(static_cast<double>(it - cats.begin()));
            } else {
                double v;
                if (!parse_number(value, v))
                    throw ParseError("invalid numeric value '" + value + "' for attribute '" + schema[c].name + "'",
                                     line_no);
                cells.push_back(v);
            }
        }
    }
    if (!in_data) throw ParseError("missing @data section", 0);
    if (cells.empty()) throw ParseError("ARFF has no data rows", 0);

    std::vector<std::string> names;
    for (const auto& a : schema) names.push_back(a.name);
    mark_target(schema, resolve_target(names, target));
    return Dataset(std::move(schema), std::move(cells));
}

Dataset load_dataset(const std::filesystem::path& path, FileFormat format, const TargetRef& target) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return format == FileFormat::Csv ? parse_csv(buf.str(), target) : parse_arff(buf.str(), target);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line());
    }
}

std::string to_csv(const Dataset& ds) {
    std::string out;
    const auto& schema = ds.schema();
    for (std::size_t c = 0; c < ds.cols(); ++c) {
        if (c) out.push_back(',');
        out += csv_escape(schema[c].name);
    }
    out.push_back('\n');
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        for (std::size_t c = 0; c < ds.cols(); ++c) {
            if (c) out.push_back(',');
            const double v = ds.at(r, c);
            if (Dataset::is_missing(v)) continue;
            if (schema[c].categorical())
                out += csv_escape(schema[c].categories[static_cast<std::size_t>(v)]);
            else
                out += format_number(v);
        }
        out.push_back('\n');
    }
    return out;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << to_csv(ds);
}

Dataset impute(const Dataset& ds) {
    const std::size_t d = ds.cols();
    const std::size_t t = ds.target();

    std::vector<std::size_t> kept;
    for (std::size_t r = 0; r < ds.rows(); ++r)
        if (!ds.missing(r, t)) kept.push_back(r);

    if (kept.empty()) throw std::invalid_argument("column '" + ds.schema()[t].name + "' has no values");
    const Dataset labelled = ds.select_rows(kept);
    const auto column_stats = stats(labelled);
    for (std::size_t c = 0; c < d; ++c)
        if (column_stats[c].present == 0)
            throw std::invalid_argument("column '" + ds.schema()[c].name + "' has no values");

    std::vector<double> cells;
    cells.reserve(kept.size() * d);
    for (std::size_t r = 0; r < labelled.rows(); ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            double v = labelled.at(r, c);
            if (Dataset::is_missing(v)) {
                const auto& s = column_stats[c];
                v = s.kind == AttributeKind::Categorical ? static_cast<double>(s.mode) : s.mean;
            }
            cells.push_back(v);
        }
    }
    return Dataset(ds.schema(), std::move(cells));
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t rows, double train_fraction,
                                                                            std::uint64_t seed, bool shuffle) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("train fraction must lie strictly between 0 and 1");
    std::vector<std::size_t> order(rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (shuffle) {
        Rng rng(seed);
        for (std::size_t i = rows; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    }
    // The small slack keeps e.g. 0.66 * 100 from rounding up to 67.
    const auto n_train = static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(rows) - 1e-9));
    if (n_train == 0 || n_train >= rows) throw std::invalid_argument("split leaves the train or test part empty");
    return {std::vector<std::size_t>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train)),
            std::vector<std::size_t>(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end())};
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed, bool shuffle) {
    const auto [train, test] = split_indices(ds.rows(), train_fraction, seed, shuffle);
    return {ds.select_rows(train), ds.select_rows(test)};
}

double sample_stddev(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

AttributeStats stats(const Dataset& ds) {
    AttributeStats out(ds.cols());
    for (std::size_t c = 0; c < ds.cols(); ++c) {
        auto& s = out[c];
        const auto& attr = ds.schema()[c];
        s.kind = attr.kind;
        std::vector<double> values;
        for (std::size_t r = 0; r < ds.rows(); ++r)
            if (!ds.missing(r, c)) values.push_back(ds.at(r, c));
        s.present = values.size();
        if (attr.categorical()) {
            s.counts.assign(attr.category_count(), 0);
            for (double v : values) ++s.counts[static_cast<std::size_t>(v)];
            s.mode = static_cast<std::size_t>(std::max_element(s.counts.begin(), s.counts.end()) - s.counts.begin());
        } else if (!values.empty()) {
            const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
            s.min = *lo;
            s.max = *hi;
            s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
            s.stddev = sample_stddev(values);
        }
    }
    return out;
}

}  // namespace csonbr
