#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace csonbr {

enum class AttributeKind { Numeric, Categorical };

struct AttributeSchema {
    std::string name;
    AttributeKind kind = AttributeKind::Numeric;
    std::vector<std::string> categories;  // Categorical only, in index order
    bool is_target = false;

    bool categorical() const noexcept { return kind == AttributeKind::Categorical; }
    std::size_t category_count() const noexcept { return categories.size(); }

    friend bool operator==(const AttributeSchema&, const AttributeSchema&) = default;
};

using Schema = std::vector<AttributeSchema>;

/// Checks the schema invariants (one numeric target, valid category lists).
/// Throws std::invalid_argument on violation.
void validate_schema(const Schema& schema);

/// Index of the target attribute in a validated schema.
std::size_t target_index(const Schema& schema);

/// Error raised by the CSV/ARFF readers. `line()` is 1-based; 0 when the
/// failure is not tied to a particular line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Tabular data with a typed schema.
///
/// Cells are stored row-major as doubles: numeric values directly,
/// categorical values as their category index, missing cells as NaN.
/// Instances are not mutated after construction by any library routine,
/// so a const Dataset can be shared between threads.
class Dataset {
public:
    Dataset() = default;
    /// Takes ownership of row-major cells; cells.size() must be a multiple of
    /// the schema width and categorical cells must be valid indices or NaN.
    Dataset(Schema schema, std::vector<double> cells);

    const Schema& schema() const noexcept { return schema_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return schema_.size(); }
    std::size_t target() const noexcept { return target_; }

    double at(std::size_t row, std::size_t col) const { return cells_[row * cols() + col]; }
    bool missing(std::size_t row, std::size_t col) const { return is_missing(at(row, col)); }
    std::span<const double> row(std::size_t r) const { return {cells_.data() + r * cols(), cols()}; }
    std::span<const double> cells() const noexcept { return cells_; }

    std::vector<double> column(std::size_t col) const;
    std::vector<double> target_values() const { return column(target_); }

    /// New dataset holding the given rows (in the given order).
    Dataset select_rows(std::span<const std::size_t> indices) const;

    static constexpr double missing_value() noexcept { return std::numeric_limits<double>::quiet_NaN(); }
    static bool is_missing(double v) noexcept { return v != v; }

    friend bool operator==(const Dataset& a, const Dataset& b);

private:
    Schema schema_;
    std::vector<double> cells_;
    std::size_t rows_ = 0;
    std::size_t target_ = 0;
};

enum class FileFormat { Csv, Arff };

/// Target column, by name or by zero-based column index. A name that matches
/// no column but parses as an index is used as an index; an empty name selects
/// the last column.
using TargetRef = std::variant<std::string, std::size_t>;

/// Loads a CSV (header line, comma separated, empty cell = missing) or an
/// ARFF file (numeric and nominal attributes, '?' = missing).
/// CSV columns are categorical iff any non-missing cell fails to parse as a
/// number; categories are numbered in order of first appearance.
Dataset load_dataset(const std::filesystem::path& path, FileFormat format, const TargetRef& target);

Dataset parse_csv(std::string_view text, const TargetRef& target);
Dataset parse_arff(std::string_view text, const TargetRef& target);

/// Writes a CSV with a header line; categorical cells are written as labels,
/// missing cells as empty fields.
void write_csv(const Dataset& ds, const std::filesystem::path& path);
std::string to_csv(const Dataset& ds);

/// Mean imputation for numeric columns, mode imputation for categorical ones
/// (ties go to the lowest category index). Rows with a missing target are
/// dropped first. Throws std::invalid_argument naming any all-missing column.
Dataset impute(const Dataset& ds);

/// Seeded train/test split. The first ceil(train_fraction * rows) rows of the
/// (optionally shuffled) row order form the training part.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed, bool shuffle);

/// Row indices used by split(), exposed so callers can record the partition.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t rows, double train_fraction,
                                                                            std::uint64_t seed, bool shuffle);

struct ColumnStats {
    AttributeKind kind = AttributeKind::Numeric;
    std::size_t present = 0;  // non-missing cells
    // Numeric columns.
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double stddev = 0.0;  // sample (n - 1) standard deviation, 0 when present < 2
    // Categorical columns.
    std::vector<std::size_t> counts;
    std::size_t mode = 0;
};

using AttributeStats = std::vector<ColumnStats>;

/// Per-column statistics over non-missing cells.
AttributeStats stats(const Dataset& ds);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_stddev(std::span<const double> values);

}  // namespace csonbr
