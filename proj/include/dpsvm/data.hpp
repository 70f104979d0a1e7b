#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace dpsvm {

/// A labeled point. Labels are exactly -1 or +1.
struct Example {
    std::vector<double> x;
    int y = 1;

    friend bool operator==(const Example&, const Example&) = default;
};

/// Ordered training set of n > 1 examples sharing one dimension.
///
/// Neighboring databases differ in their last entry only; other positions are
/// reached by rotating the database first (see rotated()).
class Database {
public:
    /// Validates labels, finiteness, common dimension and n > 1.
    explicit Database(std::vector<Example> entries);

    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] const Example& operator[](std::size_t i) const { return entries_[i]; }
    [[nodiscard]] const std::vector<Example>& entries() const noexcept { return entries_; }
    [[nodiscard]] auto begin() const noexcept { return entries_.begin(); }
    [[nodiscard]] auto end() const noexcept { return entries_.end(); }

    /// Database whose last entry is the current entry `index`; order of the
    /// remaining entries is preserved cyclically.
    [[nodiscard]] Database rotated(std::size_t index) const;

    friend bool operator==(const Database&, const Database&) = default;

private:
    std::vector<Example> entries_;
    std::size_t dim_ = 0;
};

/// Axis-aligned box M containing the data.
struct DomainBox {
    std::vector<double> lower;
    std::vector<double> upper;

    DomainBox() = default;
    DomainBox(std::vector<double> lower, std::vector<double> upper);

    /// Symmetric cube [-half_width, half_width]^dim.
    static DomainBox cube(std::size_t dim, double half_width);

    [[nodiscard]] std::size_t dim() const noexcept { return lower.size(); }
    [[nodiscard]] double diameter() const;
    /// max ||x||_2 over the box (attained at a corner).
    [[nodiscard]] double max_norm() const;
    /// max |x_i| over the box and coordinates.
    [[nodiscard]] double max_abs_coordinate() const;
    [[nodiscard]] bool contains(std::span<const double> x) const;
};

/// Parses `d` reals followed by a label per row. Labels "1", "+1", "-1".
/// Accepts LF or CRLF line endings; blank lines are skipped.
[[nodiscard]] Database load_csv(std::istream& in, bool has_header = false);

/// Feature rows only, no label column and no n > 1 requirement. When
/// `labeled` is set the final column is parsed as a label and dropped.
[[nodiscard]] std::vector<std::vector<double>> load_csv_points(std::istream& in, bool has_header,
                                                               bool labeled);

/// Writes rows with 17 significant digits so that load_csv reproduces every
/// value bit for bit.
void write_csv(std::ostream& out, const Database& db);

/// Copy of `db` with entry n replaced by `replacement`.
[[nodiscard]] Database neighbor_replace_last(const Database& db, const Example& replacement);

/// Smallest box containing all points, grown by `margin` on each side.
[[nodiscard]] DomainBox bounding_box(const Database& db, double margin = 0.0);

}  // namespace dpsvm
