#include "qmuse/markov.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qmuse/errors.hpp"

namespace qmuse::markov {

namespace {

const std::vector<std::string>& scale_labels()
{
    static const std::vector<std::string> labels = {"C4", "D4", "E4", "F4", "G4", "A4", "B4", "C5"};
    return labels;
}

} // namespace

std::size_t TransitionMatrix::index_of(const std::string& label) const
{
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return i;
    }
    throw std::invalid_argument("unknown note label '" + label + "'");
}

TransitionMatrix rules_chain()
{
    constexpr double third = 1.0 / 3.0;
    return {scale_labels(),
            {
                {0.2, 0.2, 0.2, 0.0, 0.2, 0.0, 0.0, 0.2},
                {third, 0.0, third, 0.0, third, 0.0, 0.0, 0.0},
                {0.0, 0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0},
                {third, 0.0, third, 0.0, third, 0.0, 0.0, 0.0},
                {0.25, 0.0, 0.0, 0.25, 0.25, 0.25, 0.0, 0.0},
                {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0},
                {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0},
                {0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.0},
            }};
}

TransitionMatrix random_walk_chain()
{
    TransitionMatrix m{scale_labels(), std::vector<std::vector<double>>(8, std::vector<double>(8, 0.0))};
    m.rows[0][1] = 1.0;
    m.rows[7][6] = 1.0;
    for (std::size_t i = 1; i < 7; ++i) m.rows[i][i - 1] = m.rows[i][i + 1] = 0.5;
    return m;
}

ValidationReport validate_matrix(const TransitionMatrix& matrix)
{
    ValidationReport report;
    const std::size_t n = matrix.labels.size();
    if (n == 0) report.violations.push_back({0, "matrix has no labels"});
    if (matrix.rows.size() != n) {
        std::ostringstream msg;
        msg << "expected " << n << " rows, found " << matrix.rows.size();
        report.violations.push_back({0, msg.str()});
    }
    for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
        const auto& row = matrix.rows[i];
        if (row.size() != n) {
            report.violations.push_back({i, "row has " + std::to_string(row.size()) + " entries"});
            continue;
        }
        double sum = 0.0;
        bool finite = true;
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (!std::isfinite(row[j])) {
                finite = false;
            } else if (row[j] < 0.0) {
                report.violations.push_back({i, "negative entry in column " + std::to_string(j)});
            }
            sum += row[j];
        }
        if (!finite) {
            report.violations.push_back({i, "non-finite entry"});
        } else if (std::abs(sum - 1.0) > kRowSumTolerance) {
            std::ostringstream msg;
            msg << "row sums to " << sum;
            report.violations.push_back({i, msg.str()});
        }
    }
    return report;
}

std::string next_note(const TransitionMatrix& matrix, const std::string& current, Rng& rng)
{
    const std::size_t i = matrix.index_of(current);
    if (i >= matrix.rows.size() || matrix.rows[i].size() != matrix.labels.size()) {
        throw std::invalid_argument("transition row for '" + current + "' is malformed");
    }
    const auto& row = matrix.rows[i];
    double total = 0.0;
    std::size_t last_support = row.size();
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j] > 0.0) {
            total += row[j];
            last_support = j;
        }
    }
    if (last_support == row.size()) {
        throw DegenerateStateError("no transitions out of '" + current + "'");
    }

    const double u = rng.uniform() * total;
    double cumulative = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j] <= 0.0) continue;
        cumulative += row[j];
        if (u < cumulative) return matrix.labels[j];
    }
    return matrix.labels[last_support];
}

std::vector<std::string> generate(const TransitionMatrix& matrix, const std::string& start,
                                  int length, Rng& rng)
{
    if (length < 1) throw std::invalid_argument("sequence length must be at least 1");
    matrix.index_of(start);
    std::vector<std::string> notes{start};
    notes.reserve(static_cast<std::size_t>(length));
    while (static_cast<int>(notes.size()) < length) notes.push_back(next_note(matrix, notes.back(), rng));
    return notes;
}

} // namespace qmuse::markov
