#pragma once

#include <string>
#include <vector>

#include "qmuse/rng.hpp"

namespace qmuse::markov {

/// Row-stochastic note-transition table: rows[i][j] = P(next = labels[j] | current = labels[i]).
struct TransitionMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;

    /// Index of `label`; throws std::invalid_argument if absent.
    std::size_t index_of(const std::string& label) const;
};

/// Eight-rule melody chain over C4..C5 (the G4 row allows C4, F4, G4, A4).
TransitionMatrix rules_chain();
/// Scale-step random walk over C4..C5; the ends reflect.
TransitionMatrix random_walk_chain();

struct RowViolation {
    std::size_t row = 0;
    std::string reason;
};

struct ValidationReport {
    std::vector<RowViolation> violations;
    bool ok() const { return violations.empty(); }
};

inline constexpr double kRowSumTolerance = 1e-9;

/// Shape, non-negativity and unit row sums; never throws.
ValidationReport validate_matrix(const TransitionMatrix& matrix);

/// Inverse-CDF draw over the current row in label order, one uniform per call.
/// Throws std::invalid_argument for unknown labels and DegenerateStateError
/// for rows without probability mass.
std::string next_note(const TransitionMatrix& matrix, const std::string& current, Rng& rng);

/// `length` labels starting with `start`.
std::vector<std::string> generate(const TransitionMatrix& matrix, const std::string& start,
                                  int length, Rng& rng);

} // namespace qmuse::markov
