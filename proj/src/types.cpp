#include "sslearn/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace sslearn {

std::vector<std::string> StatePartition::all_names() const {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(n_vars()));
    out.insert(out.end(), exo_states.begin(), exo_states.end());
    out.insert(out.end(), endo_states.begin(), endo_states.end());
    out.insert(out.end(), controls.begin(), controls.end());
    return out;
}

std::string StatePartition::canonical_encoding() const {
    auto sorted = [](std::vector<std::string> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    std::ostringstream os;
    bool first = true;
    for (const auto& n : sorted(exo_states)) {
        if (!first) os << ',';
        os << n;
        first = false;
    }
    os << '|';
    first = true;
    for (const auto& n : sorted(endo_states)) {
        if (!first) os << ',';
        os << n;
        first = false;
    }
    return os.str();
}

void StatePartition::validate() const {
    std::set<std::string> seen;
    for (const auto* block : {&exo_states, &endo_states, &controls}) {
        for (const auto& name : *block) {
            if (!seen.insert(name).second)
                throw ConfigError("partition blocks are not disjoint: duplicate name '" + name + "'");
        }
    }
    if (n_states() == 0)
        throw ConfigError("partition has no state variables");
    // The k - 2 cap on states applies to search candidates (max_states),
    // not to the type itself; hand-built partitions may use any split.
}

void StateSpaceParams::validate() const {
    partition.validate();
    const auto y = partition.n_controls(), x = partition.n_endo(), z = partition.n_exo();
    auto check_dims = [](const Matrix& m, int r, int c, const char* label) {
        if (m.rows() != r || m.cols() != c)
            throw ConfigError(std::string("matrix ") + label + " has inconsistent dimensions");
    };
    check_dims(A, y, x, "A");
    check_dims(B, y, z, "B");
    check_dims(C, x, x, "C");
    check_dims(D, x, z, "D");
    if (E_diag.size() != z) throw ConfigError("E diagonal has wrong length");
    if (sigma2_controls.size() != y || sigma2_endo.size() != x || sigma2_exo.size() != z)
        throw ConfigError("shock variance vectors have wrong lengths");

    for (int i = 0; i < z; ++i) {
        if (std::abs(E_diag[i]) >= 1.0)
            throw ConfigError("exogenous AR coefficient |e_ii| >= 1 for '" + partition.exo_states[static_cast<std::size_t>(i)] + "'");
        if (!(sigma2_exo[i] > 0.0))
            throw ConfigError("exogenous shock variance must be strictly positive");
    }
    for (int i = 0; i < x; ++i)
        if (!(sigma2_endo[i] >= 0.0)) throw ConfigError("negative endogenous shock variance");
    for (int i = 0; i < y; ++i)
        if (!(sigma2_controls[i] >= 0.0)) throw ConfigError("negative control shock variance");
}

double StateSpaceParams::exo_spectral_radius() const {
    double r = 0.0;
    for (int i = 0; i < E_diag.size(); ++i) r = std::max(r, std::abs(E_diag[i]));
    return r;
}

double StateSpaceParams::endo_spectral_radius() const {
    if (C.rows() == 0) return 0.0;
    return C.eigenvalues().cwiseAbs().maxCoeff();
}

int TimeSeriesFrame::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    throw DataError("unknown variable name '" + name + "'");
}

void TimeSeriesFrame::validate() const {
    if (static_cast<int>(names.size()) != cols())
        throw DataError("name list does not match column count");
    std::set<std::string> seen(names.begin(), names.end());
    if (seen.size() != names.size()) throw DataError("duplicate variable names");
    if (rows() < 4) throw DataError("frame needs at least 4 rows");
    if (!values.allFinite()) throw DataError("frame contains non-finite entries");
}

}  // namespace sslearn
