#pragma once

#include <filesystem>
#include <string>

#include "mfg/diagnostics.hpp"
#include "mfg/problem.hpp"
#include "mfg/solver.hpp"

namespace mfg {

// fields.csv: header x0[,x1],u,m,hj_residual, one row per grid point in
// lexicographic index order, 17 significant digits throughout.
// summary.json: fixed key set with the run scalars and diagnostics.
void write_fields(const MFGProblem& prob, const MFGSolution& sol, const std::filesystem::path& dir,
                  unsigned seed);

struct FieldsFile {
    TorusGrid grid;
    ScalarField u;
    ScalarField m;
    ScalarField hj_residual;
};

FieldsFile read_fields(const std::filesystem::path& path);

std::string summary_json_text(const MFGProblem& prob, const MFGSolution& sol, unsigned seed);

std::string regularity_json_text(const RegularityReport& rep);

}  // namespace mfg
