#include "mfg/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace mfg {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

void write_fields(const MFGProblem& prob, const MFGSolution& sol, const std::filesystem::path& dir,
                  unsigned seed) {
    std::filesystem::create_directories(dir);

    const TorusGrid& g = prob.grid;
    const ScalarField hj = residual(sol.u, prob, sol.hbar, 0.0);

    {
        const auto path = dir / "fields.csv";
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
        out << (g.dim == 1 ? "x0,u,m,hj_residual\n" : "x0,x1,u,m,hj_residual\n");
        for (std::int64_t p = 0; p < g.num_points(); ++p) {
            const auto x = g.point(p);
            out << fmt17(x[0]);
            if (g.dim == 2) out << ',' << fmt17(x[1]);
            out << ',' << fmt17(sol.u[p]) << ',' << fmt17(sol.m[p]) << ',' << fmt17(hj[p]) << '\n';
        }
        if (!out) throw std::runtime_error("write failed for " + path.string());
    }

    {
        const auto path = dir / "summary.json";
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
        out << summary_json_text(prob, sol, seed);
        if (!out) throw std::runtime_error("write failed for " + path.string());
    }
}

std::string summary_json_text(const MFGProblem& prob, const MFGSolution& sol, unsigned seed) {
    const ScalarField hj = residual(sol.u, prob, sol.hbar, 0.0);
    const RegularityReport reg = make_regularity_report(sol.u, prob, sol.hbar, seed);
    const double h = prob.grid.h;
    const MaxPrincipleReport mp = max_principle_check(sol.u, prob, sol.hbar, 10.0 * h * h);

    std::ostringstream out;
    out << "{\n";
    out << "  \"hbar\": " << fmt17(sol.hbar) << ",\n";
    out << "  \"mass\": " << fmt17(sol.mass) << ",\n";
    out << "  \"k0\": " << fmt17(sol.k0) << ",\n";
    out << "  \"linf_u\": " << fmt17(linf_norm(sol.u)) << ",\n";
    out << "  \"newton_iters_total\": " << sol.newton_iterations_total << ",\n";
    out << "  \"eps_stages\": " << sol.final_continuation.stages.size() << ",\n";
    out << "  \"bisect_iters\": " << sol.bisect_iterations << ",\n";
    out << "  \"residual_linf\": " << fmt17(linf_norm(hj)) << ",\n";
    out << "  \"diagnostics\": {\n";
    out << "    \"morrey_Du\": " << fmt17(reg.morrey_Du) << ",\n";
    out << "    \"holder_alpha\": " << fmt17(reg.holder_alpha) << ",\n";
    out << "    \"caccioppoli_C\": " << fmt17(reg.caccioppoli_ratio) << ",\n";
    out << "    \"max_principle_margins\": [" << fmt17(mp.max_margin) << ", " << fmt17(mp.min_margin)
        << "]\n";
    out << "  }\n";
    out << "}\n";
    return out.str();
}

std::string regularity_json_text(const RegularityReport& rep) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"morrey_Du\": " << fmt17(rep.morrey_Du) << ",\n";
    out << "  \"morrey_lambda\": " << fmt17(rep.morrey_lambda) << ",\n";
    out << "  \"campanato\": " << fmt17(rep.campanato) << ",\n";
    out << "  \"holder_alpha\": " << fmt17(rep.holder_alpha) << ",\n";
    out << "  \"holder_seminorm\": " << fmt17(rep.holder_seminorm) << ",\n";
    out << "  \"caccioppoli_C\": " << fmt17(rep.caccioppoli_ratio) << ",\n";
    out << "  \"k0_margin\": " << fmt17(rep.k0_margin) << "\n";
    out << "}\n";
    return out.str();
}

FieldsFile read_fields(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("empty fields file " + path.string());
    int dim = 0;
    if (header == "x0,u,m,hj_residual") {
        dim = 1;
    } else if (header == "x0,x1,u,m,hj_residual") {
        dim = 2;
    } else {
        throw std::runtime_error("unrecognized fields header: " + header);
    }

    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (static_cast<int>(cells.size()) != dim + 3)
            throw std::runtime_error("bad column count in fields row: " + line);
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(std::stod(c));
        rows.push_back(std::move(row));
    }

    const std::int64_t count = static_cast<std::int64_t>(rows.size());
    int n = 0;
    if (dim == 1) {
        n = static_cast<int>(count);
    } else {
        n = static_cast<int>(std::llround(std::sqrt(static_cast<double>(count))));
        if (static_cast<std::int64_t>(n) * n != count)
            throw std::runtime_error("fields row count is not a square");
    }

    FieldsFile out;
    out.grid = make_grid(dim, n);
    out.u = ScalarField(out.grid);
    out.m = ScalarField(out.grid);
    out.hj_residual = ScalarField(out.grid);
    for (std::int64_t p = 0; p < count; ++p) {
        const auto& row = rows[static_cast<std::size_t>(p)];
        const auto x = out.grid.point(p);
        for (int k = 0; k < dim; ++k)
            if (std::fabs(row[static_cast<std::size_t>(k)] - x[k]) > 1e-9)
                throw std::runtime_error("fields coordinates do not match a uniform torus grid");
        out.u[p] = row[static_cast<std::size_t>(dim)];
        out.m[p] = row[static_cast<std::size_t>(dim) + 1];
        out.hj_residual[p] = row[static_cast<std::size_t>(dim) + 2];
    }
    return out;
}

}  // namespace mfg
