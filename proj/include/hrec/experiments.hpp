#pragma once

#include "hrec/assembly.hpp"
#include "hrec/fractional.hpp"
#include "hrec/measurements.hpp"
#include "hrec/mesh.hpp"
#include "hrec/recovery.hpp"
#include "hrec/types.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hrec {

inline constexpr const char* kVersion = "0.1.0";

enum class SolutionCase { smooth, nonsmooth };

inline ExactSolution exact_solution(SolutionCase c)
{
    return c == SolutionCase::smooth ? smooth_solution() : nonsmooth_solution();
}

inline std::string to_string(SolutionCase c)
{
    return c == SolutionCase::smooth ? "smooth" : "nonsmooth";
}

inline SolutionCase parse_case(const std::string& name)
{
    if (name == "smooth") {
        return SolutionCase::smooth;
    }
    if (name == "nonsmooth") {
        return SolutionCase::nonsmooth;
    }
    throw std::invalid_argument("unknown case '" + name + "' (expected smooth or nonsmooth)");
}

struct ExperimentConfig {
    SolutionCase solution = SolutionCase::smooth;
    double s = 1.0;
    int p = 7;
    int n = 5;
    double k = kDefaultSincSpacing;
    QuadratureOrders quad;
    int reference_level = 8;

    void validate() const
    {
        if (n < 1) {
            throw std::invalid_argument("refinement level n must be >= 1");
        }
        if (!(s > 0.0)) {
            throw std::invalid_argument("exponent s must be positive");
        }
        if (p < 1) {
            throw std::invalid_argument("grid parameter p must be >= 1");
        }
        if (!(k > 0.0)) {
            throw std::invalid_argument("sinc spacing k must be positive");
        }
        if (quad.dual < 1 || quad.data < 1 || quad.error < 1) {
            throw std::invalid_argument("quadrature orders must be >= 1");
        }
    }
};

struct RecoveryRow {
    SolutionCase solution = SolutionCase::smooth;
    int n = 0;
    int cells = 0;
    int dofs = 0;
    int m = 0;
    double s = 0.0;
    double e_rel = 0.0;
};

/// Full pipeline on a prepared discretization.
inline RecoveryResult recover(const Discretization& disc, const MeasurementSet& set, const Vector& omega, double s,
                              double k)
{
    const auto reps = riesz_representers(disc, FractionalExponent(s), k, set.duals);
    return gram_and_recover(reps, set.duals, omega, PrimalVector::zero(disc.mesh().n_dofs()));
}

inline RecoveryRow run_recovery_case(const ExperimentConfig& config, RecoveryResult* out = nullptr)
{
    config.validate();
    const Discretization disc(config.n);
    const MeasurementSet set = make_measurement_set(disc.mesh(), config.p, kDefaultGaussianRadius, config.quad.dual);
    const ExactSolution exact = exact_solution(config.solution);
    const Vector omega = measure_exact(disc.mesh(), set, exact, config.quad.data);
    RecoveryResult result = recover(disc, set, omega, config.s, config.k);
    const H1Error err = h1_error(disc.mesh(), result.u_hat, exact, config.quad.error);
    result.relative_h1_error = err.relative();
    RecoveryRow row{config.solution, config.n, disc.mesh().n_cells(), disc.mesh().n_dofs(), set.size(), config.s,
                    err.relative()};
    if (out != nullptr) {
        *out = std::move(result);
    }
    return row;
}

/// Writes the config comment line; every CSV starts with it.
inline void write_csv_comment(std::ostream& out, const std::string& config)
{
    out << "# hrec " << kVersion << ' ' << config << '\n';
}

inline void write_recovery_header(std::ostream& out)
{
    out << "case,n,cells,dofs,m,s,e_rel\n";
}

inline void write_recovery_row(std::ostream& out, const RecoveryRow& row)
{
    std::ostringstream line;
    line << std::setprecision(10) << to_string(row.solution) << ',' << row.n << ',' << row.cells << ','
         << row.dofs << ',' << row.m << ',' << row.s << ',' << row.e_rel << '\n';
    out << line.str() << std::flush;
}

struct TableLayout {
    SolutionCase solution;
    std::vector<double> exponents;
    std::vector<int> grid_params;
    std::vector<int> levels;
};

/// Parameter grids of the three recovery tables.
inline std::vector<TableLayout> table_layout(int table_id, int max_n)
{
    std::vector<int> levels;
    for (int n = 2; n <= max_n; ++n) {
        levels.push_back(n);
    }
    const std::vector<int> four_sets = {2, 4, 5, 7}; // m = 3, 12, 16, 33
    const std::vector<double> sweep = {0.55, 0.66, 0.75, 1.0, 7.0 / 6.0, 1.25, 1.5, 1.75, 1.95, 2.0, 5.0, 10.0, 20.0};
    switch (table_id) {
    case 2:
        return {{SolutionCase::smooth, {1.0, 1.45}, four_sets, levels}};
    case 3:
        return {{SolutionCase::nonsmooth, {0.55, 7.0 / 6.0}, four_sets, levels}};
    case 4:
        return {{SolutionCase::smooth, sweep, {2, 7}, {6}}, {SolutionCase::nonsmooth, sweep, {2, 7}, {6}}};
    default:
        throw std::invalid_argument("table id must be 2, 3 or 4");
    }
}

/**
 * Sweeps one table, writing rows as they complete. Rows come out ordered
 * by (case, s, m, n); a failure leaves the finished rows in @p out.
 */
inline std::vector<RecoveryRow> run_table(int table_id, std::ostream& out, int max_n = 6, double k = kDefaultSincSpacing,
                                          const QuadratureOrders& quad = {})
{
    if (max_n < 2) {
        throw std::invalid_argument("table: max-n must be >= 2");
    }
    const auto layouts = table_layout(table_id, max_n);
    std::ostringstream cfg;
    cfg << "table --id " << table_id << " --max-n " << max_n << " --k " << k << " --quad " << quad.dual << ','
        << quad.data << ',' << quad.error;
    write_csv_comment(out, cfg.str());
    write_recovery_header(out);

    std::vector<RecoveryRow> rows;
    for (const auto& layout : layouts) {
        const ExactSolution exact = exact_solution(layout.solution);
        // one discretization and measurement set per (n, p), reused across s
        std::map<int, Discretization> discs;
        std::map<std::pair<int, int>, std::pair<MeasurementSet, Vector>> data;
        for (const double s : layout.exponents) {
            for (const int p : layout.grid_params) {
                for (const int n : layout.levels) {
                    auto it = discs.find(n);
                    if (it == discs.end()) {
                        it = discs.emplace(n, Discretization(n)).first;
                    }
                    const Discretization& disc = it->second;
                    auto dit = data.find({n, p});
                    if (dit == data.end()) {
                        MeasurementSet set = make_measurement_set(disc.mesh(), p, kDefaultGaussianRadius, quad.dual);
                        Vector omega = measure_exact(disc.mesh(), set, exact, quad.data);
                        dit = data.emplace(std::pair{n, p}, std::pair{std::move(set), std::move(omega)}).first;
                    }
                    const auto& [set, omega] = dit->second;
                    const RecoveryResult result = recover(disc, set, omega, s, k);
                    const double e = h1_error(disc.mesh(), result.u_hat, exact, quad.error).relative();
                    RecoveryRow row{layout.solution, n, disc.mesh().n_cells(), disc.mesh().n_dofs(), set.size(), s, e};
                    write_recovery_row(out, row);
                    rows.push_back(row);
                }
            }
        }
    }
    return rows;
}

/// Least-squares slope of log(error) against log(h).
inline double fitted_rate(const std::vector<double>& h, const std::vector<double>& err)
{
    if (h.size() != err.size() || h.size() < 2) {
        throw std::invalid_argument("fitted_rate: need at least two points");
    }
    const auto count = static_cast<double>(h.size());
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double x = std::log(h[i]);
        const double y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

/// Q1 function on a coarse nested mesh, evaluated at the nodes of a finer one.
inline PrimalVector prolongate(const QuadMesh& coarse, const PrimalVector& u, const QuadMesh& fine)
{
    if (fine.level < coarse.level) {
        throw std::invalid_argument("prolongate: target mesh is coarser than the source");
    }
    PrimalVector out = PrimalVector::zero(fine.n_dofs());
    for (int d = 0; d < fine.n_dofs(); ++d) {
        out[d] = evaluate(coarse, u, fine.node_coords[d].x, fine.node_coords[d].y);
    }
    return out;
}

struct ConvergenceRow {
    int n = 0;
    double h = 0.0;
    double h1_error = 0.0;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    double rate = 0.0;
};

inline constexpr int kMaxReferenceLevel = 10;

/**
 * H^1 distance between representers on levels 2..max_n and one on the
 * reference level, for a single Gaussian centred at @p center.
 */
inline ConvergenceStudy run_riesz_convergence(Point center, double s, int max_n, int reference_level,
                                              double k = kDefaultSincSpacing, int dual_order = 2)
{
    if (max_n < 3) {
        throw std::invalid_argument("riesz-conv: max-n must be >= 3");
    }
    if (reference_level < max_n + 2) {
        throw std::invalid_argument("riesz-conv: reference level must be at least max-n + 2");
    }
    if (reference_level > kMaxReferenceLevel) {
        throw std::invalid_argument("riesz-conv: reference level above " + std::to_string(kMaxReferenceLevel) +
                                    " exceeds the memory guard");
    }
    const GaussianMeasurement meas(center);
    const FractionalExponent exponent(s);

    const Discretization ref(reference_level);
    const RieszRepresenter ref_rep =
        riesz_representer(ref, exponent, k, assemble_measurement_dual(ref.mesh(), meas, dual_order));
    const SparseMatrix h1_gram = ref.stiffness().full + assemble_mass(ref.mesh());

    ConvergenceStudy study;
    std::vector<double> hs;
    std::vector<double> errs;
    for (int n = 2; n <= max_n; ++n) {
        const Discretization disc(n);
        const RieszRepresenter rep =
            riesz_representer(disc, exponent, k, assemble_measurement_dual(disc.mesh(), meas, dual_order));
        const Vector diff = prolongate(disc.mesh(), rep.coefficients, ref.mesh()).values - ref_rep.coefficients.values;
        const double err = std::sqrt(diff.dot(h1_gram * diff));
        study.rows.push_back({n, disc.mesh().mesh_size(), err});
        hs.push_back(disc.mesh().mesh_size());
        errs.push_back(err);
    }
    study.rate = fitted_rate(hs, errs);
    return study;
}

inline void write_convergence_csv(std::ostream& out, const ConvergenceStudy& study, const std::string& config)
{
    write_csv_comment(out, config);
    out << "n,h,h1_error_vs_reference\n" << std::setprecision(10);
    for (const auto& row : study.rows) {
        out << row.n << ',' << row.h << ',' << row.h1_error << '\n';
    }
    out << "# fitted_rate," << study.rate << '\n';
}

struct OracleRow {
    double k = 0.0;
    double error = 0.0;
};

struct OracleStudy {
    std::vector<OracleRow> rows;
    /// c in err ~ C exp(-c/k), fitted over unsaturated points; nullopt if fewer than two.
    std::optional<double> decay;
    double saturation_floor = 0.0;
};

/// Errors at or below this relative level are roundoff, not quadrature error.
inline constexpr double kOracleSaturationFloor = 1e-12;

/// Least-squares fit of log(err) = a - c/k over points above the floor.
inline std::optional<double> fitted_decay(const std::vector<OracleRow>& rows, double floor = kOracleSaturationFloor)
{
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& row : rows) {
        if (row.error > floor) {
            xs.push_back(1.0 / row.k);
            ys.push_back(std::log(row.error));
        }
    }
    if (xs.size() < 2) {
        return std::nullopt;
    }
    const auto count = static_cast<double>(xs.size());
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return -(count * sxy - sx * sy) / (count * sxx - sx * sx);
}

/// Relative M-norm distance between fractional_inverse and the dense oracle.
inline double oracle_error(const BoundaryOperators& ops, const SpectralOracle& oracle, double s, double k,
                           const Vector& g)
{
    const Vector approx = fractional_inverse(ops, FractionalExponent(s), k, Matrix(g)).col(0);
    const Vector exact = oracle.apply(s, Matrix(g)).col(0);
    return mass_norm(ops, approx - exact) / mass_norm(ops, exact);
}

/**
 * Sinc-versus-spectral comparison on level @p n for the boundary data of a
 * Gaussian centred at (-0.5, 0.5).
 */
inline OracleStudy run_oracle_check(int n, double s, const std::vector<double>& ks)
{
    if (ks.empty()) {
        throw std::invalid_argument("oracle: empty k list");
    }
    const Discretization disc(n);
    const SpectralOracle oracle(disc.boundary_operators());
    const DualVector nu = assemble_measurement_dual(disc.mesh(), GaussianMeasurement({-0.5, 0.5}));
    const Vector g = boundary_rhs(disc, nu, solve_lagrange_multiplier(disc, nu)).values;

    OracleStudy study;
    study.saturation_floor = kOracleSaturationFloor;
    for (const double k : ks) {
        study.rows.push_back({k, oracle_error(disc.boundary_operators(), oracle, s, k, g)});
    }
    study.decay = fitted_decay(study.rows);
    return study;
}

inline void write_oracle_csv(std::ostream& out, const OracleStudy& study, const std::string& config)
{
    write_csv_comment(out, config);
    out << "k,sinc_vs_oracle_error\n" << std::setprecision(10);
    for (const auto& row : study.rows) {
        out << row.k << ',' << row.error << '\n';
    }
    if (study.decay) {
        out << "# fitted_decay," << *study.decay << '\n';
    } else {
        out << "# fitted_decay,nan\n";
    }
}

/// Nodal values of a field as x,y,value rows.
inline void write_field_csv(std::ostream& out, const QuadMesh& mesh, const PrimalVector& u)
{
    out << "x,y,value\n" << std::setprecision(17);
    for (int d = 0; d < mesh.n_dofs(); ++d) {
        out << mesh.node_coords[d].x << ',' << mesh.node_coords[d].y << ',' << u[d] << '\n';
    }
}

} // namespace hrec
