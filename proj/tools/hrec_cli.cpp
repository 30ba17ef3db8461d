// Command-line driver for the recovery experiments. Every subcommand writes CSV.

#include "hrec/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

/// Accepts decimals and fractions such as "7/6".
double parse_number(const std::string& text)
{
    const auto slash = text.find('/');
    std::size_t used = 0;
    try {
        if (slash == std::string::npos) {
            const double v = std::stod(text, &used);
            if (used == text.size()) {
                return v;
            }
        } else {
            const std::string num = text.substr(0, slash);
            const std::string den = text.substr(slash + 1);
            std::size_t used_den = 0;
            const double a = std::stod(num, &used);
            const double b = std::stod(den, &used_den);
            if (used == num.size() && used_den == den.size() && b != 0.0) {
                return a / b;
            }
        }
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("cannot parse number '" + text + "'");
}

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_number(item));
    }
    if (out.empty()) {
        throw std::invalid_argument("empty list '" + text + "'");
    }
    return out;
}

hrec::QuadratureOrders parse_quad(const std::string& text)
{
    const auto v = parse_list(text);
    if (v.size() != 3) {
        throw std::invalid_argument("--quad expects dual,data,error orders, e.g. 2,4,4");
    }
    return {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2])};
}

/// stdout unless a path is given.
class Output {
  public:
    explicit Output(const std::string& path)
    {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw std::invalid_argument("cannot open output file '" + path + "'");
            }
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

  private:
    std::unique_ptr<std::ofstream> file_;
};

std::string command_line(int argc, char** argv)
{
    std::string line;
    for (int i = 1; i < argc; ++i) {
        line += (i > 1 ? " " : "") + std::string(argv[i]);
    }
    return line;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Near-optimal recovery of harmonic functions on the L-shaped domain"};
    app.require_subcommand(1);

    std::string out_path;

    auto* mesh_cmd = app.add_subcommand("mesh-info", "Mesh statistics, optionally a node dump");
    int mesh_n = 2;
    std::string mesh_dump;
    mesh_cmd->add_option("--n", mesh_n, "refinement level")->required();
    mesh_cmd->add_option("--dump", mesh_dump, "write node_id,x,y,kind CSV here");

    auto* rec_cmd = app.add_subcommand("recover", "One recovery run");
    std::string rec_case = "smooth";
    std::string rec_s = "1";
    int rec_p = 7;
    int rec_n = 5;
    std::string rec_k = "0.25";
    std::string rec_quad = "2,4,4";
    std::string rec_field;
    std::string rec_centers;
    rec_cmd->add_option("--case", rec_case, "smooth | nonsmooth")->required();
    rec_cmd->add_option("--s", rec_s, "boundary regularity exponent (fractions allowed)")->required();
    rec_cmd->add_option("--p", rec_p, "measurement grid parameter")->required();
    rec_cmd->add_option("--n", rec_n, "refinement level")->required();
    rec_cmd->add_option("--k", rec_k, "sinc spacing");
    rec_cmd->add_option("--quad", rec_quad, "Gauss orders dual,data,error");
    rec_cmd->add_option("--out", out_path, "CSV output path");
    rec_cmd->add_option("--dump-field", rec_field, "write nodal values of the recovered function");
    rec_cmd->add_option("--dump-measurements", rec_centers, "write centers and measured values");

    auto* table_cmd = app.add_subcommand("table", "Sweep one of the recovery tables");
    int table_id = 2;
    int table_max_n = 6;
    std::string table_k = "0.25";
    table_cmd->add_option("--id", table_id, "2 | 3 | 4")->required()->check(CLI::IsMember({2, 3, 4}));
    table_cmd->add_option("--max-n", table_max_n, "finest refinement level (tables 2 and 3)");
    table_cmd->add_option("--k", table_k, "sinc spacing");
    table_cmd->add_option("--out", out_path, "CSV output path");

    auto* conv_cmd = app.add_subcommand("riesz-conv", "Convergence of one Riesz representer");
    std::string conv_z = "-0.5,0.5";
    std::string conv_s = "0.75";
    int conv_max_n = 6;
    int conv_ref = 8;
    std::string conv_k = "0.25";
    conv_cmd->add_option("--z", conv_z, "Gaussian center x,y")->required();
    conv_cmd->add_option("--s", conv_s, "exponent")->required();
    conv_cmd->add_option("--max-n", conv_max_n, "finest level compared");
    conv_cmd->add_option("--ref-level", conv_ref, "reference refinement level");
    conv_cmd->add_option("--k", conv_k, "sinc spacing");
    conv_cmd->add_option("--out", out_path, "CSV output path");

    auto* oracle_cmd = app.add_subcommand("oracle", "Sinc quadrature against the dense spectral oracle");
    int oracle_n = 3;
    std::string oracle_s = "0.75";
    std::string oracle_ks = "1,0.5,0.3333333333333333,0.25";
    oracle_cmd->add_option("--n", oracle_n, "refinement level")->required();
    oracle_cmd->add_option("--s", oracle_s, "exponent")->required();
    oracle_cmd->add_option("--k-list", oracle_ks, "comma separated sinc spacings");
    oracle_cmd->add_option("--out", out_path, "CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    const std::string config = command_line(argc, argv);
    try {
        if (*mesh_cmd) {
            const hrec::QuadMesh mesh = hrec::build_lshape_mesh(mesh_n);
            hrec::write_csv_comment(std::cout, config);
            std::cout << "n,cells,dofs,interior,boundary,h\n"
                      << mesh.level << ',' << mesh.n_cells() << ',' << mesh.n_dofs() << ',' << mesh.n_interior << ','
                      << mesh.n_boundary << ',' << mesh.mesh_size() << '\n';
            if (!mesh_dump.empty()) {
                Output dump(mesh_dump);
                hrec::write_mesh_csv(dump.stream(), mesh);
            }
        } else if (*rec_cmd) {
            hrec::ExperimentConfig cfg;
            cfg.solution = hrec::parse_case(rec_case);
            cfg.s = parse_number(rec_s);
            cfg.p = rec_p;
            cfg.n = rec_n;
            cfg.k = parse_number(rec_k);
            cfg.quad = parse_quad(rec_quad);
            cfg.validate();
            Output out(out_path);
            hrec::RecoveryResult result;
            const hrec::RecoveryRow row = hrec::run_recovery_case(cfg, &result);
            hrec::write_csv_comment(out.stream(), config);
            hrec::write_recovery_header(out.stream());
            hrec::write_recovery_row(out.stream(), row);
            if (!rec_field.empty() || !rec_centers.empty()) {
                const hrec::Discretization disc(cfg.n);
                if (!rec_field.empty()) {
                    Output field(rec_field);
                    hrec::write_field_csv(field.stream(), disc.mesh(), result.u_hat);
                }
                if (!rec_centers.empty()) {
                    const auto set = hrec::make_measurement_set(disc.mesh(), cfg.p, hrec::kDefaultGaussianRadius,
                                                                cfg.quad.dual);
                    Output centers(rec_centers);
                    hrec::write_measurements_csv(
                        centers.stream(), set,
                        hrec::measure_exact(disc.mesh(), set, hrec::exact_solution(cfg.solution), cfg.quad.data));
                }
            }
        } else if (*table_cmd) {
            Output out(out_path);
            hrec::run_table(table_id, out.stream(), table_max_n, parse_number(table_k));
        } else if (*conv_cmd) {
            const auto z = parse_list(conv_z);
            if (z.size() != 2) {
                throw std::invalid_argument("--z expects x,y");
            }
            const auto study = hrec::run_riesz_convergence({z[0], z[1]}, parse_number(conv_s), conv_max_n, conv_ref,
                                                           parse_number(conv_k));
            Output out(out_path);
            hrec::write_convergence_csv(out.stream(), study, config);
        } else if (*oracle_cmd) {
            const auto study = hrec::run_oracle_check(oracle_n, parse_number(oracle_s), parse_list(oracle_ks));
            Output out(out_path);
            hrec::write_oracle_csv(out.stream(), study, config);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
