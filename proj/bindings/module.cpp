#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ubl/battery.hpp"
#include "ubl/counterexamples.hpp"
#include "ubl/inequalities.hpp"
#include "ubl/muckenhoupt.hpp"

namespace py = pybind11;
using namespace ubl;

namespace {

GroupPoint point_from(const std::vector<double>& coords, int l) {
    return make_point(Space::heisenberg(l), coords);
}

ScalarField wrap_field(const py::function& f) {
    return [f](const GroupPoint& g) { return f(coords_of(g)).cast<double>(); };
}

RatioKind ratio_kind(const std::string& kind) {
    if (kind == "poincare") return RatioKind::Poincare;
    if (kind == "lsq") return RatioKind::LSq;
    if (kind == "phi") return RatioKind::PhiEntropy;
    throw InputError("kind must be poincare | lsq | phi");
}

py::dict summary_dict(const ReportSummary& s) {
    py::dict d;
    d["kind"] = s.kind;
    d["n_holds"] = s.n_holds;
    d["n_violated"] = s.n_violated;
    d["n_inconclusive"] = s.n_inconclusive;
    d["min_margin_sigmas"] = s.min_margin_sigmas;
    return d;
}

}  // namespace

PYBIND11_MODULE(_uboundlab, m) {
    m.doc() = "coercive-inequality laboratory: Heisenberg geometry, measures, checkers";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<DiagnosticError>(m, "DiagnosticError", PyExc_RuntimeError);

    // ---- geometry ----
    m.def(
        "cc_distance",
        [](const std::vector<double>& coords, int l) { return cc_distance(point_from(coords, l)); },
        py::arg("coords"), py::arg("l") = 1,
        "Carnot-Caratheodory distance of (x..., z) from the identity of H_l");
    m.def(
        "kaplan_norm",
        [](const std::vector<double>& coords, int l) { return kaplan_norm(point_from(coords, l)); },
        py::arg("coords"), py::arg("l") = 1);
    m.def(
        "group_mul",
        [](const std::vector<double>& a, const std::vector<double>& b, int l) {
            return coords_of(group_mul(point_from(a, l), point_from(b, l)));
        },
        py::arg("a"), py::arg("b"), py::arg("l") = 1);
    m.def(
        "dilate",
        [](double s, const std::vector<double>& coords, int l) {
            return coords_of(dilate(s, point_from(coords, l)));
        },
        py::arg("s"), py::arg("coords"), py::arg("l") = 1);
    m.def(
        "cc_distance_oracle",
        [](const std::vector<double>& coords, int l, int segments, int restarts, std::uint64_t seed) {
            OracleOptions opt;
            opt.restarts = restarts;
            opt.seed = seed;
            auto r = cc_distance_oracle(point_from(coords, l), segments, opt);
            py::dict d;
            d["length"] = r.length;
            d["residual"] = r.residual;
            d["n_segments"] = r.n_segments;
            return d;
        },
        py::arg("coords"), py::arg("l") = 1, py::arg("segments") = 64, py::arg("restarts") = 8,
        py::arg("seed") = 20240901);
    m.def(
        "horizontal_gradient",
        [](const py::function& f, const std::vector<double>& coords, int l, double h) {
            return horizontal_gradient(wrap_field(f), point_from(coords, l), h);
        },
        py::arg("f"), py::arg("coords"), py::arg("l") = 1, py::arg("h") = 1e-4);
    m.def(
        "kohn_laplacian",
        [](const py::function& f, const std::vector<double>& coords, int l, double h) {
            return kohn_laplacian(wrap_field(f), point_from(coords, l), h);
        },
        py::arg("f"), py::arg("coords"), py::arg("l") = 1, py::arg("h") = 1e-3);
    m.def(
        "gradient_vanishing_scan",
        [](int resolution) {
            auto r = gradient_vanishing_scan(HomogeneousNormKind::Kaplan, Space::heisenberg(1),
                                             resolution);
            py::dict d;
            d["point"] = coords_of(r.point);
            d["grad_norm"] = r.grad_norm;
            return d;
        },
        py::arg("resolution") = 64);

    // ---- theorem constants ----
    m.def(
        "constants_thm2_5",
        [](double beta, double p, double sigma, double eps, double K) {
            auto c = constants_thm2_5(beta, p, sigma, eps, K);
            return py::make_tuple(c.C, c.D);
        },
        py::arg("beta"), py::arg("p"), py::arg("sigma") = 1.0, py::arg("eps") = 0.0,
        py::arg("K") = 0.0);
    m.def(
        "constants_thm2_6",
        [](double C, double D, double delta, double gamma, double oscv) {
            auto c = constants_thm2_6({C, D, Provenance::Manual}, delta, gamma, oscv);
            return py::make_tuple(c.C, c.D);
        },
        py::arg("C"), py::arg("D"), py::arg("delta"), py::arg("gamma"), py::arg("oscv") = 0.0);
    m.def(
        "constants_thm2_5p",
        [](double C, double D, double q, double p) {
            auto c = constants_thm2_5p({C, D, Provenance::Manual}, q, p);
            return py::make_tuple(c.C, c.D);
        },
        py::arg("C"), py::arg("D"), py::arg("q"), py::arg("p"));

    // ---- measures ----
    m.def(
        "normalize",
        [](const std::string& measure, double tol) {
            auto ms = measure_by_name(measure);
            auto r = normalize(ms, tol);
            return py::make_tuple(r.logZ, r.tol_achieved);
        },
        py::arg("measure"), py::arg("tol") = 1e-8,
        "log normalisation constant of a named measure by quadrature");
    m.def(
        "sample",
        [](const std::string& measure, std::size_t n, std::uint64_t seed) {
            auto ms = measure_by_name(measure);
            auto ss = sample(ms, n, seed);
            int dim = ss.space.coord_dim();
            py::array_t<double> arr({static_cast<py::ssize_t>(n), static_cast<py::ssize_t>(dim)});
            auto buf = arr.mutable_unchecked<2>();
            for (std::size_t i = 0; i < n; ++i) {
                auto c = coords_of(ss.points[i]);
                for (int j = 0; j < dim; ++j) buf(i, j) = c[j];
            }
            py::dict diag;
            diag["acceptance_rate"] = ss.acceptance_rate;
            diag["ess"] = ss.ess;
            diag["thinning"] = ss.thinning;
            return py::make_tuple(arr, diag);
        },
        py::arg("measure"), py::arg("n"), py::arg("seed"),
        "random-walk Metropolis samples of a named measure (deterministic per seed)");

    // ---- inequality checks ----
    m.def(
        "run_check",
        [](const std::string& measure, const std::string& kind, double q, double constant,
           std::size_t n, std::uint64_t seed, std::uint64_t suite_seed, double theta) {
            auto ms = measure_by_name(measure);
            auto ss = sample(ms, n, seed);
            auto suite = default_suite(ms.space, {40, 30, 20, 10, suite_seed});
            std::vector<InequalityReport> reports;
            if (kind == "poincare")
                reports = check_poincare(ms, ss, q, constant, suite);
            else if (kind == "lsq")
                reports = check_lsq(ms, ss, q, constant, suite);
            else if (kind == "phi")
                reports = check_phi_entropy(ms, ss, theta, constant, suite);
            else
                throw InputError("kind must be poincare | lsq | phi");
            return summary_dict(summarize(kind, reports));
        },
        py::arg("measure"), py::arg("kind"), py::arg("q"), py::arg("constant"),
        py::arg("n") = 20000, py::arg("seed") = 1, py::arg("suite_seed") = 424242,
        py::arg("theta") = 1.5);
    m.def(
        "best_constant",
        [](const std::string& measure, const std::string& kind, double q, std::size_t n,
           std::uint64_t seed) {
            auto ms = measure_by_name(measure);
            auto ss = sample(ms, n, seed);
            auto fam = kind == "poincare" ? fourier_family(ms.space, 2) : tilt_family(ms.space);
            auto r = best_constant_search(ms, ss, ratio_kind(kind), q, fam, 1500, seed + 7);
            return r.ratio;
        },
        py::arg("measure"), py::arg("kind"), py::arg("q"), py::arg("n") = 20000, py::arg("seed") = 1,
        "lower bound on the optimal LHS/RHS ratio over a parametric family");

    // ---- Muckenhoupt ----
    m.def(
        "log_b_plus",
        [](double beta, double p, double eps, double r, double q) {
            auto mm = eps > 0.0 ? OneDimMeasure::oscillating(beta, p, eps)
                                : OneDimMeasure::power(beta, p);
            return log_b_plus(mm, r, q);
        },
        py::arg("beta"), py::arg("p"), py::arg("eps"), py::arg("r"), py::arg("q") = 2.0);
    m.def(
        "counterexample_series",
        [](double beta, double p, double eps, double q, int n_max) {
            py::list out;
            for (const auto& row : counterexample_series(beta, p, eps, q, n_max)) {
                py::dict d;
                d["n"] = row.n;
                d["r"] = row.r;
                d["log_b"] = row.log_b;
                d["log_lower_bound"] = row.log_lower_bound;
                out.append(d);
            }
            return out;
        },
        py::arg("beta"), py::arg("p"), py::arg("eps"), py::arg("q") = 2.0, py::arg("n_max") = 4);
    m.def(
        "fd_spectral_gap",
        [](const std::string& family, double beta, double p, double eps, double R, int grid_n) {
            OneDimMeasure mm = family == "uniform"
                                   ? OneDimMeasure::uniform()
                                   : (family == "oscillating" ? OneDimMeasure::oscillating(beta, p, eps)
                                                              : OneDimMeasure::power(beta, p));
            return fd_spectral_gap(mm, R, grid_n);
        },
        py::arg("family"), py::arg("beta") = 1.0, py::arg("p") = 2.0, py::arg("eps") = 0.5,
        py::arg("R") = 8.0, py::arg("grid_n") = 2048);

    // ---- no-LS counterexample ----
    m.def(
        "no_ls_table",
        [](double beta, double p, double q, std::size_t n, std::uint64_t seed, bool cc,
           const std::vector<double>& t_grid) {
            NoLSExperiment exp;
            exp.beta = beta;
            exp.p = p;
            exp.q = q;
            exp.n_samples = n;
            exp.seed = seed;
            if (!t_grid.empty()) exp.t_grid = t_grid;
            auto table = no_ls_run(exp, cc);
            auto rows_to_list = [](const std::vector<NoLSPoint>& rows) {
                py::list out;
                for (const auto& r : rows) {
                    py::dict d;
                    d["t"] = r.t;
                    d["r"] = r.r;
                    d["valid"] = r.valid;
                    d["log_entropy"] = r.log_entropy;
                    d["log_energy"] = r.log_energy;
                    d["ratio"] = r.ratio;
                    d["ratio_se"] = r.ratio_se;
                    d["ess"] = r.ess;
                    out.append(d);
                }
                return out;
            };
            py::dict out;
            out["kaplan"] = rows_to_list(table.kaplan);
            if (cc) out["cc"] = rows_to_list(table.cc);
            return out;
        },
        py::arg("beta") = 1.0, py::arg("p") = 2.0, py::arg("q") = 2.0, py::arg("n") = 20000,
        py::arg("seed") = 20240917, py::arg("cc") = false,
        py::arg("t_grid") = std::vector<double>{});

    m.attr("__version__") = "0.1.0";
}
