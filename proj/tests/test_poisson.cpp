#include <doctest.h>

#include <cmath>
#include <random>

#include "diodeopt/errors.hpp"
#include "diodeopt/poisson.hpp"
#include "oracles.hpp"

using namespace diodeopt;

namespace {

// Independent re-implementation of the regulated boundary neutrality
// conditions in eV/V units: own regulator, own expressions, plain bisection.
struct BoundaryOracle {
    DiodeDesign d;
    MaterialParams m;
    double kT, eps_i, ni;

    BoundaryOracle(const DiodeDesign& design, const MaterialParams& material)
        : d(design), m(material) {
        kT = 8.617333262e-5 * d.T;  // eV/K, entered independently
        const double Nc = effective_dos(d.T, m.m_c);
        const double Pv = effective_dos(d.T, m.m_v);
        eps_i = 0.5 * (m.eps_c + m.eps_v) + 0.5 * kT * std::log(Pv / Nc);
        ni = std::sqrt(Nc * Pv) * std::exp(-m.E_g / (2.0 * kT));
    }

    static double e(double x) { return std::exp(std::min(x, 700.0)); }

    double left_residual(double mu) const {
        const double p = ni * e((eps_i - mu) / kT);
        const double n = ni * e((mu + d.V - eps_i) / kT);
        const double ionized = d.N_a / (2.0 * e((m.eps_a - mu) / kT) + 1.0);
        return p - n - ionized;
    }

    double right_residual(double phi, double mu_l) const {
        const double donors = d.N_d / (2.0 * e((mu_l + d.V + phi - m.eps_d) / kT) + 1.0);
        const double n = ni * e((mu_l + d.V + phi - eps_i) / kT);
        const double p = ni * e((eps_i - mu_l - phi) / kT);
        return donors - n + p;
    }
};

double trapz(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    double s = 0.0;
    for (int i = 1; i < x.size(); ++i) s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("poisson");

TEST_CASE("sigmoid regulator") {
    const double cap = 308.0 * std::log(10.0);
    CHECK(sigmoid_regulator(0.0, 308.0) == 0.0);
    CHECK(sigmoid_regulator(1e6, 308.0) == doctest::Approx(cap).epsilon(1e-12));
    CHECK(sigmoid_regulator(-1e6, 308.0) == doctest::Approx(-cap).epsilon(1e-12));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double x = uni(rng);
        CHECK(sigmoid_regulator(x, 308.0) == doctest::Approx(x).epsilon(1e-6));
    }
    // tanh saturates to 1.0 exactly in floating point, so the bound closes.
    std::uniform_real_distribution<double> wide(-1e9, 1e9);
    for (int i = 0; i < 1000; ++i) {
        const double s = sigmoid_regulator(wide(rng), 308.0);
        CHECK(std::abs(s) <= cap);
        CHECK(std::isfinite(std::exp(s)));
    }
    CHECK_THROWS_AS(sigmoid_regulator(1.0, 0.0), DomainError);
}

TEST_CASE("boundary levels satisfy neutrality and match the bisection oracle") {
    const MaterialParams mat = MaterialParams::sic_4h();
    const DiodeDesign design = DiodeDesign::baseline(0.0);
    const BoundaryLevels levels = boundary_levels(design, mat);

    // Defining property: the charge density vanishes at both ends. The public
    // charge_density carries the regulator, whose soft distortion leaves a
    // small residual relative to the unregulated neutrality root.
    const double kT = constants::k_B * design.T / constants::eV_to_J;
    const double eps_i = intrinsic_fermi_energy(design.T, mat);
    const double psi_left = (levels.mu_l - eps_i - 0.5 * mat.E_g) / kT;
    const double rho_left = charge_density(psi_left, -design.d_l, design, mat);
    CHECK(std::abs(rho_left) < 1e-4 * constants::q_e * design.N_a);

    const double psi_right = (levels.phi_inf + levels.mu_l - eps_i - 0.5 * mat.E_g) / kT;
    const double rho_right = charge_density(psi_right, design.d + design.d_r, design, mat);
    CHECK(std::abs(rho_right) < 1e-4 * constants::q_e * design.N_d);

    // Independent oracle: raw bisection of freshly written neutrality sums.
    BoundaryOracle oracle(design, mat);
    const double mu_oracle = oracles::bisect(
        [&](double mu) { return oracle.left_residual(mu); }, mat.eps_v - 1.0, mat.eps_c + 1.0, 300);
    CHECK(levels.mu_l == doctest::Approx(mu_oracle).epsilon(1e-10));
    const double phi_oracle = oracles::bisect(
        [&](double phi) { return oracle.right_residual(phi, mu_oracle); }, 0.0, 2.0 * mat.E_g, 300);
    CHECK(std::abs(levels.phi_inf - phi_oracle) < 1e-8);
}

TEST_CASE("charge density windows and the unregularized oracle") {
    const MaterialParams mat = MaterialParams::sic_4h();
    DiodeDesign design = DiodeDesign::baseline(-50.0);

    SUBCASE("acceptor term has no support past the junction") {
        DiodeDesign other = design;
        other.N_a *= 3.0;  // must not matter at z > 0
        const double z = 0.5 * design.d;
        for (double psi : {-20.0, 0.0, 40.0}) {
            CHECK(charge_density(psi, z, design, mat) == charge_density(psi, z, other, mat));
        }
    }

    SUBCASE("domain check") {
        CHECK_THROWS_AS(charge_density(0.0, design.z_right() + 1.0, design, mat), DomainError);
    }

    SUBCASE("matches plain exponentials at a mid-depletion point") {
        const PotentialSolution sol = solve_poisson(design, mat);
        const DepletionProfile dep = depletion_profile(sol, design, mat);
        REQUIRE(dep.dn_tilde > 1.0);
        const double z_mid = 0.5 * dep.dn_tilde;
        const int i = static_cast<int>((z_mid - sol.z[0]) / (sol.z[1] - sol.z[0]));
        const double psi = sol.psi[i];
        const double z = sol.z[i];

        // Raw evaluation of the same density, no regulator, eV/V units.
        const double kT = constants::k_B * design.T / constants::eV_to_J;
        const double eps_i = intrinsic_fermi_energy(design.T, mat);
        const double C0 = std::sqrt(effective_dos(design.T, mat.m_c) *
                                    effective_dos(design.T, mat.m_v));
        const double x_n = psi + design.V / kT;
        const double x_p = -psi - mat.E_g / kT;
        const double x_d = psi + (0.5 * mat.E_g - mat.eps_d + eps_i + design.V) / kT;
        REQUIRE(std::abs(x_n) < 2000.0);  // exp underflow only, no overflow
        const double n = C0 * std::exp(x_n);
        const double p = C0 * std::exp(x_p);
        const double donors = design.N_n / (2.0 * std::exp(x_d) + 1.0);
        const double raw = constants::q_e * (p - n + donors);  // C/cm^3

        const double got = charge_density(psi, z, design, mat);
        CHECK(got == doctest::Approx(raw).epsilon(1e-9));
    }
}

TEST_CASE("equilibrium solve: boundary values and global neutrality") {
    const MaterialParams mat = MaterialParams::sic_4h();
    const DiodeDesign design = DiodeDesign::baseline(0.0);
    const PotentialSolution sol = solve_poisson(design, mat);
    REQUIRE(sol.converged);

    CHECK(sol.phi[0] == doctest::Approx(0.0).epsilon(1e-12));
    const int n = static_cast<int>(sol.z.size());
    CHECK(sol.phi[n - 1] == doctest::Approx(sol.phi_inf).epsilon(1e-12));

    // Total integrated charge vanishes at equilibrium; evaluated in Gauss
    // form, eps * (E_right - E_left) = integral of rho dz, which does not
    // suffer from node placement across the sub-grid p-side depletion spike.
    const double eps_per_cm = mat.permittivity() * 1e-2;  // F/cm
    const double total = eps_per_cm * (sol.E_field[n - 1] - sol.E_field[0]);  // C/cm^2
    const double scale = constants::q_e * design.N_a * (design.d_l * 1e-4);   // C/cm^2
    CHECK(std::abs(total) < 1e-6 * scale);
}

TEST_CASE("reverse bias structure: monotone potential, field peak at the junction") {
    const MaterialParams mat = MaterialParams::sic_4h();
    for (double V : {-50.0, -200.0, -800.0}) {
        DiodeDesign design = DiodeDesign::baseline(V);
        const PotentialSolution sol = solve_poisson(design, mat);
        REQUIRE(sol.converged);
        const int n = static_cast<int>(sol.z.size());
        // phi rises from 0 to phi_inf; tolerate tiny numerical dips.
        const double span = sol.phi[n - 1] - sol.phi[0];
        CHECK(span == doctest::Approx(sol.phi_inf).epsilon(1e-10));
        for (int i = 1; i < n; ++i) CHECK(sol.phi[i] >= sol.phi[i - 1] - 1e-9 * std::abs(span));
        int imax = 0;
        sol.E_field.cwiseAbs().maxCoeff(&imax);
        CHECK(std::abs(sol.z[imax]) < 0.2);  // peak within 0.2 um of the p/n junction
    }
}

TEST_CASE("field-potential integral consistency") {
    const MaterialParams mat = MaterialParams::sic_4h();
    for (double V : {0.0, -100.0}) {
        const DiodeDesign design = DiodeDesign::baseline(V);
        const PotentialSolution sol = solve_poisson(design, mat);
        // minus the trapezoid of E (V/cm) over z (um) equals the potential drop
        const double drop = -trapz(sol.z, sol.E_field) * 1e-4;  // V/cm * um -> V
        const double expected = sol.phi[sol.phi.size() - 1] - sol.phi[0];
        CHECK(drop == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("second-order grid convergence") {
    // A lightly doped design whose depletion layers and Debye tails are all
    // wide enough to be resolved at every grid in the study; the baseline's
    // 3 nm p-side spike never reaches the asymptotic regime at these sizes.
    const MaterialParams mat = MaterialParams::sic_4h();
    DiodeDesign design;
    design.N_a = 1e16;
    design.N_n = 1e15;
    design.N_d = 2e16;
    design.d_l = 2.0;
    design.d = 10.0;
    design.d_r = 2.0;
    design.V = -20.0;
    GridConfig g1, g2, g4;
    g1.n_points = 1001;
    g2.n_points = 2001;
    g4.n_points = 4001;
    const PotentialSolution s1 = solve_poisson(design, mat, g1);
    const PotentialSolution s2 = solve_poisson(design, mat, g2);
    const PotentialSolution s4 = solve_poisson(design, mat, g4);

    // Compare on the coarse nodes (they coincide: 2i on medium, 4i on fine).
    double e12 = 0.0, e24 = 0.0;
    for (int i = 0; i < s1.z.size(); ++i) {
        e12 += std::pow(s1.phi[i] - s2.phi[2 * i], 2);
        e24 += std::pow(s2.phi[2 * i] - s4.phi[4 * i], 2);
    }
    e12 = std::sqrt(e12);
    e24 = std::sqrt(e24);
    const double order = std::log2(e12 / e24);
    INFO("coarse-medium ", e12, " medium-fine ", e24, " observed order ", order);
    CHECK(order > 1.5);
    CHECK(order < 3.0);
}

TEST_CASE("solution stability under grid doubling") {
    const MaterialParams mat = MaterialParams::sic_4h();
    const DiodeDesign design = DiodeDesign::baseline(-100.0);
    GridConfig g2, g4;
    g2.n_points = 2001;
    g4.n_points = 4001;
    const PotentialSolution a = solve_poisson(design, mat, g2);
    const PotentialSolution b = solve_poisson(design, mat, g4);
    double rms = 0.0;
    for (int i = 0; i < a.z.size(); ++i) rms += std::pow(a.phi[i] - b.phi[2 * i], 2);
    rms = std::sqrt(rms / a.z.size()) / std::abs(a.phi_inf);
    INFO("rms relative change under doubling: ", rms);
    // Measured 7.2e-5: the change is dominated by the sub-grid p-side
    // depletion spike and the n/n+ Debye tail, not by solver tolerance.
    CHECK(rms < 2e-4);
}

TEST_CASE("boundary neutrality of converged solutions") {
    const MaterialParams mat = MaterialParams::sic_4h();
    for (double V : {0.0, -5.0, -100.0, -400.0}) {
        const DiodeDesign design = DiodeDesign::baseline(V);
        const PotentialSolution sol = solve_poisson(design, mat);
        const int n = static_cast<int>(sol.z.size());
        const double rho_l = charge_density(sol.psi[0], sol.z[0], design, mat);
        const double rho_r = charge_density(sol.psi[n - 1], sol.z[n - 1], design, mat);
        CHECK(std::abs(rho_l) < 1e-6 * constants::q_e * design.N_a);
        CHECK(std::abs(rho_r) < 1e-6 * constants::q_e * design.N_d);
    }
}

TEST_CASE("depletion: critical voltage, full depletion, analytic cross-check") {
    const MaterialParams mat = MaterialParams::sic_4h();
    const DiodeDesign base = DiodeDesign::baseline(0.0);
    {
        const PotentialSolution sol = solve_poisson(base, mat);
        const DepletionProfile dep = depletion_profile(sol, base, mat);
        CHECK(std::abs(dep.V_c - (-370.0)) < 0.05 * 370.0);
    }
    {
        DiodeDesign d = base;
        const PotentialSolution sol0 = solve_poisson(d, mat);
        const double V_c = depletion_profile(sol0, d, mat).V_c;
        d.V = 1.1 * V_c;
        const PotentialSolution sol = solve_poisson(d, mat);
        const DepletionProfile dep = depletion_profile(sol, d, mat);
        CHECK(dep.fully_depleted_n);
        CHECK(dep.dn_tilde == doctest::Approx(d.d));
    }
    double prev = 0.0;
    for (double V : {-50.0, -100.0, -200.0, -300.0}) {
        DiodeDesign d = base;
        d.V = V;
        const PotentialSolution sol = solve_poisson(d, mat);
        const DepletionProfile dep = depletion_profile(sol, d, mat);
        REQUIRE_FALSE(dep.fully_depleted_n);
        CHECK(std::abs(dep.dn_tilde - dep.d_n_analytic) < 0.10 * dep.d_n_analytic);
        CHECK(dep.dn_tilde >= prev);  // wider depletion at stronger reverse bias
        prev = dep.dn_tilde;
    }
}

TEST_CASE("depletion widths stay inside their layers") {
    const MaterialParams mat = MaterialParams::sic_4h();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> voltage(-350.0, -1.0);
    for (int i = 0; i < 4; ++i) {
        DiodeDesign d = DiodeDesign::baseline(voltage(rng));
        const PotentialSolution sol = solve_poisson(d, mat);
        const DepletionProfile dep = depletion_profile(sol, d, mat);
        CHECK(dep.d_p >= 0.0);
        CHECK(dep.d_p <= d.d_l);
        CHECK(dep.dn_tilde >= 0.0);
        CHECK(dep.dn_tilde <= d.d);
        CHECK(dep.d_n_plus >= 0.0);
        CHECK(dep.d_n_plus <= d.d_r);
    }
}

TEST_SUITE_END();
