#include <doctest.h>

#include <cmath>

#include "diodeopt/errors.hpp"
#include "diodeopt/linewidth.hpp"
#include "oracles.hpp"

using namespace diodeopt;

TEST_SUITE_BEGIN("linewidth");

TEST_CASE("mirror symmetry of the p and n+ shells") {
    MaterialParams mat = MaterialParams::sic_4h();
    DiodeDesign d;
    d.N_a = 1e18;
    d.N_d = 1e18;
    d.N_n = 1e15;
    d.d_l = 0.3;
    d.d_r = 0.3;
    d.d = 2.0;
    DepletionProfile dep;
    dep.d_p = 0.05;
    dep.d_n_plus = 0.05;
    dep.dn_tilde = d.d;
    dep.fully_depleted_n = true;
    const DeltaEResult r = delta_E_total(d, dep, 0.5 * d.d, mat);
    CHECK(r.components.p == r.components.n_plus);
    CHECK(r.components.n_depleted == 0.0);  // no non-depleted n tail left
}

TEST_CASE("bulk carrier term scales as N^(2/3) and vanishes with density") {
    const MaterialParams mat = MaterialParams::sic_4h();
    DiodeDesign d = DiodeDesign::baseline();
    DepletionProfile dep;  // nothing depleted: defect sits among carriers
    dep.dn_tilde = 0.0;
    auto bulk = [&](double N_n) {
        DiodeDesign dd = d;
        dd.N_n = N_n;
        return delta_E_total(dd, dep, 5.0, mat).components.n_bulk;
    };
    const double c = 37.0;
    CHECK(bulk(c * 4e15) / bulk(4e15) == doctest::Approx(std::pow(c, 2.0 / 3.0)).epsilon(1e-9));
    CHECK(bulk(1e6) < 1e-6 * bulk(4e15));
}

TEST_CASE("domain errors") {
    const MaterialParams mat = MaterialParams::sic_4h();
    const DiodeDesign d = DiodeDesign::baseline();
    DepletionProfile dep;
    dep.dn_tilde = 1.0;
    CHECK_THROWS_AS(delta_E_total(d, dep, -1.0, mat), DomainError);
    CHECK_THROWS_AS(delta_E_total(d, dep, d.d, mat), DomainError);
    // Geometrically impossible: depletion wider than the layer.
    DepletionProfile bad = dep;
    bad.d_p = d.d_l + 1.0;
    CHECK_THROWS_AS(delta_E_total(d, bad, 0.5, mat), DomainError);
}

TEST_CASE("noise terms against the Monte-Carlo dipole sum") {
    const MaterialParams mat = MaterialParams::sic_4h();
    const DiodeDesign d = DiodeDesign::baseline(-50.0);
    const PotentialSolution sol = solve_poisson(d, mat);
    const DepletionProfile dep = depletion_profile(sol, d, mat);
    REQUIRE_FALSE(dep.fully_depleted_n);
    const double z = 0.85;
    const DeltaEResult r = delta_E_total(d, dep, z, mat);
    const double eps = mat.permittivity();

    // p shell: [d_p + z, d_l + z] at density N_a.
    {
        const double mc = std::sqrt(
            oracles::mc_slab_dipole_variance(d.N_a, dep.d_p + z, d.d_l + z, eps, 1234));
        CHECK(std::abs(r.components.p - mc) < 0.15 * mc);
    }
    // n+ shell: [d + d_n_plus - z, d + d_r - z] at density N_d.
    {
        const double mc = std::sqrt(oracles::mc_slab_dipole_variance(
            d.N_d, d.d + dep.d_n_plus - z, d.d + d.d_r - z, eps, 99));
        CHECK(std::abs(r.components.n_plus - mc) < 0.15 * mc);
    }
    // non-depleted n tail: [dn_tilde - z, d - z] at density N_n.
    {
        const double mc = std::sqrt(
            oracles::mc_slab_dipole_variance(d.N_n, dep.dn_tilde - z, d.d - z, eps, 2024));
        CHECK(std::abs(r.components.n_depleted - mc) < 0.15 * mc);
    }
    // Local-carrier term against a spherical shell from the inter-dopant
    // spacing outward (the closed form keeps only the leading N^(2/3) law).
    {
        DepletionProfile none;
        none.dn_tilde = 0.0;
        const double term = delta_E_total(d, none, z, mat).components.n_bulk;
        const double d_i_um = std::cbrt(1.0 / d.N_n) * 1e4;  // cm -> um
        const double mc = std::sqrt(
            oracles::mc_shell_dipole_variance(d.N_n, d_i_um, 50.0 * d_i_um, eps, 777));
        CHECK(std::abs(term - mc) < 0.15 * mc);
    }
}

TEST_CASE("linewidth scaling and the calibrated baseline point") {
    SpinCenterParams spin;
    CHECK(linewidth_majority(0.0, spin) == 0.0);
    SpinCenterParams doubled = spin;
    doubled.mu_z *= 2.0;
    CHECK(linewidth_majority(3.0, doubled) == doctest::Approx(2.0 * linewidth_majority(3.0, spin)));

    const MaterialParams mat = MaterialParams::sic_4h();
    const DiodeDesign d = DiodeDesign::baseline(-5.0);
    const PotentialSolution sol = solve_poisson(d, mat);
    const DepletionProfile dep = depletion_profile(sol, d, mat);
    const DeltaEResult r = delta_E_total(d, dep, 0.85, mat);
    CHECK(linewidth_majority(r.total, spin) == doctest::Approx(11.1).epsilon(0.10));
}

TEST_CASE("boundary recession decreases every shell term") {
    const MaterialParams mat = MaterialParams::sic_4h();
    const DiodeDesign d = DiodeDesign::baseline();
    DepletionProfile dep;
    dep.d_p = 0.05;
    dep.dn_tilde = 3.0;
    dep.d_n_plus = 0.1;
    const double z = 1.0;
    const DeltaEResult base = delta_E_total(d, dep, z, mat);
    {
        DepletionProfile wider = dep;
        wider.d_p = 0.10;
        CHECK(delta_E_total(d, wider, z, mat).components.p < base.components.p);
    }
    {
        DepletionProfile wider = dep;
        wider.dn_tilde = 4.0;
        CHECK(delta_E_total(d, wider, z, mat).components.n_depleted < base.components.n_depleted);
    }
    {
        DepletionProfile wider = dep;
        wider.d_n_plus = 0.2;
        CHECK(delta_E_total(d, wider, z, mat).components.n_plus < base.components.n_plus);
    }
}

TEST_CASE("gamma decreases with stronger reverse bias on the baseline") {
    const MaterialParams mat = MaterialParams::sic_4h();
    const SpinCenterParams spin;
    double prev = std::numeric_limits<double>::infinity();
    for (double V : {-5.0, -50.0, -150.0, -400.0, -700.0}) {
        const DefectOptimum opt = optimal_defect_position(DiodeDesign::baseline(V), mat, spin);
        CHECK(opt.gamma_opt <= prev);
        prev = opt.gamma_opt;
    }
}

TEST_CASE("optimal defect position: symmetry and the dense-scan oracle") {
    MaterialParams mat = MaterialParams::sic_4h();
    const SpinCenterParams spin;

    SUBCASE("mirror-symmetric fully depleted diode centers the defect") {
        // Exact mirror symmetry: equal masses, dopant levels mirrored in the gap.
        mat.m_c = mat.m_v = 0.6;
        mat.eps_a = 0.2;
        mat.eps_d = mat.E_g - 0.2;
        DiodeDesign d;
        d.N_a = 1e18;
        d.N_d = 1e18;
        d.N_n = 1e15;
        d.d_l = 0.3;
        d.d_r = 0.3;
        d.d = 2.0;
        d.V = -30.0;  // well past full depletion of the n region
        const DefectOptimum opt = optimal_defect_position(d, mat, spin);
        CHECK(std::abs(opt.z_opt - 0.5 * d.d) < 2e-3 * d.d);
    }

    SUBCASE("baseline near full depletion centers the defect") {
        const DefectOptimum opt = optimal_defect_position(DiodeDesign::baseline(-400.0), mat, spin);
        CHECK(std::abs(opt.z_opt - 5.0) < 0.05 * 5.0);
    }

    SUBCASE("partially depleted asymmetric case matches a brute-force scan") {
        const DiodeDesign d = DiodeDesign::baseline(-50.0);
        const PotentialSolution sol = solve_poisson(d, mat);
        const DepletionProfile dep = depletion_profile(sol, d, mat);
        const DefectOptimum opt = optimal_defect_position(d, dep, mat, spin);
        double best_z = 0.0, best_g = std::numeric_limits<double>::infinity();
        const int n = 10000;
        for (int i = 1; i < n; ++i) {
            const double z = d.d * i / static_cast<double>(n);
            const double g = linewidth_majority(delta_E_total(d, dep, z, mat).total, spin);
            if (g < best_g) {
                best_g = g;
                best_z = z;
            }
        }
        CHECK(std::abs(opt.z_opt - best_z) <= d.d * 1e-3);
        CHECK(opt.gamma_opt <= best_g * (1.0 + 1e-9));
    }
}

TEST_CASE("line shapes: normalization and widths") {
    const double g = 2.7e6;
    // Dyadically graded panels: resolves the peak and reaches far enough into
    // the Lorentzian tails for 1e-6 normalization.
    auto integrate = [&](Lineshape kind) {
        auto f = [&](double w) { return lineshape_eval(w, kind, g); };
        double total = oracles::gauss_legendre(f, -g, g, 16);
        for (int k = 0; k <= 22; ++k) {
            const double a = g * std::pow(2.0, k), b = 2.0 * a;
            total += oracles::gauss_legendre(f, a, b, 8);
            total += oracles::gauss_legendre(f, -b, -a, 8);
        }
        return total;
    };
    CHECK(integrate(Lineshape::gaussian) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(integrate(Lineshape::lorentzian) == doctest::Approx(1.0).epsilon(1e-6));
    // FWHM: Gaussian 4 g sqrt(ln 2), Lorentzian 2 g.
    {
        const double peak = lineshape_eval(0.0, Lineshape::gaussian, g);
        const double w_half = 2.0 * g * std::sqrt(std::log(2.0));
        CHECK(lineshape_eval(w_half, Lineshape::gaussian, g) == doctest::Approx(0.5 * peak));
    }
    {
        const double peak = lineshape_eval(0.0, Lineshape::lorentzian, g);
        CHECK(lineshape_eval(g, Lineshape::lorentzian, g) == doctest::Approx(0.5 * peak));
    }
    CHECK_THROWS_AS(lineshape_eval(0.0, Lineshape::gaussian, 0.0), DomainError);
}

TEST_SUITE_END();
