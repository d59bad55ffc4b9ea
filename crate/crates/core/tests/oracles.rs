//! Cross-checks between independent routes to the same quantity.

use approx::assert_relative_eq;
use proptest::prelude::*;

use cat_decoherence::channels::{
    sigma_detuned, sigma_general, t_w_classical_closed, Attenuation, ClassicalChannel, DilationChannel, NoiseParams,
    PhysicalParams,
};
use cat_decoherence::experiments::{sweep_alpha, sweep_noise, Indicator, SweepSpec};
use cat_decoherence::fock_oracle::{evolve_cat, GeneratorKind};
use cat_decoherence::indicators::{klyshko_b1_at, nonclassical_depth, vogel_sup};
use cat_decoherence::numerics::Tolerance;
use cat_decoherence::phase_space::{density_matrix_from_chi, photon_pmf, purity_from_chi, quasiprob_at, SOrder};
use cat_decoherence::states::{fringe_visibility_for, wigner_components, AttenuatedCat, EvenCatState, GaussianDamping};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn cat(alpha: f64) -> EvenCatState {
    EvenCatState::new(alpha).unwrap()
}

/// `π⁻¹∫χ(ξ, 0)² d²ξ` for the isotropically attenuated cat, integrated by
/// hand: with `c = 1 + 2ν` and `w = e^{−2α²}`,
/// `[(1 + e^{−4α²/c})/2 + w²(1 + e^{4α²/c})/2 + 2w] / (c(1 + w)²)`.
fn purity_closed_form(alpha: f64, nu: f64) -> f64 {
    let c = 1.0 + 2.0 * nu;
    let w = (-2.0 * alpha * alpha).exp();
    let k = 4.0 * alpha * alpha / c;
    (0.5 * (1.0 + (-k).exp()) + 0.5 * w * w * (1.0 + k.exp()) + 2.0 * w) / (c * (1.0 + w) * (1.0 + w))
}

#[test]
fn husimi_is_wigner_with_extra_half_damping() {
    // χ(ξ, −1) = χ(ξ, 0) e^{−|ξ|²/2}, so Q is W of a state damped by 1/2 more
    for (alpha, a_u, a_v) in [(1.0, 0.1, 0.1), (2.0, 0.4, 0.0), (0.7, 0.0, 0.3)] {
        let s = cat(alpha);
        let damping = GaussianDamping::new(a_u, a_v).unwrap();
        let widened = GaussianDamping::new(a_u + 0.5, a_v + 0.5).unwrap();
        let chi = AttenuatedCat::new(s, damping);
        for (x, y) in [(0.0, 0.0), (alpha, 0.3), (-0.4, 1.1), (1.7, -0.8)] {
            let q = quasiprob_at(&chi, SOrder::ANTINORMAL, x, y, tol()).unwrap();
            let expected = wigner_components(&s, widened, x, y).total();
            assert!((q - expected).abs() < 1e-10, "alpha={alpha} ({x}, {y}): {q} vs {expected}");
        }
    }
}

#[test]
fn purity_three_ways() {
    for (alpha, nu) in [(1.0, 0.0), (1.0, 0.3), (2.0, 0.5), (0.5, 1.0)] {
        let chi = AttenuatedCat::isotropic(cat(alpha), nu).unwrap();
        let expected = purity_closed_form(alpha, nu);
        let from_chi = purity_from_chi(&chi, tol()).unwrap();
        let from_fock = density_matrix_from_chi(&chi, 50, tol().scaled(100.0)).unwrap().purity();
        assert_relative_eq!(from_chi, expected, max_relative = 1e-9);
        assert_relative_eq!(from_fock, expected, max_relative = 1e-8);
    }
}

#[test]
fn pmf_matches_integrated_populations() {
    let (alpha, kappa, t) = (1.2, 1.0, 0.8);
    let nu = 0.5 * kappa * t * t;
    let rho = evolve_cat(alpha, kappa, t, 50, GeneratorKind::Isotropic).unwrap();
    let pops = rho.populations();
    let chi = AttenuatedCat::isotropic(cat(alpha), nu).unwrap();
    let mut total = 0.0;
    for (n, &pop) in pops.iter().enumerate().take(25) {
        let p = photon_pmf(&chi, n, tol()).unwrap().raw;
        assert!((p - pop).abs() < 1e-9, "n={n}: {p} vs {pop}");
        total += p;
    }
    assert!((total - 1.0).abs() < 1e-8, "sum {total}");
}

#[test]
fn position_generator_matches_anisotropic_damping() {
    let (alpha, kappa, t) = (1.5, 1.0, 0.7);
    let rho = evolve_cat(alpha, kappa, t, 50, GeneratorKind::Position).unwrap();
    let n = 0.5 * kappa * t * t;
    let chi = AttenuatedCat::new(cat(alpha), GaussianDamping::position_dephasing(n).unwrap());
    let recon = density_matrix_from_chi(&chi, 50, tol().scaled(100.0)).unwrap();
    assert!(rho.trace_distance(&recon) < 1e-8);
}

#[test]
fn fock_purity_is_nonincreasing() {
    let mut last = f64::INFINITY;
    for i in 0..8 {
        let t = 0.2 * i as f64;
        let rho = evolve_cat(1.0, 1.0, t, 45, GeneratorKind::Isotropic).unwrap();
        assert!(rho.purity() <= last + 1e-13, "t={t}");
        assert_eq!(rho.odd_parity_coherence(), 0.0);
        last = rho.purity();
    }
}

#[test]
fn alpha_sweep_is_deterministic() {
    let mut spec = SweepSpec::new(PhysicalParams::reference_defaults());
    spec.alpha_grid = vec![0.8, 1.3, 2.0];
    let a = sweep_alpha(&spec).unwrap();
    let b = sweep_alpha(&spec).unwrap();
    assert_eq!(a, b);
    for row in &a {
        assert_relative_eq!(row.tau_dec.unwrap(), 1.0 / (2.0 * row.alpha), max_relative = 1e-14);
        assert!(row.tau_v.unwrap() < 1.0 && row.tau_k.unwrap() < row.tau_v.unwrap());
    }
}

fn small_noise_spec() -> SweepSpec {
    let mut spec = SweepSpec::new(PhysicalParams::reference_defaults());
    spec.gamma_grid = cat_decoherence::experiments::logspace(-8.0, -4.0, 17);
    spec.lambda_grid = cat_decoherence::experiments::logspace(-8.0, -4.0, 17);
    spec
}

#[test]
fn more_noise_means_faster_loss() {
    let spec = small_noise_spec();
    let cells = sweep_noise(&spec).unwrap();
    let n_ind = spec.indicators.len();
    let n_l = spec.lambda_grid.len();
    for g in 0..spec.gamma_grid.len() {
        for k in 0..n_ind {
            let times: Vec<f64> = (0..n_l).map(|l| cells[(g * n_l + l) * n_ind + k].t_classical.unwrap()).collect();
            assert!(times.windows(2).all(|w| w[1] < w[0]));
        }
    }
}

#[test]
fn wigner_contour_matches_closed_form_crossing() {
    let spec = small_noise_spec();
    let cells = sweep_noise(&spec).unwrap();
    let t_grav = DilationChannel::from_params(&spec.params).unwrap().time_at(0.5).unwrap();
    for &g in &spec.gamma_grid {
        let row: Vec<_> = cells.iter().filter(|c| c.gamma == g && c.indicator == Indicator::Wigner).collect();
        for pair in row.windows(2) {
            let (r0, r1) = (pair[0].ratio.unwrap(), pair[1].ratio.unwrap());
            // the grid brackets the ratio = 1 contour iff the closed form does
            let closed = |l: f64| t_w_classical_closed(&NoiseParams::resonant(l, g).unwrap()).unwrap() / t_grav;
            assert_eq!(
                (r0 - 1.0).signum() != (r1 - 1.0).signum(),
                (closed(pair[0].lambda) - 1.0).signum() != (closed(pair[1].lambda) - 1.0).signum()
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sigma_quadrature_matches_closed_form(
        lg in -1.0f64..1.0, ll in -1.0f64..1.0, delta in 0.0f64..3.0, t in 0.05f64..5.0,
    ) {
        let noise = NoiseParams::new(10f64.powf(ll), 10f64.powf(lg), delta).unwrap();
        let q = sigma_general(&noise, t, Tolerance::new(1e-13, 1e-11, 10_000_000).unwrap()).unwrap();
        let c = sigma_detuned(&noise, t);
        prop_assert!((q - c).abs() <= 1e-9 * c.abs().max(1e-3), "{} vs {}", q, c);
    }

    #[test]
    fn indicators_depend_only_on_attenuation(
        alpha in 0.6f64..2.5, t1 in 0.1f64..1.3, lg in -2.0f64..2.0, ll in -2.0f64..2.0,
    ) {
        let grav = DilationChannel::new(1.0).unwrap();
        let classical = ClassicalChannel::new(NoiseParams::resonant(10f64.powf(ll), 10f64.powf(lg)).unwrap());
        let nu = grav.nu(t1);
        let t2 = classical.time_at(nu).unwrap();
        let nu2 = classical.nu(t2);
        prop_assert!((nu2 - nu).abs() <= 1e-12 * nu);
        let s = cat(alpha);
        prop_assert!((nonclassical_depth(&grav, t1) - nonclassical_depth(&classical, t2)).abs() < 1e-12);
        let f1 = fringe_visibility_for(&s, GaussianDamping::isotropic(nu).unwrap());
        let f2 = fringe_visibility_for(&s, GaussianDamping::isotropic(nu2).unwrap());
        prop_assert!((f1 - f2).abs() <= 1e-11 * f1.max(1e-300));
        let v1 = vogel_sup(&s, nu, tol()).unwrap().value;
        let v2 = vogel_sup(&s, nu2, tol()).unwrap().value;
        prop_assert!((v1 - v2).abs() <= 1e-10 * v1, "{} vs {}", v1, v2);
        let b1 = klyshko_b1_at(&s, nu, tol()).unwrap();
        let b2 = klyshko_b1_at(&s, nu2, tol()).unwrap();
        prop_assert!((b1 - b2).abs() < 1e-9);
    }
}

#[test]
fn loss_times_stable_under_tighter_quadrature() {
    use cat_decoherence::indicators::{tau_k, tau_v};
    let ch = DilationChannel::new(1.0).unwrap();
    let loose = Tolerance::new(1e-10, 1e-10, 50_000_000).unwrap();
    for alpha in [0.9, 1.6, 2.7] {
        for (a, b) in [
            (tau_v(alpha, &ch, loose).unwrap(), tau_v(alpha, &ch, loose.scaled(0.5)).unwrap()),
            (tau_k(alpha, &ch, loose).unwrap(), tau_k(alpha, &ch, loose.scaled(0.5)).unwrap()),
        ] {
            assert_relative_eq!(a, b, max_relative = 1e-8);
        }
    }
}
