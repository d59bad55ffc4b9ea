//! Adaptive Dormand-Prince 5(4) integration of `d rho / dt = L_t(rho)` on a
//! truncated Fock basis.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase_space::FockMatrix;

/// Step control for [`evolve_fock_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Bound on the trace-norm error committed per step.
    pub step_tol: f64,
    pub max_steps: usize,
    /// Largest population allowed on the top Fock level before the cutoff is
    /// declared too small.
    pub population_limit: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { step_tol: 1e-12, max_steps: 2_000_000, population_limit: 1e-6 }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

fn combo(base: &DMatrix<Complex64>, h: f64, terms: &[(f64, &DMatrix<Complex64>)]) -> DMatrix<Complex64> {
    let mut out = base.clone();
    for (c, k) in terms {
        if *c != 0.0 {
            out.zip_apply(k, |o, k| *o += k * (h * c));
        }
    }
    out
}

/// [`evolve_fock_with`] using default step control; `steps_hint` sets the
/// initial step to `t_final / steps_hint`.
pub fn evolve_fock<G>(generator: G, rho0: &FockMatrix, t_final: f64, steps_hint: usize) -> Result<FockMatrix>
where
    G: Fn(&FockMatrix, f64) -> FockMatrix,
{
    evolve_fock_with(generator, rho0, t_final, steps_hint, &EvolveOptions::default())
}

/// Integrates from `t = 0` to `t_final`.
///
/// The step is accepted when `sqrt(dim)·‖E‖_F`, an upper bound on the trace
/// norm of the embedded error estimate, is below `opts.step_tol`.
pub fn evolve_fock_with<G>(
    generator: G,
    rho0: &FockMatrix,
    t_final: f64,
    steps_hint: usize,
    opts: &EvolveOptions,
) -> Result<FockMatrix>
where
    G: Fn(&FockMatrix, f64) -> FockMatrix,
{
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParam(format!("final time must be finite and >= 0, got {t_final}")));
    }
    let cutoff = rho0.cutoff();
    check_cutoff(rho0, opts.population_limit)?;
    if t_final == 0.0 {
        return Ok(rho0.clone());
    }
    let dim_scale = (rho0.dim() as f64).sqrt();
    let eval = |m: &DMatrix<Complex64>, t: f64| -> DMatrix<Complex64> {
        // from_matrix only fails on shape, which the integrator never changes
        let rho = FockMatrix::from_matrix(m.clone()).expect("square state");
        generator(&rho, t).into_matrix()
    };

    let mut y = rho0.matrix().clone();
    let mut t = 0.0;
    let mut h = t_final / steps_hint.max(1) as f64;
    let mut k1 = eval(&y, t);
    let mut steps = 0usize;

    while t < t_final {
        if steps >= opts.max_steps {
            return Err(Error::Convergence { evals: steps * 6, estimate: t_final - t, target: 0.0 });
        }
        steps += 1;
        let last = t + h >= t_final;
        if last {
            h = t_final - t;
        }
        let k2 = eval(&combo(&y, h, &[(A21, &k1)]), t + C2 * h);
        let k3 = eval(&combo(&y, h, &[(A31, &k1), (A32, &k2)]), t + C3 * h);
        let k4 = eval(&combo(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]), t + C4 * h);
        let k5 = eval(&combo(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]), t + C5 * h);
        let k6 = eval(&combo(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]), t + h);
        let y_new = combo(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = eval(&y_new, t + h);
        let err_m = combo(
            &DMatrix::zeros(y.nrows(), y.ncols()),
            h,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
        );
        let err = dim_scale * err_m.norm();
        if !err.is_finite() {
            return Err(Error::Domain("generator produced a non-finite value".into()));
        }

        if err <= opts.step_tol {
            t = if last { t_final } else { t + h };
            y = y_new;
            k1 = k7;
            let top = y[(cutoff, cutoff)].re;
            if top > opts.population_limit {
                return Err(Error::Cutoff { cutoff, population: top, limit: opts.population_limit });
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * (opts.step_tol / err).powf(0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if t + h <= t {
            return Err(Error::Convergence { evals: steps * 6, estimate: err, target: opts.step_tol });
        }
    }
    FockMatrix::from_matrix(y)
}

fn check_cutoff(rho: &FockMatrix, limit: f64) -> Result<()> {
    let c = rho.cutoff();
    let top = rho.get(c, c).re;
    if top > limit {
        return Err(Error::Cutoff { cutoff: c, population: top, limit });
    }
    Ok(())
}
