//! Gaussian attenuation channels `χ_t = χ_0 e^{−ν(t)|ξ|²}` and the
//! dimensional inputs that fix them.
//!
//! Gravitational time dilation gives `ν(t) = κt²/2`; classical
//! Ornstein-Uhlenbeck noise gives `ν(t) = σ(t)`. All times are SI seconds.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::{
    find_root, integrate_2d_box, lambert_w0_plus_one, lambert_w_from_offset, Bracket, LambertBranch, Tolerance,
};

/// CODATA-2018 constants and the default surface gravity.
pub mod constants {
    /// Reduced Planck constant, J s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Speed of light, m/s.
    pub const C: f64 = 299_792_458.0;
    /// Boltzmann constant, J/K.
    pub const K_B: f64 = 1.380_649e-23;
    /// Newtonian constant of gravitation, m³/(kg s²).
    pub const G: f64 = 6.674_30e-11;
    /// Default gravitational acceleration, m/s².
    pub const G_ACCEL: f64 = 9.81;
    /// Earth mass, kg.
    pub const EARTH_MASS: f64 = 5.972e24;
    /// Mean Earth radius, m.
    pub const EARTH_RADIUS: f64 = 6.371e6;
}

use constants::{C, G, HBAR, K_B};

/// Dimensional inputs. Every field is optional; accessors report
/// [`Error::MissingParam`] for quantities that cannot be derived.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhysicalParams {
    pub mass: Option<f64>,
    pub trap_freq: Option<f64>,
    pub grav_accel: Option<f64>,
    pub temperature: Option<f64>,
    pub n_internal: Option<f64>,
    pub delta_e: Option<f64>,
    pub superposition_size: Option<f64>,
    pub alpha: Option<f64>,
    pub source_mass: Option<f64>,
    pub r_sys: Option<f64>,
    pub r_obs: Option<f64>,
    /// Mean internal energy. Accepted for completeness; it only shifts the
    /// unitary part of the dynamics and never enters a result.
    pub mean_energy: Option<f64>,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub detuning: Option<f64>,
}

/// Recognized parameter-file keys.
pub const PARAM_KEYS: [&str; 15] = [
    "mass",
    "trap_freq",
    "grav_accel",
    "temperature",
    "n_internal",
    "delta_e",
    "superposition_size",
    "alpha",
    "source_mass",
    "r_sys",
    "r_obs",
    "mean_energy",
    "lambda",
    "gamma",
    "detuning",
];

impl PhysicalParams {
    /// Trapped-particle setting used for the noise-ratio maps:
    /// `Δx = 1 µm`, `α = √2`, `T = 300 K`, `N = 10⁵`, `ω₀ = 2π × 10⁷ rad/s`.
    pub fn reference_defaults() -> Self {
        Self {
            superposition_size: Some(1e-6),
            alpha: Some(std::f64::consts::SQRT_2),
            temperature: Some(300.0),
            n_internal: Some(1e5),
            grav_accel: Some(constants::G_ACCEL),
            trap_freq: Some(2.0 * std::f64::consts::PI * 1e7),
            ..Self::default()
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParam(format!("cannot read {}: {e}", path.display())))?;
        text.parse()
    }

    fn slot(&mut self, key: &str) -> Option<&mut Option<f64>> {
        Some(match key {
            "mass" => &mut self.mass,
            "trap_freq" => &mut self.trap_freq,
            "grav_accel" => &mut self.grav_accel,
            "temperature" => &mut self.temperature,
            "n_internal" => &mut self.n_internal,
            "delta_e" => &mut self.delta_e,
            "superposition_size" => &mut self.superposition_size,
            "alpha" => &mut self.alpha,
            "source_mass" => &mut self.source_mass,
            "r_sys" => &mut self.r_sys,
            "r_obs" => &mut self.r_obs,
            "mean_energy" => &mut self.mean_energy,
            "lambda" => &mut self.lambda,
            "gamma" => &mut self.gamma,
            "detuning" => &mut self.detuning,
            _ => return None,
        })
    }

    fn get(&self, key: &str) -> Option<f64> {
        let mut copy = self.clone();
        copy.slot(key).and_then(|s| *s)
    }

    /// Sets one field by key, rejecting unknown keys and invalid values.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let (ok, need) = match key {
            "detuning" | "mean_energy" => (value.is_finite(), "finite"),
            "delta_e" => (value.is_finite() && value >= 0.0, "finite and >= 0"),
            _ => (value.is_finite() && value > 0.0, "finite and > 0"),
        };
        if !ok && self.slot(key).is_some() {
            return Err(Error::InvalidParam(format!("{key} must be {need}, got {value}")));
        }
        let slot = self.slot(key).ok_or_else(|| Error::InvalidParam(format!("unknown parameter key '{key}'")))?;
        *slot = Some(value);
        Ok(())
    }

    fn require(&self, key: &str) -> Result<f64> {
        self.get(key).ok_or_else(|| Error::MissingParam(key.to_string()))
    }

    pub fn grav_accel(&self) -> f64 {
        self.grav_accel.unwrap_or(constants::G_ACCEL)
    }

    pub fn alpha(&self) -> Result<f64> {
        self.require("alpha")
    }

    pub fn trap_freq(&self) -> Result<f64> {
        self.require("trap_freq")
    }

    /// Zero-point spread `Δx₀`, from `√(ħ/(mω₀))` or from `Δx/(2α)`.
    ///
    /// When both pairs are present they must agree to 1e-9 relative.
    pub fn position_spread(&self) -> Result<f64> {
        let from_trap = match (self.mass, self.trap_freq) {
            (Some(m), Some(w)) => Some((HBAR / (m * w)).sqrt()),
            _ => None,
        };
        let from_size = match (self.superposition_size, self.alpha) {
            (Some(dx), Some(a)) => Some(dx / (2.0 * a)),
            _ => None,
        };
        match (from_trap, from_size) {
            (Some(a), Some(b)) => {
                if (a - b).abs() > 1e-9 * a.max(b) {
                    return Err(Error::InvalidParam(format!(
                        "sqrt(hbar/(m w0)) = {a:e} m disagrees with superposition_size/(2 alpha) = {b:e} m"
                    )));
                }
                Ok(a)
            }
            (Some(a), None) | (None, Some(a)) => Ok(a),
            (None, None) => Err(Error::MissingParam(
                "position spread: need mass and trap_freq, or superposition_size and alpha".into(),
            )),
        }
    }

    /// Spatial size of the superposition, `Δx = 2αΔx₀`.
    pub fn superposition_size(&self) -> Result<f64> {
        if let Some(dx) = self.superposition_size {
            return Ok(dx);
        }
        Ok(2.0 * self.alpha()? * self.position_spread()?)
    }

    /// Internal energy spread: explicit `delta_e`, else `√N k_B T`.
    pub fn delta_e(&self) -> Result<f64> {
        if let Some(de) = self.delta_e {
            return Ok(de);
        }
        match (self.n_internal, self.temperature) {
            (Some(n), Some(t)) => delta_e_thermal(n, t),
            _ => Err(Error::MissingParam("delta_e, or n_internal and temperature".into())),
        }
    }

    pub fn noise(&self) -> Result<NoiseParams> {
        NoiseParams::new(self.require("lambda")?, self.require("gamma")?, self.detuning.unwrap_or(0.0))
    }

    /// Parameter-file text that parses back to `self`.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        for key in PARAM_KEYS {
            if let Some(v) = self.get(key) {
                out.push_str(&format!("{key} = {v:e}\n"));
            }
        }
        out
    }

    /// Compact single-line echo, `key=value;...`.
    pub fn echo(&self) -> String {
        PARAM_KEYS.iter().filter_map(|k| self.get(k).map(|v| format!("{k}={v:e}"))).collect::<Vec<_>>().join(";")
    }
}

impl FromStr for PhysicalParams {
    type Err = Error;

    /// Flat `key = value` lines; `#` starts a comment. Keys may not repeat.
    fn from_str(text: &str) -> Result<Self> {
        let mut params = PhysicalParams::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidParam(format!("line {}: expected key = value, got '{line}'", i + 1)))?;
            let key = key.trim();
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParam(format!("line {}: '{}' is not a number", i + 1, value.trim())))?;
            if !seen.insert(key.to_string()) {
                return Err(Error::InvalidParam(format!("line {}: duplicate key '{key}'", i + 1)));
            }
            params.set(key, value)?;
        }
        Ok(params)
    }
}

/// `κ = Δx₀² (ΔE₀ g/(ħc²))²`, in 1/s².
pub fn kappa(params: &PhysicalParams) -> Result<f64> {
    let dx0 = params.position_spread()?;
    let rate = params.delta_e()? * params.grav_accel() / (HBAR * C * C);
    Ok(dx0 * dx0 * rate * rate)
}

/// Thermal internal-energy spread `√N k_B T`, in J.
pub fn delta_e_thermal(n: f64, temperature: f64) -> Result<f64> {
    if !(n >= 1.0 && temperature > 0.0) {
        return Err(Error::InvalidParam(format!("need n_internal >= 1 and temperature > 0, got {n}, {temperature}")));
    }
    Ok(n.sqrt() * K_B * temperature)
}

/// A channel's attenuation exponent as a function of time.
pub trait Attenuation: Sync {
    fn nu(&self, t: f64) -> f64;

    fn label(&self) -> String;

    /// Earliest `t ≥ 0` with `ν(t) = target`.
    fn time_at(&self, target: f64) -> Result<f64>;
}

/// Time-dilation channel, `ν(t) = κt²/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilationChannel {
    kappa: f64,
}

impl DilationChannel {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParam(format!("kappa must be finite and >= 0, got {kappa}")));
        }
        Ok(Self { kappa })
    }

    pub fn from_params(params: &PhysicalParams) -> Result<Self> {
        Self::new(kappa(params)?)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

impl Attenuation for DilationChannel {
    fn nu(&self, t: f64) -> f64 {
        0.5 * self.kappa * t * t
    }

    fn label(&self) -> String {
        "dilation".into()
    }

    fn time_at(&self, target: f64) -> Result<f64> {
        if target < 0.0 {
            return Err(Error::Domain(format!("attenuation target must be >= 0, got {target}")));
        }
        if target == 0.0 {
            return Ok(0.0);
        }
        if self.kappa == 0.0 {
            return Err(Error::NoCrossing { what: format!("nu = {target}"), limit: f64::INFINITY });
        }
        Ok((2.0 * target / self.kappa).sqrt())
    }
}

/// Ornstein-Uhlenbeck noise: coupling `lambda`, inverse memory time `gamma`
/// (both 1/s) and detuning `detuning` (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub lambda: f64,
    pub gamma: f64,
    pub detuning: f64,
}

impl NoiseParams {
    pub fn new(lambda: f64, gamma: f64, detuning: f64) -> Result<Self> {
        if !(lambda > 0.0 && gamma > 0.0 && lambda.is_finite() && gamma.is_finite() && detuning.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "noise needs lambda > 0, gamma > 0, finite detuning (got {lambda}, {gamma}, {detuning})"
            )));
        }
        Ok(Self { lambda, gamma, detuning })
    }

    pub fn resonant(lambda: f64, gamma: f64) -> Result<Self> {
        Self::new(lambda, gamma, 0.0)
    }
}

/// `x + e^{−x} − 1`, accurate for small `x`.
fn ou_shape(x: f64) -> f64 {
    if x < 1e-2 {
        // alternating Taylor series; the x^10 term is below one ulp
        let mut term = x * x / 2.0;
        let mut sum = term;
        for k in 3..=10 {
            term *= -x / k as f64;
            sum += term;
        }
        sum
    } else {
        x + (-x).exp_m1()
    }
}

/// `σ(t) = λt + (λ/γ)(e^{−γt} − 1)` for resonant coupling.
pub fn sigma_resonant(noise: &NoiseParams, t: f64) -> f64 {
    noise.lambda / noise.gamma * ou_shape(noise.gamma * t)
}

/// `σ(t)` for detuned coupling, `λγ Re[t/z − (1 − e^{−zt})/z²]` with `z = γ − iδ`.
pub fn sigma_detuned(noise: &NoiseParams, t: f64) -> f64 {
    if noise.detuning == 0.0 {
        return sigma_resonant(noise, t);
    }
    let z = num_complex::Complex64::new(noise.gamma, -noise.detuning);
    let val = t / z - (1.0 - (-z * t).exp()) / (z * z);
    noise.lambda * noise.gamma * val.re
}

/// `σ(t) = ∫₀ᵗ∫₀ᵗ cos[δ(s₁ − s₂)] K(s₁, s₂) ds₁ ds₂` with the
/// Ornstein-Uhlenbeck kernel `K = ½λγ e^{−γ|s₁ − s₂|}`, by quadrature.
///
/// The symmetric square is folded onto the triangle `s₂ < s₁`, then mapped
/// to a rectangle with `s₂ = w s₁`.
pub fn sigma_general(noise: &NoiseParams, t: f64, tol: Tolerance) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let (g, d) = (noise.gamma, noise.detuning);
    let scale = noise.lambda * noise.gamma;
    let r = integrate_2d_box(
        |s1, w| {
            let tau = s1 * (1.0 - w);
            s1 * (d * tau).cos() * (-g * tau).exp()
        },
        (0.0, t),
        (0.0, 1.0),
        Tolerance { abs: tol.abs / scale, ..tol },
    )?;
    Ok(scale * r.value)
}

/// Classical-noise channel, `ν(t) = σ(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalChannel {
    noise: NoiseParams,
}

impl ClassicalChannel {
    pub fn new(noise: NoiseParams) -> Self {
        Self { noise }
    }

    pub fn noise(&self) -> &NoiseParams {
        &self.noise
    }
}

impl Attenuation for ClassicalChannel {
    fn nu(&self, t: f64) -> f64 {
        sigma_detuned(&self.noise, t)
    }

    fn label(&self) -> String {
        "classical".into()
    }

    /// Resonant noise inverts in closed form,
    /// `t = γ⁻¹[1 + γν/λ + W₀(−e^{−1−γν/λ})]`; detuned noise is bracketed
    /// and solved numerically.
    fn time_at(&self, target: f64) -> Result<f64> {
        if target < 0.0 {
            return Err(Error::Domain(format!("attenuation target must be >= 0, got {target}")));
        }
        if target == 0.0 {
            return Ok(0.0);
        }
        let NoiseParams { lambda, gamma, detuning } = self.noise;
        let b = gamma * target / lambda;
        if detuning == 0.0 {
            // argument −e^{−1−b} as the branch-point offset 1 − e^{−b}
            let y = lambert_w0_plus_one(-(-b).exp_m1())?;
            return Ok((y + b) / gamma);
        }
        let mut hi = target / lambda + 1.0 / gamma;
        let limit = 1e6 * hi * (1.0 + (detuning / gamma).powi(2));
        while self.nu(hi) < target {
            hi *= 2.0;
            if hi > limit {
                return Err(Error::NoCrossing { what: format!("sigma = {target}"), limit });
            }
        }
        find_root(|t| self.nu(t) - target, Bracket::new(0.0, hi)?, Tolerance::new(1e-300, 1e-15, 10_000)?)
    }
}

/// Time at which classical noise erases Wigner negativity, `σ(t_W) = 1/2`:
/// `t_W = (γ + 2λ)/(2γλ) + γ⁻¹ W₀(−e^{−1−γ/(2λ)})`.
pub fn t_w_classical_closed(noise: &NoiseParams) -> Result<f64> {
    ClassicalChannel::new(NoiseParams { detuning: 0.0, ..*noise }).time_at(0.5)
}

/// The same crossing time written with the branch `W_{−1}`; real for every
/// `γ, λ > 0` but never a root of `σ(t) = 1/2`.
pub fn t_w_classical_other_branch(noise: &NoiseParams) -> Result<f64> {
    let b = noise.gamma / (2.0 * noise.lambda);
    if b <= 1.0 {
        let w = lambert_w_from_offset(LambertBranch::MinusOne, -(-b).exp_m1())?;
        return Ok((1.0 + w + b) / noise.gamma);
    }
    // the argument −e^{−1−b} underflows for large b; solve for y = 1 + b + W
    // in log form, y + ln(1 + b − y) = 0 with y < 0
    let mut y = -b.ln_1p();
    for _ in 0..50 {
        let d = 1.0 + b - y;
        let step = (y + d.ln()) / (1.0 - 1.0 / d);
        y -= step;
        if step.abs() <= 4.0 * f64::EPSILON * y.abs() {
            break;
        }
    }
    Ok(y / noise.gamma)
}

/// Interferometric visibility `V(t) = (1 + (k_B T g Δx t/(ħc²))²)^{−N/2}`.
pub fn brukner_visibility(n: f64, temperature: f64, g: f64, dx: f64, t: f64) -> f64 {
    let z = K_B * temperature * g * dx * t / (HBAR * C * C);
    (-0.5 * n * (z * z).ln_1p()).exp()
}

/// `τ̄_dec = √(2/N) ħc²/(k_B T g Δx)`, the Gaussian time scale of
/// [`brukner_visibility`].
pub fn tau_bar_dec(n: f64, temperature: f64, g: f64, dx: f64) -> f64 {
    (2.0 / n).sqrt() * HBAR * C * C / (K_B * temperature * g * dx)
}

/// Schwarzschild radius `2GM/c²`.
pub fn schwarzschild_radius(mass: f64) -> f64 {
    2.0 * G * mass / (C * C)
}

/// `a_obs/a_sys` with `a = √(1 − r_s/r)`; converts a system-frame time to
/// the observer frame.
pub fn observer_dilation_factor(mass: f64, r_sys: f64, r_obs: f64) -> Result<f64> {
    Ok(1.0 + observer_dilation_excess(mass, r_sys, r_obs)?)
}

/// `a_obs/a_sys − 1`, without the cancellation of forming the ratio first.
pub fn observer_dilation_excess(mass: f64, r_sys: f64, r_obs: f64) -> Result<f64> {
    if !(mass >= 0.0 && mass.is_finite()) {
        return Err(Error::InvalidParam(format!("source mass must be finite and >= 0, got {mass}")));
    }
    let rs = schwarzschild_radius(mass);
    for r in [r_sys, r_obs] {
        if !(r > rs) {
            return Err(Error::InsideHorizon { r, r_s: rs });
        }
    }
    let ln_obs = if r_obs.is_infinite() { 0.0 } else { (-rs / r_obs).ln_1p() };
    Ok((0.5 * (ln_obs - (-rs / r_sys).ln_1p())).exp_m1())
}

impl fmt::Display for PhysicalParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.echo())
    }
}
