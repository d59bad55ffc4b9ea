//! Parameter sweeps over amplitude and noise strength, and a report auditing
//! the relations between the closed-form decoherence times.
//!
//! - [`sweep_alpha`]: loss times under time dilation as multiples of `τ_W`.
//! - [`sweep_noise`]: classical over gravitational loss time on a `(γ, λ)`
//!   grid, both rates given in units of the trap frequency `ω₀`.
//! - [`consistency_report`]: `τ_dec`, `τ̄_dec`, `τ_p` and their ratios.
//!
//! Rows are evaluated in parallel and merged in grid order, so output does
//! not depend on the thread count.

use std::f64::consts::SQRT_2;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::channels::{
    constants::{C, HBAR},
    kappa, tau_bar_dec, Attenuation, ClassicalChannel, DilationChannel, NoiseParams, PhysicalParams,
};
use crate::error::{Error, Result};
use crate::indicators::{tau_dec_dilation, Thresholds};
use crate::numerics::Tolerance;

/// `catdec <version> <command> <params>`, written as a `#` comment at the
/// top of every output file.
pub fn header_comment(command: &str, echo: &str) -> String {
    format!("catdec {} {command} {echo}", env!("CARGO_PKG_VERSION"))
}

/// The five loss indicators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Indicator {
    Decoherence,
    Depth,
    Wigner,
    Vogel,
    Klyshko,
}

impl Indicator {
    pub const ALL: [Indicator; 5] =
        [Indicator::Decoherence, Indicator::Depth, Indicator::Wigner, Indicator::Vogel, Indicator::Klyshko];

    pub fn name(self) -> &'static str {
        match self {
            Indicator::Decoherence => "tau_dec",
            Indicator::Depth => "tau_p",
            Indicator::Wigner => "tau_w",
            Indicator::Vogel => "tau_v",
            Indicator::Klyshko => "tau_k",
        }
    }

    pub fn threshold(self, th: &Thresholds) -> f64 {
        match self {
            Indicator::Decoherence => th.nu_dec,
            Indicator::Depth => th.nu_p,
            Indicator::Wigner => th.nu_w,
            Indicator::Vogel => th.nu_v,
            Indicator::Klyshko => th.nu_k,
        }
    }
}

/// How the classical loss time enters the ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RatioConvention {
    /// Classical time in units of `1/ω₀` set against the gravitational time
    /// in seconds. Rates are taken in units of `ω₀` and not rescaled.
    #[default]
    ReducedClassical,
    /// Both times in seconds: rates are multiplied by `ω₀` before solving.
    Consistent,
}

/// Grids and fixed parameters for both sweeps.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub alpha_grid: Vec<f64>,
    /// `γ/ω₀`.
    pub gamma_grid: Vec<f64>,
    /// `λ/ω₀`.
    pub lambda_grid: Vec<f64>,
    pub params: PhysicalParams,
    pub indicators: Vec<Indicator>,
    pub convention: RatioConvention,
    pub tol: Tolerance,
}

impl SweepSpec {
    /// α over `[0.5, 4]` (36 points), `γ/ω₀` and `λ/ω₀` over `[1e-8, 1e-4]`
    /// (61 log-spaced points each), all indicators.
    pub fn new(params: PhysicalParams) -> Self {
        Self {
            alpha_grid: linspace(0.5, 4.0, 36),
            gamma_grid: logspace(-8.0, -4.0, 61),
            lambda_grid: logspace(-8.0, -4.0, 61),
            params,
            indicators: Indicator::ALL.to_vec(),
            convention: RatioConvention::default(),
            tol: Tolerance::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, grid) in [("alpha", &self.alpha_grid), ("gamma", &self.gamma_grid), ("lambda", &self.lambda_grid)] {
            if grid.is_empty() {
                return Err(Error::InvalidParam(format!("{name} grid is empty")));
            }
            if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParam(format!("{name} grid must be finite and strictly increasing")));
            }
        }
        if self.indicators.is_empty() {
            return Err(Error::InvalidParam("no indicators selected".into()));
        }
        Ok(())
    }
}

/// `n` evenly spaced points on `[a, b]`; a single point is `a`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `n` points spaced evenly in `log10` between `10^a` and `10^b`.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a, b, n).into_iter().map(|e| 10f64.powf(e)).collect()
}

/// One row of the α sweep. Ratios are `None` when the row failed.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaRow {
    pub alpha: f64,
    pub tau_dec: Option<f64>,
    pub tau_p: Option<f64>,
    pub tau_v: Option<f64>,
    pub tau_k: Option<f64>,
    pub tau_w_seconds: Option<f64>,
    pub status: String,
}

impl AlphaRow {
    pub const CSV_HEADER: &'static str =
        "alpha,tau_dec_over_tau_w,tau_p_over_tau_w,tau_v_over_tau_w,tau_k_over_tau_w,tau_w_seconds,status";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.11e},{},{},{},{},{},{}",
            self.alpha,
            cell(self.tau_dec),
            cell(self.tau_p),
            cell(self.tau_v),
            cell(self.tau_k),
            cell(self.tau_w_seconds),
            self.status
        )
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

fn cell(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.11e}")).unwrap_or_default()
}

/// Loss times under time dilation, as multiples of `τ_W`, for every α in
/// the grid. `κ` comes from `spec.params`; a failing row is marked, not
/// dropped.
pub fn sweep_alpha(spec: &SweepSpec) -> Result<Vec<AlphaRow>> {
    spec.validate()?;
    let channel = DilationChannel::from_params(&spec.params)?;
    let tol = spec.tol;
    Ok(spec
        .alpha_grid
        .par_iter()
        .map(|&alpha| {
            let times = Thresholds::compute(alpha, tol).and_then(|th| th.times(&channel));
            match times {
                Ok(t) => AlphaRow {
                    alpha,
                    tau_dec: Some(t.tau_dec / t.tau_w),
                    tau_p: Some(t.tau_p / t.tau_w),
                    tau_v: Some(t.tau_v / t.tau_w),
                    tau_k: Some(t.tau_k / t.tau_w),
                    tau_w_seconds: Some(t.tau_w),
                    status: "ok".into(),
                },
                Err(e) => AlphaRow {
                    alpha,
                    tau_dec: None,
                    tau_p: None,
                    tau_v: None,
                    tau_k: None,
                    tau_w_seconds: None,
                    status: e.kind().into(),
                },
            }
        })
        .collect())
}

/// One `(γ, λ, indicator)` cell of the noise sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioCell {
    pub gamma: f64,
    pub lambda: f64,
    pub indicator: Indicator,
    pub t_classical: Option<f64>,
    pub t_grav: f64,
    pub ratio: Option<f64>,
    pub status: String,
}

impl RatioCell {
    pub const CSV_HEADER: &'static str = "gamma,lambda,indicator,t_classical,t_grav,ratio,classical_dominates,status";

    /// Classical noise destroys the indicator first.
    pub fn classical_dominates(&self) -> Option<bool> {
        self.ratio.map(|r| r < 1.0)
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{:.11e},{:.11e},{},{},{:.11e},{},{},{}",
            self.gamma,
            self.lambda,
            self.indicator.name(),
            cell(self.t_classical),
            self.t_grav,
            cell(self.ratio),
            self.classical_dominates().map(|b| b.to_string()).unwrap_or_default(),
            self.status
        )
    }
}

/// Classical-noise channel for rates given in units of `ω₀`.
pub fn classical_channel_for(
    gamma: f64,
    lambda: f64,
    params: &PhysicalParams,
    convention: RatioConvention,
) -> Result<ClassicalChannel> {
    let w0 = params.trap_freq()?;
    let detuning = params.detuning.unwrap_or(0.0) / w0;
    let scale = match convention {
        RatioConvention::ReducedClassical => 1.0,
        RatioConvention::Consistent => w0,
    };
    Ok(ClassicalChannel::new(NoiseParams::new(lambda * scale, gamma * scale, detuning * scale)?))
}

/// Ratio of classical to gravitational loss time over the `(γ, λ)` grid.
///
/// Cells are ordered by γ, then λ, then indicator. The amplitude is
/// `params.alpha` and the gravitational channel uses `κ` from `params`.
pub fn sweep_noise(spec: &SweepSpec) -> Result<Vec<RatioCell>> {
    spec.validate()?;
    let params = &spec.params;
    let alpha = params.alpha()?;
    params.trap_freq()?;
    let grav = DilationChannel::from_params(params)?;
    let th = Thresholds::compute(alpha, spec.tol)?;
    let t_grav: Vec<f64> = spec.indicators.iter().map(|ind| grav.time_at(ind.threshold(&th))).collect::<Result<_>>()?;

    let points: Vec<(f64, f64)> =
        spec.gamma_grid.iter().flat_map(|&g| spec.lambda_grid.iter().map(move |&l| (g, l))).collect();
    let cells: Vec<Vec<RatioCell>> = points
        .par_iter()
        .map(|&(gamma, lambda)| {
            let channel = classical_channel_for(gamma, lambda, params, spec.convention);
            spec.indicators
                .iter()
                .zip(&t_grav)
                .map(|(&indicator, &tg)| {
                    let t = channel.as_ref().map_err(Clone::clone).and_then(|c| c.time_at(indicator.threshold(&th)));
                    match t {
                        Ok(tc) => RatioCell {
                            gamma,
                            lambda,
                            indicator,
                            t_classical: Some(tc),
                            t_grav: tg,
                            ratio: Some(tc / tg),
                            status: "ok".into(),
                        },
                        Err(e) => RatioCell {
                            gamma,
                            lambda,
                            indicator,
                            t_classical: None,
                            t_grav: tg,
                            ratio: None,
                            status: e.kind().into(),
                        },
                    }
                })
                .collect()
        })
        .collect();
    Ok(cells.into_iter().flatten().collect())
}

/// One line of the consistency report. `claimed` is the relation as
/// usually quoted, `expected` what the closed forms imply.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyRow {
    pub quantity: &'static str,
    pub value: f64,
    pub claimed: Option<f64>,
    pub expected: Option<f64>,
}

impl ConsistencyRow {
    pub const CSV_HEADER: &'static str = "quantity,value,claimed,expected";

    pub fn csv_row(&self) -> String {
        format!("{},{:.11e},{},{}", self.quantity, self.value, cell(self.claimed), cell(self.expected))
    }
}

/// `τ_dec`, `τ̄_dec`, `τ_p`, `τ_W` for `params` and the ratios between them.
pub fn consistency_report(params: &PhysicalParams) -> Result<Vec<ConsistencyRow>> {
    let alpha = params.alpha()?;
    let k = kappa(params)?;
    let channel = DilationChannel::new(k)?;
    let tau_dec = tau_dec_dilation(alpha, k)?.tau_dec;
    let tau_p = channel.time_at(1.0)?;
    let tau_w = channel.time_at(0.5)?;
    let dx = params.superposition_size()?;
    let de = params.delta_e()?;
    let g = params.grav_accel();
    let direct = HBAR * C * C / (dx * de * g);

    let row = |quantity, value, claimed, expected| ConsistencyRow { quantity, value, claimed, expected };
    let mut rows = vec![
        row("kappa", k, None, None),
        row("tau_dec", tau_dec, None, None),
        row("tau_dec_direct", direct, None, Some(tau_dec)),
        row("tau_p", tau_p, None, None),
        row("tau_w", tau_w, None, None),
        row("kappa_tau_w_sq", k * tau_w * tau_w, Some(1.0), Some(1.0)),
        row("tau_p_over_2_alpha_tau_dec", tau_p / (2.0 * alpha * tau_dec), Some(1.0), Some(SQRT_2)),
    ];
    if let (Some(n), Some(t)) = (params.n_internal, params.temperature) {
        if params.delta_e.is_none() {
            let bar = tau_bar_dec(n, t, g, dx);
            rows.push(row("tau_bar_dec", bar, None, None));
            rows.push(row("tau_bar_dec_over_tau_dec", bar / tau_dec, Some(1.0), Some(SQRT_2)));
        }
    }
    Ok(rows)
}

/// Writes `header` as a `#` comment, the CSV header line and one line per row.
pub fn write_csv<W: Write, R>(
    mut w: W,
    header: &str,
    csv_header: &str,
    rows: &[R],
    line: impl Fn(&R) -> String,
) -> io::Result<()> {
    writeln!(w, "# {header}")?;
    writeln!(w, "{csv_header}")?;
    for r in rows {
        writeln!(w, "{}", line(r))?;
    }
    w.flush()
}
