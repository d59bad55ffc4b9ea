use std::io::Write;

use crate::error::{Error, Result};

/// Real values on a uniform rectangular grid of `β = x + iy`.
///
/// `values` is row-major with the real coordinate as the row index.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    re: (f64, f64),
    im: (f64, f64),
    n_re: usize,
    n_im: usize,
    values: Vec<f64>,
}

impl PhaseGrid {
    pub fn new(re: (f64, f64), im: (f64, f64), n_re: usize, n_im: usize) -> Result<Self> {
        if n_re < 2 || n_im < 2 {
            return Err(Error::InvalidParam(format!("grid needs at least 2x2 points, got {n_re}x{n_im}")));
        }
        let finite = [re.0, re.1, im.0, im.1].iter().all(|x| x.is_finite());
        if !finite || re.0 >= re.1 || im.0 >= im.1 {
            return Err(Error::InvalidParam(format!("grid bounds must be finite and increasing: {re:?} x {im:?}")));
        }
        Ok(Self { re, im, n_re, n_im, values: vec![0.0; n_re * n_im] })
    }

    /// 201x201 points over `±(α + 5)` by `±5√(ν + 1/2)`.
    pub fn default_for_cat(alpha: f64, nu: f64) -> Result<Self> {
        let x = alpha + 5.0;
        let y = 5.0 * (nu + 0.5).sqrt();
        Self::new((-x, x), (-y, y), 201, 201)
    }

    pub fn n_re(&self) -> usize {
        self.n_re
    }

    pub fn n_im(&self) -> usize {
        self.n_im
    }

    pub fn re_at(&self, i: usize) -> f64 {
        self.re.0 + (self.re.1 - self.re.0) * i as f64 / (self.n_re - 1) as f64
    }

    pub fn im_at(&self, j: usize) -> f64 {
        self.im.0 + (self.im.1 - self.im.0) * j as f64 / (self.n_im - 1) as f64
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_im + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.values[i * self.n_im + j] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Same geometry, new values (row-major, real index outermost).
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.n_re * self.n_im {
            return Err(Error::InvalidParam(format!(
                "expected {} grid values, got {}",
                self.n_re * self.n_im,
                values.len()
            )));
        }
        Ok(Self { values, ..self.clone() })
    }

    /// Grid filled from `f(x, y)`.
    pub fn fill<F: Fn(f64, f64) -> f64>(&self, f: F) -> Self {
        let mut out = self.clone();
        for i in 0..self.n_re {
            for j in 0..self.n_im {
                out.values[i * self.n_im + j] = f(self.re_at(i), self.im_at(j));
            }
        }
        out
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Trapezoidal estimate of `∫ value d²β` over the grid rectangle.
    pub fn integral(&self) -> f64 {
        let dx = (self.re.1 - self.re.0) / (self.n_re - 1) as f64;
        let dy = (self.im.1 - self.im.0) / (self.n_im - 1) as f64;
        let mut sum = 0.0;
        for i in 0..self.n_re {
            let wi = if i == 0 || i == self.n_re - 1 { 0.5 } else { 1.0 };
            for j in 0..self.n_im {
                let wj = if j == 0 || j == self.n_im - 1 { 0.5 } else { 1.0 };
                sum += wi * wj * self.get(i, j);
            }
        }
        sum * dx * dy
    }

    /// CSV with header `re_beta,im_beta,value`, 17 significant digits.
    /// `comment`, when given, is written first as a `#` line.
    pub fn write_csv<W: Write>(&self, mut out: W, comment: Option<&str>) -> std::io::Result<()> {
        if let Some(c) = comment {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "re_beta,im_beta,value")?;
        for i in 0..self.n_re {
            for j in 0..self.n_im {
                writeln!(out, "{:.16e},{:.16e},{:.16e}", self.re_at(i), self.im_at(j), self.get(i, j))?;
            }
        }
        Ok(())
    }
}
