//! Time grids and Loschmidt-echo time series.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Uniform grid of sample times `t_k = k dt`, `k = 1..=n_t`. The point
/// `t = 0` is implicit: `G(0) = 1` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T> {
    dt: T,
    n_t: usize,
}

impl<T: Scalar> TimeGrid<T> {
    pub fn new(dt: T, n_t: usize) -> Result<Self> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::InvalidParameter("dt must be positive and finite".into()));
        }
        if n_t == 0 {
            return Err(Error::InvalidParameter("n_t must be at least 1".into()));
        }
        Ok(Self { dt, n_t })
    }

    /// Grid with `n_t` points ending at `t_max`.
    pub fn with_t_max(t_max: T, n_t: usize) -> Result<Self> {
        if !(t_max > T::zero()) {
            return Err(Error::InvalidParameter("t_max must be positive".into()));
        }
        Self::new(t_max / T::from_usize_lit(n_t), n_t)
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn t_max(&self) -> T {
        self.dt * T::from_usize_lit(self.n_t)
    }

    pub fn time(&self, k: usize) -> T {
        debug_assert!(k >= 1 && k <= self.n_t);
        self.dt * T::from_usize_lit(k)
    }

    /// Sample times `t_1..t_{n_t}` (excludes the implicit t = 0).
    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        (1..=self.n_t).map(move |k| self.time(k))
    }
}

/// Shot budget of a series: exact or a per-point, per-component count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    Exact,
    Count(u64),
}

impl Shots {
    pub fn is_exact(&self) -> bool {
        matches!(self, Shots::Exact)
    }
}

impl Serialize for Shots {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Shots::Exact => s.serialize_str("exact"),
            Shots::Count(n) => s.serialize_u64(*n),
        }
    }
}

impl<'de> Deserialize<'de> for Shots {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u64),
            Label(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(n) if n >= 1 => Ok(Shots::Count(n)),
            Raw::Count(_) => Err(serde::de::Error::custom("n_shots must be at least 1")),
            Raw::Label(s) if s == "exact" => Ok(Shots::Exact),
            Raw::Label(s) => Err(serde::de::Error::custom(format!("bad n_shots `{s}`"))),
        }
    }
}

/// Loschmidt echoes `G(t_k)` on a [`TimeGrid`] with per-point variance
/// metadata. Exact series carry zero variances.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    grid: TimeGrid<T>,
    values: Vec<Complex<T>>,
    re_var: Vec<T>,
    im_var: Vec<T>,
    shots: Shots,
}

impl<T: Scalar> TimeSeries<T> {
    /// Numerically exact series: zero variances.
    pub fn exact(grid: TimeGrid<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.n_t() {
            return Err(Error::SizeMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.n_t()
            )));
        }
        let zeros = vec![T::zero(); values.len()];
        Ok(Self { grid, values, re_var: zeros.clone(), im_var: zeros, shots: Shots::Exact })
    }

    pub fn with_noise(
        grid: TimeGrid<T>,
        values: Vec<Complex<T>>,
        re_var: Vec<T>,
        im_var: Vec<T>,
        n_shots: u64,
    ) -> Result<Self> {
        let n = grid.n_t();
        if values.len() != n || re_var.len() != n || im_var.len() != n {
            return Err(Error::SizeMismatch("series arrays must match the grid".into()));
        }
        if re_var.iter().chain(&im_var).any(|v| *v < T::zero()) {
            return Err(Error::InvalidParameter("variances must be nonnegative".into()));
        }
        Ok(Self { grid, values, re_var, im_var, shots: Shots::Count(n_shots) })
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn re_var(&self) -> &[T] {
        &self.re_var
    }

    pub fn im_var(&self) -> &[T] {
        &self.im_var
    }

    pub fn shots(&self) -> Shots {
        self.shots
    }

    pub fn is_exact(&self) -> bool {
        self.shots.is_exact()
    }

    pub fn n_t(&self) -> usize {
        self.grid.n_t()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: TimeSeriesFile = serde_json::from_str(&text)?;
        file.into_series()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = TimeSeriesFile::from_series(self);
        std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
        Ok(())
    }
}

/// On-disk series layout; values stored as f64 regardless of the working
/// precision.
#[derive(Debug, Serialize, Deserialize)]
struct TimeSeriesFile {
    n_shots: Shots,
    dt: f64,
    times: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
    re_var: Vec<f64>,
    im_var: Vec<f64>,
}

impl TimeSeriesFile {
    fn from_series<T: Scalar>(series: &TimeSeries<T>) -> Self {
        Self {
            n_shots: series.shots,
            dt: series.grid.dt().to_f64_lossy(),
            times: series.grid.times().map(|t| t.to_f64_lossy()).collect(),
            re: series.values.iter().map(|v| v.re.to_f64_lossy()).collect(),
            im: series.values.iter().map(|v| v.im.to_f64_lossy()).collect(),
            re_var: series.re_var.iter().map(|v| v.to_f64_lossy()).collect(),
            im_var: series.im_var.iter().map(|v| v.to_f64_lossy()).collect(),
        }
    }

    fn into_series<T: Scalar>(self) -> Result<TimeSeries<T>> {
        let n_t = self.times.len();
        let grid = TimeGrid::new(T::from_f64_lit(self.dt), n_t)?;
        for (k, &t) in self.times.iter().enumerate() {
            let expected = self.dt * (k + 1) as f64;
            if (t - expected).abs() > 1e-9 * expected.abs().max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "time {t} at index {k} is not {} * dt",
                    k + 1
                )));
            }
        }
        if self.re.len() != n_t || self.im.len() != n_t {
            return Err(Error::SizeMismatch("re/im arrays must match times".into()));
        }
        let values: Vec<Complex<T>> = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&re, &im)| Complex::new(T::from_f64_lit(re), T::from_f64_lit(im)))
            .collect();
        match self.n_shots {
            Shots::Exact => TimeSeries::exact(grid, values),
            Shots::Count(n) => TimeSeries::with_noise(
                grid,
                values,
                self.re_var.iter().map(|&v| T::from_f64_lit(v)).collect(),
                self.im_var.iter().map(|&v| T::from_f64_lit(v)).collect(),
                n,
            ),
        }
    }
}
