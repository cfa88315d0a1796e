use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A sampled time series with strictly increasing sample times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub label: String,
    samples: Vec<(f64, f64)>,
}

impl Curve {
    pub fn new(label: impl Into<String>, samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(invalid("a curve needs at least two samples"));
        }
        if samples.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(invalid("curve samples must be finite"));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(invalid("curve times must be strictly increasing"));
        }
        Ok(Self {
            label: label.into(),
            samples,
        })
    }

    /// Samples at `t = 0, 1, 2, ...`.
    pub fn from_values(label: impl Into<String>, values: &[f64]) -> Result<Self> {
        Self::new(label, values.iter().enumerate().map(|(t, &v)| (t as f64, v)).collect())
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    fn span(&self) -> (f64, f64) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }

    /// Linear interpolation; `t` must lie inside the sampled span.
    pub fn value_at(&self, t: f64) -> f64 {
        let idx = self.samples.partition_point(|s| s.0 < t);
        if idx < self.samples.len() && self.samples[idx].0 == t {
            return self.samples[idx].1;
        }
        let idx = idx.clamp(1, self.samples.len() - 1);
        let (t0, v0) = self.samples[idx - 1];
        let (t1, v1) = self.samples[idx];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    fn times_within(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.samples
            .iter()
            .map(|s| s.0)
            .filter(|&t| t >= lo && t <= hi)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub rho: f64,
    pub integral_zeta: f64,
    pub integral_absdiff: f64,
    pub grid_points: usize,
}

fn trapezoid(t: &[f64], v: &[f64]) -> f64 {
    t.windows(2)
        .zip(v.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// `(∫ζ − ∫|ζ − ϱ|) / ∫ζ` by the trapezoid rule over the overlap of the two
/// curves, both taken at the sample times of whichever curve is coarser
/// there. Not symmetric: `zeta` is the reference.
pub fn similarity_report(zeta: &Curve, rho: &Curve) -> Result<SimilarityReport> {
    let (a0, a1) = zeta.span();
    let (b0, b1) = rho.span();
    let (lo, hi) = (a0.max(b0), a1.min(b1));
    if lo >= hi {
        return Err(invalid(format!(
            "curves `{}` and `{}` do not overlap in time",
            zeta.label, rho.label
        )));
    }
    let za = zeta.times_within(lo, hi);
    let rb = rho.times_within(lo, hi);
    let grid = if rb.len() < za.len() { rb } else { za };
    if grid.len() < 2 {
        return Err(invalid("fewer than two common grid points"));
    }
    let z: Vec<f64> = grid.iter().map(|&t| zeta.value_at(t)).collect();
    let d: Vec<f64> = grid
        .iter()
        .zip(&z)
        .map(|(&t, &zv)| (zv - rho.value_at(t)).abs())
        .collect();
    let integral_zeta = trapezoid(&grid, &z);
    if integral_zeta == 0.0 {
        return Err(Error::Degenerate(format!(
            "reference curve `{}` integrates to zero",
            zeta.label
        )));
    }
    let integral_absdiff = trapezoid(&grid, &d);
    Ok(SimilarityReport {
        rho: (integral_zeta - integral_absdiff) / integral_zeta,
        integral_zeta,
        integral_absdiff,
        grid_points: grid.len(),
    })
}

pub fn similarity(zeta: &Curve, rho: &Curve) -> Result<f64> {
    similarity_report(zeta, rho).map(|r| r.rho)
}

/// Scores each candidate (as `zeta`) against an observed curve (as `rho`)
/// and orders them best first. Ties keep input order. An all-zero observed
/// curve scores 0 against every candidate.
pub fn rank_by_similarity(observed: &Curve, candidates: &[Curve]) -> Result<Vec<(usize, SimilarityReport)>> {
    let mut ranked = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| similarity_report(c, observed).map(|r| (i, r)))
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| b.1.rho.total_cmp(&a.1.rho));
    Ok(ranked)
}
