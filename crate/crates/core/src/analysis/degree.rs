use std::collections::BTreeMap;
use std::io::Write;

use log::warn;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, Discrete, Poisson};

use crate::error::{invalid, Error, Result};
use crate::graph::{DegreeMode, HybridGraph};

pub const DEFAULT_BINS_PER_DECADE: u32 = 10;

/// Poisson rate used for the rewired part of the small-world distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewireRate {
    /// `pK / (2aN)`, the rate of the hybrid model. Falls back to the
    /// classical rate when `aN = 0`.
    Hybrid { a: f64, n: usize },
    /// `pK / 2`, the pure Watts-Strogatz rate.
    Classical,
}

impl RewireRate {
    fn rate(self, k_ring: usize, p: f64) -> f64 {
        let classical = p * k_ring as f64 / 2.0;
        match self {
            RewireRate::Classical => classical,
            RewireRate::Hybrid { a, n } => {
                let an = a * n as f64;
                if an == 0.0 {
                    if p > 0.0 {
                        warn!("rewire rate pK/(2aN) undefined for aN = 0, using pK/2");
                    }
                    classical
                } else {
                    classical / an
                }
            }
        }
    }
}

fn check_ring(k_ring: usize) -> Result<()> {
    if k_ring == 0 || !k_ring.is_multiple_of(2) {
        return Err(invalid(format!("K must be even and positive, got {k_ring}")));
    }
    Ok(())
}

/// Small-world degree mass: `K/2` retained edges thinned binomially with
/// survival `1 - p`, convolved with a Poisson count of rewired edges.
/// Zero below `K/2`.
pub fn ws_degree_pmf(k: usize, k_ring: usize, p: f64, rate: RewireRate) -> Result<f64> {
    check_ring(k_ring)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("p must lie in [0, 1], got {p}")));
    }
    let half = k_ring / 2;
    if k < half {
        return Ok(0.0);
    }
    let kept = Binomial::new(1.0 - p, half as u64).map_err(|e| invalid(e.to_string()))?;
    let mu = rate.rate(k_ring, p);
    let poisson = if mu > 0.0 {
        Some(Poisson::new(mu).map_err(|e| invalid(e.to_string()))?)
    } else {
        None
    };
    let extra = k - half;
    let mut total = 0.0;
    for n in 0..=extra.min(half) {
        let j = (extra - n) as u64;
        let pois = match &poisson {
            Some(d) => d.pmf(j),
            None => (j == 0) as u8 as f64,
        };
        total += kept.pmf(n as u64) * pois;
    }
    Ok(total)
}

/// Scale-free part `2 m^2 (1 - a) / k^3` for `k >= m`, zero below.
pub fn ba_degree_pdf(k: f64, m: usize, a: f64) -> Result<f64> {
    if k <= 0.0 || !k.is_finite() {
        return Err(invalid(format!("degree must be positive, got {k}")));
    }
    if k < m as f64 {
        return Ok(0.0);
    }
    let m = m as f64;
    Ok(2.0 * m * m * (1.0 - a) / (k * k * k))
}

/// Hybrid distribution: the small-world mass everywhere plus the scale-free
/// tail from `m` upward. The prediction assumes `K = m`.
pub fn hybrid_degree_pdf(k: usize, k_ring: usize, p: f64, a: f64, m: usize, rate: RewireRate) -> Result<f64> {
    if k == 0 {
        return Err(invalid("degree must be at least 1"));
    }
    if k_ring != m {
        warn!("hybrid degree prediction assumes K = m, got K = {k_ring}, m = {m}");
    }
    let ws = ws_degree_pmf(k, k_ring, p, rate)?;
    Ok(ws + ba_degree_pdf(k as f64, m, a)?)
}

/// `K + K/2` for even `K`.
pub fn hybrid_average_degree(k_ring: usize) -> Result<f64> {
    check_ring(k_ring)?;
    Ok((k_ring + k_ring / 2) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binning {
    Raw,
    Log10 { bins_per_decade: u32 },
}

impl Default for Binning {
    fn default() -> Self {
        Binning::Log10 {
            bins_per_decade: DEFAULT_BINS_PER_DECADE,
        }
    }
}

/// One logarithmic bin `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogBin {
    pub lo: f64,
    pub hi: f64,
    /// Geometric center `sqrt(lo * hi)`.
    pub center: f64,
    pub count: u64,
    /// Number of integer degrees inside the bin.
    pub width: u64,
    /// `count / (n * width)`.
    pub density: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeHistogram {
    counts: BTreeMap<usize, u64>,
    n: u64,
    binning: Binning,
}

/// Degree histogram of `g` over all edges.
pub fn empirical_distribution(g: &HybridGraph, binning: Binning) -> Result<DegreeHistogram> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(DegreeHistogram::from_degrees(g.degrees(DegreeMode::All), binning))
}

impl DegreeHistogram {
    pub fn from_degrees(degrees: impl IntoIterator<Item = usize>, binning: Binning) -> Self {
        let mut counts = BTreeMap::new();
        let mut n = 0;
        for k in degrees {
            *counts.entry(k).or_insert(0) += 1;
            n += 1;
        }
        Self { counts, n, binning }
    }

    pub fn from_counts(counts: BTreeMap<usize, u64>, binning: Binning) -> Self {
        let counts: BTreeMap<usize, u64> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        let n = counts.values().sum();
        Self { counts, n, binning }
    }

    pub fn counts(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn binning(&self) -> Binning {
        self.binning
    }

    pub fn pmf(&self, k: usize) -> f64 {
        self.counts.get(&k).map_or(0.0, |&c| c as f64 / self.n as f64)
    }

    pub fn max_degree(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn second_moment(&self) -> f64 {
        self.moment(2)
    }

    fn moment(&self, power: i32) -> f64 {
        let sum: f64 = self
            .counts
            .iter()
            .map(|(&k, &c)| (k as f64).powi(power) * c as f64)
            .sum();
        sum / self.n as f64
    }

    /// Fraction of nodes with degree strictly below `k`.
    pub fn head_mass(&self, k: usize) -> f64 {
        let c: u64 = self.counts.range(..k).map(|(_, &c)| c).sum();
        c as f64 / self.n as f64
    }

    /// Logarithmic bins starting at degree 1; bins containing no integer
    /// degree are skipped. Degree-0 nodes fall outside every bin.
    pub fn log_bins(&self, bins_per_decade: u32) -> Vec<LogBin> {
        let b = bins_per_decade.max(1) as f64;
        let max = self.max_degree();
        let mut bins = Vec::new();
        let mut j = 0u32;
        loop {
            let lo = 10f64.powf(j as f64 / b);
            if lo > max as f64 {
                break;
            }
            let hi = 10f64.powf((j + 1) as f64 / b);
            j += 1;
            let first = lo.ceil() as usize;
            let end = hi.ceil() as usize;
            if end <= first {
                continue;
            }
            let width = (end - first) as u64;
            let count: u64 = self.counts.range(first..end).map(|(_, &c)| c).sum();
            bins.push(LogBin {
                lo,
                hi,
                center: (lo * hi).sqrt(),
                count,
                width,
                density: count as f64 / (self.n as f64 * width as f64),
            });
        }
        bins
    }

    /// Least-squares slope of `log10(density)` against `log10(center)` over
    /// non-empty log bins whose center lies in `[k_lo, k_hi]`.
    pub fn fit_tail_slope(&self, k_lo: f64, k_hi: f64) -> Result<TailFit> {
        let per_decade = match self.binning {
            Binning::Log10 { bins_per_decade } => bins_per_decade,
            Binning::Raw => DEFAULT_BINS_PER_DECADE,
        };
        let pts: Vec<(f64, f64)> = self
            .log_bins(per_decade)
            .into_iter()
            .filter(|b| b.count > 0 && b.center >= k_lo && b.center <= k_hi)
            .map(|b| (b.center.log10(), b.density.log10()))
            .collect();
        if pts.len() < 2 {
            return Err(Error::Degenerate(format!(
                "{} populated bins in [{k_lo}, {k_hi}], need at least 2",
                pts.len()
            )));
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        Ok(TailFit {
            slope,
            intercept: my - slope * mx,
            points: pts.len(),
        })
    }

    /// `k,count,pk` rows: one per degree for raw binning, one per populated
    /// bin (geometric center, density) for log binning.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "k,count,pk")?;
        match self.binning {
            Binning::Raw => {
                for (&k, &c) in &self.counts {
                    writeln!(w, "{k},{c},{}", c as f64 / self.n as f64)?;
                }
            }
            Binning::Log10 { bins_per_decade } => {
                for b in self.log_bins(bins_per_decade).iter().filter(|b| b.count > 0) {
                    writeln!(w, "{},{},{}", b.center, b.count, b.density)?;
                }
            }
        }
        Ok(())
    }
}

/// Total-variation distance between the empirical pmf and `analytic`,
/// evaluated exactly up to `cutoff`; analytic mass beyond the cutoff and
/// the histogram's range counts as unmatched.
pub fn total_variation(hist: &DegreeHistogram, analytic: impl Fn(usize) -> Result<f64>, cutoff: usize) -> Result<f64> {
    let top = cutoff.max(hist.max_degree());
    let mut diff = 0.0;
    let mut covered = 0.0;
    for k in 0..=top {
        let a = analytic(k)?;
        covered += a;
        diff += (hist.pmf(k) - a).abs();
    }
    Ok(0.5 * (diff + (1.0 - covered).max(0.0)))
}
