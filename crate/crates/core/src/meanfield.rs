//! Degree-class mean-field dynamics of the mixed spreading model, its
//! stationary state and the propagation threshold.
//!
//! Nodes of degree `k` are summarized by densities `s_k`, `i_k`, `r_k`.
//! Spreaders are met through a random edge end with probability
//! `theta = sum_k k P(k) i_k / <k>`, and
//!
//! ```text
//! ds_k/dt = -lambda k s_k theta + u i_k + w sigma r_k
//! di_k/dt =  lambda k s_k theta - i_k
//! dr_k/dt = (w + q) i_k - w sigma r_k
//! ```

use std::collections::BTreeMap;
use std::io::Write;

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::analysis::{hybrid_degree_pdf, DegreeHistogram, RewireRate};
use crate::error::{invalid, Error, Result};
use crate::propagation::Mixture;

/// Normalized degree distribution on a finite support of positive degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    degrees: Vec<u32>,
    weights: Vec<f64>,
}

impl DegreeDistribution {
    /// Builds from `(k, weight)` pairs. Weights are summed per degree and
    /// renormalized; zero weights are dropped.
    pub fn new(pairs: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        let mut acc = BTreeMap::new();
        for (k, w) in pairs {
            if !w.is_finite() || w < 0.0 {
                return Err(invalid(format!(
                    "weight for degree {k} must be finite and >= 0, got {w}"
                )));
            }
            if w > 0.0 {
                *acc.entry(k).or_insert(0.0) += w;
            }
        }
        let total: f64 = acc.values().sum();
        if acc.is_empty() || total <= 0.0 {
            return Err(invalid("degree distribution has no mass"));
        }
        let (degrees, weights): (Vec<u32>, Vec<f64>) = acc.into_iter().map(|(k, w)| (k, w / total)).unzip();
        let d = Self { degrees, weights };
        if d.mean() <= 0.0 {
            return Err(Error::Degenerate("mean degree is zero".into()));
        }
        Ok(d)
    }

    /// All mass at `k`.
    pub fn homogeneous(k: u32) -> Result<Self> {
        Self::new([(k, 1.0)])
    }

    /// `P(k) ∝ k^-exponent` on `[k_min, k_max]`.
    pub fn power_law(exponent: f64, k_min: u32, k_max: u32) -> Result<Self> {
        if k_min == 0 || k_max < k_min {
            return Err(invalid(format!("bad support [{k_min}, {k_max}]")));
        }
        Self::new((k_min..=k_max).map(|k| (k, (k as f64).powf(-exponent))))
    }

    /// Evaluates `f` on `[k_min, k_max]` and renormalizes over that support.
    pub fn from_fn(k_min: u32, k_max: u32, f: impl Fn(u32) -> Result<f64>) -> Result<Self> {
        if k_min == 0 || k_max < k_min {
            return Err(invalid(format!("bad support [{k_min}, {k_max}]")));
        }
        let pairs = (k_min..=k_max)
            .map(|k| f(k).map(|w| (k, w)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(pairs)
    }

    /// Hybrid prediction truncated to `[1, k_max]`.
    pub fn hybrid(k_ring: usize, p: f64, a: f64, m: usize, rate: RewireRate, k_max: u32) -> Result<Self> {
        Self::from_fn(1, k_max, |k| hybrid_degree_pdf(k as usize, k_ring, p, a, m, rate))
    }

    /// Empirical distribution; isolated nodes are dropped.
    pub fn from_histogram(h: &DegreeHistogram) -> Result<Self> {
        Self::new(
            h.counts()
                .iter()
                .filter(|(&k, _)| k > 0)
                .map(|(&k, &c)| (k as u32, c as f64)),
        )
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(k, p)| k * p).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.iter().map(|(k, p)| k * k * p).sum()
    }

    pub fn min_degree(&self) -> u32 {
        self.degrees[0]
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees[self.degrees.len() - 1]
    }

    fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.degrees.iter().zip(&self.weights).map(|(&k, &p)| (k as f64, p))
    }
}

/// Rates of the mean-field model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanFieldParams {
    pub lambda: f64,
    pub mixture: Mixture,
    pub sigma: f64,
}

impl MeanFieldParams {
    pub fn validate(&self) -> Result<()> {
        self.mixture.validate()?;
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(invalid(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        if !(0.0..=1.0).contains(&self.sigma) {
            return Err(invalid(format!("sigma must lie in [0, 1], got {}", self.sigma)));
        }
        Ok(())
    }

    pub fn w_sigma(&self) -> f64 {
        self.mixture.sirs * self.sigma
    }
}

/// Per-class densities over a degree distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeClassField {
    dist: DegreeDistribution,
    pub s: Vec<f64>,
    pub i: Vec<f64>,
    pub r: Vec<f64>,
}

impl DegreeClassField {
    pub fn new(dist: DegreeDistribution, s: Vec<f64>, i: Vec<f64>, r: Vec<f64>) -> Result<Self> {
        let n = dist.len();
        if s.len() != n || i.len() != n || r.len() != n {
            return Err(invalid("density vectors must match the number of degree classes"));
        }
        let field = Self { dist, s, i, r };
        let err = field.max_conservation_error();
        if err > 1e-9 {
            return Err(invalid(format!("s + i + r deviates from 1 by {err}")));
        }
        Ok(field)
    }

    /// `i_k = i0`, `s_k = 1 - i0`, `r_k = 0` in every class.
    pub fn uniform(dist: DegreeDistribution, i0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&i0) {
            return Err(invalid(format!("i0 must lie in [0, 1], got {i0}")));
        }
        let n = dist.len();
        Self::new(dist, vec![1.0 - i0; n], vec![i0; n], vec![0.0; n])
    }

    pub fn distribution(&self) -> &DegreeDistribution {
        &self.dist
    }

    pub fn theta(&self) -> Result<f64> {
        theta(self)
    }

    /// Population spreader density `sum_k P(k) i_k`.
    pub fn spreader_density(&self) -> f64 {
        self.dist.weights.iter().zip(&self.i).map(|(p, i)| p * i).sum()
    }

    pub fn max_conservation_error(&self) -> f64 {
        (0..self.s.len())
            .map(|c| (self.s[c] + self.i[c] + self.r[c] - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn theta_of(dist: &DegreeDistribution, i: &[f64]) -> f64 {
    let num: f64 = dist.iter().zip(i).map(|((k, p), i)| k * p * i).sum();
    num / dist.mean()
}

/// Probability that a random edge end is a spreader.
pub fn theta(field: &DegreeClassField) -> Result<f64> {
    if field.dist.mean() <= 0.0 {
        return Err(Error::Degenerate("mean degree is zero".into()));
    }
    Ok(theta_of(&field.dist, &field.i))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    pub ds: Vec<f64>,
    pub di: Vec<f64>,
    pub dr: Vec<f64>,
}

/// Time derivatives of every class density.
pub fn rhs(field: &DegreeClassField, params: &MeanFieldParams) -> Result<Derivatives> {
    params.validate()?;
    let n = field.s.len();
    let mut y = Vec::with_capacity(3 * n);
    y.extend_from_slice(&field.s);
    y.extend_from_slice(&field.i);
    y.extend_from_slice(&field.r);
    let mut dy = vec![0.0; 3 * n];
    System::new(&field.dist, params).eval(&y, &mut dy);
    Ok(Derivatives {
        ds: dy[..n].to_vec(),
        di: dy[n..2 * n].to_vec(),
        dr: dy[2 * n..].to_vec(),
    })
}

struct System {
    k: Vec<f64>,
    kp: Vec<f64>,
    mean: f64,
    lambda: f64,
    u: f64,
    w_sigma: f64,
}

impl System {
    fn new(dist: &DegreeDistribution, params: &MeanFieldParams) -> Self {
        Self {
            k: dist.degrees.iter().map(|&k| k as f64).collect(),
            kp: dist.iter().map(|(k, p)| k * p).collect(),
            mean: dist.mean(),
            lambda: params.lambda,
            u: params.mixture.sis,
            w_sigma: params.w_sigma(),
        }
    }

    /// `y = [s.., i.., r..]`.
    fn eval(&self, y: &[f64], dy: &mut [f64]) {
        let n = self.k.len();
        let (s, rest) = y.split_at(n);
        let (i, r) = rest.split_at(n);
        let theta = self.kp.iter().zip(i).map(|(a, b)| a * b).sum::<f64>() / self.mean;
        for c in 0..n {
            let infect = self.lambda * self.k[c] * s[c] * theta;
            let revert = self.w_sigma * r[c];
            dy[c] = -infect + self.u * i[c] + revert;
            dy[n + c] = infect - i[c];
            // w + q written as 1 - u so the three rows cancel exactly
            dy[2 * n + c] = (1.0 - self.u) * i[c] - revert;
        }
    }
}

/// Bookkeeping from one integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegrationStats {
    pub steps: usize,
    pub step_size: f64,
    /// Densities pulled back into `[0, 1]` after a step.
    pub clamp_events: usize,
    /// Largest `|s_k + i_k + r_k - 1|` seen at any step.
    pub max_conservation_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub s: Vec<f64>,
    pub i: Vec<f64>,
    pub r: Vec<f64>,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub degrees: Vec<u32>,
    pub snapshots: Vec<Snapshot>,
    pub stats: IntegrationStats,
}

impl Trajectory {
    /// Keeps every `every`-th snapshot plus the last one.
    pub fn thinned(&self, every: usize) -> Trajectory {
        let every = every.max(1);
        let last = self.snapshots.len().saturating_sub(1);
        let snapshots = self
            .snapshots
            .iter()
            .enumerate()
            .filter(|(j, _)| j % every == 0 || *j == last)
            .map(|(_, s)| s.clone())
            .collect();
        Trajectory {
            degrees: self.degrees.clone(),
            snapshots,
            stats: self.stats,
        }
    }

    /// Long format, one row per time and degree class.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,k,s_k,i_k,r_k,theta")?;
        for snap in &self.snapshots {
            for (c, k) in self.degrees.iter().enumerate() {
                writeln!(
                    w,
                    "{},{k},{},{},{},{}",
                    snap.t, snap.s[c], snap.i[c], snap.r[c], snap.theta
                )?;
            }
        }
        Ok(())
    }
}

/// Fixed-step fourth-order Runge-Kutta from `t = 0` to `t_max`, recording
/// every step. The step is `t_max / ceil(t_max / dt)`, so never above `dt`.
pub fn integrate(field0: &DegreeClassField, params: &MeanFieldParams, t_max: f64, dt: f64) -> Result<Trajectory> {
    let mut snapshots = Vec::new();
    let (_, stats) = run_rk4(field0, params, t_max, dt, |t, y, n, theta| {
        snapshots.push(Snapshot {
            t,
            s: y[..n].to_vec(),
            i: y[n..2 * n].to_vec(),
            r: y[2 * n..].to_vec(),
            theta,
        });
    })?;
    Ok(Trajectory {
        degrees: field0.dist.degrees.clone(),
        snapshots,
        stats,
    })
}

/// Like [`integrate`] but keeps only the final field.
pub fn integrate_final(
    field0: &DegreeClassField,
    params: &MeanFieldParams,
    t_max: f64,
    dt: f64,
) -> Result<(DegreeClassField, IntegrationStats)> {
    run_rk4(field0, params, t_max, dt, |_, _, _, _| {})
}

fn run_rk4(
    field0: &DegreeClassField,
    params: &MeanFieldParams,
    t_max: f64,
    dt: f64,
    mut record: impl FnMut(f64, &[f64], usize, f64),
) -> Result<(DegreeClassField, IntegrationStats)> {
    params.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid(format!("dt must be positive, got {dt}")));
    }
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(invalid(format!("t_max must be finite and >= 0, got {t_max}")));
    }
    let sys = System::new(&field0.dist, params);
    let n = field0.s.len();
    let steps = (t_max / dt).ceil() as usize;
    let h = if steps == 0 { 0.0 } else { t_max / steps as f64 };

    let mut y: Vec<f64> = field0.s.iter().chain(&field0.i).chain(&field0.r).copied().collect();
    let len = y.len();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    let mut tmp = vec![0.0; len];
    let mut stats = IntegrationStats {
        steps,
        step_size: h,
        clamp_events: 0,
        max_conservation_error: field0.max_conservation_error(),
    };
    record(0.0, &y, n, theta_of(&field0.dist, &field0.i));

    for step in 1..=steps {
        sys.eval(&y, &mut k1);
        for j in 0..len {
            tmp[j] = y[j] + 0.5 * h * k1[j];
        }
        sys.eval(&tmp, &mut k2);
        for j in 0..len {
            tmp[j] = y[j] + 0.5 * h * k2[j];
        }
        sys.eval(&tmp, &mut k3);
        for j in 0..len {
            tmp[j] = y[j] + h * k3[j];
        }
        sys.eval(&tmp, &mut k4);
        let t = step as f64 * h;
        for j in 0..len {
            let v = y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            if !(-1e-6..=1.0 + 1e-6).contains(&v) {
                return Err(Error::Unstable { t, value: v });
            }
            let c = v.clamp(0.0, 1.0);
            if c != v {
                stats.clamp_events += 1;
                debug!("clamped density {v} at t = {t}");
            }
            y[j] = c;
        }
        for c in 0..n {
            let e = (y[c] + y[n + c] + y[2 * n + c] - 1.0).abs();
            stats.max_conservation_error = stats.max_conservation_error.max(e);
        }
        record(t, &y, n, theta_of(&field0.dist, &y[n..2 * n]));
    }

    let field = DegreeClassField {
        dist: field0.dist.clone(),
        s: y[..n].to_vec(),
        i: y[n..2 * n].to_vec(),
        r: y[2 * n..].to_vec(),
    };
    Ok((field, stats))
}

/// Stationary spreader density of class `k` given `theta`:
/// `lambda w sigma k theta / (lambda (1 - u + w sigma) k theta + w sigma)`.
pub fn steady_state_i_k(k: f64, theta: f64, params: &MeanFieldParams) -> f64 {
    let ws = params.w_sigma();
    let x = params.lambda * k * theta;
    let den = x * (1.0 - params.mixture.sis + ws) + ws;
    if den == 0.0 {
        warn!("stationary density undefined for theta = 0 and w sigma = 0, returning 0");
        return 0.0;
    }
    x * ws / den
}

/// Self-consistency map `F(theta) = sum_k k P(k) i_k(theta) / <k>`.
pub fn fixed_point_map(dist: &DegreeDistribution, params: &MeanFieldParams, theta: f64) -> f64 {
    let num: f64 = dist
        .iter()
        .map(|(k, p)| k * p * steady_state_i_k(k, theta, params))
        .sum();
    num / dist.mean()
}

/// `dF/dtheta` at 0, `lambda <k^2> / <k>`; zero when `w sigma = 0` since
/// then `F` vanishes identically.
pub fn fixed_point_slope_at_zero(dist: &DegreeDistribution, params: &MeanFieldParams) -> f64 {
    if params.w_sigma() == 0.0 {
        return 0.0;
    }
    params.lambda * dist.second_moment() / dist.mean()
}

const FIXED_POINT_TOL: f64 = 1e-10;
const FIXED_POINT_MAX_ITER: usize = 100_000;

/// Nontrivial root of `F(theta) = theta`, or 0 when `F'(0) <= 1` and only the
/// trivial solution exists.
///
/// `F` is increasing and concave with `F(1) < 1`, so above onset the root is
/// unique. Damped iteration from `theta = 1` usually lands within tolerance;
/// near onset it slows down and bisection on `F(theta) - theta` takes over.
pub fn solve_theta_fixed_point(dist: &DegreeDistribution, params: &MeanFieldParams) -> Result<f64> {
    params.validate()?;
    if fixed_point_slope_at_zero(dist, params) <= 1.0 {
        return Ok(0.0);
    }
    let g = |th: f64| fixed_point_map(dist, params, th) - th;

    let mut theta = 1.0;
    let mut iters = 0;
    while iters < 1_000 {
        iters += 1;
        let next = 0.5 * (theta + fixed_point_map(dist, params, theta));
        if (next - theta).abs() < FIXED_POINT_TOL && g(next).abs() < FIXED_POINT_TOL {
            return Ok(next);
        }
        theta = next;
    }

    // g > 0 on (0, theta*) and g < 0 above it
    let mut hi = 1.0;
    let mut lo = theta.min(0.5);
    while g(lo) <= 0.0 {
        hi = lo;
        lo *= 0.5;
        iters += 1;
        if lo == 0.0 {
            return Ok(0.0);
        }
        if iters >= FIXED_POINT_MAX_ITER {
            return Err(Error::NoConvergence(iters));
        }
    }
    while iters < FIXED_POINT_MAX_ITER {
        iters += 1;
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm.abs() < FIXED_POINT_TOL && hi - lo < FIXED_POINT_TOL {
            return Ok(mid);
        }
        if gm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::NoConvergence(iters))
}

/// Stationary field for a given `theta`, with `r_k = (1 - u) i_k / (w sigma)`
/// and `s_k` the remainder. Requires `w sigma > 0`.
pub fn steady_state_field_at(
    dist: &DegreeDistribution,
    params: &MeanFieldParams,
    theta: f64,
) -> Result<DegreeClassField> {
    let ws = params.w_sigma();
    if ws <= 0.0 {
        return Err(Error::Degenerate("stationary stifler density needs w sigma > 0".into()));
    }
    let i: Vec<f64> = dist.iter().map(|(k, _)| steady_state_i_k(k, theta, params)).collect();
    let r: Vec<f64> = i.iter().map(|&i| (1.0 - params.mixture.sis) * i / ws).collect();
    let s: Vec<f64> = i.iter().zip(&r).map(|(i, r)| 1.0 - i - r).collect();
    DegreeClassField::new(dist.clone(), s, i, r)
}

/// Stationary field at the self-consistent `theta`.
pub fn steady_state_field(dist: &DegreeDistribution, params: &MeanFieldParams) -> Result<DegreeClassField> {
    let theta = solve_theta_fixed_point(dist, params)?;
    steady_state_field_at(dist, params, theta)
}

mod maybe_infinite {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("infinite")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Text(t) if t == "infinite" => Ok(f64::INFINITY),
            Raw::Text(t) => Err(D::Error::custom(format!("expected number or \"infinite\", got {t}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    /// `<k> / (<k^2> w sigma)`.
    #[serde(with = "maybe_infinite")]
    pub lambda_c_empirical: f64,
    /// Piecewise closed form in `Upsilon` and `Psi`.
    #[serde(with = "maybe_infinite")]
    pub lambda_c_closedform: f64,
    /// `lambda` at which `F'(0) = 1`, i.e. where [`solve_theta_fixed_point`]
    /// starts returning a nonzero root: `<k> / <k^2>`.
    #[serde(with = "maybe_infinite")]
    pub lambda_c_onset: f64,
    pub upsilon: f64,
    pub psi: f64,
    pub k_mean: f64,
    pub k2_mean: f64,
    #[serde(rename = "M")]
    pub max_degree: u32,
    pub m: u32,
    pub a: f64,
    pub w_sigma: f64,
}

/// Inputs of [`threshold`].
#[derive(Debug, Clone, Copy)]
pub struct ThresholdInput<'a> {
    /// Full degree distribution, for the moment form.
    pub pk: &'a DegreeDistribution,
    /// Small-world component `(k, P_s(k))`, for `Upsilon` and `Psi`.
    pub ws_component: &'a [(u32, f64)],
    pub w: f64,
    pub sigma: f64,
    pub m: u32,
    pub max_degree: u32,
    pub a: f64,
}

/// `1/lambda_c = w sigma Upsilon` without a scale-free range (`M <= m`),
/// otherwise `w sigma (Upsilon + 1 + 2 Psi ln(M/m)) / (1 + 2 Psi)`.
pub fn closed_form_threshold(w: f64, sigma: f64, upsilon: f64, psi: f64, m: u32, max_degree: u32) -> f64 {
    let ws = w * sigma;
    if ws == 0.0 {
        return f64::INFINITY;
    }
    let inv = if max_degree <= m {
        ws * upsilon
    } else {
        let log = (max_degree as f64 / m as f64).ln();
        ws * (upsilon + 1.0 + 2.0 * psi * log) / (1.0 + 2.0 * psi)
    };
    1.0 / inv
}

pub fn threshold(input: &ThresholdInput) -> Result<ThresholdReport> {
    for (name, v) in [("w", input.w), ("sigma", input.sigma), ("a", input.a)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(invalid(format!("{name} must lie in [0, 1], got {v}")));
        }
    }
    if input.m == 0 {
        return Err(invalid("m must be positive"));
    }
    let s1: f64 = input.ws_component.iter().map(|&(k, p)| k as f64 * p).sum();
    let s2: f64 = input.ws_component.iter().map(|&(k, p)| (k as f64).powi(2) * p).sum();
    if !(s1 > 0.0 && s1.is_finite() && s2.is_finite()) {
        return Err(Error::Degenerate("small-world component has no first moment".into()));
    }
    let upsilon = s2 / s1;
    let psi = input.m as f64 * (1.0 - input.a) / s1;
    let k_mean = input.pk.mean();
    let k2_mean = input.pk.second_moment();
    let ws = input.w * input.sigma;
    let (empirical, onset) = if ws == 0.0 {
        (f64::INFINITY, f64::INFINITY)
    } else {
        (k_mean / (k2_mean * ws), k_mean / k2_mean)
    };
    Ok(ThresholdReport {
        lambda_c_empirical: empirical,
        lambda_c_closedform: closed_form_threshold(input.w, input.sigma, upsilon, psi, input.m, input.max_degree),
        lambda_c_onset: onset,
        upsilon,
        psi,
        k_mean,
        k2_mean,
        max_degree: input.max_degree,
        m: input.m,
        a: input.a,
        w_sigma: ws,
    })
}

/// Threshold of a plain distribution, taking it as its own small-world
/// component with no scale-free part (`a = 1`, `M = max degree`, `m` = min
/// degree).
pub fn threshold_of(pk: &DegreeDistribution, w: f64, sigma: f64) -> Result<ThresholdReport> {
    let comp: Vec<(u32, f64)> = pk.degrees.iter().copied().zip(pk.weights.iter().copied()).collect();
    threshold(&ThresholdInput {
        pk,
        ws_component: &comp,
        w,
        sigma,
        m: pk.min_degree().max(1),
        max_degree: pk.max_degree(),
        a: 1.0,
    })
}
