//! Predicted pattern counts: the three-term asymptotic of the main
//! conjecture, and the integral prediction for pairs built from the density
//! terms `D_0`, `D_1`, `D_2`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{epsilon_q, gcd, is_prime, Modulus, ResiduePattern};
use crate::constants::{c1, skip_coefficient, ModulusConstants};
use crate::error::{invalid, Error, Result};
use crate::quad::integrate;
use crate::singular::{SingularContext, CUTOFF_FACTOR};

/// Relative tolerance of the integral prediction.
pub const INTEGRAL_TOLERANCE: f64 = 1e-7;
const LI_TOLERANCE: f64 = 1e-12;

/// `li(x) = int_2^x dt / log t`.
pub fn li(x: f64) -> Result<f64> {
    if !(x >= 2.0) || !x.is_finite() {
        return invalid(format!("li needs finite x >= 2, got {x}"));
    }
    // t = e^u
    let q = integrate(|u: f64| u.exp() / u, 2f64.ln(), x.ln(), LI_TOLERANCE, 16)?;
    Ok(q.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionMethod {
    Asymptotic,
    Integral,
    Skip,
}

impl std::fmt::Display for PredictionMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PredictionMethod::Asymptotic => "asymptotic",
            PredictionMethod::Integral => "integral",
            PredictionMethod::Skip => "skip",
        })
    }
}

/// The pieces of `main (1 + c1 loglog x / log x + c2 / log x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticTerms {
    /// `li(x) / phi^r`.
    pub main: f64,
    /// `main c1 loglog x / log x`.
    pub loglog_term: f64,
    /// `main c2 / log x`.
    pub log_term: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PredictionRow {
    pub pattern: ResiduePattern,
    pub x: f64,
    pub method: PredictionMethod,
    pub value: f64,
    pub terms: Option<AsymptoticTerms>,
    pub quadrature_error_estimate: Option<f64>,
    /// Lower limit of the integral prediction.
    pub y_min: Option<f64>,
}

/// `li(x)/phi^r (1 + c1 loglog x / log x + c2 / log x)` for any `r >= 2`.
pub fn asymptotic_prediction(consts: &ModulusConstants, pattern: &ResiduePattern, x: f64) -> Result<PredictionRow> {
    if !(x > PI.exp()) {
        return invalid(format!("asymptotic prediction needs log log x > 0, got x = {x}"));
    }
    let (c2, _) = consts.c2(pattern)?;
    let c1 = c1(consts.modulus(), pattern)?;
    let lx = x.ln();
    let main = li(x)? / (consts.modulus().phi() as f64).powi(pattern.len() as i32);
    let terms = AsymptoticTerms { main, loglog_term: main * c1 * lx.ln() / lx, log_term: main * c2 / lx };
    Ok(PredictionRow {
        pattern: pattern.clone(),
        x,
        method: PredictionMethod::Asymptotic,
        value: main * (1.0 + c1 * lx.ln() / lx + c2 / lx),
        terms: Some(terms),
        quadrature_error_estimate: None,
        y_min: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMethod {
    SemiAnalytic,
    Brute,
}

/// `D_0`, `D_1`, `D_2` at one `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityTerms {
    pub y: f64,
    pub alpha: f64,
    #[serde(rename = "H")]
    pub h_scale: f64,
    #[serde(rename = "D0")]
    pub d0: f64,
    #[serde(rename = "D1")]
    pub d1: f64,
    #[serde(rename = "D2")]
    pub d2: f64,
    pub method: DensityMethod,
}

impl DensityTerms {
    pub fn total(&self) -> f64 {
        self.d0 + self.d1 + self.d2
    }
}

/// `alpha = 1 - q/(phi log y)` and `H = -(q/phi)/log alpha` at `u = log y`.
fn alpha_and_h(modulus: &Modulus, u: f64) -> Result<(f64, f64)> {
    let ratio = modulus.q() as f64 / modulus.phi() as f64;
    let alpha = 1.0 - ratio / u;
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("alpha(y) = {alpha} is outside (0, 1) at log y = {u}"));
    }
    Ok((alpha, -ratio / alpha.ln()))
}

/// Least representative in `1..=q`.
fn least(w: i64, q: i64) -> f64 {
    ((w - 1).rem_euclid(q) + 1) as f64
}

/// The residue bookkeeping of the density terms for one pair, independent of `y`.
#[derive(Debug, Clone)]
struct PairGeometry {
    /// `(w, least(v - w), multiplicity)` for the `D_1` sum.
    d1: Vec<(i64, f64, f64)>,
    /// `(u, least(w1) + least(v - w1 - u))` for every admissible `(w1, u)`.
    d2: Vec<(i64, f64)>,
    v: i64,
    epsilon: f64,
}

impl PairGeometry {
    fn new(modulus: &Modulus, a: u64, b: u64) -> Result<Self> {
        let q = modulus.q() as i64;
        let (a, b) = (a as i64, b as i64);
        let v = (b - a).rem_euclid(q);
        let coprime = |n: i64| gcd(n.rem_euclid(q) as u64, q as u64) == 1;
        let mut d1 = Vec::new();
        for w in 0..q {
            let mult = coprime(w + a) as u8 + coprime(w - b) as u8;
            if mult > 0 {
                d1.push((w, least(v - w, q), mult as f64));
            }
        }
        let mut d2 = Vec::new();
        for u in 0..q {
            for w1 in 0..q {
                if coprime(w1 + a) && coprime(w1 + u + a) {
                    d2.push((u, least(w1, q) + least(v - w1 - u, q)));
                }
            }
        }
        Ok(PairGeometry { d1, d2, v, epsilon: epsilon_q(modulus, a, b)? })
    }

    fn terms(&self, consts: &ModulusConstants, u: f64) -> Result<DensityTerms> {
        let m = consts.modulus();
        let (alpha, h) = alpha_and_h(m, u)?;
        let q = m.q() as f64;
        let phi = m.phi() as f64;
        let beta = q / (phi * alpha * u);
        // 1 - e^{-q/H}, computed without cancellation
        let g = -(-q / h).exp_m1();
        let s0 = |w: i64| consts.s0_main(w, h);

        let d0 = (-least(self.v, m.q() as i64) / h).exp() / g + s0(self.v);
        let d1: f64 = self.d1.iter().map(|&(w, gap, mult)| mult * (-gap / h).exp() / g * s0(w)).sum();
        let d2: f64 = self.d2.iter().map(|&(uu, gap)| (-gap / h).exp() * s0(uu)).sum::<f64>() / (g * g);
        Ok(DensityTerms {
            y: u.exp(),
            alpha,
            h_scale: h,
            d0,
            d1: -beta * d1,
            d2: beta * beta * d2,
            method: DensityMethod::SemiAnalytic,
        })
    }
}

fn check_pair(modulus: &Modulus, a: i64, b: i64) -> Result<(u64, u64)> {
    if !modulus.is_reduced(a) || !modulus.is_reduced(b) {
        return invalid(format!("({a}, {b}) are not both reduced mod {}", modulus.q()));
    }
    Ok((modulus.canonical(a), modulus.canonical(b)))
}

/// Density terms with every geometric series summed in closed form and every
/// `S_0(q, w; H)` replaced by its main terms.
pub fn density_terms_semianalytic(consts: &ModulusConstants, a: i64, b: i64, y: f64) -> Result<DensityTerms> {
    let (a, b) = check_pair(consts.modulus(), a, b)?;
    PairGeometry::new(consts.modulus(), a, b)?.terms(consts, y.ln())
}

/// Density terms as the direct truncated sums over `h <= cutoff` (default
/// `ceil(50 H)`), using the singular series themselves.
pub fn density_terms_brute(ctx: &SingularContext, a: i64, b: i64, y: f64, cutoff: Option<u64>) -> Result<DensityTerms> {
    let m = ctx.modulus();
    let (a, b) = check_pair(m, a, b)?;
    let u = y.ln();
    let (alpha, h) = alpha_and_h(m, u)?;
    let min_cutoff = (CUTOFF_FACTOR * h).ceil() as u64;
    let n = cutoff.unwrap_or(min_cutoff);
    if n < min_cutoff {
        return invalid(format!("cutoff {n} is below 50 H = {min_cutoff}"));
    }
    let qi = m.q();
    let q = qi as f64;
    let phi = m.phi() as f64;
    let beta = q / (phi * alpha * u);
    let v = (b + qi - a) % qi;
    let nu = n as usize;

    let sing = ctx.singular_table(n);
    let s0 = |t: usize| sing[t] - 1.0;
    let admissible: Vec<bool> = (0..=nu).map(|t| gcd(t as u64 + a, qi) == 1).collect();
    // tail[t] = sum_{t < h <= N, h = v (q)} e^{-h/H}
    let mut tail = vec![0.0; nu + 2];
    for t in (0..nu).rev() {
        let hh = t + 1;
        let add = if hh as u64 % qi == v { (-(hh as f64) / h).exp() } else { 0.0 };
        tail[t] = tail[t + 1] + add;
    }

    let mut d0 = 0.0;
    for hh in (1..=nu).filter(|&hh| hh as u64 % qi == v) {
        d0 += sing[hh] * (-(hh as f64) / h).exp();
    }

    // sum_h e^{-h/H} sum_{t < h, (t+a,q)=1} (S0(t) + S0(h - t))
    let mut d1 = 0.0;
    for t in (1..nu).filter(|&t| admissible[t]) {
        d1 += s0(t) * tail[t];
    }
    for hh in (1..=nu).filter(|&hh| hh as u64 % qi == v) {
        let inner: f64 = (1..hh).filter(|&t| admissible[t]).map(|t| s0(hh - t)).sum();
        d1 += inner * (-(hh as f64) / h).exp();
    }

    // sum_{t1 < t2} S0(t2 - t1) sum_{h > t2} e^{-h/H}
    let mut d2 = 0.0;
    for t2 in (2..nu).filter(|&t| admissible[t]) {
        if tail[t2] == 0.0 {
            continue;
        }
        let inner: f64 = (1..t2).filter(|&t1| admissible[t1]).map(|t1| s0(t2 - t1)).sum();
        d2 += inner * tail[t2];
    }

    Ok(DensityTerms { y, alpha, h_scale: h, d0, d1: -beta * d1, d2: beta * beta * d2, method: DensityMethod::Brute })
}

/// Lower limit `exp(2q/phi)` of the integral prediction.
pub fn integral_lower_limit(modulus: &Modulus) -> f64 {
    (2.0 * modulus.q() as f64 / modulus.phi() as f64).exp()
}

/// `(q/phi^2) int_{y_min}^x alpha^eps (D_0 + D_1 + D_2) / (log y)^2 dy`.
pub fn integral_prediction(consts: &ModulusConstants, a: i64, b: i64, x: f64) -> Result<PredictionRow> {
    let m = consts.modulus();
    let (ca, cb) = check_pair(m, a, b)?;
    let y_min = integral_lower_limit(m);
    if !(x >= 1e4) || x <= y_min || !x.is_finite() {
        return invalid(format!("integral prediction needs x >= 1e4 and x > {y_min:.1}, got {x}"));
    }
    let geometry = PairGeometry::new(m, ca, cb)?;
    let q = m.q() as f64;
    let phi = m.phi() as f64;
    let scale = q / (phi * phi);
    let failure = std::cell::Cell::new(None);
    let integrand = |u: f64| match geometry.terms(consts, u) {
        Ok(d) => scale * d.alpha.powf(geometry.epsilon) / (u * u) * d.total() * u.exp(),
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let result = integrate(integrand, y_min.ln(), x.ln(), INTEGRAL_TOLERANCE, 32);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let result = result?;
    if result.error_estimate > INTEGRAL_TOLERANCE * result.value.abs() {
        return Err(Error::Consistency(format!(
            "integral prediction error estimate {:e} exceeds tolerance",
            result.error_estimate
        )));
    }
    Ok(PredictionRow {
        pattern: ResiduePattern::new(m, &[a, b])?,
        x,
        method: PredictionMethod::Integral,
        value: result.value,
        terms: None,
        quadrature_error_estimate: Some(result.error_estimate),
        y_min: Some(y_min),
    })
}

/// Integral predictions for all `phi^2` pairs, in [`ResiduePattern::all`] order.
pub fn integral_prediction_table(consts: &ModulusConstants, x: f64) -> Result<Vec<PredictionRow>> {
    let patterns = ResiduePattern::all(consts.modulus(), 2);
    patterns
        .par_iter()
        .map(|p| integral_prediction(consts, p.classes()[0] as i64, p.classes()[1] as i64, x))
        .collect()
}

/// Asymptotic predictions for all `phi^r` patterns.
pub fn asymptotic_prediction_table(consts: &ModulusConstants, r: usize, x: f64) -> Result<Vec<PredictionRow>> {
    let patterns = ResiduePattern::all(consts.modulus(), r);
    patterns.par_iter().map(|p| asymptotic_prediction(consts, p, x)).collect()
}

/// `x/(4 log^2 x) log((2 pi/q) log x)`, the predicted excess of `(a, -a)`
/// over `(a, a)` for `q` in `{3, 4}`.
pub fn always_bias_difference(q: u64, x: f64) -> Result<f64> {
    if q != 3 && q != 4 {
        return invalid(format!("the always-bias difference is stated for q = 3, 4 only, got {q}"));
    }
    if !(x >= 10.0) {
        return invalid(format!("x must be at least 10, got {x}"));
    }
    let lx = x.ln();
    Ok(x / (4.0 * lx * lx) * (2.0 * PI / q as f64 * lx).ln())
}

/// `-x/(2 log^2 x) log(2 pi log x / q)`, the predicted value of
/// `sum_{p_n <= x} (p_n/q)(p_{n+1}/q)`.
pub fn quad_residue_sum_prediction(q: u64, x: f64) -> Result<f64> {
    if q < 3 || !is_prime(q) {
        return invalid(format!("q must be an odd prime, got {q}"));
    }
    if !(x >= 10.0) {
        return invalid(format!("x must be at least 10, got {x}"));
    }
    let lx = x.ln();
    Ok(-x / (2.0 * lx * lx) * (2.0 * PI * lx / q as f64).ln())
}

/// `li(x)/phi^2 (1 + c2_skip / log x)` for the pair `(p_n, p_{n+k})`.
pub fn skip_prediction(modulus: &Modulus, a: i64, b: i64, k: u32, x: f64) -> Result<PredictionRow> {
    let (c1_skip, c2_skip) = skip_coefficient(modulus, a, b, k)?;
    let phi = modulus.phi() as f64;
    let lx = x.ln();
    let main = li(x)? / (phi * phi);
    Ok(PredictionRow {
        pattern: ResiduePattern::new(modulus, &[a, b])?,
        x,
        method: PredictionMethod::Skip,
        value: main * (1.0 + c2_skip / lx),
        terms: Some(AsymptoticTerms { main, loglog_term: main * c1_skip, log_term: main * c2_skip / lx }),
        quadrature_error_estimate: None,
        y_min: None,
    })
}
