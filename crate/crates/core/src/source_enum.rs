//! Number-of-signals estimation from multi-sensor data with the Wax–Kailath
//! metric, its high-SNR overestimation probability, and the penalty designer.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::itc::{select_order, LikelihoodProfile, PenaltyRule, SelectionResult};
use crate::linalg::hermitian_eigenvalues;
use crate::roots::brent;
use crate::scalar::Real;
use crate::specfun::Probability;
use crate::wishart::{u_model, ShiftedGamma, UBackend, WishartSpec};

/// p×n complex observations, one row per sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorBatch<T> {
    p: usize,
    n: usize,
    samples: Vec<Complex<T>>,
}

impl<T: Real> SensorBatch<T> {
    /// `samples` is row-major: sensor `i`, time `j` at `i * n + j`.
    pub fn new(p: usize, n: usize, samples: Vec<Complex<T>>) -> Result<Self> {
        if p < 2 {
            return Err(Error::Data(format!("need at least 2 sensors, got {p}")));
        }
        if n < p {
            return Err(Error::Data(format!(
                "need n ≥ p samples, got n = {n}, p = {p}"
            )));
        }
        if samples.len() != p * n {
            return Err(Error::Data(format!(
                "expected {} samples, got {}",
                p * n,
                samples.len()
            )));
        }
        if samples
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Data("non-finite sample".into()));
        }
        Ok(Self { p, n, samples })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.samples[i * self.n..(i + 1) * self.n]
    }

    /// Every sample multiplied by `c`.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            samples: self.samples.iter().map(|z| z * c).collect(),
            ..self.clone()
        }
    }
}

/// Sample-covariance eigenvalues, descending and nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigSpectrum<T> {
    values: Vec<T>,
}

impl<T: Real> EigSpectrum<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Data("spectrum needs at least 2 eigenvalues".into()));
        }
        if values.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(Error::Data(
                "eigenvalues must be finite and nonnegative".into(),
            ));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Data("eigenvalues must be sorted descending".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn p(&self) -> usize {
        self.values.len()
    }
}

/// Eigenvalues of (1/n)·Y·Yᴴ.
pub fn scm_eigenvalues<T: Real>(batch: &SensorBatch<T>) -> Result<EigSpectrum<T>> {
    let p = batch.p;
    let inv_n = T::one() / T::from_count(batch.n);
    let mut scm = vec![Complex::new(T::zero(), T::zero()); p * p];
    for i in 0..p {
        for j in i..p {
            let s: Complex<T> = batch
                .row(i)
                .iter()
                .zip(batch.row(j))
                .map(|(a, b)| a * b.conj())
                .sum();
            scm[i * p + j] = s * inv_n;
        }
    }
    spectrum_from_scm(&mut scm, p)
}

/// Eigenvalues of an already formed p×p sample covariance (row-major, upper
/// triangle used). Rounding-level negative eigenvalues are clamped to zero.
pub fn spectrum_from_scm<T: Real>(scm: &mut [Complex<T>], p: usize) -> Result<EigSpectrum<T>> {
    let values = hermitian_eigenvalues(scm, p)?
        .into_iter()
        .map(|v| v.max(T::zero()))
        .collect();
    EigSpectrum::new(values)
}

/// −2n(p−k)·ln(g/a), where g and a are the geometric and arithmetic means of
/// the smallest p−k eigenvalues. A zero tail eigenvalue with k < p−1 gives +∞.
pub fn wk_minus2loglik<T: Real>(spectrum: &EigSpectrum<T>, k: usize, n: usize) -> Result<T> {
    let p = spectrum.p();
    if k >= p {
        return Err(domain(format!("order {k} must be below p = {p}")));
    }
    let tail = &spectrum.values[k..];
    let m = tail.len();
    if m == 1 || (tail[0] > T::zero() && tail.iter().all(|&v| v == tail[0])) {
        return Ok(T::zero());
    }
    if tail.iter().any(|&v| v <= T::zero()) {
        return Ok(T::infinity());
    }
    let mf = T::from_count(m);
    let mean_log = tail.iter().map(|v| v.ln()).sum::<T>() / mf;
    let log_mean = (tail.iter().copied().sum::<T>() / mf).ln();
    let value = -T::lit(2.0) * T::from_count(n) * mf * (mean_log - log_mean);
    Ok(value.max(T::zero()))
}

/// φ(k) = k(2p − k) + 1.
pub fn enum_free_params(k: usize, p: usize) -> u64 {
    (k * (2 * p - k) + 1) as u64
}

pub fn wk_profile<T: Real>(
    spectrum: &EigSpectrum<T>,
    n: usize,
    q_max: usize,
) -> Result<LikelihoodProfile<T>> {
    let p = spectrum.p();
    if q_max == 0 || q_max >= p {
        return Err(domain(format!("q_max = {q_max} must lie in 1..={}", p - 1)));
    }
    let m2ll = (0..=q_max)
        .map(|k| wk_minus2loglik(spectrum, k, n))
        .collect::<Result<Vec<_>>>()?;
    LikelihoodProfile::new(m2ll, (0..=q_max).map(|k| enum_free_params(k, p)).collect())
}

pub fn select_from_spectrum<T: Real>(
    spectrum: &EigSpectrum<T>,
    n: usize,
    rule: &PenaltyRule<T>,
    q_max: usize,
) -> Result<SelectionResult<T>> {
    select_order(&wk_profile(spectrum, n, q_max)?, rule, n)
}

pub fn estimate_num_signals<T: Real>(
    batch: &SensorBatch<T>,
    rule: &PenaltyRule<T>,
    q_max: usize,
) -> Result<SelectionResult<T>> {
    select_from_spectrum(&scm_eigenvalues(batch)?, batch.n, rule, q_max)
}

/// ln C for C = (m−1)^{m−1}/m^m, the peak of v(1−v)^{m−1} on [1/m, 1].
fn ln_peak<T: Real>(m: usize) -> T {
    let mf = T::from_count(m);
    let m1 = T::from_count(m - 1);
    let head = if m == 1 { T::zero() } else { m1 * m1.ln() };
    head - mf * mf.ln()
}

/// ξ_q = C·exp(−ν(2m − 1)/(2n)) with m = p − q.
pub fn xi_threshold<T: Real>(q: usize, p: usize, n: usize, nu: T) -> Result<T> {
    if p < 2 || q > p - 2 {
        return Err(domain(format!(
            "q = {q} must be at most p − 2 = {}",
            p as i64 - 2
        )));
    }
    if !(nu >= T::zero()) {
        return Err(domain(format!("ν = {nu} must be nonnegative")));
    }
    let m = p - q;
    let rate = T::from_count(2 * m - 1) / (T::lit(2.0) * T::from_count(n));
    Ok((ln_peak::<T>(m) - nu * rate).exp())
}

/// The unique v in [1/m, 1] with v(1 − v)^{m−1} = ξ.
pub fn root_v<T: Real>(xi: T, m: usize) -> Result<T> {
    if m < 2 {
        return Err(domain(format!("m = {m} must be at least 2")));
    }
    if !(xi > T::zero()) {
        return Err(domain(format!("ξ = {xi} must be positive")));
    }
    let peak = ln_peak::<T>(m).exp();
    let lo = T::one() / T::from_count(m);
    if xi > peak * (T::one() + T::lit(8.0) * T::epsilon()) {
        return Err(Error::NoRoot(format!(
            "ξ = {xi} exceeds the maximum {peak}; ν would have to be negative"
        )));
    }
    if xi >= peak {
        return Ok(lo);
    }
    let e = T::from_count(m - 1);
    let f = |v: T| v * (T::one() - v).powf(e) - xi;
    brent(f, lo, T::one(), T::epsilon())
}

/// High-SNR P_over ≈ 1 − F_u(ṽ) from a given u-model of dimension p − q.
pub fn pover_highsnr_with_model<T: Real>(
    model: &ShiftedGamma<T>,
    q: usize,
    p: usize,
    n: usize,
    nu: T,
) -> Result<Probability<T>> {
    let v = root_v(xi_threshold(q, p, n, nu)?, p - q)?;
    Ok(model.cdf(v).complement())
}

pub fn pover_highsnr(
    q: usize,
    p: usize,
    n: usize,
    nu: f64,
    backend: UBackend,
) -> Result<Probability<f64>> {
    if p < 2 || q > p - 2 {
        return Err(domain(format!("q = {q} must be at most p − 2")));
    }
    let model = u_model(WishartSpec::new(p - q, n)?, backend)?;
    pover_highsnr_with_model(&model, q, p, n, nu)
}

/// Required penalty for one true order q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnumDesignRow<T> {
    pub q: usize,
    pub nu: T,
    pub v_threshold: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumDesignResult<T> {
    pub nu: T,
    pub q_star: usize,
    pub v_threshold: T,
    pub predicted_pover: Probability<T>,
    pub backend: String,
    pub per_q: Vec<EnumDesignRow<T>>,
    pub warnings: Vec<String>,
}

fn check_design_args<T: Real>(p: usize, q_max: usize, pover_max: Probability<T>) -> Result<()> {
    if p < 3 || q_max == 0 || q_max > p - 2 {
        return Err(domain(format!(
            "q_max = {q_max} must lie in 1..=p−2 with p = {p}"
        )));
    }
    let v = pover_max.value();
    if !(v > T::zero() && v < T::one()) {
        return Err(domain(format!(
            "P_over target {v} must lie strictly in (0, 1)"
        )));
    }
    Ok(())
}

/// Smallest ν keeping high-SNR P_over ≤ `pover_max` for every q in 0..=q_max.
///
/// `model_for` supplies the u-model for dimension p − q; per q the required ν
/// follows from inverting ξ_q at ṽ_q = F_u⁻¹(1 − pover_max).
pub fn design_nu_enum_with<T, F>(
    p: usize,
    n: usize,
    q_max: usize,
    pover_max: Probability<T>,
    backend_label: &str,
    mut model_for: F,
) -> Result<EnumDesignResult<T>>
where
    T: Real,
    F: FnMut(usize) -> Result<ShiftedGamma<T>>,
{
    check_design_args(p, q_max, pover_max)?;
    let mut per_q = Vec::with_capacity(q_max + 1);
    let mut models = Vec::with_capacity(q_max + 1);
    for q in 0..=q_max {
        let m = p - q;
        let model = model_for(q)?;
        let v = model.quantile(pover_max.complement())?;
        let lo = T::one() / T::from_count(m);
        if v < lo {
            return Err(Error::Design(format!(
                "P_over target {} is infeasible at q = {q}: threshold {v} lies below 1/{m}",
                pover_max.value()
            )));
        }
        if v >= T::one() {
            return Err(Error::Design(format!(
                "P_over target {} needs an unbounded penalty at q = {q}",
                pover_max.value()
            )));
        }
        let ln_level = v.ln() + T::from_count(m - 1) * (-v).ln_1p();
        let nu = T::lit(2.0) * T::from_count(n) / T::from_count(2 * m - 1)
            * (ln_peak::<T>(m) - ln_level);
        per_q.push(EnumDesignRow {
            q,
            nu,
            v_threshold: v,
        });
        models.push(model);
    }
    let mut best = 0;
    for (i, row) in per_q.iter().enumerate() {
        if row.nu > per_q[best].nu {
            best = i;
        }
    }
    let mut warnings = Vec::new();
    let mut nu = per_q[best].nu;
    if nu < T::zero() {
        warnings.push(format!("required ν = {nu} is negative; clamped to 0"));
        nu = T::zero();
    }
    let predicted_pover = pover_highsnr_with_model(&models[best], best, p, n, nu)?;
    Ok(EnumDesignResult {
        nu,
        q_star: best,
        v_threshold: per_q[best].v_threshold,
        predicted_pover,
        backend: backend_label.to_string(),
        per_q,
        warnings,
    })
}

pub fn design_nu_enum(
    p: usize,
    n: usize,
    q_max: usize,
    pover_max: Probability<f64>,
    backend: UBackend,
) -> Result<EnumDesignResult<f64>> {
    check_design_args(p, q_max, pover_max)?;
    design_nu_enum_with(p, n, q_max, pover_max, backend.label(), |q| {
        u_model(WishartSpec::new(p - q, n)?, backend)
    })
}
