//! Order selection for the general linear model y = βᵀH_q + noise with
//! nested, known design rows.
//!
//! Residual energies come from projecting y onto an orthonormal basis of the
//! nested row spaces, so the n×n projector is never formed. Overestimation
//! probabilities use the exact beta law of the residual ratio.

use num_complex::{Complex, Complex64};
use rand::Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::itc::{select_order, LikelihoodProfile, PenaltyRule, SelectionResult};
use crate::linalg::{gram_condition, orthonormalize_rows};
use crate::rng::{stream, tag};
use crate::roots::brent;
use crate::scalar::Real;
use crate::specfun::{reg_inc_beta_split, Probability};
use crate::wishart::cn;

/// Largest accepted condition number of the Gram matrix of the design rows.
pub const MAX_GRAM_CONDITION: f64 = 1e8;

/// Residual energy at or below this fraction of ‖y‖² counts as exactly zero.
pub const ZERO_RESIDUAL: f64 = 1e-20;

/// Nested design: order k uses the first `rows_per_order·k` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct GlmScenario<T> {
    n: usize,
    q_max: usize,
    rows_per_order: usize,
    rows: Vec<Vec<T>>,
    basis: Vec<Vec<T>>,
    free_params: Vec<u64>,
    frequencies: Vec<T>,
}

impl<T: Real> GlmScenario<T> {
    /// `rows` holds `rows_per_order·q_max` rows of length `n`; `free_params`
    /// gives φ(k) for k = 0..=q_max.
    pub fn new(
        n: usize,
        rows_per_order: usize,
        rows: Vec<Vec<T>>,
        free_params: Vec<u64>,
    ) -> Result<Self> {
        if rows_per_order == 0 || !rows.len().is_multiple_of(rows_per_order) {
            return Err(Error::Scenario(format!(
                "{} rows do not split into blocks of {rows_per_order}",
                rows.len()
            )));
        }
        let q_max = rows.len() / rows_per_order;
        if rows.len() >= n {
            return Err(Error::Scenario(format!(
                "{} design rows need more than n = {n} samples",
                rows.len()
            )));
        }
        if rows
            .iter()
            .any(|r| r.len() != n || r.iter().any(|x| !x.is_finite()))
        {
            return Err(Error::Scenario(format!(
                "every design row must hold {n} finite values"
            )));
        }
        if free_params.len() != q_max + 1
            || free_params[0] == 0
            || free_params.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::Scenario(
                "φ(k) must be positive and strictly increasing over 0..=q_max".into(),
            ));
        }
        let cond = gram_condition(&rows)?;
        if !(cond <= T::lit(MAX_GRAM_CONDITION)) {
            return Err(Error::Scenario(format!(
                "design rows are ill-conditioned (Gram condition {cond})"
            )));
        }
        let basis = orthonormalize_rows(&rows).map_err(|e| Error::Scenario(e.to_string()))?;
        Ok(Self {
            n,
            q_max,
            rows_per_order,
            rows,
            basis,
            free_params,
            frequencies: Vec::new(),
        })
    }

    /// Known-frequency sinusoids f_k = 0.2 + (k − 1)/n, rows cos(2πf_k i) and
    /// sin(2πf_k i) for i = 1..n, and φ(k) = 2k + 1.
    pub fn sinusoids(q_max: usize, n: usize) -> Result<Self> {
        if q_max == 0 {
            return Err(Error::Scenario("q_max must be at least 1".into()));
        }
        if 2 * q_max + 2 >= n {
            return Err(Error::Scenario(format!(
                "need 2·q_max + 2 < n, got q_max = {q_max}, n = {n}"
            )));
        }
        let nf = T::from_count(n);
        let frequencies: Vec<T> = (0..q_max)
            .map(|k| T::lit(0.2) + T::from_count(k) / nf)
            .collect();
        if frequencies.iter().any(|&f| f >= T::lit(0.5)) {
            return Err(Error::Scenario("frequencies must stay below 0.5".into()));
        }
        let two_pi = T::TAU();
        let mut rows = Vec::with_capacity(2 * q_max);
        for &f in &frequencies {
            let phase = |i: usize| two_pi * f * T::from_count(i);
            rows.push((1..=n).map(|i| phase(i).cos()).collect());
            rows.push((1..=n).map(|i| phase(i).sin()).collect());
        }
        let free = (0..=q_max as u64).map(|k| 2 * k + 1).collect();
        let mut s = Self::new(n, 2, rows, free)?;
        s.frequencies = frequencies;
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q_max(&self) -> usize {
        self.q_max
    }

    /// Rows ψ added per order step (2 for sinusoids).
    pub fn rows_per_order(&self) -> usize {
        self.rows_per_order
    }

    /// Design matrix H_k.
    pub fn design_rows(&self, k: usize) -> &[Vec<T>] {
        &self.rows[..self.rows_per_order * k.min(self.q_max)]
    }

    pub fn free_params(&self) -> &[u64] {
        &self.free_params
    }

    /// Sinusoid frequencies, empty for general scenarios.
    pub fn frequencies(&self) -> &[T] {
        &self.frequencies
    }

    fn check_len(&self, y: &[Complex<T>]) -> Result<()> {
        if y.len() != self.n {
            return Err(Error::Data(format!(
                "expected {} observations, got {}",
                self.n,
                y.len()
            )));
        }
        if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Data("non-finite observation".into()));
        }
        Ok(())
    }
}

/// σ̂_k² for every k = 0..=q_max, nonincreasing in k.
pub fn residual_profile<T: Real>(y: &[Complex<T>], scenario: &GlmScenario<T>) -> Result<Vec<T>> {
    scenario.check_len(y)?;
    let nf = T::from_count(scenario.n);
    let energy = |r: &[Complex<T>]| r.iter().map(|z| z.norm_sqr()).sum::<T>();
    let mut r = y.to_vec();
    let mut out = Vec::with_capacity(scenario.q_max + 1);
    out.push(energy(&r) / nf);
    for block in scenario.basis.chunks(scenario.rows_per_order) {
        for b in block {
            let c: Complex<T> = r.iter().zip(b).map(|(z, &h)| z * h).sum();
            for (z, &h) in r.iter_mut().zip(b) {
                *z -= c * h;
            }
        }
        let last = *out.last().expect("nonempty");
        out.push((energy(&r) / nf).min(last));
    }
    Ok(out)
}

/// (1/n)·‖residual of y after projection onto the rows of H_k‖².
pub fn residual_variance<T: Real>(
    y: &[Complex<T>],
    scenario: &GlmScenario<T>,
    k: usize,
) -> Result<T> {
    if k > scenario.q_max {
        return Err(domain(format!(
            "order {k} exceeds q_max = {}",
            scenario.q_max
        )));
    }
    Ok(residual_profile(y, scenario)?[k])
}

/// Profile with −2 ln L(k) = n·ln σ̂_k². Exactly representable data give −∞ at
/// and above the true order, and the tie resolves to the smallest such k.
pub fn glm_profile<T: Real>(
    y: &[Complex<T>],
    scenario: &GlmScenario<T>,
) -> Result<LikelihoodProfile<T>> {
    let sigma2 = residual_profile(y, scenario)?;
    let floor = sigma2[0] * T::lit(ZERO_RESIDUAL);
    let nf = T::from_count(scenario.n);
    let m2ll = sigma2
        .iter()
        .map(|&s| {
            if s <= floor {
                T::neg_infinity()
            } else {
                nf * s.ln()
            }
        })
        .collect();
    LikelihoodProfile::new(m2ll, scenario.free_params.clone())
}

pub fn estimate_order_glm<T: Real>(
    y: &[Complex<T>],
    scenario: &GlmScenario<T>,
    rule: &PenaltyRule<T>,
) -> Result<SelectionResult<T>> {
    select_order(&glm_profile(y, scenario)?, rule, scenario.n)
}

/// P(ITC(q + i) < ITC(q)) = I_x(n − 2(q + i), 2i) with x = exp(−2iν/n).
pub fn prob_over_term<T: Real>(q: usize, i: usize, n: usize, nu: T) -> Result<Probability<T>> {
    if i == 0 {
        return Err(domain("step i must be at least 1"));
    }
    if n <= 2 * (q + i) {
        return Err(domain(format!("n = {n} too small for q = {q}, i = {i}")));
    }
    if !(nu >= T::zero()) {
        return Err(domain(format!("ν = {nu} must be nonnegative")));
    }
    let a = T::from_count(n - 2 * (q + i));
    let b = T::from_count(2 * i);
    let t = -T::from_count(2 * i) * nu / T::from_count(n);
    reg_inc_beta_split(t.exp(), -t.exp_m1(), a, b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoverBounds<T> {
    pub lb: Probability<T>,
    pub ub: Probability<T>,
}

/// Single-term lower bound and i_max-term union upper bound (clamped to 1).
pub fn pover_bounds<T: Real>(q: usize, n: usize, nu: T, i_max: usize) -> Result<PoverBounds<T>> {
    if i_max == 0 {
        return Err(domain("i_max must be at least 1"));
    }
    let lb = prob_over_term(q, 1, n, nu)?;
    let mut sum = lb.value();
    for i in 2..=i_max {
        sum += prob_over_term(q, i, n, nu)?.value();
    }
    Ok(PoverBounds {
        lb,
        ub: Probability::clamped(sum),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlmDesignResult<T> {
    pub nu: T,
    pub i_max: usize,
    pub predicted_pover_ub: Probability<T>,
    pub warnings: Vec<String>,
}

/// ν at which the q = 0 union bound equals `pover_max`.
pub fn design_nu_glm<T: Real>(
    n: usize,
    pover_max: Probability<T>,
    i_max: usize,
) -> Result<GlmDesignResult<T>> {
    let target = pover_max.value();
    if !(target > T::zero() && target < T::one()) {
        return Err(domain(format!(
            "P_over target {target} must lie strictly in (0, 1)"
        )));
    }
    let ub = |nu: T| pover_bounds(0, n, nu, i_max).map(|b| b.ub.value());
    let at_zero = ub(T::zero())?;
    if at_zero <= target {
        return Ok(GlmDesignResult {
            nu: T::zero(),
            i_max,
            predicted_pover_ub: Probability::clamped(at_zero),
            warnings: vec![format!(
                "bound at ν = 0 is already {at_zero}; no penalty needed"
            )],
        });
    }
    let mut hi = T::lit(4.0);
    while ub(hi)? > target {
        hi *= T::lit(2.0);
        if hi > T::from_count(n) * T::lit(1e3) {
            return Err(Error::Design(format!(
                "no finite ν reaches P_over target {target}"
            )));
        }
    }
    let f = |nu: T| ub(nu).map(|u| u - target).unwrap_or(T::nan());
    let nu = brent(f, T::zero(), hi, T::epsilon())?;
    let predicted = ub(nu)?;
    let tol = T::lit(1e-9).max(T::lit(64.0) * T::epsilon());
    if (predicted - target).abs() > tol {
        return Err(Error::Convergence(format!(
            "designed bound {predicted} misses target {target}"
        )));
    }
    Ok(GlmDesignResult {
        nu,
        i_max,
        predicted_pover_ub: Probability::clamped(predicted),
        warnings: Vec::new(),
    })
}

/// x_i = Σ_l a_l·exp(j(2πf_l i + φ_l)) + w_i, i = 1..n, with w_i circular
/// complex Gaussian of variance `noise_var`.
pub fn synth_sinusoids<R: Rng + ?Sized>(
    scenario: &GlmScenario<f64>,
    amplitudes: &[f64],
    phases: &[f64],
    noise_var: f64,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if amplitudes.len() != phases.len() {
        return Err(domain("amplitude and phase lists differ in length"));
    }
    if amplitudes.len() > scenario.frequencies.len() {
        return Err(domain(format!(
            "{} sinusoids requested but the scenario has {} frequencies",
            amplitudes.len(),
            scenario.frequencies.len()
        )));
    }
    if !(noise_var >= 0.0) {
        return Err(domain("noise variance must be nonnegative"));
    }
    let sd = noise_var.sqrt();
    let tau = std::f64::consts::TAU;
    Ok((1..=scenario.n)
        .map(|i| {
            let s: Complex64 = amplitudes
                .iter()
                .zip(phases)
                .zip(&scenario.frequencies)
                .map(|((&a, &ph), &f)| Complex64::from_polar(a, tau * f * i as f64 + ph))
                .sum();
            s + cn(rng) * sd
        })
        .collect())
}

pub fn synth_sinusoids_seeded(
    scenario: &GlmScenario<f64>,
    amplitudes: &[f64],
    phases: &[f64],
    noise_var: f64,
    seed: u64,
) -> Result<Vec<Complex64>> {
    synth_sinusoids(
        scenario,
        amplitudes,
        phases,
        noise_var,
        &mut stream(seed, 0, 0, tag::SINUSOID),
    )
}
