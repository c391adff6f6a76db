//! Distribution of u = ℓ₁/t, the largest eigenvalue over the trace of a white
//! central complex Wishart matrix, approximated by a moment-matched shifted
//! gamma law.
//!
//! Moments of ℓ₁ come either from a seeded Monte Carlo oracle (exact in
//! distribution) or from a closed-form large-(n, p′) gamma approximation.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::rng::{stream, tag};
use crate::scalar::Real;
use crate::specfun::{inv_reg_lower_gamma, reg_lower_gamma, Probability};
use crate::stats::RawMoments3;

/// Dimension p′ and degrees of freedom n of a p′×p′ complex Wishart matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct WishartSpec {
    dim: usize,
    dof: usize,
}

impl WishartSpec {
    pub fn new(dim: usize, dof: usize) -> Result<Self> {
        if dim == 0 {
            return Err(domain("Wishart dimension must be at least 1"));
        }
        if dof < dim {
            return Err(domain(format!(
                "Wishart dof n = {dof} must be ≥ dimension {dim}"
            )));
        }
        Ok(Self { dim, dof })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dof(&self) -> usize {
        self.dof
    }
}

/// First three raw moments of a positive random variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentTriple<T> {
    pub m1: T,
    pub m2: T,
    pub m3: T,
}

impl<T: Real> MomentTriple<T> {
    pub fn new(m1: T, m2: T, m3: T) -> Self {
        Self { m1, m2, m3 }
    }

    pub fn variance(&self) -> T {
        self.m2 - self.m1 * self.m1
    }

    /// Third central moment m3 − 3m1m2 + 2m1³.
    pub fn central_third(&self) -> T {
        self.m3 - T::lit(3.0) * self.m1 * self.m2 + T::lit(2.0) * self.m1 * self.m1 * self.m1
    }

    /// Necessary conditions for raw moments of a positive variable.
    pub fn is_admissible(&self) -> bool {
        self.m1 > T::zero() && self.m2 >= self.m1 * self.m1 && self.m3 >= self.m2 * self.m1
    }
}

/// Law of G − α with G ~ Gamma(shape κ, scale θ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftedGamma<T> {
    shape: T,
    scale: T,
    shift: T,
}

impl<T: Real> ShiftedGamma<T> {
    pub fn new(shape: T, scale: T, shift: T) -> Result<Self> {
        if !(shape > T::zero() && shape.is_finite()) || !(scale > T::zero() && scale.is_finite()) {
            return Err(Error::Fit(format!(
                "shape {shape} and scale {scale} must be positive"
            )));
        }
        if !shift.is_finite() {
            return Err(Error::Fit("non-finite shift".into()));
        }
        Ok(Self {
            shape,
            scale,
            shift,
        })
    }

    pub fn shape(&self) -> T {
        self.shape
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn shift(&self) -> T {
        self.shift
    }

    /// F(x) = γ̃(κ, (x + α)/θ) for x > −α, zero otherwise.
    pub fn cdf(&self, x: T) -> Probability<T> {
        if x.is_nan() || x <= -self.shift {
            return Probability::zero();
        }
        if x == T::infinity() {
            return Probability::one();
        }
        reg_lower_gamma(self.shape, (x + self.shift) / self.scale)
            .expect("validated shape and nonnegative argument")
    }

    pub fn quantile(&self, prob: Probability<T>) -> Result<T> {
        Ok(self.scale * inv_reg_lower_gamma(self.shape, prob)? - self.shift)
    }

    pub fn raw_moments(&self) -> MomentTriple<T> {
        let (k, th, a) = (self.shape, self.scale, self.shift);
        let one = T::one();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let g1 = k * th;
        let g2 = k * (k + one) * th * th;
        let g3 = k * (k + one) * (k + two) * th * th * th;
        MomentTriple {
            m1: g1 - a,
            m2: g2 - two * a * g1 + a * a,
            m3: g3 - three * a * g2 + three * a * a * g1 - a * a * a,
        }
    }
}

/// Γ(p′n + order)/Γ(p′n), the raw moments of the trace t ~ Gamma(p′n, 1).
pub fn trace_moment<T: Real>(spec: WishartSpec, order: u32) -> Result<T> {
    if order == 0 {
        return Err(domain("moment order must be at least 1"));
    }
    let shape = T::from_count(spec.dim * spec.dof);
    let log: T = (0..order)
        .map(|j| (shape + T::from_count(j as usize)).ln())
        .sum();
    let value = log.exp();
    if !value.is_finite() {
        return Err(Error::Range(format!(
            "trace moment of order {order} overflows"
        )));
    }
    Ok(value)
}

const APPX_SHAPE: f64 = 79.6595;
const APPX_SCALE: f64 = 0.101037;
const APPX_SHIFT: f64 = 9.81961;

/// Gamma approximation of ℓ₁ for large n and p′:
/// (ℓ₁ − μ)/σ + α̃ ≈ Gamma(κ̃, θ̃), with μ = (√n + √p′)² and
/// σ = √μ·(1/√n + 1/√p′)^{1/3}. Poor when n and p′ are small.
pub fn lmax_moments_large_n<T: Real>(spec: WishartSpec) -> MomentTriple<T> {
    let n = T::from_count(spec.dof);
    let p = T::from_count(spec.dim);
    let one = T::one();
    let mu = (n.sqrt() + p.sqrt()).powi(2);
    let sigma = mu.sqrt() * (one / n.sqrt() + one / p.sqrt()).cbrt();
    let lambda = mu - T::lit(APPX_SHIFT) * sigma;
    let kappa = T::lit(APPX_SHAPE);
    let theta = T::lit(APPX_SCALE);
    let g1 = theta * kappa;
    let g2 = theta * theta * kappa * (kappa + one);
    let g3 = theta * theta * theta * kappa * (kappa + one) * (kappa + T::lit(2.0));
    let three = T::lit(3.0);
    MomentTriple {
        m1: lambda + sigma * g1,
        m2: lambda * lambda + T::lit(2.0) * lambda * sigma * g1 + sigma * sigma * g2,
        m3: lambda.powi(3)
            + three * lambda * lambda * sigma * g1
            + three * lambda * sigma * sigma * g2
            + sigma.powi(3) * g3,
    }
}

/// Moments of u from moments of ℓ₁, using the independence of u and t:
/// m_u(i) = m_ℓ(i)/m_t(i). For p′ = 1, u ≡ 1.
pub fn u_moments_from_lmax<T: Real>(
    spec: WishartSpec,
    lmax: &MomentTriple<T>,
) -> Result<MomentTriple<T>> {
    if spec.dim == 1 {
        return Ok(MomentTriple::new(T::one(), T::one(), T::one()));
    }
    Ok(MomentTriple {
        m1: lmax.m1 / trace_moment(spec, 1)?,
        m2: lmax.m2 / trace_moment(spec, 2)?,
        m3: lmax.m3 / trace_moment(spec, 3)?,
    })
}

/// Three-moment match: κ = 4v³/s², θ = s/(2v), α = κθ − m1 with v the
/// variance and s the third central moment.
pub fn fit_shifted_gamma<T: Real>(m: &MomentTriple<T>) -> Result<ShiftedGamma<T>> {
    let var = m.variance();
    let skew = m.central_third();
    if !(var > T::zero()) {
        return Err(Error::Fit(format!("variance {var} is not positive")));
    }
    if !(skew > T::zero()) {
        return Err(Error::Fit(format!(
            "third central moment {skew} is not positive"
        )));
    }
    let kappa = T::lit(4.0) * var * var * var / (skew * skew);
    let theta = skew / (T::lit(2.0) * var);
    ShiftedGamma::new(kappa, theta, kappa * theta - m.m1)
}

/// Shifted-gamma u-model from the closed-form ℓ₁ moments, generic over the scalar.
pub fn u_model_large_n<T: Real>(spec: WishartSpec) -> Result<ShiftedGamma<T>> {
    fit_shifted_gamma(&u_moments_from_lmax(
        spec,
        &lmax_moments_large_n::<T>(spec),
    )?)
}

/// Source of the ℓ₁ moments behind the u-model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum UBackend {
    /// Moments estimated from seeded Bartlett draws.
    MonteCarlo { trials: u64, seed: u64 },
    /// Closed-form large-n moments of ℓ₁; selected as `appendix-a`.
    #[serde(rename = "appendix-a")]
    LargeN,
}

impl UBackend {
    pub const DEFAULT_TRIALS: u64 = 100_000;
    pub const DEFAULT_SEED: u64 = 0x5EED;

    pub fn label(&self) -> &'static str {
        match self {
            Self::MonteCarlo { .. } => "mc",
            Self::LargeN => "appendix-a",
        }
    }
}

impl Default for UBackend {
    fn default() -> Self {
        Self::MonteCarlo {
            trials: Self::DEFAULT_TRIALS,
            seed: Self::DEFAULT_SEED,
        }
    }
}

pub fn u_moments(spec: WishartSpec, backend: UBackend) -> Result<MomentTriple<f64>> {
    let lmax = match backend {
        UBackend::MonteCarlo { trials, seed } => lmax_moments_mc(spec, trials, seed)?.moments,
        UBackend::LargeN => lmax_moments_large_n(spec),
    };
    u_moments_from_lmax(spec, &lmax)
}

pub fn u_model(spec: WishartSpec, backend: UBackend) -> Result<ShiftedGamma<f64>> {
    fit_shifted_gamma(&u_moments(spec, backend)?)
}

/// How Wishart matrices are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampler {
    /// W = LLᴴ with |L_ii|² ~ Gamma(n − i + 1, 1) and L_ij ~ CN(0, 1) below
    /// the diagonal: exact in distribution and O(p′³) per draw.
    #[default]
    Bartlett,
    /// W = XXᴴ with X a p′×n matrix of CN(0, 1) entries.
    Direct,
}

/// Draws one Wishart matrix W (row-major, p′×p′) with identity scale.
pub struct WishartSampler {
    spec: WishartSpec,
    kind: Sampler,
    diag: Vec<Gamma<f64>>,
}

impl WishartSampler {
    pub fn new(spec: WishartSpec, kind: Sampler) -> Self {
        let diag = (0..spec.dim)
            .map(|i| Gamma::new((spec.dof - i) as f64, 1.0).expect("positive shape"))
            .collect();
        Self { spec, kind, diag }
    }

    pub fn spec(&self) -> WishartSpec {
        self.spec
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<Complex64>) {
        let p = self.spec.dim;
        out.clear();
        out.resize(p * p, Complex64::new(0.0, 0.0));
        match self.kind {
            Sampler::Bartlett => {
                let mut l = vec![Complex64::new(0.0, 0.0); p * p];
                for i in 0..p {
                    l[i * p + i] = Complex64::new(self.diag[i].sample(rng).sqrt(), 0.0);
                    for j in 0..i {
                        l[i * p + j] = cn(rng);
                    }
                }
                for i in 0..p {
                    for j in 0..=i {
                        let s: Complex64 =
                            (0..=j).map(|k| l[i * p + k] * l[j * p + k].conj()).sum();
                        out[i * p + j] = s;
                        out[j * p + i] = s.conj();
                    }
                }
            }
            Sampler::Direct => {
                let n = self.spec.dof;
                let x: Vec<Complex64> = (0..p * n).map(|_| cn(rng)).collect();
                for i in 0..p {
                    for j in 0..=i {
                        let s: Complex64 = x[i * n..(i + 1) * n]
                            .iter()
                            .zip(&x[j * n..(j + 1) * n])
                            .map(|(a, b)| a * b.conj())
                            .sum();
                        out[i * p + j] = s;
                        out[j * p + i] = s.conj();
                    }
                }
            }
        }
    }

    /// One draw of (ℓ₁, t).
    pub fn draw_lmax_trace<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        buf: &mut Vec<Complex64>,
    ) -> (f64, f64) {
        self.draw(rng, buf);
        let p = self.spec.dim;
        let t: f64 = (0..p).map(|i| buf[i * p + i].re).sum();
        let ev = hermitian_eigenvalues(buf, p).expect("finite Hermitian draw");
        (ev[0], t)
    }
}

/// Circular complex Gaussian with unit total variance.
pub(crate) fn cn<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Monte Carlo moments of ℓ₁ with standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McMoments {
    pub moments: MomentTriple<f64>,
    pub std_errors: [f64; 3],
    pub trials: u64,
}

const CHUNK: u64 = 4096;

fn spec_key(spec: WishartSpec) -> u64 {
    ((spec.dim as u64) << 32) ^ spec.dof as u64
}

/// Runs `trials` draws in fixed-size chunks, each on its own counter-seeded
/// stream, and hands every chunk's generator and length to `work`. Chunk
/// results come back in chunk order regardless of thread count.
fn chunked<A, F>(spec: WishartSpec, trials: u64, seed: u64, tag: u64, work: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> A + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(trials - c * CHUNK);
            let mut rng = stream(seed, spec_key(spec), c, tag);
            work(&mut rng, len)
        })
        .collect()
}

pub fn lmax_moments_mc(spec: WishartSpec, trials: u64, seed: u64) -> Result<McMoments> {
    lmax_moments_mc_with(spec, trials, seed, Sampler::Bartlett)
}

/// Streaming moments of ℓ₁ over `trials` draws; no samples are stored.
pub fn lmax_moments_mc_with(
    spec: WishartSpec,
    trials: u64,
    seed: u64,
    kind: Sampler,
) -> Result<McMoments> {
    if trials < 2 {
        return Err(domain("need at least two Monte Carlo trials"));
    }
    let sampler = WishartSampler::new(spec, kind);
    let parts = chunked(spec, trials, seed, tag::LMAX_MOMENTS, |rng, len| {
        let mut acc = RawMoments3::default();
        let mut buf = Vec::new();
        for _ in 0..len {
            acc.push(sampler.draw_lmax_trace(rng, &mut buf).0);
        }
        acc
    });
    let mut acc = RawMoments3::default();
    parts.iter().for_each(|p| acc.merge(p));
    let [a, b, c] = acc.powers;
    Ok(McMoments {
        moments: MomentTriple::new(a.mean(), b.mean(), c.mean()),
        std_errors: [a.std_error(), b.std_error(), c.std_error()],
        trials,
    })
}

/// `count` independent draws of u = ℓ₁/t, in a deterministic order.
pub fn u_draws(spec: WishartSpec, count: u64, seed: u64, kind: Sampler) -> Vec<f64> {
    let sampler = WishartSampler::new(spec, kind);
    chunked(spec, count, seed, tag::U_DRAWS, |rng, len| {
        let mut buf = Vec::new();
        (0..len)
            .map(|_| {
                let (l, t) = sampler.draw_lmax_trace(rng, &mut buf);
                l / t
            })
            .collect::<Vec<f64>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::ks_statistic;

    fn spec(p: usize, n: usize) -> WishartSpec {
        WishartSpec::new(p, n).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(WishartSpec::new(0, 5).is_err());
        assert!(WishartSpec::new(4, 3).is_err());
        assert!(WishartSpec::new(3, 3).is_ok());
    }

    #[test]
    fn trace_moment_examples() {
        assert_eq!(trace_moment::<f64>(spec(1, 1), 1).unwrap(), 1.0);
        assert!((trace_moment::<f64>(spec(4, 250), 1).unwrap() - 1000.0).abs() < 1e-10);
        assert!((trace_moment::<f64>(spec(2, 3), 2).unwrap() - 42.0).abs() < 1e-12);
        assert!(trace_moment::<f64>(spec(1, 1), 0).is_err());
        assert!(matches!(
            trace_moment::<f32>(spec(100, 1_000_000), 10),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn large_n_mu_at_unit_sizes() {
        // μ = 4 and σ = 2·2^{1/3}; m1 = μ + σ(κ̃θ̃ − α̃).
        let m = lmax_moments_large_n::<f64>(spec(1, 1));
        let sigma = 2.0 * 2f64.cbrt();
        let want = 4.0 + sigma * (APPX_SHAPE * APPX_SCALE - APPX_SHIFT);
        assert!((m.m1 - want).abs() < 1e-12);
    }

    #[test]
    fn fit_recovers_gamma() {
        let g = fit_shifted_gamma(&MomentTriple::new(6.0f64, 54.0, 648.0)).unwrap();
        assert!((g.shape() - 2.0).abs() < 1e-12);
        assert!((g.scale() - 3.0).abs() < 1e-12);
        assert!(g.shift().abs() < 1e-12);
    }

    #[test]
    fn fit_recovers_shift() {
        let target = ShiftedGamma::new(2.0f64, 3.0, 1.0).unwrap();
        let m = target.raw_moments();
        assert_eq!((m.m1, m.m2, m.m3), (5.0, 43.0, 503.0));
        let g = fit_shifted_gamma(&m).unwrap();
        assert!((g.shape() - 2.0).abs() < 1e-12);
        assert!((g.scale() - 3.0).abs() < 1e-12);
        assert!((g.shift() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_symmetric_and_degenerate() {
        // Uniform(0, 1): zero skew.
        assert!(matches!(
            fit_shifted_gamma(&MomentTriple::new(0.5, 1.0 / 3.0, 0.25)),
            Err(Error::Fit(_))
        ));
        assert!(matches!(
            fit_shifted_gamma(&MomentTriple::new(1.0, 1.0, 1.0)),
            Err(Error::Fit(_))
        ));
    }

    #[test]
    fn cdf_limits_and_round_trip() {
        let g = ShiftedGamma::new(20.0, 0.01, -0.1).unwrap();
        assert_eq!(g.cdf(0.1).value(), 0.0);
        assert_eq!(g.cdf(0.05).value(), 0.0);
        assert_eq!(g.cdf(f64::INFINITY).value(), 1.0);
        for &x in &[0.2, 0.28, 0.3, 0.35, 0.45] {
            let back = g.quantile(g.cdf(x)).unwrap();
            assert!((back - x).abs() < 1e-9, "{x} → {back}");
        }
    }

    #[test]
    fn scalar_u_is_one_and_lmax_is_trace() {
        let s = spec(1, 7);
        assert_eq!(
            u_moments(s, UBackend::default()).unwrap(),
            MomentTriple::new(1.0, 1.0, 1.0)
        );
        let sampler = WishartSampler::new(s, Sampler::Bartlett);
        let mut rng = stream(1, 0, 0, 0);
        let mut buf = Vec::new();
        for _ in 0..100 {
            let (l, t) = sampler.draw_lmax_trace(&mut rng, &mut buf);
            assert_eq!(l, t);
        }
    }

    #[test]
    fn mc_scalar_mean_is_dof() {
        let r = lmax_moments_mc(spec(1, 5), 100_000, 3).unwrap();
        assert!((r.moments.m1 - 5.0).abs() < 4.0 * r.std_errors[0]);
        // Gamma(5, 1): E[X²] = 30, E[X³] = 210.
        assert!((r.moments.m2 - 30.0).abs() < 4.0 * r.std_errors[1]);
        assert!((r.moments.m3 - 210.0).abs() < 4.0 * r.std_errors[2]);
    }

    #[test]
    fn mc_is_deterministic() {
        let a = lmax_moments_mc(spec(2, 10), 20_000, 99).unwrap();
        let b = lmax_moments_mc(spec(2, 10), 20_000, 99).unwrap();
        assert_eq!(a, b);
        let c = lmax_moments_mc(spec(2, 10), 20_000, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn mc_moments_admissible() {
        let r = lmax_moments_mc(spec(3, 8), 50_000, 5).unwrap();
        assert!(r.moments.is_admissible());
        let u = u_moments_from_lmax(spec(3, 8), &r.moments).unwrap();
        assert!(u.m1 > 1.0 / 3.0 && u.m1 < 1.0);
    }

    #[test]
    fn bartlett_and_direct_agree() {
        let s = spec(3, 6);
        let a = lmax_moments_mc_with(s, 40_000, 1, Sampler::Bartlett).unwrap();
        let b = lmax_moments_mc_with(s, 40_000, 2, Sampler::Direct).unwrap();
        let se = (a.std_errors[0].powi(2) + b.std_errors[0].powi(2)).sqrt();
        assert!((a.moments.m1 - b.moments.m1).abs() < 4.0 * se);
        let se2 = (a.std_errors[1].powi(2) + b.std_errors[1].powi(2)).sqrt();
        assert!((a.moments.m2 - b.moments.m2).abs() < 4.0 * se2);
    }

    #[test]
    fn u_draws_in_support_and_scale_free() {
        let s = spec(4, 9);
        for kind in [Sampler::Bartlett, Sampler::Direct] {
            for u in u_draws(s, 5_000, 8, kind) {
                assert!((0.25 - 1e-12..=1.0 + 1e-12).contains(&u));
            }
        }
        let sampler = WishartSampler::new(s, Sampler::Direct);
        let mut rng = stream(4, 4, 4, 4);
        let mut w = Vec::new();
        for _ in 0..50 {
            sampler.draw(&mut rng, &mut w);
            let mut scaled: Vec<Complex64> = w.iter().map(|z| z * 37.5).collect();
            let t: f64 = (0..4).map(|i| w[i * 5].re).sum();
            let u0 = hermitian_eigenvalues(&mut w, 4).unwrap()[0] / t;
            let u1 = hermitian_eigenvalues(&mut scaled, 4).unwrap()[0] / (37.5 * t);
            assert!((u0 - u1).abs() < 1e-13);
        }
    }

    #[test]
    fn u_moments_match_direct_ratio() {
        let s = spec(8, 20);
        let model = u_moments(
            s,
            UBackend::MonteCarlo {
                trials: 100_000,
                seed: 17,
            },
        )
        .unwrap();
        let draws = u_draws(s, 100_000, 18, Sampler::Bartlett);
        let mut w = crate::stats::Welford::default();
        draws.iter().for_each(|&u| w.push(u));
        assert!(
            (model.m1 - w.mean()).abs() < 4.0 * w.std_error(),
            "{} vs {}",
            model.m1,
            w.mean()
        );
    }

    #[test]
    fn fitted_cdf_close_to_empirical_small_case() {
        let s = spec(3, 8);
        let model = u_model(
            s,
            UBackend::MonteCarlo {
                trials: 100_000,
                seed: 1,
            },
        )
        .unwrap();
        let mut draws = u_draws(s, 100_000, 2, Sampler::Bartlett);
        let d = ks_statistic(&mut draws, |x| model.cdf(x).value());
        assert!(d <= 0.02, "KS = {d}");
    }

    #[test]
    fn large_n_backend_tracks_mc() {
        let s = spec(8, 100);
        let mc = lmax_moments_mc(s, 100_000, 21).unwrap().moments;
        let ax = lmax_moments_large_n::<f64>(s);
        assert!((ax.m1 / mc.m1 - 1.0).abs() < 0.02, "{} vs {}", ax.m1, mc.m1);
        let s = spec(8, 20);
        let mc = lmax_moments_mc(s, 100_000, 22).unwrap().moments;
        let ax = lmax_moments_large_n::<f64>(s);
        assert!((ax.m1 / mc.m1 - 1.0).abs() < 0.05, "{} vs {}", ax.m1, mc.m1);
    }

    #[test]
    fn fit_and_cdf_work_in_f32() {
        // Moment matching cancels heavily when u is concentrated, so single
        // precision is only checked where the spread is wide.
        let m = u_moments(
            spec(3, 8),
            UBackend::MonteCarlo {
                trials: 20_000,
                seed: 3,
            },
        )
        .unwrap();
        let m32 = MomentTriple::new(m.m1 as f32, m.m2 as f32, m.m3 as f32);
        let g = fit_shifted_gamma(&m32).unwrap();
        let g64 = fit_shifted_gamma(&m).unwrap();
        assert!((f64::from(g.shape()) / g64.shape() - 1.0).abs() < 1e-2);
        let x = g64.quantile(Probability::new(0.5).unwrap()).unwrap();
        assert!((g.cdf(x as f32).value() - 0.5).abs() < 1e-3);
    }
}
