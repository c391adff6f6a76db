//! Seeded Monte Carlo sweeps of P_under, P_c and P_over against SNR.
//!
//! Trial `t` at grid point `s` draws from its own stream keyed by
//! `(seed, s, t)`, so output does not depend on thread count. Several rules
//! can be evaluated on the same trials for paired comparisons.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::glm::{glm_profile, pover_bounds, synth_sinusoids, GlmScenario};
use crate::itc::{select_with_nu, LikelihoodProfile, PenaltyRule};
use crate::rng::{stream, tag};
use crate::source_enum::{pover_highsnr, spectrum_from_scm, wk_profile};
use crate::stats::{format_sig6, wilson_half_width};
use crate::wishart::{cn, UBackend};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Problem {
    /// p sensors; signals through a random mixing matrix in white noise.
    SourceEnum { p: usize },
    /// Known-frequency complex sinusoids in white noise.
    Sinusoids,
}

/// Phases used for sinusoid l = 0, 1, … (cycled past the end).
pub const DEFAULT_PHASES: [f64; 6] = [
    0.0,
    PI / 4.0,
    PI / 3.0,
    PI / 2.0,
    2.0 * PI / 3.0,
    3.0 * PI / 4.0,
];

pub const DEFAULT_TRIALS: u64 = 10_000;
pub const DEFAULT_SEED: u64 = 1;
pub const MIN_TRIALS: u64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub problem: Problem,
    /// True order.
    pub q: usize,
    pub n: usize,
    /// Largest candidate order of the estimator.
    pub q_max: usize,
    pub rule: PenaltyRule<f64>,
    pub snr_grid_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    /// Sinusoid phases in radians; `None` uses [`DEFAULT_PHASES`].
    pub phases: Option<Vec<f64>>,
    /// Union-bound depth for the GLM overlay.
    pub i_max: usize,
    /// u-model source for the source-enumeration overlay.
    pub backend: UBackend,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.q > self.q_max {
            return bad(format!(
                "true order {} exceeds q_max = {}",
                self.q, self.q_max
            ));
        }
        if self.q_max == 0 {
            return bad("q_max must be at least 1".into());
        }
        if self.snr_grid_db.is_empty() || self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return bad("SNR grid must be non-empty and finite".into());
        }
        if self.trials < MIN_TRIALS {
            return bad(format!(
                "need at least {MIN_TRIALS} trials, got {}",
                self.trials
            ));
        }
        if self.i_max == 0 {
            return bad("i_max must be at least 1".into());
        }
        self.rule
            .resolve_nu(self.n)
            .map_err(|e| Error::Config(e.to_string()))?;
        match self.problem {
            Problem::SourceEnum { p } => {
                if p < 2 || self.q_max >= p {
                    return bad(format!(
                        "need p ≥ 2 and q_max ≤ p − 1, got p = {p}, q_max = {}",
                        self.q_max
                    ));
                }
                if self.n < p {
                    return bad(format!("need n ≥ p, got n = {}, p = {p}", self.n));
                }
            }
            Problem::Sinusoids => {
                GlmScenario::<f64>::sinusoids(self.q_max, self.n)
                    .map_err(|e| Error::Config(e.to_string()))?;
                if let Some(ph) = &self.phases {
                    if ph.len() < self.q || ph.iter().any(|x| !x.is_finite()) {
                        return bad(format!("need {} finite phases, got {}", self.q, ph.len()));
                    }
                }
            }
        }
        Ok(())
    }

    fn phase(&self, l: usize) -> f64 {
        match &self.phases {
            Some(ph) => ph[l],
            None => DEFAULT_PHASES[l % DEFAULT_PHASES.len()],
        }
    }
}

/// Named scenarios with fixed parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Source enumeration, q = 4, p = 8, n = 1000, AIC.
    Fig2,
    /// Source enumeration with the designed penalty ν = 2.281.
    Fig6,
    /// Sinusoids, q = 3, q_max = 6, n = 1000, AIC.
    Fig7,
    /// Sinusoids with the designed penalty ν = 2.499.
    Fig10,
}

impl Preset {
    pub fn parse(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "fig2" => Some(Self::Fig2),
            "fig6" => Some(Self::Fig6),
            "fig7" => Some(Self::Fig7),
            "fig10" => Some(Self::Fig10),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Fig2 => "fig2",
            Self::Fig6 => "fig6",
            Self::Fig7 => "fig7",
            Self::Fig10 => "fig10",
        }
    }

    pub fn config(&self) -> SweepConfig {
        let grid = |lo: f64, hi: f64, step: f64| -> Vec<f64> {
            let k = ((hi - lo) / step).round() as usize;
            (0..=k).map(|i| lo + step * i as f64).collect()
        };
        let enum_base = SweepConfig {
            problem: Problem::SourceEnum { p: 8 },
            q: 4,
            n: 1000,
            q_max: 7,
            rule: PenaltyRule::Aic,
            snr_grid_db: grid(-20.0, 20.0, 2.5),
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            phases: None,
            i_max: 2,
            backend: UBackend::default(),
        };
        let sin_base = SweepConfig {
            problem: Problem::Sinusoids,
            q: 3,
            q_max: 6,
            snr_grid_db: grid(-30.0, 10.0, 2.5),
            ..enum_base.clone()
        };
        match self {
            Self::Fig2 => enum_base,
            Self::Fig6 => SweepConfig {
                rule: PenaltyRule::Gic(2.281),
                ..enum_base
            },
            Self::Fig7 => sin_base,
            Self::Fig10 => SweepConfig {
                rule: PenaltyRule::Gic(2.499),
                ..sin_base
            },
        }
    }
}

/// Outcome counts at one SNR point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRecord {
    pub snr_db: f64,
    pub trials: u64,
    pub under: u64,
    pub correct: u64,
    pub over: u64,
    pub p_under: f64,
    pub p_c: f64,
    pub p_over: f64,
    pub ci_under: f64,
    pub ci_c: f64,
    pub ci_over: f64,
}

impl SweepRecord {
    fn from_counts(snr_db: f64, under: u64, correct: u64, over: u64) -> Self {
        let trials = under + correct + over;
        let t = trials as f64;
        Self {
            snr_db,
            trials,
            under,
            correct,
            over,
            p_under: under as f64 / t,
            p_c: correct as f64 / t,
            p_over: over as f64 / t,
            ci_under: wilson_half_width(under, trials),
            ci_c: wilson_half_width(correct, trials),
            ci_over: wilson_half_width(over, trials),
        }
    }
}

/// Everything generated for one trial that does not depend on the rule.
enum Bench {
    Enum { p: usize },
    Sin { scenario: GlmScenario<f64> },
}

impl Bench {
    fn new(config: &SweepConfig) -> Result<Self> {
        Ok(match config.problem {
            Problem::SourceEnum { p } => Self::Enum { p },
            Problem::Sinusoids => Self::Sin {
                scenario: GlmScenario::sinusoids(config.q_max, config.n)?,
            },
        })
    }

    fn profile<R: Rng>(
        &self,
        config: &SweepConfig,
        snr: f64,
        rng: &mut R,
    ) -> Result<LikelihoodProfile<f64>> {
        match self {
            Self::Enum { p } => {
                let mut scm = source_enum_scm(*p, config.q, config.n, snr, rng);
                wk_profile(&spectrum_from_scm(&mut scm, *p)?, config.n, config.q_max)
            }
            Self::Sin { scenario } => {
                let amp = if config.q == 0 {
                    0.0
                } else {
                    (snr / config.q as f64).sqrt()
                };
                let amps = vec![amp; config.q];
                let phases: Vec<f64> = (0..config.q).map(|l| config.phase(l)).collect();
                let y = synth_sinusoids(scenario, &amps, &phases, 1.0, rng)?;
                glm_profile(&y, scenario)
            }
        }
    }
}

/// SCM (1/n)·YYᴴ of Y = cHZ + N with unit noise power. H is p×q standard
/// complex Gaussian rescaled so that tr(c²HHᴴ)/p equals `snr` exactly.
pub fn source_enum_scm<R: Rng + ?Sized>(
    p: usize,
    q: usize,
    n: usize,
    snr: f64,
    rng: &mut R,
) -> Vec<Complex64> {
    let mut h: Vec<Complex64> = (0..p * q).map(|_| cn(rng)).collect();
    if q > 0 {
        let frob: f64 = h.iter().map(|z| z.norm_sqr()).sum();
        let c = (snr * p as f64 / frob).sqrt();
        h.iter_mut().for_each(|z| *z *= c);
    }
    let mut scm = vec![Complex64::new(0.0, 0.0); p * p];
    let mut x = vec![Complex64::new(0.0, 0.0); p];
    let mut z = vec![Complex64::new(0.0, 0.0); q];
    for _ in 0..n {
        z.iter_mut().for_each(|v| *v = cn(rng));
        for (i, xi) in x.iter_mut().enumerate() {
            let s: Complex64 = h[i * q..(i + 1) * q]
                .iter()
                .zip(&z)
                .map(|(a, b)| a * b)
                .sum();
            *xi = s + cn(rng);
        }
        for i in 0..p {
            for j in i..p {
                scm[i * p + j] += x[i] * x[j].conj();
            }
        }
    }
    let inv_n = 1.0 / n as f64;
    scm.iter_mut().for_each(|v| *v *= inv_n);
    scm
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// One sweep per rule, all on the same simulated data.
pub fn run_sweep_rules(
    config: &SweepConfig,
    rules: &[PenaltyRule<f64>],
) -> Result<Vec<Vec<SweepRecord>>> {
    config.validate()?;
    if rules.is_empty() {
        return Err(Error::Config("no penalty rules given".into()));
    }
    let nus = rules
        .iter()
        .map(|r| r.resolve_nu(config.n))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Config(e.to_string()))?;
    let bench = Bench::new(config)?;
    let r = rules.len();
    let mut out = vec![Vec::with_capacity(config.snr_grid_db.len()); r];
    for (s, &snr_db) in config.snr_grid_db.iter().enumerate() {
        let snr = db_to_linear(snr_db);
        let counts = (0..config.trials)
            .into_par_iter()
            .map(|t| -> Result<Vec<[u64; 3]>> {
                let mut rng = stream(config.seed, s as u64, t, tag::SWEEP_TRIAL);
                let profile = bench.profile(config, snr, &mut rng)?;
                Ok(nus
                    .iter()
                    .map(|&nu| {
                        let k = select_with_nu(&profile, nu).selected;
                        let mut c = [0u64; 3];
                        c[match k.cmp(&config.q) {
                            std::cmp::Ordering::Less => 0,
                            std::cmp::Ordering::Equal => 1,
                            std::cmp::Ordering::Greater => 2,
                        }] = 1;
                        c
                    })
                    .collect())
            })
            .try_reduce(
                || vec![[0u64; 3]; r],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(&b) {
                        for j in 0..3 {
                            x[j] += y[j];
                        }
                    }
                    Ok(a)
                },
            )?;
        for (rule_idx, c) in counts.iter().enumerate() {
            out[rule_idx].push(SweepRecord::from_counts(snr_db, c[0], c[1], c[2]));
        }
    }
    Ok(out)
}

pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    Ok(run_sweep_rules(config, &[config.rule])?.remove(0))
}

/// SNR-independent analytic overestimation values for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Overlay {
    /// High-SNR single-term approximation 1 − F_u(ṽ).
    SourceEnum { nu: f64, pover: f64 },
    /// Lower and union upper bounds on P_over.
    Glm { nu: f64, lb: f64, ub: f64 },
}

pub fn overlay_analytics(config: &SweepConfig) -> Result<Overlay> {
    config.validate()?;
    let nu = config.rule.resolve_nu(config.n)?;
    match config.problem {
        Problem::SourceEnum { p } => {
            let pover = if config.q >= config.q_max || config.q + 2 > p {
                0.0
            } else {
                pover_highsnr(config.q, p, config.n, nu, config.backend)?.value()
            };
            Ok(Overlay::SourceEnum { nu, pover })
        }
        Problem::Sinusoids => {
            let depth = config.i_max.min(config.q_max - config.q);
            if depth == 0 {
                return Ok(Overlay::Glm {
                    nu,
                    lb: 0.0,
                    ub: 0.0,
                });
            }
            let b = pover_bounds(config.q, config.n, nu, depth)?;
            Ok(Overlay::Glm {
                nu,
                lb: b.lb.value(),
                ub: b.ub.value(),
            })
        }
    }
}

pub const CSV_HEADER: &str = "snr_db,trials,p_under,p_c,p_over,ci_under,ci_c,ci_over";

/// Sweep CSV with 6-significant-digit values and optional overlay columns.
pub fn write_sweep_csv<W: Write>(
    mut w: W,
    records: &[SweepRecord],
    overlay: Option<&Overlay>,
) -> io::Result<()> {
    let extra_header = match overlay {
        None => "",
        Some(Overlay::SourceEnum { .. }) => ",pover_analytic",
        Some(Overlay::Glm { .. }) => ",pover_lb,pover_ub",
    };
    writeln!(w, "{CSV_HEADER}{extra_header}")?;
    for r in records {
        write!(
            w,
            "{},{},{},{},{},{},{},{}",
            format_sig6(r.snr_db),
            r.trials,
            format_sig6(r.p_under),
            format_sig6(r.p_c),
            format_sig6(r.p_over),
            format_sig6(r.ci_under),
            format_sig6(r.ci_c),
            format_sig6(r.ci_over)
        )?;
        match overlay {
            None => {}
            Some(Overlay::SourceEnum { pover, .. }) => write!(w, ",{}", format_sig6(*pover))?,
            Some(Overlay::Glm { lb, ub, .. }) => {
                write!(w, ",{},{}", format_sig6(*lb), format_sig6(*ub))?
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_enum() -> SweepConfig {
        SweepConfig {
            problem: Problem::SourceEnum { p: 4 },
            q: 1,
            n: 100,
            q_max: 3,
            rule: PenaltyRule::Aic,
            snr_grid_db: vec![-10.0, 0.0, 10.0],
            trials: 200,
            seed: 3,
            phases: None,
            i_max: 2,
            backend: UBackend::LargeN,
        }
    }

    #[test]
    fn counts_partition_trials() {
        for r in run_sweep(&small_enum()).unwrap() {
            assert_eq!(r.under + r.correct + r.over, 200);
            assert!((r.p_under + r.p_c + r.p_over - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn sweeps_are_deterministic() {
        let a = run_sweep(&small_enum()).unwrap();
        let b = run_sweep(&small_enum()).unwrap();
        assert_eq!(a, b);
        let mut c = small_enum();
        c.seed = 4;
        assert_ne!(a, run_sweep(&c).unwrap());
    }

    #[test]
    fn paired_rules_share_trials() {
        let cfg = small_enum();
        let both = run_sweep_rules(&cfg, &[PenaltyRule::Aic, PenaltyRule::Bic]).unwrap();
        assert_eq!(both[0], run_sweep(&cfg).unwrap());
        for (a, b) in both[0].iter().zip(&both[1]) {
            assert!(b.over <= a.over);
        }
    }

    #[test]
    fn scm_snr_scaling() {
        // E[tr SCM]/p = 1 + SNR.
        let mut rng = stream(1, 2, 3, 4);
        let mut acc = 0.0;
        for _ in 0..50 {
            let scm = source_enum_scm(6, 2, 400, 3.0, &mut rng);
            acc += (0..6).map(|i| scm[i * 7].re).sum::<f64>() / 6.0;
        }
        assert!((acc / 50.0 - 4.0).abs() < 0.1, "{}", acc / 50.0);
    }

    #[test]
    fn sinusoid_sweep_runs() {
        let cfg = SweepConfig {
            problem: Problem::Sinusoids,
            q: 2,
            n: 200,
            q_max: 4,
            rule: PenaltyRule::Bic,
            snr_grid_db: vec![10.0],
            trials: 100,
            ..small_enum()
        };
        let r = run_sweep(&cfg).unwrap();
        assert!(r[0].p_c > 0.9);
    }

    #[test]
    fn invalid_configs_rejected_before_running() {
        let mut c = small_enum();
        c.trials = 99;
        assert!(matches!(run_sweep(&c), Err(Error::Config(_))));
        let mut c = small_enum();
        c.q = 4;
        assert!(run_sweep(&c).is_err());
        let mut c = small_enum();
        c.q_max = 4;
        assert!(run_sweep(&c).is_err());
        let mut c = small_enum();
        c.snr_grid_db.clear();
        assert!(run_sweep(&c).is_err());
        let mut c = small_enum();
        c.problem = Problem::Sinusoids;
        c.phases = Some(vec![]);
        assert!(run_sweep(&c).is_err());
    }

    #[test]
    fn overlay_values() {
        let mut cfg = Preset::Fig7.config();
        cfg.rule = PenaltyRule::Gic(2.499);
        match overlay_analytics(&cfg).unwrap() {
            Overlay::Glm { lb, ub, .. } => {
                let b = pover_bounds(3, 1000, 2.499, 2).unwrap();
                assert_eq!((lb, ub), (b.lb.value(), b.ub.value()));
                assert!(lb <= ub);
            }
            other => panic!("{other:?}"),
        }
        let mut cfg = Preset::Fig2.config();
        cfg.backend = UBackend::LargeN;
        assert!(
            matches!(overlay_analytics(&cfg).unwrap(), Overlay::SourceEnum { pover, .. } if pover > 0.05 && pover < 0.15)
        );
    }

    #[test]
    fn presets() {
        assert_eq!(Preset::parse("FIG2"), Some(Preset::Fig2));
        assert_eq!(Preset::parse("fig3"), None);
        for p in [Preset::Fig2, Preset::Fig6, Preset::Fig7, Preset::Fig10] {
            p.config().validate().unwrap();
        }
        assert_eq!(Preset::Fig2.config().snr_grid_db.len(), 17);
    }

    #[test]
    fn csv_layout() {
        let recs = run_sweep(&small_enum()).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(
            &mut buf,
            &recs,
            Some(&Overlay::SourceEnum {
                nu: 2.0,
                pover: 0.1,
            }),
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("{CSV_HEADER},pover_analytic"));
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("-10,200,"));
        assert!(lines.iter().all(|l| l.split(',').count() == 9));
    }
}
