use std::fs::File;
use std::io::{BufWriter, Write};

use gic_core::glm::{design_nu_glm, estimate_order_glm, GlmScenario};
use gic_core::sim::{overlay_analytics, run_sweep, write_sweep_csv, Preset, Problem};
use gic_core::source_enum::{design_nu_enum, estimate_num_signals, SensorBatch};
use gic_core::specfun::Probability;
use gic_core::stats::{ecdf, format_sig6, ks_statistic};
use gic_core::wishart::{u_draws, u_model, Sampler, UBackend, WishartSpec};
use serde_json::{json, Value};

use crate::io::{
    emit_json, read_series, read_snapshots, sidecar, to_value, write_manifest, Failure, Manifest,
    Outcome,
};
use crate::{
    BackendArgs, BackendKind, DesignEnumArgs, DesignGlmArgs, DistArgs, ProblemKind, SelectArgs,
    SimulateArgs, UstatArgs,
};

/// Half-width above which a sweep's confidence intervals are flagged.
const WIDE_CI: f64 = 0.02;

fn probability(v: f64, what: &str) -> Outcome<Probability<f64>> {
    Probability::new(v).map_err(|_| Failure::Usage(format!("{what} = {v} is not a probability")))
}

fn backend_of(kind: BackendKind, trials: u64, seed: u64) -> UBackend {
    match kind {
        BackendKind::Mc => UBackend::MonteCarlo { trials, seed },
        BackendKind::AppendixA => UBackend::LargeN,
    }
}

impl BackendArgs {
    fn resolve(&self, seed: u64) -> UBackend {
        backend_of(self.backend, self.mc_trials, seed)
    }
}

fn backend_seed(b: UBackend) -> Option<u64> {
    match b {
        UBackend::MonteCarlo { seed, .. } => Some(seed),
        UBackend::LargeN => None,
    }
}

/// Core failures that depend on the data rather than the flags.
fn data_error(e: gic_core::Error) -> Failure {
    match Failure::from(e) {
        Failure::Usage(m) => Failure::Data(m),
        other => other,
    }
}

pub fn design_enum(a: &DesignEnumArgs) -> Outcome {
    let pover = probability(a.pover_max, "--pover-max")?;
    let backend = a.backend.resolve(a.seed);
    let result = design_nu_enum(a.p, a.n, a.qmax, pover, backend)?;
    let mut manifest = Manifest::new(
        "design source-enum",
        json!({"p": a.p, "n": a.n, "qmax": a.qmax, "pover_max": a.pover_max, "backend": backend}),
        backend_seed(backend),
    );
    let mut out = to_value(&result);
    if let Value::Object(m) = &mut out {
        m.remove("warnings");
    }
    manifest.warnings = result.warnings;
    emit_json(out, &manifest)
}

pub fn design_glm(a: &DesignGlmArgs) -> Outcome {
    let pover = probability(a.pover_max, "--pover-max")?;
    let result = design_nu_glm(a.n, pover, a.imax)?;
    let mut manifest = Manifest::new(
        "design glm",
        json!({"n": a.n, "pover_max": a.pover_max, "imax": a.imax}),
        None,
    );
    manifest.warnings = result.warnings;
    let out = json!({
        "nu": result.nu,
        "i_max": result.i_max,
        "predicted_pover": result.predicted_pover_ub.value(),
    });
    emit_json(out, &manifest)
}

fn select_output(
    kind: &str,
    result: &gic_core::SelectionResult,
    a: &SelectArgs,
    extra: Value,
) -> Outcome {
    let mut params = json!({
        "input": a.input.display().to_string(),
        "penalty": a.penalty.to_string(),
        "qmax": a.qmax,
    });
    if let (Value::Object(p), Value::Object(e)) = (&mut params, extra) {
        p.extend(e);
    }
    let manifest = Manifest::new(&format!("select {kind}"), params, None);
    let out = json!({
        "selected": result.selected,
        "nu": result.nu,
        "penalty": a.penalty.to_string(),
        "table": result.table,
    });
    emit_json(out, &manifest)
}

pub fn select_enum(a: &SelectArgs) -> Outcome {
    let (p, n, samples) = read_snapshots(&a.input)?;
    if n == 0 {
        return Err(Failure::Data("input has no snapshots".into()));
    }
    if a.qmax >= p {
        return Err(Failure::Data(format!(
            "input has p = {p} sensors; --qmax must be at most {}",
            p - 1
        )));
    }
    let batch = SensorBatch::new(p, n, samples).map_err(data_error)?;
    let result = estimate_num_signals(&batch, &a.penalty, a.qmax).map_err(data_error)?;
    select_output("source-enum", &result, a, json!({"p": p, "n": n}))
}

pub fn select_sinusoids(a: &SelectArgs) -> Outcome {
    let y = read_series(&a.input)?;
    let scenario = GlmScenario::sinusoids(a.qmax, y.len()).map_err(data_error)?;
    let result = estimate_order_glm(&y, &scenario, &a.penalty).map_err(data_error)?;
    select_output("sinusoids", &result, a, json!({"n": y.len()}))
}

fn sweep_config(a: &SimulateArgs) -> Outcome<gic_core::sim::SweepConfig> {
    let usage = |m: &str| Err(Failure::Usage(m.to_string()));
    let mut cfg = match (a.preset, a.problem) {
        (Some(p), None) => p.config(),
        (Some(p), Some(k)) => {
            let c = p.config();
            let same = matches!(
                (c.problem, k),
                (Problem::SourceEnum { .. }, ProblemKind::SourceEnum)
                    | (Problem::Sinusoids, ProblemKind::Sinusoids)
            );
            if !same {
                return usage(&format!("--problem contradicts preset {}", p.name()));
            }
            c
        }
        (None, Some(ProblemKind::SourceEnum)) => Preset::Fig2.config(),
        (None, Some(ProblemKind::Sinusoids)) => Preset::Fig7.config(),
        (None, None) => return usage("give --preset or --problem"),
    };
    if let Some(p) = a.p {
        match &mut cfg.problem {
            Problem::SourceEnum { p: slot } => *slot = p,
            Problem::Sinusoids => return usage("--p applies to source enumeration only"),
        }
    }
    if let Some(v) = a.q {
        cfg.q = v;
    }
    if let Some(v) = a.n {
        cfg.n = v;
    }
    if let Some(v) = a.qmax {
        cfg.q_max = v;
    }
    if let Some(r) = a.penalty {
        cfg.rule = r;
    }
    if let Some(g) = &a.snr_db {
        cfg.snr_grid_db = g.clone();
    }
    if let (Some(lo), Some(hi)) = (a.snr_from, a.snr_to) {
        let valid = a.snr_step > 0.0 && hi >= lo;
        if !valid {
            return usage("SNR range needs --snr-to ≥ --snr-from and --snr-step > 0");
        }
        let k = ((hi - lo) / a.snr_step + 1e-9).floor() as usize;
        cfg.snr_grid_db = (0..=k).map(|i| lo + a.snr_step * i as f64).collect();
    }
    if let Some(v) = a.trials {
        cfg.trials = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(ph) = &a.phases {
        cfg.phases = Some(ph.clone());
    }
    if let Some(v) = a.imax {
        cfg.i_max = v;
    }
    let (mut kind, mut trials, mut seed) = match cfg.backend {
        UBackend::MonteCarlo { trials, seed } => (BackendKind::Mc, trials, seed),
        UBackend::LargeN => (
            BackendKind::AppendixA,
            UBackend::DEFAULT_TRIALS,
            UBackend::DEFAULT_SEED,
        ),
    };
    kind = a.backend.unwrap_or(kind);
    trials = a.mc_trials.unwrap_or(trials);
    seed = a.mc_seed.unwrap_or(seed);
    cfg.backend = backend_of(kind, trials, seed);
    cfg.validate()?;
    Ok(cfg)
}

pub fn simulate(a: &SimulateArgs) -> Outcome {
    let cfg = sweep_config(a)?;
    let overlay = if a.overlay {
        Some(overlay_analytics(&cfg)?)
    } else {
        None
    };
    let records = run_sweep(&cfg)?;

    let mut params = to_value(&cfg);
    if let Value::Object(m) = &mut params {
        m.insert("preset".into(), a.preset.map(|p| p.name()).into());
        m.insert("overlay".into(), to_value(overlay));
    }
    let mut manifest = Manifest::new("simulate", params, Some(cfg.seed));
    let widest = records
        .iter()
        .flat_map(|r| [r.ci_under, r.ci_c, r.ci_over])
        .fold(0.0, f64::max);
    if widest > WIDE_CI {
        manifest.warnings.push(format!(
            "wide confidence intervals: 95% half-width up to {} with {} trials per point",
            format_sig6(widest),
            cfg.trials
        ));
    }

    match &a.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_sweep_csv(&mut w, &records, overlay.as_ref())?;
            w.flush()?;
        }
        None => {
            let mut w = std::io::stdout().lock();
            write_sweep_csv(&mut w, &records, overlay.as_ref())?;
            w.flush()?;
        }
    }
    let target = a
        .manifest
        .clone()
        .or_else(|| a.output.as_deref().map(sidecar));
    write_manifest(&manifest, target.as_deref())
}

pub fn ustat(a: &UstatArgs) -> Outcome {
    if a.p_prime < 2 {
        return Err(Failure::Usage(
            "--p-prime must be at least 2 (u ≡ 1 when p′ = 1)".into(),
        ));
    }
    if a.grid_points < 3 {
        return Err(Failure::Usage("--grid-points must be at least 3".into()));
    }
    let spec = WishartSpec::new(a.p_prime, a.n)?;
    let backend = a.backend.resolve(a.seed);
    let model = u_model(spec, backend)?;

    // One step below the support edge 1/p′, then up to 1.
    let lo = 1.0 / a.p_prime as f64;
    let h = (1.0 - lo) / (a.grid_points - 2) as f64;
    let grid: Vec<f64> = (0..a.grid_points)
        .map(|i| {
            if i == a.grid_points - 1 {
                1.0
            } else {
                lo + h * (i as f64 - 1.0)
            }
        })
        .collect();

    let mut draws = (a.empirical_trials > 0)
        .then(|| u_draws(spec, a.empirical_trials, a.seed, Sampler::Bartlett));
    let mut params = json!({
        "p_prime": a.p_prime,
        "n": a.n,
        "backend": backend,
        "grid_points": a.grid_points,
        "empirical_trials": a.empirical_trials,
        "model": model,
    });
    if let (Some(d), Value::Object(m)) = (draws.as_mut(), &mut params) {
        let ks = ks_statistic(d, |x| model.cdf(x).value());
        m.insert("ks_distance".into(), ks.into());
    }

    let mut w = std::io::stdout().lock();
    writeln!(
        w,
        "x,cdf_approx{}",
        if draws.is_some() {
            ",cdf_empirical"
        } else {
            ""
        }
    )?;
    for &x in &grid {
        write!(
            w,
            "{},{}",
            format_sig6(x),
            format_sig6(model.cdf(x).value())
        )?;
        if let Some(d) = &draws {
            write!(w, ",{}", format_sig6(ecdf(d, x)))?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    let manifest = Manifest::new("ustat", params, Some(a.seed));
    write_manifest(&manifest, a.manifest.as_deref())
}

pub fn dist(a: &DistArgs) -> Outcome {
    let spec = WishartSpec::new(a.p_prime, a.n)?;
    let backend = a.backend.resolve(a.seed);
    let model = u_model(spec, backend)?;
    let cdf: Vec<Value> =
        a.x.iter()
            .map(|&x| json!({"x": x, "cdf": model.cdf(x).value()}))
            .collect();
    let quantiles = a
        .prob
        .iter()
        .map(|&p| Ok(json!({"prob": p, "x": model.quantile(probability(p, "--prob")?)?})))
        .collect::<Outcome<Vec<Value>>>()?;
    let manifest = Manifest::new(
        "dist",
        json!({"p_prime": a.p_prime, "n": a.n, "backend": backend, "x": a.x, "prob": a.prob}),
        backend_seed(backend),
    );
    let out = json!({
        "shape": model.shape(),
        "scale": model.scale(),
        "shift": model.shift(),
        "moments": model.raw_moments(),
        "cdf": cdf,
        "quantiles": quantiles,
    });
    emit_json(out, &manifest)
}
