//! Named verification checks.

use std::path::Path;

use multistable::analysis::{
    empirical_cf, ks_critical_value, ks_distance, moment_scaling_check, scaling_probe, transfer_condition_probe,
    SimSource, Table,
};
use multistable::kernels::KernelAt;
use multistable::poisson::{cf_closed_form, generate_cloud, sum_functional, Rectangle, StableIntegrand};
use multistable::{
    series_normalizer, seed_stream, CheckResult, DiagnosticReport, FuncTable, KernelSpec, ProcessSpec, QuadConfig,
    RngStream, SamplePath, SimulationConfig, Simulator, StableParams,
};

use crate::config::RunConfig;
use crate::{write_all, CliError};

pub const SUITES: [&str; 6] = [
    "cf-check",
    "reduction",
    "sssi",
    "localisability",
    "moment-scaling",
    "transfer-condition",
];

/// CF agreement threshold in standard errors; six comparisons share it.
const CF_SE_LIMIT: f64 = 3.5;

struct Ctx<'a> {
    cfg: &'a RunConfig,
    seed: u64,
    window: (f64, f64),
}

impl Ctx<'_> {
    fn sim(&self, spec: &ProcessSpec) -> Result<Simulator, CliError> {
        let sc = SimulationConfig {
            seed: self.seed,
            ..self.cfg.simulation.clone()
        };
        Ok(Simulator::new(spec, &sc)?)
    }

    fn u(&self) -> f64 {
        self.cfg.verify.u.unwrap_or(0.5 * (self.window.0 + self.window.1))
    }

    fn inside(&self, x: f64, what: &str) -> Result<(), CliError> {
        if x < self.window.0 || x > self.window.1 {
            return Err(CliError::Config(format!(
                "{what} = {x} lies outside the simulation window [{}, {}]",
                self.window.0, self.window.1
            )));
        }
        Ok(())
    }
}

fn eval(f: &FuncTable, t: f64) -> Result<f64, CliError> {
    Ok(f.eval(t)?)
}

/// Stability index of the process at `t`, if it is a stable kind.
fn alpha_at(spec: &ProcessSpec, t: f64) -> Result<Option<f64>, CliError> {
    use ProcessSpec as P;
    Ok(match spec {
        P::Fbm { .. } | P::Mbm { .. } => None,
        P::StableLevy { alpha }
        | P::Lsfm { alpha, .. }
        | P::Lmsm { alpha, .. }
        | P::MovingAverage { alpha, .. }
        | P::ReverseOu { alpha, .. } => Some(*alpha),
        P::MultistableLevy { alpha, .. }
        | P::Lmmm { alpha, .. }
        | P::LogFractionalMsm { alpha, .. }
        | P::MultistableRou { alpha, .. }
        | P::MultistableDiagonal { alpha, .. } => Some(eval(alpha, t)?),
    })
}

enum Target {
    Gaussian { factor: f64 },
    Stable { alpha: f64, factor: f64 },
    Frozen { spec: ProcessSpec, factor: f64 },
}

/// Local index and local-form law at `u`.
fn local_form(spec: &ProcessSpec, u: f64) -> Result<(f64, Target), CliError> {
    use ProcessSpec as P;
    let one = FuncTable::constant(1.0);
    Ok(match spec {
        P::Fbm { h } => (*h, Target::Gaussian { factor: 1.0 }),
        P::Mbm { h, amplitude } => (eval(h, u)?, Target::Gaussian { factor: eval(amplitude, u)? }),
        P::StableLevy { alpha } => (1.0 / alpha, Target::Stable { alpha: *alpha, factor: 1.0 }),
        P::MultistableLevy { alpha, amplitude } => {
            let a = eval(alpha, u)?;
            (1.0 / a, Target::Stable { alpha: a, factor: eval(amplitude, u)? })
        }
        P::ReverseOu { alpha, .. } => (
            1.0 / alpha,
            Target::Stable {
                alpha: *alpha,
                factor: 1.0 / series_normalizer(*alpha)?,
            },
        ),
        P::MultistableRou { alpha, .. } => {
            let a = eval(alpha, u)?;
            (1.0 / a, Target::Stable { alpha: a, factor: 1.0 / series_normalizer(a)? })
        }
        P::Lsfm { h, .. } => (*h, Target::Frozen { spec: spec.clone(), factor: 1.0 }),
        P::Lmsm {
            alpha,
            h,
            a_coef,
            b_coef,
        } => {
            let hu = eval(h, u)?;
            let frozen = P::Lsfm {
                alpha: *alpha,
                h: hu,
                a_coef: *a_coef,
                b_coef: *b_coef,
            };
            (hu, Target::Frozen { spec: frozen, factor: 1.0 })
        }
        P::Lmmm { alpha, h, amplitude } => {
            let hu = eval(h, u)?;
            let frozen = P::Lsfm {
                alpha: eval(alpha, u)?,
                h: hu,
                a_coef: 1.0,
                b_coef: 1.0,
            };
            (hu, Target::Frozen { spec: frozen, factor: eval(amplitude, u)? })
        }
        P::LogFractionalMsm { alpha, amplitude } => {
            let a = eval(alpha, u)?;
            let frozen = P::LogFractionalMsm {
                alpha: FuncTable::constant(a),
                amplitude: one,
            };
            (1.0 / a, Target::Frozen { spec: frozen, factor: eval(amplitude, u)? })
        }
        P::MovingAverage { .. } | P::MultistableDiagonal { .. } => {
            return Err(CliError::Config(format!(
                "no closed local form is known for {}",
                spec.kind()
            )))
        }
    })
}

fn target_samples(ctx: &Ctx, target: &Target, h: f64, t: f64, n: usize) -> Result<Vec<f64>, CliError> {
    let seed = ctx.seed ^ 0x9e37_79b9_7f4a_7c15;
    let mut s = RngStream::new(seed, u64::MAX);
    Ok(match target {
        Target::Gaussian { factor } => s.gaussian(n).iter().map(|z| factor * t.powf(h) * z).collect(),
        Target::Stable { alpha, factor } => {
            let p = StableParams::new(*alpha, t.powf(1.0 / alpha))?;
            s.stable(&p, n).iter().map(|x| factor * x).collect()
        }
        Target::Frozen { spec, factor } => {
            let mut sc = SimulationConfig::new(vec![t], 1, seed);
            sc.truncation = ctx.cfg.simulation.truncation.clone();
            let sim = Simulator::new(spec, &sc)?;
            (0..n as u64)
                .map(|i| sim.values(i).map(|v| factor * v[0]))
                .collect::<multistable::Result<_>>()
                .map_err(|e| CliError::Run(e.to_string()))?
        }
    })
}

fn run_err(e: multistable::Error) -> CliError {
    CliError::Run(e.to_string())
}

fn cf_check(ctx: &Ctx) -> Result<CheckResult, CliError> {
    let n = ctx.cfg.verify.n;
    let mid = 0.5 * (ctx.window.0 + ctx.window.1);
    let alpha = alpha_at(&ctx.cfg.process, mid)?.unwrap_or(1.5);
    let lambda = match &ctx.cfg.process {
        ProcessSpec::ReverseOu { lambda, .. } | ProcessSpec::MultistableRou { lambda, .. } => *lambda,
        _ => 1.0,
    };
    let q = QuadConfig::default();
    let cases = [
        ("indicator", KernelAt::Indicator { t: 1.0 }, Rectangle::new(0.0, 1.0, 200.0)?),
        ("exp_ou", KernelAt::ExpOu { t: 0.0, lambda }, Rectangle::new(0.0, 5.0 / lambda, 50.0)?),
    ];
    let mut table = Table::new(&["functional", "theta", "empirical", "closed_form", "se"]);
    let mut worst = 0.0f64;
    for (k, (_, kernel, rect)) in cases.iter().enumerate() {
        let g = StableIntegrand::new(*kernel, alpha)?;
        let sums: Vec<f64> = (0..n as u64)
            .map(|i| sum_functional(&generate_cloud(&mut seed_stream(ctx.seed, i + k as u64 * n as u64), rect)?, &g))
            .collect::<multistable::Result<_>>()
            .map_err(run_err)?;
        for c in empirical_cf(&sums, &[0.5, 1.0, 2.0])? {
            let exact = cf_closed_form(&g, c.theta, rect, &q).map_err(run_err)?.truncated;
            worst = worst.max((c.value.re - exact).abs() / c.se);
            table.push(vec![k as f64, c.theta, c.value.re, exact, c.se]);
        }
    }
    Ok(CheckResult::new("cf-check", worst, CF_SE_LIMIT, worst < CF_SE_LIMIT)
        .sizes(&[n])
        .seeds(&[ctx.seed])
        .table(table)
        .detail(format!("alpha = {alpha}; functional 0 = indicator, 1 = exp-OU; statistic in SE units")))
}

/// The constant-parameter counterpart of `spec`, if it has one.
pub fn reduce(spec: &ProcessSpec) -> Option<ProcessSpec> {
    use ProcessSpec as P;
    let c = |f: &FuncTable| f.is_constant().then(|| f.eval_unchecked(f.domain().0.max(-1e300)));
    let unit = |f: &FuncTable| c(f) == Some(1.0);
    match spec {
        P::MultistableLevy { alpha, amplitude } if unit(amplitude) => c(alpha).map(|a| P::StableLevy { alpha: a }),
        P::Mbm { h, amplitude } if unit(amplitude) => c(h).map(|h| P::Fbm { h }),
        P::MultistableRou { alpha, lambda } => c(alpha).map(|a| P::ReverseOu { alpha: a, lambda: *lambda }),
        P::Lmmm { alpha, h, amplitude } if unit(amplitude) => Some(P::Lsfm {
            alpha: c(alpha)?,
            h: c(h)?,
            a_coef: 1.0,
            b_coef: 1.0,
        }),
        P::Lmsm {
            alpha,
            h,
            a_coef,
            b_coef,
        } => c(h).map(|h| P::Lsfm {
            alpha: *alpha,
            h,
            a_coef: *a_coef,
            b_coef: *b_coef,
        }),
        P::MultistableDiagonal {
            kernel: KernelSpec::Indicator,
            alpha,
            amplitude,
            normalize: true,
            ..
        } if unit(amplitude) => c(alpha).map(|a| P::StableLevy { alpha: a }),
        _ => None,
    }
}

fn data_rows(p: &SamplePath) -> String {
    p.to_csv().lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
}

fn reduction(ctx: &Ctx) -> Result<CheckResult, CliError> {
    let spec = &ctx.cfg.process;
    let reduced = reduce(spec).ok_or_else(|| {
        CliError::Config(format!(
            "reduction needs a multistable kind with constant parameters, got {}",
            spec.kind()
        ))
    })?;
    let a = ctx.sim(spec)?.paths().map_err(run_err)?;
    let b = ctx.sim(&reduced)?.paths().map_err(run_err)?;
    let differ = a.iter().zip(&b).filter(|(x, y)| data_rows(x) != data_rows(y)).count();
    Ok(CheckResult::new("reduction", differ as f64, 0.0, differ == 0)
        .sizes(&[a.len()])
        .seeds(&[ctx.seed])
        .detail(format!("{} vs {}: {differ} of {} paths differ", spec.kind(), reduced.kind(), a.len())))
}

fn sssi(ctx: &Ctx) -> Result<CheckResult, CliError> {
    let spec = &ctx.cfg.process;
    let h = match spec {
        ProcessSpec::Fbm { h } | ProcessSpec::Lsfm { h, .. } => *h,
        ProcessSpec::StableLevy { alpha } => 1.0 / alpha,
        _ => {
            return Err(CliError::Config(format!(
                "sssi applies to fbm, stable_levy and lsfm, not {}",
                spec.kind()
            )))
        }
    };
    let t = ctx.window.1;
    if !(t > 0.0) {
        return Err(CliError::Config("sssi needs a window reaching past 0".into()));
    }
    let n = ctx.cfg.verify.n;
    let sim = ctx.sim(spec)?;
    let plan = sim.plan(&[(0.5 * t, 0.5 * t), (t, t)])?;
    let half: Vec<f64> = sim
        .ensemble(&plan, 0..n as u64)
        .map_err(run_err)?
        .iter()
        .map(|r| r[0] / 0.5f64.powf(h))
        .collect();
    let full: Vec<f64> = sim
        .ensemble(&plan, n as u64..2 * n as u64)
        .map_err(run_err)?
        .iter()
        .map(|r| r[1])
        .collect();
    let ks = ks_distance(&half, &full)?;
    let crit = ks_critical_value(n, n, 0.01)?;
    Ok(CheckResult::new("sssi", ks, crit, ks < crit)
        .sizes(&[n, n])
        .seeds(&[ctx.seed])
        .detail(format!("KS of Y({})/2^-{h} against Y({t})", 0.5 * t)))
}

fn localisability(ctx: &Ctx) -> Result<CheckResult, CliError> {
    let v = &ctx.cfg.verify;
    let u = ctx.u();
    ctx.inside(u, "u")?;
    for r in &v.r_list {
        ctx.inside(u + r * v.t_probe, "u + r t_probe")?;
    }
    let (h_u, target) = local_form(&ctx.cfg.process, u)?;
    let sim = ctx.sim(&ctx.cfg.process)?;
    let res = scaling_probe(
        &SimSource::new(&sim),
        u,
        h_u,
        &v.r_list,
        v.t_probe,
        |n| target_samples(ctx, &target, h_u, v.t_probe, n).map_err(|e| multistable::Error::InvalidParameter(e.to_string())),
        v.n,
    )
    .map_err(CliError::from)?;
    let mut table = Table::new(&["r", "ks", "spread"]);
    for i in 0..res.r_list.len() {
        table.push(vec![res.r_list[i], res.ks[i], res.spread[i]]);
    }
    let threshold = 2.0 * res.critical_1pct;
    let pass = res.trend_pass && res.final_ks() < threshold;
    Ok(CheckResult::new("localisability", res.final_ks(), threshold, pass)
        .sizes(&[v.n, v.n])
        .seeds(&[ctx.seed])
        .table(table)
        .detail(format!(
            "u = {u}, h(u) = {h_u}; KS nonincreasing within 2 SE ({:.4}): {}",
            2.0 * res.se,
            res.trend_pass
        )))
}

fn transfer(ctx: &Ctx) -> Result<CheckResult, CliError> {
    let v = &ctx.cfg.verify;
    let u = ctx.u();
    ctx.inside(u, "u")?;
    let v_list: Vec<f64> = v.v_offsets.iter().map(|d| u + d).collect();
    for x in &v_list {
        ctx.inside(*x, "v")?;
    }
    let eta = match v.eta {
        Some(e) => e,
        None => {
            let h = local_form(&ctx.cfg.process, u).map(|(h, _)| h).unwrap_or(0.5);
            0.5 * (h + 1.0)
        }
    };
    let sim = ctx.sim(&ctx.cfg.process)?;
    let res = transfer_condition_probe(&SimSource::new(&sim), u, eta, &v_list, v.n)?;
    let mut table = Table::new(&["v", "distance", "threshold", "probability", "se"]);
    for r in &res.rows {
        table.push(vec![r.v, r.distance, r.threshold, r.probability, r.se]);
    }
    let pass = res.decreasing_towards_u();
    let last = res.rows.last().map(|r| r.probability).unwrap_or(0.0);
    Ok(CheckResult::new("transfer-condition", last, 1.0, pass)
        .sizes(&[v.n])
        .seeds(&[ctx.seed])
        .table(table)
        .detail(format!("u = {u}, eta = {eta}; probabilities nonincreasing as v approaches u")))
}

fn moment_scaling(ctx: &Ctx) -> Result<CheckResult, CliError> {
    let v = &ctx.cfg.verify;
    let alpha = match alpha_at(&ctx.cfg.process, ctx.window.0)? {
        Some(_) => {
            let mut lo = f64::INFINITY;
            for k in 0..=64 {
                let t = ctx.window.0 + (ctx.window.1 - ctx.window.0) * k as f64 / 64.0;
                lo = lo.min(alpha_at(&ctx.cfg.process, t)?.unwrap_or(1.5));
            }
            lo
        }
        None => 1.5,
    };
    let rect = Rectangle::new(0.0, 1.0, 100.0)?;
    let n = v.n as u64;
    let seed = ctx.seed;
    let res = moment_scaling_check(
        |lam| {
            let g = StableIntegrand::new(KernelAt::Indicator { t: 1.0 }, alpha)?.scaled(lam);
            (0..n)
                .map(|i| sum_functional(&generate_cloud(&mut seed_stream(seed, i), &rect)?, &g))
                .collect()
        },
        v.p,
        alpha,
        &[1.0, 2.0, 4.0],
    )?;
    let mut table = Table::new(&["lambda", "moment", "ratio", "expected"]);
    for r in &res.rows {
        table.push(vec![r.lambda, r.moment, r.ratio, r.expected]);
    }
    let limit = 1e-9;
    Ok(
        CheckResult::new("moment-scaling", res.max_rel_error, limit, res.finite && res.max_rel_error < limit)
            .sizes(&[v.n])
            .seeds(&[seed])
            .table(table)
            .detail(format!("p = {}, alpha = {alpha}; shared clouds, statistic is the max relative ratio error", v.p)),
    )
}

/// Runs `names`, writes `report.json`, `report.txt` and per-check CSV
/// tables into `out`, and returns whether every check passed.
pub fn run_verify(cfg: &RunConfig, names: &[String], out: &Path) -> Result<bool, CliError> {
    for n in names {
        if !SUITES.contains(&n.as_str()) {
            return Err(CliError::Config(format!(
                "unknown check '{n}'; known checks: {}",
                SUITES.join(", ")
            )));
        }
    }
    if cfg.verify.n < 2 {
        return Err(CliError::Config("verify.n must be at least 2".into()));
    }
    // validates the process and the grid before any sampling
    let base = Simulator::new(&cfg.process, &cfg.simulation)?;
    let ctx = Ctx {
        cfg,
        seed: cfg.verify.seed.unwrap_or(cfg.simulation.seed),
        window: base.window(),
    };
    let mut report = DiagnosticReport::default();
    report.note(format!("process: {}", serde_json::to_string(&cfg.process).unwrap_or_default()));
    let mut files = Vec::new();
    for n in names {
        let check = match n.as_str() {
            "cf-check" => cf_check(&ctx)?,
            "reduction" => reduction(&ctx)?,
            "sssi" => sssi(&ctx)?,
            "localisability" => localisability(&ctx)?,
            "moment-scaling" => moment_scaling(&ctx)?,
            _ => transfer(&ctx)?,
        };
        if let Some(t) = &check.table {
            files.push((format!("{}.csv", check.name), t.to_csv().into_bytes()));
        }
        report.push(check);
    }
    files.push(("report.json".to_string(), report.to_json().into_bytes()));
    files.push(("report.txt".to_string(), report.to_text().into_bytes()));
    write_all(out, &files)?;
    Ok(report.all_passed())
}
