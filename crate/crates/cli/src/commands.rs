//! One function per subcommand, each mapping the resolved configuration to
//! a JSON result plus an optional CSV table.

use mfzeta::coarse::coarse_spectrum_estimate;
use mfzeta::euler::euler_check;
use mfzeta::statistics::WordStatistic;
use mfzeta::targets::Target;
use mfzeta::variational::{constrained_sup, Measure, MeasureFamily};
use mfzeta::zeta::{
    fixed_target_estimate, legendre_supremum, shrinking_sweep, AbscissaEstimate,
    FixedTargetReport, SWEEP_MONOTONE_TOL,
};
use mfzeta::ExtReal;
use serde_json::{json, Value};

use crate::config::{RunConfig, Runtime};
use crate::AppError;

pub struct CommandOutput {
    pub result: Value,
    pub csv: Option<String>,
    pub summary: String,
}

pub fn dispatch(name: &str, cfg: &RunConfig, rt: &Runtime) -> Result<CommandOutput, AppError> {
    match name {
        "spectrum" => spectrum(cfg, rt),
        "zeta-abscissa" => zeta_abscissa(cfg, rt),
        "shrink-sweep" => shrink_sweep(cfg, rt),
        "coarse" => coarse(cfg, rt),
        "euler" => euler(cfg, rt),
        "variational" => variational(cfg, rt),
        other => unreachable!("unrouted subcommand {other}"),
    }
}

/// Extended reals serialize as a number, or the string "-inf".
fn ext(v: ExtReal) -> Value {
    match v {
        ExtReal::Finite(x) => json!(x),
        ExtReal::NegInf => json!("-inf"),
    }
}

/// CSV cell for an extended real.
fn ext_cell(v: ExtReal) -> String {
    match v {
        ExtReal::Finite(x) => format!("{x}"),
        ExtReal::NegInf => "-inf".into(),
    }
}

fn require_target<'a>(rt: &'a Runtime, command: &str) -> Result<&'a Target, AppError> {
    rt.target.as_ref().ok_or_else(|| {
        AppError::Config(format!(
            "{command} needs a target; pass --target or set defaults.target in the model file"
        ))
    })
}

fn estimate_value(est: &AbscissaEstimate) -> Value {
    json!({
        "value": ext(est.value),
        "levels": est.levels,
        "roots": est.roots.iter().map(|&r| ext(r)).collect::<Vec<_>>(),
        "residuals": est.residuals,
        "max_root_increase": est.max_root_increase(),
    })
}

fn report_value(report: &FixedTargetReport) -> Value {
    let oracle = report.oracle.as_ref().map(|o| {
        json!({
            "value": ext(o.value),
            "argmax": o.argmax,
        })
    });
    let gap = match &report.oracle {
        Some(o) => match (report.estimate.value, o.value) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => json!(a - b),
            _ => Value::Null,
        },
        None => Value::Null,
    };
    json!({
        "estimate": estimate_value(&report.estimate),
        "oracle": oracle,
        "gap": gap,
        "interior_warning": report.interior_warning,
    })
}

/// The Legendre oracle applies only when the statistic is the per-map
/// probability-to-contraction ratio the model's spectrum describes.
fn oracle_model<'a>(rt: &'a Runtime) -> Option<&'a mfzeta::measures::IfsModel> {
    match rt.stat {
        WordStatistic::Ratio(_) => Some(&rt.model),
        WordStatistic::Birkhoff(_) => None,
    }
}

fn spectrum(cfg: &RunConfig, rt: &Runtime) -> Result<CommandOutput, AppError> {
    let grid = cfg.q_grid();
    let samples = rt.model.spectrum_samples(&grid)?;
    let dims = rt.model.num_measures();

    let mut csv = String::new();
    for i in 0..dims {
        csv.push_str(&format!("q_{},", i + 1));
    }
    csv.push_str("beta,");
    for i in 0..dims {
        csv.push_str(&format!("alpha_{},", i + 1));
    }
    csv.push_str("spectrum\n");
    for s in &samples {
        for q in &s.q {
            csv.push_str(&format!("{q},"));
        }
        csv.push_str(&format!("{},", s.beta));
        for a in &s.alpha {
            csv.push_str(&format!("{a},"));
        }
        csv.push_str(&format!("{}\n", s.spectrum));
    }

    let rows: Vec<Value> = samples
        .iter()
        .map(|s| {
            json!({
                "q": s.q,
                "beta": s.beta,
                "alpha": s.alpha,
                "spectrum": s.spectrum,
            })
        })
        .collect();
    let summary = format!(
        "spectrum: {} samples on [{}, {}]^{}",
        samples.len(),
        cfg.q_min,
        cfg.q_max,
        dims
    );
    Ok(CommandOutput {
        result: json!({
            "q_min": cfg.q_min,
            "q_max": cfg.q_max,
            "q_steps": cfg.q_steps,
            "samples": rows,
        }),
        csv: Some(csv),
        summary,
    })
}

fn zeta_abscissa(cfg: &RunConfig, rt: &Runtime) -> Result<CommandOutput, AppError> {
    let target = require_target(rt, "zeta-abscissa")?;
    let ws = rt.model.weights();
    let top = cfg.top_level();
    match cfg.mode.as_str() {
        "fixed" => {
            let radius = cfg.radius();
            let report =
                fixed_target_estimate(&ws, &rt.stat, target, radius, top, oracle_model(rt))?;
            let mut csv = String::from("level,root,residual\n");
            for ((n, r), res) in report
                .estimate
                .levels
                .iter()
                .zip(&report.estimate.roots)
                .zip(&report.estimate.residuals)
            {
                csv.push_str(&format!("{n},{},{res}\n", ext_cell(*r)));
            }
            let summary = format!(
                "zeta-abscissa[fixed]: estimate {} at radius {radius}",
                ext_cell(report.estimate.value)
            );
            Ok(CommandOutput {
                result: json!({
                    "mode": "fixed",
                    "radius": radius,
                    "top_level": top,
                    "report": report_value(&report),
                }),
                csv: Some(csv),
                summary,
            })
        }
        "shrink" => {
            if cfg.radii.is_empty() {
                return Err(AppError::Config(
                    "mode \"shrink\" needs a radius ladder; pass --radius r1,r2,...".into(),
                ));
            }
            for pair in cfg.radii.windows(2) {
                if !(pair[1] < pair[0]) {
                    return Err(AppError::Config(format!(
                        "radius ladder must be strictly decreasing, got {} then {}",
                        pair[0], pair[1]
                    )));
                }
            }
            let mut rows = Vec::new();
            let mut csv = String::from("radius,estimate,oracle,gap\n");
            let mut monotone = true;
            let mut prev: Option<ExtReal> = None;
            for &radius in &cfg.radii {
                let report =
                    fixed_target_estimate(&ws, &rt.stat, target, radius, top, oracle_model(rt))?;
                if let Some(p) = prev {
                    monotone &= match (p, report.estimate.value) {
                        (_, ExtReal::NegInf) => true,
                        (ExtReal::NegInf, ExtReal::Finite(_)) => false,
                        (ExtReal::Finite(a), ExtReal::Finite(b)) => b <= a + SWEEP_MONOTONE_TOL,
                    };
                }
                prev = Some(report.estimate.value);
                let oracle_cell = report
                    .oracle
                    .as_ref()
                    .map(|o| ext_cell(o.value))
                    .unwrap_or_default();
                let gap_cell = match &report.oracle {
                    Some(o) => match (report.estimate.value, o.value) {
                        (ExtReal::Finite(a), ExtReal::Finite(b)) => format!("{}", a - b),
                        _ => String::new(),
                    },
                    None => String::new(),
                };
                csv.push_str(&format!(
                    "{radius},{},{oracle_cell},{gap_cell}\n",
                    ext_cell(report.estimate.value)
                ));
                rows.push(json!({
                    "radius": radius,
                    "report": report_value(&report),
                }));
            }
            let last = prev.unwrap_or(ExtReal::NegInf);
            let summary = format!(
                "zeta-abscissa[shrink]: {} radii, final estimate {}, monotone {}",
                cfg.radii.len(),
                ext_cell(last),
                monotone
            );
            Ok(CommandOutput {
                result: json!({
                    "mode": "shrink",
                    "top_level": top,
                    "rows": rows,
                    "monotone_within_tolerance": monotone,
                }),
                csv: Some(csv),
                summary,
            })
        }
        other => Err(AppError::Config(format!(
            "unknown mode {other:?} (expected \"fixed\" or \"shrink\")"
        ))),
    }
}

fn shrink_sweep(cfg: &RunConfig, rt: &Runtime) -> Result<CommandOutput, AppError> {
    let target = require_target(rt, "shrink-sweep")?;
    let ws = rt.model.weights();
    let sweep = shrinking_sweep(&ws, &rt.stat, target, &cfg.radii, cfg.top_level())?;

    let mut csv = String::from("radius,estimate\n");
    for step in &sweep.steps {
        csv.push_str(&format!("{},{}\n", step.radius, ext_cell(step.estimate.value)));
    }
    let rows: Vec<Value> = sweep
        .steps
        .iter()
        .map(|s| {
            json!({
                "radius": s.radius,
                "estimate": estimate_value(&s.estimate),
            })
        })
        .collect();
    let last = sweep
        .steps
        .last()
        .map(|s| s.estimate.value)
        .unwrap_or(ExtReal::NegInf);
    let summary = format!(
        "shrink-sweep: {} radii, final estimate {}, monotone {}",
        sweep.steps.len(),
        ext_cell(last),
        sweep.monotone_within_tolerance
    );
    Ok(CommandOutput {
        result: json!({
            "top_level": cfg.top_level(),
            "steps": rows,
            "monotone_within_tolerance": sweep.monotone_within_tolerance,
        }),
        csv: Some(csv),
        summary,
    })
}

fn coarse(cfg: &RunConfig, rt: &Runtime) -> Result<CommandOutput, AppError> {
    let target = require_target(rt, "coarse")?;
    let ws = rt.model.weights();
    let radius = cfg.radius();
    let est = coarse_spectrum_estimate(&ws, &rt.stat, target, radius, &cfg.deltas)?;

    let mut csv = String::from("delta,count\n");
    for (d, c) in est.deltas.iter().zip(&est.counts) {
        csv.push_str(&format!("{d},{c}\n"));
    }
    let summary = format!(
        "coarse: estimate {} over {} scales at radius {radius}",
        ext_cell(est.value),
        est.deltas.len()
    );
    Ok(CommandOutput {
        result: json!({
            "radius": radius,
            "deltas": est.deltas,
            "counts": est.counts,
            "value": ext(est.value),
        }),
        csv: Some(csv),
        summary,
    })
}

fn euler(cfg: &RunConfig, rt: &Runtime) -> Result<CommandOutput, AppError> {
    let target = require_target(rt, "euler")?;
    let s = cfg.s.ok_or_else(|| {
        AppError::Config("euler needs an exponent; pass --s or set defaults.s".into())
    })?;
    let ws = rt.model.weights();
    let radius = cfg.radius();
    let check = euler_check(&ws, &rt.stat, s, target, radius, cfg.max_len)?;

    let csv = format!(
        "s,max_len,zeta_trunc,prime_form,discrepancy,slow_tail\n{},{},{},{},{},{}\n",
        check.s, cfg.max_len, check.zeta_trunc, check.prime_form, check.discrepancy,
        check.slow_tail
    );
    let summary = format!(
        "euler: discrepancy {:e} at s = {}{}",
        check.discrepancy,
        check.s,
        if check.slow_tail { " (slow tail, truncation inconclusive)" } else { "" }
    );
    Ok(CommandOutput {
        result: json!({
            "s": check.s,
            "max_len": cfg.max_len,
            "radius": radius,
            "zeta_trunc": check.zeta_trunc,
            "prime_form": check.prime_form,
            "discrepancy": check.discrepancy,
            "slow_tail": check.slow_tail,
        }),
        csv: Some(csv),
        summary,
    })
}

fn measure_value(m: &Measure) -> Value {
    match m {
        Measure::Bernoulli(b) => json!({
            "family": "bernoulli",
            "probs": b.probs(),
        }),
        Measure::Markov(mk) => json!({
            "family": "markov1",
            "transition": mk.transition(),
            "stationary": mk.stationary(),
        }),
    }
}

fn variational(cfg: &RunConfig, rt: &Runtime) -> Result<CommandOutput, AppError> {
    let family = match cfg.family.as_str() {
        "bernoulli" => MeasureFamily::Bernoulli,
        "markov1" => MeasureFamily::Markov1,
        other => {
            return Err(AppError::Config(format!(
                "unknown family {other:?} (expected \"bernoulli\" or \"markov1\")"
            )))
        }
    };
    let ratios = rt.model.ratios();
    match &rt.target {
        Some(target) => {
            let radius = cfg.radius();
            let res = constrained_sup(ratios, &rt.stat, target, radius, family, cfg.seed)?;
            let oracle = match oracle_model(rt) {
                Some(m) => {
                    let o = legendre_supremum(m, target, radius)?;
                    Some(json!({"value": ext(o.value), "argmax": o.argmax}))
                }
                None => None,
            };
            let csv = format!(
                "value,feasible\n{},{}\n",
                ext_cell(res.value),
                res.feasible
            );
            let summary = format!(
                "variational[{}]: value {} (feasible: {})",
                cfg.family,
                ext_cell(res.value),
                res.feasible
            );
            Ok(CommandOutput {
                result: json!({
                    "mode": "target",
                    "radius": radius,
                    "value": ext(res.value),
                    "feasible": res.feasible,
                    "argmax": res.argmax.as_ref().map(measure_value),
                    "oracle": oracle,
                }),
                csv: Some(csv),
                summary,
            })
        }
        None => {
            // Grid comparison against the Legendre oracle: scan interior
            // ratio values of a scalar model and report both answers.
            if !matches!(rt.stat, WordStatistic::Ratio(_)) || rt.model.num_measures() != 1 {
                return Err(AppError::Config(
                    "variational without a target compares against the Legendre spectrum, \
                     which needs the ratio statistic of a single-row model; pass --target"
                        .into(),
                ));
            }
            let (lo, hi) = rt.model.ratio_range()[0];
            let radius = if cfg.radii.is_empty() { 1e-3 } else { cfg.radius() };
            let mut rows = Vec::new();
            let mut csv = String::from("alpha,variational,legendre,gap\n");
            let mut worst: f64 = 0.0;
            for j in 1..=11u32 {
                let alpha = lo + (hi - lo) * f64::from(j) / 12.0;
                let target = Target::point(vec![alpha])?;
                let res = constrained_sup(ratios, &rt.stat, &target, radius, family, cfg.seed)?;
                let oracle = legendre_supremum(&rt.model, &target, radius)?;
                let gap = match (res.value, oracle.value) {
                    (ExtReal::Finite(a), ExtReal::Finite(b)) => Some(a - b),
                    _ => None,
                };
                if let Some(g) = gap {
                    worst = worst.max(g.abs());
                }
                csv.push_str(&format!(
                    "{alpha},{},{},{}\n",
                    ext_cell(res.value),
                    ext_cell(oracle.value),
                    gap.map(|g| format!("{g}")).unwrap_or_default()
                ));
                rows.push(json!({
                    "alpha": alpha,
                    "variational": ext(res.value),
                    "legendre": ext(oracle.value),
                    "gap": gap,
                }));
            }
            let summary = format!(
                "variational[{}]: 11-point grid, worst |gap| {worst:e} at radius {radius}",
                cfg.family
            );
            Ok(CommandOutput {
                result: json!({
                    "mode": "grid",
                    "radius": radius,
                    "rows": rows,
                }),
                csv: Some(csv),
                summary,
            })
        }
    }
}
