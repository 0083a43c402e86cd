use std::fmt::Write as _;
use std::path::Path;

use kcbs_core::inequality::{
    classical_kcbs_bound, classical_wright_bound, kcbs_quantum_bound, wright_quantum_bound,
    BoundReport,
};
use kcbs_core::lab::published::{
    PublishedValue, TABLE_I, TABLE_II_FORWARD, TABLE_II_REVERSE, VISIBILITY_RANGE,
};
use kcbs_core::lab::{
    fit_leakage, run_experiment, Estimate, Experiment, ExperimentConfig, ExperimentReport,
    NoiseModel, ShotPlan, Source,
};
use kcbs_core::optimize::{maximize_violation, OptimizationResult, OptimizeConfig};
use kcbs_core::photonic::{pentagram_devices, verify_device, InternalSettings};
use kcbs_core::qutrit::{make_pentagram, CYCLE_LEN};
use kcbs_core::sequential::Order;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{ExperimentKind, RunConfig, TablesArgs};
use crate::CliError;

/// What a command produced, in every output format.
pub struct Outcome {
    pub command: &'static str,
    pub seed: Option<u64>,
    pub config: Value,
    pub result: Value,
    pub csv: String,
    pub text: String,
    /// Reported after the output has been written.
    pub failure: Option<CliError>,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

pub fn bounds() -> Outcome {
    let reports = [classical_wright_bound(), classical_kcbs_bound()];
    let mut csv = String::from("inequality,classical_bound,quantum_bound,attaining,search_space_size,admissible_assignments\n");
    let mut text = String::new();
    for (r, quantum) in reports
        .iter()
        .zip([wright_quantum_bound(), kcbs_quantum_bound()])
    {
        let outcomes: Vec<String> = r
            .attaining_assignment
            .outcomes
            .iter()
            .map(i8::to_string)
            .collect();
        let _ = writeln!(
            csv,
            "{},{},{quantum:.12},{},{},{}",
            r.inequality,
            r.bound_value,
            outcomes.join(" "),
            r.search_space_size,
            r.admissible_assignments
        );
        let _ = writeln!(text, "{}", bound_line(r, quantum));
    }
    Outcome {
        command: "bounds",
        seed: None,
        config: Value::Null,
        result: json!({
            "classical": reports,
            "quantum": { "wright": wright_quantum_bound(), "kcbs": kcbs_quantum_bound() },
        }),
        csv,
        text,
        failure: None,
    }
}

fn bound_line(r: &BoundReport, quantum: f64) -> String {
    let name = if r.inequality == "wright" {
        "Wright"
    } else {
        "KCBS"
    };
    format!(
        "{name} bound {} (attained by {}; {} of {} assignments admissible; quantum {quantum:.6})",
        r.bound_value, r.description, r.admissible_assignments, r.search_space_size
    )
}

pub fn run(mut cfg: RunConfig) -> Result<Outcome, CliError> {
    let mut comparison = Vec::new();
    if cfg.leakage_fit
        && matches!(
            cfg.experiment,
            ExperimentKind::Wright | ExperimentKind::Kcbs
        )
    {
        let p = make_pentagram();
        let w = TABLE_I[CYCLE_LEN];
        cfg.leakage = fit_leakage(w.value, *p.test_state(), p.cycle(), cfg.visibility)?;
        comparison.push(published_line(&w));
    }
    let mut out = match cfg.experiment {
        ExperimentKind::Wright | ExperimentKind::Kcbs => experiment(&cfg)?,
        ExperimentKind::PhotonicVerify => photonic_verify(cfg.delay_ns)?,
        ExperimentKind::Bounds => bounds(),
        ExperimentKind::Optimize => optimize(&cfg)?,
    };
    if cfg.experiment == ExperimentKind::Kcbs && cfg.leakage_fit {
        comparison
            .extend([&TABLE_II_FORWARD, &TABLE_II_REVERSE].map(|t| published_line(&t[CYCLE_LEN])));
    }
    for line in &comparison {
        let _ = writeln!(out.text, "{line}");
    }
    if !comparison.is_empty() {
        out.result["comparison"] = to_value(&comparison);
    }
    out.seed = match cfg.experiment {
        ExperimentKind::Bounds | ExperimentKind::PhotonicVerify => None,
        _ => Some(cfg.seed),
    };
    out.config = to_value(&cfg);
    Ok(out)
}

fn published_line(v: &PublishedValue) -> String {
    format!(
        "published ({}): {} = {} ± {}",
        v.provenance, v.quantity, v.value, v.sigma
    )
}

fn experiment_config(cfg: &RunConfig) -> Result<ExperimentConfig, CliError> {
    let experiment = match cfg.experiment {
        ExperimentKind::Wright => Experiment::Wright,
        _ => Experiment::Kcbs,
    };
    Ok(ExperimentConfig {
        experiment,
        noise: NoiseModel::new(cfg.visibility, cfg.leakage, cfg.drift)?,
        plan: ShotPlan::new(cfg.shots, cfg.seed, cfg.samples)?,
        orders: cfg.order.orders(),
    })
}

fn experiment(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let report = run_experiment(&Source::pentagram(), &experiment_config(cfg)?)?;
    let mut text = String::new();
    if let Some(w) = &report.wright {
        let _ = writeln!(text, "{:<10} {:>10} {:>10}", "question", "P(+1)", "sigma");
        for (i, e) in w.per_question.iter().enumerate() {
            let _ = writeln!(
                text,
                "{:<10} {:>10.6} {:>10.6}",
                format!("Q{i}"),
                e.value,
                e.sigma
            );
        }
        let _ = writeln!(text, "{}", estimate_line("W", &w.total));
    }
    for k in &report.kcbs {
        let _ = writeln!(text, "order {}", k.order);
        let _ = writeln!(text, "{:<10} {:>10} {:>10}", "edge", "<QQ>", "sigma");
        for (i, e) in k.per_edge.iter().enumerate() {
            let (a, b) = k.order.edge(i);
            let _ = writeln!(
                text,
                "{:<10} {:>10.6} {:>10.6}",
                format!("Q{a}Q{b}"),
                e.value,
                e.sigma
            );
        }
        let _ = writeln!(text, "{}", estimate_line("kappa", &k.kappa));
    }
    for v in &report.verdicts {
        let state = if v.violated {
            "violated"
        } else {
            "not violated"
        };
        let _ = writeln!(
            text,
            "verdict: {} bound {} {state} ({:.1} sigma)",
            v.inequality, v.classical_bound, v.significance
        );
    }
    for n in &report.notes {
        let _ = writeln!(text, "note: {n}");
    }
    Ok(Outcome {
        command: "run",
        seed: Some(cfg.seed),
        config: Value::Null,
        result: to_value(&report),
        csv: report.counts.to_csv(),
        text,
        failure: None,
    })
}

fn estimate_line(name: &str, e: &Estimate) -> String {
    format!("{name} = {:.6} ± {:.6}", e.value, e.sigma)
}

pub fn photonic_verify(delay_ns: f64) -> Result<Outcome, CliError> {
    let p = make_pentagram();
    let devices = pentagram_devices(delay_ns)?;
    let rows: Vec<_> = devices
        .iter()
        .enumerate()
        .map(|(i, d)| verify_device(d, p.question(i)))
        .collect();
    let mut csv = String::from("device,plate_angle_deg,fidelity,delayed_weight,rank_residual,unitarity_residual,loss_amplitude\n");
    let mut text = format!(
        "internal plates: half-wave {:.9} deg, quarter-wave {:.9} deg\n{:<7} {:>8} {:>18} {:>12} {:>12}\n",
        InternalSettings::FROZEN.hwp_deg,
        InternalSettings::FROZEN.qwp_deg,
        "device",
        "theta",
        "fidelity",
        "rank resid",
        "unit resid"
    );
    for (i, r) in rows.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{i},{},{:.15},{:.15},{:e},{:e},{:e}",
            r.plate_angle_deg,
            r.fidelity,
            r.delayed_weight,
            r.rank_residual,
            r.unitarity_residual,
            r.loss_amplitude
        );
        let _ = writeln!(
            text,
            "{:<7} {:>8} {:>18.15} {:>12.3e} {:>12.3e}",
            format!("Q{i}"),
            r.plate_angle_deg,
            r.fidelity,
            r.rank_residual,
            r.unitarity_residual
        );
    }
    Ok(Outcome {
        command: "photonic-verify",
        seed: None,
        config: json!({ "delay_ns": delay_ns }),
        result: json!({
            "internal": InternalSettings::FROZEN,
            "fidelities": rows,
            "devices": devices,
        }),
        csv,
        text,
        failure: None,
    })
}

pub fn optimize(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let opt = OptimizeConfig {
        restarts: cfg.restarts,
        evaluations_per_restart: cfg.evaluations,
        ..OptimizeConfig::new(cfg.target.into(), cfg.seed)
    };
    let r = maximize_violation(&opt)?;
    let failure = (!r.converged).then(|| CliError::NotConverged(optimize_summary(&r)));
    let mut csv = String::from("vector,re0,im0,re1,im1,re2,im2\n");
    for (label, v) in r
        .vectors
        .iter()
        .enumerate()
        .map(|(i, v)| (format!("v{i}"), v))
        .chain([("state".to_string(), &r.state)])
    {
        let cells: Vec<String> = v
            .amplitudes()
            .iter()
            .flat_map(|z| [format!("{:.15}", z.re), format!("{:.15}", z.im)])
            .collect();
        let _ = writeln!(csv, "{label},{}", cells.join(","));
    }
    let mut text = optimize_summary(&r);
    text.push('\n');
    for (i, v) in r.vectors.iter().enumerate() {
        let _ = writeln!(text, "v{i} = {}", format_vector(&v.amplitudes()));
    }
    let _ = writeln!(text, "state = {}", format_vector(&r.state.amplitudes()));
    Ok(Outcome {
        command: "optimize",
        seed: Some(cfg.seed),
        config: Value::Null,
        result: to_value(&r),
        csv,
        text,
        failure,
    })
}

fn optimize_summary(r: &OptimizationResult) -> String {
    format!(
        "target {:?}: best value {:.10} (converged: {}, orthogonality residual {:.2e}, {} evaluations, best restart {})",
        r.target, r.best_value, r.converged, r.residual, r.iterations, r.best_restart
    )
}

fn format_vector(a: &[kcbs_core::qutrit::C64; 3]) -> String {
    let parts: Vec<String> = a
        .iter()
        .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
        .collect();
    format!("({})", parts.join(", "))
}

/// Simulated counterpart of one published row.
#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub quantity: String,
    pub published_value: f64,
    pub published_sigma: f64,
    pub simulated_low: f64,
    pub simulated_high: f64,
    pub provenance: String,
}

/// The run envelope as far as `tables` needs it.
#[derive(Deserialize)]
struct SavedReport {
    result: ExperimentReport,
}

fn load_report(path: &Path) -> Result<ExperimentReport, CliError> {
    let hint = "generate one with `kcbs run --experiment wright|kcbs --format json --output FILE`";
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Io(format!(
            "cannot read report {}: {e}; {hint}",
            path.display()
        ))
    })?;
    serde_json::from_str::<SavedReport>(&text)
        .map(|s| s.result)
        .map_err(|e| {
            CliError::Usage(format!(
                "{} is not a run report ({e}); {hint}",
                path.display()
            ))
        })
}

pub fn tables(args: &TablesArgs) -> Result<Outcome, CliError> {
    let p = make_pentagram();
    let table_one = args.which == "I";
    let experiment = if table_one {
        Experiment::Wright
    } else {
        Experiment::Kcbs
    };
    let w_published = TABLE_I[CYCLE_LEN].value;
    let mut settings = Vec::new();

    let reports: Vec<ExperimentReport> = match &args.report {
        Some(path) => {
            let r = load_report(path)?;
            if r.config.experiment != experiment {
                return Err(CliError::Usage(format!(
                    "report {} holds a {:?} run; table {} needs {:?}",
                    path.display(),
                    r.config.experiment,
                    args.which,
                    experiment
                )));
            }
            settings.push(json!({ "report": path, "seed": r.seed }));
            vec![r]
        }
        None => [VISIBILITY_RANGE.0, VISIBILITY_RANGE.1]
            .into_iter()
            .map(|v| {
                let leakage = fit_leakage(w_published, *p.test_state(), p.cycle(), v)?;
                let mut plan = ShotPlan::with_seed(args.seed);
                if let Some(s) = args.shots {
                    plan = ShotPlan::new(s, args.seed, plan.samples)?;
                }
                let cfg = ExperimentConfig {
                    experiment,
                    noise: NoiseModel::new(v, leakage, 0.0)?,
                    plan,
                    orders: Order::BOTH.to_vec(),
                };
                settings.push(to_value(&cfg));
                Ok(run_experiment(&Source::pentagram(), &cfg)?)
            })
            .collect::<Result<_, CliError>>()?,
    };

    let band =
        |pick: &dyn Fn(&ExperimentReport) -> Option<Estimate>| -> Result<(f64, f64), CliError> {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for r in &reports {
                let e = pick(r).ok_or_else(|| {
                    CliError::Usage("report lacks an estimate needed for this table".into())
                })?;
                lo = lo.min(e.value - e.sigma);
                hi = hi.max(e.value + e.sigma);
            }
            Ok((lo, hi))
        };

    let mut rows = Vec::new();
    let mut push = |published: &PublishedValue, (lo, hi): (f64, f64)| {
        rows.push(TableRow {
            quantity: published.quantity.to_string(),
            published_value: published.value,
            published_sigma: published.sigma,
            simulated_low: lo,
            simulated_high: hi,
            provenance: published.provenance.to_string(),
        })
    };
    if table_one {
        for (i, published) in TABLE_I.iter().enumerate() {
            push(
                published,
                band(&|r| {
                    r.wright.as_ref().map(|w| {
                        if i < CYCLE_LEN {
                            w.per_question[i]
                        } else {
                            w.total
                        }
                    })
                })?,
            );
        }
    } else {
        for (order, table) in [
            (Order::Forward, &TABLE_II_FORWARD),
            (Order::Reverse, &TABLE_II_REVERSE),
        ] {
            for (i, published) in table.iter().enumerate() {
                push(
                    published,
                    band(&|r| {
                        r.kcbs_for(order).map(|k| {
                            if i < CYCLE_LEN {
                                k.per_edge[i]
                            } else {
                                k.kappa
                            }
                        })
                    })?,
                );
            }
        }
    }

    let mut csv = String::from(
        "quantity,published_value,published_sigma,simulated_low,simulated_high,provenance\n",
    );
    let mut text = String::new();
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{:.6},{:.6},{}",
            r.quantity,
            r.published_value,
            r.published_sigma,
            r.simulated_low,
            r.simulated_high,
            r.provenance
        );
        let _ = writeln!(
            text,
            "{}: paper {} ± {} | simulated band [{:.4}, {:.4}] | {}",
            r.quantity,
            r.published_value,
            r.published_sigma,
            r.simulated_low,
            r.simulated_high,
            r.provenance
        );
    }
    if args.report.is_none() {
        let _ = writeln!(
            text,
            "simulated at visibility {} and {} with leakage fitted to the published W",
            VISIBILITY_RANGE.0, VISIBILITY_RANGE.1
        );
    }
    Ok(Outcome {
        command: "tables",
        seed: Some(reports[0].seed),
        config: json!({ "which": args.which, "runs": settings }),
        result: to_value(&rows),
        csv,
        text,
        failure: None,
    })
}
