//! The subcommand bodies. Each takes a resolved config and an output
//! directory and returns a [`Report`]; none of them touch the process exit code.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde_json::json;

use qergo_core::drives::{evolve, integer_times, EvolutionTrace};
use qergo_core::ergodicity::{
    accumulate_unitary_moment, b_bounds, convergence_series, frame_potential_time, unitary_deviation,
    MomentAccumulator,
};
use qergo_core::euler::haar_pushforward_check;
use qergo_core::haar::{
    haar_state_frame_potential, haar_state_moment, haar_state_moment_mc, haar_unitary_frame_potential, MomentKind,
    state_frame_potential_mc, unitary_frame_potential_mc,
};
use qergo_core::lattice::{check_theorem_g2, verify_khse_constraints, verify_khse_constraints_fast, verify_orthonormality};
use qergo_core::qcore::{basis_state, haar_random_state, haar_random_unitary, seeded, trace_distance};
use qergo_core::quadrature::TorusQuadrature;
use qergo_core::spinchain::{delta_series, ChainConfig, ChainDrive, DeltaSeries};
use qergo_core::stats::{loglinear_fit, loglog_fit, LinearFit};

use crate::config::{
    builtin_lattice, BoundsConfig, CueConfig, DriveConfig, DriveKind, Expectation, HaarOracleConfig, LatticeConfig,
    MomentKindArg, SpinchainConfig, VerifyDesignConfig,
};
use crate::error::{CliError, CliResult};
use crate::formats::{read_lattice, write_csv, write_lattice, ConvergenceRow, SpinchainRow};
use crate::report::{Check, Report};

/// 10, 100, … below `t`, then `t`.
pub fn log_checkpoints(t: usize) -> Vec<usize> {
    let mut v = Vec::new();
    let mut c = 10;
    while c < t {
        v.push(c);
        c *= 10;
    }
    v.push(t);
    v
}

fn fit_json(fit: Option<LinearFit>) -> serde_json::Value {
    match fit {
        Some(f) => json!({"slope": f.slope, "slope_stderr": f.slope_stderr, "intercept": f.intercept, "r_squared": f.r_squared}),
        None => serde_json::Value::Null,
    }
}

fn check_orders(ks: &[usize]) -> CliResult<()> {
    if ks.is_empty() || ks.contains(&0) {
        return Err(CliError::usage("moment orders must be a nonempty list of positive integers"));
    }
    Ok(())
}

/// Deviation and frame potential on growing prefixes, for either moment kind.
fn convergence_rows(
    trace: &EvolutionTrace,
    k: usize,
    kind: MomentKind,
    checkpoints: &[usize],
    pair_budget: usize,
    seed: u64,
) -> CliResult<Vec<ConvergenceRow>> {
    let mut rng = seeded(seed ^ k as u64);
    let to_row = |t, deviation, fp: qergo_core::haar::Estimate| ConvergenceRow {
        k,
        t,
        deviation,
        frame_potential: fp.mean,
        frame_potential_stderr: fp.stderr,
    };
    match kind {
        MomentKind::State => Ok(convergence_series(trace, k, checkpoints, pair_budget, &mut rng)?
            .into_iter()
            .map(|p| to_row(p.t, p.deviation, p.frame_potential))
            .collect()),
        MomentKind::Unitary => {
            let d = trace.unitaries.first().map_or(0, |u| u.nrows());
            let mut acc = MomentAccumulator::new(MomentKind::Unitary, d, k)?;
            let mut rows = Vec::new();
            let mut done = 0;
            for &c in checkpoints {
                for u in &trace.unitaries[done..c] {
                    acc.push_unitary(u)?;
                }
                done = c;
                let prefix = EvolutionTrace::from_unitaries(trace.times[..c].to_vec(), trace.unitaries[..c].to_vec());
                let fp = frame_potential_time(&prefix, k, MomentKind::Unitary, pair_budget, &mut rng)?;
                rows.push(to_row(c, unitary_deviation(&acc)?, fp));
            }
            Ok(rows)
        }
    }
}

pub fn verify_design(cfg: &VerifyDesignConfig, out: &Path) -> CliResult<Report> {
    check_orders(&cfg.k)?;
    let kind: MomentKind = cfg.kind.into();
    let mut rng = seeded(cfg.seed);
    let (trace, source) = match (&cfg.drive, cfg.ensemble.as_deref()) {
        (Some(_), Some(_)) => return Err(CliError::usage("give either a drive or an ensemble, not both")),
        (None, None) => return Err(CliError::usage("give a drive (--drive) or an ensemble (--ensemble haar)")),
        (None, Some("haar")) => {
            if cfg.samples < 2 || cfg.d < 2 {
                return Err(CliError::usage("the Haar ensemble needs d ≥ 2 and at least two samples"));
            }
            let times = vec![0.0; cfg.samples];
            let trace = match kind {
                MomentKind::State => {
                    EvolutionTrace::from_states(times, (0..cfg.samples).map(|_| haar_random_state(cfg.d, &mut rng)).collect())
                }
                MomentKind::Unitary => EvolutionTrace::from_unitaries(
                    times,
                    (0..cfg.samples).map(|_| haar_random_unitary(cfg.d, &mut rng)).collect(),
                ),
            };
            (trace, "haar".to_string())
        }
        (None, Some(other)) => return Err(CliError::usage(format!("unknown ensemble {other} (haar)"))),
        (Some(drive), None) => {
            if cfg.t < 2 {
                return Err(CliError::usage("T must be at least 2"));
            }
            let spec = drive.build()?;
            let psi0 = basis_state(spec.dim(), 0);
            let trace = evolve(&spec, &integer_times(cfg.t), Some(&psi0))?;
            (trace, serde_json::to_value(drive.kind)?.as_str().unwrap_or_default().to_string())
        }
    };
    let dim = trace.states.as_ref().and_then(|s| s.first()).map_or_else(|| trace.unitaries[0].nrows(), |s| s.len());
    let checkpoints = log_checkpoints(trace.len());
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut per_k = serde_json::Map::new();
    for &k in &cfg.k {
        let series = convergence_rows(&trace, k, kind, &checkpoints, cfg.pair_budget, cfg.seed)?;
        let last = series.last().expect("at least one checkpoint");
        checks.push(Check::below(format!("k={k} deviation at T={}", last.t), last.deviation, cfg.tol));
        let haar_fp = match kind {
            MomentKind::State => haar_state_frame_potential(dim, k),
            MomentKind::Unitary => haar_unitary_frame_potential(dim, k).mean,
        };
        let xs: Vec<f64> = series.iter().map(|r| r.t as f64).collect();
        let ys: Vec<f64> = series.iter().map(|r| r.deviation).collect();
        per_k.insert(
            format!("k={k}"),
            json!({
                "frame_potential": last.frame_potential,
                "frame_potential_stderr": last.frame_potential_stderr,
                "haar_frame_potential": haar_fp,
                "loglog_fit": fit_json(loglog_fit(&xs, &ys)),
            }),
        );
        rows.extend(series);
    }
    let csv = out.join("verify-design.csv");
    write_csv(&csv, &rows)?;
    let data = json!({"source": source, "dim": dim, "samples": trace.len(), "orders": per_k});
    Ok(Report::new("verify-design", checks, data, vec![csv]))
}

pub fn cue(cfg: &CueConfig, out: &Path) -> CliResult<Report> {
    if cfg.t < 2 || cfg.samples < 2 {
        return Err(CliError::usage("T and samples must be at least 2"));
    }
    let drive = DriveConfig {
        d: Some(cfg.d),
        omegas: cfg.omegas.clone(),
        quasienergies: cfg.quasienergies.clone(),
        ..DriveConfig::of(DriveKind::Cue)
    };
    let spec = drive.build()?;
    let d = spec.dim();
    let trace = evolve(&spec, &integer_times(cfg.t), Some(&basis_state(d, 0)))?;
    let mut rng = seeded(cfg.seed);
    let u1 = unitary_deviation(&accumulate_unitary_moment(&trace, 1)?)?;
    let fp = frame_potential_time(&trace, 2, MomentKind::State, cfg.pair_budget, &mut rng)?;
    let fp_haar = haar_state_frame_potential(d, 2);
    let mut checks = vec![
        Check::below("unitary k=1 deviation", u1, cfg.unitary_tol),
        Check::below("|state frame potential k=2 − Haar|", (fp.mean - fp_haar).abs(), cfg.frame_tol),
    ];
    let mut data = json!({
        "d": d,
        "tones": spec.as_floquet().map(|f| f.tones()),
        "state_frame_potential_k2": fp.mean,
        "state_frame_potential_k2_stderr": fp.stderr,
        "haar_state_frame_potential_k2": fp_haar,
    });
    if d <= 4 {
        let push = haar_pushforward_check(d, cfg.samples, &mut rng)?;
        checks.push(Check::below("pushforward k=1 deviation", push.k1_deviation, cfg.pushforward_tol));
        data["pushforward"] = json!({
            "k1_deviation_mc": push.k1_deviation_mc,
            "k1_mc_stderr": push.k1_mc_stderr,
            "k2_frame_potential": push.k2_frame_potential.mean,
            "k2_frame_potential_stderr": push.k2_frame_potential.stderr,
            "k2_deviation": push.k2_deviation,
        });
    } else {
        data["pushforward"] = json!("skipped: needs d ≤ 4");
    }
    let cps = log_checkpoints(cfg.t);
    let mut rows = convergence_rows(&trace, 1, MomentKind::State, &cps, cfg.pair_budget, cfg.seed)?;
    rows.extend(convergence_rows(&trace, 2, MomentKind::State, &cps, cfg.pair_budget, cfg.seed)?);
    let csv = out.join("cue.csv");
    write_csv(&csv, &rows)?;
    Ok(Report::new("cue", checks, data, vec![csv]))
}

pub fn lattice(cfg: &LatticeConfig, _out: &Path) -> CliResult<Report> {
    let (name, lat, own_k) = match (&cfg.builtin, &cfg.file) {
        (Some(_), Some(_)) => return Err(CliError::usage("give either --builtin or --file")),
        (None, None) => return Err(CliError::usage("give a lattice with --builtin or --file")),
        (Some(b), None) => {
            let lat = builtin_lattice(b, cfg.d)?.ok_or_else(|| CliError::usage(format!("unknown builtin lattice {b}")))?;
            let own = match b.as_str() {
                "el-23" => 3,
                "el-12" => 2,
                _ => 1,
            };
            (b.clone(), lat, own)
        }
        (None, Some(p)) => (p.display().to_string(), read_lattice(p)?, 1),
    };
    let k = cfg.k.unwrap_or(own_k);
    if k == 0 {
        return Err(CliError::usage("k must be positive"));
    }
    let mut checks = Vec::new();
    let mut data = json!({"lattice": name, "d": lat.d, "m": lat.m, "components": lat.components.len()});
    if cfg.verify {
        let ortho = verify_orthonormality(&lat, cfg.tol);
        checks.push(Check::at_most("orthonormality", ortho.max_violation, cfg.tol));
        for kk in 1..=k {
            let rep = if cfg.brute_force {
                verify_khse_constraints(&lat, kk, cfg.tol)?
            } else {
                verify_khse_constraints_fast(&lat, kk, cfg.tol)?
            };
            checks.push(Check::at_most(format!("k={kk} constraints"), rep.max_violation, cfg.tol));
        }
    }
    if cfg.theorem_g2 {
        let drive = DriveConfig {
            d: Some(cfg.d),
            omegas: cfg.omegas.clone(),
            quasienergies: cfg.quasienergies.clone(),
            lattice: Some(name.clone()),
            ..DriveConfig::of(DriveKind::Lattice)
        };
        let spec = drive.build()?;
        let dec = spec.as_floquet().expect("lattice drives are quasiperiodic");
        let quad = TorusQuadrature::new(cfg.quadrature_points).with_doubling(cfg.g2_tol);
        let rep = check_theorem_g2(dec, k, &quad, cfg.g2_tol)?;
        checks.push(Check::at_most(format!("theorem G2 k={k} max deviation"), rep.max_deviation, cfg.g2_tol));
        data["g2_under_resolved"] = json!(rep.under_resolved);
        data["g2_per_alpha"] = json!(rep.per_alpha);
    }
    let mut outputs = Vec::new();
    if let Some(p) = &cfg.export {
        write_lattice(p, &lat)?;
        outputs.push(p.clone());
    }
    Ok(Report::new("lattice", checks, data, outputs))
}

pub fn bounds(cfg: &BoundsConfig, _out: &Path) -> CliResult<Report> {
    let r = b_bounds(cfg.d, cfg.k)?;
    let packing: Vec<_> = cfg.eps.iter().map(|&e| json!({"eps": e, "n": r.packing_n(e).to_string()})).collect();
    let data = json!({
        "d": r.d,
        "k": r.k,
        "gamma": r.gamma,
        "B1": r.b1,
        "B2": r.b2,
        "C": r.c,
        "delta": r.delta,
        "B2_applies": r.b2_applies(),
        "best": r.best(),
        "packing": packing,
    });
    Ok(Report::new("bounds", Vec::new(), data, Vec::new()))
}

pub fn haar_oracle(cfg: &HaarOracleConfig, _out: &Path) -> CliResult<Report> {
    check_orders(&cfg.k)?;
    if cfg.d < 2 || cfg.samples < 2 {
        return Err(CliError::usage("need d ≥ 2 and at least two samples"));
    }
    let mut rng = seeded(cfg.seed);
    let mut checks = Vec::new();
    let mut data = serde_json::Map::new();
    for &k in &cfg.k {
        match cfg.kind {
            MomentKindArg::State => {
                let mc = haar_state_moment_mc(cfg.d, k, cfg.samples, &mut rng)?;
                let dist = trace_distance(&mc, &haar_state_moment(cfg.d, k)?)?;
                checks.push(Check::below(format!("k={k} state moment trace distance"), dist, cfg.tol));
                let fp = state_frame_potential_mc(cfg.d, k, cfg.samples, &mut rng);
                let exact = haar_state_frame_potential(cfg.d, k);
                checks.push(Check::at_most(format!("k={k} state frame potential (σ)"), fp.sigmas_from(exact), cfg.sigmas));
                data.insert(format!("k={k}"), json!({"frame_potential_mc": fp.mean, "stderr": fp.stderr, "exact": exact}));
            }
            MomentKindArg::Unitary => {
                let fp = unitary_frame_potential_mc(cfg.d, k, cfg.samples, &mut rng);
                let reference = haar_unitary_frame_potential(cfg.d, k);
                let sigma = fp.stderr.hypot(reference.stderr);
                let gap = (fp.mean - reference.mean).abs();
                let z = if gap == 0.0 { 0.0 } else { gap / sigma };
                checks.push(Check::at_most(format!("k={k} unitary frame potential (σ)"), z, cfg.sigmas));
                data.insert(
                    format!("k={k}"),
                    json!({"frame_potential_mc": fp.mean, "stderr": fp.stderr, "reference": reference.mean, "reference_stderr": reference.stderr}),
                );
            }
        }
    }
    Ok(Report::new("haar-oracle", checks, serde_json::Value::Object(data), Vec::new()))
}

/// Runs independent jobs on `workers` threads; results come back in job order.
fn run_jobs<J: Sync, T: Send>(jobs: &[J], workers: usize, f: impl Fn(&J) -> CliResult<T> + Sync) -> CliResult<Vec<T>> {
    if workers <= 1 || jobs.len() <= 1 {
        return jobs.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<CliResult<T>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers.min(jobs.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let r = f(&jobs[i]);
                slots.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    slots.into_inner().expect("worker panicked").into_iter().map(|r| r.expect("every job ran")).collect()
}

fn series_rows(s: &DeltaSeries) -> Vec<SpinchainRow> {
    let c = &s.config;
    let mut rows = Vec::new();
    for p in &s.points {
        rows.push(SpinchainRow { drive: c.drive.name().into(), l: c.l, k: c.k, order: 1, t: p.t, delta: p.delta1 });
    }
    for p in &s.points {
        if let Some(d2) = p.delta2 {
            rows.push(SpinchainRow { drive: c.drive.name().into(), l: c.l, k: c.k, order: 2, t: p.t, delta: d2 });
        }
    }
    rows
}

pub fn spinchain(cfg: &SpinchainConfig, out: &Path) -> CliResult<Report> {
    let drives = cfg.chain_drives()?;
    if !(1..=2).contains(&cfg.order) {
        return Err(CliError::usage("order must be 1 or 2"));
    }
    if cfg.workers == 0 {
        return Err(CliError::usage("workers must be at least 1"));
    }
    let second = cfg.order == 2;
    let sweep = cfg.sweep_l.is_some() || cfg.sweep_k.is_some();
    let ls = cfg.sweep_l.clone().unwrap_or_else(|| vec![cfg.l]);
    let ks = cfg.sweep_k.clone().unwrap_or_else(|| vec![cfg.k]);
    if cfg.sweep_l.is_some() && cfg.sweep_k.is_some() {
        return Err(CliError::usage("sweep along L or along K, not both"));
    }
    let mut checkpoints = if sweep { vec![cfg.t_opt, cfg.t_late] } else { cfg.checkpoints.clone() };
    checkpoints.push(cfg.t_opt);
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let t_last = *checkpoints.last().expect("T_opt is always present");
    let mut jobs = Vec::new();
    for &drive in &drives {
        for &l in &ls {
            for &k in &ks {
                let mut c = ChainConfig::new(l, k, drive)?;
                c.t_opt = cfg.t_opt;
                c.t_max = t_last;
                c.validate()?;
                jobs.push(c);
            }
        }
    }
    let results = run_jobs(&jobs, cfg.workers, |c| Ok(delta_series(c, &checkpoints, second)?))?;
    let rows: Vec<SpinchainRow> = results.iter().flat_map(series_rows).collect();
    let mut checks = Vec::new();
    let mut data = serde_json::Map::new();
    let orders: &[usize] = if second { &[1, 2] } else { &[1] };
    if let Some(expect) = cfg.expect {
        for s in &results {
            for &order in orders {
                let pick = |t: usize| {
                    rows.iter()
                        .find(|r| r.drive == s.config.drive.name() && r.l == s.config.l && r.k == s.config.k && r.order == order && r.t == t)
                        .map_or(f64::NAN, |r| r.delta.abs())
                };
                let ratio = pick(t_last) / pick(cfg.t_opt);
                let name = format!("{} L={} K={} Δ{} |Δ(T={t_last})|/|Δ(T_opt)|", s.config.drive.name(), s.config.l, s.config.k, order);
                checks.push(match expect {
                    Expectation::Plateau => Check::above(name, ratio, 0.5),
                    Expectation::Decay => Check::below(name, ratio, 1.0 / 3.0),
                });
            }
        }
    }
    if sweep {
        let along_l = cfg.sweep_l.is_some();
        for &drive in drives.iter().filter(|d| **d != ChainDrive::Fibonacci) {
            for &order in orders {
                let sel: Vec<&SpinchainRow> =
                    rows.iter().filter(|r| r.drive == drive.name() && r.order == order && r.t == t_last).collect();
                let xs: Vec<f64> = sel.iter().map(|r| if along_l { r.l as f64 } else { r.k as f64 }).collect();
                let ys: Vec<f64> = sel.iter().map(|r| r.delta.abs()).collect();
                let axis = if along_l { "L" } else { "K" };
                data.insert(format!("{} Δ{order} ln|Δ| vs {axis}", drive.name()), fit_json(loglinear_fit(&xs, &ys)));
            }
        }
    }
    let degenerate: Vec<String> = results
        .iter()
        .filter(|s| s.observable1.degenerate || s.observable2.as_ref().is_some_and(|o| o.degenerate))
        .map(|s| format!("{} L={} K={}", s.config.drive.name(), s.config.l, s.config.k))
        .collect();
    if !degenerate.is_empty() {
        data.insert("degenerate_observables".into(), json!(degenerate));
    }
    let csv: PathBuf = out.join("spinchain.csv");
    write_csv(&csv, &rows)?;
    Ok(Report::new("spinchain", checks, serde_json::Value::Object(data), vec![csv]))
}
