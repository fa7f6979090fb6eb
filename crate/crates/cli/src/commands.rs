//! One function per subcommand. Each writes raw rows to CSV and a
//! `summary.json` into `<out>/<command>/`.

use oppenheim_core::experiments::{
    beta_series, critical_exponent_estimate, effective_oppenheim, estimate_tau, geometric_ladder, hit_test, met_decay,
    quantile, target_measure_estimate, BetaTarget, MetSettings, TargetFamily,
};
use oppenheim_core::forms::{form_from_g, min_form_value_direct};
use oppenheim_core::lattice::{cusp_distance, sample_x3_haar, LatticePoint};
use oppenheim_core::linalg::Mat3;
use oppenheim_core::selftest::run_selftest;
use oppenheim_core::spin::{spin_cover, spin_cover_sign_flipped};
use oppenheim_core::{Error, RandomStream};
use serde_json::json;

use crate::config::{FamilyArg, RunConfig};
use crate::error::CliError;
use crate::output::{num, OutputDir};

fn ladder(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    Ok(geometric_ladder(cfg.t_start, cfg.t_ratio, cfg.t_count)?)
}

fn root(cfg: &RunConfig) -> RandomStream {
    RandomStream::new(cfg.seed)
}

fn haar_point(root: &RandomStream, label: &str, i: u64) -> LatticePoint {
    sample_x3_haar(&mut root.split_named(label, i))
}

fn family(cfg: &RunConfig) -> TargetFamily {
    match cfg.family {
        FamilyArg::Cusp => TargetFamily::cusp(),
        FamilyArg::Frozen => TargetFamily::frozen(cfg.frozen_threshold),
        FamilyArg::Point => TargetFamily::point(LatticePoint::standard(), cfg.delta),
    }
}

fn matrix_fields(m: &Mat3) -> impl Iterator<Item = String> + '_ {
    m.0.iter().flatten().map(|x| num(*x))
}

fn matrix_header(prefix: &str) -> Vec<String> {
    (1..=3).flat_map(|i| (1..=3).map(move |j| format!("{prefix}{i}{j}"))).collect()
}

fn header(parts: &[&[String]]) -> Vec<String> {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn open_csv(out: &OutputDir, name: &str, cols: Vec<String>) -> Result<crate::output::CsvSink, CliError> {
    let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    out.csv(name, &refs)
}

pub fn oppenheim_scan(cfg: &RunConfig) -> Result<(), CliError> {
    let out = OutputDir::create(cfg)?;
    let ladder = ladder(cfg)?;
    let root = root(cfg);
    let g_cols = matrix_header("g");
    let mut forms = open_csv(
        &out,
        "forms.csv",
        header(&[&strs(&["form_id"]), &g_cols, &strs(&["T", "min_abs_q", "n1", "n2", "n3", "engine", "elapsed_s"])]),
    )?;
    let mut fits = open_csv(
        &out,
        "slopes.csv",
        header(&[&strs(&["form_id"]), &g_cols, &strs(&["slope", "intercept", "residual", "represents_zero"])]),
    )?;
    let engine = cfg.engine.into();
    let mut slopes = Vec::with_capacity(cfg.samples);
    for i in 0..cfg.samples as u64 {
        let g = haar_point(&root, "form", i).basis;
        let q = form_from_g(&g)?;
        let fit = estimate_tau(&q, &ladder, engine, cfg.budget, cfg.norm_choice(), &root.split_named("search", i))?;
        for p in &fit.points {
            let mut row = vec![i.to_string()];
            row.extend(matrix_fields(&g));
            row.extend([num(p.radius), num(p.min_abs_q)]);
            row.extend(p.n.iter().map(|x| x.to_string()));
            row.extend([engine.as_str().to_string(), num(p.elapsed)]);
            forms.row(&row)?;
        }
        let (slope, intercept, residual) = match fit.fit {
            Some(f) => (f.slope, f.intercept, f.residual),
            None => (f64::NEG_INFINITY, f64::NAN, f64::NAN),
        };
        let mut row = vec![i.to_string()];
        row.extend(matrix_fields(&g));
        row.extend([num(slope), num(intercept), num(residual), fit.represents_zero.to_string()]);
        fits.row(&row)?;
        forms.flush()?;
        fits.flush()?;
        slopes.push(slope);
    }
    out.summary(
        cfg,
        json!({
            "median_slope": quantile(&slopes, 0.5),
            "q25": quantile(&slopes, 0.25),
            "q75": quantile(&slopes, 0.75),
            "n_forms": cfg.samples,
            "engine": engine.as_str(),
        }),
    )
}

/// Forms above this radius are not cross-checked by the direct search.
const DIRECT_CHECK_LIMIT: f64 = 1000.0;

pub fn oppenheim_one(cfg: &RunConfig) -> Result<(), CliError> {
    let out = OutputDir::create(cfg)?;
    let ladder = ladder(cfg)?;
    let root = root(cfg);
    let g = match cfg.g {
        Some(rows) => Mat3::from_rows(rows),
        None => haar_point(&root, "form", 0).basis,
    };
    let q = form_from_g(&g)?;
    let mut rows = out.csv(
        "oppenheim_one.csv",
        &[
            "T",
            "tau",
            "eta",
            "status",
            "n1",
            "n2",
            "n3",
            "value",
            "n_norm",
            "norm_bound",
            "alt_norm_bound",
            "alt_norm_bound_holds",
            "value_bound",
            "direct_radius",
            "direct_min_abs_q",
            "elapsed_s",
        ],
    )?;
    let (mut found, mut dominated, mut alt_ok) = (0usize, true, true);
    for (k, &t) in ladder.iter().enumerate() {
        let res =
            effective_oppenheim(&g, cfg.tau, t, cfg.budget, cfg.norm_choice(), &root.split_named("orbit", k as u64));
        let eta = oppenheim_core::experiments::tau_to_eta(cfg.tau);
        let mut row = vec![num(t), num(cfg.tau), num(eta)];
        match res {
            Ok(Some(c)) => {
                found += 1;
                alt_ok &= c.alt_norm_bound_holds;
                let (dr, dv) = if c.n_norm <= DIRECT_CHECK_LIMIT {
                    let r = (c.n_norm * (1.0 + 1e-12)).max(1.0);
                    let d = min_form_value_direct(&q, r, cfg.norm_choice())?;
                    dominated &= d.value.abs() <= c.value.abs();
                    (r, d.value.abs())
                } else {
                    (f64::NAN, f64::NAN)
                };
                row.push("found".into());
                row.extend(c.n.iter().map(|x| x.to_string()));
                row.extend([
                    num(c.value),
                    num(c.n_norm),
                    num(c.norm_bound),
                    num(c.alt_norm_bound),
                    c.alt_norm_bound_holds.to_string(),
                    num(c.value_bound),
                    num(dr),
                    num(dv),
                    num(c.elapsed),
                ]);
            }
            Ok(None) | Err(Error::RoundingFailure { .. }) => {
                let status = if res.is_ok() { "not_found_within_budget" } else { "rounding_failure" };
                row.push(status.into());
                row.extend(std::iter::repeat_n(String::new(), 12));
            }
            Err(e) => return Err(e.into()),
        }
        rows.row(&row)?;
        rows.flush()?;
    }
    out.summary(
        cfg,
        json!({
            "g": g.0,
            "eta": oppenheim_core::experiments::tau_to_eta(cfg.tau),
            "found": found,
            "attempted": ladder.len(),
            "direct_never_worse": dominated,
            "alt_norm_bound_always_holds": alt_ok,
        }),
    )
}

pub fn targets_hit(cfg: &RunConfig) -> Result<(), CliError> {
    let out = OutputDir::create(cfg)?;
    let ladder = ladder(cfg)?;
    let root = root(cfg);
    let fam = family(cfg);
    let mut rows = out.csv(
        "hits.csv",
        &["point_id", "T", "eta", "hit", "witness_index", "theta", "t", "theta_prime", "witness_norm"],
    )?;
    let mut counts = vec![0usize; ladder.len()];
    for i in 0..cfg.samples as u64 {
        let x = haar_point(&root, "x", i);
        // The same stream at every radius keeps the per-T fractions comparable.
        let stream = root.split_named("hit", i);
        for (k, &t) in ladder.iter().enumerate() {
            let r = hit_test(&x, t, cfg.eta, &fam, cfg.budget, &stream)?;
            counts[k] += r.hit as usize;
            let w = r.witness.map(|h| [num(h.kak.theta), num(h.kak.t), num(h.kak.theta_prime), num(h.norm)]);
            let mut row = vec![i.to_string(), num(t), num(cfg.eta), r.hit.to_string()];
            row.push(r.witness_index.map(|w| w.to_string()).unwrap_or_default());
            row.extend(w.unwrap_or_default());
            rows.row(&row)?;
        }
        rows.flush()?;
    }
    let per_t: Vec<_> = ladder
        .iter()
        .zip(&counts)
        .map(|(t, c)| json!({"T": t, "hits": c, "hit_fraction": *c as f64 / cfg.samples as f64}))
        .collect();
    out.summary(
        cfg,
        json!({
            "family": fam.label(),
            "eta": cfg.eta,
            "per_T": per_t,
            "negatives_are_budget_limited": true,
            "approximate": fam.is_approximate(),
        }),
    )
}

pub fn critical_exponent(cfg: &RunConfig) -> Result<(), CliError> {
    let out = OutputDir::create(cfg)?;
    let ladder = ladder(cfg)?;
    let root = root(cfg);
    let fam = family(cfg);
    let mut lad = out.csv("ladder.csv", &["point_id", "T", "max_depth", "eta_reached", "hit"])?;
    let mut est = out.csv("estimates.csv", &["point_id", "eta_lower", "eta_upper", "saturated"])?;
    let mut mids = Vec::new();
    for i in 0..cfg.samples as u64 {
        let x = haar_point(&root, "x", i);
        let e = critical_exponent_estimate(&x, &fam, &ladder, cfg.budget, &root.split_named("crit", i))?;
        for l in &e.ladder {
            lad.row(&[i.to_string(), num(l.radius), num(l.max_depth), num(l.eta_reached), l.hit.to_string()])?;
        }
        est.row(&[i.to_string(), num(e.eta_lower), num(e.eta_upper), e.saturated.to_string()])?;
        lad.flush()?;
        est.flush()?;
        mids.push(0.5 * (e.eta_lower + e.eta_upper));
    }
    out.summary(
        cfg,
        json!({
            "family": fam.label(),
            "median_estimate": quantile(&mids, 0.5),
            "estimates": mids,
            "budget_limited": true,
            "approximate": fam.is_approximate(),
        }),
    )
}

pub fn loglaw(cfg: &RunConfig, point: bool) -> Result<(), CliError> {
    let out = OutputDir::create(cfg)?;
    let ladder = ladder(cfg)?;
    let root = root(cfg);
    let target = if point { BetaTarget::Point { center: LatticePoint::standard() } } else { BetaTarget::Cusp };
    let mut rows = out.csv("series.csv", &["point_id", "T", "raw", "beta", "ratio"])?;
    let mut terminal = Vec::new();
    for i in 0..cfg.samples as u64 {
        let x = haar_point(&root, "x", i);
        let s = beta_series(&x, &target, &ladder, cfg.budget, &root.split_named("beta", i))?;
        for p in &s.points {
            rows.row(&[i.to_string(), num(p.radius), num(p.raw), num(p.beta), num(p.ratio)])?;
        }
        rows.flush()?;
        terminal.extend(s.terminal_ratio());
    }
    let mean = terminal.iter().sum::<f64>() / terminal.len() as f64;
    out.summary(
        cfg,
        json!({
            "target": if point { "point" } else { "cusp" },
            "ratio": if point { "-ln(beta)/ln(T)" } else { "beta/ln(T)" },
            "mean_terminal_ratio": mean,
            "terminal_ratios": terminal,
            "approximate": point,
        }),
    )
}

pub fn met(cfg: &RunConfig) -> Result<(), CliError> {
    let out = OutputDir::create(cfg)?;
    let ladder = ladder(cfg)?;
    let settings =
        MetSettings { n_points: cfg.samples, ball_samples: cfg.ball_samples, mean_samples: cfg.mean_samples };
    let r = met_decay(&cfg.observable, &ladder, &settings, &root(cfg).split_named("met", 0))?;
    let mut rows = out.csv("series.csv", &["T", "measure", "raw_l2", "noise_floor", "l2_error", "half_floor_ratio"])?;
    for p in &r.series {
        rows.row(&[
            num(p.radius),
            num(p.measure),
            num(p.raw_l2),
            num(p.noise_floor),
            num(p.l2_error),
            num(p.half_floor_ratio),
        ])?;
    }
    out.summary(
        cfg,
        json!({
            "observable": r.description,
            "mean": r.mean,
            "kappa": r.kappa,
            "slope": r.fit.map(|f| f.slope),
            "intercept": r.fit.map(|f| f.intercept),
            "residual": r.fit.map(|f| f.residual),
            "errors_decreasing": r.errors_decreasing(),
        }),
    )
}

pub fn measure(cfg: &RunConfig) -> Result<(), CliError> {
    let out = OutputDir::create(cfg)?;
    let ladder = ladder(cfg)?;
    let fam = family(cfg);
    let e = target_measure_estimate(&fam, &ladder, cfg.samples, &root(cfg).split_named("measure", 0))?;
    let mut rows = out.csv("measure.csv", &["t", "hits", "fraction"])?;
    for p in &e.points {
        rows.row(&[num(p.t), p.hits.to_string(), num(p.fraction)])?;
    }
    out.summary(
        cfg,
        json!({
            "family": e.family,
            "n_samples": e.n_samples,
            "slope": e.fit.map(|f| f.slope),
            "intercept": e.fit.map(|f| f.intercept),
            "residual": e.fit.map(|f| f.residual),
            "expected_slope": 0.0 - fam.decay_exponent(),
            "approximate": e.approximate,
        }),
    )
}

pub fn sample(cfg: &RunConfig) -> Result<(), CliError> {
    let out = OutputDir::create(cfg)?;
    let root = root(cfg);
    let cols =
        header(&[&strs(&["sample_id"]), &matrix_header("b"), &strs(&["alpha1", "cusp_distance", "c1", "c2", "c3"])]);
    let mut rows = open_csv(&out, "samples.csv", cols)?;
    let xs = oppenheim_core::experiments::haar_sample_set(cfg.samples, &root.split_named("sample", 0));
    let (mut sum_a, mut sum_d) = (0.0, 0.0);
    for (i, x) in xs.iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(matrix_fields(&x.basis));
        row.extend([num(x.alpha1), num(cusp_distance(x))]);
        row.extend(x.shortest.coeffs.iter().map(|c| c.to_string()));
        rows.row(&row)?;
        sum_a += x.alpha1;
        sum_d += cusp_distance(x);
    }
    let n = xs.len() as f64;
    out.summary(cfg, json!({ "n_samples": xs.len(), "mean_alpha1": sum_a / n, "mean_cusp_distance": sum_d / n }))
}

pub fn selftest(cfg: &RunConfig, corrupt_spin: bool) -> Result<(), CliError> {
    let spin = if corrupt_spin { spin_cover_sign_flipped } else { spin_cover };
    let report = run_selftest(cfg.seed, spin);
    for c in &report.checks {
        println!("{} {:<42} {} [{:.2}s]", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail, c.elapsed);
    }
    match report.first_failure() {
        None => Ok(()),
        Some(c) => Err(CliError::Selftest(format!("{}: {}", c.name, c.detail))),
    }
}
