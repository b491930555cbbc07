//! Subcommand implementations. Every command returns whether any
//! contract-violation flag was raised (mapped to exit code 2).

use anyhow::{Context, Result};
use std::fs;

use needlelab::deficit::{self, DeficitReport};
use needlelab::ensemble::NeedleEnsemble;
use needlelab::files::{EnsembleFile, ProductFile, WeightFamilyFile};
use needlelab::gauss::GaussianModel;
use needlelab::interval::Interval;
use needlelab::measure::{NeedleMeasure, Side};
use needlelab::product::{Perturbation, ProductSpec, SweepRow};
use needlelab::profile::{gap_lower_bound, BoundedProfileQuery};
use needlelab::weight::ConvexWeight;

use crate::output::{fmt_f64, parallel_map, Format, Sink};
use crate::svg::{Plot, Series};
use crate::{Cli, Command};

pub fn run(cli: Cli) -> Result<bool> {
    let sink = Sink::new(cli.out_dir.clone(), &cli.formats)?;
    let jobs = cli.jobs;
    match cli.command {
        Command::Profile {
            k,
            d_list,
            theta_grid,
        } => profile(&sink, jobs, k, &d_list, theta_grid),
        Command::NeedleReport {
            weights,
            name,
            theta,
            grid,
        } => needle_report(&sink, &weights, name.as_deref(), theta, grid),
        Command::DeficitSweep {
            theta,
            kink,
            intensity_list,
            grid,
        } => deficit_sweep(&sink, jobs, theta, kink, &intensity_list, grid),
        Command::RevpoincareSweep {
            theta,
            kink,
            intensity_list,
        } => revpoincare_sweep(&sink, jobs, theta, kink, &intensity_list),
        Command::EnsembleRun { file } => ensemble_run(&sink, &file),
        Command::ProductSim {
            fibers,
            theta,
            perturbation,
            intensity_list,
            slack,
            config,
        } => {
            let (spec, intensities) = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    let file = ProductFile::parse(&text)?;
                    (file.to_spec()?, file.intensities.clone())
                }
                None => {
                    let kind: Perturbation = perturbation.parse::<Perturbation>()?;
                    (
                        ProductSpec::uniform(fibers, theta, kind, slack)?,
                        intensity_list,
                    )
                }
            };
            product_sim(&sink, jobs, &spec, &intensities)
        }
        Command::LsiWitness {
            fibers,
            theta,
            intensity,
            lambda_margin,
            sigma,
            eps_list,
            shift_list,
        } => lsi_witness(
            &sink,
            fibers,
            theta,
            intensity,
            lambda_margin,
            sigma,
            &eps_list,
            &shift_list,
        ),
    }
}

fn profile(sink: &Sink, jobs: usize, k: f64, d_list: &[f64], theta_grid: usize) -> Result<bool> {
    anyhow::ensure!(theta_grid >= 1, "theta grid needs at least one point");
    let model = GaussianModel::new(k)?;
    let thetas: Vec<f64> = (1..=theta_grid)
        .map(|i| i as f64 / (theta_grid + 1) as f64)
        .collect();
    let mut rows = Vec::new();
    for &d in d_list {
        let bound = gap_lower_bound(k, d);
        let per_theta = parallel_map(thetas.len(), jobs, |i| {
            let theta = thetas[i];
            let query = BoundedProfileQuery::new(k, d, theta)?;
            let unbounded = model.profile_inf(theta)?;
            let (value, xi) = query.profile_d()?;
            Ok::<_, needlelab::Error>((theta, unbounded, value, xi))
        });
        for item in per_theta {
            let (theta, unbounded, value, xi) = item?;
            rows.push(vec![
                fmt_f64(theta),
                fmt_f64(d),
                fmt_f64(unbounded),
                fmt_f64(value),
                fmt_f64(xi),
                fmt_f64(value - unbounded),
                fmt_f64(bound),
            ]);
        }
    }
    sink.csv(
        "profile",
        "needlelab/profile/1",
        &[
            "theta",
            "d",
            "i_inf",
            "i_d",
            "xi_argmin",
            "gap",
            "gap_bound",
        ],
        &rows,
    )?;
    let json_rows: Vec<serde_json::Value> = rows
        .iter()
        .map(|r| {
            serde_json::json!({
                "theta": r[0], "d": r[1], "i_inf": r[2], "i_d": r[3],
                "xi_argmin": r[4], "gap": r[5], "gap_bound": r[6],
            })
        })
        .collect();
    sink.json("profile", &serde_json::json!({ "rows": json_rows }))?;
    sink.meta("profile", "profile")?;
    Ok(false)
}

/// The documented deficit row: theta, a_theta, delta, alpha, T, S, tail_T,
/// tail_S, lower_margin, upper_margin, rp_ratio.
fn deficit_row(
    label: String,
    report: &DeficitReport,
    margins: (f64, f64),
    rp_ratio: f64,
) -> Vec<String> {
    vec![
        label,
        fmt_f64(report.theta),
        fmt_f64(report.a_theta),
        fmt_f64(report.delta),
        fmt_f64(report.alpha),
        fmt_f64(report.t_cut),
        fmt_f64(report.s_cut),
        fmt_f64(report.tail_t),
        fmt_f64(report.tail_s),
        fmt_f64(margins.0),
        fmt_f64(margins.1),
        fmt_f64(rp_ratio),
        (if report.in_regime { "1" } else { "0" }).to_string(),
    ]
}

const DEFICIT_HEADER: [&str; 13] = [
    "label",
    "theta",
    "a_theta",
    "delta",
    "alpha",
    "T",
    "S",
    "tail_T",
    "tail_S",
    "lower_margin",
    "upper_margin",
    "rp_ratio",
    "in_regime",
];

fn analyze_needle(
    m: &NeedleMeasure,
    theta: f64,
    grid_step: f64,
) -> Result<(DeficitReport, (f64, f64), f64)> {
    let oriented = deficit::orient_for_theta(m, theta)?;
    let report = deficit::deficit_report(&oriented, theta)?;
    let grid = deficit::envelope_grid(&oriented, grid_step);
    let margins = deficit::envelope_check(&oriented, &report, &grid);
    let rp_ratio = deficit::reverse_poincare_needle(&oriented);
    Ok((report, margins, rp_ratio))
}

fn needle_report(
    sink: &Sink,
    weights: &std::path::Path,
    name: Option<&str>,
    theta: f64,
    grid: f64,
) -> Result<bool> {
    let text =
        fs::read_to_string(weights).with_context(|| format!("reading {}", weights.display()))?;
    let family = WeightFamilyFile::parse(&text)?;
    let records: Vec<_> = match name {
        Some(n) => vec![family.find(n)?.clone()],
        None => family.weight.clone(),
    };
    let mut rows = Vec::new();
    let mut flagged = false;
    let mut json_rows = Vec::new();
    for rec in &records {
        let m = rec.to_measure()?;
        let (report, margins, rp) = analyze_needle(&m, theta, grid)?;
        flagged |= !report.is_valid() || rp > 1.0 + 1e-9;
        rows.push(deficit_row(rec.name.clone(), &report, margins, rp));
        json_rows.push(serde_json::json!({
            "name": rec.name,
            "theta": report.theta,
            "a_theta": report.a_theta,
            "delta": report.delta,
            "alpha": report.alpha,
            "t_cut": report.t_cut,
            "s_cut": report.s_cut,
            "tail_t": report.tail_t,
            "tail_s": report.tail_s,
            "lower_margin": margins.0,
            "upper_margin": margins.1,
            "rp_ratio": rp,
            "in_regime": report.in_regime,
            "valid": report.is_valid(),
        }));
    }
    sink.csv(
        "needle_report",
        "needlelab/deficit/1",
        &DEFICIT_HEADER,
        &rows,
    )?;
    sink.json("needle_report", &serde_json::json!({ "rows": json_rows }))?;
    sink.meta("needle_report", "needle-report")?;
    Ok(flagged)
}

fn hinge_needle(kink: f64, t: f64) -> needlelab::Result<NeedleMeasure> {
    NeedleMeasure::normalize(Interval::real_line(), ConvexWeight::hinge(kink, t)?)
}

fn deficit_sweep(
    sink: &Sink,
    jobs: usize,
    theta: f64,
    kink: f64,
    intensities: &[f64],
    grid: f64,
) -> Result<bool> {
    let results = parallel_map(intensities.len(), jobs, |i| {
        let t = intensities[i];
        let m = hinge_needle(kink, t)?;
        analyze_needle(&m, theta, grid)
    });
    let mut rows = Vec::new();
    let mut flagged = false;
    let mut margin_pts = Vec::new();
    for (i, item) in results.into_iter().enumerate() {
        let (report, margins, rp) = item?;
        flagged |= !report.is_valid() || rp > 1.0 + 1e-9;
        rows.push(deficit_row(fmt_f64(intensities[i]), &report, margins, rp));
        if report.delta > 0.0 {
            margin_pts.push((report.delta.log10(), margins.1));
        }
    }
    sink.csv(
        "deficit_sweep",
        "needlelab/deficit/1",
        &DEFICIT_HEADER,
        &rows,
    )?;
    sink.json(
        "deficit_sweep",
        &serde_json::json!({
            "theta": theta,
            "kink": kink,
            "intensities": intensities,
            "rows": rows,
        }),
    )?;
    if sink.wants(Format::Svg) {
        let plot = Plot {
            title: "scaled upper envelope along the hinge family",
            x_label: "log10(delta)",
            y_label: "sup (rho - alpha x) / sqrt(delta) on [S,T]",
            series: vec![Series {
                label: "upper margin",
                points: margin_pts,
                color: "#c0392b",
            }],
        };
        sink.svg("deficit_sweep", plot.render())?;
    }
    sink.meta("deficit_sweep", "deficit-sweep")?;
    Ok(flagged)
}

fn revpoincare_sweep(
    sink: &Sink,
    jobs: usize,
    theta: f64,
    kink: f64,
    intensities: &[f64],
) -> Result<bool> {
    let results = parallel_map(intensities.len(), jobs, |i| {
        let t = intensities[i];
        let m = hinge_needle(kink, t)?;
        let oriented = deficit::orient_for_theta(&m, theta)?;
        let report = deficit::deficit_report(&oriented, theta)?;
        let ratio = deficit::reverse_poincare_needle(&oriented);
        Ok::<_, needlelab::Error>((report.delta, ratio))
    });
    let mut rows = Vec::new();
    let mut pts = Vec::new();
    let mut flagged = false;
    for (i, item) in results.into_iter().enumerate() {
        let (delta, ratio) = item?;
        flagged |= ratio > 1.0 + 1e-9;
        rows.push(vec![
            fmt_f64(intensities[i]),
            fmt_f64(delta),
            fmt_f64(ratio),
            fmt_f64(1.0 - ratio),
        ]);
        if delta > 0.0 && ratio < 1.0 {
            pts.push((delta.ln(), (1.0 - ratio).ln()));
        }
    }
    let slope = regression_slope(&pts);
    sink.csv(
        "revpoincare_sweep",
        "needlelab/revpoincare/1",
        &["intensity", "delta", "ratio", "gap"],
        &rows,
    )?;
    sink.json(
        "revpoincare_sweep",
        &serde_json::json!({
            "theta": theta,
            "kink": kink,
            "rows": rows,
            "loglog_slope": slope,
        }),
    )?;
    if sink.wants(Format::Svg) {
        let plot = Plot {
            title: "reverse Poincaré gap against deficit (log-log)",
            x_label: "ln(delta)",
            y_label: "ln(1 - ratio)",
            series: vec![Series {
                label: "hinge family",
                points: pts,
                color: "#2980b9",
            }],
        };
        sink.svg("revpoincare_sweep", plot.render())?;
    }
    sink.meta("revpoincare_sweep", "revpoincare-sweep")?;
    Ok(flagged)
}

pub fn regression_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn ensemble_summary(
    ensemble: &NeedleEnsemble,
) -> Result<(serde_json::Value, Vec<Vec<String>>, bool)> {
    let centered = ensemble.center_guiding();
    let gp = centered.reverse_poincare_global();
    let report = centered.classify()?;
    let (delta_a, per_needle) = centered.deficit_decomposition();
    let theta = centered.theta();
    let main = if (theta - 0.5).abs() < 1e-12 {
        None
    } else {
        Some(centered.main_symdiff()?)
    };
    let min_side = if (theta - 0.5).abs() < 1e-12 {
        None
    } else {
        Some(centered.min_side_mass(&report)?)
    };
    let flagged = gp.contract_violation
        || !report.long_mass_check
        || !report.aligned_mass_check
        || !report.centered_mass_check;

    let mut rows = Vec::new();
    for (q, e) in centered.entries().iter().enumerate() {
        let r_minus = e.needle.quantile_r(theta, Side::Minus)?;
        let r_plus = e.needle.quantile_r(theta, Side::Plus)?;
        rows.push(vec![
            q.to_string(),
            fmt_f64(e.nu),
            fmt_f64(e.offset),
            fmt_f64(per_needle[q]),
            fmt_f64(r_minus + e.offset),
            fmt_f64(r_plus + e.offset),
            (if report.q_long.contains(&q) { "1" } else { "0" }).to_string(),
            (if report.q_minus.contains(&q) {
                "1"
            } else {
                "0"
            })
            .to_string(),
            (if report.q_plus.contains(&q) { "1" } else { "0" }).to_string(),
            (if report.q_centered.contains(&q) {
                "1"
            } else {
                "0"
            })
            .to_string(),
        ]);
    }
    let summary = serde_json::json!({
        "theta": theta,
        "slack": centered.slack(),
        "global_perimeter": centered.global_perimeter(),
        "delta_a": delta_a,
        "variance": gp.variance,
        "energy": gp.energy,
        "ratio": gp.ratio,
        "mean_sq_integral": gp.mean_sq_integral,
        "poincare_flagged": gp.contract_violation,
        "nu_long": report.nu_long,
        "nu_minus": report.nu_minus,
        "nu_plus": report.nu_plus,
        "nu_centered": report.nu_centered,
        "long_mass_check": report.long_mass_check,
        "aligned_mass_check": report.aligned_mass_check,
        "centered_mass_check": report.centered_mass_check,
        "main_symdiff_side": main.map(|(side, _)| side_name(side)),
        "main_symdiff": main.map(|(_, v)| v),
        "min_side": min_side.map(|(v, _)| v),
        "coarea_slice_bound": min_side.map(|(_, v)| v),
    });
    Ok((summary, rows, flagged))
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Minus => "minus",
        Side::Plus => "plus",
    }
}

const ENSEMBLE_HEADER: [&str; 10] = [
    "q",
    "nu",
    "offset",
    "needle_deficit",
    "r_minus_global",
    "r_plus_global",
    "long",
    "minus",
    "plus",
    "centered",
];

fn ensemble_run(sink: &Sink, file: &std::path::Path) -> Result<bool> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let parsed = EnsembleFile::parse(&text)?;
    let ensemble = parsed.to_ensemble()?;
    let (summary, rows, flagged) = ensemble_summary(&ensemble)?;
    sink.csv(
        "ensemble_run",
        "needlelab/ensemble/1",
        &ENSEMBLE_HEADER,
        &rows,
    )?;
    sink.json("ensemble_run", &summary)?;
    sink.meta("ensemble_run", "ensemble-run")?;
    Ok(flagged)
}

fn sweep_row_values(row: &SweepRow) -> Vec<String> {
    vec![
        fmt_f64(row.intensity),
        fmt_f64(row.delta_a),
        fmt_f64(row.symdiff),
        side_name(row.side).to_string(),
        fmt_f64(row.ratio),
        fmt_f64(row.mean_sq_integral),
        fmt_f64(row.min_side),
        fmt_f64(row.slice_bound),
        fmt_f64(row.nu_long),
        (if row.long_check { "1" } else { "0" }).to_string(),
        (if row.aligned_check { "1" } else { "0" }).to_string(),
        (if row.centered_check { "1" } else { "0" }).to_string(),
        (if row.poincare_flagged { "1" } else { "0" }).to_string(),
    ]
}

const SWEEP_HEADER: [&str; 13] = [
    "intensity",
    "delta_a",
    "symdiff",
    "side",
    "ratio",
    "mean_sq_integral",
    "min_side",
    "slice_bound",
    "nu_long",
    "long_check",
    "aligned_check",
    "centered_check",
    "poincare_flagged",
];

fn product_sim(sink: &Sink, jobs: usize, spec: &ProductSpec, intensities: &[f64]) -> Result<bool> {
    // validate the schedule once through the library path
    for w in intensities.windows(2) {
        anyhow::ensure!(w[1] < w[0], "intensities must be strictly decreasing");
    }
    let results = parallel_map(intensities.len(), jobs, |i| spec.run(intensities[i]));
    let mut rows = Vec::new();
    let mut flagged = false;
    let mut pts = Vec::new();
    let mut parsed_rows = Vec::new();
    for item in results {
        let row = item?;
        flagged |=
            row.poincare_flagged || !row.long_check || !row.aligned_check || !row.centered_check;
        if row.delta_a > 0.0 && row.symdiff > 0.0 {
            pts.push((row.delta_a.ln(), row.symdiff.ln()));
        }
        rows.push(sweep_row_values(&row));
        parsed_rows.push(row);
    }
    sink.csv(
        "product_sim",
        "needlelab/product-sim/1",
        &SWEEP_HEADER,
        &rows,
    )?;
    sink.json(
        "product_sim",
        &serde_json::json!({
            "theta": spec.theta,
            "fibers": spec.fiber_weights.len(),
            "slack": spec.slack,
            "rows": rows,
            "loglog_slope": regression_slope(&pts),
        }),
    )?;
    if sink.wants(Format::Svg) {
        let plot = Plot {
            title: "symmetric difference against deficit (log-log)",
            x_label: "ln(delta_A)",
            y_label: "ln(symdiff)",
            series: vec![Series {
                label: "sweep",
                points: pts,
                color: "#27ae60",
            }],
        };
        sink.svg("product_sim", plot.render())?;
    }
    sink.meta("product_sim", "product-sim")?;
    let _ = parsed_rows;
    Ok(flagged)
}

#[allow(clippy::too_many_arguments)]
fn lsi_witness(
    sink: &Sink,
    fibers: usize,
    theta: f64,
    intensity: f64,
    lambda_margin: f64,
    sigma: f64,
    eps_list: &[f64],
    shift_list: &[f64],
) -> Result<bool> {
    let spec = ProductSpec::uniform(fibers, theta, Perturbation::Hinge, 0.0)?;
    let ensemble = spec.build(intensity)?.center_guiding();
    let gp = ensemble.reverse_poincare_global();
    let lambda = lambda_margin / gp.ratio;

    let mut rows = Vec::new();
    let mut held = 0usize;
    let mut tried = 0usize;
    for &eps in eps_list {
        match ensemble.lsi_witness(sigma, eps, lambda) {
            Ok(w) => {
                tried += 1;
                held += usize::from(w.holds);
                rows.push(vec![
                    fmt_f64(eps),
                    fmt_f64(w.lhs),
                    fmt_f64(w.rhs),
                    (if w.holds { "1" } else { "0" }).to_string(),
                    fmt_f64(w.h_sup),
                ]);
            }
            Err(_) => {
                // amplitude out of range for this truncation level
                rows.push(vec![
                    fmt_f64(eps),
                    "".into(),
                    "".into(),
                    "out-of-range".into(),
                    "".into(),
                ]);
            }
        }
    }
    sink.csv(
        "lsi_witness",
        "needlelab/lsi-witness/1",
        &["eps_amp", "lhs", "rhs", "holds", "h_sup"],
        &rows,
    )?;

    // Gaussian-shift Talagrand checks via the quantile coupling
    let gauss = NeedleMeasure::standard_gaussian();
    let mut shift_rows = Vec::new();
    for &s in shift_list {
        let w = deficit::talagrand_witness(&gauss, move |x| (s * x - 0.5 * s * s).exp(), 1.0)?;
        shift_rows.push(vec![
            fmt_f64(s),
            fmt_f64(w.w2_sq),
            fmt_f64(w.ent),
            (if w.holds { "1" } else { "0" }).to_string(),
        ]);
    }
    sink.csv(
        "talagrand_shift",
        "needlelab/talagrand/1",
        &["shift", "w2_sq", "ent", "holds"],
        &shift_rows,
    )?;
    sink.json(
        "lsi_witness",
        &serde_json::json!({
            "theta": theta,
            "intensity": intensity,
            "ratio": gp.ratio,
            "lambda": lambda,
            "eps_tried": tried,
            "eps_held": held,
            "rows": rows,
            "talagrand": shift_rows,
        }),
    )?;
    sink.meta("lsi_witness", "lsi-witness")?;
    Ok(tried > 0 && held == 0)
}
