use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use minimax_resolution::bounds::{
    bound_report, direct_minimax_bound_closed, spade_minimax_bound, MIN_EIGEN_POINTS,
};
use minimax_resolution::estimators::{spade_exact_mse, spade_mean};
use minimax_resolution::model::{fisher_direct, fisher_direct_quadratic_bound, fisher_spade};
use minimax_resolution::simulate::{
    linspace, mse_sweep, scaling_sweep, ScalingPlan, SweepConfig, DEFAULT_SEARCH_SIGMAS,
};
use minimax_resolution::{verify, ImagingConfig, Separation};
use serde::Serialize;
use serde_json::json;

use crate::args::{
    BoundsArgs, FisherArgs, Format, MseExactArgs, ReplayArgs, ScalingArgs, SimulateArgs,
    VerifyArgs,
};
use crate::error::CliError;
use crate::output::{json_text, sidecar, write_text, Cell, RunManifest, Table};

/// Main output text plus any sidecar files keyed by file-name suffix.
struct Rendered {
    main: String,
    sidecars: Vec<(&'static str, String)>,
}

impl Rendered {
    fn single(main: String) -> Self {
        Self { main, sidecars: Vec::new() }
    }
}

fn render_table(table: &Table, format: Format) -> Result<Rendered, CliError> {
    Ok(Rendered::single(match format {
        Format::Csv => table.to_csv(),
        Format::Json => json_text(&table.to_json())?,
    }))
}

fn emit<P: Serialize>(
    command: &str,
    params: &P,
    out: Option<&Path>,
    rendered: Rendered,
) -> Result<(), CliError> {
    write_text(out, &rendered.main)?;
    for (suffix, text) in &rendered.sidecars {
        match out {
            Some(p) => write_text(Some(&sidecar(p, suffix)), text)?,
            None => eprint!("{text}"),
        }
    }
    if let Some(p) = out {
        RunManifest::new(command, params)?.write_beside(p)?;
    }
    Ok(())
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::Usage(format!("--{name} must be positive and finite, got {x}")))
    }
}

fn theta_grid(theta_max: Option<f64>, points: usize, min_points: usize) -> Result<Vec<f64>, CliError> {
    let hi = positive("theta-max", theta_max.expect("resolved"))?;
    if points < min_points {
        return Err(CliError::Usage(format!("--theta-points must be at least {min_points}")));
    }
    Ok(linspace(0.0, hi, points))
}

pub fn fisher(args: FisherArgs) -> Result<(), CliError> {
    let args = args.resolve();
    let cfg = ImagingConfig::new(positive("sigma", args.sigma)?, args.photons)?;
    let grid = theta_grid(args.theta_max, args.theta_points, 2)?;
    let j_spade = fisher_spade(&cfg);

    let mut table = Table::new(&["theta", "J_direct", "J_spade", "J_quadratic_bound", "J_normalized_direct"]);
    for &t in &grid {
        let theta = Separation::new(t)?;
        let j = fisher_direct(&cfg, theta)?;
        table.push(vec![
            Cell::Float(t),
            Cell::Float(j),
            Cell::Float(j_spade),
            Cell::Float(fisher_direct_quadratic_bound(&cfg, theta)),
            Cell::Float(j / j_spade),
        ]);
    }
    let rendered = render_table(&table, args.output.format)?;
    emit("fisher", &args, args.output.out.as_deref(), rendered)
}

pub fn bounds(args: BoundsArgs) -> Result<(), CliError> {
    let args = args.resolve();
    let cfg = ImagingConfig::new(positive("sigma", args.sigma)?, args.photons)?;
    let domain = positive("domain", args.domain.expect("resolved"))?;
    if args.grid_n < MIN_EIGEN_POINTS {
        return Err(CliError::Usage(format!("--grid-n must be at least {MIN_EIGEN_POINTS}")));
    }
    let report = bound_report(&cfg, domain, args.grid_n)?;

    let rendered = match args.output.format {
        Format::Json => Rendered::single(json_text(&report)?),
        Format::Csv => {
            let mut table = Table::new(&["method", "K", "bound"]);
            let bounds = [
                report.spade_bound,
                report.direct_closed_bound,
                report.direct_numeric_bound,
            ];
            let labels = [
                minimax_resolution::bounds::LABEL_CLOSED_SPADE,
                minimax_resolution::bounds::LABEL_CLOSED_DIRECT,
                minimax_resolution::bounds::LABEL_EIGENSOLVER_DIRECT,
            ];
            for (label, bound) in labels.into_iter().zip(bounds) {
                table.push(vec![
                    Cell::Text(label.to_string()),
                    Cell::Float(report.k_values[label]),
                    Cell::Float(bound),
                ]);
            }
            Rendered::single(table.to_csv())
        }
    };
    emit("bounds", &args, args.output.out.as_deref(), rendered)
}

pub fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let args = args.resolve();
    let sigma = positive("sigma", args.sigma)?;
    let cfg = ImagingConfig::new(sigma, args.photons)?;
    let grid = theta_grid(args.theta_max, args.theta_points, 1)?;
    let theta_max = *grid.last().expect("non-empty grid");
    let mut sw = SweepConfig::new(cfg, grid, args.trials, args.seed, args.estimators.clone())?;
    sw.search_max = sw.search_max.max(theta_max + 4.0 * sigma).max(DEFAULT_SEARCH_SIGMAS * sigma);
    let curves = mse_sweep(&sw)?;

    let mut table = Table::new(&["estimator", "theta", "mse", "mse_normalized", "std_err", "bias", "trials"]);
    for curve in &curves {
        let normalized = curve.normalized(&cfg);
        for i in 0..curve.len() {
            table.push(vec![
                Cell::Text(curve.kind.name().to_string()),
                Cell::Float(curve.theta[i]),
                Cell::Float(curve.mse[i]),
                Cell::Float(normalized[i]),
                Cell::Float(curve.std_err[i]),
                Cell::Float(curve.bias[i]),
                Cell::Int(curve.trials),
            ]);
        }
    }
    let rendered = render_table(&table, args.output.format)?;
    emit("simulate", &args, args.output.out.as_deref(), rendered)
}

pub fn scaling(args: ScalingArgs) -> Result<(), CliError> {
    let sigma = positive("sigma", args.sigma)?;
    if args.photons.len() < 3 {
        return Err(CliError::Usage("--photons needs at least 3 values".into()));
    }
    if args.photons.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Usage("--photons must be strictly increasing".into()));
    }
    if args.theta_points.is_some_and(|n| n < 2) {
        return Err(CliError::Usage("--theta-points must be at least 2".into()));
    }
    let plan = ScalingPlan {
        sigma,
        photons: args.photons.clone(),
        kinds: args.estimators.clone(),
        trials: args.trials,
        seed: args.seed,
        theta_points: args.theta_points,
    };
    let results = scaling_sweep(&plan)?;

    let mut table = Table::new(&[
        "estimator",
        "photons",
        "sup_theta",
        "sup_mse",
        "sup_std_err",
        "bcrb_spade",
        "bcrb_direct",
    ]);
    let mut slopes = BTreeMap::new();
    for r in &results {
        for (i, &photons) in r.photons.iter().enumerate() {
            let cfg = ImagingConfig::new(sigma, photons)?;
            table.push(vec![
                Cell::Text(r.kind.name().to_string()),
                Cell::Int(photons),
                Cell::Float(r.sup_theta[i]),
                Cell::Float(r.sup_mse[i]),
                Cell::Float(r.sup_std_err[i]),
                Cell::Float(spade_minimax_bound(&cfg)),
                Cell::Float(direct_minimax_bound_closed(&cfg)),
            ]);
        }
        slopes.insert(r.kind.name(), json!({ "slope": r.slope, "intercept": r.intercept }));
    }

    let rendered = match args.output.format {
        Format::Csv => Rendered {
            main: table.to_csv(),
            sidecars: vec![(".slopes.json", json_text(&slopes)?)],
        },
        Format::Json => Rendered::single(json_text(&json!({
            "rows": table.to_json(),
            "slopes": slopes,
        }))?),
    };
    emit("scaling", &args, args.output.out.as_deref(), rendered)
}

pub fn mse_exact(args: MseExactArgs) -> Result<(), CliError> {
    let args = args.resolve();
    let cfg = ImagingConfig::new(positive("sigma", args.sigma)?, args.photons)?;
    let grid = theta_grid(args.theta_max, args.theta_points, 1)?;
    if let Some(k) = args.estimators.iter().find(|k| !k.is_spade()) {
        return Err(CliError::Usage(format!("{k} has no exact risk; use simulate")));
    }
    let scale = cfg.photons_f64() / (4.0 * cfg.sigma() * cfg.sigma());

    let mut table = Table::new(&["estimator", "theta", "mu", "mse", "mse_normalized"]);
    for &kind in &args.estimators {
        for &t in &grid {
            let theta = Separation::new(t)?;
            let mse = spade_exact_mse(&cfg, theta, kind)?;
            table.push(vec![
                Cell::Text(kind.name().to_string()),
                Cell::Float(t),
                Cell::Float(spade_mean(&cfg, theta)),
                Cell::Float(mse),
                Cell::Float(mse * scale),
            ]);
        }
    }
    let rendered = render_table(&table, args.output.format)?;
    emit("mse-exact", &args, args.output.out.as_deref(), rendered)
}

pub fn verify(args: VerifyArgs) -> Result<(), CliError> {
    let outcomes = verify::run_all(args.seed);
    let mut failed = 0;
    for c in &outcomes {
        println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    if failed > 0 {
        Err(CliError::Verify(failed))
    } else {
        Ok(())
    }
}

pub fn replay(args: ReplayArgs) -> Result<(), CliError> {
    let manifest = RunManifest::load(&args.manifest)?;
    if manifest.version != env!("CARGO_PKG_VERSION") {
        eprintln!(
            "warning: manifest written by version {}, replaying with {}",
            manifest.version,
            env!("CARGO_PKG_VERSION")
        );
    }
    let out: Option<PathBuf> = args.out;
    let params = manifest.params;
    let bad = |e: serde_json::Error| CliError::Usage(format!("manifest parameters: {e}"));
    match manifest.command.as_str() {
        "fisher" => {
            let mut a: FisherArgs = serde_json::from_value(params).map_err(bad)?;
            a.output.out = out;
            fisher(a)
        }
        "bounds" => {
            let mut a: BoundsArgs = serde_json::from_value(params).map_err(bad)?;
            a.output.out = out;
            bounds(a)
        }
        "simulate" => {
            let mut a: SimulateArgs = serde_json::from_value(params).map_err(bad)?;
            a.output.out = out;
            simulate(a)
        }
        "scaling" => {
            let mut a: ScalingArgs = serde_json::from_value(params).map_err(bad)?;
            a.output.out = out;
            scaling(a)
        }
        "mse-exact" => {
            let mut a: MseExactArgs = serde_json::from_value(params).map_err(bad)?;
            a.output.out = out;
            mse_exact(a)
        }
        other => Err(CliError::Usage(format!("manifest names unknown command '{other}'"))),
    }
}
