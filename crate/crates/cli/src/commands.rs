//! Subcommand bodies. Each returns a [`Failure`] carrying its exit code.

use std::fs;
use std::io::Write;
use std::path::Path;

use fracgp::estimators;
use fracgp::io::{self, ReplicateRecord, SimulationMetadata};
use fracgp::oracle::{self, DriftSign, KernelFamily, LatticeCase, QuadratureConfig};
use fracgp::process::{ProcessSpec, Profile};
use fracgp::sampler::{derive_subseed, Sampler, TimeGrid};
use rayon::prelude::*;

use crate::{
    CovarianceArgs, EstimateArgs, Failure, SimulateArgs, VerifyArgs, EXIT_DISAGREEMENT, EXIT_ESTIMATE, EXIT_IO,
    EXIT_KERNEL, EXIT_SAMPLER, EXIT_USAGE,
};

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::new(EXIT_IO, "io", format!("cannot write {}: {e}", path.display())))
}

fn emit(target: &str, contents: &str) -> Result<(), Failure> {
    if target == "-" {
        std::io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|e| Failure::new(EXIT_IO, "io", format!("cannot write stdout: {e}")))
    } else {
        write_file(Path::new(target), contents)
    }
}

fn json<T: serde::Serialize>(body: &T) -> Result<String, Failure> {
    io::to_json(body).map_err(|e| Failure::from_core(EXIT_IO, e))
}

pub fn simulate(a: &SimulateArgs) -> Result<(), Failure> {
    let spec = a.spec.spec()?;
    let grid = a.grid.grid()?;
    if a.replicates == 0 {
        return Err(Failure::usage("--replicates must be at least 1"));
    }
    let sampler = match a.method.as_str() {
        "auto" => Sampler::new(&spec, &grid),
        "cholesky" => Sampler::cholesky(&spec, &grid),
        "circulant" => Sampler::circulant(&spec, &grid),
        other => return Err(Failure::usage(format!("unknown method `{other}`"))),
    }
    .map_err(|e| Failure::from_core(EXIT_SAMPLER, e))?;
    fs::create_dir_all(&a.out_dir)
        .map_err(|e| Failure::new(EXIT_IO, "io", format!("cannot create {}: {e}", a.out_dir.display())))?;

    let times = grid.times();
    let seeds: Vec<u64> = (0..a.replicates as u64).map(|i| derive_subseed(a.seed, i)).collect();
    let width = 3.max(a.replicates.saturating_sub(1).to_string().len());
    let mut records = Vec::with_capacity(seeds.len());
    // generate in parallel, write from this thread only
    for (c, chunk) in seeds.chunks(64).enumerate() {
        let paths: Vec<String> =
            chunk.par_iter().map(|&s| io::path_csv(&times, &sampler.sample_values(s))).collect();
        for (k, (csv, &seed)) in paths.iter().zip(chunk).enumerate() {
            let file = format!("path_{:0width$}.csv", c * 64 + k);
            write_file(&a.out_dir.join(&file), csv)?;
            records.push(ReplicateRecord { file, seed });
        }
    }
    let meta = SimulationMetadata {
        spec,
        grid,
        seed: a.seed,
        method: sampler.method(),
        diagnostics: sampler.diagnostics().clone(),
        replicates: records,
    };
    write_file(&a.out_dir.join("metadata.json"), &json(&meta)?)
}

pub fn covariance(a: &CovarianceArgs) -> Result<(), Failure> {
    let spec = a.spec.spec()?;
    let grid = a.grid.grid()?;
    let times = grid.times();
    let cfg = QuadratureConfig::default();
    let n = times.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| oracle::covariance_or_oracle(&spec, times[i], times[j], &cfg))
                .collect::<fracgp::error::Result<Vec<f64>>>()
        })
        .collect::<fracgp::error::Result<_>>()
        .map_err(|e| Failure::from_core(EXIT_KERNEL, e))?;
    emit(&a.output, &io::covariance_csv(&times, |i, j| rows[i][j]))
}

pub fn estimate(a: &EstimateArgs) -> Result<(), Failure> {
    let fail = |e| Failure::from_core(EXIT_ESTIMATE, e);
    let file = fs::File::open(&a.input)
        .map_err(|e| Failure::new(EXIT_ESTIMATE, "io", format!("cannot open {}: {e}", a.input.display())))?;
    let (times, values) = io::read_path_csv(file).map_err(fail)?;
    let report = match a.estimator.as_str() {
        "hurst" => {
            let scales = a.scales.clone().unwrap_or_else(|| estimators::default_scales(values.len()));
            estimators::hurst_aggregated_variance(&values, &scales)
        }
        "holder" => estimators::local_holder(&times, &values, a.window),
        "lrd" => {
            if a.difference {
                let inc: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
                estimators::lrd_periodogram(&inc, a.low_freq_fraction)
            } else {
                estimators::lrd_periodogram(&values, a.low_freq_fraction)
            }
        }
        other => return Err(Failure::usage(format!("unknown estimator `{other}`"))),
    }
    .map_err(fail)?;
    emit(&a.output, &json(&report)?)
}

/// Lattice parameters for a fixed spec, if the family has a closed form.
fn lattice_params(spec: &ProcessSpec) -> Result<(KernelFamily, Vec<f64>), Failure> {
    let constant = |p: &Profile| p.is_constant().then(|| p.eval(0.0));
    let unsupported =
        || Failure::usage(format!("verify needs --family for {} with these parameters", spec.name()));
    Ok(match spec {
        ProcessSpec::Fbm { hurst } => (KernelFamily::Fbm, vec![*hurst]),
        ProcessSpec::RlFbm { hurst } => (KernelFamily::RlFbm, vec![*hurst]),
        ProcessSpec::RlMbm { hurst } => {
            let h = constant(&hurst.0).ok_or_else(unsupported)?;
            (KernelFamily::RlMbm, vec![h, h])
        }
        ProcessSpec::WeylFou { alpha, omega } => (KernelFamily::WeylFou, vec![*alpha, *omega]),
        ProcessSpec::RlFou { alpha, omega } => (KernelFamily::RlFou, vec![*alpha, *omega]),
        ProcessSpec::WeylMou { alpha, omega } => {
            let a = constant(&alpha.0).ok_or_else(unsupported)?;
            (KernelFamily::WeylMou, vec![a, a, *omega])
        }
        ProcessSpec::RlMou { alpha, omega } => {
            let a = constant(&alpha.0).ok_or_else(unsupported)?;
            (KernelFamily::RlMou, vec![a, a, *omega])
        }
        ProcessSpec::Frbm { alpha, gamma, omega } => (KernelFamily::Frbm, vec![*alpha, *gamma, *omega]),
        ProcessSpec::Mrbm { alpha, gamma, omega } => {
            let a = constant(alpha).ok_or_else(unsupported)?;
            let g = constant(gamma).ok_or_else(unsupported)?;
            (KernelFamily::Frbm, vec![a, g, *omega])
        }
        ProcessSpec::Gc { alpha, beta } => (KernelFamily::Gc, vec![*alpha, *beta]),
        ProcessSpec::Mbm { .. } => return Err(unsupported()),
    })
}

fn grid_cases(family: KernelFamily, params: &[f64], grid: &TimeGrid) -> Vec<LatticeCase> {
    let times = grid.times();
    let mut cases = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        for &s in &times[..=i] {
            cases.push(LatticeCase { family, params: params.to_vec(), t, s });
        }
    }
    cases
}

pub fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    let mut cfg = QuadratureConfig::default();
    if let Some(r) = a.rel_tol {
        cfg.rel_tol = r;
    }
    if let Some(t) = a.abs_tol {
        cfg.abs_tol = t;
    }
    cfg.validate().map_err(|e| Failure::from_core(EXIT_USAGE, e))?;
    if !a.perturb.is_finite() {
        return Err(Failure::usage("--perturb must be finite"));
    }

    let (family, cases) = match &a.family {
        Some(name) => {
            if a.spec.is_given() {
                return Err(Failure::usage("--family cannot be combined with a process spec"));
            }
            let family =
                KernelFamily::from_name(name).ok_or_else(|| Failure::usage(format!("unknown family `{name}`")))?;
            if a.points == 0 {
                return Err(Failure::usage("--points must be at least 1"));
            }
            (family, oracle::lattice_cases(family, a.points, a.seed))
        }
        None => {
            let spec = a.spec.spec()?;
            let grid = a.grid.grid()?;
            let (family, params) = lattice_params(&spec)?;
            if spec.one_sided() && grid.start < 0.0 {
                return Err(Failure::usage(format!("{} needs a grid starting at t >= 0", spec.name())));
            }
            (family, grid_cases(family, &params, &grid))
        }
    };
    if a.printed && !matches!(family, KernelFamily::RlMbm | KernelFamily::RlMou) {
        return Err(Failure::usage("--printed applies to rl-mbm and rl-mou only"));
    }
    let memory_families =
        [KernelFamily::WeylFou, KernelFamily::RlFou, KernelFamily::WeylMou, KernelFamily::RlMou];
    if a.growing_drift && !memory_families.contains(&family) {
        return Err(Failure::usage("--growing-drift applies to the Ornstein-Uhlenbeck families only"));
    }

    let scale = 1.0 + a.perturb;
    let printed = a.printed;
    let closed = move |c: &LatticeCase| -> fracgp::error::Result<f64> {
        let v = if printed {
            c.printed_closed_form().unwrap_or_else(|| c.closed_form())?
        } else {
            c.closed_form()?
        };
        Ok(v * scale)
    };
    let sign = if a.growing_drift { DriftSign::Growing } else { DriftSign::Decaying };
    let report = oracle::verify_cases(family, &cases, closed, |c| c.oracle_signed(sign, &cfg));
    emit(&a.output, &json(&report)?)?;
    eprintln!("{}: {}/{} points agree", family.name(), report.passed, report.points.len());
    if report.all_pass() {
        Ok(())
    } else {
        let first = report.points.iter().find(|p| !p.pass);
        let detail = first.map_or(String::new(), |p| {
            format!(
                "; first at t = {}, s = {}: closed form {:?}, oracle {:?} +/- {:?}",
                p.case.t, p.case.s, p.closed_form, p.oracle, p.error_bound
            )
        });
        Err(Failure::new(
            EXIT_DISAGREEMENT,
            "disagreement",
            format!("{} of {} points disagree{detail}", report.failed, report.points.len()),
        ))
    }
}
