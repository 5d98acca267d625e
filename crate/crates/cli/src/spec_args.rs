//! Process and grid flags shared by the subcommands.

use std::path::PathBuf;

use clap::Args;
use fracgp::process::{AlphaFunction, HurstFunction, ProcessSpec, Profile};
use fracgp::sampler::TimeGrid;

use crate::Failure;

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// Family name, e.g. fbm, weyl-fou, frbm, gc.
    #[arg(long)]
    pub process: Option<String>,
    /// JSON spec, needed for time-varying indices.
    #[arg(long, conflicts_with = "process")]
    pub spec_file: Option<PathBuf>,
    #[arg(long)]
    pub hurst: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Number of grid points.
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    /// First grid time.
    #[arg(long, default_value_t = 0.0)]
    pub start: f64,
}

impl GridArgs {
    pub fn grid(&self) -> Result<TimeGrid, Failure> {
        TimeGrid::new(self.start, self.dt, self.n).map_err(|e| Failure::from_core(crate::EXIT_USAGE, e))
    }
}

fn need(v: Option<f64>, flag: &str, process: &str) -> Result<f64, Failure> {
    v.ok_or_else(|| Failure::usage(format!("--{flag} is required for --process {process}")))
}

impl SpecArgs {
    pub fn is_given(&self) -> bool {
        self.process.is_some() || self.spec_file.is_some()
    }

    /// Validated spec from the flags or the spec file.
    pub fn spec(&self) -> Result<ProcessSpec, Failure> {
        let spec = match (&self.process, &self.spec_file) {
            (_, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| Failure::new(crate::EXIT_USAGE, "invalid-spec", format!("{}: {e}", path.display())))?
            }
            (Some(name), None) => self.from_flags(name)?,
            (None, None) => return Err(Failure::usage("either --process or --spec-file is required")),
        };
        spec.validate().map_err(|e| Failure::from_core(crate::EXIT_USAGE, e))?;
        Ok(spec)
    }

    fn from_flags(&self, name: &str) -> Result<ProcessSpec, Failure> {
        let omega = self.omega;
        let hurst = || need(self.hurst, "hurst", name);
        let alpha = || need(self.alpha, "alpha", name);
        let core = |e| Failure::from_core(crate::EXIT_USAGE, e);
        Ok(match name {
            "fbm" => ProcessSpec::Fbm { hurst: hurst()? },
            "rl-fbm" => ProcessSpec::RlFbm { hurst: hurst()? },
            "mbm" => ProcessSpec::Mbm { hurst: HurstFunction::constant(hurst()?).map_err(core)? },
            "rl-mbm" => ProcessSpec::RlMbm { hurst: HurstFunction::constant(hurst()?).map_err(core)? },
            "weyl-fou" => ProcessSpec::WeylFou { alpha: alpha()?, omega },
            "rl-fou" => ProcessSpec::RlFou { alpha: alpha()?, omega },
            "weyl-mou" => ProcessSpec::WeylMou { alpha: AlphaFunction::constant(alpha()?).map_err(core)?, omega },
            "rl-mou" => ProcessSpec::RlMou { alpha: AlphaFunction::constant(alpha()?).map_err(core)?, omega },
            "frbm" => ProcessSpec::Frbm { alpha: alpha()?, gamma: need(self.gamma, "gamma", name)?, omega },
            "mrbm" => ProcessSpec::Mrbm {
                alpha: Profile::constant(alpha()?),
                gamma: Profile::constant(need(self.gamma, "gamma", name)?),
                omega,
            },
            "gc" => ProcessSpec::Gc { alpha: alpha()?, beta: need(self.beta, "beta", name)? },
            other => return Err(Failure::usage(format!("unknown process `{other}`"))),
        })
    }
}
