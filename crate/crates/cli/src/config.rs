use std::path::{Path, PathBuf};

use clap::Args;
use lcs_kernel::eval::cv::{CvConfig, C_GRID, LAMBDA_GRID};
use lcs_kernel::kernel::{KernelParams, RepresentationParams};
use lcs_kernel::ot::OtSettings;
use lcs_kernel::{FlcsParams, Variant};
use serde::Deserialize;

use crate::CliError;

pub const RHO_GRID: [f64; 3] = [0.6, 0.8, 1.0];
pub const S_GRID: [f64; 4] = [0.0, 0.2, 0.5, 0.8];

/// `(rho, s)` of a fast-variant setting, `None` for the basic variant.
pub type FastGrid = Option<(f64, f64)>;

/// Every setting a run can take. The same struct is filled from the JSON
/// config file and from command-line flags; flags win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// TU dataset directory.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Dataset name (file prefix); defaults to the directory name.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Removing ratio of the fast variant.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Merging radius of the fast variant.
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub rho_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub s_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub lambda_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub c_grid: Option<Vec<f64>>,
    /// Sinkhorn regularization.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Sinkhorn marginal tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Largest n1*n2 solved exactly; larger problems use Sinkhorn.
    #[arg(long)]
    pub exact_threshold: Option<usize>,
    #[arg(long)]
    pub exact_cap: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory of cached Gram matrices.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub inner_folds: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantArg {
    Blcs,
    Flcs,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($field:ident),*) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    /// `self` with every field set in `flags` replaced.
    pub fn overlay(self, flags: RunConfig) -> RunConfig {
        let base = self;
        overlay!(
            base, flags, dataset, name, variant, rho, s, rho_grid, s_grid, lambda, lambda_grid,
            c_grid, epsilon, tol, max_iter, exact_threshold, exact_cap, workers, out, cache_dir,
            seed, folds, repeats, inner_folds
        )
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    pub fn dataset(&self) -> Result<(PathBuf, String), CliError> {
        let dir = self
            .dataset
            .clone()
            .ok_or_else(|| CliError::Config("--dataset is required".into()))?;
        let name = match &self.name {
            Some(n) => n.clone(),
            None => dir
                .file_name()
                .and_then(|s| s.to_str())
                .map(str::to_owned)
                .ok_or_else(|| CliError::Config(format!("cannot infer a dataset name from {}", dir.display())))?,
        };
        Ok((dir, name))
    }

    pub fn workers(&self) -> usize {
        self.workers.unwrap_or(0)
    }

    pub fn ot(&self) -> Result<OtSettings, CliError> {
        let d = OtSettings::default();
        let ot = OtSettings {
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            tol: self.tol.unwrap_or(d.tol),
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            exact_threshold: self.exact_threshold.unwrap_or(d.exact_threshold),
            exact_cap: self.exact_cap.unwrap_or(d.exact_cap),
        };
        ot.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if ot.tol.is_nan() || ot.tol <= 0.0 {
            return Err(CliError::Config(format!("tol must be positive, got {}", ot.tol)));
        }
        Ok(ot)
    }

    fn variant(&self) -> Variant {
        match self.variant {
            Some(VariantArg::Flcs) => Variant::Flcs,
            _ => Variant::Blcs,
        }
    }

    /// Representations to compute, with their `(rho, s)` for the fast
    /// variant. A single `--rho`/`--s` overrides the corresponding grid.
    pub fn representations(&self, allow_grids: bool) -> Result<Vec<(RepresentationParams, FastGrid)>, CliError> {
        let any_fast = self.rho.is_some() || self.s.is_some() || self.rho_grid.is_some() || self.s_grid.is_some();
        match self.variant() {
            Variant::Blcs => {
                if any_fast {
                    return Err(CliError::Config(
                        "--rho, --s and their grids only apply to --variant flcs".into(),
                    ));
                }
                Ok(vec![(RepresentationParams::basic(), None)])
            }
            Variant::Flcs => {
                if !allow_grids && (self.rho_grid.is_some() || self.s_grid.is_some()) {
                    return Err(CliError::Config("this command takes a single --rho and --s".into()));
                }
                let rhos = match (self.rho, &self.rho_grid, allow_grids) {
                    (Some(r), _, _) => vec![r],
                    (None, Some(g), _) => g.clone(),
                    (None, None, true) => RHO_GRID.to_vec(),
                    (None, None, false) => return Err(CliError::Config("--variant flcs needs --rho".into())),
                };
                let ss = match (self.s, &self.s_grid, allow_grids) {
                    (Some(s), _, _) => vec![s],
                    (None, Some(g), _) => g.clone(),
                    (None, None, true) => S_GRID.to_vec(),
                    (None, None, false) => return Err(CliError::Config("--variant flcs needs --s".into())),
                };
                if rhos.is_empty() || ss.is_empty() {
                    return Err(CliError::Config("empty rho or s grid".into()));
                }
                let mut out = Vec::new();
                for &rho in &rhos {
                    for &s in &ss {
                        let p = FlcsParams::new(rho, s).map_err(|e| CliError::Config(e.to_string()))?;
                        out.push((RepresentationParams::fast(p), Some((rho, s))));
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn lambdas(&self, allow_grid: bool) -> Result<Vec<f64>, CliError> {
        let lambdas = match (self.lambda, &self.lambda_grid) {
            (Some(l), _) => vec![l],
            (None, Some(g)) if allow_grid => g.clone(),
            (None, Some(_)) => return Err(CliError::Config("this command takes a single --lambda".into())),
            (None, None) if allow_grid => LAMBDA_GRID.to_vec(),
            (None, None) => vec![1.0],
        };
        if lambdas.is_empty() {
            return Err(CliError::Config("empty lambda grid".into()));
        }
        Ok(lambdas)
    }

    /// Every `(representation, lambda)` combination, validated.
    pub fn kernel_params(&self, allow_grids: bool) -> Result<Vec<(KernelParams, FastGrid)>, CliError> {
        let ot = self.ot()?;
        let lambdas = self.lambdas(allow_grids)?;
        let mut out = Vec::new();
        for (repr, rs) in self.representations(allow_grids)? {
            for &lambda in &lambdas {
                let p = KernelParams::new(repr, lambda, ot).map_err(|e| CliError::Config(e.to_string()))?;
                out.push((p, rs));
            }
        }
        Ok(out)
    }

    pub fn cv(&self) -> Result<CvConfig, CliError> {
        let d = CvConfig::default();
        let cv = CvConfig {
            c_grid: self.c_grid.clone().unwrap_or_else(|| C_GRID.to_vec()),
            folds: self.folds.unwrap_or(d.folds),
            repeats: self.repeats.unwrap_or(d.repeats),
            inner_folds: self.inner_folds.unwrap_or(d.inner_folds),
            seed: self.seed.unwrap_or(d.seed),
        };
        if cv.c_grid.is_empty() || cv.c_grid.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(CliError::Config(format!("C grid must be non-empty and positive: {:?}", cv.c_grid)));
        }
        if cv.folds < 2 || cv.inner_folds < 2 {
            return Err(CliError::Config("folds and inner folds must be at least 2".into()));
        }
        if cv.repeats == 0 {
            return Err(CliError::Config("repeats must be at least 1".into()));
        }
        Ok(cv)
    }
}
