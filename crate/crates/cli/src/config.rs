use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use coorbit::sampling::random_unit_windows;
use coorbit::{
    CoorbitConfig, FiniteGroupAction, GroupOptions, GroupSpec, SamplingPlan, Selector, Tolerances,
    DEFAULT_MAX_ORDER,
};
use serde::Deserialize;

use crate::error::CliError;
use crate::io::read_rows;

/// Parsed run configuration file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: GroupSpec,
    pub windows: WindowSource,
    #[serde(default)]
    pub selector: SelectorSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub sampling: SamplingSection,
    #[serde(default)]
    pub projection: Option<ProjectionSection>,
    #[serde(default)]
    pub max_order: Option<usize>,
}

/// Exactly one of `random`, `file` or `vectors`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSource {
    /// Number of random unit windows.
    pub random: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// CSV file, one window per row; relative to the config file.
    pub file: Option<PathBuf>,
    pub vectors: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SelectorSpec {
    #[default]
    Max,
    TopK { k: usize },
    Full,
    /// 1-based `[rank, window]` pairs.
    Pairs { pairs: Vec<(usize, usize)> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingSection {
    pub pairs: usize,
    pub seed: u64,
    pub refine_steps: usize,
    pub near_fraction: f64,
}

impl Default for SamplingSection {
    fn default() -> Self {
        let p = SamplingPlan::default();
        Self {
            pairs: p.pairs,
            seed: p.seed,
            refine_steps: p.refine_steps,
            near_fraction: p.near_fraction,
        }
    }
}

impl SamplingSection {
    pub fn plan(&self) -> SamplingPlan {
        SamplingPlan {
            pairs: self.pairs,
            seed: self.seed,
            refine_steps: self.refine_steps,
            near_fraction: self.near_fraction,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionSection {
    /// Output dimension; `2d` when absent.
    pub q: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

/// A configuration file together with its raw bytes.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub run: RunConfig,
    pub bytes: Vec<u8>,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let bytes = fs::read(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| CliError::Config(format!("{} is not UTF-8", path.display())))?;
        let run: RunConfig = toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self {
            run,
            bytes,
            base_dir,
        })
    }

    pub fn group(&self) -> Result<Arc<FiniteGroupAction>, CliError> {
        let opts = GroupOptions {
            tol: self.run.tolerances,
            max_order: self.run.max_order.unwrap_or(DEFAULT_MAX_ORDER),
        };
        let g = FiniteGroupAction::build_with(&self.run.group, &opts)
            .map_err(|e| CliError::Config(format!("group: {e}")))?;
        Ok(Arc::new(g))
    }

    pub fn windows(&self, dim: usize) -> Result<Vec<Vec<f64>>, CliError> {
        let src = &self.run.windows;
        let given = [src.random.is_some(), src.file.is_some(), src.vectors.is_some()];
        if given.iter().filter(|&&b| b).count() != 1 {
            return Err(CliError::Config(
                "windows: set exactly one of `random`, `file`, `vectors`".into(),
            ));
        }
        if let Some(count) = src.random {
            if count == 0 {
                return Err(CliError::Config("windows.random: must be positive".into()));
            }
            return Ok(random_unit_windows(count, dim, src.seed));
        }
        if let Some(file) = &src.file {
            let path = self.base_dir.join(file);
            return read_rows(&path, false, Some(dim))
                .map_err(|e| CliError::Config(format!("windows.file: {e}")));
        }
        Ok(src.vectors.clone().unwrap_or_default())
    }

    pub fn selector(&self, order: usize, windows: usize) -> Result<Selector, CliError> {
        Ok(match &self.run.selector {
            SelectorSpec::Max => Selector::max_filter(windows),
            SelectorSpec::TopK { k } => {
                if *k == 0 || *k > order {
                    return Err(CliError::Config(format!(
                        "selector.k: must lie in 1..={order}, got {k}"
                    )));
                }
                Selector::top_k(windows, *k)
            }
            SelectorSpec::Full => Selector::full(order, windows),
            SelectorSpec::Pairs { pairs } => Selector::from_pairs(pairs.iter().copied()),
        })
    }

    pub fn coorbit(&self) -> Result<CoorbitConfig, CliError> {
        let group = self.group()?;
        let windows = self.windows(group.dim())?;
        let selector = self.selector(group.order(), windows.len())?;
        CoorbitConfig::new(group, windows, selector)
            .map_err(|e| CliError::Config(format!("windows/selector: {e}")))
    }
}
