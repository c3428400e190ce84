//! Run configuration read from TOML. Unknown keys anywhere are errors.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use alpha_rne::catalog::{
    BandwidthParams, ParticipationParams, Preset, RoutingParams,
};
use alpha_rne::utility::{ExprUtility, TabularUtility};
use alpha_rne::{Alpha, Tolerances, TwoActionGame, TwoActionSolver, Utility};
use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub game: GameConfig,
    pub alpha: AlphaSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub crosscheck: CrossCheckConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub preset: Option<String>,
    pub params: Option<toml::Table>,
    pub expression: Option<ExpressionConfig>,
    pub tabular: Option<TabularConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpressionConfig {
    /// One expression per action.
    pub actions: Option<Vec<String>>,
    /// A single expression branching on `a`, used with `count`.
    pub single: Option<String>,
    pub count: Option<usize>,
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabularConfig {
    pub resolution: u32,
    pub values: Vec<Vec<f64>>,
}

/// A single value, an explicit list, or an inclusive sweep.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Value(f64),
    List(Vec<f64>),
    Sweep(SweepSpec),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Cells in the scan for zeros of the utility gap.
    pub grid_n: usize,
    /// Simplex grid resolution for the brute-force search.
    pub oracle_resolution: u32,
    /// Grid for the numeric social optimum.
    pub welfare_grid: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grid_n: TwoActionSolver::default().grid_n,
            oracle_resolution: 400,
            welfare_grid: 2000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Format,
    pub path: Option<std::path::PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrossCheckConfig {
    /// Random piecewise-linear games checked in addition to the configured one.
    pub random_games: usize,
    /// Preset parameters the claimed equilibria are computed from, in place
    /// of the game's own. Any mismatch then has to be detected.
    pub claimed: Option<toml::Table>,
}

/// The game a run operates on.
pub enum Game {
    TwoAction(TwoActionGame),
    /// Three or more actions, or a catalog game without a two-action form.
    General {
        name: String,
        utility: Arc<dyn Utility>,
        preset: Option<Preset>,
    },
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.alphas()?;
        cfg.game.source_count()?;
        Ok(cfg)
    }

    pub fn alphas(&self) -> Result<Vec<Alpha>> {
        let raw = match &self.alpha {
            AlphaSpec::Value(a) => vec![*a],
            AlphaSpec::List(v) => v.clone(),
            AlphaSpec::Sweep(s) => s.values()?,
        };
        if raw.is_empty() {
            bail!("alpha list is empty");
        }
        raw.into_iter()
            .map(|a| Alpha::new(a).map_err(|_| anyhow!("alpha must lie in (0, 1], got {a}")))
            .collect()
    }

    pub fn solver(&self) -> TwoActionSolver {
        TwoActionSolver {
            grid_n: self.solver.grid_n,
            tol: self.tolerances,
        }
    }

    pub fn preset(&self) -> Result<Option<Preset>> {
        match &self.game.preset {
            Some(name) => Ok(Some(preset(name, self.game.params.as_ref())?)),
            None => Ok(None),
        }
    }

    /// Preset built from `[crosscheck] claimed`, if set.
    pub fn claimed_preset(&self) -> Result<Option<Preset>> {
        match (&self.crosscheck.claimed, &self.game.preset) {
            (None, _) => Ok(None),
            (Some(p), Some(name)) => Ok(Some(preset(name, Some(p))?)),
            (Some(_), None) => bail!("crosscheck.claimed needs a preset game"),
        }
    }

    pub fn game(&self) -> Result<Game> {
        if let Some(p) = self.preset()? {
            return Ok(match p.two_action() {
                Some(g) => Game::TwoAction(g),
                None => Game::General {
                    name: p.name().to_string(),
                    utility: p.utility(),
                    preset: Some(p),
                },
            });
        }
        let (name, utility): (&str, Arc<dyn Utility>) = if let Some(e) = &self.game.expression {
            ("expression", Arc::new(e.build()?))
        } else if let Some(t) = &self.game.tabular {
            ("tabular", Arc::new(TabularUtility::new(t.resolution, t.values.clone())?))
        } else {
            unreachable!("source count checked at parse time")
        };
        if utility.action_count() == 2 {
            Ok(Game::TwoAction(TwoActionGame::from_utility(name, utility)?))
        } else {
            Ok(Game::General {
                name: name.to_string(),
                utility,
                preset: None,
            })
        }
    }
}

impl GameConfig {
    fn source_count(&self) -> Result<()> {
        let n = [
            self.preset.is_some(),
            self.expression.is_some(),
            self.tabular.is_some(),
        ]
        .iter()
        .filter(|b| **b)
        .count();
        if n != 1 {
            bail!("[game] needs exactly one of preset, expression or tabular, found {n}");
        }
        if self.params.is_some() && self.preset.is_none() {
            bail!("[game] params only apply to a preset");
        }
        Ok(())
    }
}

impl ExpressionConfig {
    fn build(&self) -> Result<ExprUtility> {
        Ok(match (&self.actions, &self.single, self.count) {
            (Some(a), None, None) => ExprUtility::per_action(a, &self.constants)?,
            (None, Some(s), Some(n)) => ExprUtility::single(s, n, &self.constants)?,
            _ => bail!("[game.expression] needs either actions, or single together with count"),
        })
    }
}

impl SweepSpec {
    /// Inclusive grid from `start` to `stop`. Values are rounded to 12
    /// decimals so that accumulated steps print cleanly.
    fn values(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0 && self.start <= self.stop) {
            bail!("alpha sweep needs step > 0 and start <= stop");
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        Ok((0..=n)
            .map(|i| ((self.start + i as f64 * self.step) * 1e12).round() / 1e12)
            .collect())
    }
}

fn preset(name: &str, params: Option<&toml::Table>) -> Result<Preset> {
    let params = params.cloned().unwrap_or_default();
    let p = match name {
        "routing" => {
            let p: RoutingParams = params.try_into().context("routing params")?;
            Preset::Routing(RoutingParams::new(p.gamma)?)
        }
        "participation" => {
            let p: ParticipationParams = params.try_into().context("participation params")?;
            Preset::Participation(ParticipationParams::new(p.c, p.p)?)
        }
        "bandwidth" => {
            let _: BandwidthParams = params.try_into().context("bandwidth takes no params")?;
            Preset::Bandwidth
        }
        "example1" => {
            if !params.is_empty() {
                bail!("example1 takes no params");
            }
            Preset::Example1
        }
        other => bail!(alpha_rne::catalog::CatalogError::UnknownPreset(other.to_string())),
    };
    Ok(p)
}
