use alpha_rne::catalog::{example1_pairs, Preset};
use alpha_rne::oracle::{cross_check_against, enumerate_alpha_rne, CrossCheckReport, GridSpec};
use alpha_rne::two_action::random::random_games;
use alpha_rne::two_action::PointTag;
use alpha_rne::welfare::{compare, WelfareReport};
use alpha_rne::{verify_alpha_rne, ActionSet, Alpha, EquilibriumSet, TwoActionGame, Verdict};
use anyhow::{bail, Result};

use crate::config::{Format, Game, RunConfig};
use crate::output::{self, CrossCheckRow, PairRow, SolveRow, SweepRow, WelfareRow};

/// Rendered output plus whether an equilibrium set came out empty or a
/// check failed.
pub struct Outcome {
    pub text: String,
    pub empty: bool,
    pub mismatches: usize,
}

pub struct Options {
    pub format: Format,
    pub seed: u64,
    /// Overrides the zero scan grid, or the simplex resolution for
    /// brute-force work.
    pub grid: Option<u32>,
}

fn two_action_sets(cfg: &RunConfig, game: &TwoActionGame) -> Result<Vec<EquilibriumSet>> {
    let solver = cfg.solver();
    Ok(solver
        .regime_sweep(game, &cfg.alphas()?)?
        .into_iter()
        .map(|r| r.set)
        .collect())
}

fn resolution(cfg: &RunConfig, opts: &Options) -> u32 {
    opts.grid.unwrap_or(cfg.solver.oracle_resolution)
}

fn with_grid(mut cfg: RunConfig, opts: &Options) -> RunConfig {
    if let Some(g) = opts.grid {
        cfg.solver.grid_n = g as usize;
    }
    cfg
}

pub fn solve(cfg: RunConfig, opts: &Options) -> Result<Outcome> {
    match cfg.game()? {
        Game::TwoAction(game) => {
            let cfg = with_grid(cfg, opts);
            let solver = cfg.solver();
            let sets = two_action_sets(&cfg, &game)?;
            let mut rows = Vec::new();
            for set in &sets {
                let alpha = Alpha::new(set.alpha)?;
                for p in &set.points {
                    rows.push(SolveRow {
                        alpha: set.alpha,
                        z: p.z,
                        y_star: p.y,
                        tag: p.tag.to_string(),
                        margin_h: p.margins.h,
                        verified: p.verified,
                    });
                }
                for iv in &set.plateaus {
                    for (z, tag) in [(iv.lo, "plateau-lo"), (iv.hi, "plateau-hi")] {
                        let p = solver.point(&game, z, alpha, PointTag::ZeroOfH)?;
                        rows.push(SolveRow {
                            alpha: set.alpha,
                            z,
                            y_star: p.y,
                            tag: tag.to_string(),
                            margin_h: p.margins.h,
                            verified: p.verified,
                        });
                    }
                }
            }
            rows.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then(a.z.total_cmp(&b.z)));
            Ok(Outcome {
                text: output::table(&rows, opts.format)?,
                empty: sets.iter().any(|s| s.points.is_empty() && s.plateaus.is_empty()),
                mismatches: 0,
            })
        }
        Game::General {
            utility, preset, ..
        } => {
            let tol = cfg.tolerances;
            let actions = ActionSet::new(utility.action_count())?;
            let mut rows = Vec::new();
            let mut empty = false;
            for alpha in cfg.alphas()? {
                let start = rows.len();
                if preset == Some(Preset::Example1) {
                    for (index, pair) in example1_pairs(alpha)?.into_iter().enumerate() {
                        let verdict = verify_alpha_rne(&pair, utility.as_ref(), alpha, &tol)?;
                        rows.push(pair_row(alpha, "fixture", index, &pair, &verdict));
                    }
                } else {
                    let grid = GridSpec::new(resolution(&cfg, opts));
                    let found = enumerate_alpha_rne(utility.as_ref(), actions, alpha, &grid, &tol)?;
                    for (index, c) in found.clusters.iter().enumerate() {
                        let pair = &c.representative.pair;
                        let verdict = verify_alpha_rne(pair, utility.as_ref(), alpha, &tol)?;
                        rows.push(pair_row(alpha, "oracle", index, pair, &verdict));
                    }
                }
                empty |= rows.len() == start;
            }
            Ok(Outcome {
                text: output::table(&rows, opts.format)?,
                empty,
                mismatches: 0,
            })
        }
    }
}

fn pair_row(
    alpha: Alpha,
    source: &'static str,
    index: usize,
    pair: &alpha_rne::ProfilePair,
    verdict: &Verdict,
) -> PairRow {
    let (majority, detail) = match verdict {
        Verdict::Yes(c) => (c.majority, String::new()),
        Verdict::No(v) => (
            alpha_rne::majority_action(&pair.mu, 0.0),
            v.to_string(),
        ),
    };
    PairRow {
        alpha: alpha.value(),
        source,
        index,
        majority,
        mu: output::weights(pair.mu.weights()),
        mu_r: output::weights(pair.mu_r.weights()),
        verified: verdict.is_yes(),
        detail,
    }
}

fn require_two_action(cfg: &RunConfig, command: &str) -> Result<TwoActionGame> {
    match cfg.game()? {
        Game::TwoAction(g) => Ok(g),
        Game::General { name, .. } => {
            bail!("{command} needs a two-action game, {name} has more actions")
        }
    }
}

pub fn sweep(cfg: RunConfig, opts: &Options) -> Result<Outcome> {
    let cfg = with_grid(cfg, opts);
    let game = require_two_action(&cfg, "sweep")?;
    let sets = two_action_sets(&cfg, &game)?;
    let mut rows: Vec<SweepRow> = sets
        .iter()
        .flat_map(|s| {
            s.points.iter().map(move |p| SweepRow {
                alpha: s.alpha,
                z: p.z,
                tag: p.tag.to_string(),
            })
        })
        .collect();
    rows.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then(a.z.total_cmp(&b.z)));
    Ok(Outcome {
        text: output::table(&rows, opts.format)?,
        empty: sets.iter().any(|s| s.points.is_empty()),
        mismatches: 0,
    })
}

pub fn welfare(cfg: RunConfig, opts: &Options) -> Result<Outcome> {
    let cfg = with_grid(cfg, opts);
    let game = require_two_action(&cfg, "welfare")?;
    let solver = cfg.solver();
    let sets = two_action_sets(&cfg, &game)?;
    let reports = sets
        .iter()
        .map(|s| compare(&game, Alpha::new(s.alpha)?, s, &solver, cfg.solver.welfare_grid))
        .collect::<Result<Vec<_>, _>>()?;
    let text = match opts.format {
        Format::Json => output::json(&reports)?,
        Format::Csv => output::csv(&welfare_rows(&reports))?,
    };
    Ok(Outcome {
        text,
        empty: sets.iter().any(|s| s.points.is_empty()),
        mismatches: 0,
    })
}

fn welfare_rows(reports: &[WelfareReport]) -> Vec<WelfareRow> {
    let mut rows = Vec::new();
    for r in reports {
        let alpha = r.alpha;
        for e in &r.rows {
            rows.push(WelfareRow {
                kind: "equilibrium",
                alpha,
                z: Some(e.z),
                y_star: Some(e.y_star),
                u_rational: Some(e.u_rational),
                u_irrational: Some(e.u_irrational),
                herding: Some(e.herding),
                ..Default::default()
            });
        }
        for c in &r.classical {
            rows.push(WelfareRow {
                kind: "classical",
                alpha,
                z: Some(c.z),
                quantity: Some("u_classical"),
                value: Some(format!("{:?}", c.utility)),
                ..Default::default()
            });
        }
        let summary = |quantity: &'static str, value: String| WelfareRow {
            kind: "summary",
            alpha,
            quantity: Some(quantity),
            value: Some(value),
            ..Default::default()
        };
        rows.push(summary("u_social", format!("{:?}", r.u_social.value)));
        rows.push(summary("u_social_attained", r.u_social.attained.to_string()));
        rows.push(summary("u_social_alpha", format!("{:?}", r.u_social_alpha.value)));
        rows.push(summary("prop1_holds", r.prop1_holds.to_string()));
        rows.push(summary(
            "prop2",
            r.prop2.map_or("n/a".to_string(), |b| b.to_string()),
        ));
        rows.push(summary(
            "rational_to_be_irrational",
            r.rational_to_be_irrational.to_string(),
        ));
        for z in &r.rational_beats_social {
            rows.push(WelfareRow {
                kind: "flag",
                alpha,
                z: Some(*z),
                quantity: Some("rational_beats_social"),
                value: Some("true".into()),
                ..Default::default()
            });
        }
        for (z, z1) in &r.irrational_beats_some_classical {
            rows.push(WelfareRow {
                kind: "flag",
                alpha,
                z: Some(*z),
                quantity: Some("irrational_beats_classical"),
                value: Some(format!("{z1:?}")),
                ..Default::default()
            });
        }
    }
    rows
}

fn report_rows(r: &CrossCheckReport, rows: &mut Vec<CrossCheckRow>) {
    let row = |status, z, cluster, distance| CrossCheckRow {
        game: r.game.clone(),
        alpha: r.alpha,
        resolution: r.resolution,
        status,
        z,
        cluster,
        distance,
    };
    for m in &r.matched {
        rows.push(row("matched", m.z, Some(m.cluster), Some(m.distance)));
    }
    for z in &r.missed {
        rows.push(row("missed", *z, None, None));
    }
    for s in &r.spurious {
        rows.push(row("spurious", 0.5 * (s.z_lo + s.z_hi), Some(s.index), None));
    }
}

pub fn crosscheck(cfg: RunConfig, opts: &Options) -> Result<Outcome> {
    let res = resolution(&cfg, opts);
    let grid = GridSpec::new(res);
    let solver = cfg.solver();
    let alphas = cfg.alphas()?;
    let mut reports = Vec::new();
    let mut rows = Vec::new();

    match cfg.game()? {
        Game::TwoAction(game) => {
            let claimed = match cfg.claimed_preset()? {
                Some(p) => p.two_action().expect("two-action preset"),
                None => game.clone(),
            };
            for &alpha in &alphas {
                let theory = solver.alpha_rne_set(&claimed, alpha)?;
                reports.push(cross_check_against(&game, &theory, &grid, &solver.tol)?);
            }
        }
        Game::General {
            utility,
            preset: Some(Preset::Example1),
            name,
        } => {
            for &alpha in &alphas {
                let found = enumerate_alpha_rne(utility.as_ref(), ActionSet::new(3)?, alpha, &grid, &solver.tol)?;
                let reach = 2.0 / res as f64;
                let pairs = example1_pairs(alpha)?;
                for (i, p) in pairs.iter().enumerate() {
                    let near = found
                        .clusters
                        .iter()
                        .enumerate()
                        .map(|(c, cl)| (c, cl.distance(p.mu.weights())))
                        .min_by(|a, b| a.1.total_cmp(&b.1))
                        .filter(|(_, d)| *d <= reach);
                    let (status, cluster, distance) = match near {
                        Some((c, d)) => ("matched", Some(c), Some(d)),
                        None => ("missed", None, None),
                    };
                    rows.push(CrossCheckRow {
                        game: name.clone(),
                        alpha: alpha.value(),
                        resolution: res,
                        status,
                        z: i as f64,
                        cluster,
                        distance,
                    });
                }
                for (c, cl) in found.clusters.iter().enumerate() {
                    if !pairs.iter().any(|p| cl.distance(p.mu.weights()) <= reach) {
                        rows.push(CrossCheckRow {
                            game: name.clone(),
                            alpha: alpha.value(),
                            resolution: res,
                            status: "spurious",
                            z: cl.representative.pair.mu.weights()[0],
                            cluster: Some(c),
                            distance: None,
                        });
                    }
                }
            }
        }
        Game::General { name, .. } => {
            bail!("crosscheck has no reference set for {name}; use a two-action game or example1")
        }
    }

    for rg in random_games(opts.seed, cfg.crosscheck.random_games) {
        let game = rg.game();
        for &alpha in &alphas {
            let theory = solver.alpha_rne_set(&game, alpha)?;
            reports.push(cross_check_against(&game, &theory, &grid, &solver.tol)?);
        }
    }
    for r in &reports {
        report_rows(r, &mut rows);
    }
    let mismatches = rows.iter().filter(|r| r.status != "matched").count();
    let text = match opts.format {
        Format::Csv => output::csv(&rows)?,
        Format::Json => output::json(&rows)?,
    };
    Ok(Outcome {
        text,
        empty: false,
        mismatches,
    })
}
