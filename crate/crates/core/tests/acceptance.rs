//! Acceptance criteria, one line of output each.
//!
//! Runs without the libtest harness so that every criterion reports even
//! when an earlier one fails. Exit status is non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use alpha_rne::catalog::{
    bandwidth_game, example1_pairs, example1_utility, participation_game,
    participation_table, routing_game, routing_table, set_difference, BandwidthParams,
    ParticipationParams, RoutingParams,
};
use alpha_rne::oracle::{cross_check, enumerate_alpha_rne, GridSpec};
use alpha_rne::two_action::random::random_games;
use alpha_rne::two_action::{y_star, PointTag};
use alpha_rne::welfare::{
    compare, social_optimum, utility_classical, utility_irrational, utility_rational,
};
use alpha_rne::{
    verify_alpha_rne, ActionSet, Alpha, Tolerances, TwoActionGame,
    TwoActionSolver,
};

const SEED: u64 = 20_240_611;
const WELFARE_GRID: usize = 1024;

#[derive(Default)]
struct Report {
    checks: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Report {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

fn alpha(a: f64) -> Alpha {
    Alpha::new(a).expect("alpha in (0, 1]")
}

/// Equal as sets: duplicate entries in a case table collapse.
fn same_set(got: &[f64], want: &[f64], tol: f64) -> bool {
    let (a, b) = set_difference(got, want, tol);
    a.is_empty() && b.is_empty()
}

fn alpha_grid() -> Vec<f64> {
    (1..=20).map(|k| k as f64 * 0.05).collect()
}

fn criterion_1(r: &mut Report) {
    let solver = TwoActionSolver::default();
    for gamma in [1.25, 2.0, 4.0] {
        let p = RoutingParams::new(gamma).unwrap();
        let game = routing_game(p);
        for a in alpha_grid() {
            let set = solver.alpha_rne_set(&game, alpha(a)).unwrap();
            let table = routing_table(p, alpha(a));
            r.check(same_set(&set.zs(), &table, 1e-9) && set.all_verified(), || {
                format!("gamma={gamma} alpha={a}: solver {:?}, table {table:?}", set.zs())
            });
        }
        let d = p.delta();
        let mut boundaries = vec![d, 1.0 - d, 0.5];
        boundaries.dedup();
        for a in boundaries {
            let set = solver.alpha_rne_set(&game, alpha(a)).unwrap();
            let table = routing_table(p, alpha(a));
            r.check(same_set(&set.zs(), &table, 1e-9), || {
                format!("boundary gamma={gamma} alpha={a}: solver {:?}, table {table:?}", set.zs())
            });
            for pt in &set.points {
                r.check(pt.margins.slack >= -1e-10, || format!("negative slack at {pt:?}"));
            }
            let margins: Vec<String> = set
                .points
                .iter()
                .map(|p| format!("{:.4}:{}:{:+.1e}", p.z, p.tag, p.margins.slack))
                .collect();
            r.note(format!("boundary gamma={gamma} alpha={a:.4}: {}", margins.join(" ")));
        }
    }
    // Frozen values.
    let s = solver
        .alpha_rne_set(&routing_game(RoutingParams::new(2.0).unwrap()), alpha(0.4))
        .unwrap();
    r.check(same_set(&s.zs(), &[0.4, 0.6], 1e-12), || format!("gamma=2 alpha=0.4 gave {:?}", s.zs()));
}

fn criterion_2(r: &mut Report) {
    let solver = TwoActionSolver::default();
    let cases = [
        ("P >= 1-C", 0.5, 0.6),
        ("P <= P1", 0.5, 0.1),
        ("P1 < P < P2", 0.5, 0.2),
        ("P2 <= P < 1-C", 0.5, 0.4),
    ];
    for (label, c, pv) in cases {
        let p = ParticipationParams::new(c, pv).unwrap();
        let game = participation_game(p);
        for a in [0.2, 0.3, 0.5, 0.7] {
            let set = solver.alpha_rne_set(&game, alpha(a)).unwrap();
            let table = participation_table(p, alpha(a));
            let (only_solver, only_table) = set_difference(&set.zs(), &table, 1e-9);
            r.check(only_solver.is_empty() && only_table.is_empty(), || {
                format!(
                    "{label} C={c} P={pv} alpha={a}: solver {:?}, table {table:?}, only in table {only_table:?}, h(1)={:+.3}",
                    set.zs(),
                    game.h(1.0)
                )
            });
        }
    }
    let s = solver
        .alpha_rne_set(&participation_game(ParticipationParams::new(0.5, 0.6).unwrap()), alpha(0.3))
        .unwrap();
    r.check(same_set(&s.zs(), &[0.0, 0.3, 1.0], 1e-12), || format!("C=0.5 P=0.6 alpha=0.3 gave {:?}", s.zs()));
}

fn criterion_3(r: &mut Report) {
    let solver = TwoActionSolver::default();
    let game = bandwidth_game(BandwidthParams {});
    let a = alpha(0.25);
    let set = solver.alpha_rne_set(&game, a).unwrap();
    r.check(set.zs() == vec![0.25, 1.0], || format!("set {:?}", set.zs()));
    let tol = Tolerances::default();
    let ur = utility_rational(&game, a, 0.25, &tol).unwrap();
    let ui = utility_irrational(&game, 0.25, &tol).unwrap();
    let us = social_optimum(&game, WELFARE_GRID);
    r.check(ur == 0.75, || format!("u_R = {ur}"));
    r.check(ui == 0.375, || format!("u_I = {ui}"));
    r.check(us.value == 0.5 && us.closed_form, || format!("u_S = {us:?}"));
    let report = compare(&game, a, &set, &solver, WELFARE_GRID).unwrap();
    r.check(report.rational_to_be_irrational, || "rational_to_be_irrational is false".into());

    let mut prev = f64::NEG_INFINITY;
    for a in [0.2, 0.1, 0.05, 0.01] {
        let ui = utility_irrational(&game, a, &tol).unwrap();
        let want = (1.0 - a) / 2.0;
        r.check((ui - want).abs() < 1e-15 && ui > prev && ui < 0.5, || {
            format!("alpha={a}: u_I={ui}, expected {want} increasing toward 0.5")
        });
        prev = ui;
    }
    r.note(format!("u_I at alpha=0.01 is {prev}, gap to u_S {:.3e}", 0.5 - prev));
}

const RANDOM_ALPHAS: [f64; 11] = [0.05, 0.1, 0.25, 0.3, 0.41, 0.5, 0.55, 0.6, 0.75, 0.9, 1.0];

/// Zeros of a piecewise-linear gap, solved segment by segment.
fn exact_roots(knots: &[(f64, f64)]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for w in knots.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y0 == 0.0 {
            out.push(x0);
        }
        if (y0 < 0.0) != (y1 < 0.0) && y0 != 0.0 && y1 != 0.0 {
            out.push(x0 + (x1 - x0) * y0 / (y0 - y1));
        }
    }
    if let Some(&(x, y)) = knots.last() {
        if y == 0.0 {
            out.push(x);
        }
    }
    out
}

fn criterion_4(r: &mut Report) {
    let solver = TwoActionSolver::default();
    let tol = solver.tol;
    let games = random_games(SEED, 500);
    for rg in &games {
        let game = rg.game();
        let classical = match solver.classical_ne_set(&game) {
            Ok(s) => s,
            Err(e) => {
                r.check(false, || format!("game {}: {e}", rg.index));
                continue;
            }
        };
        // (a) Membership conditions, and agreement with exact roots.
        for p in &classical.points {
            let h = game.h(p.z);
            let ok = h.abs() <= tol.h || (p.z == 0.0 && h <= tol.h) || (p.z == 1.0 && h >= -tol.h);
            r.check(ok, || format!("(a) game {} z={} h={h:e}", rg.index, p.z));
        }
        let knots: Vec<(f64, f64)> = rg.h().knots().collect();
        let mut expected = exact_roots(&knots);
        if game.h(0.0) <= 0.0 {
            expected.push(0.0);
        }
        if game.h(1.0) >= 0.0 {
            expected.push(1.0);
        }
        expected.sort_by(f64::total_cmp);
        expected.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
        r.check(same_set(&classical.zs(), &expected, 1e-9), || {
            format!("(a) game {}: solver {:?}, exact {expected:?}", rg.index, classical.zs())
        });

        for &a in &RANDOM_ALPHAS {
            let set = match solver.alpha_rne_set(&game, alpha(a)) {
                Ok(s) => s,
                Err(e) => {
                    r.check(false, || format!("game {} alpha={a}: {e}", rg.index));
                    continue;
                }
            };
            if a > 0.5 {
                r.check(same_set(&set.zs(), &classical.zs(), tol.dup), || {
                    format!("(b) game {} alpha={a}: {:?} vs {:?}", rg.index, set.zs(), classical.zs())
                });
            } else {
                for p in &set.points {
                    let in_n1 = classical.contains(p.z, tol.dup);
                    let new = (p.z - a).abs() <= tol.dup || (p.z - (1.0 - a)).abs() <= tol.dup;
                    let outside = p.z <= a + tol.h || p.z >= 1.0 - a - tol.h;
                    r.check((in_n1 || new) && outside, || {
                        format!("(c) game {} alpha={a}: z={} tag={}", rg.index, p.z, p.tag)
                    });
                }
                // Every classical point outside the open interval survives.
                for p in &classical.points {
                    if p.z <= a - 1e-9 || p.z >= 1.0 - a + 1e-9 {
                        r.check(set.contains(p.z, tol.dup), || {
                            format!("(c) game {} alpha={a}: classical {} dropped", rg.index, p.z)
                        });
                    }
                }
            }
            for p in &set.points {
                r.check(p.verified, || format!("(d) game {} alpha={a}: z={} unverified", rg.index, p.z));
                let pair = alpha_rne::ProfilePair::two_action(p.z, p.y).unwrap();
                let v = verify_alpha_rne(&pair, &game.utility(), alpha(a), &tol).unwrap();
                r.check(v.is_yes(), || format!("(d) game {} alpha={a}: z={} {v:?}", rg.index, p.z));
            }
        }
    }
    r.note(format!("{} games x {} alphas, seed {SEED}", games.len(), RANDOM_ALPHAS.len()));
}

fn criterion_5(r: &mut Report) {
    let solver = TwoActionSolver::default();
    let tol = solver.tol;
    let mut prop2_cases = 0;
    for rg in random_games(SEED, 500) {
        let game = rg.game();
        let classical = solver.classical_ne_set(&game).unwrap();
        let us = social_optimum(&game, WELFARE_GRID).value;
        for &a in &RANDOM_ALPHAS {
            let set = solver.alpha_rne_set(&game, alpha(a)).unwrap();
            let report = compare(&game, alpha(a), &set, &solver, WELFARE_GRID).unwrap();
            let us = us.max(report.u_social.value);
            for p in &set.points {
                let ur = utility_rational(&game, alpha(a), p.z, &tol).unwrap();
                let ui = utility_irrational(&game, p.z, &tol).unwrap();
                r.check(ui <= ur + 1e-9 && ui <= us + 1e-9, || {
                    format!("prop1 game {} alpha={a} z={}: u_I={ui} u_R={ur} u_S={us}", rg.index, p.z)
                });
            }
            r.check(report.prop1_holds, || format!("prop1 flag false, game {} alpha={a}", rg.index));
            let subset = set.points.iter().all(|p| classical.contains(p.z, tol.dup));
            if subset {
                prop2_cases += 1;
                for p in &set.points {
                    let ur = utility_rational(&game, alpha(a), p.z, &tol).unwrap();
                    let ui = utility_irrational(&game, p.z, &tol).unwrap();
                    let u1 = utility_classical(&game, p.z);
                    r.check((ur - ui).abs() <= 1e-9 && (ui - u1).abs() <= 1e-9 && us >= ur - 1e-9, || {
                        format!("prop2 game {} alpha={a} z={}: u_R={ur} u_I={ui} u_R1={u1} u_S={us}", rg.index, p.z)
                    });
                }
                r.check(report.prop2 == Some(true), || format!("prop2 flag {:?}, game {} alpha={a}", report.prop2, rg.index));
            }
        }
    }
    r.note(format!("{prop2_cases} (game, alpha) cases had every equilibrium classical"));
}

fn catalog_games() -> Vec<TwoActionGame> {
    let mut v = Vec::new();
    for gamma in [1.25, 2.0, 4.0] {
        v.push(routing_game(RoutingParams::new(gamma).unwrap()).with_name(format!("routing gamma={gamma}")));
    }
    for (c, p) in [(0.5, 0.6), (0.5, 0.1), (0.5, 0.2), (0.5, 0.4)] {
        v.push(participation_game(ParticipationParams::new(c, p).unwrap()).with_name(format!("participation C={c} P={p}")));
    }
    v.push(bandwidth_game(BandwidthParams {}));
    v
}

fn criterion_6(r: &mut Report) {
    let solver = TwoActionSolver::default();
    let mut runs = 0;
    for game in catalog_games() {
        for a in [0.1, 0.25, 0.3, 0.41, 0.5, 0.7, 1.0] {
            let rep = cross_check(&game, alpha(a), &GridSpec::new(400), &solver).unwrap();
            runs += 1;
            r.check(rep.all_matched(), || {
                format!("{} alpha={a}: missed {:?}, spurious {:?}", rep.game, rep.missed, rep.spurious)
            });
        }
    }
    for rg in random_games(SEED ^ 0x5eed, 50) {
        let game = rg.game();
        for a in [0.41, 0.7] {
            let rep = cross_check(&game, alpha(a), &GridSpec::new(200), &solver).unwrap();
            runs += 1;
            r.check(rep.all_matched(), || {
                format!("{} alpha={a}: missed {:?}, spurious {:?}", rep.game, rep.missed, rep.spurious)
            });
        }
    }
    r.note(format!("{runs} cross-checks"));
}

fn criterion_7(r: &mut Report) {
    let tol = Tolerances::default();
    let u = example1_utility();
    let a = alpha(0.3);
    let e = enumerate_alpha_rne(&u, ActionSet::new(3).unwrap(), a, &GridSpec::new(100), &tol).unwrap();
    for target in [[1.0, 0.0, 0.0], [0.3, 0.7, 0.0], [0.3, 0.0, 0.7]] {
        let covered = e.clusters.iter().any(|c| c.distance(&target) <= 1e-9);
        r.check(covered, || format!("no cluster covers {target:?}"));
    }
    r.note(format!("{} clusters, {} grid hits", e.clusters.len(), e.hits.len()));
    for pair in example1_pairs(a).unwrap() {
        let v = verify_alpha_rne(&pair, &u, a, &tol).unwrap();
        r.check(v.is_yes(), || format!("pair {pair:?}: {v:?}"));
    }
}

struct HighlightCase {
    label: &'static str,
    game: TwoActionGame,
    alpha: f64,
    rational_beats_social: bool,
    irrational_beats_classical: bool,
    rational_to_be_irrational: bool,
}

fn criterion_8(r: &mut Report) {
    let solver = TwoActionSolver::default();
    let cases = [
        HighlightCase {
            label: "routing (gamma=2)",
            game: routing_game(RoutingParams::new(2.0).unwrap()),
            alpha: 0.3,
            rational_beats_social: true,
            irrational_beats_classical: false,
            rational_to_be_irrational: false,
        },
        HighlightCase {
            label: "participation, higher P (C=0.5, P=0.6)",
            game: participation_game(ParticipationParams::new(0.5, 0.6).unwrap()),
            alpha: 0.3,
            rational_beats_social: true,
            irrational_beats_classical: false,
            rational_to_be_irrational: false,
        },
        HighlightCase {
            label: "participation, lower P (C=0.5, P=0.2)",
            game: participation_game(ParticipationParams::new(0.5, 0.2).unwrap()),
            alpha: 0.3,
            rational_beats_social: false,
            irrational_beats_classical: true,
            rational_to_be_irrational: false,
        },
        HighlightCase {
            label: "bandwidth",
            game: bandwidth_game(BandwidthParams {}),
            alpha: 0.25,
            rational_beats_social: true,
            irrational_beats_classical: true,
            rational_to_be_irrational: true,
        },
    ];
    for c in cases {
        let a = alpha(c.alpha);
        let set = solver.alpha_rne_set(&c.game, a).unwrap();
        let rep = compare(&c.game, a, &set, &solver, WELFARE_GRID).unwrap();
        let at_alpha = rep.rational_beats_social.iter().any(|&z| (z - c.alpha).abs() <= 1e-9);
        let cells = [
            ("u_R >= u_I", true, rep.prop1_holds),
            ("u_R(alpha) > u_S", c.rational_beats_social, at_alpha),
            ("u_I > u_R1 for some classical", c.irrational_beats_classical, !rep.irrational_beats_some_classical.is_empty()),
            ("rational to be irrational", c.rational_to_be_irrational, rep.rational_to_be_irrational),
        ];
        for (cell, want, got) in cells {
            r.check(want == got, || {
                let classical: Vec<String> = rep.classical.iter().map(|k| format!("{}:{:.4}", k.z, k.utility)).collect();
                let rows: Vec<String> = rep.rows.iter().map(|w| format!("{}:R={:.4},I={:.4}", w.z, w.u_rational, w.u_irrational)).collect();
                format!(
                    "{} alpha={}: cell '{cell}' expected {want}, got {got} (equilibria {}; classical {})",
                    c.label,
                    c.alpha,
                    rows.join(" "),
                    classical.join(" ")
                )
            });
        }
    }
}

fn criterion_9(r: &mut Report) {
    let solver = TwoActionSolver::default();
    let game = TwoActionGame::new("cubic", |z| (z - 0.2) * (z - 0.5) * (z - 0.8), |_| 0.0);
    let classical = solver.classical_ne_set(&game).unwrap();
    let rows = solver.regime_sweep(&game, &[alpha(0.4), alpha(0.6)]).unwrap();
    let tol = solver.tol;

    let low = &rows[0].set;
    r.check(!low.contains(0.5, 1e-9), || format!("0.5 kept at alpha=0.4: {:?}", low.zs()));
    for z in [0.2, 0.8] {
        r.check(low.contains(z, 1e-9), || format!("{z} missing at alpha=0.4: {:?}", low.zs()));
    }
    let expect_alpha = game.h(0.4) >= 0.0;
    let expect_upper = game.h(0.6) <= 0.0;
    let has = |z: f64, tag: PointTag| low.points.iter().any(|p| (p.z - z).abs() <= 1e-9 && p.tag == tag);
    r.check(has(0.4, PointTag::NewAlpha) == expect_alpha, || format!("alpha point: h(0.4)={:e}, set {:?}", game.h(0.4), low.zs()));
    r.check(has(0.6, PointTag::NewOneMinusAlpha) == expect_upper, || format!("1-alpha point: h(0.6)={:e}, set {:?}", game.h(0.6), low.zs()));
    r.check(same_set(&rows[1].set.zs(), &classical.zs(), tol.dup), || {
        format!("alpha=0.6 set {:?} vs classical {:?}", rows[1].set.zs(), classical.zs())
    });
    let expected_low = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
    r.check(same_set(&low.zs(), &expected_low, 1e-9), || format!("alpha=0.4 set {:?}", low.zs()));
    r.note(format!("alpha=0.4 -> {:?}; alpha=0.6 -> {:?}", low.zs(), rows[1].set.zs()));
    // y* is feasible for every emitted point.
    for row in &rows {
        for p in &row.set.points {
            r.check(y_star(p.z, alpha(row.alpha), &tol).is_ok(), || format!("infeasible {}", p.z));
        }
    }
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn(&mut Report)); 9] = [
        (1, "routing case table", criterion_1),
        (2, "participation case tables", criterion_2),
        (3, "bandwidth equilibria and utilities", criterion_3),
        (4, "equilibrium set properties on random games", criterion_4),
        (5, "utility comparisons on random games", criterion_5),
        (6, "grid oracle agreement", criterion_6),
        (7, "three-action example", criterion_7),
        (8, "welfare highlight flags", criterion_8),
        (9, "regime picture", criterion_9),
    ];
    let mut failed = 0;
    for (n, name, run) in criteria {
        let start = Instant::now();
        let mut r = Report::default();
        run(&mut r);
        let status = if r.failures.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "criterion {n} ({name}): {status} [{} checks, {} failed, {:.2}s]",
            r.checks,
            r.failures.len(),
            start.elapsed().as_secs_f64()
        );
        for f in r.failures.iter().take(12) {
            println!("    fail: {f}");
        }
        if r.failures.len() > 12 {
            println!("    ... {} more", r.failures.len() - 12);
        }
        for note in &r.notes {
            println!("    note: {note}");
        }
        if !r.failures.is_empty() {
            failed += 1;
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
