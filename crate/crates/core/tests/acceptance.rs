//! The acceptance criteria, run in order on one thread (two of them are timed).
//! Each prints a single `AC<n> PASS|FAIL: ...` line to stderr, bypassing the
//! harness capture so the lines show up in ordinary `cargo test` output.

mod common;

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavelet_wasserstein::distance::{distance_new, distance_original, level_weight, DistanceConfig, Formulation};
use wavelet_wasserstein::measures::{discretize, Density};
use wavelet_wasserstein::ot::{exact_ws, w1_cdf};
use wavelet_wasserstein::simulation::{run_simulation, Family, SimulationRow, SimulationSpec};
use wavelet_wasserstein::wavelet::{
    decompose_call_count, dwt_decompose, dwt_reconstruct, Mode, WaveletSystem, CATALOG,
};
use wavelet_wasserstein::wlot::{embed, embed_all, pairwise_distances, wlot_distance};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac1_perfect_reconstruction() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for name in CATALOG {
        let system = WaveletSystem::build(name).unwrap();
        for m in 1..=12 {
            let x: Vec<f64> = (0..1usize << m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for mode in [Mode::Zero, Mode::Periodic] {
                let pyramid = dwt_decompose(&x, 0, &system, m, mode).unwrap();
                let back = dwt_reconstruct(&pyramid, &system).unwrap();
                assert_eq!(back.len(), x.len());
                for (a, b) in x.iter().zip(&back) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-10 && secs < 5.0,
        format!("max error {worst:.2e} over {} wavelets, m=1..12, both modes, {secs:.2}s", CATALOG.len()),
    )
}

fn ac2_filter_identities() -> Outcome {
    let mut worst = 0.0f64;
    for name in CATALOG {
        let system = WaveletSystem::build(name).unwrap();
        system.check_identities(1e-12).map_err(|e| format!("{name}: {e}"))?;
        // recompute independently of the library check
        let (g, h) = (system.g(), system.h());
        let l = g.len();
        worst = worst.max((g.iter().sum::<f64>() - 2f64.sqrt()).abs());
        worst = worst.max(h.iter().sum::<f64>().abs());
        for shift in (0..l).step_by(2) {
            let dot = |a: &[f64], b: &[f64]| (0..l - shift).map(|n| a[n] * b[n + shift]).sum::<f64>();
            let delta = if shift == 0 { 1.0 } else { 0.0 };
            worst = worst.max((dot(g, g) - delta).abs());
            worst = worst.max((dot(h, h) - delta).abs());
            worst = worst.max(dot(g, h).abs()).max(dot(h, g).abs());
        }
        for n in 0..l {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            worst = worst.max((h[n] - sign * g[l - 1 - n]).abs());
        }
    }
    check(worst <= 1e-12, format!("max identity residual {worst:.2e}"))
}

fn ac3_solver_oracles() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_cdf = 0.0f64;
    for _ in 0..200 {
        let (n, m) = (rng.gen_range(1..=200), rng.gen_range(1..=200));
        let mu = common::random_measure(&mut rng, n);
        let nu = common::random_measure(&mut rng, m);
        let (cost, _) = exact_ws(&mu, &nu, 1.0).unwrap();
        worst_cdf = worst_cdf.max((cost - w1_cdf(&mu, &nu).unwrap()).abs());
    }
    let mut worst_lp = 0.0f64;
    for _ in 0..30 {
        let (n, m) = (rng.gen_range(1..=12), rng.gen_range(1..=12));
        let mu = common::random_measure(&mut rng, n);
        let nu = common::random_measure(&mut rng, m);
        for s in [0.25, 0.5, 1.0] {
            let (cost, _) = exact_ws(&mu, &nu, s).unwrap();
            worst_lp = worst_lp.max((cost - common::lp_oracle(&mu, &nu, s)).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst_cdf <= 1e-7 && worst_lp <= 1e-8 && secs < 30.0,
        format!("cdf gap {worst_cdf:.2e} (200 pairs), LP gap {worst_lp:.2e} (30 pairs x 3 s), {secs:.2}s"),
    )
}

fn ac4_jensen_and_convergence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut min_slack = f64::INFINITY;
    let mut non_monotone = 0;
    for _ in 0..20 {
        let mu = common::random_measure(&mut rng, 40);
        let nu = common::random_measure(&mut rng, 40);
        let w1 = w1_cdf(&mu, &nu).unwrap();
        for s in [0.25, 0.5, 0.75] {
            min_slack = min_slack.min(w1.powf(s) - exact_ws(&mu, &nu, s).unwrap().0);
        }
        let gaps: Vec<f64> = [0.9, 0.99, 0.999]
            .iter()
            .map(|&s| {
                let ws = exact_ws(&mu, &nu, s).unwrap().0;
                min_slack = min_slack.min(w1.powf(s) - ws);
                (ws - w1).abs()
            })
            .collect();
        if !(gaps[1] < gaps[0] && gaps[2] < gaps[1]) {
            non_monotone += 1;
        }
    }
    check(
        min_slack >= -1e-9 && non_monotone == 0,
        format!("min Jensen slack {min_slack:.2e}; {non_monotone}/20 pairs with non-decreasing |W_s - W_1|"),
    )
}

fn ac5_original_formulation_blind_spot() -> Outcome {
    let p = Density::uniform(0.0, 1.0).unwrap();
    let grid = (0.0, 16.0);
    let base = discretize(&p, grid, 1025).unwrap();
    let mut detail = Vec::new();
    let mut ok = true;
    // wavelets supported in [0, 4], shifted by their support length
    for wavelet in ["haar", "db2"] {
        let t = WaveletSystem::build(wavelet).unwrap().support_length() as f64;
        for s in [0.5, 1.0] {
            let cfg = DistanceConfig::new(s, -4, 12, wavelet, Formulation::Original);
            let wavelet_values: Vec<f64> = (0..5)
                .map(|m| distance_original(&p, &p.translate(t + m as f64), &cfg).unwrap())
                .collect();
            let spread = wavelet_values.iter().map(|v| (v - wavelet_values[0]).abs()).fold(0.0, f64::max);
            let exact: Vec<f64> = (0..5)
                .map(|m| {
                    let moved = discretize(&p.translate(t + m as f64), grid, 1025).unwrap();
                    exact_ws(&base, &moved, s).unwrap().0
                })
                .collect();
            let increasing = exact.windows(2).all(|w| w[1] > w[0]);
            ok &= spread <= 1e-8 && increasing;
            detail.push(format!(
                "{wavelet} s={s}: wavelet spread {spread:.1e}, exact {:.3}..{:.3} increasing={increasing}",
                exact[0], exact[4]
            ));
        }
    }
    check(ok, detail.join("; "))
}

// The sampled initialization has a first-order error in 2^(j'-J), so the
// finest level j' = -4 needs J = 9 to stay well inside 1%.
const IDENTITY_J0: i32 = -11;
const IDENTITY_LEVELS: u32 = 20;

fn ac6_level_sum_identity() -> Outcome {
    let mut worst = 0.0f64;
    for a in [[1.0, 1.0, 1.0], [1.0, 2.0, 4.0], [5.0, 0.0, 3.0]] {
        for s in [0.25, 0.5, 1.0] {
            let terms: Vec<(i32, i64, f64)> = [-6, -5, -4]
                .into_iter()
                .zip(a)
                .filter(|&(_, aj)| aj != 0.0)
                .map(|(j, aj)| (j, 0, aj / level_weight(j, s)))
                .collect();
            let (mu, nu, c) = common::wavelet_part_pair("db10", &terms);
            let cfg = DistanceConfig::new(s, IDENTITY_J0, IDENTITY_LEVELS, "db10", Formulation::New);
            let expected = a.iter().sum::<f64>() / c;
            let d = distance_new(&mu, &nu, &cfg).unwrap();
            worst = worst.max((d / expected - 1.0).abs());
        }
    }
    check(
        worst < 0.01,
        format!("max relative error {:.3}% (db10, levels -6..-4, j0=-11, M=20)", 100.0 * worst),
    )
}

fn ac7_single_wavelet_identity() -> Outcome {
    let j = -6;
    let (mu, nu, c) = common::wavelet_part_pair("db10", &[(j, 0, 1.0)]);
    let mut worst = 0.0f64;
    for s in [0.25, 0.5] {
        let cfg = DistanceConfig::new(s, IDENTITY_J0, IDENTITY_LEVELS, "db10", Formulation::New);
        let expected = level_weight(j, s) / c;
        worst = worst.max((distance_new(&mu, &nu, &cfg).unwrap() / expected - 1.0).abs());
    }
    check(
        worst < 0.01,
        format!("max relative error {:.3}% (db10, j'=-6, j0=-11, M=20)", 100.0 * worst),
    )
}

const EXACT_POINTS: usize = 300;

fn simulate(family: Family, formulation: Formulation, j0: i32, levels: u32, s_values: &[f64]) -> Vec<SimulationRow> {
    let mut spec = SimulationSpec::new(family, formulation);
    spec.cfg.j0 = j0;
    spec.cfg.levels = levels;
    spec.s_values = s_values.to_vec();
    spec.exact_grid_points = EXACT_POINTS;
    run_simulation(&spec).unwrap()
}

fn max_deviation<'a>(rows: impl IntoIterator<Item = &'a SimulationRow>) -> f64 {
    rows.into_iter()
        .filter(|r| r.exact_value > 0.0)
        .map(|r| (r.normalized_value / r.exact_value - 1.0).abs())
        .fold(0.0, f64::max)
}

fn ac8_translation_tracking() -> Outcome {
    let in_range = |r: &&SimulationRow| (0.4..=2.0).contains(&r.param);
    let new = simulate(Family::UniformTranslate, Formulation::New, -11, 18, &[1.0]);
    let original = simulate(Family::UniformTranslate, Formulation::Original, -11, 18, &[1.0]);
    let (dev_new, dev_orig) = (max_deviation(new.iter().filter(in_range)), max_deviation(original.iter().filter(in_range)));
    let c = new[0].norm_constant;
    check(
        dev_new < 0.15 && dev_orig >= 0.15 && (1.0 / 140.0..=1.0 / 90.0).contains(&c),
        format!(
            "new max deviation {:.1}%, original {:.1}%, fitted c = 1/{:.1}",
            100.0 * dev_new,
            100.0 * dev_orig,
            1.0 / c
        ),
    )
}

fn ac9_dilation_tracking() -> Outcome {
    let rows = simulate(Family::BumpDilate, Formulation::New, -9, 18, &[1.0, 0.5]);
    let mut detail = Vec::new();
    let mut ok = true;
    for s in [1.0, 0.5] {
        let group: Vec<&SimulationRow> = rows.iter().filter(|r| r.s == s).collect();
        let dev = max_deviation(group.iter().copied());
        ok &= dev < 0.10;
        detail.push(format!("s={s}: max deviation {:.1}% (c = 1/{:.1})", 100.0 * dev, 1.0 / group[0].norm_constant));
    }
    check(ok, detail.join("; "))
}

fn ac10_wlot_consistency() -> Outcome {
    let cfg = DistanceConfig::new(0.5, -5, 14, "db6", Formulation::New);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = common::random_density(&mut rng, 16.0);
        let q = common::random_density(&mut rng, 16.0);
        let s = [0.25, 0.5, 1.0][rng.gen_range(0..3)];
        let cfg = cfg.clone().with_s(s);
        let direct = distance_new(&p, &q, &cfg).unwrap();
        let embedded = wlot_distance(&embed(&p, &cfg).unwrap(), &embed(&q, &cfg).unwrap(), s).unwrap();
        worst = worst.max((direct - embedded).abs());
    }

    let ps: Vec<Density> = (0..10).map(|_| common::random_density(&mut rng, 16.0)).collect();
    let before = decompose_call_count();
    let vectors = embed_all(&ps, &cfg).unwrap();
    pairwise_distances(&vectors, 0.5).unwrap();
    let calls = decompose_call_count() - before;

    let sparse_cfg = DistanceConfig::new(1.0, -11, 16, "db10", Formulation::New);
    let support = WaveletSystem::build("db10").unwrap().support_length() as f64;
    let mut violations = 0;
    for (p, width) in [
        (Density::uniform(0.0, 1.0).unwrap(), 1.0),
        (Density::uniform(2.0, 4.5).unwrap(), 2.5),
        (Density::bump(0.5, 0.5).unwrap(), 1.0),
        (Density::bump(3.0, 1.5).unwrap(), 3.0),
    ] {
        for (j, count) in embed(&p, &sparse_cfg).unwrap().nonzeros_per_level() {
            if count as f64 > (j as f64).exp2() * width + 2.0 * support + 2.0 {
                violations += 1;
            }
        }
    }
    check(
        worst <= 1e-10 && calls == ps.len() && violations == 0,
        format!(
            "max gap {worst:.1e} on 50 pairs; {calls} transforms for {} measures; {violations} sparsity violations",
            ps.len()
        ),
    )
}

fn fitted_constants(rows: &[SimulationRow], s: f64) -> f64 {
    rows.iter().find(|r| r.s == s).unwrap().norm_constant
}

fn ac11_stability_sweeps() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();

    // constants across M at fixed j0
    for (family, j0) in [(Family::BumpTranslate, -11), (Family::BumpDilate, -9)] {
        let runs: Vec<Vec<SimulationRow>> =
            [14, 16, 18].iter().map(|&m| simulate(family, Formulation::New, j0, m, &[1.0, 0.5])).collect();
        for s in [1.0, 0.5] {
            let inverse: Vec<f64> = runs.iter().map(|rows| 1.0 / fitted_constants(rows, s)).collect();
            let (lo, hi) = inverse.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            let spread = hi / lo - 1.0;
            ok &= spread < 0.10;
            detail.push(format!(
                "{family} s={s} 1/c over M=14,16,18: {:.1}/{:.1}/{:.1} ({:.1}%)",
                inverse[0],
                inverse[1],
                inverse[2],
                100.0 * spread
            ));
        }
    }

    // tracking at large translations as j0 drops with j0 + M = 11 fixed
    let runs: Vec<Vec<SimulationRow>> = [(-5, 16), (-8, 19), (-11, 22)]
        .iter()
        .map(|&(j0, m)| simulate(Family::BumpTranslate, Formulation::New, j0, m, &[1.0, 0.5]))
        .collect();
    for s in [1.0, 0.5] {
        let errors: Vec<f64> = runs
            .iter()
            .map(|rows| max_deviation(rows.iter().filter(|r| r.s == s && r.param >= 1.0)))
            .collect();
        let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
        ok &= decreasing;
        detail.push(format!(
            "bump_translate s={s} error on a>=1 for j0=-5,-8,-11: {:.2}%/{:.2}%/{:.2}%",
            100.0 * errors[0],
            100.0 * errors[1],
            100.0 * errors[2]
        ));
    }
    check(ok, detail.join("; "))
}

fn ac12_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_wavws"))
            .args(["simulate", "--family", "bump_translate", "--count", "6", "--levels", "16"])
            .args(["--exact-points", "300", "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(path).unwrap()
    };
    let (first, second) = (run("a.csv"), run("b.csv"));
    check(
        first == second && !first.is_empty(),
        format!("two runs wrote {} and {} bytes, identical={}", first.len(), second.len(), first == second),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [(u32, fn() -> Outcome); 12] = [
        (1, ac1_perfect_reconstruction),
        (2, ac2_filter_identities),
        (3, ac3_solver_oracles),
        (4, ac4_jensen_and_convergence),
        (5, ac5_original_formulation_blind_spot),
        (6, ac6_level_sum_identity),
        (7, ac7_single_wavelet_identity),
        (8, ac8_translation_tracking),
        (9, ac9_dilation_tracking),
        (10, ac10_wlot_consistency),
        (11, ac11_stability_sweeps),
        (12, ac12_determinism),
    ];
    let mut failed = Vec::new();
    for (n, criterion) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(criterion))
            .unwrap_or_else(|panic| Err(format!("panicked: {panic:?}")));
        let line = match &outcome {
            Ok(detail) => format!("AC{n} PASS: {detail}"),
            Err(detail) => {
                failed.push(n);
                format!("AC{n} FAIL: {detail}")
            }
        };
        writeln!(std::io::stderr(), "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
