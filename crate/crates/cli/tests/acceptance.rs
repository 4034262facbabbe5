//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use posperturb_core::numerics::{
    composite_gauss_legendre, duhamel_block, mat_exp, Matrix, QuadratureSpec,
};
use posperturb_core::scenarios::{
    scenario_delay, scenario_metzler_random, scenario_rank_one_lp, Scenario,
};
use posperturb_core::semigroups::{
    check_resolvent_convergence, check_semigroup_law, gauss_weierstrass_matrix, Lattice,
    SemigroupHandle,
};
use posperturb_core::spaces::{Exponent, GridSpace};
use posperturb_core::verifier::{
    check_corollary, check_extra_assumption, check_statement_b, check_statement_c,
    check_strong_inequality, check_voc_identity, equivalence_sweep, laplace_of_slack_a, st_pairs,
    CorollaryConstants, SweepSettings, Verdict, DEFAULT_TIMES,
};
use posperturb_core::Execution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

const SWEEP_SEEDS: u64 = 200;

fn criterion_1() -> Outcome {
    let seeds: Vec<u64> = (0..SWEEP_SEEDS).collect();
    let start = Instant::now();
    let out =
        equivalence_sweep(&seeds, &SweepSettings::default(), Execution::Parallel).map_err(err)?;
    let elapsed = start.elapsed().as_secs_f64();
    let disagreements = out.iter().filter(|o| !o.verdict.agreement).count();
    let marginal = out
        .iter()
        .filter(|o| {
            o.verdict
                .reports()
                .iter()
                .any(|r| r.verdict == Verdict::Marginal)
        })
        .count();
    ensure(disagreements == 0, || {
        format!("{disagreements} disagreements")
    })?;
    ensure(elapsed < 60.0, || format!("took {elapsed:.1} s"))?;
    Ok(format!(
        "{} instances, 0 disagreements, {marginal} with a marginal statement, {elapsed:.2} s",
        out.len()
    ))
}

fn criterion_2() -> Outcome {
    let settings = SweepSettings::default();
    let span = (settings.n_max - settings.n_min + 1) as u64;
    let mut disagreements = 0;
    for seed in 0..SWEEP_SEEDS {
        let n = settings.n_min + (seed % span) as usize;
        let scn = scenario_metzler_random(n, seed, settings.gap).map_err(err)?;
        let w = scn.x.weights();
        let (a_s, a_t) = (scn.s.generator(), scn.t.generator());
        let mut oracle = true;
        for i in 0..n {
            for j in 0..n {
                if w[i] * (a_s[(i, j)] + scn.b[(i, j)] - a_t[(i, j)]) < -settings.tol {
                    oracle = false;
                }
            }
        }
        let c = check_statement_c(&scn, settings.tol).map_err(err)?;
        if c.holds() != oracle {
            disagreements += 1;
        }
    }
    ensure(disagreements == 0, || {
        format!("{disagreements} disagreements")
    })?;
    Ok(format!("{SWEEP_SEEDS} instances, 0 disagreements"))
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, max_norm: f64) -> Matrix {
    let m = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let scale = rng.random_range(0.0..=max_norm) / m.norm_1().max(1e-300);
    m.scale(scale)
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a_s = random_matrix(&mut rng, 4, 1.0);
        let b = random_matrix(&mut rng, 4, 1.0);
        let a_t = random_matrix(&mut rng, 4, 1.0);
        let t = rng.random_range(0.0..=2.0);
        let exact = duhamel_block(&a_s, &b, &a_t, t).map_err(err)?;
        let scale = exact.max_abs().max(1e-300);
        for i in 0..4 {
            for j in 0..4 {
                let q = composite_gauss_legendre(
                    |s| {
                        let m = mat_exp(&a_s, t - s).unwrap().mul(&b).unwrap();
                        m.mul(&mat_exp(&a_t, s).unwrap()).unwrap()[(i, j)]
                    },
                    0.0,
                    t,
                    64,
                    4,
                );
                worst = worst.max((q - exact[(i, j)]).abs() / scale);
            }
        }
    }
    ensure(worst <= 1e-8, || format!("relative deviation {worst:.3e}"))?;
    Ok(format!("50 triples, worst relative deviation {worst:.2e}"))
}

fn rank_one(a_s: &[Vec<f64>], a_t: &[Vec<f64>]) -> posperturb_core::Result<Scenario> {
    let n = a_s.len();
    let sp = Arc::new(GridSpace::uniform("X", n, Exponent::Finite(2.0))?);
    let one = sp.element(vec![1.0; n])?;
    scenario_rank_one_lp(
        2.0,
        2.0,
        &one,
        &one,
        &Matrix::from_rows(a_s)?,
        &Matrix::from_rows(a_t)?,
    )
}

fn criterion_4() -> Outcome {
    let instances = vec![
        rank_one(&[vec![-1.0]], &[vec![-0.5]]).map_err(err)?,
        rank_one(&[vec![-1.0]], &[vec![0.5]]).map_err(err)?,
        rank_one(
            &[vec![-2.0, 0.5], vec![0.3, -1.0]],
            &[vec![-1.5, 1.0], vec![0.2, -0.8]],
        )
        .map_err(err)?,
        scenario_metzler_random(2, 1, 0.5).map_err(err)?,
        scenario_metzler_random(2, 3, 0.5).map_err(err)?,
    ];
    let spec = QuadratureSpec::default();
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for scn in &instances {
        let (xs, vs) = (scn.k_samples(), scn.l_samples());
        for lambda in [scn.omega + 1.0, scn.omega + 5.0] {
            let b = check_statement_b(scn, &[lambda], 1e-8).map_err(err)?;
            for e in &b.entries {
                let lap = laplace_of_slack_a(scn, lambda, &xs[e.x_index], &vs[e.v_index], &spec)
                    .map_err(err)?;
                worst = worst.max((lap.value - e.slack).abs());
                pairs += 1;
            }
        }
    }
    ensure(worst <= 1e-6, || format!("deviation {worst:.3e}"))?;
    Ok(format!(
        "{pairs} (sample, λ) pairs, worst deviation {worst:.2e}"
    ))
}

fn criterion_5() -> Outcome {
    let one_d = Arc::new(GridSpace::uniform("X", 1, Exponent::Finite(2.0)).map_err(err)?);
    let s =
        SemigroupHandle::matrix_exp("S", Matrix::from_diag(&[-1.0]), one_d.clone()).map_err(err)?;
    let one = one_d.element(vec![1.0]).map_err(err)?;
    let lambdas = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
    let r = check_resolvent_convergence(&s, &one, &one, &lambdas, 1.0).map_err(err)?;
    let exact_dev = r
        .errors
        .iter()
        .zip(lambdas)
        .map(|(e, l)| (e - 1.0 / (l + 1.0)).abs())
        .fold(0.0, f64::max);
    ensure(exact_dev <= 1e-15, || {
        format!("scalar deviation {exact_dev:.3e}")
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 4;
    let mut a = Matrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { rng.random::<f64>() });
    for i in 0..n {
        a[(i, i)] = -rng.random_range(0.0..3.0);
    }
    let sp = Arc::new(GridSpace::uniform("X", n, Exponent::Finite(2.0)).map_err(err)?);
    let g = SemigroupHandle::matrix_exp("S", a, sp.clone()).map_err(err)?;
    let y = sp.element(vec![1.0, 0.5, 0.25, 2.0]).map_err(err)?;
    let e = sp.element(vec![0.3, 1.0, 0.7, 0.1]).map_err(err)?;
    let omega = g.bound().omega;
    let lambdas: Vec<f64> = [10.0, 20.0, 40.0, 80.0, 160.0]
        .iter()
        .map(|d| omega + d)
        .collect();
    let r = check_resolvent_convergence(&g, &y, &e, &lambdas, 0.1).map_err(err)?;
    let non_increasing = r.errors.windows(2).all(|w| w[1] <= w[0]);
    let slope = r.log_log_slope.ok_or("no slope")?;
    ensure(non_increasing, || format!("errors {:?}", r.errors))?;
    ensure(slope > -1.2 && slope < -0.8, || format!("slope {slope}"))?;
    Ok(format!(
        "scalar deviation {exact_dev:.1e}, generic slope {slope:.3}"
    ))
}

fn criterion_6() -> Outcome {
    let lat = Lattice::with_spacing(1, 8.0, 0.05).map_err(err)?;
    let h = lat.spacing();
    let centre = (lat.len() - 1) / 2;
    let (mut peak, mut rows) = (0.0f64, 0.0f64);
    for t in [0.01, 0.05, 0.1] {
        let k = gauss_weierstrass_matrix(t, &lat).map_err(err)?;
        let closed = h * (4.0 * std::f64::consts::PI * t).powf(-0.5);
        peak = peak.max((k[(centre, centre)] - closed).abs());
        for i in lat.interior(8.0 * f64::sqrt(t)) {
            rows = rows.max((k.row(i).iter().sum::<f64>() - 1.0).abs());
        }
    }
    let sp = Arc::new(GridSpace::new("X", lat.weights(), Exponent::Finite(2.0)).map_err(err)?);
    let s = SemigroupHandle::gauss_kernel("S", lat, sp).map_err(err)?;
    let law = check_semigroup_law(&s, &[0.0, 0.01, 0.02, 0.05], 1e-4).map_err(err)?;
    ensure(peak <= 1e-12, || format!("k_t(0) deviation {peak:.3e}"))?;
    ensure(rows <= 1e-6, || format!("row sum deviation {rows:.3e}"))?;
    ensure(law.passed, || {
        format!("law residual {:.3e}", law.max_residual)
    })?;
    Ok(format!(
        "k_t(0) {peak:.1e}, interior row sums {rows:.1e}, law {:.1e}",
        law.max_residual
    ))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let (mut voc, mut strong) = (0.0f64, f64::INFINITY);
    for m in [10, 20, 40] {
        let density = vec![1.0; m];
        let scn = scenario_delay(&Matrix::from_diag(&[-1.0]), &density, &density, 2.0, 2.0, m)
            .map_err(err)?;
        let v = check_voc_identity(&scn, &DEFAULT_TIMES, 1e-9).map_err(err)?;
        let s = check_strong_inequality(&scn, &DEFAULT_TIMES, 1e-8).map_err(err)?;
        voc = voc.max(v.max_residual);
        strong = strong.min(s.min_slack);
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(voc <= 1e-9, || format!("voc residual {voc:.3e}"))?;
    ensure(strong >= -1e-8, || format!("strong slack {strong:.3e}"))?;
    ensure(elapsed < 10.0, || format!("took {elapsed:.1} s"))?;
    Ok(format!(
        "voc residual {voc:.1e}, strong min slack {strong:.1e}, {elapsed:.2} s"
    ))
}

/// Metzler pair whose row and column sums are bounded by the returned ω,
/// so both semigroups are contractive up to `e^{ωt}` in every lp norm.
fn corollary_pair(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, f64) {
    let gen = |rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            -rng.random_range(0.5..3.0)
                        } else {
                            rng.random::<f64>()
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let (a_s, a_t) = (gen(rng), gen(rng));
    let mut omega = f64::NEG_INFINITY;
    for a in [&a_s, &a_t] {
        for (i, row) in a.iter().enumerate() {
            omega = omega.max(row.iter().sum());
            omega = omega.max((0..n).map(|k| a[k][i]).sum());
        }
    }
    (a_s, a_t, omega)
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let tol = 1e-8;
    let (mut qualifying, mut tried) = (0, 0);
    for k in 0..60 {
        let n = 2 + k % 4;
        let (a_s, a_t, omega) = corollary_pair(&mut rng, n);
        tried += 1;
        let scn = rank_one(&a_s, &a_t).map_err(err)?;
        let m = 1.0;
        let c3 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| a_t[i][j] - a_s[i][j])
            .fold(0.0, f64::max)
            + 0.05;
        let c1 = m * c3;
        let constants = CorollaryConstants {
            m,
            omega,
            c1,
            c2: c1,
            c3,
        };
        let extra =
            check_extra_assumption(&scn, m, omega, &st_pairs(&DEFAULT_TIMES), tol).map_err(err)?;
        if !extra.holds() {
            continue;
        }
        let lambdas: Vec<f64> = [1.0, 2.0, 5.0, 10.0].iter().map(|d| omega + d).collect();
        let r = check_corollary(&scn, constants, &DEFAULT_TIMES, &lambdas, tol).map_err(err)?;
        if !r.c.holds() {
            continue;
        }
        qualifying += 1;
        ensure(r.a.holds(), || format!("instance {k}: {}", r.a.summary()))?;
        ensure(r.b.holds(), || format!("instance {k}: {}", r.b.summary()))?;
    }
    ensure(qualifying * 2 >= tried, || {
        format!("only {qualifying} of {tried} instances qualify")
    })?;
    Ok(format!(
        "{qualifying} of {tried} instances qualify, corollary (a) and (b) hold on all"
    ))
}

const SUITE: [&str; 6] = [
    r#"{"scenario": {"kind": "metzler-random", "seed": 1}}"#,
    r#"{"scenario": {"kind": "metzler-random", "n": 6, "seed": 0}, "checks": ["equivalence", "strong", "invariance"]}"#,
    r#"{"scenario": {"kind": "heat-drift"}}"#,
    r#"{"scenario": {"kind": "rank-one-linfty"}, "checks": ["equivalence", "invariance"]}"#,
    r#"{"scenario": {"kind": "rank-one-lp"}, "checks": ["equivalence", "corollary"], "corollary": {"m": 1.0, "omega": -1.0, "c3": 0.55}}"#,
    r#"{"scenario": {"kind": "delay", "m": 20}}"#,
];

fn run_suite(root: &Path) -> Result<Vec<(String, String)>, String> {
    let out = root.join("reports");
    for (i, doc) in SUITE.iter().enumerate() {
        let cfg = root.join(format!("run{i}.json"));
        std::fs::write(&cfg, doc).map_err(err)?;
        let status = Command::new(env!("CARGO_BIN_EXE_posperturb"))
            .args([
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .map_err(err)?
            .status;
        ensure(matches!(status.code(), Some(0) | Some(2)), || {
            format!("config {i} exited with {status}")
        })?;
    }
    let mut files: Vec<(String, String)> = std::fs::read_dir(&out)
        .map_err(err)?
        .map(|e| {
            let p = e.unwrap().path();
            let text = std::fs::read_to_string(&p).unwrap();
            let kept: String = text
                .split_inclusive('\n')
                .filter(|l| !l.trim_start().starts_with("\"timestamp\":"))
                .collect();
            (p.file_name().unwrap().to_string_lossy().into_owned(), kept)
        })
        .collect();
    files.sort();
    Ok(files)
}

fn criterion_9() -> Outcome {
    let a = tempfile::tempdir().map_err(err)?;
    let b = tempfile::tempdir().map_err(err)?;
    let first = run_suite(a.path())?;
    let second = run_suite(b.path())?;
    ensure(first.len() == 2 * SUITE.len(), || {
        format!("{} report files", first.len())
    })?;
    let names: Vec<_> = first.iter().map(|f| &f.0).collect();
    ensure(
        names == second.iter().map(|f| &f.0).collect::<Vec<_>>(),
        || "file sets differ".into(),
    )?;
    for (x, y) in first.iter().zip(&second) {
        ensure(x.1 == y.1, || format!("{} differs", x.0))?;
    }
    let bytes: usize = first.iter().map(|f| f.1.len()).sum();
    Ok(format!("{} reports, {bytes} bytes, identical", first.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("equivalence sweep", criterion_1),
        ("statement (c) oracle", criterion_2),
        ("Duhamel oracle", criterion_3),
        ("Laplace consistency", criterion_4),
        ("resolvent convergence", criterion_5),
        ("kernel fidelity", criterion_6),
        ("delay battery", criterion_7),
        ("corollary chain", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>())));
        match result {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
