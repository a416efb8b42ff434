//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
//!
//! Pass criterion numbers as arguments to run a subset, e.g.
//! `cargo test -p disclab-cli --test acceptance -- 3 5`.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use disclab::rng::derive_seed;
use disclab::{
    build_vaaler_matrix, count_small_support, evaluate, full_coloring, generate, iterate_partial, membership,
    scan_verdicts, select_lambda, signed_sum, solve_exhaustive, solve_komlos_partial, support_threshold,
    transpose_reduce, volume_check, Coloring, Family, GeneratorSpec, Instance64, KomlosInstance64, Method, NormModel,
    SolverBudget, DEFAULT_DELTA,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CONSTANT: f64 = 14.0;

type Criterion = (usize, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rows(family: Family, n: usize, m: usize, seed: u64) -> Instance64 {
    generate::<f64>(&GeneratorSpec { family, n, m, seed })
        .unwrap()
        .into_rows()
        .unwrap()
}

fn unit_columns(n: usize, m: usize, seed: u64) -> KomlosInstance64 {
    generate::<f64>(&GeneratorSpec {
        family: Family::RandomUnitColumns,
        n,
        m,
        seed,
    })
    .unwrap()
    .into_columns()
    .unwrap()
}

fn random_signs_kashin(n: usize, m: usize, seed: u64) -> Instance64 {
    rows(Family::RandomSigns, n, m, seed)
        .scaled(1.0 / (n as f64).sqrt(), NormModel::KashinSumSq)
        .unwrap()
}

/// Hadamard rows with seeded column signs (still a Hadamard block).
fn signed_hadamard(n: usize, m: usize, seed: u64) -> Instance64 {
    let h = rows(Family::Hadamard, n, m, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signs: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
    let entries = h
        .rows()
        .flat_map(|r| r.iter().zip(&signs).map(|(v, s)| v * s).collect::<Vec<_>>())
        .collect();
    Instance64::from_row_major(NormModel::KashinSumSq, m, n, entries).unwrap()
}

/// All mass on one row: `sqrt(m/n)` times a sign vector, the rest zero.
/// The row constraint of the body is active for these.
fn heavy_row_kashin(n: usize, m: usize, seed: u64) -> Instance64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = (m as f64 / n as f64).sqrt();
    let mut entries = vec![0.0; m * n];
    for v in entries.iter_mut().take(n) {
        *v = if rng.random::<bool>() { a } else { -a };
    }
    Instance64::from_row_major(NormModel::KashinSumSq, m, n, entries).unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

fn criterion_1() -> Outcome {
    let mut cells = Vec::new();
    for n in 6..=14 {
        for m in [n, 2 * n, 4 * n] {
            cells.push((n, m));
        }
    }
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for (name, make) in [
        ("hadamard", signed_hadamard as fn(usize, usize, u64) -> Instance64),
        ("random-signs", random_signs_kashin),
    ] {
        for i in 0..200u64 {
            let (n, m) = cells[i as usize % cells.len()];
            let a = make(n, m, derive_seed(1, &[i]));
            let r = solve_exhaustive(&a, support_threshold(n)).unwrap();
            let bound = CONSTANT * (m as f64 / n as f64).sqrt();
            worst = worst.max(r.report.max_abs / bound);
            checked += 1;
            if r.coloring.support() < support_threshold(n) || r.report.max_abs > bound || !r.optimal {
                failures.push(format!("{name} n={n} m={m} i={i}"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{checked} instances, {} failures, worst max_abs / (14 sqrt(m/n)) = {worst:.4}{}",
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    )
}

/// Ternary vectors of length `n` with at most `n / 6` nonzeros, by enumeration.
fn brute_count(n: usize) -> u64 {
    let limit = n / 6;
    let mut digits = vec![0u8; n];
    let mut nonzero = 0usize;
    let mut count = 0u64;
    loop {
        if nonzero <= limit {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == n {
                return count;
            }
            match digits[i] {
                0 => {
                    digits[i] = 1;
                    nonzero += 1;
                    break;
                }
                1 => {
                    digits[i] = 2;
                    break;
                }
                _ => {
                    digits[i] = 0;
                    nonzero -= 1;
                    i += 1;
                }
            }
        }
    }
}

fn criterion_2() -> Outcome {
    let mut bad = Vec::new();
    for n in 1..=14 {
        let exact = count_small_support(n).unwrap().exact;
        if exact != brute_count(n).into() {
            bad.push(n);
        }
    }
    outcome(
        bad.is_empty(),
        format!("n = 1..=14 exact integer match, mismatches at {bad:?}"),
    )
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let scan = scan_verdicts(DEFAULT_DELTA, 10_000).unwrap();
    let elapsed = t.elapsed();
    outcome(
        scan.first_failure.is_none() && elapsed < Duration::from_secs(1),
        format!(
            "n = 1..=10000, first failure {:?}, scan took {:.3} s",
            scan.first_failure,
            elapsed.as_secs_f64()
        ),
    )
}

fn volume_instances() -> Vec<(String, Instance64)> {
    let mut out = Vec::new();
    for k in 0..10u64 {
        let n = 3 + k as usize % 10;
        let m = [n, 2 * n, n.div_ceil(2)][k as usize % 3];
        out.push((format!("signs n={n} m={m}"), random_signs_kashin(n, m, 40 + k)));
    }
    for k in 0..10u64 {
        let n = 8 + k as usize % 5;
        let m = [1, 2, n][k as usize % 3];
        out.push((format!("heavy n={n} m={m}"), heavy_row_kashin(n, m, 80 + k)));
    }
    out
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let lambda = select_lambda(DEFAULT_DELTA).unwrap();
    let mut violations = Vec::new();
    let mut min_margin = f64::INFINITY;
    let mut missed = 0;
    for (i, (name, a)) in volume_instances().into_iter().enumerate() {
        let v = volume_check(&a, lambda, DEFAULT_DELTA, 1_000_000, 500 + i as u64).unwrap();
        min_margin = min_margin.min(v.ci_high / v.vaaler_lb.max(v.volume_lb));
        missed += usize::from(v.hits < v.samples);
        if v.violation {
            violations.push(name);
        }
    }
    let elapsed = t.elapsed();
    outcome(
        violations.is_empty() && elapsed < Duration::from_secs(120),
        format!(
            "20 instances x 1e6 samples, {} violations {violations:?}, {missed} with active constraints, \
             min upper-limit / bound = {min_margin:.4}, {:.1} s",
            violations.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_5() -> Outcome {
    let lambda = select_lambda(DEFAULT_DELTA).unwrap();
    let mut disagreements = 0;
    let (mut inside, mut outside) = (0, 0);
    for (i, (_, a)) in volume_instances().into_iter().enumerate() {
        let vaaler = build_vaaler_matrix(&a, lambda).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(900 + i as u64);
        for _ in 0..10_000 {
            let spread: f64 = rng.random_range(0.2..1.5);
            let z: Vec<f64> = (0..a.n()).map(|_| rng.random_range(-spread..=spread)).collect();
            let cube = vaaler.maps_into_cube(&z);
            let body = membership(&a, lambda, 1.0, &z).unwrap();
            disagreements += usize::from(cube != body);
            if body {
                inside += 1;
            } else {
                outside += 1;
            }
        }
    }
    outcome(
        disagreements == 0 && inside > 0 && outside > 0,
        format!("200000 points, {disagreements} disagreements ({inside} inside, {outside} outside)"),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_rel = 0.0f64;
    for i in 0..1000u64 {
        let n = rng.random_range(1..=24);
        let m = rng.random_range(1..=24);
        let kom = unit_columns(n, m, 6000 + i);
        let eps = Coloring::new((0..n).map(|_| rng.random_range(-1i8..=1)).collect()).unwrap();
        let direct = signed_sum(&kom, &eps)
            .unwrap()
            .iter()
            .fold(0.0f64, |a, v| a.max(v.abs()));
        let via = (n as f64 / m as f64).sqrt() * evaluate(&transpose_reduce(&kom), &eps).unwrap().max_abs;
        // Relative to the size of the summands: an exact cancellation leaves
        // nothing to be relative to.
        let scale = (0..m)
            .map(|j| {
                (0..n)
                    .map(|i| (f64::from(eps.values()[i]) * kom.column(i)[j]).abs())
                    .sum::<f64>()
            })
            .fold(direct, f64::max);
        if scale > 0.0 {
            worst_rel = worst_rel.max((direct - via).abs() / scale);
        }
    }

    let budget = SolverBudget {
        max_candidates: 3u64.pow(14),
        ..SolverBudget::default()
    };
    let mut worst_k = 0.0f64;
    let mut bad = Vec::new();
    let mut solved = 0;
    for n in 1..=14usize {
        for m in [n.div_ceil(2), n, 2 * n] {
            for seed in 0..2u64 {
                let kom = unit_columns(n, m, 700 + 10 * n as u64 + seed);
                let r = solve_komlos_partial(&kom, &budget).unwrap();
                solved += 1;
                worst_k = worst_k.max(r.report.max_abs);
                if r.method != Method::Exhaustive
                    || r.report.max_abs > CONSTANT
                    || r.coloring.support() < support_threshold(n)
                {
                    bad.push((n, m, seed));
                }
            }
        }
    }
    outcome(
        worst_rel <= 1e-12 && bad.is_empty(),
        format!(
            "1000 pairs, worst gap relative to summand size {worst_rel:.2e}; {solved} exhaustive partial colorings, \
             worst |sum eps_i u_i|_inf = {worst_k:.4}, failures {bad:?}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let sizes = [32usize, 64, 128, 256, 512];
    let mut medians = Vec::new();
    let mut max_ratio = 0.0f64;
    let mut problems = Vec::new();
    for &n in &sizes {
        let norm = (n as f64).sqrt() * (n as f64).ln().ln();
        let mut ratios = Vec::new();
        for seed in 0..20u64 {
            let a = rows(Family::RandomSigns, n, n, seed);
            let budget = SolverBudget::default().with_seed(seed);
            let (c, trace) = full_coloring(&a, &budget).unwrap();
            if c.support() != n {
                problems.push(format!("n={n} seed={seed}: support {}", c.support()));
            }
            // Every round but the finishing one is a partial round.
            for w in trace.rounds.windows(2) {
                if w[1].active > w[0].active - support_threshold(w[0].active) {
                    problems.push(format!("n={n} seed={seed}: round {} shrank too little", w[0].round));
                }
            }
            let r = trace.final_max_abs / norm;
            max_ratio = max_ratio.max(r);
            ratios.push(r);
        }
        medians.push(median(ratios));
    }
    let monotone = medians.windows(2).all(|w| w[1] <= w[0]);
    let elapsed = t.elapsed();
    let table: Vec<String> = sizes.iter().zip(&medians).map(|(n, r)| format!("{n}:{r:.3}")).collect();
    outcome(
        monotone && max_ratio <= 20.0 && problems.is_empty() && elapsed < Duration::from_secs(1800),
        format!(
            "median max_abs/(sqrt(n) ln ln n) [{}], non-increasing: {monotone}, max ratio {max_ratio:.3}, \
             shrinkage/support problems {}, {:.0} s",
            table.join(" "),
            problems.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_8() -> Outcome {
    let n = 256usize;
    let nf = n as f64;
    let s_short = (nf.ln().ln() / 1.2f64.ln()).ceil() as usize;
    let s_long = (nf.ln() / 1.2f64.ln()).ceil() as usize;
    let mut problems = Vec::new();
    let mut notes = Vec::new();
    for seed in 0..3u64 {
        let kom = unit_columns(n, n, 8000 + seed);
        let budget = SolverBudget::default().with_seed(seed);
        let (c, t) = iterate_partial(&kom, s_short, &budget).unwrap();
        let zeros_ok = (c.zero_count() as f64) <= nf / nf.ln();
        let disc_ok = t.cumulative() <= CONSTANT * s_short as f64 && t.final_max_abs <= t.cumulative() + 1e-9;
        if !zeros_ok || !disc_ok {
            problems.push(format!(
                "seed {seed} s={s_short}: zeros {} cumulative {:.3}",
                c.zero_count(),
                t.cumulative()
            ));
        }
        notes.push(format!("{}z/{:.2}", c.zero_count(), t.cumulative()));

        let (c, t) = iterate_partial(&kom, s_long, &budget).unwrap();
        if c.zero_count() != 0 {
            problems.push(format!("seed {seed} s={s_long}: {} zeros left", c.zero_count()));
        }
        notes.push(format!("full in {} rounds, max {:.3}", t.rounds.len(), t.final_max_abs));
    }
    outcome(
        problems.is_empty(),
        format!(
            "n=256, s={s_short} (zeros <= {:.1}, cumulative <= {}) and s={s_long}: {} {problems:?}",
            nf / nf.ln(),
            CONSTANT * s_short as f64,
            notes.join("; ")
        ),
    )
}

fn run_binary(workers: usize, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_disclab"))
        .arg("--workers")
        .arg(workers.to_string())
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

/// Drop the trailing `"runtime"` block (timing and worker count).
fn without_runtime(bytes: &[u8]) -> Vec<u8> {
    let text = String::from_utf8_lossy(bytes);
    match text.find(",\n  \"runtime\"") {
        Some(k) => text[..k].as_bytes().to_vec(),
        None => bytes.to_vec(),
    }
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let gen = |family: &str, n: &str, m: &str, kashin: bool, out: &str| {
        let mut args = vec![
            "generate", "--family", family, "--n", n, "--m", m, "--seed", "11", "--out", out,
        ];
        if kashin {
            args.push("--kashin");
        }
        run_binary(1, &args).map(|_| ())
    };
    let (signs, big, kom, csv) = (p("signs.json"), p("big.json"), p("kom.json"), p("bench.csv"));
    let setup = gen("random-signs", "30", "20", true, &signs)
        .and_then(|_| gen("random-signs", "80", "80", false, &big))
        .and_then(|_| gen("random-unit-columns", "40", "20", false, &kom));
    if let Err(e) = setup {
        return outcome(false, e);
    }
    let pipelines: Vec<(&str, Vec<&str>)> = vec![
        ("solve", vec!["solve", "--instance", &signs, "--seed", "3"]),
        ("recurse", vec!["recurse", "--instance", &big, "--seed", "3"]),
        (
            "komlos",
            vec!["komlos", "--komlos", &kom, "--seed", "3", "--iters", "4"],
        ),
        (
            "certify",
            vec!["certify", "--instance", &signs, "--samples", "200000", "--seed", "3"],
        ),
    ];
    let mut differing = Vec::new();
    for (name, args) in &pipelines {
        let runs: Result<Vec<Vec<u8>>, String> = [1, 2, 4].iter().map(|&w| run_binary(w, args)).collect();
        match runs {
            Ok(runs) => {
                let base = without_runtime(&runs[0]);
                if runs.iter().any(|r| without_runtime(r) != base) {
                    differing.push(name.to_string());
                }
            }
            Err(e) => return outcome(false, e),
        }
    }
    let mut tables = Vec::new();
    for w in [1, 4] {
        let args = [
            "bench",
            "--family",
            "random-signs",
            "--sizes",
            "20,40",
            "--seeds",
            "3",
            "--seed",
            "5",
            "--out",
            &csv,
        ];
        if let Err(e) = run_binary(w, &args) {
            return outcome(false, e);
        }
        tables.push(std::fs::read(Path::new(&csv)).unwrap());
    }
    if tables[0] != tables[1] {
        differing.push("bench".into());
    }
    outcome(
        differing.is_empty(),
        format!("solve, recurse, komlos, certify, bench with --workers 1/2/4: differing {differing:?}"),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "partial colorings within 14 sqrt(m/n)", criterion_1),
        (2, "small-support count", criterion_2),
        (3, "counting verdict scan", criterion_3),
        (4, "volume lower bounds", criterion_4),
        (5, "cube indicator = body membership", criterion_5),
        (6, "Komlos reduction", criterion_6),
        (7, "recursion trend", criterion_7),
        (8, "iterated partial colorings", criterion_8),
        (9, "determinism across worker counts", criterion_9),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (k, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&k) {
            continue;
        }
        let t = Instant::now();
        let o = run();
        println!(
            "criterion {k} {} {name}: {} [{:.1} s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
