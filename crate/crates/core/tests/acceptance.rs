use std::fs;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roughpath::{
    brute_force_sig, full_signature, grouplike_inverse, is_grouplike, is_multiplicative, levy_area,
    pair, path_signature, young_integral, PairwiseFunctional, Path, Tensor, Word, YoungOptions,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

struct Case {
    path: Path,
    depth: usize,
}

fn random_path(rng: &mut ChaCha8Rng, d: usize, segments: usize) -> Path {
    let mut times = vec![0.0];
    for _ in 0..segments {
        let last = *times.last().unwrap();
        times.push(last + rng.gen_range(0.2..1.0));
    }
    let end = *times.last().unwrap();
    for t in times.iter_mut() {
        *t /= end;
    }
    *times.last_mut().unwrap() = 1.0;
    let mut x = vec![0.0; d];
    let mut points = vec![x.clone()];
    for _ in 0..segments {
        for c in x.iter_mut() {
            *c += rng.gen_range(-1.0..1.0);
        }
        points.push(x.clone());
    }
    Path::new(times, points).unwrap()
}

/// 100 paths, d ≤ 3, N ≤ 5, at most 20 segments.
fn path_set() -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..100)
        .map(|_| {
            let d = rng.gen_range(1..=3);
            let depth = rng.gen_range(1..=5);
            let segments = rng.gen_range(2..=20);
            Case {
                path: random_path(&mut rng, d, segments),
                depth,
            }
        })
        .collect()
}

fn random_tensor(rng: &mut ChaCha8Rng, d: usize, depth: usize, level0: f64) -> Tensor {
    let mut t = Tensor::zeros(d, depth).unwrap();
    for k in 1..=depth {
        for x in t.level_mut(k) {
            *x = rng.gen_range(-1.0..1.0);
        }
    }
    t.level_mut(0)[0] = level0;
    t
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn t2_closed_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let d = rng.gen_range(1..=4);
        let (a0, x0) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let lhs = random_tensor(&mut rng, d, 2, a0);
        let rhs = random_tensor(&mut rng, d, 2, x0);
        let (a, b, c) = (lhs.level(0)[0], lhs.level(1), lhs.level(2));
        let (x, y, z) = (rhs.level(0)[0], rhs.level(1), rhs.level(2));

        let mut expected = vec![a * x];
        expected.extend((0..d).map(|i| a * y[i] + x * b[i]));
        for i in 0..d {
            for j in 0..d {
                expected.push(a * z[i * d + j] + x * c[i * d + j] + b[i] * y[j]);
            }
        }
        worst = worst.max(max_abs_diff(lhs.mul(&rhs).unwrap().as_slice(), &expected));

        let mut g = lhs.clone();
        g.level_mut(0)[0] = 1.0;
        let mut expected = vec![1.0];
        expected.extend(b.iter().map(|v| -v));
        for i in 0..d {
            for j in 0..d {
                expected.push(-c[i * d + j] + b[i] * b[j]);
            }
        }
        worst = worst.max(max_abs_diff(g.inverse().unwrap().as_slice(), &expected));
    }
    outcome(worst <= 1e-12, format!("max abs error {worst:.3e}"))
}

fn exp_log_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let d = rng.gen_range(1..=3);
        let depth = rng.gen_range(1..=5);
        let x = random_tensor(&mut rng, d, depth, 0.0);
        worst = worst.max(x.rel_diff(&x.exp().unwrap().log().unwrap()).unwrap());
        let g = random_tensor(&mut rng, d, depth, 1.0);
        worst = worst.max(g.rel_diff(&g.log().unwrap().exp().unwrap()).unwrap());
    }
    outcome(worst <= 1e-12, format!("max relative error {worst:.3e}"))
}

fn chen_relation(cases: &[Case]) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut triples = 0;
    let mut all_passed = true;
    for c in cases {
        let times = c.path.times().to_vec();
        let table = PairwiseFunctional::from_fn(times.clone(), |i, j| {
            path_signature(&c.path, c.depth, &times[i], &times[j])
        })
        .unwrap();
        let r = is_multiplicative(&table, 1e-9).unwrap();
        all_passed &= r.passed;
        triples += r.triples_checked;
        worst = worst.max(r.worst.unwrap().residual);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        all_passed && worst <= 1e-9 && secs <= 5.0,
        format!("{triples} triples, max relative error {worst:.3e}, {secs:.2} s"),
    )
}

fn shuffle_identity(cases: &[Case]) -> Outcome {
    let mut worst = 0.0f64;
    let mut all_passed = true;
    for c in cases {
        let sig = full_signature(&c.path, c.depth).unwrap();
        let r = is_grouplike(&sig, 1e-8).unwrap();
        all_passed &= r.passed;
        if let Some(w) = r.worst {
            worst = worst.max(w.scaled);
        }
    }
    outcome(all_passed, format!("max relative residual {worst:.3e}"))
}

fn antipode_inversion(cases: &[Case]) -> Outcome {
    let mut worst = 0.0f64;
    for c in cases {
        let sig = full_signature(&c.path, c.depth).unwrap();
        let neumann = sig.inverse().unwrap();
        worst = worst.max(neumann.rel_diff(&grouplike_inverse(&sig).unwrap()).unwrap());
    }
    // (1, e1, e1⊗e2): c − b⊗b/2 is not antisymmetric
    let odd =
        Tensor::from_levels(2, vec![vec![1.0], vec![1.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]]).unwrap();
    let gap = odd
        .inverse()
        .unwrap()
        .rel_diff(&grouplike_inverse(&odd).unwrap())
        .unwrap();
    outcome(
        worst <= 1e-12 && gap >= 1e-3,
        format!("group-like max relative error {worst:.3e}, non-geometric difference {gap:.3e}"),
    )
}

fn oracle_convergence() -> Outcome {
    let p = Path::new(
        vec![0.0, 0.25, 0.5, 1.0],
        vec![
            vec![0.0, 0.0],
            vec![1.0, 0.5],
            vec![0.3, 1.2],
            vec![-0.4, 0.7],
        ],
    )
    .unwrap();
    let exact = full_signature(&p, 3).unwrap();
    let err = |mesh| {
        max_abs_diff(
            brute_force_sig(&p, 3, mesh).unwrap().as_slice(),
            exact.as_slice(),
        )
    };
    let (coarse, fine) = (err(10_000), err(20_000));
    let ratio = coarse / fine;
    outcome(
        coarse <= 2e-3 && (1.6..=2.4).contains(&ratio),
        format!("error at 10^4 {coarse:.3e}, halving ratio {ratio:.3}"),
    )
}

fn square_loop() -> Outcome {
    let p = Path::uniform(vec![
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![1.0, 1.0],
        vec![0.0, 1.0],
        vec![0.0, 0.0],
    ])
    .unwrap();
    let sig = full_signature(&p, 2).unwrap();
    let level1 = sig.hs_norm_level(1);
    let s12 = pair(&sig, &Word::new([1, 2]).unwrap()).unwrap();
    let s21 = pair(&sig, &Word::new([2, 1]).unwrap()).unwrap();
    let area = levy_area(&p).unwrap()[0][1];
    let reversed = levy_area(&p.reverse()).unwrap()[0][1];
    let ok = level1 <= 1e-12
        && (s12 - 1.0).abs() <= 1e-12
        && (s21 + 1.0).abs() <= 1e-12
        && (area - 1.0).abs() <= 1e-12
        && (reversed + 1.0).abs() <= 1e-12;
    outcome(
        ok,
        format!("|level 1| {level1:.1e}, <S,12> {s12}, <S,21> {s21}, A12 {area}, reversed A12 {reversed}"),
    )
}

fn homogeneous_norm_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut left, mut sub, mut dil) = (0.0f64, f64::NEG_INFINITY, 0.0f64);
    for _ in 0..100 {
        let d = rng.gen_range(1..=3);
        let depth = rng.gen_range(1..=5);
        let segments = rng.gen_range(1..=6);
        let mut group = || full_signature(&random_path(&mut rng, d, segments), depth).unwrap();
        let (x, y, b) = (group(), group(), group());
        let rho = x.rho_metric(&y).unwrap();
        let moved = b.mul(&x).unwrap().rho_metric(&b.mul(&y).unwrap()).unwrap();
        left = left.max((moved - rho).abs() / rho);
        let excess = x.mul(&y).unwrap().homogeneous_norm().unwrap()
            - x.homogeneous_norm().unwrap()
            - y.homogeneous_norm().unwrap();
        sub = sub.max(excess);
        let lambda: f64 = rng.gen_range(-3.0..3.0);
        let norm = x.homogeneous_norm().unwrap();
        let scaled = x.dilation(lambda).homogeneous_norm().unwrap();
        dil = dil.max((scaled - lambda.abs() * norm).abs() / (lambda.abs() * norm));
    }
    outcome(
        left <= 1e-9 && sub <= 1e-9 && dil <= 1e-12,
        format!(
            "left invariance {left:.3e}, max subadditivity excess {sub:.3e}, dilation {dil:.3e}"
        ),
    )
}

fn dilation_scaling(cases: &[Case]) -> Outcome {
    let mut worst = 0.0f64;
    for c in cases {
        let sig = full_signature(&c.path, c.depth).unwrap();
        for lambda in [-1.0, 0.5, 3.0] {
            let scaled = full_signature(&c.path.scaled(lambda), c.depth).unwrap();
            worst = worst.max(scaled.rel_diff(&sig.dilation(lambda)).unwrap());
        }
    }
    outcome(worst <= 1e-10, format!("max relative error {worst:.3e}"))
}

fn projection_consistency(cases: &[Case]) -> Outcome {
    let mut worst = 0.0f64;
    for c in cases {
        for n in 1..=4 {
            let high = full_signature(&c.path, n + 1).unwrap().project(n).unwrap();
            let low = full_signature(&c.path, n).unwrap();
            worst = worst.max(max_abs_diff(high.as_slice(), low.as_slice()));
        }
    }
    outcome(worst <= 1e-12, format!("max abs error {worst:.3e}"))
}

fn young_integrals() -> Outcome {
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let sampled = |f: fn(f64) -> f64| {
        Path::new(grid.clone(), grid.iter().map(|&t| vec![f(t)]).collect()).unwrap()
    };
    let x = sampled(|t| t);
    let y = sampled(|t| t * t);
    let opts = YoungOptions::default();
    let first = young_integral(&x, &x, &opts).unwrap().value[0];
    let second = young_integral(&y, &x, &opts).unwrap().value[0];
    // left-point sums leave Σ ΔXΔY ≈ h·∫X'Y', so the identity needs a fine mesh
    let fine = YoungOptions {
        refine: 10_000_000,
        ..YoungOptions::default()
    };
    let ydx = young_integral(&y, &x, &fine).unwrap().value[0];
    let xdy = young_integral(&x, &y, &fine).unwrap().value[0];
    let ibp = (ydx + xdy - 1.0).abs();
    outcome(
        (first - 0.5).abs() <= 1e-4 && (second - 1.0 / 3.0).abs() <= 1e-4 && ibp <= 1e-6,
        format!("∫t dt {first:.8}, ∫t² dt {second:.8}, integration by parts residual {ibp:.3e}"),
    )
}

fn reversal(cases: &[Case]) -> Outcome {
    let mut worst = 0.0f64;
    for c in cases {
        let forward = full_signature(&c.path, c.depth).unwrap();
        let backward = full_signature(&c.path.reverse(), c.depth).unwrap();
        let unit = Tensor::unit(c.path.d(), c.depth).unwrap();
        worst = worst.max(unit.rel_diff(&backward.mul(&forward).unwrap()).unwrap());
    }
    outcome(worst <= 1e-10, format!("max relative error {worst:.3e}"))
}

fn cli_end_to_end() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("walk.csv");
    let json = dir.path().join("walk.json");
    fs::write(
        &csv,
        "t,x1,x2\n0.5,0.1,0\n1.5,1.3,-0.4\n2,0.7,0.9\n4,-0.2,0.25\n",
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_roughpath");

    let sig = Command::new(bin)
        .args(["sig", "--depth", "3"])
        .arg(&csv)
        .output()
        .unwrap();
    if !sig.status.success() {
        return outcome(
            false,
            format!("sig failed: {}", String::from_utf8_lossy(&sig.stderr)),
        );
    }
    fs::write(&json, &sig.stdout).unwrap();
    let dist = Command::new(bin)
        .args(["dist", "--depth", "3"])
        .arg(&json)
        .arg(&csv)
        .output()
        .unwrap();
    let parsed: serde_json::Value = match serde_json::from_slice(&dist.stdout) {
        Ok(v) => v,
        Err(e) => return outcome(false, format!("dist output unreadable: {e}")),
    };
    let rho = parsed["rho"].as_f64().unwrap_or(f64::NAN);

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "t,x1,x2\n0,0,0\n1,oops,1\n2,1,1\n").unwrap();
    let broken = Command::new(bin).arg("sig").arg(&bad).output().unwrap();
    let code = broken.status.code();
    outcome(
        dist.status.success() && rho.abs() <= 1e-12 && code == Some(2) && broken.stdout.is_empty(),
        format!("rho {rho:e}, corrupted CSV exit status {code:?}"),
    )
}

#[test]
fn acceptance() {
    let cases = path_set();
    let criteria: Vec<(&str, Outcome)> = vec![
        ("T^2 closed forms", t2_closed_forms()),
        ("exp/log inversion", exp_log_round_trip()),
        ("Chen's relation", chen_relation(&cases)),
        ("shuffle identity", shuffle_identity(&cases)),
        ("antipode inversion", antipode_inversion(&cases)),
        ("oracle equivalence", oracle_convergence()),
        ("square-loop invariants", square_loop()),
        ("homogeneous-norm axioms", homogeneous_norm_axioms()),
        ("dilation-scaling law", dilation_scaling(&cases)),
        ("projection consistency", projection_consistency(&cases)),
        ("Young integrals", young_integrals()),
        ("reversal", reversal(&cases)),
        ("CLI end-to-end", cli_end_to_end()),
    ];
    let mut failed = Vec::new();
    println!();
    for (n, (name, o)) in criteria.iter().enumerate() {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {}: {name}: {}", n + 1, o.detail);
        if !o.passed {
            failed.push(n + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
