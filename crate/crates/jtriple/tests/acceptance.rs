//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use jtriple_core::locality::{commutator_counterexample, run_battery, BatteryMix, MapFamily};
use jtriple_core::nalgebra::DMatrix;
use jtriple_core::rng::trial_rng;
use jtriple_core::svd::singular_values;
use jtriple_core::{ComplexLinearMap, Element, PeirceSpace, TripleSystem, C64};

const SHAPES: [(usize, usize); 5] = [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3)];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

type DiagonalCase = (usize, usize, Vec<C64>, Vec<C64>, Vec<C64>);

macro_rules! require {
    ($cond:expr, $($fmt:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($fmt)+));
        }
    };
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn axioms() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (r, cols) in SHAPES {
        let sys = TripleSystem::matrix(r, cols).unwrap();
        let report = sys.validate_axioms(100, 11, 1e-9);
        require!(report.trials >= 100, "only {} samples", report.trials);
        require!(
            report.max_residual < 1e-9,
            "M({r},{cols}) residual {:e}",
            report.max_residual
        );
        worst = worst.max(report.max_residual);
    }
    let elapsed = start.elapsed();
    require!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!(
        "max residual {worst:.2e} over 5 systems x 100 samples in {elapsed:.2?}"
    ))
}

fn peirce_suite() -> Outcome {
    let mut worst = 0.0f64;
    for (r, cols) in SHAPES {
        let sys = TripleSystem::matrix(r, cols).unwrap();
        let d = sys.dim();
        for seed in 0..20 {
            let e = sys.random_tripotent(seed).unwrap();
            let p: Vec<ComplexLinearMap> = PeirceSpace::ALL
                .iter()
                .map(|&j| sys.peirce_projection_map(&e, j).unwrap())
                .collect();
            for (i, pi) in p.iter().enumerate() {
                for (j, pj) in p.iter().enumerate() {
                    let want = if i == j {
                        pi.clone()
                    } else {
                        ComplexLinearMap::zero(d)
                    };
                    worst = worst.max((&pi.compose(pj) - &want).norm());
                }
            }
            let total = &(&p[0] + &p[1]) + &p[2];
            worst = worst.max((&total - &ComplexLinearMap::identity(d)).norm());
            let l = ComplexLinearMap::new(sys.l_matrix(&e, &e).unwrap());
            worst = worst.max((&l - &(&p[2] + &p[1].scale_real(0.5))).norm());

            let mut rng = trial_rng(seed, 1);
            let parts: Vec<Element> = PeirceSpace::ALL
                .iter()
                .map(|&j| sys.random_in_space(&e, j, &mut rng))
                .collect();
            for i in 0..3i32 {
                for j in 0..3i32 {
                    for k in 0..3i32 {
                        let (x, y, z) =
                            (&parts[i as usize], &parts[j as usize], &parts[k as usize]);
                        let prod = sys.product(x, y, z).unwrap();
                        let scale = 1.0 + sys.norm(x) * sys.norm(y) * sys.norm(z);
                        let off = match PeirceSpace::from_index(i - j + k) {
                            Some(target) => &prod - &p[target as usize].apply(&prod),
                            None => prod,
                        };
                        worst = worst.max(sys.norm(&off) / scale);
                    }
                }
            }
            let x = sys.random_element(&mut rng);
            for (a, b) in [(&parts[0], &parts[2]), (&parts[2], &parts[0])] {
                let scale = 1.0 + sys.norm(a) * sys.norm(b) * sys.norm(&x);
                worst = worst.max(sys.norm(&sys.product(a, b, &x).unwrap()) / scale);
            }
        }
    }
    require!(worst < 1e-9, "worst residual {worst:e}");
    Ok(format!(
        "5 systems x 20 tripotents, worst residual {worst:.2e}"
    ))
}

/// Maps `x -> A x + x B` with `A`, `B` skew-hermitian: real rank of the family.
fn skew_hermitian_oracle(rows: usize, cols: usize) -> usize {
    let sys = TripleSystem::matrix(rows, cols).unwrap();
    let d = sys.dim();
    let skew = |k: usize| {
        let mut out = Vec::new();
        for p in 0..k {
            for q in 0..k {
                let mut m = DMatrix::zeros(k, k);
                match p.cmp(&q) {
                    std::cmp::Ordering::Equal => m[(p, p)] = c(0.0, 1.0),
                    std::cmp::Ordering::Less => {
                        m[(p, q)] = c(1.0, 0.0);
                        m[(q, p)] = c(-1.0, 0.0);
                    }
                    std::cmp::Ordering::Greater => {
                        m[(p, q)] = c(0.0, 1.0);
                        m[(q, p)] = c(0.0, 1.0);
                    }
                }
                out.push(m);
            }
        }
        out
    };
    let mut params = Vec::new();
    let mut push = |f: &dyn Fn(&DMatrix<C64>) -> DMatrix<C64>| {
        let mut m = DMatrix::zeros(d, d);
        for k in 0..d {
            let x = sys.to_matrix(&sys.basis(k)).unwrap();
            m.set_column(k, sys.from_matrix(&f(&x)).unwrap().coords());
        }
        params.push(ComplexLinearMap::new(m).real_params());
    };
    for a in skew(rows) {
        push(&|x| &a * x);
    }
    for b in skew(cols) {
        push(&|x| x * &b);
    }
    let s = singular_values(&DMatrix::from_columns(&params));
    s.iter().filter(|&&v| v > 1e-10 * s[0]).count()
}

fn derivation_space() -> Outcome {
    let mut dims = Vec::new();
    let mut worst_basis = 0.0f64;
    let mut worst_inner = 0.0f64;
    for ((r, cols), expected) in [((1, 1), 1), ((1, 2), 4), ((2, 2), 7)] {
        let sys = TripleSystem::matrix(r, cols).unwrap();
        let oracle = skew_hermitian_oracle(r, cols);
        require!(oracle == expected, "oracle rank {oracle} for M({r},{cols})");
        let basis = sys.derivation_basis();
        require!(
            basis.dim_real() == oracle,
            "M({r},{cols}): dim_real {} vs oracle {oracle}",
            basis.dim_real()
        );
        dims.push(basis.dim_real());
        for t in basis.maps() {
            let report = sys.is_triple_derivation(t, 1e-9);
            require!(
                report.pass,
                "basis element residual {:e}",
                report.max_residual
            );
            worst_basis = worst_basis.max(report.max_residual);
        }
        for trial in 0..50 {
            let mut rng = trial_rng(31, trial);
            let a = sys.random_element(&mut rng);
            let b = sys.random_element(&mut rng);
            let inner = sys.inner_derivation(&a, &b).unwrap();
            worst_inner = worst_inner.max(basis.span_distance(&inner));
        }
    }
    require!(
        worst_inner < 1e-8,
        "inner derivation outside span by {worst_inner:e}"
    );
    Ok(format!(
        "dim_real {dims:?} (oracle agrees), basis residual {worst_basis:.2e}, inner-derivation span residual {worst_inner:.2e}"
    ))
}

fn tripotent_identities() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (r, cols) in [(1, 1), (1, 2), (2, 2)] {
        let sys = TripleSystem::matrix(r, cols).unwrap();
        let basis = sys.derivation_basis();
        for (i, t) in basis.maps().iter().enumerate() {
            let report = sys
                .check_tripotent_identities(t, 50, 40 + i as u64, 1e-9)
                .unwrap();
            require!(
                report.pass,
                "M({r},{cols}) basis map {i}: residual {:e}",
                report.max_residual
            );
            worst = worst.max(report.max_residual);
            count += 1;
        }
    }
    Ok(format!(
        "{count} derivations x 50 tripotents, worst residual {worst:.2e}"
    ))
}

fn counterexample() -> Outcome {
    let cm = commutator_counterexample(2, None).unwrap();
    let sys = &cm.system;
    let h1 = sys.check_h1(&cm.map, 1000, 5, 1e-9).unwrap();
    require!(
        h1.pass && h1.trials >= 1000,
        "h1 residual {:e}",
        h1.max_residual
    );
    let der = sys.is_triple_derivation(&cm.map, 1e-9);
    require!(!der.pass, "commutator accepted as derivation");
    let id = sys.from_matrix(&DMatrix::identity(2, 2)).unwrap();
    let witness = sys.leibniz_residual(&cm.map, &id, &cm.x0, &id).unwrap();
    let value = sys.norm(&witness);
    require!(
        (value - 1.0).abs() <= 1e-9,
        "witness residual at (I, x0, I) is {value}"
    );
    let h2 = sys.check_h2(&cm.map, 1000, 5, 1e-9).unwrap();
    require!(!h2.pass, "no h2 violation in 1000 trials");
    let worst_trial = h2.witnesses.first().map_or(0, |w| w.trial);
    Ok(format!(
        "h1 max {:.2e} over 1000 trials, Leibniz witness {value:.12}, h2 violated (worst {:.3} at trial {worst_trial})",
        h1.max_residual, h2.max_residual
    ))
}

fn battery() -> Outcome {
    let start = Instant::now();
    let sys = TripleSystem::matrix(2, 2).unwrap();
    let basis = sys.derivation_basis();
    let entries = run_battery(&sys, &basis, BatteryMix::default(), 50, 2024, 1e-9).unwrap();
    require!(entries.len() >= 100, "only {} maps", entries.len());
    let count = |f: MapFamily| entries.iter().filter(|e| e.family == f).count();
    require!(
        [
            count(MapFamily::Derivation),
            count(MapFamily::Generic),
            count(MapFamily::Perturbed),
            count(MapFamily::Commutator)
        ] == [30, 30, 30, 10],
        "wrong family mix"
    );
    let disagree: Vec<usize> = entries
        .iter()
        .filter(|e| !e.classification.agreement())
        .map(|e| e.index)
        .collect();
    require!(disagree.is_empty(), "disagreement on maps {disagree:?}");
    let derivations = entries
        .iter()
        .filter(|e| e.classification.verdicts()[0])
        .count();
    let elapsed = start.elapsed();
    require!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!(
        "{} maps, 100% agreement ({derivations} derivations), {elapsed:.2?}",
        entries.len()
    ))
}

fn dissipativity() -> Outcome {
    let sys = TripleSystem::matrix(2, 2).unwrap();
    let basis = sys.derivation_basis();
    let mut worst = 0.0f64;
    for k in 0..20 {
        let delta = basis.random_member(&mut trial_rng(50, k));
        let values = sys.dissipation_values(&delta, 100, 60 + k).unwrap();
        require!(values.len() >= 100, "too few samples");
        worst = values.iter().fold(worst, |m, v| m.max(v.abs()));
    }
    require!(worst < 1e-8, "|Re phi(delta a)| reached {worst:e}");
    let id = ComplexLinearMap::identity(4);
    let report = sys.check_dissipative(&id, 100, 70, 1e-9).unwrap();
    require!(!report.pass, "identity accepted as dissipative");
    let values = sys.dissipation_values(&id, 100, 70).unwrap();
    let off = values.iter().fold(0.0f64, |m, v| m.max((v - 1.0).abs()));
    require!(off <= 1e-9, "identity values deviate from 1 by {off:e}");
    Ok(format!("20 derivations x 100 samples, max |Re| {worst:.2e}; identity fails with value 1 +- {off:.1e}"))
}

fn spectral() -> Outcome {
    let phase = |t: f64| c(t.cos(), t.sin());
    // (rows, cols, diagonal, support, range); the diagonal has norm one
    let cases: Vec<DiagonalCase> = vec![
        (
            3,
            3,
            vec![c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ),
        (
            3,
            3,
            vec![c(1.0, 0.0), c(1.0, 0.0), c(0.3, 0.0)],
            vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0); 3],
        ),
        (
            3,
            3,
            vec![phase(0.7), phase(2.0) * 0.25, c(0.0, 0.0)],
            vec![phase(0.7), c(0.0, 0.0), c(0.0, 0.0)],
            vec![phase(0.7), phase(2.0), c(0.0, 0.0)],
        ),
        (
            2,
            3,
            vec![c(0.7, 0.0), c(-1.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
            vec![c(1.0, 0.0), c(-1.0, 0.0)],
        ),
        (
            2,
            2,
            vec![c(0.0, -1.0), c(0.0, 0.0)],
            vec![c(0.0, -1.0), c(0.0, 0.0)],
            vec![c(0.0, -1.0), c(0.0, 0.0)],
        ),
    ];
    let diag = |r: usize, cols: usize, v: &[C64]| {
        let mut m = DMatrix::zeros(r, cols);
        for (i, &x) in v.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    };
    let mut worst_tripotent = 0.0f64;
    for (r, cols, a, s, rg) in &cases {
        let matrix = TripleSystem::matrix(*r, *cols).unwrap();
        // the custom copy exercises the Krylov path
        let custom = TripleSystem::custom(r * cols, matrix.structure().to_vec()).unwrap();
        let x = matrix.from_matrix(&diag(*r, *cols, a)).unwrap();
        let want_s = matrix.from_matrix(&diag(*r, *cols, s)).unwrap();
        let want_r = matrix.from_matrix(&diag(*r, *cols, rg)).unwrap();
        for sys in [&matrix, &custom] {
            let got_s = sys.support_tripotent(&x, 1e-12).unwrap();
            let got_r = sys.range_tripotent(&x).unwrap();
            let err = (&got_s - &want_s)
                .coord_norm()
                .max((&got_r - &want_r).coord_norm());
            require!(err <= 1e-10, "diag {a:?}: tripotent error {err:e}");
            worst_tripotent = worst_tripotent.max(err);
        }
    }

    let mut worst_root = 0.0f64;
    for (k, (r, cols)) in SHAPES.iter().enumerate() {
        let sys = TripleSystem::matrix(*r, *cols).unwrap();
        for trial in 0..20 {
            let a = sys.random_element(&mut trial_rng(80 + k as u64, trial));
            for n in 1..=3 {
                let back = sys.odd_root(&sys.odd_power(&a, n).unwrap(), n).unwrap();
                worst_root = worst_root.max((&back - &a).coord_norm() / (1.0 + a.coord_norm()));
            }
        }
    }
    require!(
        worst_root <= 1e-8,
        "odd root round trip error {worst_root:e}"
    );

    let mut worst_pol = 0.0f64;
    for (r, cols) in SHAPES {
        let report = TripleSystem::matrix(r, cols)
            .unwrap()
            .polarization_check(100, 90, 1e-9);
        require!(
            report.pass && report.trials >= 100,
            "polarization residual {:e}",
            report.max_residual
        );
        worst_pol = worst_pol.max(report.max_residual);
    }
    Ok(format!(
        "support/range error {worst_tripotent:.1e}, odd root round trip {worst_root:.1e}, polarization {worst_pol:.1e}"
    ))
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let exe = env!("CARGO_BIN_EXE_jtriple");
    let run = |args: &[&str]| -> Result<std::process::Output, String> {
        Command::new(exe)
            .args(args)
            .current_dir(dir.path())
            .output()
            .map_err(|e| e.to_string())
    };
    let sys = dir.path().join("sys.json");
    let out = run(&[
        "gen", "matrix", "--rows", "2", "--cols", "2", "-o", "sys.json",
    ])?;
    require!(out.status.success() && sys.exists(), "gen failed");
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let out = run(&["battery", "sys.json", "--trials", "20", "--seed", "17"])?;
        require!(
            out.status.code() == Some(0),
            "battery exit {:?}",
            out.status.code()
        );
        outputs.push(out.stdout);
    }
    require!(
        outputs[0] == outputs[1],
        "battery output differs between runs"
    );
    // a cached basis must not change the result
    require!(
        Path::new(&dir.path().join("sys.basis.json")).exists(),
        "no basis sidecar written"
    );
    let out = run(&["battery", "sys.json", "--trials", "20", "--seed", "18"])?;
    require!(
        out.stdout != outputs[0],
        "different seeds gave identical output"
    );
    Ok(format!(
        "two CLI battery runs with seed 17 are byte-identical ({} bytes)",
        outputs[0].len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("axioms", axioms),
        ("peirce suite", peirce_suite),
        ("derivation space", derivation_space),
        ("tripotent identities", tripotent_identities),
        ("commutator counterexample", counterexample),
        ("characterization battery", battery),
        ("dissipativity", dissipativity),
        ("spectral calculus", spectral),
        ("reproducibility", reproducibility),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS  {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL  {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
