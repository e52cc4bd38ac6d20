//! Acceptance gate: one line per criterion, non-zero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cluster_bounds::bounds::{improvement_scan, nagata_floor, theorem_bound};
use cluster_bounds::cluster::{ProximityStructure, WeightedCluster};
use cluster_bounds::numerics::{int, parse_decimal, rat, Enclosure, Precision, PrecisionBudget, Rational, Verdict};
use cluster_bounds::producte::{
    check_identities, parseval_check, product_b, verify_proposition, CheckOutcome,
};
use cluster_bounds::specialization::{alpha, beta, simulate_theorem};
use cluster_bounds::unloading::{unload, PivotPolicy};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn ms(d: Duration) -> String {
    format!("{:.3} ms", d.as_secs_f64() * 1e3)
}

/// Unloading by brute force: lowest violated point, smallest `n` found by trial.
fn brute_unload(points: usize, pairs: &[(usize, usize)], mut m: Vec<i64>) -> Vec<i64> {
    let excess = |m: &[i64], i: usize| -> i64 {
        m[i - 1] - pairs.iter().filter(|&&(_, b)| b == i).map(|&(a, _)| m[a - 1]).sum::<i64>()
    };
    loop {
        let Some(i) = (1..=points).find(|&i| excess(&m, i) < 0) else {
            return m;
        };
        let mut n = 1;
        loop {
            let mut trial = m.clone();
            trial[i - 1] += n;
            for &(a, b) in pairs {
                if b == i {
                    trial[a - 1] -= n;
                }
            }
            if excess(&trial, i) >= 0 {
                m = trial;
                break;
            }
            n += 1;
        }
    }
}

fn criterion_1() -> Outcome {
    let s = ProximityStructure::new(2, [(2, 1)]).unwrap();
    let c = WeightedCluster::from_i64(s, &[0, 1]).unwrap();
    let mut best = Duration::MAX;
    let mut result = None;
    for _ in 0..5 {
        let t = Instant::now();
        let r = unload(&c, PivotPolicy::default()).unwrap();
        best = best.min(t.elapsed());
        result = Some(r);
    }
    let (u, trace) = result.unwrap();
    let ok = u.multiplicities() == [BigInt::from(1), BigInt::from(0)]
        && trace.steps.len() == 1
        && best < Duration::from_millis(1);
    outcome(
        ok,
        format!("(0,1) -> {:?} in {} step(s), {}", u.multiplicities(), trace.steps.len(), ms(best)),
    )
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut runs = 0;
    for r in 3..=30u64 {
        for m in 1..=10u64 {
            runs += 1;
            match simulate_theorem(r, m) {
                Ok(sim) => {
                    let exact = int(sim.final_first.clone()) >= theorem_bound(r, m);
                    if !(sim.certified() && exact) {
                        failures.push((r, m));
                    }
                }
                Err(_) => failures.push((r, m)),
            }
        }
    }
    let elapsed = t.elapsed();
    outcome(
        failures.is_empty() && elapsed < Duration::from_secs(30),
        format!("{runs} simulations, failures {failures:?}, {:.2} s", elapsed.as_secs_f64()),
    )
}

fn criterion_3() -> Outcome {
    let sim = match simulate_theorem(4, 2) {
        Ok(sim) => sim,
        Err(e) => return outcome(false, e.to_string()),
    };
    let outputs: Vec<Vec<i64>> = sim
        .stages
        .iter()
        .map(|s| s.output.iter().map(|v| v.to_i64().unwrap()).collect())
        .collect();
    let stage3 = brute_unload(4, &[(2, 1), (3, 2), (3, 1), (4, 3)], vec![2, 2, 2, 2]);
    let stage4 = brute_unload(4, &[(2, 1), (3, 2), (3, 1), (4, 3), (4, 1)], stage3.clone());
    let expected = vec![vec![3, 2, 1, 1], vec![4, 1, 0, 0]];
    let ok = outputs == expected
        && vec![stage3, stage4] == expected
        && sim.final_first == BigInt::from(4)
        && sim.certified_bound == rat(45, 14)
        && sim.certified();
    outcome(ok, format!("stages {outputs:?}, certificate {} >= {}", sim.final_first, sim.certified_bound))
}

fn criterion_4() -> Outcome {
    let mut bad = Vec::new();
    for r in 3..=200u64 {
        let mut lhs = int(r - 1) * alpha(r, r);
        for i in 3..=r {
            lhs *= beta(r, i);
        }
        let (mut num, mut den) = (BigInt::from(r - 1), BigInt::from(1));
        for i in 2..r {
            num *= i * i + r - 1 - i;
            den *= i * i + r - 1;
        }
        if lhs != Rational::new(num, den) {
            bad.push(r);
        }
    }
    outcome(bad.is_empty(), format!("r = 3..=200, mismatches {bad:?}"))
}

fn criterion_5() -> Outcome {
    let mut bad = Vec::new();
    for n in 2..=200u64 {
        if !check_identities(n).all_hold() || product_b(n) != theorem_bound(n + 1, 1) {
            bad.push(n);
        }
    }
    outcome(bad.is_empty(), format!("n = 2..=200, failures {bad:?}"))
}

/// `√n − π/8` from 60 hard-coded digits of π and an integer square root.
fn rhs_oracle(n: u64) -> Enclosure {
    const PI: &str = "3.141592653589793238462643383279502884197169399375105820974944";
    let ulp = rat(1, 10).pow(60);
    let pi = parse_decimal(PI).unwrap();
    let scale = BigInt::from(10).pow(60);
    let root = (BigInt::from(n) * &scale * &scale).sqrt();
    let lo = Rational::new(root.clone(), scale.clone());
    let hi = Rational::new(root + 1, scale);
    let pi8 = |q: Rational| q / int(8);
    Enclosure::new(lo - pi8(&pi + &ulp), hi - pi8(pi - ulp)).unwrap()
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let budget = PrecisionBudget::default();
    let mut bad = Vec::new();
    let mut certs = Vec::new();
    for n in 9..=200u64 {
        let c = verify_proposition(n, &budget);
        if c.verdict != Verdict::ProvenGreater || !c.chain_passes() || c.exploratory {
            bad.push(n);
        }
        if n == 9 || n == 12 {
            certs.push(c);
        }
    }
    let elapsed = t.elapsed();
    let tol = rat(1, 1000);
    let mut spots = Vec::new();
    let mut spots_ok = true;
    for (c, b_ref, rhs_ref) in [(&certs[0], "2.7768", "2.6073"), (&certs[1], "3.2206", "3.0714")] {
        let oracle = rhs_oracle(c.n);
        let b_ref = parse_decimal(b_ref).unwrap();
        let rhs_ref = parse_decimal(rhs_ref).unwrap();
        let close = |a: &Rational, b: &Rational| (a - b).abs() < tol;
        let ok = close(&c.b, &b_ref)
            && close(&oracle.midpoint(), &rhs_ref)
            && close(&c.rhs.midpoint(), &oracle.midpoint())
            && Verdict::compare(&Enclosure::point(c.b.clone()), &oracle) == Verdict::ProvenGreater;
        spots_ok &= ok;
        spots.push(format!("b({}) = {} vs {}", c.n, Enclosure::point(c.b.clone()).to_decimal_string(6), oracle.to_decimal_string(6)));
    }
    outcome(
        bad.is_empty() && spots_ok && elapsed < Duration::from_secs(60),
        format!("n = 9..=200 failures {bad:?}; {}; {:.2} s", spots.join(", "), elapsed.as_secs_f64()),
    )
}

fn criterion_7() -> Outcome {
    let tol = rat(1, 1_000_000);
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [1u64, 4, 9, 16] {
        match parseval_check(n, 100_000, &tol, &PrecisionBudget::default()) {
            Ok(r) => {
                ok &= r.outcome == CheckOutcome::Pass;
                parts.push(format!("n={n} residual {} {}", r.residual.to_decimal_string(4), r.outcome));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("n={n} error {e}"));
            }
        }
    }
    outcome(ok, parts.join("; "))
}

fn criterion_8() -> Outcome {
    let scan = improvement_scan(10, 100, Precision::DEFAULT);
    let oracle: Vec<u64> = (10..=100)
        .filter(|&r| theorem_bound(r, 1) > int(nagata_floor(r, 1)))
        .collect();
    let membership = scan.improving == oracle;
    let examples = [13, 14, 15].iter().all(|r| scan.improving.contains(r)) && !scan.improving.contains(&16);
    let outside: Vec<u64> = scan
        .improving
        .iter()
        .copied()
        .filter(|&r| scan.window_of(r).is_none())
        .collect();
    outcome(
        membership && examples && outside.is_empty(),
        format!(
            "exact membership {}, 13-15 in and 16 out {}, improving r outside every window {outside:?}",
            if membership { "ok" } else { "MISMATCH" },
            if examples { "ok" } else { "NO" },
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let samples = 1500;
    let mut failures = 0;
    for _ in 0..samples {
        let c = common::random_cluster(&mut rng, 10, 20);
        let results: Vec<_> = PivotPolicy::ALL.iter().map(|&p| unload(&c, p)).collect();
        let Ok(results) = results.into_iter().collect::<Result<Vec<_>, _>>() else {
            failures += 1;
            continue;
        };
        let first = &results[0].0;
        let same = results.iter().all(|(u, _)| u == first);
        let idempotent = unload(first, PivotPolicy::default())
            .map(|(again, t)| t.steps.is_empty() && &again == first)
            .unwrap_or(false);
        let bounded = c.multiplicities().iter().all(|v| v.abs() <= BigInt::from(20))
            && c.structure().points() <= 10;
        if !(same && idempotent && first.is_consistent() && bounded) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{samples} random clusters, {failures} failures"))
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failed = 0;
    for (k, run) in criteria {
        let o = run();
        println!("criterion {k}: {} ({})", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
