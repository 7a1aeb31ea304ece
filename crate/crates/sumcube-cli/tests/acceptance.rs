//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line with the measured quantities. Run with
//! `cargo test -p sumcube-cli --test acceptance -- --nocapture` to see
//! every line.

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sumcube::ball::Ball;
use sumcube::bounds::BoundData;
use sumcube::graph::{BfsOptions, CubeGraph, UniverseFilter};
use sumcube::oracle::{
    dfs_longest, exhaustive_max_length, find_additive_power, find_additive_power_naive,
    IntAlphabet,
};
use sumcube::word::{parikh, two_sided_window, FixedPoint, Letter, Morphism, Vec4, Word};

const W66: &str = "031430110343430310110110314303434303434303143011031011011031011011";
const SEAM40: &str = "03143034343034343.03143011034343031011011";

fn criterion(n: u32, desc: &str, body: impl FnOnce() -> String) {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(details) => println!("criterion {n} PASS — {desc}: {details}"),
        Err(e) => {
            println!("criterion {n} FAIL — {desc}");
            resume_unwind(e);
        }
    }
}

/// |mid − expect| ≤ tol and the enclosure radius itself below tol.
fn assert_pinned(what: &str, b: &Ball, expect: f64, tol: f64) {
    assert!(
        (b.mid() - expect).abs() <= tol,
        "{what}: mid {} vs expected {expect} (tol {tol})",
        b.mid()
    );
    assert!(b.rad() < tol, "{what}: radius {} above {tol}", b.rad());
}

#[test]
fn criterion_1_word_generation() {
    criterion(1, "word generation and position maps", || {
        let expected_eta = [0, 2, 3, 5, 7, 8, 10, 12, 14, 16, 17, 19, 20, 22, 23, 25];
        let expected_par = [0, 0, 1, 2, 2, 3, 3, 4, 5, 5, 6, 6, 7, 7, 8, 8];
        let mut best = Duration::MAX;
        for _ in 0..3 {
            let started = Instant::now();
            let mut fp = FixedPoint::new();
            let prefix = fp.prefix(66);
            let eta: Vec<usize> = (0..16).map(|p| fp.eta(p)).collect();
            let par: Vec<usize> = (0..16).map(|p| fp.parent(p)).collect();
            let elapsed = started.elapsed();
            assert_eq!(prefix.to_string(), W66);
            assert_eq!(eta, expected_eta);
            assert_eq!(par, expected_par);
            best = best.min(elapsed);
        }
        assert!(best < Duration::from_millis(1), "took {best:?}");
        format!("66-letter prefix, eta/parent table for p=0..15, {best:?}")
    });
}

#[test]
fn criterion_2_spectral_constants() {
    criterion(2, "certified spectral constants", || {
        let started = Instant::now();
        let b = BoundData::compute().expect("pipeline certifies");
        let elapsed = started.elapsed();

        assert_pinned("lambda1", &b.spectral.lambda[0].re, 1.690284494616614, 1e-9);
        assert_pinned("c3", &b.c3.c3, 2.1758, 2e-4);
        assert_pinned("pair_max", &b.c3.pair_max, 1.05517, 1e-4);
        let pair: std::collections::BTreeSet<Vec4> = [b.c3.pair.0, b.c3.pair.1].into();
        let expected: std::collections::BTreeSet<Vec4> =
            [Vec4::new(24, 30, 24, 12), Vec4::new(17, 25, 13, 5)].into();
        assert_eq!(pair, expected, "pair_max attained at the wrong vectors");
        assert_pinned("tail", &b.c3.tail, 0.032736, 1e-5);
        assert_pinned("alpha", &b.alpha, 1.4914, 1e-3);
        assert_pinned("beta", &b.beta, 2.1657, 1e-3);
        assert_pinned("c1", &b.c1c2.c1, 1.9032, 1e-3);
        assert_pinned("c2", &b.c1c2.c2, 2.9818, 1e-3);
        assert_pinned("mu_min", &b.spectral.mu_min, 0.55713, 1e-4);
        assert_pinned("norm_budget", &b.uset.budget, 39.455, 1e-2);
        assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
        format!(
            "lambda1={:.15}, c3={:.5}, alpha={:.5}, beta={:.5}, c1={:.5}, c2={:.5}, mu={:.5}, budget={:.3}, {elapsed:?}",
            b.spectral.lambda[0].re.mid(),
            b.c3.c3.mid(),
            b.alpha.mid(),
            b.beta.mid(),
            b.c1c2.c1.mid(),
            b.c1c2.c2.mid(),
            b.spectral.mu_min.mid(),
            b.uset.budget.mid()
        )
    });
}

#[test]
fn criterion_3_set_cardinalities() {
    criterion(3, "set cardinalities and the short-vector table", || {
        let started = Instant::now();
        let b = BoundData::compute().expect("pipeline certifies");

        assert_eq!(b.d9.len(), 301, "walk-vector set size");
        assert_eq!(b.uset.len(), 503, "difference-vector set size");

        let expect: [(Vec4, f64, f64, f64); 9] = [
            (Vec4::ZERO, 0.0, 0.0, 0.0),
            (Vec4::new(1, -2, 2, -1), 0.63278, 1.51365, 1.5425),
            (Vec4::new(-1, 2, -2, 1), 0.63278, 1.51365, 1.5425),
            (Vec4::new(1, -1, -1, 1), 0.21770, 0.62031, 2.23992),
            (Vec4::new(-1, 1, 1, -1), 0.21770, 0.62031, 2.23992),
            (Vec4::new(2, -3, 1, 0), 0.41508, 2.13396, 2.37327),
            (Vec4::new(-2, 3, -1, 0), 0.41508, 2.13396, 2.37327),
            (Vec4::new(0, 1, -3, 2), 0.85048, 0.89334, 3.02667),
            (Vec4::new(0, -1, 3, -2), 0.85048, 0.89334, 3.02667),
        ];
        assert_eq!(b.table.len(), 9);
        for (row, (v, t1, t2, t3)) in b.table.iter().zip(expect) {
            assert_eq!(row.v, v);
            assert!((row.t1.mid() - t1).abs() < 1e-4, "{v} tau1");
            assert!((row.t2.mid() - t2).abs() < 1e-4, "{v} tau2");
            assert!((row.t3.mid() - t3).abs() < 1e-4, "{v} tau3");
        }

        assert_eq!(
            b.candidates,
            vec![Vec4::ZERO, Vec4::new(1, -2, 2, -1), Vec4::new(-1, 2, -2, 1)],
            "initial difference candidates"
        );
        let elapsed = started.elapsed();
        assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
        format!(
            "|D9|={}, |U|={}, 9 table rows to 1e-4, candidates {{0, ±(1,-2,2,-1)}}, {elapsed:?}",
            b.d9.len(),
            b.uset.len()
        )
    });
}

#[test]
fn criterion_4_main_proof() {
    criterion(4, "reachability proof", || {
        let started = Instant::now();
        let b = BoundData::compute().expect("pipeline certifies");
        let graph = CubeGraph::new(b.uset.clone());
        let mut fp = FixedPoint::new();
        let starts = graph.start_set(&mut fp).expect("start templates in universe");
        assert_eq!(starts.len(), 9, "|A|");

        let seq = graph.bfs(&starts, BfsOptions::default()).expect("search");
        assert_eq!(seq.report.reachable_count, 135_572, "|R|");
        assert!(seq.report.target_hits.is_empty(), "target hits");

        #[cfg(feature = "parallel")]
        {
            let par = graph
                .bfs_parallel(&starts, UniverseFilter::PairInSet)
                .expect("parallel search");
            assert_eq!(
                seq.report.set_hash, par.report.set_hash,
                "sequential and parallel runs disagree"
            );
        }

        // The packaged binary must certify the same result with exit 0.
        let out_path = std::env::temp_dir().join(format!(
            "sumcube-prove-{}.json",
            std::process::id()
        ));
        let output = Command::new(env!("CARGO_BIN_EXE_sumcube"))
            .args(["prove", "--out"])
            .arg(&out_path)
            .output()
            .expect("spawn prove");
        assert!(
            output.status.success(),
            "prove exited with {:?}: {}",
            output.status.code(),
            String::from_utf8_lossy(&output.stderr)
        );
        let cert: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&out_path).expect("certificate"))
                .expect("valid JSON");
        let _ = std::fs::remove_file(&out_path);
        assert_eq!(cert["reachableCount"], 135_572);
        assert_eq!(cert["uCount"], 503);
        assert_eq!(cert["d9Count"], 301);
        assert_eq!(cert["targetHits"].as_array().map(Vec::len), Some(0));
        assert_eq!(cert["setHash"], serde_json::json!(seq.report.set_hash));

        let elapsed = started.elapsed();
        assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
        format!(
            "|A|=9, |R|={}, hits=0, exit 0, seq/par hash {}, {elapsed:?}",
            seq.report.reachable_count,
            &seq.report.set_hash[..16]
        )
    });
}

#[test]
fn criterion_5_oracle_cross_check() {
    criterion(5, "oracle against the naive reference", || {
        let started = Instant::now();
        let prefix = FixedPoint::new().prefix(20_000).to_values();
        assert_eq!(find_additive_power(&prefix, 3), None, "20k prefix");

        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
        let letters = [0u32, 1, 3, 4];
        for case in 0..1000 {
            let len = rng.gen_range(0..=200);
            let w: Vec<u32> = (0..len).map(|_| letters[rng.gen_range(0..4)]).collect();
            assert_eq!(
                find_additive_power(&w, 3),
                find_additive_power_naive(&w, 3),
                "disagreement on case {case}: {w:?}"
            );
        }
        let elapsed = started.elapsed();
        assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
        format!("prefix(20000) cube-free, 1000/1000 random words agree, {elapsed:?}")
    });
}

#[test]
fn criterion_6_search_experiments() {
    criterion(6, "backtracking search experiments", || {
        let ternary = IntAlphabet::new(vec![0, 1, 2]).expect("alphabet");
        let r = dfs_longest(&ternary, 3, 1288, Duration::from_secs(60));
        assert!(
            r.word.len() >= 500,
            "ternary search reached only {}",
            r.word.len()
        );
        assert_eq!(
            find_additive_power(&r.word, 3),
            None,
            "search result fails revalidation"
        );

        let quaternary = IntAlphabet::new(vec![0, 1, 2, 3]).expect("alphabet");
        let ex = exhaustive_max_length(&quaternary, 2, 10_000).expect("finite tree");
        assert!(ex.max_len <= 60, "exceeds the known bound: {}", ex.max_len);
        format!(
            "ternary cube-free word of length {} ({} nodes, {:.2?}); exhaustive square-free max over {{0,1,2,3}} = {} ({} witnesses)",
            r.word.len(),
            r.nodes,
            r.elapsed,
            ex.max_len,
            ex.witness_count
        )
    });
}

#[test]
fn criterion_7_two_sided_word() {
    criterion(7, "two-sided word", || {
        let w = two_sided_window(23);
        let seam = w.seam_string();
        assert!(
            seam.ends_with(SEAM40),
            "seam-aligned window mismatch: {seam}"
        );

        let big = two_sided_window(5000);
        assert_eq!(
            find_additive_power(&big.letters.to_values(), 3),
            None,
            "10^4-letter window contains an additive cube"
        );
        format!("40-letter seam window matches, 10000-letter window cube-free")
    });
}

#[test]
fn criterion_8_property_suites() {
    criterion(8, "invariant property suites", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xb411_b411);

        // Ball containment on 10^4 dyadic-rational samples.
        for _ in 0..10_000 {
            let a = rng.gen_range(-(1i64 << 28)..(1i64 << 28)) as f64
                / (1u64 << rng.gen_range(0..10)) as f64;
            let b = rng.gen_range(-(1i64 << 28)..(1i64 << 28)) as f64
                / (1u64 << rng.gen_range(0..10)) as f64;
            let (ba, bb) = (Ball::exact(a), Ball::exact(b));
            let (ra, rb) = (
                BigRational::from_float(a).unwrap(),
                BigRational::from_float(b).unwrap(),
            );
            let checks: [(Ball, BigRational); 4] = [
                (ba + bb, &ra + &rb),
                (ba - bb, &ra - &rb),
                (ba * bb, &ra * &rb),
                (ba.abs(), ra.abs()),
            ];
            for (ball, exact) in checks {
                let lo = BigRational::from_float(ball.lo()).unwrap();
                let hi = BigRational::from_float(ball.hi()).unwrap();
                assert!(lo <= exact && exact <= hi, "containment failed");
            }
        }

        // Difference set closed under negation.
        let bd = BoundData::compute().expect("pipeline certifies");
        for v in &bd.uset.members {
            assert!(bd.uset.contains(&-*v), "negation closure fails at {v}");
        }

        // Reachable set closed under in-universe successors (sampled).
        let graph = CubeGraph::new(bd.uset.clone());
        let mut fp = FixedPoint::new();
        let starts = graph.start_set(&mut fp).expect("start set");
        let out = graph.bfs(&starts, BfsOptions::default()).expect("search");
        let mut sampled = 0usize;
        for (i, t) in out.iter_reachable(&graph).enumerate() {
            if i % 53 != 0 {
                continue;
            }
            sampled += 1;
            for s in graph.successors(&t) {
                assert!(out.contains(&graph, &s), "successor {s} escapes R");
            }
        }
        assert!(sampled >= 2000);

        // Parikh/incidence commutation on 10^3 random factors.
        let phi = Morphism::canonical();
        let m = phi.incidence_matrix();
        let w = fp.prefix(60_000);
        for _ in 0..1000 {
            let start = rng.gen_range(0..50_000);
            let len = rng.gen_range(0..=1000);
            let factor = Word::from_letters(w.letters()[start..start + len].to_vec());
            assert_eq!(parikh(&phi.apply(&factor)), m.mul_vec(&parikh(&factor)));
        }

        // Prefix-vector reconstruction along parents for q ≤ 10^4.
        for q in 0..10_000usize {
            let p = fp.parent(q);
            let start = fp.eta(p);
            let a: Vec<Letter> = (start..q).map(|i| fp.letter(i)).collect();
            let a = Word::from_letters(a);
            assert!(matches!(a.to_string().as_str(), "" | "0" | "4"));
            assert_eq!(fp.sigma(q), m.mul_vec(&fp.sigma(p)) + parikh(&a));
        }

        format!(
            "10^4 containment samples, negation closure on {} vectors, fixed point on {sampled} samples, 10^3 commutation factors, reconstruction to 10^4",
            bd.uset.len()
        )
    });
}
