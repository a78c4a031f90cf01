//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p freiman-cli --test acceptance`.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use freiman_core::algnum::{
    certify_minimal_tth_root, condense_diagonal, is_algebraic_freiman_iso_diagonal, DiagonalOptions, UPoly,
};
use freiman_core::condense::{condense_iterate, condense_step, env_floor, exact_min_model, IterateOptions};
use freiman_core::densify::{densify_step, DensifyOptions};
use freiman_core::meanvalue::{count_j, count_j_oracle};
use freiman_core::numeric::Decision;
use freiman_core::{
    build_hypergraph, hypergraph_isomorphic, is_freiman_iso, CondenseMode, IntSet, Limits, MapTable, PolySystem,
    Polynomial, StepOutcome, Term, VerifyLevel,
};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Number, name, time limit and check.
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn ints(v: &[i64]) -> IntSet {
    IntSet::new(v.iter().copied()).unwrap()
}

/// Polynomial value straight from the term list.
fn eval(p: &Polynomial, x: &[BigInt]) -> BigInt {
    p.terms()
        .iter()
        .map(|t| {
            t.exps.iter().zip(x).fold(t.coeff.clone(), |acc, (&e, xi)| {
                acc * num_traits::pow(xi.clone(), e as usize)
            })
        })
        .sum()
}

fn solves(sys: &PolySystem, x: &[BigInt]) -> bool {
    sys.polys().iter().all(|p| eval(p, x).is_zero())
}

/// Calls `f` on every `s`-tuple over `values`.
fn tuples(values: &[BigInt], s: usize, mut f: impl FnMut(&[BigInt])) {
    let n = values.len();
    let mut idx = vec![0usize; s];
    let mut x: Vec<BigInt> = vec![values[0].clone(); s];
    loop {
        f(&x);
        let mut j = s;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < n {
                x[j] = values[idx[j]].clone();
                break;
            }
            idx[j] = 0;
            x[j] = values[0].clone();
        }
    }
}

fn count_solutions(values: &[BigInt], sys: &PolySystem) -> u64 {
    let mut c = 0;
    tuples(values, sys.num_vars(), |x| c += u64::from(solves(sys, x)));
    c
}

fn random_system(rng: &mut ChaCha8Rng, s: usize, homogeneous_linear: bool) -> PolySystem {
    let npolys = rng.random_range(1..=2);
    let polys = (0..npolys)
        .map(|_| {
            let mut terms = Vec::new();
            for j in 0..s {
                let c: i64 = rng.random_range(-2..=2);
                if c != 0 {
                    let mut e = vec![0; s];
                    e[j] = if homogeneous_linear { 1 } else { rng.random_range(1..=2) };
                    terms.push(Term::new(c, e));
                }
            }
            if terms.is_empty() {
                let mut e = vec![0; s];
                e[0] = 1;
                terms.push(Term::new(1, e));
                if s > 1 {
                    let mut e = vec![0; s];
                    e[s - 1] = 1;
                    terms.push(Term::new(-1, e));
                }
            }
            if !homogeneous_linear && rng.random_bool(0.3) {
                terms.push(Term::new(rng.random_range(-3i64..=3), vec![0; s]));
            }
            Polynomial::new(s, terms).unwrap()
        })
        .collect();
    PolySystem::new(s, polys).unwrap()
}

fn random_set(rng: &mut ChaCha8Rng, card: usize, span: i64) -> IntSet {
    let mut v = std::collections::BTreeSet::new();
    while v.len() < card {
        v.insert(rng.random_range(-span..=span));
    }
    IntSet::new(v).unwrap()
}

fn c1_iso_oracle() -> Outcome {
    let l = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut yes, mut no) = (0, 0);
    for case in 0..240 {
        let card = rng.random_range(1..=4);
        let s = rng.random_range(1..=4);
        let a = random_set(&mut rng, card, 6);
        let linear = rng.random_bool(0.5);
        let sys = random_system(&mut rng, s, linear);
        let images: Vec<BigInt> = match case % 3 {
            // Dilations preserve homogeneous solution sets; translations preserve balanced ones.
            0 => a.elements().iter().map(|x| x * 3).collect(),
            1 => a.elements().iter().map(|x| x + 5).collect(),
            _ => random_set(&mut rng, card, 9).elements().to_vec(),
        };
        let psi = MapTable::single(a.elements().iter().cloned().zip(images.iter().cloned())).unwrap();
        let verdict = is_freiman_iso(&psi, &a, &sys, &l).map_err(|e| e.to_string())?;
        let mut agree = true;
        tuples(a.elements(), s, |x| {
            let y: Vec<BigInt> = x.iter().map(|v| psi.apply(v).unwrap().clone()).collect();
            agree &= solves(&sys, x) == solves(&sys, &y);
        });
        if agree != verdict.is_yes() {
            return Err(format!(
                "case {case}: library says {}, oracle says {agree}",
                verdict.is_yes()
            ));
        }
        if agree {
            yes += 1
        } else {
            no += 1
        }
    }
    Ok(format!("240 instances agree ({yes} yes, {no} no)"))
}

fn c2_condense_soundness() -> Outcome {
    let l = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut emitted = 0;
    let mut checked = 0;
    for case in 0..60 {
        let card = rng.random_range(2..=5);
        let s = rng.random_range(2..=3);
        let span = 10i64.pow(rng.random_range(3..=18)) / 2;
        let a = random_set(&mut rng, card, span);
        let sys = random_system(&mut rng, s, true);
        let mode = if case % 2 == 0 {
            CondenseMode::Thm32
        } else {
            CondenseMode::Greedy
        };
        let step = match condense_step(&a, &sys, mode, &l) {
            Ok(StepOutcome::Improved(st)) => {
                emitted += 1;
                if st.env_after >= st.env_before {
                    return Err(format!("case {case}: emitted step does not decrease env"));
                }
                st
            }
            Ok(StepOutcome::NoImprovement(Some(st))) => *st,
            Ok(StepOutcome::NoImprovement(None)) => continue,
            Err(e) => return Err(format!("case {case}: {e}")),
        };
        checked += 1;
        let b = step.image().map_err(|e| e.to_string())?;
        if !is_freiman_iso(&step.map, &a, &sys, &l)
            .map_err(|e| e.to_string())?
            .is_yes()
        {
            return Err(format!("case {case}: step map is not an isomorphism"));
        }
        let (sa, sb) = (count_solutions(a.elements(), &sys), count_solutions(b.elements(), &sys));
        if sa != sb {
            return Err(format!("case {case}: |S(A)| = {sa}, |S(B)| = {sb}"));
        }
    }
    if checked < 50 {
        return Err(format!("only {checked} steps checked"));
    }
    Ok(format!("{checked} steps verified, {emitted} improving"))
}

fn c3_homogeneous_bound() -> Outcome {
    let l = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ran = 0;
    let mut worst = 0.0f64;
    for case in 0..80 {
        let card = rng.random_range(1..=5);
        let s = rng.random_range(2..=3);
        let span = 10i64.pow(rng.random_range(1..=15));
        let a = random_set(&mut rng, card, span);
        let sys = random_system(&mut rng, s, true);
        let bound = num_traits::pow(sys.lambda() + BigInt::one(), card);
        if bound > BigInt::from(10_000) {
            continue;
        }
        ran += 1;
        let trace = condense_iterate(&a, &sys, &IterateOptions::new(CondenseMode::Thm32, 64), &l)
            .map_err(|e| format!("case {case}: {e}"))?;
        let env = trace.final_set.env();
        if env > bound {
            return Err(format!("case {case}: env {env} > (Λ+1)^A = {bound} for {a:?}"));
        }
        let r = env.to_string().parse::<f64>().unwrap() / bound.to_string().parse::<f64>().unwrap();
        worst = worst.max(r);
    }
    Ok(format!("{ran} instances within (Λ+1)^A, largest env/bound {worst:.3}"))
}

fn c4_min_models() -> Outcome {
    let l = Limits::default();
    let ap = PolySystem::linear(&[(&[1, 1, -2], 0)]).unwrap();
    let m = exact_min_model(&ints(&[0, 100, 200]), &ap, 64, &l).map_err(|e| e.to_string())?;
    let g1 = build_hypergraph(&m.witness, &ap, &l).unwrap();
    let g2 = build_hypergraph(&ints(&[-1, 0, 1]), &ap, &l).unwrap();
    if m.env != BigInt::from(2) || hypergraph_isomorphic(&g1, &g2, &l).unwrap().is_none() {
        return Err(format!("{{0,100,200}}: env {} witness {:?}", m.env, m.witness));
    }
    for a in 1..=5usize {
        let set = IntSet::new(0..a as i64).unwrap();
        let m = exact_min_model(&set, &ap, 64, &l).map_err(|e| e.to_string())?;
        let floor = BigInt::from((a + 2) / 2);
        if m.env != floor || env_floor(a) != floor {
            return Err(format!("A = {a}: env* {} but ⌈(A+1)/2⌉ = {floor}", m.env));
        }
    }
    Ok("env* = 2 for {0,100,200}; consecutive sets meet ⌈(A+1)/2⌉ for A ≤ 5".into())
}

fn c5_densify_counts() -> Outcome {
    let l = Limits::default();
    let ap = PolySystem::linear(&[(&[1, 1, -2], 0)]).unwrap();
    let d = ints(&[0, 1, 3]);
    let opts = DensifyOptions {
        verify: Some(VerifyLevel::Full),
        ..DensifyOptions::default()
    };
    let st = densify_step(&d, &ap, &opts, &l).map_err(|e| e.to_string())?;
    let se = count_solutions(st.output.elements(), &ap);
    let sd = count_solutions(d.elements(), &ap);
    if st.output.card() != 27 || se != 27 || sd.pow(3) != 27 || st.verification.counts != (27, 27) {
        return Err(format!("card {} |S(E)| {se} |S(D)|^3 {}", st.output.card(), sd.pow(3)));
    }
    Ok(format!("card(E) = 27, |S(E)| = 27 = 3^3, primes {:?}", st.primes))
}

fn c6_ratio_improvement() -> Outcome {
    let l = Limits::default();
    let ap = PolySystem::linear(&[(&[1, 1, -2], 0)]).unwrap();
    let big = BigInt::from(10).pow(70);
    let d = IntSet::new([BigInt::zero(), big.clone(), big * 3]).unwrap();
    let st = densify_step(&d, &ap, &DensifyOptions::default(), &l).map_err(|e| e.to_string())?;
    if st.precondition.decision != Decision::Holds {
        return Err(format!("precondition {:?}", st.precondition));
    }
    let c = &st.improvement;
    if c.decision != Decision::Holds || c.margin() <= c.error() {
        return Err(format!("improvement {c:?}"));
    }
    Ok(format!(
        "ratio {:.4} -> {:.4}, margin {:.3e} > error {:.3e}",
        st.ratio_before.value.mid(),
        st.ratio_after.value.mid(),
        c.margin(),
        c.error()
    ))
}

fn c7_mean_values() -> Outcome {
    let l = Limits::default();
    if count_j(&ints(&[0, 1, 2]), 2, 2, &l).map_err(|e| e.to_string())? != 15 {
        return Err("J_{2,2}({0,1,2}) != 15".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut oracle_cases = 0;
    for card in 1..=31usize {
        for s in 1..=3usize {
            if (card as u64).pow(2 * s as u32) > 1_000_000 {
                continue;
            }
            for k in 1..=3u32 {
                let a = random_set(&mut rng, card, 40);
                let j = count_j(&a, s, k, &l).map_err(|e| e.to_string())?;
                let o = count_j_oracle(&a, s, k, &l).map_err(|e| e.to_string())?;
                let lower = (card as u64).pow(s as u32);
                let upper = (card as u64).pow(2 * s as u32);
                if j != o || j < lower || j > upper {
                    return Err(format!("card {card} s {s} k {k}: tally {j}, oracle {o}"));
                }
                oracle_cases += 1;
            }
        }
    }
    for case in 0..100 {
        let card = rng.random_range(1..=6);
        let s = rng.random_range(1..=3);
        let k = rng.random_range(1..=3);
        let a = random_set(&mut rng, card, 30);
        let shift = BigInt::from(rng.random_range(-1000i64..=1000));
        let lambda = BigInt::from(*[-7i64, -2, 2, 3, 11].get(case % 5).unwrap());
        let j = count_j(&a, s, k, &l).unwrap();
        let shifted = count_j(&a.map(|x| x + &shift).unwrap(), s, k, &l).unwrap();
        let dilated = count_j(&a.map(|x| x * &lambda).unwrap(), s, k, &l).unwrap();
        if j != shifted || j != dilated {
            return Err(format!("case {case}: J {j}, shifted {shifted}, dilated {dilated}"));
        }
    }
    Ok(format!(
        "{oracle_cases} oracle instances, 100 invariance instances, J_2,2({{0,1,2}}) = 15"
    ))
}

fn c8_diagonal() -> Outcome {
    let l = Limits::default();
    let a = ints(&[0, 3, 4, 5]);
    let sys = PolySystem::single(Polynomial::diagonal(&[1, 1, -1, -1], 2).unwrap());
    let out = condense_diagonal(&a, &sys, &DiagonalOptions::default(), &l).map_err(|e| e.to_string())?;
    let c = &out.certificate;
    let verdict = is_algebraic_freiman_iso_diagonal(&out.map, &a, &sys, &l).map_err(|e| e.to_string())?;
    // Independent reduction: P(x) = 0 iff Σ c_j (image power)_j = 0.
    let mut agree = true;
    tuples(a.elements(), 4, |x| {
        let y: Vec<BigInt> = x.iter().map(|v| out.map.entries[v].power.clone().unwrap()).collect();
        agree &= solves(&sys, x) == solves(&out.linear, &y);
    });
    let bound = BigInt::from(2 * 8 * 625);
    if !verdict.is_yes() || !agree || !c.iso || c.env.value > bound || c.degree > 16u32.into() {
        return Err(format!("{c:?}"));
    }
    Ok(format!(
        "iso yes, Env(B) = {} <= {bound}, d(B) <= {} <= 16",
        c.env.value, c.degree
    ))
}

fn c9_granville() -> Outcome {
    let l = Limits::default();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut checked = 0;
    for t in 1..=6u32 {
        for b in -50i64..=50 {
            let b = BigInt::from(b);
            let r = certify_minimal_tth_root(&b, t, &l).map_err(|e| e.to_string())?;
            let q = UPoly::binomial(t, &b);
            if !r.defining_poly().divides(&q) {
                return Err(format!("{r} does not divide x^{t} - {b}"));
            }
            if !r.is_certified_minimal() {
                continue;
            }
            let left: BigInt = r.defining_poly().ascending().iter().map(|c| c * c).sum();
            let q2: BigInt = q.ascending().iter().map(|c| c * c).sum();
            let right = phi.powi(2 * t as i32) * q2.to_string().parse::<f64>().unwrap() * (1.0 + 1e-12);
            if left.to_string().parse::<f64>().unwrap() > right || left.is_negative() {
                return Err(format!("b = {b}, t = {t}: ‖r‖² = {left} > {right}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} certified divisors, zero violations"))
}

fn c10_determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("freiman-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let w = |name: &str, body: &str| {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    };
    let set = w("set.txt", "0\n1000000\n2000000\n3000000\n");
    let d3 = w("d3.txt", "0\n1\n3\n");
    let pyth = w("pyth.txt", "0\n3\n4\n5\n");
    let ap = w("ap.txt", "vars 3\nlinear: 1 1 -2 0\n");
    let sq = w("sq.txt", "vars 4\npoly: 1 2 0 0 0; 1 0 2 0 0; -1 0 0 2 0; -1 0 0 0 2\n");
    let configs: Vec<Vec<&str>> = vec![
        vec!["condense", "--mode", "thm32", &set, &ap],
        vec!["condense", "--mode", "greedy", &set, &ap],
        vec!["condense", "--diagonal", "2", &pyth, &sq],
        vec![
            "densify",
            "--single",
            "--verify",
            "sample",
            "--samples",
            "300",
            &d3,
            &ap,
        ],
        vec!["count", "--s", "2", "--k", "2", &d3],
        vec!["minmodel", &set, &ap],
    ];
    let bin = env!("CARGO_BIN_EXE_freiman");
    for cfg in &configs {
        let run = || {
            Command::new(bin)
                .arg("--no-timing")
                .args(cfg)
                .output()
                .map_err(|e| e.to_string())
        };
        let (a, b) = (run()?, run()?);
        if !a.status.success() {
            return Err(format!("{cfg:?} exited with {:?}", a.status.code()));
        }
        if a.stdout != b.stdout {
            return Err(format!("{cfg:?} produced different reports"));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} configurations byte-identical across runs", configs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            1,
            "isomorphism oracle equivalence",
            Duration::from_secs(10),
            c1_iso_oracle,
        ),
        (
            2,
            "condensation soundness",
            Duration::from_secs(60),
            c2_condense_soundness,
        ),
        (
            3,
            "homogeneous step bound (Λ+1)^A",
            Duration::from_secs(600),
            c3_homogeneous_bound,
        ),
        (4, "exact minimal models", Duration::from_secs(30), c4_min_models),
        (
            5,
            "densification counting identity",
            Duration::from_secs(20),
            c5_densify_counts,
        ),
        (6, "ratio improvement", Duration::from_secs(20), c6_ratio_improvement),
        (7, "mean values", Duration::from_secs(60), c7_mean_values),
        (8, "diagonal pipeline", Duration::from_secs(30), c8_diagonal),
        (9, "granville inequality", Duration::from_secs(600), c9_granville),
        (10, "determinism", Duration::from_secs(600), c10_determinism),
    ];
    let mut failed = 0;
    for (n, name, limit, run) in criteria {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let verdict = match result {
            Ok(detail) if took <= limit => format!("PASS {n:>2} {name}: {detail}"),
            Ok(detail) => format!("FAIL {n:>2} {name}: over time limit {limit:?}: {detail}"),
            Err(why) => format!("FAIL {n:>2} {name}: {why}"),
        };
        if verdict.starts_with("FAIL") {
            failed += 1;
        }
        println!("{verdict} [{:.2}s]", took.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
