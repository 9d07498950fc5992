//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs without the libtest harness so the lines always print.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mvdelta::carriers::{halving_witness, is_infinitesimal, maximal_ideals, radical, Carrier, ChangElem, Radical, Value};
use mvdelta::corpus::{delta_axioms, halving_identities, non_theorems, identity_corpus};
use mvdelta::decide::{decide, sample_falsify, DecideConfig};
use mvdelta::gammaxi::{gamma_of_xi, xi_chain_iso};
use mvdelta::plfunc::{
    pl_archimedean_certificate, pl_neg, pl_scale, random_plfunc, reconstruct_half, uniform_dist, FnSeq, PLFunc,
    PlCarrier,
};
use mvdelta::spectrum::{
    brute_force_homs, delta_preservation_check, enumerate_homs, epsilon_finite, eta, holder_uniqueness, PlHom,
};
use mvdelta::{evaluate, MvAlgebra, Q01, Rat, UnitInterval};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn decision_completeness() -> Outcome {
    let start = Instant::now();
    let corpus = identity_corpus();
    for item in &corpus {
        let v = decide(&item.equation, DecideConfig::default());
        ensure(v.is_valid(), || format!("`{}` ({}) decided {}", item.equation, item.name, v.class()))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{} identities valid in {secs:.2}s", corpus.len()))
}

fn soundness_cross_check() -> Outcome {
    let corpus = identity_corpus();
    for (i, item) in corpus.iter().enumerate() {
        if let Some(cx) = sample_falsify(&item.equation, 10_000, 1000 + i as u64, 8) {
            return Err(format!("`{}` falsified by sampling at {cx}", item.name));
        }
    }
    let bad = non_theorems();
    for item in &bad {
        let v = decide(&item.equation, DecideConfig::default());
        let cx = v.counterexample().ok_or_else(|| format!("`{}` decided {}", item.name, v.class()))?;
        let lhs = evaluate(&item.equation.lhs, &cx.assign, &UnitInterval).map_err(|e| e.to_string())?;
        let rhs = evaluate(&item.equation.rhs, &cx.assign, &UnitInterval).map_err(|e| e.to_string())?;
        ensure(lhs == cx.lhs && rhs == cx.rhs, || format!("`{}` replay differs", item.name))?;
        ensure(!item.equation.holds_for(&UnitInterval, &lhs, &rhs), || format!("`{}` witness holds", item.name))?;
    }
    Ok(format!("{} identities x 10^4 samples clean; {} non-theorems refuted and replayed", corpus.len(), bad.len()))
}

fn chang_radical() -> Outcome {
    let chang = Carrier::Chang;
    ensure(radical(&chang).map_err(|e| e.to_string())? == Radical::ChangInfinitesimals, || "closed form".into())?;
    let rad = Radical::ChangInfinitesimals;
    let mut checked = 0;
    for x in ChangElem::bounded(1000) {
        let v = Value::Chang(x);
        let report = is_infinitesimal(&chang, &v).map_err(|e| e.to_string())?;
        let expected = rad.contains(&chang, &v) && x != ChangElem::zero();
        ensure(report.infinitesimal == expected, || format!("{x}: got {}", report.infinitesimal))?;
        // direct n·x ≤ ¬x for a spread of n
        let direct = [1u64, 2, 7, 100, 1000].iter().all(|&n| chang.leq(&chang.nfold(n, &v), &chang.neg(&v)));
        ensure(direct == (x.level() == 0), || format!("{x}: direct test disagrees"))?;
        checked += 1;
    }
    ensure(halving_witness(&ChangElem::infinitesimal(1)).is_none(), || "(0,1) has a half".into())?;
    ensure(halving_witness(&ChangElem::infinitesimal(2)) == Some(ChangElem::infinitesimal(1)), || "(0,2)".into())?;
    Ok(format!("radical = {{(0,k)}}, {checked} elements agree, halving obstruction at (0,1)"))
}

fn pl_delta_axioms() -> Outcome {
    let pl = PlCarrier;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut suite = delta_axioms();
    suite.extend(halving_identities(4));
    let mut instances = 0;
    for item in &suite {
        let vars = item.equation.free_vars();
        for _ in 0..1000 {
            let env: BTreeMap<String, PLFunc> = vars.iter().map(|v| (v.clone(), random_plfunc(&mut rng, 3, 8, 6))).collect();
            let lhs = evaluate(&item.equation.lhs, &env, &pl).map_err(|e| e.to_string())?;
            let rhs = evaluate(&item.equation.rhs, &env, &pl).map_err(|e| e.to_string())?;
            ensure(item.equation.holds_for(&pl, &lhs, &rhs), || format!("`{}` fails at {env:?}", item.name))?;
            instances += 1;
        }
    }
    Ok(format!("{} identities x 1000 random PL instances = {instances} exact checks", suite.len()))
}

fn isbell_bound() -> Outcome {
    let targets = [
        ("id", PLFunc::identity()),
        ("1-x", pl_neg(&PLFunc::identity())),
        ("tent", PLFunc::tent()),
        ("const 1/3", PLFunc::constant(Q01::new(1, 3))),
    ];
    let mut worst = String::new();
    for (name, f) in &targets {
        let half_target = pl_scale(&Q01::new(1, 2), f);
        for n in 1..=8u32 {
            let r = reconstruct_half(f, n).map_err(|e| format!("{name} n={n}: {e}"))?;
            let bound = Q01::dyadic(1, n);
            ensure(r.error_bound == bound, || format!("{name} n={n}: reported bound {}", r.error_bound))?;
            let d = uniform_dist(&r.result, &half_target);
            ensure(d <= bound, || format!("{name} n={n}: distance {d} > {bound}"))?;
            if n == 8 {
                worst = format!("{worst}{name}: {d}; ");
            }
        }
    }
    Ok(format!("all 32 cases within 2^-n (n=8 distances: {})", worst.trim_end_matches("; ")))
}

fn gamma_xi_round_trip() -> Outcome {
    for n in 1..=6u32 {
        let r = xi_chain_iso(n, 2 * n);
        ensure(r.ok(), || format!("xi_chain_iso({n}, {}): {r:?}", 2 * n))?;
        ensure(r.sequences == (2 * n * n + 1) as usize, || format!("n={n}: {} sequences", r.sequences))?;
        let g = gamma_of_xi(&Carrier::Chain(n), 2).map_err(|e| e.to_string())?;
        ensure(g.ok() && g.gamma_size == (n + 1) as usize, || format!("gamma chain:{n}: {g:?}"))?;
    }
    let g1 = gamma_of_xi(&Carrier::Chain(1), 2).map_err(|e| e.to_string())?;
    ensure(g1.gamma_size == 2, || "Ł₁ does not give 2 elements".into())?;
    let p: Carrier = "prod(chain:2,chain:3)".parse().unwrap();
    let gp = gamma_of_xi(&p, 2).map_err(|e| e.to_string())?;
    ensure(gp.ok() && gp.gamma_size == 12, || format!("{gp:?}"))?;
    Ok("chains n<=6: sum-of-entries iso and gamma bijection hold; chain:1 gives 2 elements".into())
}

fn spectrum_instances() -> Outcome {
    let c: Carrier = "prod(chain:2,chain:3)".parse().unwrap();
    let homs = enumerate_homs(&c).map_err(|e| e.to_string())?;
    let max = maximal_ideals(&c).map_err(|e| e.to_string())?;
    ensure(homs.len() == 2, || format!("{} homs", homs.len()))?;
    ensure(homs.iter().zip(&max).all(|(h, m)| h.kernel() == *m), || "kernels differ".into())?;
    let brute = brute_force_homs(&c).map_err(|e| e.to_string())?;
    ensure(brute.len() == 2 && homs.iter().all(|h| brute.contains(h)), || "brute force disagrees".into())?;

    let corpus = [
        "chain:1", "chain:2", "chain:3", "chain:4", "chain:5", "chain:6", "prod(chain:2,chain:3)",
        "prod(chain:1,chain:1)", "prod(chain:1,chain:2,chain:1)", "prod(chain:3,chain:2)", "prod()",
    ];
    for s in corpus {
        let a: Carrier = s.parse().unwrap();
        let r = holder_uniqueness(&a).map_err(|e| e.to_string())?;
        ensure(r.unique && r.images_are_chains && r.ideals == r.homs, || format!("{s}: {r:?}"))?;
        let e = eta(&a, 0).map_err(|e| e.to_string())?;
        ensure(e.injective_iff_semisimple(), || format!("eta on {s}"))?;
    }
    let e = eta(&Carrier::Chang, 1000).map_err(|e| e.to_string())?;
    ensure(e.injective_iff_semisimple() && !e.injective, || "eta on chang".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut eps = 0;
    for size in 1..=5usize {
        for _ in 0..3 {
            let factors: Vec<String> = (0..size).map(|_| format!("chain:{}", rng.gen_range(1..=4))).collect();
            let spec = format!("prod({})", factors.join(","));
            let r = epsilon_finite(&spec.parse().unwrap()).map_err(|e| e.to_string())?;
            ensure(r.bijective && r.discrete && r.points == size, || format!("{spec}: {r:?}"))?;
            eps += 1;
        }
    }
    Ok(format!("2 homs on chain:2 x chain:3; Hölder unique on {} algebras; {eps} epsilon bijections; eta iff semisimple incl. chang", corpus.len()))
}

fn delta_preservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut total = 0;
    for i in 0..500 {
        let k = rng.gen_range(0..=4);
        let seq = FnSeq {
            prefix: (0..k).map(|_| random_plfunc(&mut rng, 3, 8, 6)).collect(),
            tail: random_plfunc(&mut rng, 3, 8, 6),
        };
        let h = if i % 2 == 0 {
            let p = Q01::try_from_rat(Rat::new(rng.gen_range(0..=30).into(), 30.into())).unwrap();
            PlHom::Eval(p)
        } else {
            PlHom::Precompose(random_plfunc(&mut rng, 3, 8, 6))
        };
        let r = delta_preservation_check(&h, std::slice::from_ref(&seq));
        ensure(r.failures == 0, || format!("{h:?} fails on {seq:?}"))?;
        total += r.checks;
    }
    Ok(format!("500 homomorphisms, {total} exact delta/halfn commutations"))
}

fn archimedean_certificates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut done = 0;
    while done < 500 {
        let f = random_plfunc(&mut rng, 4, 16, 12);
        if f.is_zero() {
            continue;
        }
        let n = pl_archimedean_certificate(&f).ok_or("no certificate for nonzero function")?;
        // at the maximum m: n·m > 1 − m
        let m = f.max_value();
        ensure(Rat::from_integer(n.into()) * m.as_rat() > Rat::one() - m.as_rat(), || format!("n={n} too small"))?;
        ensure(!m.as_rat().is_zero(), || "zero max".into())?;
        done += 1;
    }
    Ok("500 nonzero PL functions have verified certificates".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("decision-engine completeness", decision_completeness),
        ("soundness cross-check", soundness_cross_check),
        ("chang radical and halving", chang_radical),
        ("delta axioms on PL functions", pl_delta_axioms),
        ("isbell reconstruction bound", isbell_bound),
        ("gamma/xi round trip", gamma_xi_round_trip),
        ("spectrum and duality instances", spectrum_instances),
        ("delta preservation of homomorphisms", delta_preservation),
        ("archimedean certificates", archimedean_certificates),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({secs:.2}s) - {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({secs:.2}s) - {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
