//! Named equations: the identities of MV- and δ-algebras exercised by the
//! decider and the carrier suites, and a list of non-theorems.

use crate::term::{parse_equation, Equation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedEquation {
    pub name: String,
    pub equation: Equation,
}

fn named(name: impl Into<String>, src: &str) -> NamedEquation {
    let equation = parse_equation(src).unwrap_or_else(|e| panic!("corpus entry `{src}` does not parse: {e}"));
    NamedEquation { name: name.into(), equation }
}

fn xs(range: std::ops::RangeInclusive<usize>) -> Vec<String> {
    range.map(|i| format!("x{i}")).collect()
}

fn zeros(n: usize) -> Vec<String> {
    vec!["0".to_string(); n]
}

/// `delta(items; tail)`.
fn delta(items: &[String], tail: &str) -> String {
    format!("delta({}; {tail})", items.join(", "))
}

fn oplus_all(terms: &[String]) -> String {
    let mut it = terms.iter();
    let first = it.next().expect("nonempty").clone();
    it.fold(first, |acc, t| format!("oplus({acc}, {t})"))
}

fn halfn(n: usize, t: &str) -> String {
    format!("halfn({n}, {t})")
}

fn concat(a: Vec<String>, b: Vec<String>) -> Vec<String> {
    a.into_iter().chain(b).collect()
}

/// The MV-algebra law and two standard identities.
pub fn mv_identities() -> Vec<NamedEquation> {
    vec![
        named("mv-law", "oplus(neg(oplus(neg(x), y)), y) = oplus(neg(oplus(neg(y), x)), x)"),
        named("sum-absorbs-product", "oplus(oplus(x, y), odot(x, y)) = oplus(x, y)"),
        named("difference-recombines", "oplus(ominus(x, y), odot(oplus(x, neg(y)), y)) = x"),
    ]
}

/// Axioms A1–A6 on eventually-constant sequences.
pub fn delta_axioms() -> Vec<NamedEquation> {
    vec![
        named("A1 head distance", "dist(delta(x1, x2, x3; c), delta(x1; 0)) = delta(0, x2, x3; c)"),
        named("A1 constant tail", "dist(delta(x1; c), delta(x1; 0)) = delta(0; c)"),
        named("A2 halving inside", "half(delta(x1, x2; c)) = delta(half(x1), half(x2); half(c))"),
        named("A3 constant sequence", "delta(; x) = x"),
        named("A3 repeated prefix", "delta(x, x, x; x) = x"),
        named("A4 leading zero", "delta(0, x1, x2; c) = half(delta(x1, x2; c))"),
        named("A5 monotone", "delta(x1, x2; c) <= delta(oplus(x1, y1), oplus(x2, y2); oplus(c, d))"),
        named("A6 halving difference", "half(ominus(x, y)) = ominus(half(x), half(y))"),
    ]
}

/// Consequences of the axioms for the iterated halving `f_{1/2ⁿ}`, `n ≤ max_n`.
pub fn halving_identities(max_n: usize) -> Vec<NamedEquation> {
    let mut out = Vec::new();
    let seq = xs(1..=2);
    for n in 1..=max_n {
        let hs: Vec<String> = seq.iter().map(|x| halfn(n, x)).collect();
        out.push(named(
            format!("halfn commutes with delta n={n}"),
            &format!("{} = {}", halfn(n, &delta(&seq, "c")), delta(&hs, &halfn(n, "c"))),
        ));
        out.push(named(
            format!("halfn shifts delta n={n}"),
            &format!("{} = {}", halfn(n, &delta(&seq, "c")), delta(&concat(zeros(n), seq.clone()), "c")),
        ));
        out.push(named(
            format!("delta dominates truncation n={n}"),
            &format!("{} <= {}", delta(&xs(1..=n), "0"), delta(&xs(1..=n + 1), "c")),
        ));
        out.push(named(
            format!("halfn of difference n={n}"),
            &format!("{} = ominus({}, {})", halfn(n, "ominus(x, y)"), halfn(n, "x"), halfn(n, "y")),
        ));
        out.push(named(format!("halfn decreasing n={n}"), &format!("{} <= x", halfn(n, "x"))));
        out.push(named(
            format!("halfn monotone n={n}"),
            &format!("{} <= {}", halfn(n, "meet(x, y)"), halfn(n, "y")),
        ));
    }
    out.push(named("delta splits off head", "delta(x1, x2, x3; c) = oplus(delta(x1; 0), delta(0, x2, x3; c))"));
    out.push(named("half of one is self-negating", "neg(half(1)) = half(1)"));
    out.push(named("halves are disjoint", "odot(half(x), half(x)) = 0"));
    out
}

/// Finite sums of shifted δ-terms, `n ≤ max_n`.
pub fn splitting_identities(max_n: usize) -> Vec<NamedEquation> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let parts: Vec<String> = (1..=n).map(|i| delta(&concat(zeros(i - 1), vec![format!("x{i}")]), "0")).collect();
        out.push(named(
            format!("shifted singletons sum to delta n={n}"),
            &format!("{} = {}", oplus_all(&parts), delta(&xs(1..=n), "0")),
        ));
        out.push(named(
            format!("delta splits after n={n}"),
            &format!(
                "{} = oplus({}, {})",
                delta(&xs(1..=n + 2), "c"),
                delta(&xs(1..=n), "0"),
                delta(&concat(zeros(n), xs(n + 1..=n + 2)), "c"),
            ),
        ));
        let halves: Vec<String> = (1..=n).map(|i| halfn(i, &format!("x{i}"))).collect();
        out.push(named(
            format!("finite delta as halving sum n={n}"),
            &format!("{} = {}", delta(&xs(1..=n), "0"), oplus_all(&halves)),
        ));
    }
    out.push(named("two-step delta", "delta(x; y) = oplus(half(x), half(y))"));
    out.push(named("halves recombine", "oplus(half(x), half(x)) = x"));
    out
}

/// `f_{1/2}(1)` as `2ⁿ` copies of `f_{1/2^{n+1}}(1)`, and the general
/// `2^m · f_{1/2ⁿ}(x) = f_{1/2^{n-m}}(x)` for `m < n ≤ max_n + 1`.
pub fn doubling_identities(max_n: u32) -> Vec<NamedEquation> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.push(named(
            format!("half of one as dyadic sum n={n}"),
            &format!("half(1) = nfold({}, halfn({}, 1))", 1u32 << n, n + 1),
        ));
    }
    for n in 2..=max_n + 1 {
        for m in 1..n {
            out.push(named(
                format!("doubling undoes halving m={m} n={n}"),
                &format!("nfold({}, halfn({n}, x)) = halfn({}, x)", 1u32 << m, n - m),
            ));
        }
    }
    out
}

/// Every identity the decider must prove.
pub fn identity_corpus() -> Vec<NamedEquation> {
    let mut all = mv_identities();
    all.extend(delta_axioms());
    all.extend(halving_identities(4));
    all.extend(splitting_identities(3));
    all.extend(doubling_identities(3));
    all
}

/// The δ-algebra identities checked on concrete carriers.
pub fn delta_suite() -> Vec<NamedEquation> {
    let mut all = delta_axioms();
    all.extend(halving_identities(4));
    all.extend(splitting_identities(3));
    all
}

/// Equations that fail in `[0,1]`.
pub fn non_theorems() -> Vec<NamedEquation> {
    [
        "oplus(x, x) = x",
        "x <= half(x)",
        "odot(x, x) = x",
        "neg(x) = x",
        "half(x) = x",
        "oplus(x, y) = x",
        "join(x, y) = x",
        "meet(x, y) = y",
        "dist(x, y) = 0",
        "ominus(x, y) = ominus(y, x)",
        "half(oplus(x, y)) = oplus(half(x), half(y))",
        "odot(half(x), half(y)) = half(odot(x, y))",
        "nfold(2, x) = x",
        "x <= odot(x, y)",
        "join(x, neg(x)) = 1",
        "delta(x, y; 0) = delta(y, x; 0)",
        "halfn(2, x) = half(x)",
        "oplus(half(x), half(y)) = x",
        "delta(x; x) = half(x)",
        "neg(half(x)) = half(neg(x))",
    ]
    .iter()
    .map(|src| named(*src, src))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_parses_and_has_expected_size() {
        assert_eq!(mv_identities().len(), 3);
        assert_eq!(delta_axioms().len(), 8);
        assert_eq!(halving_identities(4).len(), 6 * 4 + 3);
        assert_eq!(splitting_identities(3).len(), 3 * 3 + 2);
        assert_eq!(non_theorems().len(), 20);
        let names: std::collections::BTreeSet<String> = identity_corpus().into_iter().map(|e| e.name).collect();
        assert_eq!(names.len(), identity_corpus().len());
    }

    #[test]
    fn generated_text_is_as_expected() {
        let s = splitting_identities(2);
        assert_eq!(
            s[0].equation.to_string(),
            "delta(x1; 0) = delta(x1; 0)"
        );
        assert_eq!(
            s[3].equation.to_string(),
            "oplus(delta(x1; 0), delta(0, x2; 0)) = delta(x1, x2; 0)"
        );
    }
}
