//! Maximal spectra of finite carriers: Hölder homomorphisms into `[0,1]`,
//! the closed sets `V(S)`, and finite instances of the maps η and ε.
//! Also δ-preservation checks for homomorphisms out of the PL carrier.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::algebra::{CarrierError, MvAlgebra, UnitInterval};
use crate::arith::{Q01, Rat};
use crate::carriers::{maximal_ideals, enumerate_ideals, radical, Carrier, ChangAlgebra, ChangElem, Ideal, Value};
use crate::plfunc::{pl_delta, pl_precompose, random_plfunc, FnSeq, PLFunc, PlCarrier};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Carrier(#[from] CarrierError),
    #[error("factor `{0}` is not a finite chain")]
    NotAChain(String),
}

fn elements_of(carrier: &Carrier) -> Result<Vec<Value>, SpectrumError> {
    carrier.elements().ok_or_else(|| CarrierError::NotFinite(carrier.to_string()).into())
}

/// A homomorphism from a finite carrier into `[0,1]`, as a value table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hom {
    pub source: Carrier,
    pub table: BTreeMap<Value, Q01>,
}

impl Hom {
    pub fn apply(&self, v: &Value) -> &Q01 {
        self.table.get(v).expect("element of the source carrier")
    }

    /// `{a : h(a) = 0}`, in the source's element order.
    pub fn kernel(&self) -> Ideal {
        let all = self.source.elements().expect("finite source");
        Ideal { members: all.into_iter().filter(|a| self.apply(a).is_zero()).collect() }
    }

    pub fn image(&self) -> BTreeSet<Q01> {
        self.table.values().cloned().collect()
    }

    /// Check `h(0) = 0`, `h(¬a) = ¬h(a)`, `h(a ⊕ b) = h(a) ⊕ h(b)`.
    pub fn is_homomorphism(&self) -> bool {
        let c = &self.source;
        let all: Vec<&Value> = self.table.keys().collect();
        self.apply(&c.zero()).is_zero()
            && all.iter().all(|a| *self.apply(&c.neg(a)) == self.apply(a).neg())
            && all
                .iter()
                .all(|a| all.iter().all(|b| *self.apply(&c.oplus(a, b)) == self.apply(a).oplus(self.apply(b))))
    }
}

/// The Hölder map for a maximal ideal: the quotient `A/𝔪` is a finite
/// simple algebra, hence a chain `Ł_k`, and its `i`-th class maps to `i/k`.
pub fn holder_hom(carrier: &Carrier, m: &Ideal) -> Result<Hom, SpectrumError> {
    let all = elements_of(carrier)?;
    let equivalent = |a: &Value, b: &Value| m.contains(&carrier.dist(a, b));
    let mut reps: Vec<Value> = Vec::new();
    for a in &all {
        if !reps.iter().any(|r| equivalent(r, a)) {
            reps.push(a.clone());
        }
    }
    // [a] ≤ [b] iff a ⊖ b ∈ 𝔪; count classes strictly below
    let rank = |a: &Value| reps.iter().filter(|r| !equivalent(r, a) && m.contains(&carrier.ominus(r, a))).count();
    let k = reps.len() - 1;
    assert!(k >= 1, "maximal ideals are proper");
    let table = all
        .iter()
        .map(|a| (a.clone(), Q01::try_from_rat(Rat::new(rank(a).into(), k.into())).expect("rank at most k")))
        .collect();
    let hom = Hom { source: carrier.clone(), table };
    assert!(hom.is_homomorphism(), "Hölder map on `{carrier}` is not a homomorphism");
    assert_eq!(hom.kernel(), *m, "Hölder map kernel differs from its ideal");
    Ok(hom)
}

/// All homomorphisms `A → [0,1]`, one per maximal ideal, in ideal order.
pub fn enumerate_homs(carrier: &Carrier) -> Result<Vec<Hom>, SpectrumError> {
    let ideals = maximal_ideals(carrier)?;
    ideals.par_iter().map(|m| holder_hom(carrier, m)).collect()
}

/// Every map `src → tgt` preserving `0`, `¬` and `⊕`, by backtracking over
/// `targets`. Assignments are checked as soon as all their inputs are set.
pub fn brute_force_maps<A: MvAlgebra, B: MvAlgebra>(
    src: &A,
    src_elems: &[A::Elem],
    tgt: &B,
    targets: &[B::Elem],
) -> Vec<Vec<B::Elem>> {
    let pos = |v: &A::Elem| src_elems.iter().position(|x| x == v).expect("closed under operations");
    let neg_of: Vec<usize> = src_elems.iter().map(|a| pos(&src.neg(a))).collect();
    let sum_of: Vec<Vec<usize>> =
        src_elems.iter().map(|a| src_elems.iter().map(|b| pos(&src.oplus(a, b))).collect()).collect();
    let zero = pos(&src.zero());

    let mut out = Vec::new();
    let mut assign: Vec<B::Elem> = Vec::with_capacity(src_elems.len());
    fn consistent<B: MvAlgebra>(
        tgt: &B,
        assign: &[B::Elem],
        neg_of: &[usize],
        sum_of: &[Vec<usize>],
        zero: usize,
    ) -> bool {
        let i = assign.len() - 1;
        if i == zero && !tgt.is_zero(&assign[i]) {
            return false;
        }
        let neg_ok = |a: usize| neg_of[a] > i || assign[neg_of[a]] == tgt.neg(&assign[a]);
        if !neg_ok(i) || (neg_of[i] < i && !neg_ok(neg_of[i])) {
            return false;
        }
        for j in 0..=i {
            for (a, b) in [(i, j), (j, i)] {
                let s = sum_of[a][b];
                if s <= i && assign[s] != tgt.oplus(&assign[a], &assign[b]) {
                    return false;
                }
            }
            // pairs whose sum is the new element
            for k in 0..=i {
                if sum_of[j][k] == i && assign[i] != tgt.oplus(&assign[j], &assign[k]) {
                    return false;
                }
            }
        }
        true
    }
    fn go<B: MvAlgebra>(
        tgt: &B,
        targets: &[B::Elem],
        n: usize,
        assign: &mut Vec<B::Elem>,
        neg_of: &[usize],
        sum_of: &[Vec<usize>],
        zero: usize,
        out: &mut Vec<Vec<B::Elem>>,
    ) {
        if assign.len() == n {
            out.push(assign.clone());
            return;
        }
        for t in targets {
            assign.push(t.clone());
            if consistent(tgt, assign, neg_of, sum_of, zero) {
                go(tgt, targets, n, assign, neg_of, sum_of, zero, out);
            }
            assign.pop();
        }
    }
    go(tgt, targets, src_elems.len(), &mut assign, &neg_of, &sum_of, zero, &mut out);
    out
}

/// Brute-force homomorphisms `A → [0,1]`. The image of a finite algebra is
/// a finite subalgebra of `[0,1]`, i.e. some `Ł_k` with `k < |A|`, so the
/// candidate values `j/k` suffice.
pub fn brute_force_homs(carrier: &Carrier) -> Result<Vec<Hom>, SpectrumError> {
    let all = elements_of(carrier)?;
    let mut targets: BTreeSet<Q01> = BTreeSet::new();
    for k in 1..all.len().max(2) {
        for j in 0..=k {
            targets.insert(Q01::try_from_rat(Rat::new(j.into(), k.into())).expect("j <= k"));
        }
    }
    let targets: Vec<Q01> = targets.into_iter().collect();
    Ok(brute_force_maps(carrier, &all, &UnitInterval, &targets)
        .into_iter()
        .map(|vals| Hom { source: carrier.clone(), table: all.iter().cloned().zip(vals).collect() })
        .collect())
}

/// `V(S)`: indices of the maximal ideals containing every element of `S`.
pub fn v_of(ideals: &[Ideal], s: &[Value]) -> BTreeSet<usize> {
    ideals.iter().enumerate().filter(|(_, m)| s.iter().all(|a| m.contains(a))).map(|(i, _)| i).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumResult {
    pub carrier: Carrier,
    pub ideals: Vec<Ideal>,
    pub homs: Vec<Hom>,
    /// `V(I)` for every ideal `I`.
    pub closed_sets: BTreeSet<BTreeSet<usize>>,
    /// `V(a)` for every element `a`.
    pub basis: BTreeSet<BTreeSet<usize>>,
}

impl SpectrumResult {
    /// Closing the basis under finite intersections gives the closed sets.
    pub fn basis_generates(&self) -> bool {
        let full: BTreeSet<usize> = (0..self.ideals.len()).collect();
        let mut closure: BTreeSet<BTreeSet<usize>> = self.basis.clone();
        closure.insert(full);
        loop {
            let extra: Vec<BTreeSet<usize>> = closure
                .iter()
                .flat_map(|a| closure.iter().map(move |b| a.intersection(b).cloned().collect()))
                .filter(|s| !closure.contains(s))
                .collect();
            if extra.is_empty() {
                break;
            }
            closure.extend(extra);
        }
        closure == self.closed_sets
    }

    /// Every singleton `{𝔪}` is a basic closed set `V(a)`.
    pub fn is_discrete(&self) -> bool {
        (0..self.ideals.len()).all(|i| self.basis.contains(&BTreeSet::from([i])))
    }

    pub fn kernels_match(&self) -> bool {
        self.ideals.len() == self.homs.len() && self.ideals.iter().zip(&self.homs).all(|(m, h)| h.kernel() == *m)
    }

    pub fn to_table(&self) -> String {
        let c = &self.carrier;
        let mut out = String::new();
        writeln!(out, "algebra: {c}").unwrap();
        writeln!(out, "maximal ideals: {}", self.ideals.len()).unwrap();
        for (i, m) in self.ideals.iter().enumerate() {
            let members: Vec<String> = m.members.iter().map(|v| c.render(v)).collect();
            writeln!(out, "  m{i} = {{{}}}", members.join(", ")).unwrap();
        }
        writeln!(out, "homomorphisms:").unwrap();
        for (i, h) in self.homs.iter().enumerate() {
            let rows: Vec<String> = h.table.iter().map(|(a, q)| format!("{} -> {q}", c.render(a))).collect();
            writeln!(out, "  h{i}: {}", rows.join("; ")).unwrap();
        }
        writeln!(out, "closed sets:").unwrap();
        for s in &self.closed_sets {
            let names: Vec<String> = s.iter().map(|i| format!("m{i}")).collect();
            writeln!(out, "  {{{}}}", names.join(", ")).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let c = &self.carrier;
        let ideals: Vec<Vec<String>> =
            self.ideals.iter().map(|m| m.members.iter().map(|v| c.render(v)).collect()).collect();
        let homs: Vec<BTreeMap<String, String>> = self
            .homs
            .iter()
            .map(|h| h.table.iter().map(|(a, q)| (c.render(a), q.to_string())).collect())
            .collect();
        let closed: Vec<Vec<usize>> = self.closed_sets.iter().map(|s| s.iter().copied().collect()).collect();
        json!({ "algebra": c.to_string(), "maximal_ideals": ideals, "homs": homs, "closed_sets": closed })
    }
}

pub fn spectrum(carrier: &Carrier) -> Result<SpectrumResult, SpectrumError> {
    let all = elements_of(carrier)?;
    let ideals = maximal_ideals(carrier)?;
    let homs = enumerate_homs(carrier)?;
    let closed_sets = enumerate_ideals(carrier)?.iter().map(|i| v_of(&ideals, &i.members)).collect();
    let basis = all.iter().map(|a| v_of(&ideals, std::slice::from_ref(a))).collect();
    Ok(SpectrumResult { carrier: carrier.clone(), ideals, homs, closed_sets, basis })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HolderReport {
    pub ideals: usize,
    pub homs: usize,
    /// Brute-force search found exactly one hom per maximal ideal and the
    /// same homs as the Hölder construction.
    pub unique: bool,
    /// Each hom's image is `{0, 1/k, …, 1}` for the size `k+1` of its quotient.
    pub images_are_chains: bool,
}

pub fn holder_uniqueness(carrier: &Carrier) -> Result<HolderReport, SpectrumError> {
    let ideals = maximal_ideals(carrier)?;
    let homs = enumerate_homs(carrier)?;
    let brute = brute_force_homs(carrier)?;
    let per_ideal_once = ideals.iter().all(|m| brute.iter().filter(|h| h.kernel() == *m).count() == 1);
    let same = brute.len() == homs.len() && homs.iter().all(|h| brute.contains(h));
    let images_are_chains = homs.iter().all(|h| {
        let image = h.image();
        let k = image.len() - 1;
        k >= 1 && (0..=k).all(|j| image.contains(&Q01::try_from_rat(Rat::new(j.into(), k.into())).unwrap()))
    });
    Ok(HolderReport { ideals: ideals.len(), homs: homs.len(), unique: per_ideal_once && same, images_are_chains })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctorialityReport {
    pub homs: usize,
    /// `h⁻¹(𝔪)` is maximal in the source for every hom `h` and every `𝔪`.
    pub preimages_maximal: bool,
}

/// Every homomorphism between two finite carriers pulls maximal ideals back
/// to maximal ideals.
pub fn max_functoriality(src: &Carrier, tgt: &Carrier) -> Result<FunctorialityReport, SpectrumError> {
    let a = elements_of(src)?;
    let b = elements_of(tgt)?;
    let maps = brute_force_maps(src, &a, tgt, &b);
    let max_a = maximal_ideals(src)?;
    let max_b = maximal_ideals(tgt)?;
    let preimages_maximal = maps.iter().all(|h| {
        max_b.iter().all(|m| {
            let pre = Ideal { members: a.iter().zip(h).filter(|(_, hv)| m.contains(hv)).map(|(x, _)| x.clone()).collect() };
            max_a.contains(&pre)
        })
    });
    Ok(FunctorialityReport { homs: maps.len(), preimages_maximal })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaReport {
    pub carrier: Carrier,
    /// `a ↦ (h(a))_h`, for finite carriers.
    pub table: Vec<(Value, Vec<Q01>)>,
    pub injective: bool,
    pub radical_trivial: bool,
    /// Onto the product of the images of the individual homs.
    pub surjective: Option<bool>,
}

impl EtaReport {
    pub fn injective_iff_semisimple(&self) -> bool {
        self.injective == self.radical_trivial
    }
}

/// The evaluation map η of a finite carrier, or of Chang's algebra in closed
/// form, with elements up to `chang_bound` checked exhaustively.
pub fn eta(carrier: &Carrier, chang_bound: i64) -> Result<EtaReport, SpectrumError> {
    if *carrier == Carrier::Chang {
        return Ok(eta_chang(chang_bound));
    }
    let all = elements_of(carrier)?;
    let homs = enumerate_homs(carrier)?;
    let table: Vec<(Value, Vec<Q01>)> =
        all.iter().map(|a| (a.clone(), homs.iter().map(|h| h.apply(a).clone()).collect())).collect();
    let distinct = table.iter().map(|(_, t)| t).collect::<BTreeSet<_>>().len();
    let injective = distinct == all.len();
    let product_size: usize = homs.iter().map(|h| h.image().len()).product();
    let radical_trivial = radical(carrier)?.is_trivial(carrier);
    Ok(EtaReport {
        carrier: carrier.clone(),
        table,
        injective,
        radical_trivial,
        surjective: Some(distinct == product_size),
    })
}

/// Chang's algebra has the single maximal ideal `{(0,k)}`; its Hölder map
/// sends `(l, o)` to `l`. η therefore identifies all infinitesimals with 0.
fn eta_chang(bound: i64) -> EtaReport {
    let a = ChangAlgebra;
    let elems = ChangElem::bounded(bound);
    let h = |x: &ChangElem| if x.level() == 0 { Q01::zero() } else { Q01::one() };
    for x in &elems {
        assert_eq!(h(&a.neg(x)), h(x).neg());
        for y in elems.iter().step_by(((bound / 50).max(1)) as usize) {
            assert_eq!(h(&a.oplus(x, y)), h(x).oplus(&h(y)));
        }
    }
    let rad = crate::carriers::Radical::ChangInfinitesimals;
    let kernel_is_radical = elems.iter().all(|x| h(x).is_zero() == rad.contains(&Carrier::Chang, &Value::Chang(*x)));
    assert!(kernel_is_radical, "Chang kernel differs from the radical");
    let injective = elems.iter().filter(|x| h(x).is_zero()).count() == 1;
    EtaReport {
        carrier: Carrier::Chang,
        table: Vec::new(),
        injective,
        radical_trivial: rad.is_trivial(&Carrier::Chang),
        surjective: None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonReport {
    pub points: usize,
    pub maximal_ideals: usize,
    /// `x ↦ {f : f(x) = 0}` is a bijection from the points onto Max A.
    pub bijective: bool,
    /// Both sides carry the discrete topology.
    pub discrete: bool,
}

/// ε for a finite discrete space `X`, with `A = ∏_{x∈X} Ł_{n_x}` standing in
/// for the functions on `X`.
pub fn epsilon_finite(carrier: &Carrier) -> Result<EpsilonReport, SpectrumError> {
    let factors = match carrier {
        Carrier::Product(fs) => fs.clone(),
        Carrier::Chain(_) => vec![carrier.clone()],
        other => return Err(SpectrumError::NotAChain(other.to_string())),
    };
    if let Some(bad) = factors.iter().find(|f| !matches!(f, Carrier::Chain(_))) {
        return Err(SpectrumError::NotAChain(bad.to_string()));
    }
    let product = Carrier::Product(factors.clone());
    let all = elements_of(&product)?;
    let spec = spectrum(&product)?;
    let kernels: Vec<Ideal> = (0..factors.len())
        .map(|x| Ideal {
            members: all
                .iter()
                .filter(|f| matches!(f, Value::Tuple(vs) if matches!(vs[x], Value::Step(0))))
                .cloned()
                .collect(),
        })
        .collect();
    let hits: BTreeSet<usize> =
        kernels.iter().filter_map(|k| spec.ideals.iter().position(|m| m == k)).collect();
    let bijective = hits.len() == kernels.len() && kernels.len() == spec.ideals.len();
    Ok(EpsilonReport {
        points: factors.len(),
        maximal_ideals: spec.ideals.len(),
        bijective,
        discrete: spec.is_discrete() && spec.closed_sets.len() == 1 << spec.ideals.len(),
    })
}

/// Homomorphisms out of the PL carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlHom {
    Identity,
    /// `f ↦ f(p)`, into `[0,1]`.
    Eval(Q01),
    /// `f ↦ f ∘ φ`.
    Precompose(PLFunc),
}

impl PlHom {
    pub fn apply(&self, f: &PLFunc) -> Value {
        match self {
            PlHom::Identity => Value::Func(f.clone()),
            PlHom::Eval(p) => Value::Rational(f.eval_q(p)),
            PlHom::Precompose(phi) => Value::Func(pl_precompose(f, phi)),
        }
    }

    pub fn target(&self) -> Carrier {
        match self {
            PlHom::Eval(_) => Carrier::Unit,
            _ => Carrier::Pl,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaPreservation {
    pub checks: usize,
    pub failures: usize,
}

/// `h(δ(s)) = δ(h(s))` and `h(f_{1/2ⁿ}(f)) = f_{1/2ⁿ}(h(f))` for `n ≤ 4`, on
/// the given sequences.
pub fn delta_preservation_check(h: &PlHom, samples: &[FnSeq]) -> DeltaPreservation {
    let tgt = h.target();
    let mut checks = 0;
    let mut failures = 0;
    for s in samples {
        let lhs = h.apply(&pl_delta(s));
        let prefix: Vec<Value> = s.prefix.iter().map(|f| h.apply(f)).collect();
        let rhs = tgt.delta(&prefix, &h.apply(&s.tail)).expect("target supports δ");
        checks += 1;
        failures += usize::from(lhs != rhs);

        let pl = PlCarrier;
        let mut f = s.tail.clone();
        let mut hf = h.apply(&f);
        for _ in 1..=4 {
            f = pl.half(&f).expect("PL supports δ");
            hf = tgt.half(&hf).expect("target supports δ");
            checks += 1;
            failures += usize::from(h.apply(&f) != hf);
        }
    }
    DeltaPreservation { checks, failures }
}

/// Seeded random eventually-constant sequences of PL functions.
pub fn random_fnseqs(count: usize, seed: u64) -> Vec<FnSeq> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(0..=4);
            let prefix = (0..k).map(|_| random_plfunc(&mut rng, 3, 8, 6)).collect();
            FnSeq { prefix, tail: random_plfunc(&mut rng, 3, 8, 6) }
        })
        .collect()
}

/// Sampled point kernels `{f : f(p) = 0}` of the PL carrier. Max of the
/// PL carrier is not enumerable; this only checks the listed points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointKernelReport {
    pub points: Vec<Q01>,
    /// `|x − p|` lies in the kernel of `p` and in no other listed kernel.
    pub separated: bool,
    /// Sampled kernel members are closed under `⊕` and downward closed.
    pub ideal_laws: bool,
}

pub fn pl_point_kernels(points: &[Q01], samples: usize, seed: u64) -> PointKernelReport {
    let pl = PlCarrier;
    let id = PLFunc::identity();
    let separated = points.iter().all(|p| {
        let f = pl.dist(&id, &PLFunc::constant(p.clone()));
        points.iter().all(|q| f.eval_q(q).is_zero() == (p == q))
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ideal_laws = true;
    for p in points {
        // g ⊖ g(p) vanishes at p
        let member = |rng: &mut ChaCha8Rng| {
            let g = random_plfunc(rng, 3, 8, 6);
            let gp = g.eval_q(p);
            pl.ominus(&g, &PLFunc::constant(gp))
        };
        for _ in 0..samples {
            let (a, b) = (member(&mut rng), member(&mut rng));
            let below = pl.meet(&a, &random_plfunc(&mut rng, 3, 8, 6));
            ideal_laws &= pl.oplus(&a, &b).eval_q(p).is_zero() && below.eval_q(p).is_zero();
        }
    }
    PointKernelReport { points: points.to_vec(), separated, ideal_laws }
}
