//! Retraction, multipermutation level, decomposability, extensions of cycle
//! sets, and zero-forcing sets of function spaces over prime fields.

use crate::brace::{BraceError, PermutationBrace};
use crate::classify::{build_pq, is_character_proportional, ClassifyError, PqSpec};
use crate::cycle_set::CycleSet;
use crate::group::{group_order, orbit, GroupError};
use crate::iso::{find_iso, find_iso_with};
use crate::modular::{gcd, span_basis, subspace_vanishing_on};
use crate::perm::Permutation;
use crate::report::Report;
use serde::{Serialize, Serializer};
use serde_json::json;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
    #[error("map is not a homomorphism at ({x}, {y})")]
    NotAHomomorphism { x: usize, y: usize },
    #[error("map has {got} entries, source has {expected} elements")]
    SizeMismatch { expected: usize, got: usize },
    #[error("map is not surjective")]
    NotSurjective,
    #[error("target is decomposable")]
    TargetDecomposable,
    #[error("fibers have different sizes")]
    UnequalFibers,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A homomorphism of cycle sets, stored as the image of each element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleSetHom {
    pub source: CycleSet,
    pub target: CycleSet,
    pub map: Vec<usize>,
}

impl CycleSetHom {
    pub fn new(
        source: CycleSet,
        target: CycleSet,
        map: Vec<usize>,
    ) -> Result<CycleSetHom, StructureError> {
        if map.len() != source.n() {
            return Err(StructureError::SizeMismatch {
                expected: source.n(),
                got: map.len(),
            });
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= target.n()) {
            return Err(StructureError::InternalInvariantViolation(format!(
                "image {bad} outside the target"
            )));
        }
        for x in 0..source.n() {
            for y in 0..source.n() {
                if map[source.op(x, y)] != target.op(map[x], map[y]) {
                    return Err(StructureError::NotAHomomorphism { x, y });
                }
            }
        }
        Ok(CycleSetHom {
            source,
            target,
            map,
        })
    }

    pub fn identity(x: &CycleSet) -> CycleSetHom {
        CycleSetHom {
            source: x.clone(),
            target: x.clone(),
            map: (0..x.n()).collect(),
        }
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.n()];
        for &v in &self.map {
            hit[v] = true;
        }
        hit.into_iter().all(|h| h)
    }

    fn fiber_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.target.n()];
        for &v in &self.map {
            sizes[v] += 1;
        }
        sizes
    }
}

/// Quotient by `x ∼ y ⇔ σ_x = σ_y`, with classes numbered by first occurrence.
pub fn retraction(x: &CycleSet) -> Result<(CycleSet, CycleSetHom), StructureError> {
    let n = x.n();
    let mut class = vec![0usize; n];
    let mut reps: Vec<usize> = Vec::new();
    for e in 0..n {
        class[e] = match reps.iter().position(|&r| x.row(r) == x.row(e)) {
            Some(c) => c,
            None => {
                reps.push(e);
                reps.len() - 1
            }
        };
    }
    let m = reps.len();
    let mut table = vec![vec![0usize; m]; m];
    for a in 0..n {
        for b in 0..n {
            let v = class[x.op(a, b)];
            let slot = &mut table[class[a]][class[b]];
            if a == reps[class[a]] && b == reps[class[b]] {
                *slot = v;
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if table[class[a]][class[b]] != class[x.op(a, b)] {
                return Err(StructureError::InternalInvariantViolation(format!(
                    "retraction is not well defined at ({a}, {b})"
                )));
            }
        }
    }
    let quotient = CycleSet::validate(&table).map_err(|e| {
        StructureError::InternalInvariantViolation(format!("retraction is not a cycle set: {e}"))
    })?;
    let hom = CycleSetHom {
        source: x.clone(),
        target: quotient.clone(),
        map: class,
    };
    Ok((quotient, hom))
}

/// Multipermutation level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mpl {
    Finite(usize),
    Infinite,
}

impl Serialize for Mpl {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Mpl::Finite(k) => s.serialize_u64(*k as u64),
            Mpl::Infinite => s.serialize_str("infinity"),
        }
    }
}

impl std::fmt::Display for Mpl {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mpl::Finite(k) => write!(f, "{k}"),
            Mpl::Infinite => f.write_str("infinity"),
        }
    }
}

/// Sizes `|X|, |X⁽¹⁾|, …` until a singleton or stabilization.
pub fn retraction_sizes(x: &CycleSet) -> Result<Vec<usize>, StructureError> {
    let mut sizes = vec![x.n()];
    let mut cur = x.clone();
    while cur.n() > 1 {
        let (next, _) = retraction(&cur)?;
        if next.n() == cur.n() {
            break;
        }
        sizes.push(next.n());
        cur = next;
    }
    Ok(sizes)
}

pub fn mpl(x: &CycleSet) -> Result<Mpl, StructureError> {
    let sizes = retraction_sizes(x)?;
    Ok(if *sizes.last().unwrap() == 1 {
        Mpl::Finite(sizes.len() - 1)
    } else {
        Mpl::Infinite
    })
}

pub fn is_indecomposable(x: &CycleSet) -> bool {
    let gens: Vec<Permutation> = (0..x.n()).map(|e| x.sigma(e)).collect();
    orbit(x.n(), &gens, 0).len() == x.n()
}

/// True iff σ is constant on the fibers of `f`.
pub fn is_extension(f: &CycleSetHom) -> Result<bool, StructureError> {
    if !f.is_surjective() {
        return Err(StructureError::NotSurjective);
    }
    if !is_indecomposable(&f.target) {
        return Err(StructureError::TargetDecomposable);
    }
    let mut rep = vec![usize::MAX; f.target.n()];
    for (e, &v) in f.map.iter().enumerate() {
        if rep[v] == usize::MAX {
            rep[v] = e;
        } else if f.source.row(rep[v]) != f.source.row(e) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `gcd(|𝒢(target)|, |source|/|target|) = 1`, after checking fibers are equal-sized.
pub fn is_coprime_extension(f: &CycleSetHom) -> Result<bool, StructureError> {
    if !is_extension(f)? {
        return Ok(false);
    }
    let sizes = f.fiber_sizes();
    if sizes.iter().any(|&s| s != sizes[0]) {
        return Err(StructureError::UnequalFibers);
    }
    let gens: Vec<Permutation> = (0..f.target.n()).map(|e| f.target.sigma(e)).collect();
    let order = group_order(f.target.n(), &gens)?;
    let fiber = sizes[0] as u64;
    Ok(gcd((order % fiber as u128) as u64, fiber) == 1)
}

/// An isomorphism `ι` of the sources with `f₁ = f₂ ∘ ι`.
pub fn extensions_equivalent(f1: &CycleSetHom, f2: &CycleSetHom) -> Option<Vec<usize>> {
    if f1.target != f2.target {
        return None;
    }
    find_iso_with(&f1.source, &f2.source, |u, v| f1.map[u] == f2.map[v])
}

pub fn is_isomorphic(x: &CycleSet, y: &CycleSet) -> Option<Vec<usize>> {
    find_iso(x, y)
}

/// `M = {0..m−1}`, `H` spanned by `h_gens` in `F_q^M`, and `N ⊆ M`.
#[derive(Debug, Clone)]
pub struct ZeroForcingInstance {
    pub m: usize,
    pub q: u64,
    pub h_gens: Vec<Vec<u64>>,
    pub n: Vec<usize>,
}

/// `{x ∈ M : f|_N ≡ 0 ⇒ f(x) = 0 for all f ∈ H}`.
pub fn zero_forcing(inst: &ZeroForcingInstance) -> Vec<usize> {
    let basis = span_basis(&inst.h_gens, inst.q);
    let vanishing = subspace_vanishing_on(&basis, &inst.n, inst.q);
    (0..inst.m)
        .filter(|&x| vanishing.iter().all(|f| f[x] == 0))
        .collect()
}

/// Compares the orbits of the stabilizer of `(0,0)` in `𝒢(Z_m ×_Γ Z_k)`
/// with the predicted shape: all singletons if Γ⁰ is proportional to a
/// character, else singletons `{(0,a)}` and blocks `{x} × Z_k`.
pub fn stabilizer_orbit_check(spec: &PqSpec) -> Result<Report, ClassifyError> {
    let x = build_pq(spec)?;
    let (m, k) = (spec.m, spec.k);
    let brace = PermutationBrace::build(&x, crate::group::DEFAULT_SIZE_LIMIT)
        .map_err(|e| ClassifyError::Brace(Box::new(e)))?;
    let stab = brace.fundamental_group(0);
    let gens: Vec<Permutation> = stab.iter().map(|&g| brace.perm(g)).collect();
    let mut seen = vec![false; x.n()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for e in 0..x.n() {
        if !seen[e] {
            let o = orbit(x.n(), &gens, e);
            for &v in &o {
                seen[v] = true;
            }
            orbits.push(o);
        }
    }
    let proportional = is_character_proportional(&spec.gamma0, m as u64, k as u64).is_some();
    let mut predicted: Vec<Vec<usize>> = Vec::new();
    if proportional {
        predicted = (0..x.n()).map(|e| vec![e]).collect();
    } else {
        predicted.extend((0..k).map(|a| vec![a]));
        predicted.extend((1..m).map(|xi| (0..k).map(|a| xi * k + a).collect()));
    }
    let mut report = Report::new();
    report.metric("character_proportional", proportional);
    report.metric("stabilizer_order", stab.len());
    report.metric("orbit_count", orbits.len());
    report.check(
        "orbits",
        orbits == predicted,
        || json!({ "computed": orbits, "predicted": predicted }),
    );
    Ok(report)
}

/// Compares `ker(𝒢(X) → 𝒢(X⁽¹⁾))` with the socle.
pub fn verify_soc_equals_ker_ret(x: &CycleSet) -> Result<Report, BraceError> {
    verify_soc_equals_ker_ret_with_limit(x, crate::group::DEFAULT_SIZE_LIMIT)
}

pub fn verify_soc_equals_ker_ret_with_limit(
    x: &CycleSet,
    limit: usize,
) -> Result<Report, BraceError> {
    let brace = PermutationBrace::build(x, limit)?;
    Ok(soc_ker_report(x, &brace))
}

pub fn soc_ker_report(x: &CycleSet, brace: &PermutationBrace) -> Report {
    let mut report = Report::new();
    let soc = brace.socle();
    let rowp = brace.row_preserving_elements();
    report.check("socle_routes_agree", soc == rowp, || {
        json!({ "first_difference": soc.iter().chain(&rowp).find(|e| soc.contains(e) != rowp.contains(e)) })
    });
    match brace.retraction_kernel(x) {
        Ok((ker, image)) => {
            report.metric("group_order", brace.order());
            report.metric("socle_order", soc.len());
            report.metric("kernel_order", ker.len());
            report.metric("image_order", image);
            report.check("kernel_equals_socle", ker == soc, || {
                json!({ "first_difference": ker.iter().chain(&soc).find(|e| ker.contains(e) != soc.contains(e)) })
            });
        }
        Err(e) => report.check("induced_map", false, || json!(e.to_string())),
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::cyclic_cycle_set;

    fn pq(m: usize, k: usize, g: &[u64]) -> CycleSet {
        build_pq(&PqSpec::new(m, k, g.to_vec())).unwrap()
    }

    #[test]
    fn retraction_examples() {
        let (r, h) = retraction(&cyclic_cycle_set(5)).unwrap();
        assert_eq!(r.n(), 1);
        assert!(is_extension(&h).unwrap());
        let x = pq(2, 3, &[0, 1]);
        let (r, h) = retraction(&x).unwrap();
        assert_eq!(r, cyclic_cycle_set(2));
        assert_eq!(h.map, vec![0, 0, 0, 1, 1, 1]);
        assert!(is_extension(&h).unwrap());
        assert!(is_coprime_extension(&h).unwrap());
        assert_eq!(retraction(&CycleSet::trivial(3)).unwrap().0.n(), 1);
    }

    #[test]
    fn mpl_examples() {
        assert_eq!(mpl(&CycleSet::trivial(1)).unwrap(), Mpl::Finite(0));
        assert_eq!(mpl(&cyclic_cycle_set(4)).unwrap(), Mpl::Finite(1));
        assert_eq!(mpl(&pq(2, 3, &[0, 1])).unwrap(), Mpl::Finite(2));
        assert_eq!(mpl(&pq(3, 2, &[0, 1, 1])).unwrap(), Mpl::Finite(2));
        assert_eq!(
            serde_json::to_string(&Mpl::Infinite).unwrap(),
            "\"infinity\""
        );
    }

    #[test]
    fn indecomposability() {
        assert!(is_indecomposable(&cyclic_cycle_set(5)));
        assert!(!is_indecomposable(&CycleSet::trivial(2)));
        let zero = CycleSet::from_fn(6, |_, v| ((v / 3 + 1) % 2) * 3 + v % 3).unwrap();
        assert!(!is_indecomposable(&zero));
    }

    #[test]
    fn extension_predicates() {
        let x = pq(2, 3, &[0, 1]);
        let id = CycleSetHom::identity(&x);
        assert!(is_extension(&id).unwrap());
        assert!(is_coprime_extension(&id).unwrap());
        let proj = CycleSetHom::new(
            x.clone(),
            cyclic_cycle_set(2),
            (0..6).map(|e| e / 3).collect(),
        )
        .unwrap();
        assert!(is_extension(&proj).unwrap());
        let not_onto =
            CycleSetHom::new(CycleSet::trivial(1), CycleSet::trivial(2), vec![0]).unwrap();
        assert_eq!(is_extension(&not_onto), Err(StructureError::NotSurjective));
        let dec = CycleSetHom::identity(&CycleSet::trivial(2));
        assert_eq!(is_extension(&dec), Err(StructureError::TargetDecomposable));
        assert!(matches!(
            CycleSetHom::new(x.clone(), cyclic_cycle_set(2), vec![0, 1, 0, 1, 0, 1]),
            Err(StructureError::NotAHomomorphism { .. })
        ));
    }

    #[test]
    fn equivalences() {
        let a = pq(2, 3, &[0, 1]);
        let b = pq(2, 3, &[0, 2]);
        let c = pq(2, 3, &[1, 2]);
        let proj = |x: &CycleSet| {
            CycleSetHom::new(
                x.clone(),
                cyclic_cycle_set(2),
                (0..6).map(|e| e / 3).collect(),
            )
            .unwrap()
        };
        assert_eq!(extensions_equivalent(&proj(&a), &proj(&a)).is_some(), true);
        let iota = extensions_equivalent(&proj(&a), &proj(&b)).unwrap();
        assert!((0..6).all(|e| iota[e] / 3 == e / 3));
        assert!(extensions_equivalent(&proj(&a), &proj(&c)).is_none());
        assert!(is_isomorphic(&a, &b).is_some());
        assert!(is_isomorphic(&cyclic_cycle_set(3), &CycleSet::trivial(3)).is_none());
        assert_eq!(is_isomorphic(&a, &a).unwrap(), (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn zero_forcing_examples() {
        let z = |h: Vec<Vec<u64>>, n: Vec<usize>| {
            zero_forcing(&ZeroForcingInstance {
                m: 2,
                q: 3,
                h_gens: h,
                n,
            })
        };
        assert_eq!(z(vec![], vec![0]), vec![0, 1]);
        assert_eq!(z(vec![vec![0, 0]], vec![0]), vec![0, 1]);
        assert_eq!(z(vec![vec![1, 2]], vec![0]), vec![0, 1]);
        assert_eq!(z(vec![vec![0, 1], vec![1, 0]], vec![0]), vec![0]);
    }

    #[test]
    fn stabilizer_orbits() {
        let r = stabilizer_orbit_check(&PqSpec::new(2, 3, vec![1, 2])).unwrap();
        assert!(r.passed());
        assert_eq!(r.metrics["orbit_count"], 6);
        let r = stabilizer_orbit_check(&PqSpec::new(2, 3, vec![0, 1])).unwrap();
        assert!(r.passed());
        assert_eq!(r.metrics["orbit_count"], 4);
        let r = stabilizer_orbit_check(&PqSpec::new(3, 2, vec![0, 1, 1])).unwrap();
        assert!(r.passed());
        assert_eq!(r.metrics["character_proportional"], false);
    }

    #[test]
    fn socle_is_kernel() {
        let r = verify_soc_equals_ker_ret(&cyclic_cycle_set(4)).unwrap();
        assert!(r.passed());
        assert_eq!(r.metrics["kernel_order"], 4);
        let r = verify_soc_equals_ker_ret(&pq(2, 3, &[0, 1])).unwrap();
        assert!(r.passed());
        assert_eq!(r.metrics["socle_order"], 9);
    }
}
