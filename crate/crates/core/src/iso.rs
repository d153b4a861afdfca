//! Isomorphism search and canonical forms for cycle sets.
//!
//! Both rely on element fingerprints that are preserved by isomorphisms, and
//! on the fact that an isomorphism is determined by its values on a subset
//! that generates the cycle set under `∗`.

use crate::cycle_set::CycleSet;
use crate::perm::Permutation;

/// Isomorphism-invariant data attached to one element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fingerprint {
    sigma_type: Vec<usize>,
    own_cycle: usize,
    square_cycle: usize,
    class_size: usize,
    fixers: usize,
}

pub fn fingerprints(x: &CycleSet) -> Vec<Fingerprint> {
    let n = x.n();
    let sq = x.square_map();
    (0..n)
        .map(|e| {
            let s = x.sigma(e);
            Fingerprint {
                sigma_type: s.cycle_type(),
                own_cycle: s.cycle_length_of(e),
                square_cycle: sq.cycle_length_of(e),
                class_size: (0..n).filter(|&f| x.row(f) == x.row(e)).count(),
                fixers: (0..n).filter(|&f| x.op(f, e) == e).count(),
            }
        })
        .collect()
}

struct Search<'a, F: Fn(usize, usize) -> bool> {
    x: &'a CycleSet,
    y: &'a CycleSet,
    fx: Vec<Fingerprint>,
    fy: Vec<Fingerprint>,
    compat: F,
    fwd: Vec<usize>,
    bwd: Vec<usize>,
    mapped: Vec<usize>,
}

const NONE: usize = usize::MAX;

impl<F: Fn(usize, usize) -> bool> Search<'_, F> {
    fn admissible(&self, u: usize, v: usize) -> bool {
        self.fwd[u] == NONE
            && self.bwd[v] == NONE
            && self.fx[u] == self.fy[v]
            && (self.compat)(u, v)
    }

    /// Assigns `u ↦ v` and everything it forces; returns false on conflict.
    /// New assignments are appended to `mapped` so the caller can undo them.
    fn assign(&mut self, u: usize, v: usize) -> bool {
        if !self.admissible(u, v) {
            return false;
        }
        self.fwd[u] = v;
        self.bwd[v] = u;
        self.mapped.push(u);
        let mut head = self.mapped.len() - 1;
        while head < self.mapped.len() {
            let a = self.mapped[head];
            let mut i = 0;
            while i <= head {
                let b = self.mapped[i];
                for (s, t) in [(a, b), (b, a)] {
                    let prod = self.x.op(s, t);
                    let img = self.y.op(self.fwd[s], self.fwd[t]);
                    if self.fwd[prod] == NONE {
                        if !self.admissible(prod, img) {
                            return false;
                        }
                        self.fwd[prod] = img;
                        self.bwd[img] = prod;
                        self.mapped.push(prod);
                    } else if self.fwd[prod] != img {
                        return false;
                    }
                }
                i += 1;
            }
            head += 1;
        }
        true
    }

    fn undo(&mut self, len: usize) {
        while self.mapped.len() > len {
            let u = self.mapped.pop().unwrap();
            self.bwd[self.fwd[u]] = NONE;
            self.fwd[u] = NONE;
        }
    }

    fn solve(&mut self) -> bool {
        let Some(u) = (0..self.x.n()).find(|&u| self.fwd[u] == NONE) else {
            return true;
        };
        let len = self.mapped.len();
        for v in 0..self.y.n() {
            if self.bwd[v] != NONE {
                continue;
            }
            if self.assign(u, v) && self.solve() {
                return true;
            }
            self.undo(len);
        }
        false
    }
}

/// An isomorphism `X → Y` (as the image list) subject to `compat(u, φ(u))`.
pub fn find_iso_with(
    x: &CycleSet,
    y: &CycleSet,
    compat: impl Fn(usize, usize) -> bool,
) -> Option<Vec<usize>> {
    if x.n() != y.n() {
        return None;
    }
    let fx = fingerprints(x);
    let fy = fingerprints(y);
    let mut sx = fx.clone();
    let mut sy = fy.clone();
    sx.sort();
    sy.sort();
    if sx != sy {
        return None;
    }
    let n = x.n();
    let mut s = Search {
        x,
        y,
        fx,
        fy,
        compat,
        fwd: vec![NONE; n],
        bwd: vec![NONE; n],
        mapped: Vec::new(),
    };
    if !s.solve() {
        return None;
    }
    let map = s.fwd;
    for a in 0..n {
        for b in 0..n {
            if map[x.op(a, b)] != y.op(map[a], map[b]) || !(s.compat)(a, map[a]) {
                return None;
            }
        }
    }
    Some(map)
}

/// A table-preserving bijection `X → Y`, if one exists.
pub fn find_iso(x: &CycleSet, y: &CycleSet) -> Option<Vec<usize>> {
    find_iso_with(x, y, |_, _| true)
}

/// The minimum flattened table over all generation-ordered labelings.
///
/// A labeling starts at an element of minimal fingerprint and assigns new
/// labels to products in the order the pairs of labeled elements are visited
/// (by larger label, then smaller). When the labeled set is closed and
/// elements remain, every remaining element of minimal fingerprint is tried
/// as the next label. Since every choice is made among isomorphism-invariant
/// candidates, two cycle sets get the same form iff they are isomorphic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub n: usize,
    pub table: Vec<u32>,
}

impl CanonicalForm {
    pub fn to_cycle_set(&self) -> CycleSet {
        CycleSet::from_flat_unchecked(self.n, self.table.clone())
    }
}

pub fn canonical_form(x: &CycleSet) -> CanonicalForm {
    canonical_labeling(x).0
}

/// The canonical form together with a relabeling `π` that produces it.
pub fn canonical_labeling(x: &CycleSet) -> (CanonicalForm, Permutation) {
    let n = x.n();
    let fp = fingerprints(x);
    let mut best: Option<(Vec<u32>, Vec<usize>)> = None;
    let mut label = vec![NONE; n];
    let mut order = Vec::with_capacity(n);
    extend_labeling(x, &fp, &mut label, &mut order, 0, &mut best);
    let (table, label) = best.expect("at least one labeling");
    let pi = Permutation::from_images(label).expect("labels form a bijection");
    (CanonicalForm { n, table }, pi)
}

fn extend_labeling(
    x: &CycleSet,
    fp: &[Fingerprint],
    label: &mut Vec<usize>,
    order: &mut Vec<usize>,
    mut done: usize,
    best: &mut Option<(Vec<u32>, Vec<usize>)>,
) {
    let n = x.n();
    let start = order.len();
    while done < order.len() {
        let k = order[done];
        for i in 0..=done {
            let j = order[i];
            for prod in [x.op(k, j), x.op(j, k)] {
                if label[prod] == NONE {
                    label[prod] = order.len();
                    order.push(prod);
                }
            }
        }
        done += 1;
    }
    if order.len() == n {
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[label[a] * n + label[b]] = label[x.op(a, b)] as u32;
            }
        }
        if best.as_ref().map_or(true, |(t, _)| table < *t) {
            *best = Some((table, label.clone()));
        }
    } else {
        let min = (0..n)
            .filter(|&e| label[e] == NONE)
            .map(|e| &fp[e])
            .min()
            .unwrap()
            .clone();
        let candidates: Vec<usize> = (0..n)
            .filter(|&e| label[e] == NONE && fp[e] == min)
            .collect();
        for e in candidates {
            label[e] = order.len();
            order.push(e);
            extend_labeling(x, fp, label, order, done, best);
            let u = order.pop().unwrap();
            label[u] = NONE;
        }
    }
    while order.len() > start {
        let u = order.pop().unwrap();
        label[u] = NONE;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pq6(g: [usize; 2]) -> CycleSet {
        CycleSet::from_fn(6, |u, v| {
            let x = u / 3;
            let (y, b) = (v / 3, v % 3);
            ((y + 1) % 2) * 3 + (b + g[(y + 2 - x) % 2]) % 3
        })
        .unwrap()
    }

    fn all_perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn brute_iso(x: &CycleSet, y: &CycleSet) -> bool {
        x.n() == y.n()
            && all_perms(x.n())
                .iter()
                .any(|p| (0..x.n()).all(|a| (0..x.n()).all(|b| p[x.op(a, b)] == y.op(p[a], p[b]))))
    }

    fn brute_min_table(x: &CycleSet) -> Vec<u32> {
        all_perms(x.n())
            .iter()
            .map(|p| {
                x.relabel(&Permutation::from_images(p.clone()).unwrap())
                    .flat_table()
                    .to_vec()
            })
            .min()
            .unwrap()
    }

    fn samples() -> Vec<CycleSet> {
        vec![
            pq6([0, 1]),
            pq6([0, 2]),
            pq6([1, 2]),
            pq6([1, 0]),
            CycleSet::trivial(4),
            CycleSet::from_fn(4, |_, y| (y + 1) % 4).unwrap(),
            CycleSet::from_fn(4, |_, y| [1, 0, 3, 2][y]).unwrap(),
            CycleSet::from_fn(4, |_, y| [1, 0, 2, 3][y]).unwrap(),
            CycleSet::from_fn(3, |x, y| if x == 2 { y } else { [1, 0, 2][y] }).unwrap(),
        ]
    }

    #[test]
    fn iso_agrees_with_brute_force() {
        let s = samples();
        for a in &s {
            for b in &s {
                let found = find_iso(a, b);
                assert_eq!(found.is_some(), brute_iso(a, b));
                if let Some(m) = found {
                    for u in 0..a.n() {
                        for v in 0..a.n() {
                            assert_eq!(m[a.op(u, v)], b.op(m[u], m[v]));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_form_is_a_complete_invariant() {
        let s = samples();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for a in &s {
            let ca = canonical_form(a);
            assert!(CycleSet::validate(&ca.to_cycle_set().rows()).is_ok());
            assert!(find_iso(a, &ca.to_cycle_set()).is_some());
            for _ in 0..5 {
                let mut p: Vec<usize> = (0..a.n()).collect();
                p.shuffle(&mut rng);
                let r = a.relabel(&Permutation::from_images(p).unwrap());
                assert_eq!(canonical_form(&r), ca);
            }
            for b in &s {
                assert_eq!(canonical_form(b) == ca, brute_iso(a, b));
            }
        }
        assert_eq!(canonical_form(&pq6([0, 1])), canonical_form(&pq6([0, 2])));
    }

    #[test]
    fn canonical_labeling_reproduces_form() {
        for a in samples() {
            let (form, pi) = canonical_labeling(&a);
            assert_eq!(a.relabel(&pi).flat_table(), form.table.as_slice());
            assert!(form.table >= brute_min_table(&a));
        }
    }

    #[test]
    fn compat_restricts() {
        let x = pq6([0, 1]);
        let y = pq6([0, 2]);
        let m = find_iso_with(&x, &y, |u, v| u / 3 == v / 3).unwrap();
        assert!((0..6).all(|u| m[u] / 3 == u / 3));
        assert!(find_iso_with(&x, &x, |u, v| u == v).is_some());
        assert!(find_iso(&pq6([0, 1]), &pq6([1, 2])).is_none());
    }
}
