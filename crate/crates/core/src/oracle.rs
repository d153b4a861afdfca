//! Brute-force enumeration of small cycle sets.
//!
//! Rows `σ_x` are placed one at a time. The axiom in the form
//! `σ_{x∗y} = σ_{y∗x} σ_y σ_x⁻¹` forces further rows as soon as three of the
//! four are known, and rejects the branch on a clash. In up-to-isomorphism
//! mode row 0 is fixed to a canonical permutation of minimal cycle type.

use crate::classify::{build_pq, cyclic_cycle_set, vectors, PqSpec};
use crate::cycle_set::CycleSet;
use crate::iso::{canonical_form, CanonicalForm};
use crate::report::Report;
use crate::structure::{is_indecomposable, mpl, Mpl};
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Largest size the search supports at all.
pub const MAX_N: usize = 8;

#[derive(Debug, Clone, thiserror::Error)]
pub enum OracleError {
    #[error("size {n} exceeds the configured limit {limit}")]
    LimitExceeded { n: usize, limit: usize },
    #[error("size {0} is not a product of two distinct primes")]
    NotPq(usize),
}

#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub indecomposable: bool,
    pub up_to_iso: bool,
    pub jobs: usize,
    pub limit_all: usize,
    pub limit_indecomposable: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            indecomposable: false,
            up_to_iso: false,
            jobs: 1,
            limit_all: 5,
            limit_indecomposable: 6,
        }
    }
}

/// Sorted, duplicate-free list. In up-to-isomorphism mode each member is a canonical form.
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub n: usize,
    pub members: Vec<CycleSet>,
}

type Row = [u8; MAX_N];
const UNSET: u8 = u8::MAX;

fn permutations(n: usize) -> Vec<Row> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..n as u8).collect();
    fn rec(k: usize, cur: &mut Vec<u8>, out: &mut Vec<Row>) {
        if k == cur.len() {
            let mut r = [UNSET; MAX_N];
            r[..cur.len()].copy_from_slice(cur);
            out.push(r);
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            rec(k + 1, cur, out);
            cur.swap(k, i);
        }
    }
    rec(0, &mut cur, &mut out);
    out.sort_unstable();
    out
}

fn cycle_type(r: &Row, n: usize) -> Vec<usize> {
    let mut seen = [false; MAX_N];
    let mut t = Vec::new();
    for s in 0..n {
        if !seen[s] {
            let mut len = 0;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = r[x] as usize;
                len += 1;
            }
            t.push(len);
        }
    }
    t.sort_unstable_by(|a, b| b.cmp(a));
    t
}

fn partitions(n: usize, max: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// A permutation of type `parts` with `0` in a cycle of length `own`.
fn canonical_perm(parts: &[usize], own: usize) -> Row {
    let mut order: Vec<usize> = parts.to_vec();
    let i = order.iter().position(|&p| p == own).unwrap();
    order.remove(i);
    order.insert(0, own);
    let mut r = [UNSET; MAX_N];
    let mut start = 0;
    for len in order {
        for k in 0..len {
            r[start + k] = (start + (k + 1) % len) as u8;
        }
        start += len;
    }
    r
}

struct Search<'a> {
    n: usize,
    perms: &'a [Row],
    /// Minimal cycle type allowed for any row (up-to-iso mode).
    min_type: Option<Vec<usize>>,
    rows: Vec<Row>,
    inv: Vec<Row>,
    set: Vec<bool>,
    trail: Vec<usize>,
}

impl Search<'_> {
    fn allowed(&self, r: &Row) -> bool {
        self.min_type
            .as_ref()
            .map_or(true, |t| cycle_type(r, self.n) >= *t)
    }

    fn place(&mut self, x: usize, r: Row) {
        let mut inv = [UNSET; MAX_N];
        for i in 0..self.n {
            inv[r[i] as usize] = i as u8;
        }
        self.rows[x] = r;
        self.inv[x] = inv;
        self.set[x] = true;
        self.trail.push(x);
    }

    fn undo(&mut self, len: usize) {
        while self.trail.len() > len {
            let x = self.trail.pop().unwrap();
            self.set[x] = false;
        }
    }

    /// Forces rows until a fixpoint; false on a clash.
    fn propagate(&mut self) -> bool {
        let n = self.n;
        loop {
            let mut changed = false;
            for x in 0..n {
                if !self.set[x] {
                    continue;
                }
                for y in 0..n {
                    if !self.set[y] {
                        continue;
                    }
                    let a = self.rows[x][y] as usize;
                    let b = self.rows[y][x] as usize;
                    if !self.set[b] {
                        continue;
                    }
                    let mut forced = [UNSET; MAX_N];
                    for z in 0..n {
                        forced[z] = self.rows[b][self.rows[y][self.inv[x][z] as usize] as usize];
                    }
                    if self.set[a] {
                        if self.rows[a][..n] != forced[..n] {
                            return false;
                        }
                    } else {
                        if !self.allowed(&forced) {
                            return false;
                        }
                        self.place(a, forced);
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn run(&mut self, out: &mut impl FnMut(&[Row])) {
        let Some(x) = (0..self.n).find(|&x| !self.set[x]) else {
            out(&self.rows);
            return;
        };
        let len = self.trail.len();
        for i in 0..self.perms.len() {
            let r = self.perms[i];
            if !self.allowed(&r) {
                continue;
            }
            self.place(x, r);
            if self.propagate() {
                self.run(out);
            }
            self.undo(len);
        }
    }
}

fn to_cycle_set(rows: &[Row], n: usize) -> CycleSet {
    let table = (0..n * n).map(|i| u32::from(rows[i / n][i % n])).collect();
    CycleSet::from_flat(n, table).expect("search yields cycle sets")
}

/// Every cycle set on `{0, …, n−1}` (optionally only indecomposable ones,
/// optionally one canonical form per isomorphism class).
pub fn enumerate_all(n: usize, opts: &OracleOptions) -> Result<Enumeration, OracleError> {
    let limit = if opts.indecomposable {
        opts.limit_indecomposable
    } else {
        opts.limit_all
    }
    .min(MAX_N);
    if n > limit {
        return Err(OracleError::LimitExceeded { n, limit });
    }
    if n == 0 {
        return Ok(Enumeration {
            n,
            members: Vec::new(),
        });
    }
    let perms = permutations(n);
    // Each start fixes row 0, plus the minimal cycle type in up-to-iso mode.
    let starts: Vec<(Row, Option<Vec<usize>>)> = if opts.up_to_iso {
        partitions(n, n)
            .into_iter()
            .rev()
            .flat_map(|parts| {
                let mut owns = parts.clone();
                owns.dedup();
                owns.into_iter()
                    .map(|own| (canonical_perm(&parts, own), Some(parts.clone())))
                    .collect::<Vec<_>>()
            })
            .collect()
    } else {
        perms.iter().map(|r| (*r, None)).collect()
    };
    let found: Mutex<BTreeSet<Vec<u32>>> = Mutex::new(BTreeSet::new());
    let next = AtomicUsize::new(0);
    let worker = || {
        let mut local: BTreeSet<Vec<u32>> = BTreeSet::new();
        loop {
            let i = next.fetch_add(1, Ordering::Relaxed);
            let Some((row0, min_type)) = starts.get(i) else {
                break;
            };
            let mut s = Search {
                n,
                perms: &perms,
                min_type: min_type.clone(),
                rows: vec![[UNSET; MAX_N]; n],
                inv: vec![[UNSET; MAX_N]; n],
                set: vec![false; n],
                trail: Vec::new(),
            };
            s.place(0, *row0);
            if !s.propagate() {
                continue;
            }
            s.run(&mut |rows| {
                let x = to_cycle_set(rows, n);
                if opts.indecomposable && !is_indecomposable(&x) {
                    return;
                }
                let table = if opts.up_to_iso {
                    canonical_form(&x).table
                } else {
                    x.flat_table().to_vec()
                };
                local.insert(table);
            });
        }
        found.lock().unwrap().extend(local);
    };
    let jobs = opts.jobs.max(1);
    if jobs == 1 {
        worker();
    } else {
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(&worker);
            }
        });
    }
    let members = found
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|t| CycleSet::from_flat(n, t).expect("valid table"))
        .collect();
    Ok(Enumeration { n, members })
}

fn pq_factors(n: usize) -> Option<(usize, usize)> {
    let primes: Vec<usize> = (2..=n)
        .filter(|&d| n % d == 0 && (2..d).all(|e| d % e != 0))
        .collect();
    match primes.as_slice() {
        [p, q] if p * q == n => Some((*p, *q)),
        _ => None,
    }
}

/// Compares the oracle's indecomposable classes of size `pq` with the
/// cyclic class and the `build_pq` outputs for `(p,q)` and `(q,p)`.
pub fn crosscheck_pq(n: usize, opts: &OracleOptions) -> Result<Report, OracleError> {
    let (p, q) = pq_factors(n).ok_or(OracleError::NotPq(n))?;
    let oracle = enumerate_all(
        n,
        &OracleOptions {
            indecomposable: true,
            up_to_iso: true,
            ..opts.clone()
        },
    )?;
    let mut classified: BTreeMap<CanonicalForm, Vec<u64>> = BTreeMap::new();
    for (m, k) in [(p, q), (q, p)] {
        for g in vectors(m, k as u64) {
            if let Ok(x) = build_pq(&PqSpec::new(m, k, g.clone())) {
                classified.entry(canonical_form(&x)).or_insert_with(|| {
                    let mut v = vec![m as u64, k as u64];
                    v.extend(&g);
                    v
                });
            }
        }
    }
    let cyclic = canonical_form(&cyclic_cycle_set(n));
    let mut report = Report::new();
    let (mut mpl1, mut mpl2, mut other) = (0usize, 0usize, 0usize);
    let mut covered = BTreeSet::new();
    for x in &oracle.members {
        let form = canonical_form(x);
        match mpl(x) {
            Ok(Mpl::Finite(1)) => {
                mpl1 += 1;
                report.check(
                    "mpl1_is_cyclic",
                    form == cyclic,
                    || json!({ "table": x.flat_table() }),
                );
            }
            Ok(Mpl::Finite(2)) => {
                mpl2 += 1;
                let hit = classified.contains_key(&form);
                report.check(
                    "mpl2_classified",
                    hit,
                    || json!({ "table": x.flat_table() }),
                );
                if hit {
                    covered.insert(form);
                }
            }
            level => {
                other += 1;
                report.check("mpl_at_most_2", false, || {
                    json!({ "table": x.flat_table(), "mpl": level.map(|l| l.to_string()).unwrap_or_default() })
                });
            }
        }
    }
    report.check("single_mpl1_class", mpl1 == 1, || json!({ "count": mpl1 }));
    for (form, params) in &classified {
        report.check(
            "classification_in_oracle",
            covered.contains(form),
            || json!({ "parameters": params }),
        );
    }
    report.metric("oracle_classes", oracle.members.len());
    report.metric("oracle_mpl1", mpl1);
    report.metric("oracle_mpl2", mpl2);
    report.metric("oracle_other", other);
    report.metric("classification_classes", classified.len());
    Ok(report)
}
