//! Cycle sets and their involutive nondegenerate solutions.
//!
//! A cycle set is stored as its operation table `table[x][y] = x ∗ y` over
//! `{0..n-1}`. Every constructor goes through [`CycleSet::validate`], so a value
//! of this type always satisfies C1–C3.

use crate::perm::Permutation;
use crate::report::Report;
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CycleSetError {
    #[error("empty table")]
    Empty,
    #[error("row {row} has length {len}, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("declared size {declared} does not match table size {actual}")]
    SizeMismatch { declared: usize, actual: usize },
    #[error("entry {value} at ({x},{y}) is out of range")]
    OutOfRange { x: usize, y: usize, value: usize },
    #[error("axiom C2 fails: row {row} is not a permutation")]
    C2Violation { row: usize },
    #[error("axiom C1 fails at (x,y,z) = ({x},{y},{z})")]
    C1Violation { x: usize, y: usize, z: usize },
    #[error("axiom C3 fails: {x}∗{x} = {y}∗{y}")]
    C3Violation { x: usize, y: usize },
}

impl CycleSetError {
    /// Malformed tables are input errors; axiom failures are mathematical ones.
    pub fn is_axiom_failure(&self) -> bool {
        matches!(
            self,
            CycleSetError::C1Violation { .. }
                | CycleSetError::C2Violation { .. }
                | CycleSetError::C3Violation { .. }
        )
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleSet {
    n: usize,
    table: Vec<u32>,
}

impl std::fmt::Debug for CycleSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CycleSet")
            .field("n", &self.n)
            .field("table", &self.rows())
            .finish()
    }
}

/// On-disk form: `{"n": N, "table": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleSetFile {
    pub n: usize,
    pub table: Vec<Vec<usize>>,
}

impl From<&CycleSet> for CycleSetFile {
    fn from(x: &CycleSet) -> Self {
        CycleSetFile {
            n: x.n,
            table: x.rows(),
        }
    }
}

impl TryFrom<CycleSetFile> for CycleSet {
    type Error = CycleSetError;
    fn try_from(f: CycleSetFile) -> Result<Self, Self::Error> {
        if f.n != f.table.len() {
            return Err(CycleSetError::SizeMismatch {
                declared: f.n,
                actual: f.table.len(),
            });
        }
        CycleSet::validate(&f.table)
    }
}

impl Serialize for CycleSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CycleSetFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycleSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let f = CycleSetFile::deserialize(d)?;
        CycleSet::try_from(f).map_err(serde::de::Error::custom)
    }
}

impl CycleSet {
    /// Checks C2, then C1, then C3, reporting the lexicographically first witness.
    pub fn validate(table: &[Vec<usize>]) -> Result<CycleSet, CycleSetError> {
        let n = table.len();
        if n == 0 {
            return Err(CycleSetError::Empty);
        }
        let mut flat = Vec::with_capacity(n * n);
        for (x, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(CycleSetError::NotSquare {
                    row: x,
                    len: row.len(),
                    n,
                });
            }
            for (y, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(CycleSetError::OutOfRange { x, y, value: v });
                }
                flat.push(v as u32);
            }
        }
        let candidate = CycleSet { n, table: flat };
        candidate.check_axioms()?;
        Ok(candidate)
    }

    /// Builds from a closure `f(x, y) = x ∗ y` and validates.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> Result<CycleSet, CycleSetError> {
        let table: Vec<Vec<usize>> = (0..n).map(|x| (0..n).map(|y| f(x, y)).collect()).collect();
        CycleSet::validate(&table)
    }

    fn check_axioms(&self) -> Result<(), CycleSetError> {
        let n = self.n;
        let mut seen = vec![usize::MAX; n];
        for x in 0..n {
            for y in 0..n {
                let v = self.op(x, y);
                if seen[v] == x {
                    return Err(CycleSetError::C2Violation { row: x });
                }
                seen[v] = x;
            }
        }
        for x in 0..n {
            for y in 0..n {
                let xy = self.op(x, y);
                let yx = self.op(y, x);
                for z in 0..n {
                    if self.op(xy, self.op(x, z)) != self.op(yx, self.op(y, z)) {
                        return Err(CycleSetError::C1Violation { x, y, z });
                    }
                }
            }
        }
        let mut owner = vec![usize::MAX; n];
        for y in 0..n {
            let s = self.op(y, y);
            if owner[s] != usize::MAX {
                return Err(CycleSetError::C3Violation { x: owner[s], y });
            }
            owner[s] = y;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn op(&self, x: usize, y: usize) -> usize {
        self.table[x * self.n + y] as usize
    }

    pub fn row(&self, x: usize) -> &[u32] {
        &self.table[x * self.n..(x + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|x| self.row(x).iter().map(|&v| v as usize).collect())
            .collect()
    }

    pub fn flat_table(&self) -> &[u32] {
        &self.table
    }

    /// `σ_x : y ↦ x ∗ y`.
    pub fn sigma(&self, x: usize) -> Permutation {
        Permutation::from_images_unchecked(self.row(x).to_vec())
    }

    /// `x ↦ x ∗ x`.
    pub fn square_map(&self) -> Permutation {
        Permutation::from_images_unchecked((0..self.n).map(|x| self.op(x, x) as u32).collect())
    }

    /// Image of `self` under the relabeling `x ↦ pi(x)`.
    pub fn relabel(&self, pi: &Permutation) -> CycleSet {
        let n = self.n;
        assert_eq!(pi.degree(), n);
        let mut table = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                table[pi.apply(x) * n + pi.apply(y)] = pi.apply(self.op(x, y)) as u32;
            }
        }
        CycleSet { n, table }
    }

    /// The trivial cycle set `x ∗ y = y`.
    pub fn trivial(n: usize) -> CycleSet {
        CycleSet {
            n,
            table: (0..n).flat_map(|_| 0..n as u32).collect(),
        }
    }

    /// Builds from a row-major table and validates.
    pub fn from_flat(n: usize, table: Vec<u32>) -> Result<CycleSet, CycleSetError> {
        if n == 0 {
            return Err(CycleSetError::Empty);
        }
        if table.len() != n * n {
            return Err(CycleSetError::NotSquare {
                row: table.len() / n,
                len: table.len() % n,
                n,
            });
        }
        if let Some(i) = table.iter().position(|&v| v as usize >= n) {
            return Err(CycleSetError::OutOfRange {
                x: i / n,
                y: i % n,
                value: table[i] as usize,
            });
        }
        let c = CycleSet { n, table };
        c.check_axioms()?;
        Ok(c)
    }

    pub(crate) fn from_flat_unchecked(n: usize, table: Vec<u32>) -> CycleSet {
        let c = CycleSet { n, table };
        debug_assert!(c.check_axioms().is_ok());
        c
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<CycleSet, JsonError> {
        let f: CycleSetFile = serde_json::from_str(s).map_err(JsonError::Parse)?;
        CycleSet::try_from(f).map_err(JsonError::Invalid)
    }

    /// The solution with `λ_x = σ_x⁻¹`, characterized by `r(x, x∗y) = (y, y∗x)`.
    pub fn to_solution(&self) -> Solution {
        let n = self.n;
        let inv: Vec<Permutation> = (0..n).map(|x| self.sigma(x).inverse()).collect();
        let mut lambda = vec![vec![0usize; n]; n];
        let mut rho = vec![vec![0usize; n]; n];
        for x in 0..n {
            for y in 0..n {
                let l = inv[x].apply(y);
                lambda[x][y] = l;
                rho[y][x] = self.op(l, x);
            }
        }
        Solution { n, lambda, rho }
    }

    /// `x ∗ y = λ_x⁻¹(y)`; the solution must pass [`verify_ybe`].
    pub fn from_solution(s: &Solution) -> Result<CycleSet, SolutionError> {
        let report = verify_ybe(s);
        if !report.passed() {
            return Err(SolutionError::InvalidSolution(report));
        }
        let n = s.n;
        let mut table = vec![vec![0usize; n]; n];
        for x in 0..n {
            for y in 0..n {
                table[x][s.lambda[x][y]] = y;
            }
        }
        CycleSet::validate(&table).map_err(SolutionError::NotACycleSet)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Parse(serde_json::Error),
    #[error(transparent)]
    Invalid(CycleSetError),
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SolutionError {
    #[error("invalid solution: {}", serde_json::to_string(&.0.witnesses).unwrap_or_default())]
    InvalidSolution(Report),
    #[error("derived table is not a cycle set: {0}")]
    NotACycleSet(CycleSetError),
}

/// `r(x,y) = (λ_x(y), ρ_y(x))`, stored as raw maps so that degenerate inputs
/// can be represented and rejected by [`verify_ybe`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub n: usize,
    pub lambda: Vec<Vec<usize>>,
    pub rho: Vec<Vec<usize>>,
}

impl Solution {
    pub fn from_map(n: usize, r: impl Fn(usize, usize) -> (usize, usize)) -> Solution {
        let mut lambda = vec![vec![0; n]; n];
        let mut rho = vec![vec![0; n]; n];
        for x in 0..n {
            for y in 0..n {
                let (u, v) = r(x, y);
                lambda[x][y] = u;
                rho[y][x] = v;
            }
        }
        Solution { n, lambda, rho }
    }

    #[inline]
    pub fn apply(&self, x: usize, y: usize) -> (usize, usize) {
        (self.lambda[x][y], self.rho[y][x])
    }

    pub fn lambda_perm(&self, x: usize) -> Option<Permutation> {
        Permutation::from_images(self.lambda[x].iter().copied()).ok()
    }

    pub fn rho_perm(&self, y: usize) -> Option<Permutation> {
        Permutation::from_images(self.rho[y].iter().copied()).ok()
    }
}

fn is_bijection(images: &[usize]) -> bool {
    let mut seen = vec![false; images.len()];
    images
        .iter()
        .all(|&v| v < images.len() && !std::mem::replace(&mut seen[v], true))
}

/// Checks nondegeneracy, involutivity and the braid relation exhaustively.
pub fn verify_ybe(s: &Solution) -> Report {
    let n = s.n;
    let mut report = Report::new();
    let shape_ok = s.lambda.len() == n
        && s.rho.len() == n
        && s.lambda
            .iter()
            .chain(&s.rho)
            .all(|r| r.len() == n && r.iter().all(|&v| v < n));
    report.check("shape", shape_ok, || json!({ "n": n }));
    if !shape_ok {
        return report;
    }

    let bad_lambda = (0..n).find(|&x| !is_bijection(&s.lambda[x]));
    let bad_rho = (0..n).find(|&y| !is_bijection(&s.rho[y]));
    report.check(
        "nondegeneracy",
        bad_lambda.is_none() && bad_rho.is_none(),
        || json!({ "lambda": bad_lambda, "rho": bad_rho }),
    );

    let mut inv_witness = None;
    'outer: for x in 0..n {
        for y in 0..n {
            let (u, v) = s.apply(x, y);
            if s.apply(u, v) != (x, y) {
                inv_witness = Some([x, y]);
                break 'outer;
            }
        }
    }
    report.check("involutivity", inv_witness.is_none(), || json!(inv_witness));

    let r12 = |t: [usize; 3]| {
        let (a, b) = s.apply(t[0], t[1]);
        [a, b, t[2]]
    };
    let r23 = |t: [usize; 3]| {
        let (b, c) = s.apply(t[1], t[2]);
        [t[0], b, c]
    };
    let mut ybe_witness = None;
    'ybe: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let t = [x, y, z];
                if r12(r23(r12(t))) != r23(r12(r23(t))) {
                    ybe_witness = Some(t);
                    break 'ybe;
                }
            }
        }
    }
    report.check("ybe", ybe_witness.is_none(), || json!(ybe_witness));
    report
}
