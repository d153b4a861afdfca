//! X-graded 𝒢(X)-modules and the extensions they parametrize.
//!
//! A module assigns to each `x ∈ X` a finite abelian group `A_x`, written as
//! a list of cyclic orders, and to each generator `σ_z` of 𝒢(X) a family of
//! integer matrices `A_x → A_{σ_z(x)}`. The action of an arbitrary group
//! element is obtained along the closure tree. The scattering `A^sca` is
//! indexed by `x` first and then by the residue code of `a` with the first
//! coordinate most significant.

use crate::brace::{BraceError, PermutationBrace};
use crate::cycle_set::{CycleSet, CycleSetError};
use crate::group::{GroupClosure, GroupError, DEFAULT_SIZE_LIMIT};
use crate::modular::{gcd, prime_factors};
use crate::perm::Permutation;
use crate::report::Report;
use crate::structure::{is_indecomposable, CycleSetHom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::collections::{HashMap, VecDeque};

/// Rows index target coordinates, columns source coordinates.
pub type Matrix = Vec<Vec<u64>>;

/// Element of a component `A_x`, as residues.
pub type Elem = Vec<u64>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum ExtensionError {
    #[error("malformed input: {0}")]
    Shape(String),
    #[error("invalid graded module: {}", serde_json::to_string(&.0.witnesses).unwrap_or_default())]
    InvalidModule(Report),
    #[error("Φ is not equivariant: σ_{z} at ({x}, {y})")]
    EquivarianceViolation { z: usize, x: usize, y: usize },
    #[error("Γ is not invariant: σ_{z} at ({x}, {y})")]
    InvarianceViolation { z: usize, x: usize, y: usize },
    #[error("Φ⁰ is not equivariant under the stabilizer at {y}")]
    NotPi1Equivariant { y: usize },
    #[error("Φ({x}, {y}) depends on the choice of group element")]
    WellDefinednessFailure { x: usize, y: usize },
    #[error("gcd(|𝒢(X)|, |A_{x}|) ≠ 1")]
    CoprimalityViolation { x: usize },
    #[error("base cycle set is decomposable")]
    NotIndecomposable,
    #[error("criterion depends on the base point {x0}")]
    BasePointDisagreement { x0: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not a module isomorphism: {0}")]
    NotModuleIso(String),
    #[error("Φ is not a twisted 2-cocycle at ({x}, {y}, {z})")]
    NotATwistedCocycle { x: usize, y: usize, z: usize },
    #[error("{count} equivariant cocycles are cohomologous to Φ")]
    NotUnique { count: usize },
    #[error("no equivariant cocycle is cohomologous to Φ")]
    NoRepresentativeFound,
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("search space of {0} candidates exceeds the limit")]
    SearchTooLarge(u128),
    #[error(transparent)]
    NotACycleSet(#[from] CycleSetError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Brace(Box<BraceError>),
}

impl From<BraceError> for ExtensionError {
    fn from(e: BraceError) -> Self {
        ExtensionError::Brace(Box::new(e))
    }
}

fn apply_matrix(m: &Matrix, a: &[u64], target: &[u64]) -> Elem {
    m.iter()
        .zip(target)
        .map(|(row, &d)| {
            row.iter()
                .zip(a)
                .fold(0u64, |acc, (&c, &v)| (acc + (c % d) * (v % d)) % d)
        })
        .collect()
}

fn compose_matrices(a: &Matrix, b: &Matrix, target: &[u64]) -> Matrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .zip(target)
        .map(|(row, &d)| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(0u64, |acc, (&c, brow)| (acc + (c % d) * (brow[j] % d)) % d)
                })
                .collect()
        })
        .collect()
}

fn identity_matrix(k: usize) -> Matrix {
    (0..k)
        .map(|i| (0..k).map(|j| u64::from(i == j)).collect())
        .collect()
}

#[derive(Debug, Clone)]
pub struct GradedModule {
    base: CycleSet,
    group: GroupClosure,
    /// Generator index in `group` for each `σ_z`.
    sigma_gen: Vec<u32>,
    components: Vec<Vec<u64>>,
    gen_matrices: Vec<Vec<Matrix>>,
    /// `action[g][x]`: the matrix of `g` on `A_x`.
    action: Vec<Vec<Matrix>>,
    offsets: Vec<usize>,
}

impl GradedModule {
    /// Builds the action of every group element without validating it.
    pub fn unchecked(
        base: CycleSet,
        components: Vec<Vec<u64>>,
        gen_matrices: Vec<Vec<Matrix>>,
    ) -> Result<GradedModule, ExtensionError> {
        let n = base.n();
        if components.len() != n || gen_matrices.len() != n {
            return Err(ExtensionError::Shape(format!(
                "expected {n} components and {n} generator families"
            )));
        }
        if let Some(x) = (0..n).find(|&x| components[x].iter().any(|&d| d == 0)) {
            return Err(ExtensionError::Shape(format!(
                "component {x} has a zero order"
            )));
        }
        for (z, fam) in gen_matrices.iter().enumerate() {
            if fam.len() != n {
                return Err(ExtensionError::Shape(format!(
                    "generator {z} needs {n} matrices"
                )));
            }
            for (x, m) in fam.iter().enumerate() {
                let target = base.op(z, x);
                if m.len() != components[target].len()
                    || m.iter().any(|r| r.len() != components[x].len())
                {
                    return Err(ExtensionError::Shape(format!(
                        "matrix of σ_{z} on A_{x} must be {}×{}",
                        components[target].len(),
                        components[x].len()
                    )));
                }
            }
        }
        let mut distinct: Vec<Permutation> = Vec::new();
        let mut rep_of_gen: Vec<usize> = Vec::new();
        for z in 0..n {
            let s = base.sigma(z);
            if !distinct.contains(&s) {
                distinct.push(s);
                rep_of_gen.push(z);
            }
        }
        let group = GroupClosure::new(n, &distinct, DEFAULT_SIZE_LIMIT)?;
        let sigma_gen: Vec<u32> = (0..n)
            .map(|z| {
                let k = distinct.iter().position(|s| *s == base.sigma(z)).unwrap();
                group.gen(k)
            })
            .collect();
        let order = group.order();
        let mut action: Vec<Vec<Matrix>> = Vec::with_capacity(order);
        action.push(
            components
                .iter()
                .map(|c| identity_matrix(c.len()))
                .collect(),
        );
        for i in 1..order as u32 {
            let (parent, s) = group.parent(i);
            let z = rep_of_gen[s as usize];
            let mats = (0..n)
                .map(|x| {
                    let mid = base.op(z, x);
                    let target = group.apply(i, x);
                    compose_matrices(
                        &action[parent as usize][mid],
                        &gen_matrices[z][x],
                        &components[target],
                    )
                })
                .collect();
            action.push(mats);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0usize;
        for c in &components {
            offsets.push(acc);
            acc += c.iter().product::<u64>() as usize;
        }
        offsets.push(acc);
        Ok(GradedModule {
            base,
            group,
            sigma_gen,
            components,
            gen_matrices,
            action,
            offsets,
        })
    }

    pub fn new(
        base: CycleSet,
        components: Vec<Vec<u64>>,
        gen_matrices: Vec<Vec<Matrix>>,
    ) -> Result<GradedModule, ExtensionError> {
        let m = GradedModule::unchecked(base, components, gen_matrices)?;
        let report = validate_graded_module(&m);
        if !report.passed() {
            return Err(ExtensionError::InvalidModule(report));
        }
        Ok(m)
    }

    /// `B^X` with 𝒢(X) permuting coordinates.
    pub fn permutation_module(base: &CycleSet, orders: &[u64]) -> GradedModule {
        let n = base.n();
        let id = identity_matrix(orders.len());
        GradedModule::unchecked(base.clone(), vec![orders.to_vec(); n], vec![vec![id; n]; n])
            .expect("permutation module")
    }

    pub fn base(&self) -> &CycleSet {
        &self.base
    }

    pub fn group(&self) -> &GroupClosure {
        &self.group
    }

    pub fn component(&self, x: usize) -> &[u64] {
        &self.components[x]
    }

    pub fn components(&self) -> &[Vec<u64>] {
        &self.components
    }

    pub fn gen_matrices(&self) -> &[Vec<Matrix>] {
        &self.gen_matrices
    }

    pub fn component_size(&self, x: usize) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    /// `|A^sca|`.
    pub fn scatter_size(&self) -> usize {
        self.offsets[self.base.n()]
    }

    pub fn zero(&self, x: usize) -> Elem {
        vec![0; self.components[x].len()]
    }

    pub fn add(&self, x: usize, a: &[u64], b: &[u64]) -> Elem {
        self.components[x]
            .iter()
            .zip(a.iter().zip(b))
            .map(|(&d, (&u, &v))| (u + v) % d)
            .collect()
    }

    pub fn neg(&self, x: usize, a: &[u64]) -> Elem {
        self.components[x]
            .iter()
            .zip(a)
            .map(|(&d, &u)| (d - u % d) % d)
            .collect()
    }

    pub fn sub(&self, x: usize, a: &[u64], b: &[u64]) -> Elem {
        self.add(x, a, &self.neg(x, b))
    }

    pub fn scale(&self, x: usize, k: u64, a: &[u64]) -> Elem {
        self.components[x]
            .iter()
            .zip(a)
            .map(|(&d, &u)| (k % d) * (u % d) % d)
            .collect()
    }

    pub fn reduce(&self, x: usize, a: &[u64]) -> Elem {
        self.components[x]
            .iter()
            .zip(a)
            .map(|(&d, &u)| u % d)
            .collect()
    }

    /// Index of `(x, a)` in the scattering.
    pub fn point(&self, x: usize, a: &[u64]) -> usize {
        let code = self.components[x]
            .iter()
            .zip(a)
            .fold(0usize, |acc, (&d, &v)| acc * d as usize + (v % d) as usize);
        self.offsets[x] + code
    }

    /// Inverse of [`GradedModule::point`].
    pub fn unpoint(&self, i: usize) -> (usize, Elem) {
        let x = self.offsets.partition_point(|&o| o <= i) - 1;
        (x, self.decode(x, i - self.offsets[x]))
    }

    fn decode(&self, x: usize, mut code: usize) -> Elem {
        let c = &self.components[x];
        let mut a = vec![0u64; c.len()];
        for i in (0..c.len()).rev() {
            a[i] = (code % c[i] as usize) as u64;
            code /= c[i] as usize;
        }
        a
    }

    /// All elements of `A_x` in code order.
    pub fn elements(&self, x: usize) -> Vec<Elem> {
        (0..self.component_size(x))
            .map(|c| self.decode(x, c))
            .collect()
    }

    /// `g · a` for `a ∈ A_x`, landing in `A_{g(x)}`.
    pub fn act(&self, g: u32, x: usize, a: &[u64]) -> Elem {
        let target = self.group.apply(g, x);
        apply_matrix(&self.action[g as usize][x], a, &self.components[target])
    }

    /// `σ_z · a` for `a ∈ A_x`.
    pub fn act_sigma(&self, z: usize, x: usize, a: &[u64]) -> Elem {
        self.act(self.sigma_gen[z], x, a)
    }

    /// `λ_z · a = σ_z⁻¹ · a` for `a ∈ A_x`.
    pub fn act_lambda(&self, z: usize, x: usize, a: &[u64]) -> Elem {
        self.act(self.group.inverse(self.sigma_gen[z]), x, a)
    }

    pub fn sigma_element(&self, z: usize) -> u32 {
        self.sigma_gen[z]
    }

    fn same_map(&self, m1: &Matrix, m2: &Matrix, target: &[u64]) -> bool {
        let cols = m1.first().map_or(0, Vec::len);
        (0..cols).all(|j| {
            let mut e = vec![0u64; cols];
            e[j] = 1;
            apply_matrix(m1, &e, target) == apply_matrix(m2, &e, target)
        })
    }
}

/// Grading, homomorphism, identity and invertibility checks.
pub fn validate_graded_module(m: &GradedModule) -> Report {
    let mut report = Report::new();
    let n = m.base.n();
    for z in 0..n {
        for x in 0..n {
            let t = m.base.op(z, x);
            let (src, dst) = (&m.components[x], &m.components[t]);
            let sizes_match = src.iter().product::<u64>() == dst.iter().product::<u64>();
            let well_defined = m.gen_matrices[z][x].iter().zip(dst).all(|(row, &d)| {
                row.iter()
                    .zip(src)
                    .all(|(&c, &s)| (c % d) * (s % d) % d == 0)
            });
            report.check(
                "grading",
                sizes_match && well_defined,
                || json!({ "z": z, "x": x }),
            );
            let images: std::collections::HashSet<Elem> = m
                .elements(x)
                .iter()
                .map(|a| apply_matrix(&m.gen_matrices[z][x], a, dst))
                .collect();
            report.check(
                "invertibility",
                images.len() == m.component_size(x),
                || json!({ "z": z, "x": x }),
            );
            if m.base.sigma(z).is_identity() {
                report.check(
                    "identity",
                    m.same_map(&m.gen_matrices[z][x], &identity_matrix(src.len()), dst),
                    || json!({ "z": z, "x": x }),
                );
            }
        }
    }
    if !report.passed() {
        return report;
    }
    let order = m.group.order() as u32;
    'edges: for h in 0..order {
        for z in 0..n {
            let hz = m.group.compose(h, m.sigma_gen[z]);
            for x in 0..n {
                let mid = m.base.op(z, x);
                let t = m.group.apply(hz, x);
                let composed = compose_matrices(
                    &m.action[h as usize][mid],
                    &m.gen_matrices[z][x],
                    &m.components[t],
                );
                if !m.same_map(&m.action[hz as usize][x], &composed, &m.components[t]) {
                    report.check(
                        "homomorphism",
                        false,
                        || json!({ "element": h, "z": z, "x": x }),
                    );
                    break 'edges;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let g = rng.gen_range(0..order);
        let h = rng.gen_range(0..order);
        let gh = m.group.compose(g, h);
        for x in 0..n {
            let t = m.group.apply(gh, x);
            let composed = compose_matrices(
                &m.action[g as usize][m.group.apply(h, x)],
                &m.action[h as usize][x],
                &m.components[t],
            );
            if !m.same_map(&m.action[gh as usize][x], &composed, &m.components[t]) {
                report.check(
                    "homomorphism_sampled",
                    false,
                    || json!({ "g": g, "h": h, "x": x }),
                );
                return report;
            }
        }
    }
    report.metric("group_order", m.group.order());
    report
}

/// `Φ(x, y) ∈ A_y`, stored at `x·n + y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cocycle {
    pub values: Vec<Elem>,
}

impl Cocycle {
    pub fn zero(m: &GradedModule) -> Cocycle {
        let n = m.base.n();
        Cocycle {
            values: (0..n * n).map(|i| m.zero(i % n)).collect(),
        }
    }

    pub fn from_fn(m: &GradedModule, f: impl Fn(usize, usize) -> Elem) -> Cocycle {
        let n = m.base.n();
        Cocycle {
            values: (0..n * n)
                .map(|i| m.reduce(i % n, &f(i / n, i % n)))
                .collect(),
        }
    }

    pub fn get(&self, n: usize, x: usize, y: usize) -> &Elem {
        &self.values[x * n + y]
    }

    fn check_shape(&self, m: &GradedModule) -> Result<(), ExtensionError> {
        let n = m.base.n();
        if self.values.len() != n * n {
            return Err(ExtensionError::Shape(format!("Φ needs {} values", n * n)));
        }
        if let Some(i) = (0..n * n).find(|&i| self.values[i].len() != m.components[i % n].len()) {
            return Err(ExtensionError::Shape(format!(
                "Φ({}, {}) has the wrong length",
                i / n,
                i % n
            )));
        }
        Ok(())
    }
}

/// First generator violation of `Φ(gx, gy) = g·Φ(x,y)`; all group elements if `exhaustive`.
pub fn equivariance_witness(
    m: &GradedModule,
    phi: &Cocycle,
    exhaustive: bool,
) -> Option<(usize, usize, usize)> {
    let n = m.base.n();
    let elements: Vec<(usize, u32)> = if exhaustive {
        (0..m.group.order() as u32)
            .map(|g| (g as usize, g))
            .collect()
    } else {
        (0..n).map(|z| (z, m.sigma_gen[z])).collect()
    };
    for (label, g) in elements {
        for x in 0..n {
            for y in 0..n {
                let lhs = phi.get(n, m.group.apply(g, x), m.group.apply(g, y));
                if *lhs != m.act(g, y, phi.get(n, x, y)) {
                    return Some((label, x, y));
                }
            }
        }
    }
    None
}

pub fn check_equivariance(m: &GradedModule, phi: &Cocycle, exhaustive: bool) -> bool {
    equivariance_witness(m, phi, exhaustive).is_none()
}

/// `(x,a) ∗ (y,b) = (x∗y, σ_x·(b + Φ(x,y)))` for any Φ; validated as a cycle set.
pub fn general_extension(
    m: &GradedModule,
    phi: &Cocycle,
) -> Result<(CycleSet, CycleSetHom), ExtensionError> {
    phi.check_shape(m)?;
    let n = m.base.n();
    let size = m.scatter_size();
    let points: Vec<(usize, Elem)> = (0..size).map(|i| m.unpoint(i)).collect();
    let mut table = vec![0u32; size * size];
    for (u, (x, _)) in points.iter().enumerate() {
        for (v, (y, b)) in points.iter().enumerate() {
            let shifted = m.add(*y, b, phi.get(n, *x, *y));
            let img = m.act_sigma(*x, *y, &shifted);
            table[u * size + v] = m.point(m.base.op(*x, *y), &img) as u32;
        }
    }
    let ext = CycleSet::from_flat(size, table)?;
    let proj = CycleSetHom {
        source: ext.clone(),
        target: m.base.clone(),
        map: points.iter().map(|(x, _)| *x).collect(),
    };
    Ok((ext, proj))
}

/// Twisted extension `X ⊗_Φ A` for an equivariant Φ.
pub fn twisted_extension(
    m: &GradedModule,
    phi: &Cocycle,
) -> Result<(CycleSet, CycleSetHom), ExtensionError> {
    phi.check_shape(m)?;
    if let Some((z, x, y)) = equivariance_witness(m, phi, false) {
        return Err(ExtensionError::EquivarianceViolation { z, x, y });
    }
    general_extension(m, phi)
}

/// `Γ: X × X → B` with `B` given by cyclic orders, stored at `x·n + y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaMap {
    pub base: CycleSet,
    pub orders: Vec<u64>,
    pub values: Vec<Elem>,
}

impl GammaMap {
    pub fn from_fn(base: &CycleSet, orders: &[u64], f: impl Fn(usize, usize) -> Elem) -> GammaMap {
        let n = base.n();
        GammaMap {
            base: base.clone(),
            orders: orders.to_vec(),
            values: (0..n * n)
                .map(|i| {
                    f(i / n, i % n)
                        .iter()
                        .zip(orders)
                        .map(|(&v, &d)| v % d)
                        .collect()
                })
                .collect(),
        }
    }

    /// The same map viewed in the permutation module `B^X`.
    pub fn as_cocycle(&self) -> (GradedModule, Cocycle) {
        let m = GradedModule::permutation_module(&self.base, &self.orders);
        let phi = Cocycle {
            values: self.values.clone(),
        };
        (m, phi)
    }
}

/// `(x,a) ∗ (y,b) = (x∗y, b + Γ(x,y))` for a 𝒢(X)-invariant Γ.
pub fn parallel_extension(gamma: &GammaMap) -> Result<(CycleSet, CycleSetHom), ExtensionError> {
    let x = &gamma.base;
    let n = x.n();
    if gamma.values.len() != n * n || gamma.values.iter().any(|v| v.len() != gamma.orders.len()) {
        return Err(ExtensionError::Shape("Γ has the wrong shape".into()));
    }
    for z in 0..n {
        for a in 0..n {
            for b in 0..n {
                if gamma.values[x.op(z, a) * n + x.op(z, b)] != gamma.values[a * n + b] {
                    return Err(ExtensionError::InvarianceViolation { z, x: a, y: b });
                }
            }
        }
    }
    let k: usize = gamma.orders.iter().product::<u64>() as usize;
    let decode = |mut c: usize| {
        let mut v = vec![0u64; gamma.orders.len()];
        for i in (0..v.len()).rev() {
            v[i] = (c % gamma.orders[i] as usize) as u64;
            c /= gamma.orders[i] as usize;
        }
        v
    };
    let encode = |v: &[u64]| {
        v.iter()
            .zip(&gamma.orders)
            .fold(0usize, |acc, (&a, &d)| acc * d as usize + a as usize)
    };
    let size = n * k;
    let mut table = vec![0u32; size * size];
    for u in 0..size {
        let xa = u / k;
        for v in 0..size {
            let (y, b) = (v / k, decode(v % k));
            let g = &gamma.values[xa * n + y];
            let sum: Vec<u64> = b
                .iter()
                .zip(g)
                .zip(&gamma.orders)
                .map(|((&p, &q), &d)| (p + q) % d)
                .collect();
            table[u * size + v] = (x.op(xa, y) * k + encode(&sum)) as u32;
        }
    }
    let ext = CycleSet::from_flat(size, table)?;
    let proj = CycleSetHom {
        source: ext.clone(),
        target: x.clone(),
        map: (0..size).map(|u| u / k).collect(),
    };
    Ok((ext, proj))
}

/// `Φ(g x₀, y) = g·Φ⁰(g⁻¹ y)` from a stabilizer-equivariant `Φ⁰`.
pub fn phi_from_phi0(
    m: &GradedModule,
    x0: usize,
    phi0: &[Elem],
) -> Result<Cocycle, ExtensionError> {
    let n = m.base.n();
    if phi0.len() != n || (0..n).any(|y| phi0[y].len() != m.components[y].len()) {
        return Err(ExtensionError::Shape("Φ⁰ has the wrong shape".into()));
    }
    if !is_indecomposable(&m.base) {
        return Err(ExtensionError::NotIndecomposable);
    }
    let phi0: Vec<Elem> = (0..n).map(|y| m.reduce(y, &phi0[y])).collect();
    let order = m.group.order() as u32;
    for g in m.group.stabilizer(x0) {
        for y in 0..n {
            if phi0[m.group.apply(g, y)] != m.act(g, y, &phi0[y]) {
                return Err(ExtensionError::NotPi1Equivariant { y });
            }
        }
    }
    let mut values: Vec<Option<Elem>> = vec![None; n * n];
    for g in 0..order {
        let x = m.group.apply(g, x0);
        for y in 0..n {
            let pre = m.group.apply_inverse(g, y);
            let v = m.act(g, pre, &phi0[pre]);
            match &values[x * n + y] {
                None => values[x * n + y] = Some(v),
                Some(w) if *w != v => return Err(ExtensionError::WellDefinednessFailure { x, y }),
                _ => {}
            }
        }
    }
    let phi = Cocycle {
        values: values
            .into_iter()
            .map(|v| v.expect("transitive action"))
            .collect(),
    };
    if let Some((z, x, y)) = equivariance_witness(m, &phi, false) {
        return Err(ExtensionError::EquivarianceViolation { z, x, y });
    }
    Ok(phi)
}

fn check_coprime(m: &GradedModule) -> Result<(), ExtensionError> {
    let order = m.group.order() as u64;
    for x in 0..m.base.n() {
        if gcd(order, m.component_size(x) as u64) != 1 {
            return Err(ExtensionError::CoprimalityViolation { x });
        }
    }
    Ok(())
}

/// Size of the subgroup of `A_x` generated by `gens`.
fn generated_size(m: &GradedModule, x: usize, gens: &[Elem]) -> usize {
    let mut seen = std::collections::HashSet::new();
    let zero = m.zero(x);
    seen.insert(zero.clone());
    let mut queue = VecDeque::from([zero]);
    while let Some(a) = queue.pop_front() {
        for g in gens {
            let s = m.add(x, &a, g);
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    seen.len()
}

/// `A_{x₀} = ⟨Φ(x, x₀) : x ∈ X⟩`, evaluated at every `x₀` (the answers must agree).
pub fn indecomposability_criterion(
    m: &GradedModule,
    phi: &Cocycle,
) -> Result<bool, ExtensionError> {
    phi.check_shape(m)?;
    check_coprime(m)?;
    if !is_indecomposable(&m.base) {
        return Err(ExtensionError::NotIndecomposable);
    }
    let n = m.base.n();
    let at = |x0: usize| {
        let gens: Vec<Elem> = (0..n).map(|x| phi.get(n, x, x0).clone()).collect();
        generated_size(m, x0, &gens) == m.component_size(x0)
    };
    let answer = at(0);
    if let Some(x0) = (1..n).find(|&x0| at(x0) != answer) {
        return Err(ExtensionError::BasePointDisagreement { x0 });
    }
    Ok(answer)
}

/// Checks the decomposition `𝒢(Y) = 𝒢(Y)_π ⋉ K` with `K = ⟨Φ_x⟩` for
/// `Y = X ⊗_Φ A` indecomposable and `π` the primes of `|𝒢(X)|`.
pub fn semidirect_check(
    m: &GradedModule,
    phi: &Cocycle,
    limit: usize,
) -> Result<Report, ExtensionError> {
    check_coprime(m).map_err(|e| ExtensionError::Precondition(e.to_string()))?;
    let (y, _) = twisted_extension(m, phi)?;
    if !is_indecomposable(&y) {
        return Err(ExtensionError::Precondition(
            "the extension is decomposable".into(),
        ));
    }
    let n = m.base.n();
    let size = y.n();
    let brace = PermutationBrace::build(&y, limit)?;
    let gy = brace.group();
    let gx_order = m.group.order();
    let pi = prime_factors(gx_order as u64);
    let mut report = Report::new();
    report.metric("base_group_order", gx_order);
    report.metric("group_order", gy.order());

    let find = |p: &[u32]| -> Option<u32> {
        let img: Vec<u16> = p.iter().map(|&v| v as u16).collect();
        gy.find(&img)
    };
    let points: Vec<(usize, Elem)> = (0..size).map(|i| m.unpoint(i)).collect();

    // (i) the section s(g): (x,a) ↦ (g x, g·a)
    let mut section: Vec<u32> = Vec::with_capacity(gx_order);
    let mut section_of: HashMap<u32, u32> = HashMap::new();
    for g in 0..gx_order as u32 {
        let img: Vec<u32> = points
            .iter()
            .map(|(x, a)| m.point(m.group.apply(g, *x), &m.act(g, *x, a)) as u32)
            .collect();
        match find(&img) {
            Some(e) => {
                section.push(e);
                section_of.insert(g, e);
            }
            None => {
                report.check("section_in_group", false, || json!({ "element": g }));
                return Ok(report);
            }
        }
    }
    let mut hall = brace.pi_primary(&pi)?;
    hall.sort_unstable();
    let mut sec_sorted = section.clone();
    sec_sorted.sort_unstable();
    sec_sorted.dedup();
    report.metric("hall_order", hall.len());
    report.check(
        "hall_equals_section",
        hall == sec_sorted,
        || json!({ "hall_order": hall.len(), "section_order": sec_sorted.len() }),
    );

    // (ii) K = ker 𝒢(pr) = ⟨Φ_x⟩ acting by translations
    let translation = |f: &[Elem]| -> Vec<u32> {
        points
            .iter()
            .map(|(x, a)| m.point(*x, &m.add(*x, a, &f[*x])) as u32)
            .collect()
    };
    let phi_rows: Vec<Vec<Elem>> = (0..n)
        .map(|x| (0..n).map(|yy| phi.get(n, x, yy).clone()).collect())
        .collect();
    let mut k_span: Vec<Vec<Elem>> = vec![(0..n).map(|x| m.zero(x)).collect()];
    let mut seen: std::collections::HashSet<Vec<Elem>> = k_span.iter().cloned().collect();
    let mut head = 0;
    while head < k_span.len() {
        let f = k_span[head].clone();
        for g in &phi_rows {
            let s: Vec<Elem> = (0..n).map(|x| m.add(x, &f[x], &g[x])).collect();
            if seen.insert(s.clone()) {
                k_span.push(s);
            }
        }
        head += 1;
    }
    let mut k_elems: Vec<u32> = Vec::with_capacity(k_span.len());
    for f in &k_span {
        match find(&translation(f)) {
            Some(e) => k_elems.push(e),
            None => {
                report.check(
                    "translations_in_group",
                    false,
                    || json!({ "translation": f }),
                );
                return Ok(report);
            }
        }
    }
    k_elems.sort_unstable();
    let kernel: Vec<u32> = (0..gy.order() as u32)
        .filter(|&g| {
            points
                .iter()
                .enumerate()
                .all(|(i, (x, _))| points[gy.apply(g, i)].0 == *x)
        })
        .collect();
    report.metric("kernel_order", kernel.len());
    report.check(
        "kernel_equals_span",
        kernel == k_elems,
        || json!({ "kernel_order": kernel.len(), "span_order": k_elems.len() }),
    );

    // (iii) orders
    report.check(
        "order_product",
        gy.order() == sec_sorted.len() * k_elems.len() && gy.order() == gx_order * k_elems.len(),
        || json!({ "group": gy.order(), "section": sec_sorted.len(), "kernel": k_elems.len() }),
    );

    // (iv) λ_{s(g)}(f) = g·f, where (g·f)_{g(x)} = g·f_x
    let exhaustive = k_span.len() * n <= 100_000;
    report.metric("lambda_exhaustive", exhaustive);
    let fs: Vec<&Vec<Elem>> = if exhaustive {
        k_span.iter().collect()
    } else {
        phi_rows.iter().collect()
    };
    'outer: for z in 0..n {
        let g = m.sigma_gen[z];
        let sg = section_of[&g];
        for f in &fs {
            let mut moved: Vec<Elem> = (0..n).map(|x| m.zero(x)).collect();
            for x in 0..n {
                moved[m.group.apply(g, x)] = m.act(g, x, &f[x]);
            }
            let tf = find(&translation(f)).expect("translation in group");
            let expected = find(&translation(&moved));
            if Some(brace.lambda_of(sg, tf)) != expected {
                report.check("lambda_section", false, || json!({ "z": z, "f": f }));
                break 'outer;
            }
        }
    }
    Ok(report)
}

/// `f∘Φ` for a module automorphism `f` given by one matrix per component.
pub fn transport_by_module_iso(
    m: &GradedModule,
    phi: &Cocycle,
    f: &[Matrix],
) -> Result<Cocycle, ExtensionError> {
    phi.check_shape(m)?;
    let n = m.base.n();
    if f.len() != n {
        return Err(ExtensionError::Shape(format!("need {n} matrices")));
    }
    let apply = |x: usize, a: &[u64]| apply_matrix(&f[x], a, &m.components[x]);
    for x in 0..n {
        let k = m.components[x].len();
        if f[x].len() != k || f[x].iter().any(|r| r.len() != k) {
            return Err(ExtensionError::Shape(format!("matrix {x} must be {k}×{k}")));
        }
        let images: std::collections::HashSet<Elem> =
            m.elements(x).iter().map(|a| apply(x, a)).collect();
        if images.len() != m.component_size(x) {
            return Err(ExtensionError::NotModuleIso(format!(
                "component {x} is not mapped bijectively"
            )));
        }
        for z in 0..n {
            let t = m.base.op(z, x);
            for a in m.elements(x) {
                if apply(t, &m.act_sigma(z, x, &a)) != m.act_sigma(z, x, &apply(x, &a)) {
                    return Err(ExtensionError::NotModuleIso(format!(
                        "does not commute with σ_{z} on A_{x}"
                    )));
                }
            }
        }
    }
    Ok(Cocycle {
        values: (0..n * n).map(|i| apply(i % n, &phi.values[i])).collect(),
    })
}

/// First triple violating `Γ(x,z) + Γ(x∗y,x∗z) = Γ(y,z) + Γ(y∗x,y∗z)`.
pub fn lv_cocycle_witness(gamma: &GammaMap) -> Option<(usize, usize, usize)> {
    let x = &gamma.base;
    let n = x.n();
    let v = |a: usize, b: usize| &gamma.values[a * n + b];
    let add = |a: &[u64], b: &[u64]| -> Elem {
        a.iter()
            .zip(b)
            .zip(&gamma.orders)
            .map(|((&p, &q), &d)| (p + q) % d)
            .collect()
    };
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let lhs = add(v(a, c), v(x.op(a, b), x.op(a, c)));
                let rhs = add(v(b, c), v(x.op(b, a), x.op(b, c)));
                if lhs != rhs {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

pub fn is_lv_cocycle(gamma: &GammaMap) -> bool {
    lv_cocycle_witness(gamma).is_none()
}

/// First triple violating `Φ(x,z) + λ_x·Φ(x∗y,x∗z) = Φ(y,z) + λ_y·Φ(y∗x,y∗z)`.
pub fn twisted_cocycle_witness(m: &GradedModule, phi: &Cocycle) -> Option<(usize, usize, usize)> {
    let x = &m.base;
    let n = x.n();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let (ab, ac, ba, bc) = (x.op(a, b), x.op(a, c), x.op(b, a), x.op(b, c));
                let lhs = m.add(
                    c,
                    phi.get(n, a, c),
                    &m.act_lambda(a, ac, phi.get(n, ab, ac)),
                );
                let rhs = m.add(
                    c,
                    phi.get(n, b, c),
                    &m.act_lambda(b, bc, phi.get(n, ba, bc)),
                );
                if lhs != rhs {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

pub fn is_twisted_cocycle(m: &GradedModule, phi: &Cocycle) -> bool {
    twisted_cocycle_witness(m, phi).is_none()
}

/// The coboundary-shifted cocycle `Φ(x,y) − (c_y − λ_x·c_{x∗y})`.
pub fn shift_by_coboundary(m: &GradedModule, phi: &Cocycle, c: &[Elem]) -> Cocycle {
    let n = m.base.n();
    Cocycle {
        values: (0..n * n)
            .map(|i| {
                let (x, y) = (i / n, i % n);
                let cob = m.sub(
                    y,
                    &c[y],
                    &m.act_lambda(x, m.base.op(x, y), &c[m.base.op(x, y)]),
                );
                m.sub(y, &phi.values[i], &cob)
            })
            .collect(),
    }
}

/// A family `c_x ∈ A_x` with `Φ(x,y) − Γ(x,y) = c_y − λ_x·c_{x∗y}`, if one exists.
///
/// The relation reads `c_{x∗y} = σ_x·(c_y − (Φ−Γ)(x,y))`, so `c` is determined
/// on each orbit of 𝒢(X) by its value at one point. Every value at the orbit
/// representative is tried, and the first consistent family is returned.
pub fn cohomologous(
    m: &GradedModule,
    phi: &Cocycle,
    gamma: &Cocycle,
) -> Result<Option<Vec<Elem>>, ExtensionError> {
    phi.check_shape(m)?;
    gamma.check_shape(m)?;
    let x = &m.base;
    let n = x.n();
    let diff: Vec<Elem> = (0..n * n)
        .map(|i| m.sub(i % n, &phi.values[i], &gamma.values[i]))
        .collect();
    let mut c: Vec<Option<Elem>> = vec![None; n];
    for rep in 0..n {
        if c[rep].is_some() {
            continue;
        }
        let mut found = None;
        for start in m.elements(rep) {
            let mut trial: Vec<Option<Elem>> = c.clone();
            trial[rep] = Some(start);
            let mut queue = VecDeque::from([rep]);
            let mut ok = true;
            'bfs: while let Some(y) = queue.pop_front() {
                for z in 0..n {
                    let t = x.op(z, y);
                    let cy = trial[y].clone().unwrap();
                    let v = m.act_sigma(z, y, &m.sub(y, &cy, &diff[z * n + y]));
                    match &trial[t] {
                        None => {
                            trial[t] = Some(v);
                            queue.push_back(t);
                        }
                        Some(w) if *w != v => {
                            ok = false;
                            break 'bfs;
                        }
                        _ => {}
                    }
                }
            }
            if ok {
                found = Some(trial);
                break;
            }
        }
        match found {
            Some(t) => c = t,
            None => return Ok(None),
        }
    }
    let c: Vec<Elem> = c.into_iter().map(|v| v.unwrap()).collect();
    if shift_by_coboundary(m, phi, &c) != *gamma {
        return Err(ExtensionError::VerificationFailed(
            "coboundary does not reproduce Γ".into(),
        ));
    }
    if let (Ok((a, _)), Ok((b, _))) = (general_extension(m, phi), general_extension(m, gamma)) {
        let map = coboundary_equivalence(m, &c);
        if CycleSetHom::new(a, b, map).is_err() {
            return Err(ExtensionError::VerificationFailed(
                "(x,a) ↦ (x, a + c_x) is not a homomorphism".into(),
            ));
        }
    }
    Ok(Some(c))
}

/// `(x,a) ↦ (x, a + c_x)` on the scattering, which carries the extension of Φ
/// onto that of `Φ − (c_y − λ_x·c_{x∗y})`.
pub fn coboundary_equivalence(m: &GradedModule, c: &[Elem]) -> Vec<usize> {
    (0..m.scatter_size())
        .map(|i| {
            let (x, a) = m.unpoint(i);
            m.point(x, &m.add(x, &a, &c[x]))
        })
        .collect()
}

/// The equivariant cocycle cohomologous to Φ, found by trying every family
/// `c`; more than one distinct answer is an error.
pub fn equivariant_representative(
    m: &GradedModule,
    phi: &Cocycle,
) -> Result<Cocycle, ExtensionError> {
    phi.check_shape(m)?;
    if let Some((x, y, z)) = twisted_cocycle_witness(m, phi) {
        return Err(ExtensionError::NotATwistedCocycle { x, y, z });
    }
    check_coprime(m)?;
    let n = m.base.n();
    let total: u128 = (0..n).map(|x| m.component_size(x) as u128).product();
    if total > 1_000_000 {
        return Err(ExtensionError::SearchTooLarge(total));
    }
    let mut found: Vec<Cocycle> = Vec::new();
    let mut c: Vec<Elem> = (0..n).map(|x| m.zero(x)).collect();
    for idx in 0..total {
        let mut rest = idx;
        for x in (0..n).rev() {
            let s = m.component_size(x) as u128;
            c[x] = m.decode(x, (rest % s) as usize);
            rest /= s;
        }
        let g = shift_by_coboundary(m, phi, &c);
        if check_equivariance(m, &g, false) && !found.contains(&g) {
            found.push(g);
        }
    }
    match found.len() {
        0 => Err(ExtensionError::NoRepresentativeFound),
        1 => Ok(found.pop().unwrap()),
        count => Err(ExtensionError::NotUnique { count }),
    }
}

/// File form of a module with one or two maps on it:
/// `{"base", "components", "action_gens"?, "phi", "gamma"?}`.
///
/// `action_gens` maps a generator index `z` to the matrices of `σ_z` on each
/// `A_x`; a missing index borrows the matrices of an index with the same `σ`.
/// Without `action_gens` every generator acts by identity matrices.
/// `phi[x][y]` lists the residues of `Φ(x,y) ∈ A_y`.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionSpec {
    pub base: CycleSet,
    pub components: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_gens: Option<std::collections::BTreeMap<String, Vec<Matrix>>>,
    pub phi: Vec<Vec<Elem>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<Vec<Elem>>>,
}

impl ExtensionSpec {
    pub fn module(&self) -> Result<GradedModule, ExtensionError> {
        let n = self.base.n();
        if self.components.len() != n {
            return Err(ExtensionError::Shape(format!("expected {n} components")));
        }
        let gens: Vec<Vec<Matrix>> = match &self.action_gens {
            None => (0..n)
                .map(|_| {
                    (0..n)
                        .map(|x| identity_matrix(self.components[x].len()))
                        .collect()
                })
                .collect(),
            Some(map) => {
                let mut given: Vec<Option<Vec<Matrix>>> = vec![None; n];
                for (k, v) in map {
                    let z: usize = k.parse().ok().filter(|&z| z < n).ok_or_else(|| {
                        ExtensionError::Shape(format!("bad generator index {k:?}"))
                    })?;
                    given[z] = Some(v.clone());
                }
                (0..n)
                    .map(|z| {
                        given[z]
                            .clone()
                            .or_else(|| {
                                (0..n)
                                    .find(|&w| {
                                        given[w].is_some() && self.base.row(w) == self.base.row(z)
                                    })
                                    .and_then(|w| given[w].clone())
                            })
                            .ok_or_else(|| {
                                ExtensionError::Shape(format!("no matrices for generator {z}"))
                            })
                    })
                    .collect::<Result<_, _>>()?
            }
        };
        GradedModule::new(self.base.clone(), self.components.clone(), gens)
    }

    fn cocycle_of(&self, m: &GradedModule, rows: &[Vec<Elem>]) -> Result<Cocycle, ExtensionError> {
        let n = self.base.n();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(ExtensionError::Shape(format!("maps must be {n}×{n}")));
        }
        let c = Cocycle {
            values: rows.iter().flatten().cloned().collect(),
        };
        c.check_shape(m)?;
        Ok(Cocycle {
            values: (0..n * n).map(|i| m.reduce(i % n, &c.values[i])).collect(),
        })
    }

    pub fn phi(&self, m: &GradedModule) -> Result<Cocycle, ExtensionError> {
        self.cocycle_of(m, &self.phi)
    }

    pub fn gamma(&self, m: &GradedModule) -> Result<Option<Cocycle>, ExtensionError> {
        self.gamma
            .as_ref()
            .map(|g| self.cocycle_of(m, g))
            .transpose()
    }
}

/// `phi[x][y]` rows of a cocycle, the inverse of [`ExtensionSpec::phi`].
pub fn cocycle_rows(m: &GradedModule, phi: &Cocycle) -> Vec<Vec<Elem>> {
    let n = m.base.n();
    (0..n)
        .map(|x| (0..n).map(|y| phi.get(n, x, y).clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{build_pq, cyclic_cycle_set, PqSpec};
    use crate::structure::{extensions_equivalent, is_coprime_extension, is_extension};

    fn z2_z3() -> (GradedModule, CycleSet) {
        let base = cyclic_cycle_set(2);
        (GradedModule::permutation_module(&base, &[3]), base)
    }

    #[test]
    fn permutation_module_is_valid() {
        let (m, _) = z2_z3();
        assert!(validate_graded_module(&m).passed());
        assert_eq!(m.scatter_size(), 6);
        assert_eq!(m.point(1, &[2]), 5);
        assert_eq!(m.unpoint(4), (1, vec![1]));
    }

    #[test]
    fn invalid_modules_are_reported() {
        let base = cyclic_cycle_set(2);
        let singular = vec![
            vec![vec![vec![0u64]], vec![vec![1]]],
            vec![vec![vec![1]], vec![vec![1]]],
        ];
        let r = validate_graded_module(
            &GradedModule::unchecked(base.clone(), vec![vec![3], vec![3]], singular).unwrap(),
        );
        assert!(r.witnesses.iter().any(|w| w["check"] == "invertibility"));
        // σ_0 = σ_1 but the two generators act differently: inconsistent.
        let clash = vec![
            vec![vec![vec![1u64]], vec![vec![1]]],
            vec![vec![vec![2]], vec![vec![2]]],
        ];
        let r = validate_graded_module(
            &GradedModule::unchecked(base, vec![vec![3], vec![3]], clash).unwrap(),
        );
        assert!(!r.passed());
    }

    #[test]
    fn sign_module_on_z2() {
        // σ acts by −1 on Z_3: σ² = id acts by +1, consistent.
        let base = cyclic_cycle_set(2);
        let gens = vec![vec![vec![vec![2u64]]; 2]; 2];
        let m = GradedModule::new(base, vec![vec![3], vec![3]], gens).unwrap();
        assert_eq!(m.act_sigma(0, 0, &[1]), vec![2]);
        assert_eq!(m.act_lambda(0, 0, &[1]), vec![2]);
    }

    #[test]
    fn pq_via_twisted_and_parallel_routes() {
        let (m, base) = z2_z3();
        let g0 = [0u64, 1];
        let phi = Cocycle::from_fn(&m, |x, y| vec![g0[(y + 2 - x) % 2]]);
        assert!(check_equivariance(&m, &phi, true));
        let (ext, proj) = twisted_extension(&m, &phi).unwrap();
        let built = build_pq(&PqSpec::new(2, 3, g0.to_vec())).unwrap();
        assert_eq!(ext, built);
        assert!(is_extension(&proj).unwrap());
        assert!(is_coprime_extension(&proj).unwrap());
        let gamma = GammaMap::from_fn(&base, &[3], |x, y| vec![g0[(y + 2 - x) % 2]]);
        assert_eq!(parallel_extension(&gamma).unwrap().0, built);
        assert!(is_lv_cocycle(&gamma));
        assert!(indecomposability_criterion(&m, &phi).unwrap());
    }

    #[test]
    fn parallel_on_z3_by_z2() {
        let base = cyclic_cycle_set(3);
        let g0 = [0u64, 1, 1];
        let gamma = GammaMap::from_fn(&base, &[2], |x, y| vec![g0[(y + 3 - x) % 3]]);
        let (ext, _) = parallel_extension(&gamma).unwrap();
        assert_eq!(ext.n(), 6);
        assert!(is_indecomposable(&ext));
        let bad = GammaMap::from_fn(&base, &[2], |x, _| vec![u64::from(x == 0)]);
        assert!(matches!(
            parallel_extension(&bad),
            Err(ExtensionError::InvarianceViolation { .. })
        ));
    }

    #[test]
    fn lv_cocycle_examples() {
        let base = cyclic_cycle_set(3);
        assert!(is_lv_cocycle(&GammaMap::from_fn(&base, &[3], |_, _| vec![
            0
        ])));
        let delta = GammaMap::from_fn(&base, &[3], |x, _| vec![u64::from(x == 0)]);
        assert!(!is_lv_cocycle(&delta));
    }

    #[test]
    fn zero_cocycle() {
        let (m, _) = z2_z3();
        let zero = Cocycle::zero(&m);
        assert!(check_equivariance(&m, &zero, true));
        assert!(is_twisted_cocycle(&m, &zero));
        let (ext, _) = twisted_extension(&m, &zero).unwrap();
        assert!(!is_indecomposable(&ext));
        assert!(!indecomposability_criterion(&m, &zero).unwrap());
        assert_eq!(equivariant_representative(&m, &zero).unwrap(), zero);
        assert_eq!(
            cohomologous(&m, &zero, &zero).unwrap().unwrap(),
            vec![vec![0], vec![0]]
        );
    }

    #[test]
    fn non_equivariant_rejected() {
        let (m, _) = z2_z3();
        let phi = Cocycle::from_fn(&m, |x, y| vec![u64::from(x == 0 && y == 0)]);
        assert!(!check_equivariance(&m, &phi, false));
        assert!(matches!(
            twisted_extension(&m, &phi),
            Err(ExtensionError::EquivarianceViolation { .. })
        ));
    }

    #[test]
    fn phi0_reconstruction() {
        let (m, _) = z2_z3();
        let phi = phi_from_phi0(&m, 0, &[vec![0], vec![1]]).unwrap();
        assert_eq!(*phi.get(2, 1, 0), vec![1]);
        assert_eq!(*phi.get(2, 1, 1), vec![0]);
        let zero = phi_from_phi0(&m, 0, &[vec![0], vec![0]]).unwrap();
        assert_eq!(zero, Cocycle::zero(&m));

        // A non-uniconnected base: pq with Γ⁰ = (0,1) and trivial A = Z_5.
        let base = build_pq(&PqSpec::new(2, 3, vec![0, 1])).unwrap();
        let m = GradedModule::permutation_module(&base, &[5]);
        let ok: Vec<Elem> = (0..6)
            .map(|y| vec![if y < 3 { y as u64 } else { 4 }])
            .collect();
        assert!(phi_from_phi0(&m, 0, &ok).is_ok());
        let bad: Vec<Elem> = (0..6).map(|y| vec![y as u64]).collect();
        assert!(matches!(
            phi_from_phi0(&m, 0, &bad),
            Err(ExtensionError::NotPi1Equivariant { .. })
        ));
    }

    #[test]
    fn semidirect_on_size_six() {
        let (m, _) = z2_z3();
        for (g0, order, k) in [([0u64, 1], 18, 9), ([1, 2], 6, 3)] {
            let phi = Cocycle::from_fn(&m, |x, y| vec![g0[(y + 2 - x) % 2]]);
            let r = semidirect_check(&m, &phi, DEFAULT_SIZE_LIMIT).unwrap();
            assert!(r.passed(), "{:?}", r.witnesses);
            assert_eq!(r.metrics["group_order"], order);
            assert_eq!(r.metrics["kernel_order"], k);
        }
        assert!(matches!(
            semidirect_check(&m, &Cocycle::zero(&m), DEFAULT_SIZE_LIMIT),
            Err(ExtensionError::Precondition(_))
        ));
    }

    #[test]
    fn transport_by_scaling() {
        let (m, _) = z2_z3();
        let phi = Cocycle::from_fn(&m, |x, y| vec![[0u64, 1][(y + 2 - x) % 2]]);
        let f = vec![vec![vec![2u64]]; 2];
        let psi = transport_by_module_iso(&m, &phi, &f).unwrap();
        assert_eq!(
            psi,
            Cocycle::from_fn(&m, |x, y| vec![[0u64, 2][(y + 2 - x) % 2]])
        );
        let (a, pa) = twisted_extension(&m, &phi).unwrap();
        let (b, pb) = twisted_extension(&m, &psi).unwrap();
        let iota = extensions_equivalent(&pa, &pb).unwrap();
        assert_eq!(iota.len(), a.n());
        assert_eq!(b.n(), 6);
        let id = vec![vec![vec![1u64]]; 2];
        assert_eq!(transport_by_module_iso(&m, &phi, &id).unwrap(), phi);
        let zero = vec![vec![vec![0u64]]; 2];
        assert!(matches!(
            transport_by_module_iso(&m, &phi, &zero),
            Err(ExtensionError::NotModuleIso(_))
        ));
    }

    #[test]
    fn coboundary_round_trip() {
        let (m, _) = z2_z3();
        let gamma = Cocycle::from_fn(&m, |x, y| vec![[0u64, 1][(y + 2 - x) % 2]]);
        let c = vec![vec![1u64], vec![2]];
        let phi = shift_by_coboundary(&m, &gamma, &c);
        assert!(is_twisted_cocycle(&m, &phi));
        let found = cohomologous(&m, &phi, &gamma).unwrap().unwrap();
        assert_eq!(shift_by_coboundary(&m, &phi, &found), gamma);
        assert_eq!(equivariant_representative(&m, &phi).unwrap(), gamma);
        let other = Cocycle::from_fn(&m, |x, y| vec![[1u64, 2][(y + 2 - x) % 2]]);
        assert!(cohomologous(&m, &gamma, &other).unwrap().is_none());
    }
}
