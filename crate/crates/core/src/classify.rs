//! Constructors and enumerators for indecomposable cycle sets of size `p`,
//! `pq` and `pqr` (distinct primes).
//!
//! Elements of `Z_m × Z_k` are flattened as `x·k + a`, and elements of
//! `Z_p × Z_q × Z_r` as `(x·q + a)·r + s`.

use crate::brace::BraceError;
use crate::cycle_set::{CycleSet, CycleSetError};
use crate::extension::{phi_from_phi0, twisted_extension, Elem, ExtensionError, GradedModule};
use crate::group::{group_order, GroupError};
use crate::iso::{canonical_form, CanonicalForm};
use crate::modular::{
    gcd, inv_mod, is_prime, pow_mod, prime_factors, span_basis, span_elements,
    subspace_vanishing_on,
};
use crate::perm::Permutation;
use crate::structure::{
    is_coprime_extension, is_indecomposable, mpl, retraction, retraction_sizes, Mpl, StructureError,
};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;

#[derive(Debug, Clone, thiserror::Error)]
pub enum ClassifyError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("values of Γ⁰ do not generate Z_k")]
    NotGenerating,
    #[error("Γ⁰ is periodic, so the result would not have multipermutation level 2")]
    Periodic,
    #[error("Φ⁰ is constant")]
    ConstantPhi0,
    #[error("ξ must satisfy ξ^p = 1 and ξ ≠ 1 in Z_q")]
    BadXi,
    #[error("Φ₁⁰ and Φ₂⁰ are both identically zero")]
    BothPhiZero,
    #[error("Γ⁰ is proportional to a character; use the uniconnected family")]
    CharacterProportional,
    #[error("Γ⁰ takes no unit value")]
    NoUnitValue,
    #[error("χ is trivial on K₀")]
    TrivialChi,
    #[error("all coefficients c_x vanish on 𝒩_χ")]
    AllCZero,
    #[error("coefficient c_{x} is nonzero but {x} is not in 𝒩_χ")]
    CoefficientOutsideNChi { x: usize },
    #[error("{x} is not in 𝒩_χ")]
    NotInNChi { x: usize },
    #[error("φ_{x}⁰ is not well defined at value {a}")]
    WellDefinednessFailure { x: usize, a: u64 },
    #[error("constructed table is not a cycle set: {0}")]
    NotACycleSet(#[from] CycleSetError),
    #[error(transparent)]
    Brace(Box<BraceError>),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
}

/// `x ∗ y = y + 1` on `Z_n`.
pub fn cyclic_cycle_set(n: usize) -> CycleSet {
    assert!(n >= 1);
    CycleSet::from_fn(n, |_, y| (y + 1) % n).expect("cyclic cycle set")
}

fn check_prime(p: u64, name: &str) -> Result<(), ClassifyError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(ClassifyError::InvalidParameters(format!(
            "{name} = {p} is not prime"
        )))
    }
}

fn check_len(v: &[u64], len: usize, name: &str) -> Result<(), ClassifyError> {
    if v.len() == len {
        Ok(())
    } else {
        Err(ClassifyError::InvalidParameters(format!(
            "{name} has {} entries, expected {len}",
            v.len()
        )))
    }
}

fn reduce(v: &[u64], m: u64) -> Vec<u64> {
    v.iter().map(|&a| a % m).collect()
}

/// `(x,a) ∗ (y,b) = (y+1, b + Γ⁰(y−x))` on `Z_m × Z_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PqSpec {
    pub m: usize,
    pub k: usize,
    pub gamma0: Vec<u64>,
}

impl PqSpec {
    pub fn new(m: usize, k: usize, gamma0: Vec<u64>) -> PqSpec {
        PqSpec { m, k, gamma0 }
    }

    pub fn validate(&self) -> Result<(), ClassifyError> {
        if self.m == 0 || self.k == 0 || gcd(self.m as u64, self.k as u64) != 1 {
            return Err(ClassifyError::InvalidParameters(format!(
                "m = {} and k = {} must be coprime positive integers",
                self.m, self.k
            )));
        }
        check_len(&self.gamma0, self.m, "gamma0")?;
        check_gamma0(&reduce(&self.gamma0, self.k as u64), self.k as u64)
    }
}

fn check_gamma0(g: &[u64], k: u64) -> Result<(), ClassifyError> {
    if g.iter().fold(k, |acc, &v| gcd(acc, v)) != 1 {
        return Err(ClassifyError::NotGenerating);
    }
    let m = g.len();
    if (1..m).any(|d| (0..m).all(|x| g[(x + d) % m] == g[x])) {
        return Err(ClassifyError::Periodic);
    }
    Ok(())
}

pub fn build_pq(spec: &PqSpec) -> Result<CycleSet, ClassifyError> {
    spec.validate()?;
    let (m, k) = (spec.m, spec.k);
    let g = reduce(&spec.gamma0, k as u64);
    pq_table(m, k, &g)
}

fn pq_table(m: usize, k: usize, g: &[u64]) -> Result<CycleSet, ClassifyError> {
    let n = m * k;
    let mut t = vec![0u32; n * n];
    for u in 0..n {
        let x = u / k;
        for v in 0..n {
            let (y, b) = (v / k, v % k);
            let y1 = (y + 1) % m;
            let b1 = (b + g[(y + m - x) % m] as usize) % k;
            t[u * n + v] = (y1 * k + b1) as u32;
        }
    }
    Ok(CycleSet::from_flat(n, t)?)
}

/// `(α, ξ)` with `Γ⁰(x) = α·ξ^x` and `ξ^p = 1`, if such a pair exists.
pub fn is_character_proportional(gamma0: &[u64], p: u64, q: u64) -> Option<(u64, u64)> {
    let g = reduce(gamma0, q);
    let alpha = g[0];
    if alpha == 0 {
        return None;
    }
    (1..q)
        .filter(|&xi| pow_mod(xi, p, q) == 1)
        .find(|&xi| (0..g.len()).all(|x| g[x] == alpha * pow_mod(xi, x as u64, q) % q))
        .map(|xi| (alpha, xi))
}

/// `(x,a,s) ∗ (y,b,t) = (y+1, b + ξ^{y−x}, t + Φ⁰(y−x, b − ξ^{y−x}·a))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PqrUniSpec {
    pub p: u64,
    pub q: u64,
    pub r: u64,
    pub xi: u64,
    /// `Φ⁰(x, a)` at index `x·q + a`.
    pub phi0: Vec<u64>,
}

fn check_distinct_primes(p: u64, q: u64, r: u64) -> Result<(), ClassifyError> {
    check_prime(p, "p")?;
    check_prime(q, "q")?;
    check_prime(r, "r")?;
    if p == q || q == r || p == r {
        return Err(ClassifyError::InvalidParameters(
            "p, q, r must be distinct".into(),
        ));
    }
    Ok(())
}

pub fn build_pqr_uniconnected(spec: &PqrUniSpec) -> Result<CycleSet, ClassifyError> {
    let (p, q, r) = (spec.p, spec.q, spec.r);
    check_distinct_primes(p, q, r)?;
    check_len(&spec.phi0, (p * q) as usize, "phi0")?;
    let xi = spec.xi % q;
    if xi == 1 || pow_mod(xi, p, q) != 1 {
        return Err(ClassifyError::BadXi);
    }
    let phi0 = reduce(&spec.phi0, r);
    if phi0.iter().all(|&v| v == phi0[0]) {
        return Err(ClassifyError::ConstantPhi0);
    }
    let powers: Vec<u64> = (0..p).map(|d| pow_mod(xi, d, q)).collect();
    pqr_table(p, q, r, |x, a, _s, y, b, t| {
        let d = (y + p - x) % p;
        let w = powers[d as usize];
        let b2 = (b + q - w * a % q) % q;
        (
            (y + 1) % p,
            (b + w) % q,
            (t + phi0[(d * q + b2) as usize]) % r,
        )
    })
}

fn pqr_table(
    p: u64,
    q: u64,
    r: u64,
    f: impl Fn(u64, u64, u64, u64, u64, u64) -> (u64, u64, u64),
) -> Result<CycleSet, ClassifyError> {
    let n = (p * q * r) as usize;
    let split = |u: usize| {
        let u = u as u64;
        (u / (q * r), (u / r) % q, u % r)
    };
    let mut t = vec![0u32; n * n];
    for u in 0..n {
        let (x, a, s) = split(u);
        for v in 0..n {
            let (y, b, c) = split(v);
            let (x2, a2, s2) = f(x, a, s, y, b, c);
            t[u * n + v] = ((x2 * q + a2) * r + s2) as u32;
        }
    }
    Ok(CycleSet::from_flat(n, t)?)
}

/// Nonuniconnected retraction with Φ⁰ a permutation-module map:
/// third coordinate `t + Φ₁⁰(b−a)` if `x = y`, else `t + Φ₂⁰(y−x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PqrCase1Spec {
    pub p: u64,
    pub q: u64,
    pub r: u64,
    pub gamma0: Vec<u64>,
    pub phi1: Vec<u64>,
    /// `Φ₂⁰(d)` at index `d − 1` for `d = 1, …, p−1`.
    pub phi2: Vec<u64>,
}

fn check_retraction_gamma(p: u64, q: u64, gamma0: &[u64]) -> Result<Vec<u64>, ClassifyError> {
    check_len(gamma0, p as usize, "gamma0")?;
    let g = reduce(gamma0, q);
    check_gamma0(&g, q)?;
    if is_character_proportional(&g, p, q).is_some() {
        return Err(ClassifyError::CharacterProportional);
    }
    Ok(g)
}

pub fn build_pqr_case1(spec: &PqrCase1Spec) -> Result<CycleSet, ClassifyError> {
    let (p, q, r) = (spec.p, spec.q, spec.r);
    check_distinct_primes(p, q, r)?;
    let g = check_retraction_gamma(p, q, &spec.gamma0)?;
    check_len(&spec.phi1, q as usize, "phi1")?;
    check_len(&spec.phi2, p as usize - 1, "phi2")?;
    let phi1 = reduce(&spec.phi1, r);
    let phi2 = reduce(&spec.phi2, r);
    if phi1.iter().chain(&phi2).all(|&v| v == 0) {
        return Err(ClassifyError::BothPhiZero);
    }
    pqr_table(p, q, r, |x, a, _s, y, b, t| {
        let d = (y + p - x) % p;
        let third = if d == 0 {
            phi1[((b + q - a) % q) as usize]
        } else {
            phi2[d as usize - 1]
        };
        ((y + 1) % p, (b + g[d as usize]) % q, (t + third) % r)
    })
}

/// `χ_x(f) = ∏_{y ∈ Z_p^∗} ξ_y^{f(y+x)} mod r`, with `ξ_y = xi[y−1]`.
pub fn chi_x(xi: &[u64], x: usize, f: &[u64], r: u64) -> u64 {
    let p = f.len();
    (1..p).fold(1, |acc, y| acc * pow_mod(xi[y - 1], f[(y + x) % p], r) % r)
}

/// `Γ_x(y) = Γ⁰(y−x)`.
pub fn gamma_shift(gamma0: &[u64], x: usize) -> Vec<u64> {
    let p = gamma0.len();
    (0..p).map(|y| gamma0[(y + p - x) % p]).collect()
}

/// Basis of `K = ⟨Γ_x⟩ ≤ Z_q^{Z_p}`.
pub fn k_basis(gamma0: &[u64], q: u64) -> Vec<Vec<u64>> {
    let shifts: Vec<Vec<u64>> = (0..gamma0.len()).map(|x| gamma_shift(gamma0, x)).collect();
    span_basis(&shifts, q)
}

/// Basis of `K₀ = {f ∈ K : f(0) = 0}`.
pub fn k0_basis(gamma0: &[u64], q: u64) -> Vec<Vec<u64>> {
    subspace_vanishing_on(&k_basis(gamma0, q), &[0], q)
}

/// `𝒩_χ = {x : f ∈ K₀, f(x) = 0 ⇒ χ_x(f) = 1}`.
pub fn n_chi(k0: &[Vec<u64>], xi: &[u64], p: usize, q: u64, r: u64) -> Vec<usize> {
    (0..p)
        .filter(|&x| {
            if k0.is_empty() {
                return true;
            }
            subspace_vanishing_on(k0, &[x], q)
                .iter()
                .all(|f| chi_x(xi, x, f, r) == 1)
        })
        .collect()
}

/// `φ_x⁰` as a table indexed by `y·q + a`.
pub fn phi_x0_map(
    x: usize,
    xi: &[u64],
    k0: &[Vec<u64>],
    p: usize,
    q: u64,
    r: u64,
) -> Result<Vec<u64>, ClassifyError> {
    if !n_chi(k0, xi, p, q, r).contains(&x) {
        return Err(ClassifyError::NotInNChi { x });
    }
    let mut values: Vec<Option<u64>> = vec![None; q as usize];
    for f in span_elements(k0, p, q) {
        let a = f[x];
        let v = chi_x(xi, x, &f, r);
        match values[a as usize] {
            None => values[a as usize] = Some(v),
            Some(w) if w != v => return Err(ClassifyError::WellDefinednessFailure { x, a }),
            _ => {}
        }
    }
    let mut out = vec![0u64; p * q as usize];
    for a in 0..q {
        out[x * q as usize + a as usize] =
            values[a as usize].ok_or(ClassifyError::WellDefinednessFailure { x, a })?;
    }
    Ok(out)
}

/// Nonuniconnected retraction with a twisted module given by the character
/// values `ξ_y` (`y = 1, …, p−1`) and coefficients `c_x` on `𝒩_χ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PqrCase2Spec {
    pub p: u64,
    pub q: u64,
    pub r: u64,
    pub gamma0: Vec<u64>,
    pub xi: Vec<u64>,
    pub c: Vec<u64>,
}

/// Derived data of a case-2 specification after normalization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Case2Data {
    pub gamma0: Vec<u64>,
    pub x0: usize,
    pub k0: Vec<Vec<u64>>,
    pub n_chi: Vec<usize>,
    pub phi0: Vec<u64>,
}

/// Rescales `Γ⁰` so that `1` is a value and picks the least `x₀` with `Γ⁰(−x₀) = 1`.
pub fn normalize_gamma0(gamma0: &[u64], q: u64) -> Result<(Vec<u64>, usize), ClassifyError> {
    let p = gamma0.len();
    let mut g = reduce(gamma0, q);
    if !g.contains(&1) {
        let first = *g
            .iter()
            .find(|&&v| v != 0)
            .ok_or(ClassifyError::NoUnitValue)?;
        let inv = inv_mod(first, q).ok_or(ClassifyError::NoUnitValue)?;
        g = g.iter().map(|&v| v * inv % q).collect();
    }
    let x0 = (0..p)
        .find(|&x| g[(p - x) % p] == 1)
        .ok_or(ClassifyError::NoUnitValue)?;
    Ok((g, x0))
}

impl PqrCase2Spec {
    pub fn data(&self) -> Result<Case2Data, ClassifyError> {
        let (p, q, r) = (self.p, self.q, self.r);
        check_distinct_primes(p, q, r)?;
        check_retraction_gamma(p, q, &self.gamma0)?;
        let (g, x0) = normalize_gamma0(&self.gamma0, q)?;
        check_len(&self.xi, p as usize - 1, "xi")?;
        check_len(&self.c, p as usize, "c")?;
        let xi = reduce(&self.xi, r);
        if xi.iter().any(|&z| pow_mod(z, q, r) != 1) {
            return Err(ClassifyError::BadXi);
        }
        let c = reduce(&self.c, r);
        let k0 = k0_basis(&g, q);
        let n = n_chi(&k0, &xi, p as usize, q, r);
        if n.contains(&0) {
            return Err(ClassifyError::TrivialChi);
        }
        if let Some(x) = (0..p as usize).find(|&x| c[x] != 0 && !n.contains(&x)) {
            return Err(ClassifyError::CoefficientOutsideNChi { x });
        }
        if n.iter().all(|&x| c[x] == 0) {
            return Err(ClassifyError::AllCZero);
        }
        let mut phi0 = vec![0u64; (p * q) as usize];
        for &x in &n {
            let phi = phi_x0_map(x, &xi, &k0, p as usize, q, r)?;
            for (acc, v) in phi0.iter_mut().zip(phi) {
                *acc = (*acc + c[x] * v) % r;
            }
        }
        Ok(Case2Data {
            gamma0: g,
            x0,
            k0,
            n_chi: n,
            phi0,
        })
    }
}

/// Third coordinate `χ_y(Γ_x)·(t + χ_{y−x}(a·Γ_{x₀})·Φ⁰(y−x, b − a·Γ_{x₀}(y−x)))`.
pub fn build_pqr_case2(spec: &PqrCase2Spec) -> Result<CycleSet, ClassifyError> {
    let data = spec.data()?;
    let (p, q, r) = (spec.p, spec.q, spec.r);
    let pu = p as usize;
    let xi = reduce(&spec.xi, r);
    let g = &data.gamma0;
    let gx0 = gamma_shift(g, data.x0);
    // χ_y(Γ_x) for all x, y, and χ_d(a·Γ_{x₀}) for all d, a.
    let chi_gamma: Vec<Vec<u64>> = (0..pu)
        .map(|x| {
            let gx = gamma_shift(g, x);
            (0..pu).map(|y| chi_x(&xi, y, &gx, r)).collect()
        })
        .collect();
    let chi_scaled: Vec<Vec<u64>> = (0..pu)
        .map(|d| {
            (0..q)
                .map(|a| {
                    let f: Vec<u64> = gx0.iter().map(|&v| v * a % q).collect();
                    chi_x(&xi, d, &f, r)
                })
                .collect()
        })
        .collect();
    pqr_table(p, q, r, |x, a, _s, y, b, t| {
        let d = ((y + p - x) % p) as usize;
        let b2 = (b + q - a * gx0[d] % q) % q;
        let inner = (t + chi_scaled[d][a as usize] * data.phi0[d * q as usize + b2 as usize]) % r;
        let third = chi_gamma[x as usize][y as usize] * inner % r;
        ((y + 1) % p, (b + g[d]) % q, third)
    })
}

/// A pqr family member as `X⁽¹⁾ ⊗_Φ Z_r`: the module over the retraction and
/// `Φ⁰ = Φ((0,0), ·)`.
pub struct ModuleRoute {
    pub module: GradedModule,
    pub phi0: Vec<Elem>,
}

impl ModuleRoute {
    /// Rebuilds the cycle set from `Φ⁰` by equivariance.
    pub fn build(&self) -> Result<CycleSet, ClassifyError> {
        let phi = phi_from_phi0(&self.module, 0, &self.phi0)?;
        Ok(twisted_extension(&self.module, &phi)?.0)
    }
}

pub fn uniconnected_route(spec: &PqrUniSpec) -> Result<ModuleRoute, ClassifyError> {
    let (p, q, r) = (spec.p, spec.q, spec.r);
    check_distinct_primes(p, q, r)?;
    check_len(&spec.phi0, (p * q) as usize, "phi0")?;
    let xi = spec.xi % q;
    let base = CycleSet::from_fn((p * q) as usize, |u, v| {
        let x = u as u64 / q;
        let (y, b) = (v as u64 / q, v as u64 % q);
        (((y + 1) % p) * q + (b + pow_mod(xi, (y + p - x) % p, q)) % q) as usize
    })?;
    Ok(ModuleRoute {
        module: GradedModule::permutation_module(&base, &[r]),
        phi0: spec.phi0.iter().map(|&v| vec![v % r]).collect(),
    })
}

pub fn case1_route(spec: &PqrCase1Spec) -> Result<ModuleRoute, ClassifyError> {
    let (p, q, r) = (spec.p, spec.q, spec.r);
    check_distinct_primes(p, q, r)?;
    let g = check_retraction_gamma(p, q, &spec.gamma0)?;
    check_len(&spec.phi1, q as usize, "phi1")?;
    check_len(&spec.phi2, p as usize - 1, "phi2")?;
    let base = build_pq(&PqSpec::new(p as usize, q as usize, g))?;
    let phi0 = (0..(p * q) as usize)
        .map(|u| {
            let (y, b) = (u / q as usize, u % q as usize);
            vec![
                if y == 0 {
                    spec.phi1[b]
                } else {
                    spec.phi2[y - 1]
                } % r,
            ]
        })
        .collect();
    Ok(ModuleRoute {
        module: GradedModule::permutation_module(&base, &[r]),
        phi0,
    })
}

/// `σ_{(x,a)}` acts on `A_{(y,b)} = Z_r` by `χ_y(Γ_x)`.
pub fn case2_route(spec: &PqrCase2Spec) -> Result<ModuleRoute, ClassifyError> {
    let data = spec.data()?;
    let (p, q, r) = (spec.p as usize, spec.q as usize, spec.r);
    let xi = reduce(&spec.xi, r);
    let base = build_pq(&PqSpec::new(p, q, data.gamma0.clone()))?;
    let n = p * q;
    let gens = (0..n)
        .map(|z| {
            let gx = gamma_shift(&data.gamma0, z / q);
            (0..n)
                .map(|v| vec![vec![chi_x(&xi, v / q, &gx, r)]])
                .collect()
        })
        .collect();
    let module = GradedModule::new(base, vec![vec![r]; n], gens)?;
    Ok(ModuleRoute {
        module,
        phi0: data.phi0.iter().map(|&v| vec![v]).collect(),
    })
}

/// One classified cycle set with its invariants.
#[derive(Debug, Clone, Serialize)]
pub struct Member {
    #[serde(flatten)]
    pub cycle_set: CycleSet,
    pub mpl: Mpl,
    pub group_order: u64,
    pub socle_order: u64,
    pub uniconnected: bool,
    pub family: String,
    pub parameters: Value,
}

fn perm_group_order(x: &CycleSet) -> Result<u64, ClassifyError> {
    let gens: Vec<Permutation> = (0..x.n()).map(|e| x.sigma(e)).collect();
    let o = group_order(x.n(), &gens)?;
    u64::try_from(o).map_err(|_| ClassifyError::Group(GroupError::OrderOverflow))
}

/// Invariants of `x`, with `|Soc| = |𝒢(X)| / |𝒢(X⁽¹⁾)|`.
pub fn describe(x: &CycleSet, family: &str, parameters: Value) -> Result<Member, ClassifyError> {
    let order = perm_group_order(x)?;
    let (ret, _) = retraction(x)?;
    let ret_order = perm_group_order(&ret)?;
    Ok(Member {
        cycle_set: x.clone(),
        mpl: mpl(x)?,
        group_order: order,
        socle_order: order / ret_order,
        uniconnected: is_indecomposable(x) && order == x.n() as u64,
        family: family.to_string(),
        parameters,
    })
}

/// Lexicographic enumeration of `Z_m^len`.
pub fn vectors(len: usize, m: u64) -> impl Iterator<Item = Vec<u64>> {
    let mut cur: Option<Vec<u64>> = Some(vec![0; len]);
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut i = len;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            next[i] += 1;
            if next[i] < m {
                cur = Some(next);
                break;
            }
            next[i] = 0;
        }
        Some(out)
    })
}

fn first_nonzero_is_one(v: &[u64]) -> bool {
    v.iter().find(|&&a| a != 0) == Some(&1)
}

/// Collects candidates into canonical-form classes, keeping the first
/// parameters seen for each class.
#[derive(Default)]
struct Classes {
    seen: BTreeMap<CanonicalForm, (String, Value)>,
}

impl Classes {
    fn add(&mut self, x: &CycleSet, family: &str, params: Value) {
        self.seen
            .entry(canonical_form(x))
            .or_insert_with(|| (family.to_string(), params));
    }

    fn into_members(self) -> Result<Vec<Member>, ClassifyError> {
        self.seen
            .into_iter()
            .map(|(form, (family, params))| describe(&form.to_cycle_set(), &family, params))
            .collect()
    }
}

/// All indecomposable `Z_m ×_Γ Z_k` for `(m,k) ∈ {(p,q),(q,p)}` up to
/// isomorphism, sorted by canonical form.
pub fn enumerate_pq(p: u64, q: u64) -> Result<Vec<Member>, ClassifyError> {
    check_prime(p, "p")?;
    check_prime(q, "q")?;
    if p == q {
        return Err(ClassifyError::InvalidParameters(
            "p and q must be distinct".into(),
        ));
    }
    let mut classes = Classes::default();
    for (m, k) in [(p, q), (q, p)] {
        for g in vectors(m as usize, k).filter(|g| first_nonzero_is_one(g)) {
            let spec = PqSpec::new(m as usize, k as usize, g);
            if let Ok(x) = build_pq(&spec) {
                classes.add(&x, "pq", json!(spec));
            }
        }
    }
    classes.into_members()
}

/// Result of a budgeted pqr sweep.
#[derive(Debug, Clone, Serialize)]
pub struct PqrEnumeration {
    pub members: Vec<Member>,
    pub truncated: bool,
    pub candidates: usize,
}

/// Admissible Γ⁰ for the nonuniconnected families, first nonzero value 1.
fn case_gammas(p: u64, q: u64) -> Vec<Vec<u64>> {
    vectors(p as usize, q)
        .filter(|g| first_nonzero_is_one(g) && check_retraction_gamma(p, q, g).is_ok())
        .collect()
}

/// Union of the three pqr families over all prime assignments, with at most
/// `budget` valid parameter tuples per family and assignment.
pub fn enumerate_pqr(
    p: u64,
    q: u64,
    r: u64,
    budget: usize,
) -> Result<PqrEnumeration, ClassifyError> {
    check_distinct_primes(p, q, r)?;
    let mut classes = Classes::default();
    let mut truncated = false;
    let mut candidates = 0;
    let primes = [p, q, r];
    let assignments = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for idx in assignments {
        let (pp, qq, rr) = (primes[idx[0]], primes[idx[1]], primes[idx[2]]);

        let mut taken = 0;
        'uni: for xi in (2..qq).filter(|&xi| pow_mod(xi, pp, qq) == 1) {
            for phi0 in vectors((pp * qq) as usize, rr).filter(|v| first_nonzero_is_one(v)) {
                let spec = PqrUniSpec {
                    p: pp,
                    q: qq,
                    r: rr,
                    xi,
                    phi0,
                };
                if let Ok(x) = build_pqr_uniconnected(&spec) {
                    if taken == budget {
                        truncated = true;
                        break 'uni;
                    }
                    taken += 1;
                    classes.add(&x, "pqr-uniconnected", json!(spec));
                }
            }
        }
        candidates += taken;

        let gammas = case_gammas(pp, qq);
        let mut taken = 0;
        'case1: for g in &gammas {
            for phi in vectors((qq + pp - 1) as usize, rr).filter(|v| first_nonzero_is_one(v)) {
                let spec = PqrCase1Spec {
                    p: pp,
                    q: qq,
                    r: rr,
                    gamma0: g.clone(),
                    phi1: phi[..qq as usize].to_vec(),
                    phi2: phi[qq as usize..].to_vec(),
                };
                if let Ok(x) = build_pqr_case1(&spec) {
                    if taken == budget {
                        truncated = true;
                        break 'case1;
                    }
                    taken += 1;
                    classes.add(&x, "pqr-case1", json!(spec));
                }
            }
        }
        candidates += taken;

        if (rr - 1) % qq != 0 {
            continue;
        }
        let roots: Vec<u64> = (1..rr).filter(|&z| pow_mod(z, qq, rr) == 1).collect();
        let mut taken = 0;
        'case2: for g in &gammas {
            for xi_idx in vectors(pp as usize - 1, roots.len() as u64) {
                let xi: Vec<u64> = xi_idx.iter().map(|&i| roots[i as usize]).collect();
                let (g_norm, _) = normalize_gamma0(g, qq)?;
                let k0 = k0_basis(&g_norm, qq);
                let n = n_chi(&k0, &xi, pp as usize, qq, rr);
                if n.contains(&0) {
                    continue;
                }
                for c in vectors(pp as usize, rr).filter(|c| first_nonzero_is_one(c)) {
                    if (0..pp as usize).any(|x| c[x] != 0 && !n.contains(&x)) {
                        continue;
                    }
                    let spec = PqrCase2Spec {
                        p: pp,
                        q: qq,
                        r: rr,
                        gamma0: g.clone(),
                        xi: xi.clone(),
                        c,
                    };
                    if let Ok(x) = build_pqr_case2(&spec) {
                        if taken == budget {
                            truncated = true;
                            break 'case2;
                        }
                        taken += 1;
                        classes.add(&x, "pqr-case2", json!(spec));
                    }
                }
            }
        }
        candidates += taken;
    }
    Ok(PqrEnumeration {
        members: classes.into_members()?,
        truncated,
        candidates,
    })
}

/// Checks on a squarefree indecomposable cycle set: finite mpl, `π(|𝒢(X)|) = π(|X|)`,
/// and the retraction is a coprime extension.
pub fn cedo_okninski_checks(x: &CycleSet) -> Result<crate::report::Report, ClassifyError> {
    let mut report = crate::report::Report::new();
    let level = mpl(x)?;
    report.check("finite_mpl", level != Mpl::Infinite, || json!(level));
    let order = perm_group_order(x)?;
    let pg = prime_factors(order);
    let px = prime_factors(x.n() as u64);
    report.check(
        "group_primes",
        pg == px,
        || json!({ "group": pg, "set": px }),
    );
    let (_, hom) = retraction(x)?;
    if hom.target.n() > 1 || x.n() == 1 {
        let coprime = is_coprime_extension(&hom)?;
        report.check("retraction_coprime", coprime, || json!(hom.target.n()));
    }
    report.metric("retraction_sizes", retraction_sizes(x)?);
    Ok(report)
}

/// Post-checks on an enumerated pqr member.
pub fn pqr_member_checks(
    m: &Member,
    p: u64,
    q: u64,
    r: u64,
) -> Result<crate::report::Report, ClassifyError> {
    let x = &m.cycle_set;
    let mut report = cedo_okninski_checks(x)?;
    report.check("size", x.n() as u64 == p * q * r, || json!(x.n()));
    report.check("indecomposable", is_indecomposable(x), || json!(null));
    report.check(
        "mpl_at_most_3",
        matches!(m.mpl, Mpl::Finite(k) if k <= 3),
        || json!(m.mpl),
    );
    if m.mpl == Mpl::Finite(3) {
        let first = retraction(x)?.0.n() as u64;
        report.check(
            "first_retraction_size",
            [p * q, q * r, p * r].contains(&first),
            || json!(first),
        );
    }
    Ok(report)
}
