//! The permutation group 𝒢(X) with its brace structure.
//!
//! Multiplication is composition of permutations of X. Addition is never
//! tabulated: the additive group is built as a polycyclic presentation from
//! the translations `g ↦ g + λ_y = g ∘ λ_{g⁻¹(y)}`, one generator λ_y at a
//! time. Every group element gets a mixed-radix code, and sums are computed
//! digitwise with carries through the recorded power relations. The
//! presentation is then checked against the translation rule for every
//! element and every generator.

use crate::cycle_set::CycleSet;
use crate::group::{GroupClosure, GroupError, DEFAULT_SIZE_LIMIT};
use crate::modular::{invariant_factors, lcm, pi_part, prime_factors};
use crate::perm::Permutation;
use crate::report::Report;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const MAX_DIGITS: usize = 40;

#[derive(Debug, Clone, thiserror::Error)]
pub enum BraceError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("addition rule is inconsistent: {0}")]
    ClosureInconsistency(String),
    #[error("brace invariants fail: {}", serde_json::to_string(&.0.witnesses).unwrap_or_default())]
    AxiomFailure(Report),
    #[error("π-primary component is not a left ideal")]
    NotALeftIdeal,
}

#[derive(Debug, Clone, Copy)]
pub struct BraceOptions {
    pub size_limit: usize,
    /// Exhaustive axiom checks up to this order; sampled above.
    pub exhaustive_up_to: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for BraceOptions {
    fn default() -> Self {
        BraceOptions {
            size_limit: DEFAULT_SIZE_LIMIT,
            exhaustive_up_to: 200,
            samples: 10_000,
            seed: 0x5eed,
        }
    }
}

/// Index of an element of 𝒢(X).
pub type BraceElement = u32;

pub struct PermutationBrace {
    n: usize,
    group: GroupClosure,
    /// `x ↦` element index of `λ_x = σ_x⁻¹`.
    gen_of: Vec<u32>,
    /// Distinct generators as `(representative x, element index)`.
    distinct: Vec<(usize, u32)>,
    radices: Vec<u64>,
    strides: Vec<u64>,
    relations: Vec<Vec<u64>>,
    code_of: Vec<u32>,
    elem_of_code: Vec<u32>,
    invariants: Vec<u64>,
    exponent: u64,
    row_class: Vec<usize>,
}

impl std::fmt::Debug for PermutationBrace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PermutationBrace")
            .field("order", &self.order())
            .field("additive_invariants", &self.invariants)
            .finish()
    }
}

/// 𝒢(X) as a group only.
pub fn permutation_group(x: &CycleSet, limit: usize) -> Result<GroupClosure, GroupError> {
    let gens: Vec<Permutation> = (0..x.n()).map(|i| x.sigma(i)).collect();
    GroupClosure::new(x.n(), &gens, limit)
}

/// Builds 𝒢(X) with its brace structure and verifies the brace invariants.
pub fn brace_structure(x: &CycleSet, opts: &BraceOptions) -> Result<PermutationBrace, BraceError> {
    let b = PermutationBrace::build(x, opts.size_limit)?;
    let report = b.verify(opts);
    if !report.passed() {
        return Err(BraceError::AxiomFailure(report));
    }
    Ok(b)
}

impl PermutationBrace {
    /// Builds the presentation and checks the addition rule on all
    /// element/generator pairs, without the sampled axiom checks.
    pub fn build(x: &CycleSet, limit: usize) -> Result<PermutationBrace, BraceError> {
        let n = x.n();
        let lambdas: Vec<Permutation> = (0..n).map(|i| x.sigma(i).inverse()).collect();
        let mut distinct_perms: Vec<Permutation> = Vec::new();
        let mut distinct_rep = Vec::new();
        for (i, l) in lambdas.iter().enumerate() {
            if !distinct_perms.contains(l) {
                distinct_perms.push(l.clone());
                distinct_rep.push(i);
            }
        }
        let group = GroupClosure::new(n, &distinct_perms, limit)?;
        let gen_of: Vec<u32> = lambdas
            .iter()
            .map(|l| {
                let img: Vec<u16> = l.images().iter().map(|&v| v as u16).collect();
                group.find(&img).expect("generator present")
            })
            .collect();
        let distinct: Vec<(usize, u32)> = distinct_rep.iter().map(|&r| (r, gen_of[r])).collect();

        let mut row_class = vec![usize::MAX; n];
        let mut reps: Vec<usize> = Vec::new();
        for i in 0..n {
            row_class[i] = match reps.iter().position(|&r| x.row(r) == x.row(i)) {
                Some(c) => c,
                None => {
                    reps.push(i);
                    reps.len() - 1
                }
            };
        }

        let mut b = PermutationBrace {
            n,
            group,
            gen_of,
            distinct,
            radices: Vec::new(),
            strides: Vec::new(),
            relations: Vec::new(),
            code_of: Vec::new(),
            elem_of_code: Vec::new(),
            invariants: Vec::new(),
            exponent: 1,
            row_class,
        };
        b.build_presentation()?;
        b.check_translation_rule()?;
        Ok(b)
    }

    fn build_presentation(&mut self) -> Result<(), BraceError> {
        let order = self.group.order();
        let mut in_h = vec![false; order];
        let mut code_of = vec![u32::MAX; order];
        let mut h: Vec<u32> = vec![0];
        in_h[0] = true;
        code_of[0] = 0;
        let distinct = self.distinct.clone();
        for &(y, gen) in &distinct {
            if in_h[gen as usize] {
                continue;
            }
            let mut cur = gen;
            let mut m = 1u64;
            while !in_h[cur as usize] {
                cur = self.translate(cur, y);
                m += 1;
                if m as usize > order {
                    return Err(BraceError::ClosureInconsistency(format!(
                        "multiples of λ_{y} never return to the subgroup"
                    )));
                }
            }
            let relation = code_of[cur as usize] as u64;
            let stride = h.len() as u64;
            let rel_digits = self.digits_of(relation);
            let mut layer = h.clone();
            for j in 1..m {
                for (t, e) in layer.iter_mut().enumerate() {
                    let next = self.translate(*e, y);
                    if in_h[next as usize] {
                        return Err(BraceError::ClosureInconsistency(format!(
                            "coset {j} of λ_{y} meets an earlier coset"
                        )));
                    }
                    in_h[next as usize] = true;
                    code_of[next as usize] = (j * stride + t as u64) as u32;
                    *e = next;
                }
                h.extend_from_slice(&layer);
            }
            self.radices.push(m);
            self.strides.push(stride);
            self.relations
                .push(rel_digits[..self.radices.len() - 1].to_vec());
            if self.radices.len() > MAX_DIGITS {
                return Err(BraceError::ClosureInconsistency("too many digits".into()));
            }
        }
        if h.len() != order {
            return Err(BraceError::ClosureInconsistency(format!(
                "additive closure has {} elements, multiplicative closure has {order}",
                h.len()
            )));
        }
        self.code_of = code_of;
        self.elem_of_code = h;

        let k = self.radices.len();
        let rows: Vec<Vec<i128>> = (0..k)
            .map(|i| {
                let mut row = vec![0i128; k];
                row[i] = self.radices[i] as i128;
                for (j, &r) in self.relations[i].iter().enumerate() {
                    row[j] -= r as i128;
                }
                row
            })
            .collect();
        self.invariants = invariant_factors(&rows);
        self.exponent = self.invariants.iter().fold(1, |a, &d| lcm(a, d));
        Ok(())
    }

    fn check_translation_rule(&self) -> Result<(), BraceError> {
        for g in 0..self.order() as u32 {
            for &(y, gen) in &self.distinct {
                if self.add(g, gen) != self.translate(g, y) {
                    return Err(BraceError::ClosureInconsistency(format!(
                        "element {g} plus λ_{y} disagrees with the translation rule"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `g ∘ λ_{g⁻¹(y)}`, the rule for `g + λ_y`.
    fn translate(&self, g: u32, y: usize) -> u32 {
        let z = self.group.apply_inverse(g, y);
        self.group.compose(g, self.gen_of[z])
    }

    fn digits_of(&self, code: u64) -> [u64; MAX_DIGITS] {
        let mut d = [0u64; MAX_DIGITS];
        for (i, (&s, &m)) in self.strides.iter().zip(&self.radices).enumerate() {
            d[i] = (code / s) % m;
        }
        d
    }

    fn normalize(&self, s: &mut [u64; MAX_DIGITS]) -> u32 {
        let k = self.radices.len();
        for i in (0..k).rev() {
            let m = self.radices[i];
            if s[i] >= m {
                let q = s[i] / m;
                s[i] %= m;
                for (j, &r) in self.relations[i].iter().enumerate().take(i) {
                    s[j] += q * r;
                }
            }
        }
        let code: u64 = (0..k).map(|i| s[i] * self.strides[i]).sum();
        self.elem_of_code[code as usize]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn group(&self) -> &GroupClosure {
        &self.group
    }

    pub fn identity(&self) -> BraceElement {
        0
    }

    /// Element index of `λ_x`.
    pub fn gen(&self, x: usize) -> BraceElement {
        self.gen_of[x]
    }

    pub fn distinct_generators(&self) -> Vec<BraceElement> {
        self.distinct.iter().map(|&(_, g)| g).collect()
    }

    pub fn perm(&self, a: BraceElement) -> Permutation {
        self.group.perm(a)
    }

    pub fn find(&self, p: &Permutation) -> Option<BraceElement> {
        let img: Vec<u16> = p.images().iter().map(|&v| v as u16).collect();
        self.group.find(&img)
    }

    /// `a ∘ b`.
    pub fn mul(&self, a: BraceElement, b: BraceElement) -> BraceElement {
        self.group.compose(a, b)
    }

    pub fn mul_inverse(&self, a: BraceElement) -> BraceElement {
        self.group.inverse(a)
    }

    pub fn add(&self, a: BraceElement, b: BraceElement) -> BraceElement {
        let da = self.digits_of(self.code_of[a as usize] as u64);
        let db = self.digits_of(self.code_of[b as usize] as u64);
        let mut s = [0u64; MAX_DIGITS];
        for i in 0..self.radices.len() {
            s[i] = da[i] + db[i];
        }
        self.normalize(&mut s)
    }

    /// `k · a`.
    pub fn scale(&self, a: BraceElement, mut k: u64) -> BraceElement {
        let mut acc = 0;
        let mut pow = a;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, pow);
            }
            pow = self.add(pow, pow);
            k >>= 1;
        }
        acc
    }

    /// Additive inverse, `(o₊(a) − 1) · a`.
    pub fn neg(&self, a: BraceElement) -> BraceElement {
        self.scale(a, self.additive_order(a) - 1)
    }

    pub fn sub(&self, a: BraceElement, b: BraceElement) -> BraceElement {
        self.add(a, self.neg(b))
    }

    pub fn additive_order(&self, a: BraceElement) -> u64 {
        let mut o = self.exponent;
        for p in prime_factors(self.exponent) {
            while o % p == 0 && self.scale(a, o / p) == 0 {
                o /= p;
            }
        }
        o
    }

    /// Invariant factors of the additive group, ascending, each dividing the next.
    pub fn additive_invariants(&self) -> &[u64] {
        &self.invariants
    }

    /// `λ_a(b) = a∘b − a`.
    pub fn lambda_of(&self, a: BraceElement, b: BraceElement) -> BraceElement {
        self.sub(self.mul(a, b), a)
    }

    /// `{a : a∘b = a + b for all b}`, tested on additive generators.
    pub fn socle(&self) -> Vec<BraceElement> {
        (0..self.order() as u32)
            .filter(|&a| {
                self.distinct
                    .iter()
                    .all(|&(_, g)| self.mul(a, g) == self.add(a, g))
            })
            .collect()
    }

    /// `{g : σ_{g(y)} = σ_y for all y}`.
    pub fn row_preserving_elements(&self) -> Vec<BraceElement> {
        (0..self.order() as u32)
            .filter(|&g| {
                (0..self.n).all(|y| self.row_class[self.group.apply(g, y)] == self.row_class[y])
            })
            .collect()
    }

    /// Socle computed both ways; the two must agree.
    pub fn verified_socle(&self) -> Result<Vec<BraceElement>, BraceError> {
        let a = self.socle();
        let b = self.row_preserving_elements();
        if a != b {
            let w = a
                .iter()
                .chain(&b)
                .find(|e| a.contains(e) != b.contains(e))
                .copied();
            return Err(BraceError::ClosureInconsistency(format!(
                "socle characterizations disagree at element {w:?}"
            )));
        }
        Ok(a)
    }

    /// Kernel of the induced map 𝒢(X) → 𝒢(X⁽¹⁾) with `λ_y ↦ λ_[y]`.
    ///
    /// The map is propagated along the closure tree and then checked on every
    /// element/generator edge, so a failure means the assignment is not a
    /// homomorphism. Returns the kernel and the number of distinct images.
    pub fn retraction_kernel(
        &self,
        x: &CycleSet,
    ) -> Result<(Vec<BraceElement>, usize), BraceError> {
        let classes = self.row_class.iter().max().map_or(0, |&m| m + 1);
        let mut rep = vec![usize::MAX; classes];
        for y in (0..self.n).rev() {
            rep[self.row_class[y]] = y;
        }
        // λ_[y] on classes: [z] ↦ [λ_y(z)].
        let class_lambda = |y: usize| -> Vec<u16> {
            (0..classes)
                .map(|c| {
                    let z = rep[c];
                    let l = x.sigma(y).inverse().apply(z);
                    self.row_class[l] as u16
                })
                .collect()
        };
        let gen_imgs: Vec<Vec<u16>> = self
            .distinct
            .iter()
            .map(|&(y, _)| class_lambda(y))
            .collect();
        let order = self.order();
        let mut image = vec![0u16; order * classes];
        for c in 0..classes {
            image[c] = c as u16;
        }
        let compose =
            |a: &[u16], b: &[u16]| -> Vec<u16> { b.iter().map(|&v| a[v as usize]).collect() };
        for i in 1..order as u32 {
            let (p, s) = self.group.parent(i);
            let pi = image[p as usize * classes..(p as usize + 1) * classes].to_vec();
            let v = compose(&pi, &gen_imgs[s as usize]);
            image[i as usize * classes..(i as usize + 1) * classes].copy_from_slice(&v);
        }
        let img_of = |i: u32| &image[i as usize * classes..(i as usize + 1) * classes];
        for i in 0..order as u32 {
            for (s, &(_, g)) in self.distinct.iter().enumerate() {
                let j = self.mul(i, g);
                if img_of(j) != compose(img_of(i), &gen_imgs[s]).as_slice() {
                    return Err(BraceError::ClosureInconsistency(format!(
                        "induced map on the retraction is not a homomorphism at element {i}"
                    )));
                }
            }
        }
        let identity: Vec<u16> = (0..classes as u16).collect();
        let kernel: Vec<u32> = (0..order as u32)
            .filter(|&i| img_of(i) == identity.as_slice())
            .collect();
        let mut images: Vec<&[u16]> = (0..order as u32).map(img_of).collect();
        images.sort_unstable();
        images.dedup();
        Ok((kernel, images.len()))
    }

    /// Hall π-subgroup of the additive group, i.e. `m·B` for `m` the π′-part of `|B|`.
    pub fn pi_primary(&self, primes: &[u64]) -> Result<Vec<BraceElement>, BraceError> {
        let order = self.order() as u64;
        let part = pi_part(order, primes);
        let m = order / part;
        let gens: Vec<u32> = self
            .distinct
            .iter()
            .map(|&(_, g)| self.scale(g, m))
            .filter(|&g| g != 0)
            .collect();
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut out = vec![0u32];
        let mut head = 0;
        while head < out.len() {
            let a = out[head];
            for &g in &gens {
                let s = self.add(a, g);
                if !seen[s as usize] {
                    seen[s as usize] = true;
                    out.push(s);
                }
            }
            head += 1;
        }
        if out.len() as u64 != part {
            return Err(BraceError::NotALeftIdeal);
        }
        for &a in &out {
            for &(_, g) in &self.distinct {
                if !seen[self.lambda_of(g, a) as usize] {
                    return Err(BraceError::NotALeftIdeal);
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Stabilizer of `x0` in 𝒢(X).
    pub fn fundamental_group(&self, x0: usize) -> Vec<BraceElement> {
        self.group.stabilizer(x0)
    }

    /// Checks `λ_a(b) = a∘b∘a⁻¹` for `b` in the socle. With a large group only
    /// multiplicative generators are used for `a`, which suffices because both
    /// sides are homomorphic in `a`.
    pub fn verify_socle_conjugation(&self) -> Report {
        let mut report = Report::new();
        let soc = self.socle();
        let all: Vec<u32> = if self.order() * soc.len() <= 1_000_000 {
            (0..self.order() as u32).collect()
        } else {
            self.distinct_generators()
        };
        report.metric("socle_order", soc.len());
        report.metric("checked_a", all.len());
        for &a in &all {
            let ainv = self.mul_inverse(a);
            for &b in &soc {
                let lhs = self.lambda_of(a, b);
                let rhs = self.mul(self.mul(a, b), ainv);
                if lhs != rhs {
                    report.check("socle_conjugation", false, || json!({ "a": a, "b": b }));
                    return report;
                }
            }
        }
        report
    }

    /// Brace axioms: abelian addition, the brace identity, λ a homomorphism,
    /// and the generator rule. Exhaustive for small orders, sampled otherwise.
    pub fn verify(&self, opts: &BraceOptions) -> Report {
        let mut report = Report::new();
        let order = self.order();
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        report.metric("order", order);
        let exhaustive = order <= opts.exhaustive_up_to;
        report.metric("exhaustive", exhaustive);

        let triples: Box<dyn Iterator<Item = (u32, u32, u32)>> = if exhaustive {
            let o = order as u32;
            Box::new(
                (0..o).flat_map(move |a| (0..o).flat_map(move |b| (0..o).map(move |c| (a, b, c)))),
            )
        } else {
            let v: Vec<(u32, u32, u32)> = (0..opts.samples)
                .map(|_| {
                    (
                        rng.gen_range(0..order as u32),
                        rng.gen_range(0..order as u32),
                        rng.gen_range(0..order as u32),
                    )
                })
                .collect();
            Box::new(v.into_iter())
        };
        for (a, b, c) in triples {
            if self.add(a, b) != self.add(b, a) {
                report.check("commutativity", false, || json!([a, b]));
                break;
            }
            if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)) {
                report.check("associativity", false, || json!([a, b, c]));
                break;
            }
            let lhs = self.mul(a, self.add(b, c));
            let rhs = self.add(self.sub(self.mul(a, b), a), self.mul(a, c));
            if lhs != rhs {
                report.check("brace_identity", false, || json!([a, b, c]));
                break;
            }
            // λ_{a∘b}(c) = λ_a(λ_b(c))
            if self.lambda_of(self.mul(a, b), c) != self.lambda_of(a, self.lambda_of(b, c)) {
                report.check("lambda_homomorphism", false, || json!([a, b, c]));
                break;
            }
        }
        if !exhaustive && order <= 1000 {
            'pairs: for a in 0..order as u32 {
                for b in a + 1..order as u32 {
                    if self.add(a, b) != self.add(b, a) {
                        report.check("commutativity", false, || json!([a, b]));
                        break 'pairs;
                    }
                }
            }
        }
        for x in 0..self.n {
            for y in 0..self.n {
                let lx = self.gen(x);
                let target = self.gen(self.perm(lx).inverse().apply(y));
                if self.add(lx, self.gen(y)) != self.mul(lx, target) {
                    report.check("generator_rule", false, || json!([x, y]));
                }
            }
        }
        report
    }
}
