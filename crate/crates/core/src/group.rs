//! Permutation groups: explicit closure into a flat arena, and group orders
//! via Schreier–Sims for groups too large to list.

use crate::perm::Permutation;
use hashbrown::{DefaultHashBuilder, HashTable};
use std::collections::VecDeque;
use std::hash::BuildHasher;

pub const DEFAULT_SIZE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("group closure exceeds the configured bound of {limit} elements")]
    SizeLimitExceeded { limit: usize },
    #[error("group order does not fit in 128 bits")]
    OrderOverflow,
}

/// All elements of `⟨gens⟩`, stored contiguously as image sequences.
///
/// Element 0 is the identity. Elements are discovered breadth-first by right
/// multiplication with generators, and `parent` records the edge that first
/// reached each element.
#[derive(Clone)]
pub struct GroupClosure {
    degree: usize,
    data: Vec<u16>,
    index: HashTable<u32>,
    hasher: DefaultHashBuilder,
    gens: Vec<u32>,
    parent: Vec<(u32, u32)>,
}

impl std::fmt::Debug for GroupClosure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupClosure")
            .field("degree", &self.degree)
            .field("order", &self.order())
            .finish()
    }
}

impl GroupClosure {
    pub fn new(
        degree: usize,
        gens: &[Permutation],
        limit: usize,
    ) -> Result<GroupClosure, GroupError> {
        assert!(degree <= u16::MAX as usize + 1, "degree too large");
        let mut g = GroupClosure {
            degree,
            data: Vec::new(),
            index: HashTable::new(),
            hasher: DefaultHashBuilder::default(),
            gens: Vec::new(),
            parent: Vec::new(),
        };
        let id: Vec<u16> = (0..degree as u16).collect();
        g.insert(&id);
        g.parent.push((0, u32::MAX));
        let gen_images: Vec<Vec<u16>> = gens
            .iter()
            .map(|p| {
                assert_eq!(p.degree(), degree);
                p.images().iter().map(|&v| v as u16).collect()
            })
            .collect();
        let mut gen_ids = Vec::with_capacity(gens.len());
        let mut buf = vec![0u16; degree];
        let mut head = 0usize;
        // Generators are inserted first so their indices are stable.
        for img in &gen_images {
            let idx = match g.find(img) {
                Some(i) => i,
                None => {
                    if g.order() >= limit {
                        return Err(GroupError::SizeLimitExceeded { limit });
                    }
                    let i = g.insert(img);
                    g.parent.push((0, gen_ids.len() as u32));
                    i
                }
            };
            gen_ids.push(idx);
        }
        g.gens = gen_ids;
        while head < g.order() {
            for (s, img) in gen_images.iter().enumerate() {
                let e = g.elem(head as u32);
                for (b, &x) in buf.iter_mut().zip(img.iter()) {
                    *b = e[x as usize];
                }
                if g.find(&buf).is_none() {
                    if g.order() >= limit {
                        return Err(GroupError::SizeLimitExceeded { limit });
                    }
                    g.insert(&buf);
                    g.parent.push((head as u32, s as u32));
                }
            }
            head += 1;
        }
        Ok(g)
    }

    fn hash_of(&self, img: &[u16]) -> u64 {
        self.hasher.hash_one(img)
    }

    fn insert(&mut self, img: &[u16]) -> u32 {
        let idx = (self.data.len() / self.degree.max(1)) as u32;
        self.data.extend_from_slice(img);
        let h = self.hash_of(img);
        let (data, degree, hasher) = (&self.data, self.degree, &self.hasher);
        self.index.insert_unique(h, idx, |&i| {
            hasher.hash_one(&data[i as usize * degree..(i as usize + 1) * degree])
        });
        idx
    }

    pub fn find(&self, img: &[u16]) -> Option<u32> {
        let h = self.hash_of(img);
        self.index.find(h, |&i| self.elem(i) == img).copied()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        if self.degree == 0 {
            1
        } else {
            self.data.len() / self.degree
        }
    }

    #[inline]
    pub fn elem(&self, i: u32) -> &[u16] {
        let d = self.degree;
        &self.data[i as usize * d..(i as usize + 1) * d]
    }

    pub fn perm(&self, i: u32) -> Permutation {
        Permutation::from_images_unchecked(self.elem(i).iter().map(|&v| v as u32).collect())
    }

    #[inline]
    pub fn apply(&self, i: u32, x: usize) -> usize {
        self.elem(i)[x] as usize
    }

    /// Index of the `k`-th generator passed to [`GroupClosure::new`].
    pub fn gen(&self, k: usize) -> u32 {
        self.gens[k]
    }

    pub fn num_gens(&self) -> usize {
        self.gens.len()
    }

    /// `(parent, generator)` with `elem(i) = elem(parent) ∘ gen`; the identity has generator `u32::MAX`.
    pub fn parent(&self, i: u32) -> (u32, u32) {
        self.parent[i as usize]
    }

    /// Index of `a ∘ b`.
    pub fn compose(&self, a: u32, b: u32) -> u32 {
        let (ea, eb) = (self.elem(a), self.elem(b));
        let img: Vec<u16> = eb.iter().map(|&x| ea[x as usize]).collect();
        self.find(&img).expect("closed under composition")
    }

    pub fn inverse(&self, a: u32) -> u32 {
        let e = self.elem(a);
        let mut img = vec![0u16; self.degree];
        for (x, &y) in e.iter().enumerate() {
            img[y as usize] = x as u16;
        }
        self.find(&img).expect("closed under inversion")
    }

    /// `a⁻¹(y)`.
    pub fn apply_inverse(&self, a: u32, y: usize) -> usize {
        self.elem(a)
            .iter()
            .position(|&v| v as usize == y)
            .expect("bijective")
    }

    /// Elements fixing `x0`.
    pub fn stabilizer(&self, x0: usize) -> Vec<u32> {
        (0..self.order() as u32)
            .filter(|&i| self.apply(i, x0) == x0)
            .collect()
    }
}

/// Orbit of `x` under `⟨gens⟩`, sorted.
pub fn orbit(degree: usize, gens: &[Permutation], x: usize) -> Vec<usize> {
    let mut seen = vec![false; degree];
    seen[x] = true;
    let mut queue = VecDeque::from([x]);
    while let Some(y) = queue.pop_front() {
        for g in gens {
            let z = g.apply(y);
            if !seen[z] {
                seen[z] = true;
                queue.push_back(z);
            }
        }
    }
    (0..degree).filter(|&i| seen[i]).collect()
}

struct Level {
    base: usize,
    gens: Vec<Permutation>,
    transversal: Vec<Option<Permutation>>,
    orbit: Vec<usize>,
    // Number of generators already paired with orbit point `orbit[i]`.
    done: Vec<usize>,
}

/// Base and strong generating set computed by the Schreier–Sims algorithm.
pub struct StabilizerChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabilizerChain {
    pub fn new(degree: usize, gens: &[Permutation]) -> StabilizerChain {
        let mut chain = StabilizerChain {
            degree,
            levels: Vec::new(),
        };
        for g in gens {
            chain.insert(g.clone(), 0);
        }
        chain
    }

    fn sift(&self, mut g: Permutation, from: usize) -> (Permutation, usize) {
        for (i, level) in self.levels.iter().enumerate().skip(from) {
            let b = g.apply(level.base);
            match &level.transversal[b] {
                Some(u) => g = u.inverse().compose(&g),
                None => return (g, i),
            }
        }
        (g, self.levels.len())
    }

    fn insert(&mut self, g: Permutation, from: usize) {
        let (h, j) = self.sift(g, from);
        if h.is_identity() {
            return;
        }
        if j == self.levels.len() {
            let base = (0..self.degree)
                .find(|&x| h.apply(x) != x)
                .expect("non-identity");
            let mut transversal = vec![None; self.degree];
            transversal[base] = Some(Permutation::identity(self.degree));
            self.levels.push(Level {
                base,
                gens: Vec::new(),
                transversal,
                orbit: vec![base],
                done: vec![0],
            });
        }
        for l in from..=j {
            self.levels[l].gens.push(h.clone());
        }
        for l in (from..=j).rev() {
            self.saturate(l);
        }
    }

    fn saturate(&mut self, l: usize) {
        let mut i = 0;
        while i < self.levels[l].orbit.len() {
            loop {
                let level = &self.levels[l];
                let k = level.done[i];
                if k >= level.gens.len() {
                    break;
                }
                let beta = level.orbit[i];
                let s = level.gens[k].clone();
                let u = level.transversal[beta].clone().expect("in orbit");
                let img = s.apply(beta);
                self.levels[l].done[i] += 1;
                let su = s.compose(&u);
                if self.levels[l].transversal[img].is_none() {
                    let level = &mut self.levels[l];
                    level.transversal[img] = Some(su);
                    level.orbit.push(img);
                    level.done.push(0);
                } else {
                    let v = self.levels[l].transversal[img].clone().unwrap();
                    let schreier = v.inverse().compose(&su);
                    if !schreier.is_identity() {
                        self.insert(schreier, l + 1);
                    }
                }
            }
            i += 1;
        }
    }

    pub fn order(&self) -> Result<u128, GroupError> {
        self.levels.iter().try_fold(1u128, |acc, l| {
            acc.checked_mul(l.orbit.len() as u128)
                .ok_or(GroupError::OrderOverflow)
        })
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        let (h, _) = self.sift(g.clone(), 0);
        h.is_identity()
    }
}

/// `|⟨gens⟩|` without listing elements.
pub fn group_order(degree: usize, gens: &[Permutation]) -> Result<u128, GroupError> {
    StabilizerChain::new(degree, gens).order()
}
