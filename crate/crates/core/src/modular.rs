//! Integer and modular arithmetic: gcd, primes, linear algebra over prime
//! fields and Smith normal form over the integers.

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime divisors in ascending order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Largest divisor of `n` whose prime factors all lie in `primes`.
pub fn pi_part(mut n: u64, primes: &[u64]) -> u64 {
    let mut part = 1;
    for &p in primes {
        if p < 2 {
            continue;
        }
        while n % p == 0 {
            n /= p;
            part *= p;
        }
    }
    part
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = (result as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        exp >>= 1;
    }
    result
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Row echelon basis of the span of `vectors` over F_q.
pub fn span_basis(vectors: &[Vec<u64>], q: u64) -> Vec<Vec<u64>> {
    let mut rows: Vec<Vec<u64>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| x % q).collect())
        .collect();
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = inv_mod(rows[rank][col], q).expect("q prime");
        for v in rows[rank].iter_mut() {
            *v = *v * inv % q;
        }
        for i in 0..rows.len() {
            if i != rank && rows[i][col] != 0 {
                let factor = rows[i][col];
                for j in 0..width {
                    rows[i][j] = (rows[i][j] + (q - factor) * rows[rank][j]) % q;
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows
}

/// Basis of the null space `{c : Σ c_i v_i = 0}` of the given rows, over F_q.
pub fn left_kernel(vectors: &[Vec<u64>], q: u64) -> Vec<Vec<u64>> {
    let k = vectors.len();
    if k == 0 {
        return Vec::new();
    }
    let width = vectors[0].len();
    // Work on the transpose: columns are the vectors.
    let mut m: Vec<Vec<u64>> = (0..width)
        .map(|j| vectors.iter().map(|v| v[j] % q).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..k {
        let Some(p) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, p);
        let inv = inv_mod(m[rank][col], q).expect("q prime");
        for v in m[rank].iter_mut() {
            *v = *v * inv % q;
        }
        for i in 0..m.len() {
            if i != rank && m[i][col] != 0 {
                let f = m[i][col];
                for j in 0..k {
                    m[i][j] = (m[i][j] + (q - f) * m[rank][j]) % q;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let free: Vec<usize> = (0..k).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut c = vec![0u64; k];
            c[fc] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                c[pc] = (q - m[row][fc]) % q;
            }
            c
        })
        .collect()
}

/// Basis of `{f ∈ span(basis) : f(i) = 0 for all i ∈ zeros}` over F_q.
pub fn subspace_vanishing_on(basis: &[Vec<u64>], zeros: &[usize], q: u64) -> Vec<Vec<u64>> {
    if basis.is_empty() {
        return Vec::new();
    }
    let restricted: Vec<Vec<u64>> = basis
        .iter()
        .map(|v| zeros.iter().map(|&i| v[i] % q).collect())
        .collect();
    let width = basis[0].len();
    let combos = if zeros.is_empty() {
        (0..basis.len())
            .map(|i| {
                let mut c = vec![0; basis.len()];
                c[i] = 1;
                c
            })
            .collect()
    } else {
        left_kernel(&restricted, q)
    };
    let vectors: Vec<Vec<u64>> = combos
        .iter()
        .map(|c| {
            let mut v = vec![0u64; width];
            for (ci, b) in c.iter().zip(basis) {
                for j in 0..width {
                    v[j] = (v[j] + ci * b[j]) % q;
                }
            }
            v
        })
        .collect();
    span_basis(&vectors, q)
}

/// All elements of the span of `basis` over F_q, in lexicographic order of
/// coefficient vectors.
pub fn span_elements(basis: &[Vec<u64>], width: usize, q: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![0u64; width]];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * q as usize);
        for v in &out {
            for c in 0..q {
                next.push(v.iter().zip(b).map(|(x, y)| (x + c * y) % q).collect());
            }
        }
        out = next;
    }
    out
}

/// Invariant factors (all > 1) of `Z^cols / rowspace(rows)`, assuming the
/// quotient is finite.
pub fn invariant_factors(rows: &[Vec<i128>]) -> Vec<u64> {
    let mut m: Vec<Vec<i128>> = rows.to_vec();
    let r = m.len();
    let c = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < r.min(c) {
        // Find the nonzero entry of smallest magnitude in the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                if m[i][j] != 0 && best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        m.swap(t, bi);
        for row in m.iter_mut() {
            row.swap(t, bj);
        }
        let mut done = true;
        let p = m[t][t];
        for i in t + 1..r {
            let f = m[i][t] / p;
            if f != 0 {
                for j in t..c {
                    m[i][j] -= f * m[t][j];
                }
            }
            if m[i][t] != 0 {
                done = false;
            }
        }
        for j in t + 1..c {
            let f = m[t][j] / p;
            if f != 0 {
                for i in t..r {
                    m[i][j] -= f * m[i][t];
                }
            }
            if m[t][j] != 0 {
                done = false;
            }
        }
        if !done {
            continue;
        }
        // Enforce divisibility of the rest by the pivot.
        if let Some(i) = (t + 1..r).find(|&i| (t + 1..c).any(|j| m[i][j] % p != 0)) {
            for j in t..c {
                m[t][j] += m[i][j];
            }
            continue;
        }
        diag.push(p.unsigned_abs() as u64);
        t += 1;
    }
    let mut out: Vec<u64> = diag.into_iter().filter(|&d| d > 1).collect();
    out.sort_unstable();
    out
}
