//! Canonical key tables.
//!
//! Symmetric slots are keyed by nondecreasing multi-indices, form slots by
//! strictly increasing index tuples. Both are enumerated in lexicographic
//! order and ranked combinatorially, so dense storage never needs a map.

use alloc::vec::Vec;

const BINOM_MAX: usize = 64;

const fn binomial_table() -> [[u64; BINOM_MAX + 1]; BINOM_MAX + 1] {
    let mut t = [[0u64; BINOM_MAX + 1]; BINOM_MAX + 1];
    let mut a = 0;
    while a <= BINOM_MAX {
        t[a][0] = 1;
        let mut b = 1;
        while b <= a {
            t[a][b] = t[a - 1][b - 1] + if b < a { t[a - 1][b] } else { 0 };
            b += 1;
        }
        a += 1;
    }
    t
}

static BINOM: [[u64; BINOM_MAX + 1]; BINOM_MAX + 1] = binomial_table();

pub fn binomial(a: usize, b: usize) -> usize {
    if b > a {
        return 0;
    }
    assert!(a <= BINOM_MAX, "binomial argument {a} out of table range");
    BINOM[a][b] as usize
}

/// Number of nondecreasing sequences of length `len` drawn from `symbols` symbols.
fn multiset_count(symbols: usize, len: usize) -> usize {
    if len == 0 {
        1
    } else if symbols == 0 {
        0
    } else {
        binomial(symbols + len - 1, len)
    }
}

/// Dimension of `Sym^m` of an `n`-dimensional space.
pub fn sym_count(n: usize, m: usize) -> usize {
    multiset_count(n, m)
}

/// Dimension of `Λ^k` of an `n`-dimensional space.
pub fn form_count(n: usize, k: usize) -> usize {
    binomial(n, k)
}

/// Lexicographic rank of the sorted multi-index with exponent vector `exps`.
pub fn sym_rank_exps(exps: &[u8]) -> usize {
    let n = exps.len();
    let mut remaining: usize = exps.iter().map(|&e| e as usize).sum();
    let mut rank = 0;
    let mut prev = 0;
    for (i, &e) in exps.iter().enumerate() {
        for _ in 0..e {
            for c in prev..i {
                rank += multiset_count(n - c, remaining - 1);
            }
            prev = i;
            remaining -= 1;
        }
    }
    rank
}

/// Lexicographic rank of a nondecreasing multi-index over `0..n`.
pub fn sym_rank(n: usize, sorted: &[usize]) -> usize {
    let mut rank = 0;
    let mut prev = 0;
    let m = sorted.len();
    for (j, &i) in sorted.iter().enumerate() {
        debug_assert!(i < n && i >= prev);
        for c in prev..i {
            rank += multiset_count(n - c, m - j - 1);
        }
        prev = i;
    }
    rank
}

/// Lexicographic rank of a strictly increasing tuple over `0..n`.
pub fn form_rank(n: usize, sorted: &[usize]) -> usize {
    let k = sorted.len();
    let mut rank = 0;
    let mut next = 0;
    for (j, &i) in sorted.iter().enumerate() {
        debug_assert!(i < n && i >= next);
        for c in next..i {
            rank += binomial(n - c - 1, k - j - 1);
        }
        next = i + 1;
    }
    rank
}

/// All nondecreasing multi-indices of length `m` over `0..n`, with exponent
/// vectors and multinomial weights `m! / Π αᵢ!`.
#[derive(Clone, Debug)]
pub struct SymTable {
    n: usize,
    m: usize,
    indices: Vec<u8>,
    exps: Vec<u8>,
    multinomial: Vec<f64>,
}

impl SymTable {
    pub fn new(n: usize, m: usize) -> Self {
        let count = sym_count(n, m);
        let mut indices = Vec::with_capacity(count * m);
        let mut exps = Vec::with_capacity(count * n);
        let mut multinomial = Vec::with_capacity(count);
        let mut cur = alloc::vec![0usize; m];
        if count > 0 {
            loop {
                indices.extend(cur.iter().map(|&i| i as u8));
                let start = exps.len();
                exps.resize(start + n, 0);
                for &i in &cur {
                    exps[start + i] += 1;
                }
                let mut w = crate::num::factorial(m);
                for &e in &exps[start..] {
                    w /= crate::num::factorial(e as usize);
                }
                multinomial.push(w);
                // advance to the next nondecreasing sequence
                let mut pos = m;
                while pos > 0 && cur[pos - 1] == n - 1 {
                    pos -= 1;
                }
                if pos == 0 {
                    break;
                }
                let v = cur[pos - 1] + 1;
                for slot in &mut cur[pos - 1..] {
                    *slot = v;
                }
            }
        }
        debug_assert_eq!(multinomial.len(), count);
        Self { n, m, indices, exps, multinomial }
    }

    pub fn len(&self) -> usize {
        self.multinomial.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multinomial.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn indices(&self, key: usize) -> &[u8] {
        &self.indices[key * self.m..(key + 1) * self.m]
    }

    pub fn exps(&self, key: usize) -> &[u8] {
        &self.exps[key * self.n..(key + 1) * self.n]
    }

    pub fn multinomial(&self, key: usize) -> f64 {
        self.multinomial[key]
    }

    /// Monomial `v^α` for the key.
    pub fn monomial(&self, key: usize, v: &[f64]) -> f64 {
        self.exps(key)
            .iter()
            .zip(v)
            .fold(1.0, |acc, (&e, &x)| acc * crate::num::powi(x, e as usize))
    }
}

/// All strictly increasing `k`-tuples over `0..n` in lexicographic order.
#[derive(Clone, Debug)]
pub struct FormTable {
    k: usize,
    indices: Vec<u8>,
}

impl FormTable {
    pub fn new(n: usize, k: usize) -> Self {
        let count = form_count(n, k);
        let mut indices = Vec::with_capacity(count * k);
        if count > 0 {
            let mut cur: Vec<usize> = (0..k).collect();
            loop {
                indices.extend(cur.iter().map(|&i| i as u8));
                let mut pos = k;
                while pos > 0 && cur[pos - 1] == n - k + pos - 1 {
                    pos -= 1;
                }
                if pos == 0 {
                    break;
                }
                cur[pos - 1] += 1;
                for j in pos..k {
                    cur[j] = cur[j - 1] + 1;
                }
            }
        }
        Self { k, indices }
    }

    pub fn len(&self) -> usize {
        if self.k == 0 {
            1
        } else {
            self.indices.len() / self.k
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn indices(&self, key: usize) -> &[u8] {
        &self.indices[key * self.k..(key + 1) * self.k]
    }
}

/// Sign of the permutation sorting `idx`, or `None` when an index repeats.
pub fn sort_sign(idx: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// Pairs of form keys `(I, J)` with `I ∩ J = ∅`, their merged key and the
/// shuffle sign `e^I ∧ e^J = sign · e^{I∪J}`.
#[derive(Clone, Debug)]
pub struct WedgeTable {
    pub entries: Vec<(usize, usize, usize, f64)>,
}

impl WedgeTable {
    pub fn new(n: usize, ka: usize, kb: usize) -> Self {
        let ta = FormTable::new(n, ka);
        let tb = FormTable::new(n, kb);
        let mut entries = Vec::new();
        let mut buf = Vec::with_capacity(ka + kb);
        if ka + kb <= n {
            for a in 0..ta.len() {
                for b in 0..tb.len() {
                    buf.clear();
                    buf.extend(ta.indices(a).iter().map(|&i| i as usize));
                    buf.extend(tb.indices(b).iter().map(|&i| i as usize));
                    if let Some(sign) = sort_sign(&mut buf) {
                        entries.push((a, b, form_rank(n, &buf), sign));
                    }
                }
            }
        }
        Self { entries }
    }
}
