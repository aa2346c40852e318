//! Exact linear algebra over `Z/p^s`.
//!
//! Vectors are rows and matrices act on the right (`v·m`). Submodules are kept in
//! Howell normal form, which is canonical for row spans over a local ring like
//! `Z/p^s` where plain Gaussian elimination is not enough.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("modulus {0}^{1} exceeds 2^31")]
    ModulusTooLarge(u64, u32),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("submodule is not contained in the larger module")]
    NotContained,
    #[error("vector is not in the module")]
    NotInModule,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The coefficient ring `Z/p^s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModRing {
    p: u32,
    s: u32,
    m: u32,
}

impl ModRing {
    pub fn new(p: u64, s: u32) -> Result<Self, LinalgError> {
        if !is_prime(p) {
            return Err(LinalgError::NotPrime(p));
        }
        if s == 0 {
            return Err(LinalgError::ZeroExponent);
        }
        let mut m: u64 = 1;
        for _ in 0..s {
            m *= p;
            if m > 1 << 31 {
                return Err(LinalgError::ModulusTooLarge(p, s));
            }
        }
        Ok(ModRing { p: p as u32, s, m: m as u32 })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn modulus(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let c = a as u64 + b as u64;
        if c >= self.m as u64 {
            (c - self.m as u64) as u32
        } else {
            c as u32
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.m as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.m as u64) as u32
    }

    pub fn from_i64(&self, x: i64) -> u32 {
        x.rem_euclid(self.m as i64) as u32
    }

    pub fn from_u64(&self, x: u64) -> u32 {
        (x % self.m as u64) as u32
    }

    /// Signed representative in `(-m/2, m/2]`.
    pub fn signed(&self, a: u32) -> i64 {
        if a as u64 * 2 > self.m as u64 {
            a as i64 - self.m as i64
        } else {
            a as i64
        }
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.m;
        let mut acc = 1 % self.m;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `p^e` as an element of the ring (zero once `e ≥ s`).
    pub fn p_pow(&self, e: u32) -> u32 {
        if e >= self.s {
            0
        } else {
            self.p.pow(e)
        }
    }

    /// p-adic valuation, with `val(0) = s`.
    pub fn val(&self, mut a: u32) -> u32 {
        if a == 0 {
            return self.s;
        }
        let mut v = 0;
        while a.is_multiple_of(self.p) {
            a /= self.p;
            v += 1;
        }
        v
    }

    pub fn is_unit(&self, a: u32) -> bool {
        !a.is_multiple_of(self.p)
    }

    /// Inverse of a unit. Panics on non-units.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(self.is_unit(a), "{a} is not a unit mod {}", self.m);
        let (mut old_r, mut r) = (a as i64, self.m as i64);
        let (mut old_s, mut s) = (1i64, 0i64);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        self.from_i64(old_s)
    }

    /// Splits a nonzero `a` as `p^v · u` and returns `(v, u^{-1})`.
    fn split(&self, a: u32) -> (u32, u32) {
        let v = self.val(a);
        let u = a / self.p.pow(v);
        (v, self.inv(u % self.m))
    }
}

/// Dense row-major matrix over `Z/p^s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMatrix {
    ring: ModRing,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl ModMatrix {
    pub fn zero(ring: ModRing, rows: usize, cols: usize) -> Self {
        ModMatrix { ring, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(ring: ModRing, n: usize) -> Self {
        let mut m = Self::zero(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % ring.m;
        }
        m
    }

    /// Builds a matrix from signed integer rows, reducing every entry.
    pub fn from_rows(ring: ModRing, cols: usize, rows: &[Vec<i64>]) -> Self {
        let mut m = Self::zero(ring, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged row {i}");
            for (j, &x) in r.iter().enumerate() {
                m.data[i * cols + j] = ring.from_i64(x);
            }
        }
        m
    }

    /// Builds a matrix from already reduced rows.
    pub fn from_reduced_rows(ring: ModRing, cols: usize, rows: &[Vec<u32>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r.iter().map(|&x| x % ring.m));
        }
        ModMatrix { ring, rows: rows.len(), cols, data }
    }

    pub fn ring(&self) -> ModRing {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u32) {
        self.data[i * self.cols + j] = x % self.ring.m;
    }

    pub fn add_at(&mut self, i: usize, j: usize, x: u32) {
        let k = i * self.cols + j;
        self.data[k] = self.ring.add(self.data[k], x % self.ring.m);
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [u32] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn push_row(&mut self, r: &[u32]) {
        assert_eq!(r.len(), self.cols);
        self.data.extend_from_slice(r);
        self.rows += 1;
    }

    pub fn transpose(&self) -> ModMatrix {
        let mut t = Self::zero(self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &ModMatrix) -> ModMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimensions");
        let r = self.ring;
        let m = r.m as u64;
        let mut out = Self::zero(r, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for (slot, &b) in acc.iter_mut().zip(other.row(k)) {
                    *slot = (*slot + a * b as u64) % m;
                }
            }
            for (j, a) in acc.iter().enumerate() {
                out.data[i * other.cols + j] = *a as u32;
            }
        }
        out
    }

    pub fn add(&self, other: &ModMatrix) -> ModMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.ring.add(a, b)).collect();
        ModMatrix { ring: self.ring, rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &ModMatrix) -> ModMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.ring.sub(a, b)).collect();
        ModMatrix { ring: self.ring, rows: self.rows, cols: self.cols, data }
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.rows, "vector length");
        let m = self.ring.m as u64;
        let mut acc = vec![0u64; self.cols];
        for (k, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (slot, &b) in acc.iter_mut().zip(self.row(k)) {
                *slot = (*slot + a as u64 * b as u64) % m;
            }
        }
        acc.into_iter().map(|a| a as u32).collect()
    }

    /// Matrix times column vector.
    pub fn mat_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "vector length");
        let m = self.ring.m as u64;
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u64;
                for (&a, &b) in self.row(i).iter().zip(v) {
                    acc += a as u64 * b as u64;
                    if acc >= 1 << 62 {
                        acc %= m;
                    }
                }
                (acc % m) as u32
            })
            .collect()
    }

    /// Kronecker product with `self` as the outer (major) factor.
    pub fn kron(&self, other: &ModMatrix) -> ModMatrix {
        let r = self.ring;
        let (rows, cols) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = Self::zero(r, rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == 0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.data[(i * other.rows + k) * cols + j * other.cols + l] = r.mul(a, other.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &ModMatrix) -> ModMatrix {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        ModMatrix { ring: self.ring, rows: self.rows, cols, data }
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &ModMatrix) -> ModMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        ModMatrix { ring: self.ring, rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> ModMatrix {
        let mut out = Self::zero(self.ring, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.data[a * cols.len() + b] = self.get(i, j);
            }
        }
        out
    }
}

/// `out += c·row`, touching only the listed support of `row`.
#[inline]
fn axpy(ring: ModRing, out: &mut [u32], c: u32, row: &[u32], support: &[usize]) {
    if c == 0 {
        return;
    }
    let m = ring.m as u64;
    for &k in support {
        out[k] = ((out[k] as u64 + c as u64 * row[k] as u64) % m) as u32;
    }
}

fn support_from(row: &[u32], start: usize) -> Vec<usize> {
    (start..row.len()).filter(|&k| row[k] != 0).collect()
}

fn leading(row: &[u32]) -> Option<usize> {
    row.iter().position(|&x| x != 0)
}

/// Howell normal form of the span of `rows`, returned as rows sorted by pivot.
pub(crate) fn howell_rows(ring: ModRing, rows: Vec<Vec<u32>>, width: usize) -> Vec<Vec<u32>> {
    let mut work: Vec<Vec<u32>> = rows.into_iter().filter(|r| r.iter().any(|&x| x != 0)).collect();
    let mut result: Vec<Vec<u32>> = Vec::new();
    for col in 0..width {
        if work.is_empty() {
            break;
        }
        let mut best: Option<(usize, u32)> = None;
        for (i, r) in work.iter().enumerate() {
            if r[col] != 0 {
                let v = ring.val(r[col]);
                if best.is_none_or(|(_, bv)| v < bv) {
                    best = Some((i, v));
                    if v == 0 {
                        break;
                    }
                }
            }
        }
        let Some((bi, _)) = best else { continue };
        let mut piv = work.swap_remove(bi);
        let (v, uinv) = ring.split(piv[col]);
        if uinv != 1 {
            for x in piv[col..].iter_mut() {
                *x = ring.mul(*x, uinv);
            }
        }
        let pv = ring.p.pow(v);
        let support = support_from(&piv, col);
        for r in work.iter_mut() {
            if r[col] != 0 {
                let q = r[col] / pv;
                axpy(ring, r, ring.neg(q % ring.m), &piv, &support);
            }
        }
        if v > 0 {
            let scale = ring.p_pow(ring.s - v);
            let extra: Vec<u32> = piv.iter().map(|&x| ring.mul(x, scale)).collect();
            if extra.iter().any(|&x| x != 0) {
                work.push(extra);
            }
        }
        work.retain(|r| r.iter().any(|&x| x != 0));
        result.push(piv);
    }
    // Reduce entries above each pivot into [0, pivot).
    for i in 0..result.len() {
        let pc = leading(&result[i]).expect("nonzero Howell row");
        let pv = result[i][pc];
        let support = support_from(&result[i], pc);
        let (head, tail) = result.split_at_mut(i);
        let piv = &tail[0];
        for r in head.iter_mut() {
            if r[pc] >= pv {
                let q = r[pc] / pv;
                axpy(ring, r, ring.neg(q), piv, &support);
            }
        }
    }
    result
}

/// A submodule of `R^n`, stored as its Howell basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Submodule {
    ring: ModRing,
    ambient: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Submodule {
    pub fn zero(ring: ModRing, ambient: usize) -> Self {
        Submodule { ring, ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ring: ModRing, ambient: usize) -> Self {
        Self::from_howell(ring, ambient, ModMatrix::identity(ring, ambient).to_rows())
    }

    pub fn from_generators(ring: ModRing, ambient: usize, gens: Vec<Vec<u32>>) -> Self {
        for g in &gens {
            assert_eq!(g.len(), ambient, "generator length");
        }
        Self::from_howell(ring, ambient, howell_rows(ring, gens, ambient))
    }

    fn from_howell(ring: ModRing, ambient: usize, rows: Vec<Vec<u32>>) -> Self {
        let pivots = rows.iter().map(|r| leading(r).unwrap()).collect();
        Submodule { ring, ambient, rows, pivots }
    }

    pub fn ring(&self) -> ModRing {
        self.ring
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn matrix(&self) -> ModMatrix {
        ModMatrix::from_reduced_rows(self.ring, self.ambient, &self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// `log_p` of the cardinality of the span.
    pub fn log_size(&self) -> u32 {
        self.rows.iter().zip(&self.pivots).map(|(r, &c)| self.ring.s - self.ring.val(r[c])).sum()
    }

    /// Canonical representative of `v` modulo the submodule.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let mut w = v.to_vec();
        for (r, &c) in self.rows.iter().zip(&self.pivots) {
            let pv = r[c];
            if w[c] >= pv {
                let q = w[c] / pv;
                let support = support_from(r, c);
                axpy(self.ring, &mut w, self.ring.neg(q), r, &support);
            }
        }
        w
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length");
        let mut w = v.to_vec();
        for (r, &c) in self.rows.iter().zip(&self.pivots) {
            if w[c] == 0 {
                continue;
            }
            let pv = r[c];
            if !w[c].is_multiple_of(pv) {
                return false;
            }
            let q = w[c] / pv;
            let support = support_from(r, c);
            axpy(self.ring, &mut w, self.ring.neg(q), r, &support);
        }
        w.iter().all(|&x| x == 0)
    }

    pub fn contains_submodule(&self, other: &Submodule) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    pub fn sum(&self, other: &Submodule) -> Submodule {
        assert_eq!(self.ambient, other.ambient);
        let mut gens = self.rows.clone();
        gens.extend(other.rows.iter().cloned());
        Submodule::from_generators(self.ring, self.ambient, gens)
    }

    /// Image of the submodule under `v ↦ v·m`.
    pub fn image(&self, m: &ModMatrix) -> Submodule {
        let gens = self.rows.iter().map(|r| m.vec_mul(r)).collect();
        Submodule::from_generators(self.ring, m.cols(), gens)
    }
}

pub fn howell(m: &ModMatrix) -> Submodule {
    Submodule::from_generators(m.ring(), m.cols(), m.to_rows())
}

/// Precomputed data for repeatedly solving `v·m = b`.
///
/// Only the first `tracked` rows of `m` carry coefficients in the answer; the
/// remaining rows may be used freely (useful for "solve modulo a submodule").
#[derive(Clone, Debug)]
pub struct Solver {
    ring: ModRing,
    width: usize,
    tracked: usize,
    /// Howell rows of `[m | I_tracked]` whose left part is nonzero.
    rows: Vec<(usize, Vec<u32>)>,
    kernel: Submodule,
}

impl Solver {
    pub fn new(m: &ModMatrix) -> Self {
        Self::with_extra(m, &ModMatrix::zero(m.ring(), 0, m.cols()))
    }

    /// Solver for `v·tracked + w·extra = b`, reporting only `v`.
    pub fn with_extra(tracked: &ModMatrix, extra: &ModMatrix) -> Self {
        let ring = tracked.ring();
        let width = tracked.cols();
        assert_eq!(extra.cols(), width);
        let t = tracked.rows();
        let mut rows = Vec::with_capacity(t + extra.rows());
        for i in 0..t {
            let mut r = tracked.row(i).to_vec();
            r.resize(width + t, 0);
            r[width + i] = 1 % ring.m;
            rows.push(r);
        }
        for i in 0..extra.rows() {
            let mut r = extra.row(i).to_vec();
            r.resize(width + t, 0);
            rows.push(r);
        }
        let h = howell_rows(ring, rows, width + t);
        let mut left = Vec::new();
        let mut kern = Vec::new();
        for r in h {
            let c = leading(&r).unwrap();
            if c < width {
                left.push((c, r));
            } else {
                kern.push(r[width..].to_vec());
            }
        }
        let kernel = Submodule::from_generators(ring, t, kern);
        Solver { ring, width, tracked: t, rows: left, kernel }
    }

    /// Rows `v` (tracked part only) with `v·tracked ∈ span(extra)`.
    pub fn kernel(&self) -> &Submodule {
        &self.kernel
    }

    pub fn solve(&self, b: &[u32]) -> Result<Option<Vec<u32>>, LinalgError> {
        if b.len() != self.width {
            return Err(LinalgError::Dimension { expected: self.width, got: b.len() });
        }
        let ring = self.ring;
        let mut w: Vec<u32> = b.iter().map(|&x| x % ring.m).collect();
        w.resize(self.width + self.tracked, 0);
        for (c, r) in &self.rows {
            if w[*c] == 0 {
                continue;
            }
            let pv = r[*c];
            if !w[*c].is_multiple_of(pv) {
                return Ok(None);
            }
            let q = w[*c] / pv;
            let support = support_from(r, *c);
            axpy(ring, &mut w, ring.neg(q), r, &support);
        }
        if w[..self.width].iter().any(|&x| x != 0) {
            return Ok(None);
        }
        Ok(Some(w[self.width..].iter().map(|&x| ring.neg(x)).collect()))
    }

    pub fn is_solvable(&self, b: &[u32]) -> Result<bool, LinalgError> {
        Ok(self.solve(b)?.is_some())
    }
}

/// `{v : v·m = 0}`.
pub fn kernel(m: &ModMatrix) -> Submodule {
    Solver::new(m).kernel
}

/// Some `v` with `v·m = b`, if one exists.
pub fn solve(m: &ModMatrix, b: &[u32]) -> Result<Option<Vec<u32>>, LinalgError> {
    Solver::new(m).solve(b)
}

pub fn membership(sub: &Submodule, v: &[u32]) -> Result<bool, LinalgError> {
    if v.len() != sub.ambient {
        return Err(LinalgError::Dimension { expected: sub.ambient, got: v.len() });
    }
    Ok(sub.contains(v))
}

/// Diagonalizes `rel` (rows are relations on `R^k`) by row and column
/// operations. Returns the diagonal, `V` and `V^{-1}` where the column
/// operations are `rel ↦ rel·V`.
fn smith_columns(ring: ModRing, rel: Vec<Vec<u32>>, k: usize) -> (Vec<u32>, ModMatrix, ModMatrix) {
    let mut a = rel;
    let mut v = ModMatrix::identity(ring, k);
    let mut vinv = ModMatrix::identity(ring, k);
    let mut diag = Vec::new();
    let rows = a.len();
    for t in 0..k.min(rows) {
        let mut best: Option<(usize, usize, u32)> = None;
        'search: for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 {
                    let val = ring.val(x);
                    if best.is_none_or(|(_, _, b)| val < b) {
                        best = Some((i, j, val));
                        if val == 0 {
                            break 'search;
                        }
                    }
                }
            }
        }
        let Some((bi, bj, _)) = best else { break };
        a.swap(t, bi);
        if bj != t {
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            for i in 0..k {
                let (x, y) = (v.get(i, t), v.get(i, bj));
                v.set(i, t, y);
                v.set(i, bj, x);
            }
            for c in 0..k {
                let (x, y) = (vinv.get(t, c), vinv.get(bj, c));
                vinv.set(t, c, y);
                vinv.set(bj, c, x);
            }
        }
        let (val, uinv) = ring.split(a[t][t]);
        for x in a[t].iter_mut() {
            *x = ring.mul(*x, uinv);
        }
        let pv = ring.p.pow(val);
        let pivot_row = a[t].clone();
        let support = support_from(&pivot_row, t);
        for row in a.iter_mut().skip(t + 1) {
            if row[t] != 0 {
                let q = row[t] / pv;
                axpy(ring, row, ring.neg(q), &pivot_row, &support);
            }
        }
        for j in t + 1..k {
            let x = a[t][j];
            if x == 0 {
                continue;
            }
            let q = x / pv;
            a[t][j] = 0;
            for i in 0..k {
                let nv = ring.sub(v.get(i, j), ring.mul(q, v.get(i, t)));
                v.set(i, j, nv);
            }
            for c in 0..k {
                let nv = ring.add(vinv.get(t, c), ring.mul(q, vinv.get(j, c)));
                vinv.set(t, c, nv);
            }
        }
        diag.push(pv);
    }
    (diag, v, vinv)
}

/// A finitely presented module `big/small ≅ ⊕ Z/p^{e_i}` with coordinate maps.
#[derive(Clone, Debug)]
pub struct FPModule {
    ring: ModRing,
    ambient: usize,
    exponents: Vec<u32>,
    /// `c ↦ y`: coefficients on Howell rows of `big` to coordinates.
    to_coord: ModMatrix,
    /// Coordinates back to ambient vectors.
    from_coord: ModMatrix,
    big_solver: Solver,
}

impl FPModule {
    pub fn ring(&self) -> ModRing {
        self.ring
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Exponents `e_i` of the invariant factors `p^{e_i}`, ascending.
    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn invariant_factors(&self) -> Vec<u64> {
        self.exponents.iter().map(|&e| (self.ring.p as u64).pow(e)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.exponents.iter().all(|&e| e == self.ring.s)
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn log_size(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// Coordinates of an element of `big`, each reduced mod its factor.
    pub fn to_coordinates(&self, w: &[u32]) -> Result<Vec<u32>, LinalgError> {
        let c = self.big_solver.solve(w)?.ok_or(LinalgError::NotInModule)?;
        Ok(self.normalize(&self.to_coord.vec_mul(&c)))
    }

    pub fn from_coordinates(&self, y: &[u32]) -> Vec<u32> {
        assert_eq!(y.len(), self.exponents.len(), "coordinate length");
        self.from_coord.vec_mul(y)
    }

    pub fn normalize(&self, y: &[u32]) -> Vec<u32> {
        y.iter().zip(&self.exponents).map(|(&x, &e)| x % self.ring.p.pow(e)).collect()
    }

    pub fn is_zero_element(&self, w: &[u32]) -> Result<bool, LinalgError> {
        Ok(self.to_coordinates(w)?.iter().all(|&x| x == 0))
    }
}

/// Presents `big/small`.
pub fn quotient(big: &Submodule, small: &Submodule) -> Result<FPModule, LinalgError> {
    let ring = big.ring;
    if big.ambient != small.ambient {
        return Err(LinalgError::Dimension { expected: big.ambient, got: small.ambient });
    }
    if !big.contains_submodule(small) {
        return Err(LinalgError::NotContained);
    }
    let bmat = big.matrix();
    let k = bmat.rows();
    let big_solver = Solver::new(&bmat);
    let mut rel: Vec<Vec<u32>> = big_solver.kernel().rows().to_vec();
    for r in small.rows() {
        rel.push(big_solver.solve(r)?.expect("containment checked"));
    }
    let rel = howell_rows(ring, rel, k);
    let (diag, v, vinv) = smith_columns(ring, rel, k);
    // Column t of the diagonal has order p^{val(d_t)}; columns past the
    // diagonal are free.
    let mut factors: Vec<(u32, usize)> = Vec::new();
    for t in 0..k {
        let e = if t < diag.len() { ring.val(diag[t]) } else { ring.s };
        if e > 0 {
            factors.push((e, t));
        }
    }
    factors.sort_by_key(|&(e, t)| (e, t));
    let exponents: Vec<u32> = factors.iter().map(|&(e, _)| e).collect();
    let cols: Vec<usize> = factors.iter().map(|&(_, t)| t).collect();
    let all_rows: Vec<usize> = (0..k).collect();
    let to_coord = v.submatrix(&all_rows, &cols);
    let from_coord = vinv.submatrix(&cols, &all_rows).mul(&bmat);
    Ok(FPModule { ring, ambient: big.ambient, exponents, to_coord, from_coord, big_solver })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, s: u32) -> ModRing {
        ModRing::new(p, s).unwrap()
    }

    fn span(r: ModRing, rows: &[Vec<u32>], width: usize) -> std::collections::BTreeSet<Vec<u32>> {
        let m = r.modulus();
        let mut out = std::collections::BTreeSet::new();
        let n = rows.len();
        let total = (m as usize).pow(n as u32);
        for idx in 0..total {
            let mut c = idx;
            let mut v = vec![0u32; width];
            for row in rows {
                let a = (c % m as usize) as u32;
                c /= m as usize;
                for (x, &y) in v.iter_mut().zip(row) {
                    *x = r.add(*x, r.mul(a, y));
                }
            }
            out.insert(v);
        }
        out
    }

    #[test]
    fn ring_guards() {
        assert_eq!(ModRing::new(4, 1), Err(LinalgError::NotPrime(4)));
        assert_eq!(ModRing::new(3, 0), Err(LinalgError::ZeroExponent));
        assert!(ModRing::new(2, 31).is_ok());
        assert!(ModRing::new(2, 32).is_err());
        let r = ring(3, 2);
        assert_eq!(r.inv(2), 5);
        assert_eq!(r.val(0), 2);
        assert_eq!(r.val(3), 1);
        assert_eq!(r.signed(8), -1);
    }

    #[test]
    fn howell_small_examples() {
        let r = ring(2, 2);
        let id = ModMatrix::identity(r, 2);
        assert_eq!(howell(&id).matrix(), id);
        let two = ModMatrix::from_rows(r, 1, &[vec![2]]);
        assert_eq!(howell(&two).rows(), &[vec![2]]);
        let m = ModMatrix::from_rows(r, 2, &[vec![1, 2], vec![0, 2]]);
        let h = howell(&m);
        assert_eq!(span(r, &m.to_rows(), 2), span(r, h.rows(), 2));
        assert_eq!(h.rows(), &[vec![1, 0], vec![0, 2]]);
    }

    #[test]
    fn howell_property_needs_closure_rows() {
        // span{(2,1)} over Z/4 contains (0,2); the Howell form must expose it.
        let r = ring(2, 2);
        let h = howell(&ModMatrix::from_rows(r, 2, &[vec![2, 1]]));
        assert_eq!(h.rows(), &[vec![2, 1], vec![0, 2]]);
        assert!(h.contains(&[0, 2]));
        assert!(!h.contains(&[0, 1]));
    }

    #[test]
    fn kernel_and_solve_examples() {
        let r9 = ring(3, 2);
        assert!(kernel(&ModMatrix::identity(r9, 3)).is_zero());
        let r4 = ring(2, 2);
        assert_eq!(kernel(&ModMatrix::from_rows(r4, 1, &[vec![0]])).rows(), &[vec![1]]);
        let two = ModMatrix::from_rows(r4, 1, &[vec![2]]);
        assert_eq!(kernel(&two).rows(), &[vec![2]]);
        assert_eq!(solve(&ModMatrix::identity(r9, 2), &[4, 7]).unwrap(), Some(vec![4, 7]));
        assert_eq!(solve(&two, &[1]).unwrap(), None);
        let v = solve(&two, &[2]).unwrap().unwrap();
        assert!(v == vec![1] || v == vec![3]);
        assert!(solve(&two, &[1, 1]).is_err());
    }

    #[test]
    fn quotient_examples() {
        let r4 = ring(2, 2);
        let line = Submodule::full(r4, 1);
        let two = Submodule::from_generators(r4, 1, vec![vec![2]]);
        let zero = Submodule::zero(r4, 1);
        assert_eq!(quotient(&line, &zero).unwrap().invariant_factors(), vec![4]);
        assert_eq!(quotient(&line, &two).unwrap().invariant_factors(), vec![2]);
        assert_eq!(quotient(&two, &zero).unwrap().invariant_factors(), vec![2]);
        assert_eq!(quotient(&two, &line).unwrap_err(), LinalgError::NotContained);
        assert!(membership(&zero, &[0]).unwrap());
        assert!(!membership(&two, &[1]).unwrap());
        assert!(membership(&two, &[2]).unwrap());
    }

    #[test]
    fn quotient_coordinates_round_trip() {
        let r = ring(3, 2);
        let big = Submodule::full(r, 3);
        let small = Submodule::from_generators(r, 3, vec![vec![3, 0, 0], vec![1, 3, 0]]);
        let q = quotient(&big, &small).unwrap();
        assert_eq!(q.log_size(), big.log_size() - small.log_size());
        for y0 in 0..3u32 {
            for y1 in 0..9u32 {
                let y = q.normalize(&[y0, y1]);
                let w = q.from_coordinates(&y);
                assert_eq!(q.to_coordinates(&w).unwrap(), y);
            }
        }
        assert!(q.is_zero_element(&[3, 0, 0]).unwrap());
        assert!(!q.is_zero_element(&[0, 0, 1]).unwrap());
    }

    #[test]
    fn solver_with_extra_ignores_extra_coefficients() {
        let r = ring(5, 1);
        let tracked = ModMatrix::from_rows(r, 3, &[vec![1, 1, 0]]);
        let extra = ModMatrix::from_rows(r, 3, &[vec![0, 1, 0], vec![0, 0, 1]]);
        let s = Solver::with_extra(&tracked, &extra);
        assert_eq!(s.solve(&[2, 4, 1]).unwrap(), Some(vec![2]));
        assert_eq!(s.solve(&[0, 3, 3]).unwrap(), Some(vec![0]));
    }

    #[test]
    fn smith_handles_rectangular_relations() {
        let r = ring(2, 3);
        let big = Submodule::full(r, 2);
        let small = Submodule::from_generators(r, 2, vec![vec![2, 4], vec![4, 0], vec![0, 4]]);
        let q = quotient(&big, &small).unwrap();
        assert_eq!(q.invariant_factors(), vec![2, 4]);
    }
}
