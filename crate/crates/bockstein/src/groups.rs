//! Finite p-groups given by multiplication tables, homomorphisms and characters.
//!
//! Element `0` is always the identity and elements are numbered in BFS order
//! from the generators, so every derived basis is deterministic.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::modular_linalg::{is_prime, quotient, LinalgError, ModRing, Submodule};

/// Largest order stored as a full multiplication table.
pub const MAX_TABLE_ORDER: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("group of order {order} is not a {p}-group")]
    NotPGroup { order: usize, p: u32 },
    #[error("group order exceeds {MAX_TABLE_ORDER}")]
    TooLarge,
    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),
    #[error("group axiom fails: {0}")]
    Axiom(String),
    #[error("map is not a homomorphism at ({0}, {1})")]
    NotHomomorphism(usize, usize),
    #[error("group is not abelian")]
    NotAbelian,
    #[error("character modulus {0} is not a power of {1}")]
    BadModulus(u64, u32),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Splits `q = p^t`, returning `(p, t)`.
pub fn prime_power(q: u64) -> Result<(u32, u32), GroupError> {
    if q < 2 {
        return Err(GroupError::NotPrimePower(q));
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap();
    if !is_prime(p) {
        return Err(GroupError::NotPrimePower(q));
    }
    let (mut r, mut t) = (q, 0);
    while r % p == 0 {
        r /= p;
        t += 1;
    }
    if r != 1 {
        return Err(GroupError::NotPrimePower(q));
    }
    Ok((p as u32, t))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    p: u32,
    order: usize,
    table: Vec<u32>,
    inverse: Vec<u32>,
    generators: Vec<usize>,
    name: String,
}

impl FiniteGroup {
    /// Closes `gens` under `mul`, numbering elements in BFS order.
    pub fn from_closure<T, F>(p: u32, name: &str, identity: T, gens: &[T], mul: F) -> Result<(Self, Vec<T>), GroupError>
    where
        T: Clone + Eq + Hash,
        F: Fn(&T, &T) -> T,
    {
        let mut index: HashMap<T, usize> = HashMap::new();
        let mut elems = vec![identity.clone()];
        index.insert(identity, 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let e = mul(&elems[i], g);
                if !index.contains_key(&e) {
                    if elems.len() >= MAX_TABLE_ORDER {
                        return Err(GroupError::TooLarge);
                    }
                    index.insert(e.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(e);
                }
            }
        }
        let n = elems.len();
        let mut table = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let e = mul(&elems[i], &elems[j]);
                let k = *index.get(&e).ok_or_else(|| GroupError::Axiom("product leaves the closure".into()))?;
                table[i * n + j] = k as u32;
            }
        }
        let generators = gens.iter().map(|g| index[g]).filter(|&g| g != 0).collect::<Vec<_>>();
        let group = Self::from_raw(p, name, table, generators)?;
        Ok((group, elems))
    }

    fn from_raw(p: u32, name: &str, table: Vec<u32>, mut generators: Vec<usize>) -> Result<Self, GroupError> {
        let n = (table.len() as f64).sqrt().round() as usize;
        let mut inverse = vec![u32::MAX; n];
        for i in 0..n {
            for j in 0..n {
                if table[i * n + j] == 0 {
                    inverse[i] = j as u32;
                    break;
                }
            }
            if inverse[i] == u32::MAX {
                return Err(GroupError::Axiom(format!("element {i} has no inverse")));
            }
        }
        let mut seen = Vec::new();
        generators.retain(|g| {
            let fresh = !seen.contains(g);
            seen.push(*g);
            fresh
        });
        let group = FiniteGroup { p, order: n, table, inverse, generators, name: name.to_string() };
        let mut k = n;
        while k.is_multiple_of(p as usize) {
            k /= p as usize;
        }
        if k != 1 {
            return Err(GroupError::NotPGroup { order: n, p });
        }
        Ok(group)
    }

    /// Builds a group from a full multiplication table with arbitrary labels.
    pub fn from_table(p: u32, table: &[Vec<usize>], generators: &[usize]) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(GroupError::InvalidTable("table must be square with entries below its size".into()));
        }
        if n > MAX_TABLE_ORDER {
            return Err(GroupError::TooLarge);
        }
        let e = (0..n)
            .find(|&i| (0..n).all(|j| table[i][j] == j && table[j][i] == j))
            .ok_or_else(|| GroupError::InvalidTable("no identity".into()))?;
        if generators.iter().any(|&g| g >= n) {
            return Err(GroupError::InvalidTable("generator out of range".into()));
        }
        let (group, elems) = Self::from_closure(p, "table", e, generators, |a, b| table[*a][*b])?;
        if elems.len() != n {
            return Err(GroupError::InvalidTable("generators do not generate the table".into()));
        }
        group.verify_axioms()?;
        Ok(group)
    }

    /// Permutation group on `0..degree`, with `(a·b)(i) = a(b(i))`.
    pub fn from_permutations(p: u32, degree: usize, gens: &[Vec<usize>]) -> Result<Self, GroupError> {
        for g in gens {
            let mut seen = vec![false; degree];
            if g.len() != degree || g.iter().any(|&x| x >= degree || std::mem::replace(&mut seen[x], true)) {
                return Err(GroupError::InvalidTable("not a permutation".into()));
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let (group, _) = Self::from_closure(p, "permutation", id, gens, |a, b| b.iter().map(|&i| a[i]).collect())?;
        Ok(group)
    }

    pub fn trivial(p: u32) -> Self {
        FiniteGroup { p, order: 1, table: vec![0], inverse: vec![0], generators: vec![], name: "1".into() }
    }

    pub fn cyclic(q: u64) -> Result<Self, GroupError> {
        Ok(Self::abelian_with_coordinates(&[q])?.0)
    }

    pub fn abelian(orders: &[u64]) -> Result<Self, GroupError> {
        Ok(Self::abelian_with_coordinates(orders)?.0)
    }

    /// `⊕ Z/q_i` together with its coordinate characters.
    pub fn abelian_with_coordinates(orders: &[u64]) -> Result<(Self, Vec<Character>), GroupError> {
        let mut p = None;
        for &q in orders {
            let (pp, _) = prime_power(q)?;
            if p.is_some_and(|x| x != pp) {
                return Err(GroupError::NotPGroup { order: orders.iter().product::<u64>() as usize, p: pp });
            }
            p = Some(pp);
        }
        let Some(p) = p else { return Ok((Self::trivial(2), vec![])) };
        let k = orders.len();
        let gens: Vec<Vec<u64>> = (0..k).map(|i| (0..k).map(|j| (i == j) as u64).collect()).collect();
        let name = if k == 1 {
            format!("Z/{}", orders[0])
        } else {
            orders.iter().map(|q| format!("Z/{q}")).collect::<Vec<_>>().join(" x ")
        };
        let (group, elems) =
            Self::from_closure(p, &name, vec![0u64; k], &gens, |a, b| (0..k).map(|i| (a[i] + b[i]) % orders[i]).collect())?;
        let chars = (0..k)
            .map(|i| Character::from_values(&group, elems.iter().map(|e| e[i] as u32).collect(), orders[i]))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((group, chars))
    }

    /// The quaternion group of order 8, generated by `i` and `j`.
    pub fn quaternion() -> Self {
        // Units 1, i, j, k as 0..4; products as (sign flip, unit).
        const UNIT: [[(bool, u8); 4]; 4] = [
            [(false, 0), (false, 1), (false, 2), (false, 3)],
            [(false, 1), (true, 0), (false, 3), (true, 2)],
            [(false, 2), (true, 3), (true, 0), (false, 1)],
            [(false, 3), (false, 2), (true, 1), (true, 0)],
        ];
        let mul = |a: &(bool, u8), b: &(bool, u8)| {
            let (flip, u) = UNIT[a.1 as usize][b.1 as usize];
            (a.0 ^ b.0 ^ flip, u)
        };
        let (g, _) = Self::from_closure(2, "Q8", (false, 0), &[(false, 1), (false, 2)], mul).unwrap();
        g
    }

    pub fn heisenberg(q: u64) -> Result<Self, GroupError> {
        Ok(Heisenberg::new(q)?.group.as_ref().clone())
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    pub fn pow(&self, a: usize, k: u64) -> usize {
        let mut acc = 0;
        for _ in 0..k {
            acc = self.mul(acc, a);
        }
        acc
    }

    pub fn element_order(&self, a: usize) -> usize {
        let (mut x, mut k) = (a, 1);
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        (0..self.order).map(|g| self.element_order(g)).max().unwrap_or(1)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    /// Spanning tree of the right Cayley graph: `parent[g] = (h, j)` with
    /// `g = h·gens[j]`, listed in BFS order.
    pub fn cayley_tree(&self) -> Vec<(usize, usize, usize)> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut order = Vec::with_capacity(self.order);
        let mut queue = VecDeque::from([0usize]);
        while let Some(h) = queue.pop_front() {
            for (j, &s) in self.generators.iter().enumerate() {
                let g = self.mul(h, s);
                if !seen[g] {
                    seen[g] = true;
                    order.push((g, h, j));
                    queue.push_back(g);
                }
            }
        }
        order
    }

    /// Exhaustive axiom check up to order 64, seeded sampling above.
    pub fn verify_axioms(&self) -> Result<(), GroupError> {
        let n = self.order;
        for a in 0..n {
            if self.mul(0, a) != a || self.mul(a, 0) != a {
                return Err(GroupError::Axiom(format!("identity law at {a}")));
            }
            if self.mul(a, self.inv(a)) != 0 || self.mul(self.inv(a), a) != 0 {
                return Err(GroupError::Axiom(format!("inverse law at {a}")));
            }
        }
        let assoc = |a: usize, b: usize, c: usize| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c));
        if n <= 64 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !assoc(a, b, c) {
                            return Err(GroupError::Axiom(format!("associativity at ({a},{b},{c})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..100_000 {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if !assoc(a, b, c) {
                    return Err(GroupError::Axiom(format!("associativity at ({a},{b},{c})")));
                }
            }
        }
        if self.cayley_tree().len() + 1 != n {
            return Err(GroupError::Axiom("generators do not generate".into()));
        }
        Ok(())
    }
}

/// A homomorphism `χ: G → Z/q` with `q = p^t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    modulus: u64,
    values: Vec<u32>,
}

impl Character {
    pub fn from_values(g: &FiniteGroup, values: Vec<u32>, modulus: u64) -> Result<Self, GroupError> {
        let (p, _) = prime_power(modulus)?;
        if p != g.p() && g.order() > 1 {
            return Err(GroupError::BadModulus(modulus, g.p()));
        }
        if values.len() != g.order() {
            return Err(GroupError::InvalidTable("character needs one value per element".into()));
        }
        let values: Vec<u32> = values.into_iter().map(|v| (v as u64 % modulus) as u32).collect();
        let chi = Character { modulus, values };
        for a in 0..g.order() {
            for b in 0..g.order() {
                if chi.values[g.mul(a, b)] as u64 != (chi.values[a] as u64 + chi.values[b] as u64) % modulus {
                    return Err(GroupError::NotHomomorphism(a, b));
                }
            }
        }
        Ok(chi)
    }

    /// Extends generator images along the Cayley tree and checks the result.
    pub fn from_generator_images(g: &FiniteGroup, images: &[i64], modulus: u64) -> Result<Self, GroupError> {
        if images.len() != g.generators().len() {
            return Err(GroupError::InvalidTable(format!(
                "expected {} generator images, got {}",
                g.generators().len(),
                images.len()
            )));
        }
        let mut values = vec![0u32; g.order()];
        for (x, h, j) in g.cayley_tree() {
            values[x] = ((values[h] as i64 + images[j]).rem_euclid(modulus as i64)) as u32;
        }
        Self::from_values(g, values, modulus)
    }

    pub fn zero(g: &FiniteGroup, modulus: u64) -> Self {
        Character { modulus, values: vec![0; g.order()] }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    #[inline]
    pub fn at(&self, g: usize) -> u32 {
        self.values[g]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn add(&self, other: &Character) -> Character {
        assert_eq!(self.modulus, other.modulus);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| ((a as u64 + b as u64) % self.modulus) as u32)
            .collect();
        Character { modulus: self.modulus, values }
    }

    pub fn scale(&self, c: i64) -> Character {
        let q = self.modulus as i64;
        let values = self.values.iter().map(|&a| ((a as i64 * c).rem_euclid(q)) as u32).collect();
        Character { modulus: self.modulus, values }
    }

    /// Reduction into `R = Z/p^s`; requires `p^s | q`.
    pub fn reduce(&self, ring: ModRing) -> Vec<u32> {
        assert_eq!(self.modulus % ring.modulus() as u64, 0, "cannot reduce Z/{} to Z/{}", self.modulus, ring.modulus());
        self.values.iter().map(|&v| v % ring.modulus()).collect()
    }

    /// Pullback along a homomorphism into the character's group.
    /// The character `χ̄` on the target with `χ̄∘π = χ`; fails unless `χ` is
    /// constant on the fibres of `π`.
    pub fn pushforward(&self, pi: &GroupHom) -> Result<Character, GroupError> {
        let mut values = vec![None; pi.target().order()];
        for g in 0..pi.source().order() {
            let slot = &mut values[pi.apply(g)];
            match slot {
                Some(v) if *v != self.values[g] => return Err(GroupError::NotHomomorphism(g, 0)),
                _ => *slot = Some(self.values[g]),
            }
        }
        let values = values.into_iter().map(|v| v.unwrap_or(0)).collect();
        Character::from_values(pi.target(), values, self.modulus)
    }

    pub fn pullback(&self, hom: &GroupHom) -> Character {
        Character { modulus: self.modulus, values: hom.image.iter().map(|&h| self.values[h]).collect() }
    }
}

#[derive(Clone, Debug)]
pub struct GroupHom {
    source: Arc<FiniteGroup>,
    target: Arc<FiniteGroup>,
    image: Vec<usize>,
}

impl GroupHom {
    pub fn new(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>, image: Vec<usize>) -> Result<Self, GroupError> {
        if image.len() != source.order() || image.iter().any(|&x| x >= target.order()) {
            return Err(GroupError::InvalidTable("image map has the wrong shape".into()));
        }
        for a in 0..source.order() {
            for b in 0..source.order() {
                if image[source.mul(a, b)] != target.mul(image[a], image[b]) {
                    return Err(GroupError::NotHomomorphism(a, b));
                }
            }
        }
        Ok(GroupHom { source, target, image })
    }

    pub fn identity(g: Arc<FiniteGroup>) -> Self {
        let image = (0..g.order()).collect();
        GroupHom { source: g.clone(), target: g, image }
    }

    pub fn source(&self) -> &Arc<FiniteGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteGroup> {
        &self.target
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    #[inline]
    pub fn apply(&self, g: usize) -> usize {
        self.image[g]
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.order()];
        for &h in &self.image {
            hit[h] = true;
        }
        hit.into_iter().all(|x| x)
    }

    pub fn kernel(&self) -> Vec<usize> {
        (0..self.source.order()).filter(|&g| self.image[g] == 0).collect()
    }

    pub fn compose(&self, after: &GroupHom) -> GroupHom {
        assert!(Arc::ptr_eq(&self.target, &after.source) || *self.target == *after.source);
        let image = self.image.iter().map(|&h| after.image[h]).collect();
        GroupHom { source: self.source.clone(), target: after.target.clone(), image }
    }
}

/// `G/∩ker χ_i`, realized as the subgroup of `⊕ Z/q_i` hit by `(χ_i)`.
pub fn coimage(g: &Arc<FiniteGroup>, chars: &[Character]) -> Result<(Arc<FiniteGroup>, GroupHom), GroupError> {
    let tuple = |x: usize| chars.iter().map(|c| c.at(x)).collect::<Vec<u32>>();
    let gens: Vec<Vec<u32>> = g.generators().iter().map(|&s| tuple(s)).collect();
    let mods: Vec<u64> = chars.iter().map(|c| c.modulus()).collect();
    let k = chars.len();
    let (h, elems) = FiniteGroup::from_closure(g.p(), "coimage", vec![0u32; k], &gens, |a, b| {
        (0..k).map(|i| ((a[i] as u64 + b[i] as u64) % mods[i]) as u32).collect()
    })?;
    let index: HashMap<Vec<u32>, usize> = elems.into_iter().enumerate().map(|(i, e)| (e, i)).collect();
    let image = (0..g.order()).map(|x| index[&tuple(x)]).collect();
    let h = Arc::new(h);
    let pi = GroupHom { source: g.clone(), target: h.clone(), image };
    Ok((h, pi))
}

/// `H ≅ ⊕ Z/p^{t_i}` with `t_1 ≤ … ≤ t_c`.
#[derive(Clone, Debug)]
pub struct AbelianDecomposition {
    pub generators: Vec<usize>,
    pub orders: Vec<u64>,
    pub characters: Vec<Character>,
}

pub fn decompose_abelian(h: &FiniteGroup) -> Result<AbelianDecomposition, GroupError> {
    if !h.is_abelian() {
        return Err(GroupError::NotAbelian);
    }
    if h.order() == 1 {
        return Ok(AbelianDecomposition { generators: vec![], orders: vec![], characters: vec![] });
    }
    let (_, e) = prime_power(h.exponent() as u64)?;
    let ring = ModRing::new(h.p() as u64, e)?;
    let m = h.generators().len();
    let mut coords = vec![vec![0u32; m]; h.order()];
    for (x, parent, j) in h.cayley_tree() {
        let mut c = coords[parent].clone();
        c[j] = ring.add(c[j], 1);
        coords[x] = c;
    }
    let mut rels = Vec::new();
    for x in 0..h.order() {
        for (j, &s) in h.generators().iter().enumerate() {
            let y = h.mul(x, s);
            let mut r = coords[x].clone();
            r[j] = ring.add(r[j], 1);
            for (a, &b) in r.iter_mut().zip(&coords[y]) {
                *a = ring.sub(*a, b);
            }
            rels.push(r);
        }
    }
    let q = quotient(&Submodule::full(ring, m), &Submodule::from_generators(ring, m, rels))?;
    let mut generators = Vec::new();
    let mut orders = Vec::new();
    for (i, &ei) in q.exponents().iter().enumerate() {
        let mut unit = vec![0u32; q.rank()];
        unit[i] = 1;
        let c = q.from_coordinates(&unit);
        let mut x = 0;
        for (j, &cj) in c.iter().enumerate() {
            x = h.mul(x, h.pow(h.generators()[j], cj as u64));
        }
        generators.push(x);
        orders.push((h.p() as u64).pow(ei));
    }
    let mut char_values = vec![vec![0u32; h.order()]; q.rank()];
    for x in 0..h.order() {
        let y = q.to_coordinates(&coords[x])?;
        for (i, &yi) in y.iter().enumerate() {
            char_values[i][x] = yi;
        }
    }
    let characters = char_values
        .into_iter()
        .zip(&orders)
        .map(|(v, &o)| Character::from_values(h, v, o))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AbelianDecomposition { generators, orders, characters })
}

/// `U_3(Z/q)` with its matrix coordinates `(a, b, c)` for `[[1,a,c],[0,1,b],[0,0,1]]`.
#[derive(Clone, Debug)]
pub struct Heisenberg {
    pub group: Arc<FiniteGroup>,
    pub modulus: u64,
    pub entries: Vec<[u32; 3]>,
    /// The generators with a single 1 in position (1,2), (2,3) and (1,3).
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl Heisenberg {
    pub fn new(q: u64) -> Result<Self, GroupError> {
        let (p, _) = prime_power(q)?;
        let mul = |u: &[u64; 3], v: &[u64; 3]| [(u[0] + v[0]) % q, (u[1] + v[1]) % q, (u[2] + v[2] + u[0] * v[1]) % q];
        let gens = [[1, 0, 0], [0, 1, 0]];
        let (group, elems) = FiniteGroup::from_closure(p, &format!("U3(Z/{q})"), [0u64; 3], &gens, mul)?;
        let entries: Vec<[u32; 3]> = elems.iter().map(|e| [e[0] as u32, e[1] as u32, e[2] as u32]).collect();
        let find = |t: [u32; 3]| entries.iter().position(|e| *e == t).unwrap();
        let (x, y, z) = (find([1, 0, 0]), find([0, 1, 0]), find([0, 0, 1 % q as u32]));
        Ok(Heisenberg { group: Arc::new(group), modulus: q, entries, x, y, z })
    }

    /// Entry `(1,2)` as a character.
    pub fn chi(&self) -> Character {
        Character { modulus: self.modulus, values: self.entries.iter().map(|e| e[0]).collect() }
    }

    /// Entry `(2,3)` as a character.
    pub fn psi(&self) -> Character {
        Character { modulus: self.modulus, values: self.entries.iter().map(|e| e[1]).collect() }
    }
}
