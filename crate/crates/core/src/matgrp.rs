//! Brute-force group engine over `SL2(Z/NZ)`.
//!
//! The genus invariants are defined combinatorially: the index of the
//! symmetrized subgroup, the number of right cosets fixed by `S` and by `R`,
//! and the number of orbits of `<T>` on the right coset space. This module
//! computes all of them by exhaustive enumeration, which is exactly what the
//! closed forms in [`crate::formulas`] are checked against.

use std::collections::VecDeque;
use std::fmt;
use std::ops::Mul;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::arith::{self, gcd, inverse_mod};
use crate::error::{Error, Result};
use crate::families::{self, SubgroupSpec};
use crate::formulas::{genus_from_invariants, InvariantSet, Method};

pub const DEFAULT_MAX_SL2_ELEMENTS: u64 = 10_000_000;

/// Largest modulus the engine accepts; keeps packed keys and products in range.
pub const MAX_MODULUS: u64 = 1 << 16;

/// Engine limits shared by every brute-force routine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub max_sl2_elements: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_sl2_elements: DEFAULT_MAX_SL2_ELEMENTS,
        }
    }
}

impl EngineConfig {
    pub fn with_cap(max_sl2_elements: u64) -> Self {
        EngineConfig { max_sl2_elements }
    }

    /// Fails if enumerating `SL2(Z/nZ)` would exceed the cap.
    pub fn check(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::ZeroModulus);
        }
        if n > MAX_MODULUS {
            return Err(Error::CapExceeded {
                n,
                count: u64::MAX,
                cap: self.max_sl2_elements,
            });
        }
        let count = arith::sl2_order(n)?;
        if count > self.max_sl2_elements {
            return Err(Error::CapExceeded {
                n,
                count,
                cap: self.max_sl2_elements,
            });
        }
        Ok(count)
    }
}

/// A 2x2 matrix `[[a, b], [c, d]]` over `Z/nZ`, entries reduced into `[0, n)`.
///
/// The derived ordering compares `(n, a, b, c, d)`, so for a fixed modulus
/// it is the row-major lexicographic order used for canonical coset
/// representatives.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    n: u32,
    a: u32,
    b: u32,
    c: u32,
    d: u32,
}

impl Mat2 {
    /// Builds a matrix from signed entries, reducing each mod `n`.
    ///
    /// Panics if `n` is zero or exceeds [`MAX_MODULUS`].
    pub fn new(n: u64, a: i64, b: i64, c: i64, d: i64) -> Mat2 {
        assert!((1..=MAX_MODULUS).contains(&n), "modulus {n} out of range");
        let r = |x: i64| arith::reduce(x, n) as u32;
        Mat2 {
            n: n as u32,
            a: r(a),
            b: r(b),
            c: r(c),
            d: r(d),
        }
    }

    fn raw(n: u64, a: u64, b: u64, c: u64, d: u64) -> Mat2 {
        Mat2 {
            n: n as u32,
            a: a as u32,
            b: b as u32,
            c: c as u32,
            d: d as u32,
        }
    }

    pub fn identity(n: u64) -> Mat2 {
        Mat2::new(n, 1, 0, 0, 1)
    }

    pub fn minus_identity(n: u64) -> Mat2 {
        Mat2::new(n, -1, 0, 0, -1)
    }

    pub fn scalar(n: u64, s: i64) -> Mat2 {
        Mat2::new(n, s, 0, 0, s)
    }

    pub fn diag(n: u64, a: i64, d: i64) -> Mat2 {
        Mat2::new(n, a, 0, 0, d)
    }

    pub fn modulus(&self) -> u64 {
        self.n as u64
    }

    pub fn entries(&self) -> [u64; 4] {
        [self.a as u64, self.b as u64, self.c as u64, self.d as u64]
    }

    pub fn det(&self) -> u64 {
        let n = self.n as u64;
        let [a, b, c, d] = self.entries();
        (a * d % n + n - b * c % n) % n
    }

    pub fn has_unit_det(&self) -> bool {
        gcd(self.det(), self.modulus()) == 1
    }

    pub fn is_sl2(&self) -> bool {
        self.det() == 1 % self.modulus()
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let n = self.modulus();
        let di = inverse_mod(self.det(), n)?;
        let [a, b, c, d] = self.entries();
        Some(Mat2::raw(
            n,
            d * di % n,
            (n - b) % n * di % n,
            (n - c) % n * di % n,
            a * di % n,
        ))
    }

    pub fn pow(&self, mut e: u64) -> Mat2 {
        let mut base = *self;
        let mut acc = Mat2::identity(self.modulus());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn conjugate_by(&self, g: &Mat2) -> Option<Mat2> {
        Some(*g * *self * g.inverse()?)
    }

    /// Packed key; monotone in the lexicographic `(a, b, c, d)` order.
    pub fn key(&self) -> u64 {
        let n = self.n as u64;
        ((self.a as u64 * n + self.b as u64) * n + self.c as u64) * n + self.d as u64
    }

    pub fn from_key(n: u64, key: u64) -> Mat2 {
        Mat2::raw(
            n,
            key / (n * n * n) % n,
            key / (n * n) % n,
            key / n % n,
            key % n,
        )
    }

    pub fn try_mul(&self, rhs: &Mat2) -> Result<Mat2> {
        if self.n != rhs.n {
            return Err(Error::ModulusMismatch(self.modulus(), rhs.modulus()));
        }
        Ok(*self * *rhs)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        debug_assert_eq!(self.n, rhs.n, "modulus mismatch");
        let n = self.n as u64;
        let [a, b, c, d] = self.entries();
        let [e, f, g, h] = rhs.entries();
        Mat2::raw(
            n,
            (a * e + b * g) % n,
            (a * f + b * h) % n,
            (c * e + d * g) % n,
            (c * f + d * h) % n,
        )
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]] mod {}",
            self.a, self.b, self.c, self.d, self.n
        )
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `T`, `S` and `R`: the stabilizers of the cusp at infinity, of `i` and of
/// the cube root of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StandardGenerators {
    pub t: Mat2,
    pub s: Mat2,
    pub r: Mat2,
}

impl StandardGenerators {
    pub fn new(n: u64) -> Self {
        StandardGenerators {
            t: Mat2::new(n, 1, 1, 0, 1),
            s: Mat2::new(n, 0, -1, 1, 0),
            r: Mat2::new(n, 0, -1, 1, -1),
        }
    }
}

/// All of `SL2(Z/nZ)` in lexicographic order.
pub fn sl2_enumerate(n: u64, config: &EngineConfig) -> Result<Vec<Mat2>> {
    let count = config.check(n)?;
    let mut out = Vec::with_capacity(count as usize);
    for a in 0..n {
        let g = gcd(a, n);
        let (a_red, n_red) = (a / g, n / g);
        let a_inv = inverse_mod(a_red % n_red, n_red).expect("a/g is a unit mod n/g");
        for b in 0..n {
            for c in 0..n {
                // solve a*d ≡ 1 + b*c (mod n)
                let t = (1 + b * c) % n;
                if t % g != 0 {
                    continue;
                }
                let d0 = (t / g) * a_inv % n_red;
                for k in 0..g {
                    out.push(Mat2::raw(n, a, b, c, d0 + k * n_red));
                }
            }
        }
    }
    debug_assert_eq!(out.len() as u64, count);
    Ok(out)
}

/// Closure of `gens` under multiplication inside `GL2(Z/nZ)`, identity
/// included. Returned in lexicographic order.
pub fn close_group(n: u64, gens: &[Mat2]) -> Result<Vec<Mat2>> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    for g in gens {
        if g.modulus() != n {
            return Err(Error::ModulusMismatch(n, g.modulus()));
        }
        if !g.has_unit_det() {
            return Err(Error::NonUnitDeterminant(g.to_string()));
        }
    }
    let id = Mat2::identity(n);
    let mut seen: FxHashSet<u64> = FxHashSet::default();
    seen.insert(id.key());
    let mut elements = vec![id];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x * *g;
            if seen.insert(y.key()) {
                elements.push(y);
                queue.push_back(y);
            }
        }
    }
    elements.sort_unstable();
    Ok(elements)
}

/// A finite subgroup of `SL2(Z/nZ)` given as an explicit element set.
#[derive(Debug, Clone)]
pub struct GeneratedSubgroup {
    n: u64,
    elements: Vec<Mat2>,
    members: FxHashSet<u64>,
    contains_minus_identity: bool,
}

impl GeneratedSubgroup {
    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &Mat2) -> bool {
        g.modulus() == self.n && self.members.contains(&g.key())
    }

    pub fn contains_minus_identity(&self) -> bool {
        self.contains_minus_identity
    }

    /// Index of the image in `PSL2(Z/nZ)`; equals `|SL2| / |self|` because
    /// the subgroup always contains `-I`.
    pub fn psl2_index(&self) -> Result<u64> {
        let total = arith::sl2_order(self.n)?;
        let order = self.order() as u64;
        if total % order != 0 {
            return Err(Error::Internal(format!(
                "subgroup order {order} does not divide |SL2(Z/{}Z)| = {total}",
                self.n
            )));
        }
        Ok(total / order)
    }

    /// Conjugate subgroup `g H g^-1`.
    pub fn conjugate(&self, g: &Mat2) -> Result<GeneratedSubgroup> {
        let g_inv = g
            .inverse()
            .ok_or_else(|| Error::NonUnitDeterminant(g.to_string()))?;
        let mut elements: Vec<Mat2> = self.elements.iter().map(|h| *g * *h * g_inv).collect();
        elements.sort_unstable();
        Ok(GeneratedSubgroup::from_elements(self.n, elements))
    }

    fn from_elements(n: u64, elements: Vec<Mat2>) -> GeneratedSubgroup {
        let members: FxHashSet<u64> = elements.iter().map(Mat2::key).collect();
        let contains_minus_identity = members.contains(&Mat2::minus_identity(n).key());
        GeneratedSubgroup {
            n,
            elements,
            members,
            contains_minus_identity,
        }
    }
}

/// `±<gens> ∩ SL2(Z/nZ)`: close `{-I} ∪ gens` in `GL2`, keep the
/// determinant-one elements.
pub fn close_subgroup(n: u64, gens: &[Mat2]) -> Result<GeneratedSubgroup> {
    let mut all = Vec::with_capacity(gens.len() + 1);
    all.push(Mat2::minus_identity(n));
    all.extend_from_slice(gens);
    let group = close_group(n, &all)?;
    let sl2_part: Vec<Mat2> = group.into_iter().filter(Mat2::is_sl2).collect();
    Ok(GeneratedSubgroup::from_elements(n, sl2_part))
}

/// Right cosets `H x` of a subgroup in `SL2(Z/nZ)`, each represented by its
/// lexicographically least element.
#[derive(Debug, Clone)]
pub struct CosetSpace {
    subgroup: GeneratedSubgroup,
    reps: Vec<Mat2>,
    lookup: FxHashMap<u64, u32>,
}

impl CosetSpace {
    pub fn new(subgroup: GeneratedSubgroup, config: &EngineConfig) -> Result<CosetSpace> {
        let n = subgroup.modulus();
        let all = sl2_enumerate(n, config)?;
        let mut lookup: FxHashMap<u64, u32> =
            FxHashMap::with_capacity_and_hasher(all.len(), Default::default());
        let mut reps = Vec::new();
        // Scanning in lexicographic order, the first unassigned element of
        // each coset is its minimum.
        for x in all {
            if lookup.contains_key(&x.key()) {
                continue;
            }
            let idx = reps.len() as u32;
            reps.push(x);
            for h in subgroup.elements() {
                lookup.insert((*h * x).key(), idx);
            }
        }
        Ok(CosetSpace {
            subgroup,
            reps,
            lookup,
        })
    }

    pub fn subgroup(&self) -> &GeneratedSubgroup {
        &self.subgroup
    }

    pub fn reps(&self) -> &[Mat2] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Index of the coset containing `x`, or `None` if `x` is not in `SL2`.
    pub fn coset_of(&self, x: &Mat2) -> Option<usize> {
        if x.modulus() != self.subgroup.modulus() {
            return None;
        }
        self.lookup.get(&x.key()).map(|&i| i as usize)
    }

    fn action(&self, idx: usize, g: &Mat2) -> usize {
        self.coset_of(&(self.reps[idx] * *g))
            .expect("SL2 is closed under multiplication")
    }

    /// Number of cosets `Hx` with `Hxg = Hx`.
    ///
    /// Panics if `g` is not in `SL2(Z/nZ)`.
    pub fn count_fixed(&self, g: &Mat2) -> usize {
        assert!(g.is_sl2(), "count_fixed needs a determinant-one matrix");
        (0..self.len()).filter(|&i| self.action(i, g) == i).count()
    }

    /// Orbit sizes of `<g>` acting on the cosets by right multiplication,
    /// in order of each orbit's smallest coset index.
    pub fn orbit_sizes(&self, g: &Mat2) -> Vec<usize> {
        assert!(g.is_sl2(), "orbit counting needs a determinant-one matrix");
        let mut seen = vec![false; self.len()];
        let mut sizes = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut size = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                size += 1;
                i = self.action(i, g);
            }
            sizes.push(size);
        }
        sizes
    }

    pub fn count_orbits(&self, g: &Mat2) -> usize {
        self.orbit_sizes(g).len()
    }
}

pub fn coset_space(subgroup: GeneratedSubgroup, config: &EngineConfig) -> Result<CosetSpace> {
    CosetSpace::new(subgroup, config)
}

/// Invariants of a realized subgroup, counted directly from the coset space.
pub fn invariants_of_subgroup(
    subgroup: GeneratedSubgroup,
    config: &EngineConfig,
) -> Result<InvariantSet> {
    let n = subgroup.modulus();
    let index = subgroup.psl2_index()?;
    let cosets = CosetSpace::new(subgroup, config)?;
    debug_assert_eq!(cosets.len() as u64, index);
    let gens = StandardGenerators::new(n);
    let eps2 = cosets.count_fixed(&gens.s) as u64;
    let eps3 = cosets.count_fixed(&gens.r) as u64;
    let eps_inf = cosets.count_orbits(&gens.t) as u64;
    let genus = genus_from_invariants(index, eps2, eps3, eps_inf)?;
    Ok(InvariantSet {
        psl2_index: index,
        eps2,
        eps3,
        eps_inf,
        genus,
        method: Method::Bruteforce,
    })
}

/// Realizes the family's subgroup and counts its invariants by brute force.
pub fn invariants_bruteforce(spec: &SubgroupSpec, config: &EngineConfig) -> Result<InvariantSet> {
    spec.validate()?;
    let n = spec.modulus()?;
    config.check(n)?;
    let gens = families::subgroup_generators(spec)?;
    let subgroup = close_subgroup(n, &gens)?;
    invariants_of_subgroup(subgroup, config)
}
