//! Explicit generators for the subgroups `H <= GL2(Z/NZ)` behind each
//! family of modular curves, plus the coset transversals used as extra
//! verification for the Cartan families.

use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::arith::{self, crt_lift, euler_phi, factorize, gcd, inverse_mod, is_prime};
use crate::error::{Error, Result};
use crate::matgrp::{close_group, Mat2, MAX_MODULUS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "x0")]
    X0,
    #[serde(rename = "x1")]
    X1,
    #[serde(rename = "xpm1")]
    Xpm1,
    #[serde(rename = "xfull")]
    Xfull,
    #[serde(rename = "xarith")]
    Xarith,
    #[serde(rename = "arith1")]
    Arith1,
    #[serde(rename = "arithpm1")]
    ArithPm1,
    #[serde(rename = "sp")]
    Sp,
    #[serde(rename = "sp+")]
    SpPlus,
    #[serde(rename = "sp*")]
    SpStar,
    #[serde(rename = "ns")]
    Ns,
    #[serde(rename = "ns+")]
    NsPlus,
    #[serde(rename = "ns*")]
    NsStar,
    #[serde(rename = "s4")]
    S4,
}

impl Family {
    pub const ALL: [Family; 14] = [
        Family::X0,
        Family::X1,
        Family::Xpm1,
        Family::Xfull,
        Family::Xarith,
        Family::Arith1,
        Family::ArithPm1,
        Family::Sp,
        Family::SpPlus,
        Family::SpStar,
        Family::Ns,
        Family::NsPlus,
        Family::NsStar,
        Family::S4,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::X0 => "x0",
            Family::X1 => "x1",
            Family::Xpm1 => "xpm1",
            Family::Xfull => "xfull",
            Family::Xarith => "xarith",
            Family::Arith1 => "arith1",
            Family::ArithPm1 => "arithpm1",
            Family::Sp => "sp",
            Family::SpPlus => "sp+",
            Family::SpStar => "sp*",
            Family::Ns => "ns",
            Family::NsPlus => "ns+",
            Family::NsStar => "ns*",
            Family::S4 => "s4",
        }
    }

    /// Two-parameter families, indexed by `(M, N)` at modulus `M * N`.
    pub fn is_arith(self) -> bool {
        matches!(self, Family::Arith1 | Family::ArithPm1)
    }

    pub fn is_nonsplit(self) -> bool {
        matches!(self, Family::Ns | Family::NsPlus | Family::NsStar)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.tag() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown family tag `{s}`")))
    }
}

/// `Z/nZ[α]` with `α² = uα − v`, required to be inert at every prime
/// dividing `n` with discriminant `u² − 4v` prime to `n`.
///
/// Elements `a + bα` are written as pairs `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NonsplitAlgebra {
    pub u: u64,
    pub v: u64,
    pub n: u64,
}

impl NonsplitAlgebra {
    pub fn new(u: u64, v: u64, n: u64) -> Result<NonsplitAlgebra> {
        let alg = NonsplitAlgebra { u, v, n };
        if n < 2 || !alg.is_valid()? {
            return Err(Error::InvalidSpec(format!(
                "x^2 - {u}x + {v} does not give an inert algebra mod {n}"
            )));
        }
        Ok(alg)
    }

    fn is_valid(&self) -> Result<bool> {
        let disc = (self.u as i128) * (self.u as i128) - 4 * (self.v as i128);
        let disc_mod = disc.rem_euclid(self.n as i128) as u64;
        if gcd(disc_mod, self.n) != 1 {
            return Ok(false);
        }
        for p in factorize(self.n)?.primes() {
            let (u, v) = (self.u % p, self.v % p);
            if (0..p).any(|x| (x * x + p * p - u * x % p + v) % p == 0) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn mul(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        let n = self.n as u128;
        let (a, b) = (x.0 as u128, x.1 as u128);
        let (c, d) = (y.0 as u128, y.1 as u128);
        let (u, v) = (self.u as u128 % n, self.v as u128 % n);
        let bd = b * d % n;
        // (a + bα)(c + dα) = ac − bd·v + (ad + bc + bd·u)α
        let re = (a * c % n + n - bd * v % n) % n;
        let im = (a * d + b * c + bd * u) % n;
        (re as u64, im as u64)
    }

    /// `a + b(u − α)`.
    pub fn conj(&self, x: (u64, u64)) -> (u64, u64) {
        let n = self.n;
        ((x.0 + x.1 * (self.u % n)) % n, (n - x.1 % n) % n)
    }

    /// `x · conj(x) = a² + abu + b²v`.
    pub fn norm(&self, x: (u64, u64)) -> u64 {
        let n = self.n as u128;
        let (a, b) = (x.0 as u128, x.1 as u128);
        ((a * a + a * b % n * (self.u as u128 % n) + b * b % n * (self.v as u128 % n)) % n) as u64
    }

    pub fn is_unit(&self, x: (u64, u64)) -> bool {
        gcd(self.norm(x), self.n) == 1
    }

    pub fn inverse(&self, x: (u64, u64)) -> Option<(u64, u64)> {
        let ni = inverse_mod(self.norm(x), self.n)?;
        let (a, b) = self.conj(x);
        Some((a * ni % self.n, b * ni % self.n))
    }

    /// Units in lexicographic `(a, b)` order.
    pub fn units(&self) -> Vec<(u64, u64)> {
        let n = self.n;
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&x| self.is_unit(x))
            .collect()
    }

    /// Matrix of multiplication by `a + bα` in the basis `{1, α}`.
    pub fn mult_matrix(&self, x: (u64, u64)) -> Mat2 {
        let n = self.n;
        let one = self.mul(x, (1, 0));
        let alpha = self.mul(x, (0, 1 % n));
        Mat2::new(
            n,
            one.0 as i64,
            alpha.0 as i64,
            one.1 as i64,
            alpha.1 as i64,
        )
    }

    /// Matrix of the conjugation `1 ↦ 1, α ↦ u − α`.
    pub fn conjugation_matrix(&self) -> Mat2 {
        Mat2::new(self.n, 1, (self.u % self.n) as i64, 0, -1)
    }

    /// A small generating set of the unit group, chosen greedily in
    /// lexicographic order.
    pub fn unit_generators(&self) -> Vec<(u64, u64)> {
        let units = self.units();
        let mut group: FxHashSet<(u64, u64)> = FxHashSet::default();
        group.insert((1, 0));
        let mut members = vec![(1u64, 0u64)];
        let mut gens = Vec::new();
        for x in units {
            if group.contains(&x) {
                continue;
            }
            gens.push(x);
            let mut stack = members.clone();
            while let Some(y) = stack.pop() {
                for &g in &gens {
                    let z = self.mul(y, g);
                    if group.insert(z) {
                        members.push(z);
                        stack.push(z);
                    }
                }
            }
        }
        gens
    }
}

/// Least `(v, u)` in lexicographic order, `1 <= v`, `0 <= u`, both at most
/// `4n`, giving an inert algebra mod `n`.
pub fn find_nonsplit_algebra(n: u64) -> Result<NonsplitAlgebra> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!(
            "nonsplit algebra needs modulus >= 2, got {n}"
        )));
    }
    let bound = 4 * n;
    for v in 1..=bound {
        for u in 0..=bound {
            let alg = NonsplitAlgebra { u, v, n };
            if alg.is_valid()? {
                return Ok(alg);
            }
        }
    }
    Err(Error::AlgebraSearchExhausted(n))
}

/// Identifies one modular curve: a family together with its parameters.
///
/// `level` is `N` for every family except `S4`, where it is the prime `p`.
/// The arithmetic families use `(m, level) = (M, N)` and live at modulus
/// `M * N`; every other family has `m = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SubgroupSpec {
    pub family: Family,
    pub level: u64,
    pub m: u64,
    #[serde(skip)]
    pub algebra: Option<NonsplitAlgebra>,
}

impl SubgroupSpec {
    pub fn new(family: Family, level: u64) -> SubgroupSpec {
        SubgroupSpec {
            family,
            level,
            m: 0,
            algebra: None,
        }
    }

    pub fn arith(family: Family, m: u64, n: u64) -> SubgroupSpec {
        SubgroupSpec {
            family,
            level: n,
            m,
            algebra: None,
        }
    }

    pub fn with_algebra(mut self, algebra: NonsplitAlgebra) -> SubgroupSpec {
        self.algebra = Some(algebra);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.level == 0 {
            return bad(format!("{}: level must be positive", self.family));
        }
        if self.family.is_arith() {
            if self.m == 0 {
                return bad(format!("{} needs a positive m", self.family));
            }
        } else if self.m != 0 {
            return bad(format!("{} takes no m parameter", self.family));
        }
        if self.family == Family::S4 && (self.level < 5 || !is_prime(self.level)) {
            return bad(format!("s4 needs a prime p >= 5, got {}", self.level));
        }
        if let Some(alg) = self.algebra {
            if !self.family.is_nonsplit() {
                return bad(format!("{} takes no algebra override", self.family));
            }
            if alg.n != self.modulus_unchecked() || !alg.is_valid()? {
                return bad(format!(
                    "algebra {alg:?} is not valid at level {}",
                    self.level
                ));
            }
        }
        let n = self.modulus_unchecked();
        if n > MAX_MODULUS {
            return bad(format!("modulus {n} is too large"));
        }
        Ok(())
    }

    fn modulus_unchecked(&self) -> u64 {
        if self.family.is_arith() {
            self.m.saturating_mul(self.level)
        } else {
            self.level
        }
    }

    /// The level of the realized subgroup: `M * N` for the arithmetic
    /// families, `level` otherwise.
    pub fn modulus(&self) -> Result<u64> {
        self.validate()?;
        Ok(self.modulus_unchecked())
    }

    pub fn nonsplit_algebra(&self) -> Result<NonsplitAlgebra> {
        match self.algebra {
            Some(alg) => Ok(alg),
            None => find_nonsplit_algebra(self.modulus()?),
        }
    }

    /// Every admissible spec of `family` whose modulus lies in
    /// `[min_level, max_level]`, ordered by level and then `m`.
    pub fn admissible(family: Family, min_level: u64, max_level: u64) -> Vec<SubgroupSpec> {
        let lo = min_level.max(1);
        if family.is_arith() {
            let mut out = Vec::new();
            for n in 1..=max_level {
                for m in 1..=max_level / n {
                    if m * n >= lo {
                        out.push(SubgroupSpec::arith(family, m, n));
                    }
                }
            }
            return out;
        }
        (lo..=max_level)
            .map(|level| SubgroupSpec::new(family, level))
            .filter(|s| s.validate().is_ok())
            .collect()
    }
}

impl fmt::Display for SubgroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.family.is_arith() {
            write!(f, "{}(M={}, N={})", self.family, self.m, self.level)
        } else {
            write!(f, "{}({})", self.family, self.level)
        }
    }
}

fn unit_diagonals(n: u64) -> (Vec<Mat2>, Vec<Mat2>) {
    let gens = arith::unit_generators(n);
    let left = gens.iter().map(|&g| Mat2::diag(n, g as i64, 1)).collect();
    let right = gens.iter().map(|&g| Mat2::diag(n, 1, g as i64)).collect();
    (left, right)
}

/// Matrix congruent to `local` modulo the prime power `pe` and to the
/// identity modulo `n / pe`.
fn crt_embed(n: u64, pe: u64, local: &Mat2) -> Result<Mat2> {
    let rest = n / pe;
    let id = Mat2::identity(rest);
    let lift = |x: u64, y: u64| -> Result<i64> { Ok(crt_lift(&[(x, pe), (y, rest)])?.0 as i64) };
    let [a, b, c, d] = local.entries();
    let [ia, ib, ic, id_] = id.entries();
    Ok(Mat2::new(
        n,
        lift(a, ia)?,
        lift(b, ib)?,
        lift(c, ic)?,
        lift(d, id_)?,
    ))
}

/// Generators in `GL2(Z/modulus)` whose closure is the family's `H`.
pub fn subgroup_generators(spec: &SubgroupSpec) -> Result<Vec<Mat2>> {
    let n = spec.modulus()?;
    if n == 1 {
        return Ok(Vec::new());
    }
    let t = Mat2::new(n, 1, 1, 0, 1);
    let (left_diag, right_diag) = unit_diagonals(n);
    let mut gens = Vec::new();
    match spec.family {
        Family::X0 => {
            gens.push(t);
            gens.extend(left_diag);
            gens.extend(right_diag);
        }
        Family::X1 | Family::Xpm1 => {
            gens.push(t);
            gens.extend(right_diag);
            if spec.family == Family::Xpm1 {
                gens.push(Mat2::minus_identity(n));
            }
        }
        Family::Xfull | Family::Xarith => gens.extend(right_diag),
        Family::Arith1 | Family::ArithPm1 => {
            gens.push(Mat2::new(n, 1, spec.m as i64, 0, 1));
            gens.extend(right_diag);
            if spec.family == Family::ArithPm1 {
                gens.push(Mat2::minus_identity(n));
            }
        }
        Family::Sp | Family::SpPlus | Family::SpStar => {
            gens.extend(left_diag);
            gens.extend(right_diag);
            let swap = Mat2::new(n, 0, 1, 1, 0);
            if spec.family == Family::SpPlus {
                gens.push(swap);
            }
            if spec.family == Family::SpStar {
                for pe in factorize(n)?.prime_powers() {
                    gens.push(crt_embed(n, pe, &Mat2::new(pe, 0, 1, 1, 0))?);
                }
            }
        }
        Family::Ns | Family::NsPlus | Family::NsStar => {
            let alg = spec.nonsplit_algebra()?;
            gens.extend(
                alg.unit_generators()
                    .into_iter()
                    .map(|x| alg.mult_matrix(x)),
            );
            if spec.family == Family::NsPlus {
                gens.push(alg.conjugation_matrix());
            }
            if spec.family == Family::NsStar {
                for pe in factorize(n)?.prime_powers() {
                    let local = Mat2::new(pe, 1, (alg.u % pe) as i64, 0, -1);
                    gens.push(crt_embed(n, pe, &local)?);
                }
            }
        }
        Family::S4 => gens = s4_subgroup(n)?,
    }
    Ok(gens)
}

/// Coset representatives of the split Cartan in `GL2(Z/p^r)`:
/// `[[1 + uv, u], [v, 1]]` for `u, v mod p^r` and `[[u, -1], [1, pv]]`
/// for `u mod p^r`, `v mod p^(r-1)`.
pub fn split_transversal_primepower(p: u64, r: u32) -> Result<Vec<Mat2>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if r == 0 {
        return Err(Error::InvalidSpec("exponent must be positive".into()));
    }
    let n = p
        .checked_pow(r)
        .filter(|&n| n <= MAX_MODULUS)
        .ok_or(Error::Overflow("prime power"))?;
    let mut out = Vec::new();
    for u in 0..n as i64 {
        for v in 0..n as i64 {
            out.push(Mat2::new(n, 1 + u * v, u, v, 1));
        }
    }
    for u in 0..n as i64 {
        for v in 0..(n / p) as i64 {
            out.push(Mat2::new(n, u, -1, 1, p as i64 * v));
        }
    }
    Ok(out)
}

/// Representatives of `SL2(Z/n) / C_ns'(n)` as the linear maps
/// `1 ↦ y⁻¹, α ↦ ȳ(α + x)`, where `x` runs over `Z/n` and `y` over one
/// chosen element of each unit norm.
pub fn nonsplit_transversal(n: u64, alg: &NonsplitAlgebra) -> Result<Vec<Mat2>> {
    if n < 2 || alg.n != n {
        return Err(Error::InvalidSpec(format!(
            "nonsplit transversal at modulus {n}"
        )));
    }
    let mut by_norm: Vec<Option<(u64, u64)>> = vec![None; n as usize];
    for y in alg.units() {
        let slot = &mut by_norm[alg.norm(y) as usize];
        if slot.is_none() {
            *slot = Some(y);
        }
    }
    let mut out = Vec::new();
    for a in arith::units(n) {
        let y = by_norm[a as usize]
            .ok_or_else(|| Error::Internal(format!("no element of norm {a} mod {n}")))?;
        let y_inv = alg.inverse(y).expect("unit");
        let y_bar = alg.conj(y);
        for x in 0..n {
            let image = alg.mul(y_bar, (x, 1));
            out.push(Mat2::new(
                n,
                y_inv.0 as i64,
                image.0 as i64,
                y_inv.1 as i64,
                image.1 as i64,
            ));
        }
    }
    Ok(out)
}

/// Representative of a projective class: scaled so the first nonzero
/// entry is 1.
fn projective_normalize(m: &Mat2) -> Mat2 {
    let p = m.modulus();
    let lead = m
        .entries()
        .into_iter()
        .find(|&e| e != 0)
        .expect("invertible");
    let s = inverse_mod(lead, p).expect("field") as i64;
    let [a, b, c, d] = m.entries().map(|e| e as i64);
    Mat2::new(p, a * s, b * s, c * s, d * s)
}

fn projective_order(m: &Mat2) -> u64 {
    let id = Mat2::identity(m.modulus());
    let mut x = projective_normalize(m);
    let mut k = 1;
    while x != id {
        x = projective_normalize(&(x * *m));
        k += 1;
    }
    k
}

/// Size of the projective closure of `gens`, or `None` once it passes `cap`.
fn projective_closure_size(gens: &[Mat2], cap: usize) -> Option<usize> {
    let id = Mat2::identity(gens[0].modulus());
    let mut seen: FxHashSet<Mat2> = FxHashSet::default();
    seen.insert(id);
    let mut stack = vec![id];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = projective_normalize(&(x * *g));
            if seen.insert(y) {
                if seen.len() > cap {
                    return None;
                }
                stack.push(y);
            }
        }
    }
    Some(seen.len())
}

fn primitive_root(p: u64) -> Result<u64> {
    let f = factorize(p - 1)?;
    (2..p)
        .find(|&g| {
            f.primes().all(|q| {
                let mut acc = 1u64;
                for _ in 0..(p - 1) / q {
                    acc = acc * g % p;
                }
                acc != 1
            })
        })
        .ok_or(Error::NotPrime(p))
}

/// Generators of the full preimage in `GL2(F_p)` of an `S4 <= PGL2(F_p)`.
///
/// Scans projective classes in lexicographic order for the first element of
/// order 4, then for the first element of order 3 with which it generates a
/// group of order 24; a primitive scalar completes the preimage.
pub fn s4_subgroup(p: u64) -> Result<Vec<Mat2>> {
    if p < 5 || !is_prime(p) {
        return Err(Error::InvalidSpec(format!(
            "s4 needs a prime p >= 5, got {p}"
        )));
    }
    if p > MAX_MODULUS {
        return Err(Error::Overflow("s4 prime"));
    }
    let pi = p as i64;
    // normalized projective classes, lexicographic
    let mut classes = Vec::new();
    for c in 0..pi {
        for d in 0..pi {
            classes.push(Mat2::new(p, 0, 1, c, d));
        }
    }
    for b in 0..pi {
        for c in 0..pi {
            for d in 0..pi {
                classes.push(Mat2::new(p, 1, b, c, d));
            }
        }
    }
    classes.retain(Mat2::has_unit_det);
    classes.sort_unstable();

    let order_four = classes
        .iter()
        .find(|m| projective_order(m) == 4)
        .ok_or(Error::S4NotFound(p))?;
    let order_three = classes
        .iter()
        .filter(|m| projective_order(m) == 3)
        .find(|h| projective_closure_size(&[*order_four, **h], 24) == Some(24))
        .ok_or(Error::S4NotFound(p))?;
    let g = primitive_root(p)? as i64;
    Ok(vec![*order_four, *order_three, Mat2::scalar(p, g)])
}

/// Whether `det(H)` is all of `(Z/modulus)^*`.
pub fn det_image_surjective(spec: &SubgroupSpec) -> Result<bool> {
    let n = spec.modulus()?;
    if n == 1 {
        return Ok(true);
    }
    let group = close_group(n, &subgroup_generators(spec)?)?;
    let dets: FxHashSet<u64> = group.iter().map(Mat2::det).collect();
    Ok(dets.len() as u64 == euler_phi(n)?)
}

/// Order of the family's `H` inside `GL2`, by closing the generators.
pub fn group_order(spec: &SubgroupSpec) -> Result<usize> {
    let n = spec.modulus()?;
    Ok(close_group(n, &subgroup_generators(spec)?)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::euler_phi;

    #[test]
    fn family_tags_roundtrip() {
        for f in Family::ALL {
            assert_eq!(f.tag().parse::<Family>().unwrap(), f);
            assert_eq!(
                serde_json::to_string(&f).unwrap(),
                format!("\"{}\"", f.tag())
            );
        }
        assert!("x2".parse::<Family>().is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(SubgroupSpec::new(Family::S4, 7).validate().is_ok());
        assert!(SubgroupSpec::new(Family::S4, 3).validate().is_err());
        assert!(SubgroupSpec::new(Family::S4, 9).validate().is_err());
        assert!(SubgroupSpec::new(Family::Arith1, 4).validate().is_err());
        assert!(SubgroupSpec::arith(Family::Arith1, 2, 3).validate().is_ok());
        assert_eq!(
            SubgroupSpec::arith(Family::Arith1, 2, 3).modulus().unwrap(),
            6
        );
        assert!(SubgroupSpec::new(Family::X0, 0).validate().is_err());
        let alg = find_nonsplit_algebra(5).unwrap();
        assert!(SubgroupSpec::new(Family::Sp, 5)
            .with_algebra(alg)
            .validate()
            .is_err());
        assert!(SubgroupSpec::new(Family::Ns, 7)
            .with_algebra(alg)
            .validate()
            .is_err());
    }

    #[test]
    fn algebra_search() {
        assert_eq!(
            find_nonsplit_algebra(2).unwrap(),
            NonsplitAlgebra { u: 1, v: 1, n: 2 }
        );
        // x^2 - x + 1: discriminant -3 ≡ 2, a non-residue mod 5
        assert_eq!(
            find_nonsplit_algebra(5).unwrap(),
            NonsplitAlgebra { u: 1, v: 1, n: 5 }
        );
        let alg = find_nonsplit_algebra(39).unwrap();
        for p in [3u64, 13] {
            assert!((0..p).all(|x| (x * x + alg.v + p * p * 4 - alg.u * x % p) % p != 0));
        }
        assert!(NonsplitAlgebra::new(0, 2, 5).is_ok());
        assert!(NonsplitAlgebra::new(0, 1, 5).is_err());
    }

    #[test]
    fn algebra_invariants_hold_for_many_levels() {
        for n in 2..=60 {
            let alg = find_nonsplit_algebra(n).unwrap();
            let units = alg.units();
            // |(Z/n)[α]^*| = n^2 ∏ (1 - 1/p^2)
            let expected: u64 = factorize(n)
                .unwrap()
                .pairs()
                .iter()
                .map(|&(p, e)| p.pow(2 * e - 2) * (p * p - 1))
                .product();
            assert_eq!(units.len() as u64, expected, "n = {n}");
            for &x in units.iter().take(20) {
                let xi = alg.inverse(x).unwrap();
                assert_eq!(alg.mul(x, xi), (1 % n, 0));
                assert_eq!(alg.mult_matrix(x).det(), alg.norm(x));
            }
        }
    }

    #[test]
    fn cartan_orders() {
        for n in 2..=30u64 {
            let phi = euler_phi(n).unwrap() as usize;
            let sp = group_order(&SubgroupSpec::new(Family::Sp, n)).unwrap();
            assert_eq!(sp, phi * phi, "sp at {n}");
            let sp_plus = group_order(&SubgroupSpec::new(Family::SpPlus, n)).unwrap();
            assert_eq!(
                sp_plus,
                if n == 2 { 2 } else { 2 * phi * phi },
                "sp+ at {n}"
            );
            let omega = arith::omega(n).unwrap();
            let sp_star = group_order(&SubgroupSpec::new(Family::SpStar, n)).unwrap();
            assert_eq!(sp_star, (phi * phi) << omega, "sp* at {n}");

            let alg = find_nonsplit_algebra(n).unwrap();
            let ns = group_order(&SubgroupSpec::new(Family::Ns, n)).unwrap();
            assert_eq!(ns, alg.units().len(), "ns at {n}");
            let ns_plus = group_order(&SubgroupSpec::new(Family::NsPlus, n)).unwrap();
            assert_eq!(ns_plus, 2 * ns, "ns+ at {n}");
            let ns_star = group_order(&SubgroupSpec::new(Family::NsStar, n)).unwrap();
            assert_eq!(ns_star, ns << omega as usize, "ns* at {n}");

            let x1 = group_order(&SubgroupSpec::new(Family::X1, n)).unwrap();
            assert_eq!(x1, n as usize * phi);
            let x0 = group_order(&SubgroupSpec::new(Family::X0, n)).unwrap();
            assert_eq!(x0, n as usize * phi * phi);
        }
        assert_eq!(group_order(&SubgroupSpec::new(Family::Sp, 5)).unwrap(), 16);
        assert_eq!(
            group_order(&SubgroupSpec::new(Family::SpPlus, 5)).unwrap(),
            32
        );
        assert_eq!(
            group_order(&SubgroupSpec::new(Family::NsPlus, 2)).unwrap(),
            6
        );
    }

    #[test]
    fn star_involutions_are_local() {
        let spec = SubgroupSpec::new(Family::SpStar, 36);
        let gens = subgroup_generators(&spec).unwrap();
        let invols: Vec<&Mat2> = gens.iter().filter(|g| g.entries()[1] != 0).collect();
        assert_eq!(invols.len(), 2);
        for g in invols {
            let [a, b, c, d] = g.entries();
            let swap_mod_4 = (a % 4, b % 4, c % 4, d % 4) == (0, 1, 1, 0);
            let swap_mod_9 = (a % 9, b % 9, c % 9, d % 9) == (0, 1, 1, 0);
            let id_mod_4 = (a % 4, b % 4, c % 4, d % 4) == (1, 0, 0, 1);
            let id_mod_9 = (a % 9, b % 9, c % 9, d % 9) == (1, 0, 0, 1);
            assert!((swap_mod_4 && id_mod_9) || (swap_mod_9 && id_mod_4));
        }
    }

    #[test]
    fn split_transversal_examples() {
        let t = split_transversal_primepower(2, 1).unwrap();
        assert_eq!(t.len(), 6);
        assert_eq!(t[0], Mat2::identity(2));
        assert_eq!(split_transversal_primepower(5, 1).unwrap().len(), 30);
        assert_eq!(split_transversal_primepower(3, 2).unwrap().len(), 81 + 27);
        assert_eq!(split_transversal_primepower(6, 1), Err(Error::NotPrime(6)));
    }

    #[test]
    fn nonsplit_transversal_examples() {
        for n in [2u64, 5, 7, 15] {
            let alg = find_nonsplit_algebra(n).unwrap();
            let t = nonsplit_transversal(n, &alg).unwrap();
            assert_eq!(t.len() as u64, n * euler_phi(n).unwrap());
            assert!(t.iter().all(Mat2::is_sl2));
        }
        let alg = find_nonsplit_algebra(5).unwrap();
        let t = nonsplit_transversal(5, &alg).unwrap();
        // α itself is the first element of norm 1
        assert_eq!(t[0], Mat2::new(5, 1, 1, 4, 0));
    }

    #[test]
    fn s4_preimage_orders() {
        for p in [5u64, 7, 11, 13] {
            let gens = s4_subgroup(p).unwrap();
            let h = close_group(p, &gens).unwrap();
            assert_eq!(h.len() as u64, 24 * (p - 1), "p = {p}");
        }
        assert!(s4_subgroup(3).is_err());
    }

    #[test]
    fn s4_determinant_surjectivity() {
        assert!(det_image_surjective(&SubgroupSpec::new(Family::S4, 5)).unwrap());
        assert!(!det_image_surjective(&SubgroupSpec::new(Family::S4, 7)).unwrap());
        assert!(det_image_surjective(&SubgroupSpec::new(Family::S4, 11)).unwrap());
        assert!(det_image_surjective(&SubgroupSpec::new(Family::S4, 13)).unwrap());
        assert!(!det_image_surjective(&SubgroupSpec::new(Family::S4, 17)).unwrap());
        for n in 1..20 {
            assert!(det_image_surjective(&SubgroupSpec::new(Family::X0, n)).unwrap());
        }
    }

    #[test]
    fn admissible_specs() {
        assert_eq!(SubgroupSpec::admissible(Family::X0, 1, 40).len(), 40);
        let s4: Vec<u64> = SubgroupSpec::admissible(Family::S4, 1, 13)
            .iter()
            .map(|s| s.level)
            .collect();
        assert_eq!(s4, vec![5, 7, 11, 13]);
        let a1 = SubgroupSpec::admissible(Family::Arith1, 1, 4);
        let pairs: Vec<(u64, u64)> = a1.iter().map(|s| (s.m, s.level)).collect();
        assert_eq!(
            pairs,
            vec![
                (1, 1),
                (2, 1),
                (3, 1),
                (4, 1),
                (1, 2),
                (2, 2),
                (1, 3),
                (1, 4)
            ]
        );
    }
}
