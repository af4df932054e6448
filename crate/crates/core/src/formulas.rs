//! Closed-form genus invariants for every family.
//!
//! Intermediate values are exact rationals; every place where a formula
//! divides is checked to land on an integer before it is reported.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{
    divisors, euler_phi, factorize, gcd, legendre_minus_one, legendre_minus_three, omega,
    Factorization,
};
use crate::error::{Error, Result};
use crate::families::{find_nonsplit_algebra, Family, SubgroupSpec};

type Q = Ratio<i128>;

/// Above this level `ns_sharp_s` skips the quadratic-time enumeration and
/// reports the inclusion-exclusion count alone.
pub const SHARP_S_ENUMERATION_LIMIT: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Formula,
    Bruteforce,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Formula => "formula",
            Method::Bruteforce => "bruteforce",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `(i, ε₂, ε₃, ε∞, g)` for one curve, tagged with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvariantSet {
    pub psl2_index: u64,
    pub eps2: u64,
    pub eps3: u64,
    pub eps_inf: u64,
    pub genus: u64,
    pub method: Method,
}

impl InvariantSet {
    /// Assembles the genus and rejects inconsistent inputs.
    pub fn new(
        psl2_index: u64,
        eps2: u64,
        eps3: u64,
        eps_inf: u64,
        method: Method,
    ) -> Result<Self> {
        Ok(InvariantSet {
            psl2_index,
            eps2,
            eps3,
            eps_inf,
            genus: genus_from_invariants(psl2_index, eps2, eps3, eps_inf)?,
            method,
        })
    }

    pub fn tuple(&self) -> (u64, u64, u64, u64, u64) {
        (
            self.psl2_index,
            self.eps2,
            self.eps3,
            self.eps_inf,
            self.genus,
        )
    }

    /// Equality of the five numbers, ignoring `method`.
    pub fn same_values(&self, other: &InvariantSet) -> bool {
        self.tuple() == other.tuple()
    }
}

/// `g = (12 + i − 3ε₂ − 4ε₃ − 6ε∞) / 12`, exactly.
pub fn genus_from_invariants(i: u64, eps2: u64, eps3: u64, eps_inf: u64) -> Result<u64> {
    let inputs = (i, eps2, eps3, eps_inf);
    if i == 0 {
        return Err(Error::InvalidSpec("index must be positive".into()));
    }
    let numerator = 12 + i as i128 - 3 * eps2 as i128 - 4 * eps3 as i128 - 6 * eps_inf as i128;
    if numerator < 0 {
        return Err(Error::NegativeGenus(inputs));
    }
    if numerator % 12 != 0 {
        return Err(Error::NotIntegral {
            what: "genus",
            numerator: i64::try_from(numerator).map_err(|_| Error::Overflow("genus"))?,
            denominator: 12,
        });
    }
    u64::try_from(numerator / 12).map_err(|_| Error::Overflow("genus"))
}

fn q(x: u64) -> Q {
    Q::from_integer(x as i128)
}

fn frac(a: i128, b: i128) -> Q {
    Q::new(a, b)
}

fn integral(x: Q, what: &'static str) -> Result<u64> {
    if !x.is_integer() {
        return Err(Error::NotIntegral {
            what,
            numerator: i64::try_from(*x.numer()).map_err(|_| Error::Overflow(what))?,
            denominator: i64::try_from(*x.denom()).map_err(|_| Error::Overflow(what))?,
        });
    }
    u64::try_from(x.to_integer()).map_err(|_| Error::Overflow(what))
}

fn prod<F>(f: &Factorization, mut factor: F) -> Result<Q>
where
    F: FnMut(u64, u32) -> Result<Q>,
{
    f.pairs()
        .iter()
        .try_fold(Q::one(), |acc, &(p, e)| Ok(acc * factor(p, e)?))
}

fn pow(p: u64, e: u32) -> Q {
    q(p.pow(e))
}

fn pow2(e: u32) -> Q {
    Q::from_integer(1i128 << e)
}

/// `N ∏ (1 + 1/p)`, the index of `Γ0(N)`.
fn psi(f: &Factorization) -> Result<Q> {
    prod(f, |p, e| Ok(pow(p, e - 1) * q(p + 1)))
}

/// `N² ∏ (1 − 1/p²)`.
fn jordan2(f: &Factorization) -> Result<Q> {
    prod(f, |p, e| Ok(pow(p, 2 * e - 2) * q(p * p - 1)))
}

fn trivial_curve() -> Result<InvariantSet> {
    InvariantSet::new(1, 1, 1, 1, Method::Formula)
}

fn finish(i: Q, e2: Q, e3: Q, einf: Q) -> Result<InvariantSet> {
    InvariantSet::new(
        integral(i, "index")?,
        integral(e2, "eps2")?,
        integral(e3, "eps3")?,
        integral(einf, "cusps")?,
        Method::Formula,
    )
}

fn leading_two_power(f: &Factorization) -> Q {
    match f.exponent_of(2) {
        0 => Q::one(),
        e => pow2(e - 1),
    }
}

fn exactly_two_divides(n: u64) -> bool {
    n % 2 == 0 && n % 4 != 0
}

pub fn invariants_x0(n: u64) -> Result<InvariantSet> {
    let f = factorize(n)?;
    let i = psi(&f)?;
    let e2 = if n % 4 == 0 {
        Q::zero()
    } else {
        prod(&f, |p, _| {
            let symbol = if p == 2 { 0 } else { legendre_minus_one(p)? };
            Ok(q((1 + symbol) as u64))
        })?
    };
    let e3 = if n % 9 == 0 {
        Q::zero()
    } else {
        prod(&f, |p, _| {
            let symbol = if p == 3 { 0 } else { legendre_minus_three(p)? };
            Ok(q((1 + symbol) as u64))
        })?
    };
    let mut einf = 0;
    for d in divisors(n)? {
        einf += euler_phi(gcd(d, n / d))?;
    }
    finish(i, e2, e3, q(einf))
}

/// Also serves `xpm1`, which has the same image in `PSL2`.
pub fn invariants_x1(n: u64) -> Result<InvariantSet> {
    if n == 1 {
        return trivial_curve();
    }
    let f = factorize(n)?;
    let i = if n == 2 { q(3) } else { jordan2(&f)? / q(2) };
    let e2 = q(u64::from(n == 2));
    let e3 = q(u64::from(n == 3));
    let einf = match n {
        2 => q(2),
        4 => q(3),
        _ => {
            let mut sum = 0;
            for d in divisors(n)? {
                sum += euler_phi(d)? * euler_phi(n / d)?;
            }
            q(sum) / q(2)
        }
    };
    finish(i, e2, e3, einf)
}

/// Also serves `xarith`, which is the same curve.
pub fn invariants_xfull(n: u64) -> Result<InvariantSet> {
    if n == 1 {
        return trivial_curve();
    }
    let f = factorize(n)?;
    let i = if n == 2 {
        q(6)
    } else {
        q(n) * jordan2(&f)? / q(2)
    };
    let einf = i / q(n);
    finish(i, Q::zero(), Q::zero(), einf)
}

/// `X_arith,1(M, MN)`; also serves `arithpm1`.
pub fn invariants_arith1(m: u64, n: u64) -> Result<InvariantSet> {
    if m == 0 || n == 0 {
        return Err(Error::ZeroModulus);
    }
    if (m, n) == (1, 1) {
        return trivial_curve();
    }
    let mn = m.checked_mul(n).ok_or(Error::Overflow("arith1 modulus"))?;
    let f = factorize(mn)?;
    let i = match (m, n) {
        (1, 2) => q(3),
        (2, 1) => q(6),
        _ => {
            q(m) * q(m)
                * q(m)
                * q(n)
                * q(n)
                * prod(&f, |p, _| Ok(frac(1, 1) - frac(1, (p * p) as i128)))?
                / q(2)
        }
    };
    let e2 = q(u64::from((m, n) == (1, 2)));
    let e3 = q(u64::from(m == 1 && n == 3));
    let einf = match (m, n) {
        (1, 2) => q(2),
        (1, 4) | (2, 1) => q(3),
        _ => {
            let mut sum = 0;
            for d in divisors(mn)? {
                sum += euler_phi(mn / d)? * euler_phi(d)? * gcd(m, mn / d);
            }
            q(sum) / q(2)
        }
    };
    finish(i, e2, e3, einf)
}

struct CartanCounts {
    i: Q,
    e2: Q,
    e3: Q,
    einf: Q,
}

fn split_cartan(f: &Factorization, n: u64) -> Result<CartanCounts> {
    let e2 = if n % 2 == 0 {
        Q::zero()
    } else {
        prod(f, |p, _| Ok(q((1 + legendre_minus_one(p)?) as u64)))?
    };
    let e3 = if n % 2 == 0 || n % 3 == 0 {
        Q::zero()
    } else {
        prod(f, |p, _| Ok(q((1 + legendre_minus_three(p)?) as u64)))?
    };
    Ok(CartanCounts {
        i: q(n) * psi(f)?,
        e2,
        e3,
        einf: psi(f)?,
    })
}

pub fn invariants_sp(n: u64) -> Result<InvariantSet> {
    if n == 1 {
        return trivial_curve();
    }
    let c = split_cartan(&factorize(n)?, n)?;
    finish(c.i, c.e2, c.e3, c.einf)
}

pub fn invariants_sp_plus(n: u64) -> Result<InvariantSet> {
    if n == 1 {
        return trivial_curve();
    }
    let f = factorize(n)?;
    let c = split_cartan(&f, n)?;
    let half = q(n) / q(2)
        * prod(&f, |p, _| {
            Ok(match p % 4 {
                1 => frac(p as i128 - 1, p as i128),
                3 => frac(p as i128 + 1, p as i128),
                _ => Q::one(),
            })
        })?;
    let e2 = c.e2 / q(2) + half;
    let einf = if n == 2 { q(2) } else { c.einf / q(2) };
    finish(c.i / q(2), e2, c.e3 / q(2), einf)
}

pub fn invariants_sp_star(n: u64) -> Result<InvariantSet> {
    if n == 1 {
        return trivial_curve();
    }
    let f = factorize(n)?;
    let w = omega(n)?;
    let c = split_cartan(&f, n)?;
    let einf = if exactly_two_divides(n) {
        c.einf * q(4) / (q(3) * pow2(w))
    } else {
        c.einf / pow2(w)
    };
    let e3 = q(u64::from(f.primes().all(|p| p % 3 == 1)));
    let e2 = leading_two_power(&f)
        * prod(&f, |p, e| {
            let pe1 = pow(p, e - 1);
            Ok(match p % 4 {
                1 => Q::one() + pe1 * q(p - 1) / q(2),
                3 => pe1 * q(p + 1) / q(2),
                _ => Q::one(),
            })
        })?;
    finish(c.i / pow2(w), e2, e3, einf)
}

fn nonsplit_cartan(f: &Factorization, n: u64) -> Result<CartanCounts> {
    let phi = euler_phi(n)?;
    let e2 = prod(f, |p, _| {
        if p == 2 {
            return Ok(Q::zero());
        }
        Ok(q((1 - legendre_minus_one(p)?) as u64))
    })?;
    let e3 = if f.primes().all(|p| p % 3 == 2) {
        pow2(f.len() as u32)
    } else {
        Q::zero()
    };
    Ok(CartanCounts {
        i: q(n) * q(phi),
        e2,
        e3,
        einf: q(phi),
    })
}

pub fn invariants_ns(n: u64) -> Result<InvariantSet> {
    if n == 1 {
        return trivial_curve();
    }
    let c = nonsplit_cartan(&factorize(n)?, n)?;
    finish(c.i, c.e2, c.e3, c.einf)
}

pub fn invariants_ns_plus(n: u64) -> Result<InvariantSet> {
    if n == 1 {
        return trivial_curve();
    }
    let f = factorize(n)?;
    let c = nonsplit_cartan(&f, n)?;
    let s = ns_sharp_s(n)?;
    let s = Q::new(*s.numer() as i128, *s.denom() as i128);
    let e2 = c.e2 / q(2) + psi(&f)? / q(2) - s;
    let einf = if n == 2 { Q::one() } else { c.einf / q(2) };
    finish(c.i / q(2), e2, c.e3 / q(2), einf)
}

pub fn invariants_ns_star(n: u64) -> Result<InvariantSet> {
    if n == 1 {
        return trivial_curve();
    }
    let f = factorize(n)?;
    let w = omega(n)?;
    let c = nonsplit_cartan(&f, n)?;
    let einf = if exactly_two_divides(n) {
        c.einf / pow2(w - 1)
    } else {
        c.einf / pow2(w)
    };
    let e3 = q(u64::from(f.primes().all(|p| p % 3 == 2)));
    let e2 = leading_two_power(&f)
        * prod(&f, |p, e| {
            let pe1 = pow(p, e - 1);
            Ok(match p % 4 {
                1 => pe1 * q(p - 1) / q(2),
                3 => Q::one() + pe1 * q(p + 1) / q(2),
                _ => Q::one(),
            })
        })?;
    finish(c.i / pow2(w), e2, e3, einf)
}

/// Invariants of `X_S4(p)`, valid for primes `p >= 5`.
pub fn invariants_s4(p: u64) -> Result<InvariantSet> {
    if p < 5 || !crate::arith::is_prime(p) {
        return Err(Error::InvalidSpec(format!(
            "s4 needs a prime p >= 5, got {p}"
        )));
    }
    let pi = p as i128;
    let i = frac(pi * (pi * pi - 1), 24);
    let e2 = frac(pi - legendre_minus_one(p)? as i128, 4);
    let e3 = frac(pi - legendre_minus_three(p)? as i128, 3);
    let einf = frac(pi * pi - 1, 24);
    finish(i, e2, e3, einf)
}

/// Size of the set `S` of classes `±(a + bα)` of norm `−1` whose
/// `α`-coefficient shares a factor with `N`.
///
/// At `N = 2` the sign is trivial and the count is `1/2`; the value is kept
/// rational so that both computations divide by two the same way.
pub fn sharp_s_inclusion_exclusion(n: u64) -> Result<Ratio<i64>> {
    let f = factorize(n)?;
    let primes: Vec<u64> = f.primes().collect();
    let base = psi(&f)?;
    let mut total = Q::zero();
    for mask in 1u32..(1 << primes.len()) {
        let chosen: Vec<u64> = (0..primes.len())
            .filter(|&j| mask & (1 << j) != 0)
            .map(|j| primes[j])
            .collect();
        if chosen.iter().any(|p| p % 4 == 3) {
            continue;
        }
        let k = chosen.len() as i32;
        let delta = i32::from(chosen.contains(&2));
        let denom: u64 = chosen.iter().map(|p| p + 1).product();
        let count = Q::from_integer(2).pow(k - 1 - delta) * base / q(denom);
        if k % 2 == 1 {
            total += count;
        } else {
            total -= count;
        }
    }
    to_small(total)
}

/// The same count as [`sharp_s_inclusion_exclusion`], by walking all of
/// `(Z/N)[α]`.
pub fn sharp_s_enumerated(n: u64) -> Result<Ratio<i64>> {
    let alg = find_nonsplit_algebra(n)?;
    let minus_one = n - 1;
    let mut count = 0u64;
    for a in 0..n {
        for b in 0..n {
            if gcd(b, n) > 1 && alg.norm((a, b)) == minus_one {
                count += 1;
            }
        }
    }
    to_small(q(count) / q(2))
}

fn to_small(x: Q) -> Result<Ratio<i64>> {
    let num = i64::try_from(*x.numer()).map_err(|_| Error::Overflow("#S"))?;
    let den = i64::try_from(*x.denom()).map_err(|_| Error::Overflow("#S"))?;
    Ok(Ratio::new(num, den))
}

/// `#S`, computed by inclusion-exclusion and, up to
/// [`SHARP_S_ENUMERATION_LIMIT`], confirmed by enumeration.
pub fn ns_sharp_s(n: u64) -> Result<Ratio<i64>> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!("#S needs N >= 2, got {n}")));
    }
    let by_formula = sharp_s_inclusion_exclusion(n)?;
    if n <= SHARP_S_ENUMERATION_LIMIT {
        let by_count = sharp_s_enumerated(n)?;
        if by_formula != by_count {
            return Err(Error::Internal(format!(
                "#S at {n}: inclusion-exclusion gives {by_formula}, enumeration gives {by_count}"
            )));
        }
    }
    Ok(by_formula)
}

/// Closed-form invariants for any spec.
pub fn invariants_formula(spec: &SubgroupSpec) -> Result<InvariantSet> {
    spec.validate()?;
    let n = spec.level;
    match spec.family {
        Family::X0 => invariants_x0(n),
        Family::X1 | Family::Xpm1 => invariants_x1(n),
        Family::Xfull | Family::Xarith => invariants_xfull(n),
        Family::Arith1 | Family::ArithPm1 => invariants_arith1(spec.m, n),
        Family::Sp => invariants_sp(n),
        Family::SpPlus => invariants_sp_plus(n),
        Family::SpStar => invariants_sp_star(n),
        Family::Ns => invariants_ns(n),
        Family::NsPlus => invariants_ns_plus(n),
        Family::NsStar => invariants_ns_star(n),
        Family::S4 => invariants_s4(n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(s: Result<InvariantSet>) -> (u64, u64, u64, u64, u64) {
        s.unwrap().tuple()
    }

    #[test]
    fn genus_assembly() {
        assert_eq!(genus_from_invariants(1, 1, 1, 1), Ok(0));
        assert_eq!(genus_from_invariants(468, 24, 0, 12), Ok(28));
        assert_eq!(genus_from_invariants(12, 0, 0, 2), Ok(1));
        assert!(matches!(
            genus_from_invariants(12, 0, 0, 3),
            Err(Error::NotIntegral { .. })
        ));
        assert_eq!(
            genus_from_invariants(1, 4, 4, 4),
            Err(Error::NegativeGenus((1, 4, 4, 4)))
        );
        assert!(genus_from_invariants(0, 0, 0, 0).is_err());
    }

    #[test]
    fn worked_examples() {
        assert_eq!(t(invariants_ns_plus(39)), (468, 24, 0, 12, 28));
        assert_eq!(t(invariants_ns_star(39)), (234, 18, 0, 6, 13));
    }

    #[test]
    fn borel_and_gamma1() {
        assert_eq!(t(invariants_x0(1)), (1, 1, 1, 1, 0));
        assert_eq!(t(invariants_x0(11)), (12, 0, 0, 2, 1));
        assert_eq!(t(invariants_x0(4)), (6, 0, 0, 3, 0));
        assert_eq!(t(invariants_x1(2)), (3, 1, 0, 2, 0));
        assert_eq!(t(invariants_x1(4)), (6, 0, 0, 3, 0));
        assert_eq!(t(invariants_x1(11)), (60, 0, 0, 10, 1));
        assert_eq!(t(invariants_xfull(1)), (1, 1, 1, 1, 0));
        assert_eq!(t(invariants_xfull(2)), (6, 0, 0, 3, 0));
        assert_eq!(t(invariants_xfull(7)), (168, 0, 0, 24, 3));
    }

    #[test]
    fn arithmetic_family() {
        assert_eq!(
            invariants_arith1(1, 11).unwrap(),
            invariants_x1(11).unwrap()
        );
        assert_eq!(t(invariants_arith1(2, 1)), (6, 0, 0, 3, 0));
        assert_eq!(t(invariants_arith1(2, 2)), (12, 0, 0, 4, 0));
        assert_eq!(t(invariants_arith1(1, 2)), (3, 1, 0, 2, 0));
        assert!(invariants_arith1(0, 3).is_err());
    }

    #[test]
    fn cartan_examples() {
        assert_eq!(t(invariants_sp(5)), (30, 2, 0, 6, 0));
        assert_eq!(t(invariants_sp_plus(2)), (3, 1, 0, 2, 0));
        assert_eq!(invariants_sp_plus(5).unwrap().eps2, 3);
        assert_eq!(invariants_ns_plus(7).unwrap().eps2, 5);
        assert_eq!(invariants_ns_plus(7).unwrap().genus, 0);
        assert_eq!(invariants_ns_plus(2).unwrap().eps_inf, 1);
    }

    #[test]
    fn s4_row() {
        assert_eq!(t(invariants_s4(5)), (5, 1, 2, 1, 0));
        assert_eq!(t(invariants_s4(11)), (55, 3, 4, 5, 1));
        assert_eq!(t(invariants_s4(13)), (91, 3, 4, 7, 3));
        assert!(invariants_s4(3).is_err());
        assert!(invariants_s4(9).is_err());
    }

    #[test]
    fn sharp_s_examples() {
        assert_eq!(ns_sharp_s(7).unwrap(), Ratio::from_integer(0));
        assert_eq!(ns_sharp_s(5).unwrap(), Ratio::from_integer(1));
        assert_eq!(ns_sharp_s(39).unwrap(), Ratio::from_integer(4));
        assert_eq!(ns_sharp_s(2).unwrap(), Ratio::new(1, 2));
        assert!(ns_sharp_s(1).is_err());
    }

    #[test]
    fn sharp_s_routes_agree() {
        for n in 2..=120 {
            assert_eq!(
                sharp_s_inclusion_exclusion(n).unwrap(),
                sharp_s_enumerated(n).unwrap(),
                "N = {n}"
            );
        }
    }

    #[test]
    fn covering_degrees() {
        for n in 3..=150 {
            let sp = invariants_sp(n).unwrap();
            let spp = invariants_sp_plus(n).unwrap();
            assert_eq!(sp.psl2_index, 2 * spp.psl2_index);
            assert_eq!(sp.eps_inf, 2 * spp.eps_inf);
            let ns = invariants_ns(n).unwrap();
            let nsp = invariants_ns_plus(n).unwrap();
            assert_eq!(ns.eps3, 2 * nsp.eps3);
            assert_eq!(ns.psl2_index, 2 * nsp.psl2_index);
        }
    }

    #[test]
    fn trivial_level_everywhere() {
        for family in Family::ALL {
            if family == Family::S4 {
                continue;
            }
            let spec = if family.is_arith() {
                SubgroupSpec::arith(family, 1, 1)
            } else {
                SubgroupSpec::new(family, 1)
            };
            assert_eq!(
                invariants_formula(&spec).unwrap().tuple(),
                (1, 1, 1, 1, 0),
                "{family}"
            );
        }
    }

    #[test]
    fn method_serializes_lowercase() {
        assert_eq!(
            serde_json::to_string(&Method::Bruteforce).unwrap(),
            "\"bruteforce\""
        );
    }

    proptest! {
        #[test]
        fn genus_integral_up_to_500(n in 1u64..=500) {
            for family in Family::ALL {
                let spec = if family.is_arith() {
                    SubgroupSpec::arith(family, 1, n)
                } else {
                    SubgroupSpec::new(family, n)
                };
                if spec.validate().is_ok() {
                    prop_assert!(invariants_formula(&spec).is_ok(), "{}", spec);
                }
            }
        }

        #[test]
        fn arith1_genus_integral(m in 1u64..=40, n in 1u64..=40) {
            prop_assert!(invariants_arith1(m, n).is_ok());
        }

        #[test]
        fn star_equals_plus_at_prime_powers(p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]), r in 1u32..=3) {
            let n = p.pow(r);
            prop_assert_eq!(invariants_sp_star(n).unwrap().tuple(), invariants_sp_plus(n).unwrap().tuple());
            prop_assert_eq!(invariants_ns_star(n).unwrap().tuple(), invariants_ns_plus(n).unwrap().tuple());
        }
    }
}
