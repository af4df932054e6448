//! Exact elementary number theory on machine integers.
//!
//! Everything here works in `u64`/`i64` and reports overflow as an error
//! instead of wrapping. Levels in scope are small (a few hundred at most),
//! so factorization is plain trial division.

use crate::error::{Error, Result};

/// Prime factorization `n = p1^e1 * ... * pk^ek` with `p1 < ... < pk`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Factorization(Vec<(u64, u32)>);

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(p, _)| p)
    }

    /// The prime powers `p^e` exactly dividing the factored number.
    pub fn prime_powers(&self) -> Vec<u64> {
        self.0.iter().map(|&(p, e)| p.pow(e)).collect()
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.0.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn product(&self) -> Result<u64> {
        self.0.iter().try_fold(1u64, |acc, &(p, e)| {
            let pe = p
                .checked_pow(e)
                .ok_or(Error::Overflow("factorization product"))?;
            acc.checked_mul(pe)
                .ok_or(Error::Overflow("factorization product"))
        })
    }
}

pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    let mut rest = n;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        out.push((rest, 1));
    }
    Ok(Factorization(out))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn euler_phi(n: u64) -> Result<u64> {
    let f = factorize(n)?;
    Ok(f.pairs().iter().fold(n, |acc, &(p, _)| acc / p * (p - 1)))
}

/// Number of distinct prime divisors.
pub fn omega(n: u64) -> Result<u32> {
    Ok(factorize(n)?.len() as u32)
}

/// Exponent of the prime `p` in `n`.
pub fn valuation(n: u64, p: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut n = n;
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    Ok(e)
}

/// `(-1/p)` for an odd prime `p`.
pub fn legendre_minus_one(p: u64) -> Result<i64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::ExcludedPrime { numerator: -1, p });
    }
    Ok(if p % 4 == 1 { 1 } else { -1 })
}

/// `(-3/p)` for a prime `p != 3`, with `(-3/2) = -1`.
pub fn legendre_minus_three(p: u64) -> Result<i64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    match p {
        2 => Ok(-1),
        3 => Err(Error::ExcludedPrime { numerator: -3, p }),
        _ => Ok(if p % 3 == 1 { 1 } else { -1 }),
    }
}

/// Modular inverse of `a` mod `n`, if `a` is a unit.
pub fn inverse_mod(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (n as i128, (a % n) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(n as i128) as u64)
}

/// Reduce a signed integer into `[0, n)`.
pub fn reduce(x: i64, n: u64) -> u64 {
    x.rem_euclid(n as i64) as u64
}

/// The unique residue modulo the product of the moduli that reduces to
/// each `(value, modulus)` pair. Returns `(value, product)`.
pub fn crt_lift(residues: &[(u64, u64)]) -> Result<(u64, u64)> {
    let mut acc = (0u64, 1u64);
    for &(r, m) in residues {
        if m == 0 {
            return Err(Error::ZeroModulus);
        }
        let (a, n) = acc;
        if gcd(n, m) != 1 {
            return Err(Error::NonCoprimeModuli(n, m));
        }
        let nm = n.checked_mul(m).ok_or(Error::Overflow("crt modulus"))?;
        // a + n * k ≡ r (mod m)  =>  k ≡ (r - a) * n^{-1} (mod m)
        let n_inv = inverse_mod(n % m, m).expect("coprime moduli");
        let diff = (r % m + m - a % m) % m;
        let k = (diff as u128 * n_inv as u128 % m as u128) as u64;
        let value = (a as u128 + n as u128 * k as u128) % nm as u128;
        acc = (value as u64, nm);
    }
    Ok(acc)
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}

/// Units of `Z/nZ` in increasing order; `[0]` for `n = 1`.
pub fn units(n: u64) -> Vec<u64> {
    if n == 1 {
        return vec![0];
    }
    (1..n).filter(|&a| gcd(a, n) == 1).collect()
}

/// A small generating set of `(Z/nZ)^*`: greedily add the least unit not
/// yet in the generated subgroup.
pub fn unit_generators(n: u64) -> Vec<u64> {
    if n <= 2 {
        return Vec::new();
    }
    let mut in_group = vec![false; n as usize];
    in_group[1] = true;
    let mut members = vec![1u64];
    let mut gens = Vec::new();
    for a in units(n) {
        if in_group[a as usize] {
            continue;
        }
        gens.push(a);
        let mut frontier = members.clone();
        while let Some(x) = frontier.pop() {
            for &g in &gens {
                let y = x * g % n;
                if !in_group[y as usize] {
                    in_group[y as usize] = true;
                    members.push(y);
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

/// Order of `SL2(Z/nZ)`: `n^3 * prod_{p | n} (1 - 1/p^2)`.
pub fn sl2_order(n: u64) -> Result<u64> {
    let f = factorize(n)?;
    f.pairs().iter().try_fold(1u64, |acc, &(p, e)| {
        let pe = p
            .checked_pow(3 * e - 2)
            .ok_or(Error::Overflow("SL2 order"))?;
        acc.checked_mul(pe)
            .and_then(|x| x.checked_mul(p * p - 1))
            .ok_or(Error::Overflow("SL2 order"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn phi_by_count(n: u64) -> u64 {
        (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().is_empty());
        assert_eq!(factorize(12).unwrap().pairs(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(39).unwrap().pairs(), &[(3, 1), (13, 1)]);
        assert_eq!(factorize(0), Err(Error::ZeroModulus));
    }

    #[test]
    fn phi_omega_valuation_examples() {
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(euler_phi(12).unwrap(), 4);
        assert_eq!(euler_phi(39).unwrap(), 24);
        assert_eq!(omega(1).unwrap(), 0);
        assert_eq!(omega(39).unwrap(), 2);
        assert_eq!(valuation(24, 2).unwrap(), 3);
        assert_eq!(valuation(24, 4), Err(Error::NotPrime(4)));
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_minus_one(5).unwrap(), 1);
        assert_eq!(legendre_minus_one(7).unwrap(), -1);
        assert_eq!(legendre_minus_three(13).unwrap(), 1);
        assert_eq!(legendre_minus_three(2).unwrap(), -1);
        assert!(legendre_minus_one(2).is_err());
        assert!(legendre_minus_three(3).is_err());
        assert_eq!(legendre_minus_one(9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn legendre_matches_square_search() {
        for p in (3..100).filter(|&p| is_prime(p)) {
            let minus_one_square = (0..p).any(|x| x * x % p == p - 1);
            assert_eq!(
                legendre_minus_one(p).unwrap() == 1,
                minus_one_square,
                "p = {p}"
            );
            if p != 3 {
                let minus_three_square = (0..p).any(|x| x * x % p == p - 3 % p);
                assert_eq!(
                    legendre_minus_three(p).unwrap() == 1,
                    minus_three_square,
                    "p = {p}"
                );
            }
        }
    }

    #[test]
    fn legendre_product_matches_squares_mod_pq() {
        // -1 is a square mod pq iff it is a square mod p and mod q.
        let primes: Vec<u64> = (3..100).filter(|&p| is_prime(p)).collect();
        for &p in &primes {
            for &q in primes.iter().filter(|&&q| q > p) {
                let n = p * q;
                let square = (0..n).any(|x| x * x % n == n - 1);
                let both =
                    legendre_minus_one(p).unwrap() == 1 && legendre_minus_one(q).unwrap() == 1;
                assert_eq!(square, both, "p = {p}, q = {q}");
            }
        }
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt_lift(&[(1, 3), (1, 13)]).unwrap(), (1, 39));
        assert_eq!(crt_lift(&[(2, 3), (0, 13)]).unwrap(), (26, 39));
        assert_eq!(crt_lift(&[(0, 4), (1, 9)]).unwrap(), (28, 36));
        assert_eq!(
            crt_lift(&[(0, 4), (1, 6)]),
            Err(Error::NonCoprimeModuli(4, 6))
        );
    }

    #[test]
    fn unit_generators_generate() {
        for n in 1..200u64 {
            let gens = unit_generators(n);
            let mut seen = std::collections::BTreeSet::from([1 % n]);
            let mut stack = vec![1 % n];
            while let Some(x) = stack.pop() {
                for &g in &gens {
                    let y = x * g % n;
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            assert_eq!(seen.len() as u64, euler_phi(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn sl2_order_small() {
        assert_eq!(sl2_order(1).unwrap(), 1);
        assert_eq!(sl2_order(2).unwrap(), 6);
        assert_eq!(sl2_order(39).unwrap(), 52_416);
    }

    proptest! {
        #[test]
        fn factorize_roundtrip(n in 1u64..1_000_000) {
            let f = factorize(n).unwrap();
            prop_assert_eq!(f.product().unwrap(), n);
            prop_assert!(f.primes().all(is_prime));
            prop_assert!(f.pairs().windows(2).all(|w| w[0].0 < w[1].0));
        }

        #[test]
        fn phi_is_multiplicative(m in 1u64..10_000, n in 1u64..10_000) {
            prop_assume!(gcd(m, n) == 1);
            prop_assert_eq!(euler_phi(m * n).unwrap(), euler_phi(m).unwrap() * euler_phi(n).unwrap());
        }

        #[test]
        fn phi_matches_count(n in 1u64..2_000) {
            prop_assert_eq!(euler_phi(n).unwrap(), phi_by_count(n));
        }

        #[test]
        fn crt_reduces_correctly(a in 0u64..1000, b in 0u64..1000, m in 1u64..200, n in 1u64..200) {
            prop_assume!(gcd(m, n) == 1);
            let (x, mn) = crt_lift(&[(a % m, m), (b % n, n)]).unwrap();
            prop_assert_eq!(mn, m * n);
            prop_assert_eq!(x % m, a % m);
            prop_assert_eq!(x % n, b % n);
        }
    }
}
