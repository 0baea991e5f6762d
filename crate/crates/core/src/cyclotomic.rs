//! Exact arithmetic in cyclotomic fields `Q(zeta_N) = Q[x] / Phi_N(x)`.
//!
//! Elements are stored in the power basis `1, zeta, ..., zeta^(phi(N)-1)`,
//! always fully reduced, so an element is rational exactly when every
//! coefficient past the constant one is zero.

use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::linalg::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("conductor must be positive")]
    ZeroConductor,
    #[error("denominator of {0} does not divide the conductor {1}")]
    DenominatorMismatch(Rational, u64),
    #[error("division by zero in Q(zeta_{0})")]
    DivisionByZero(u64),
    #[error("conductor mismatch: {0} vs {1}")]
    ConductorMismatch(u64, u64),
    #[error("series is not invertible: zero constant term")]
    NotInvertible,
    #[error("exponential needs a series with zero constant term")]
    NonzeroConstantTerm,
    #[error("truncation mismatch: degree {0} vs {1}")]
    TruncationMismatch(usize, usize),
}

/// `Phi_n` with integer coefficients, lowest degree first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    assert!(n >= 1, "cyclotomic polynomial of order 0");
    // x^n - 1
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in (1..n).filter(|d| n % d == 0) {
        num = exact_div_monic(&num, &cyclotomic_polynomial(d));
    }
    num
}

fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    debug_assert!(den[dd].is_one());
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[k + j] -= &c * dj;
        }
        quot[k] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "inexact cyclotomic division");
    quot
}

pub fn euler_phi(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

/// An element of `Q(zeta_N)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloNumber {
    conductor: u64,
    coeffs: Vec<Rational>,
}

impl CycloNumber {
    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Coefficients of `1, zeta, zeta^2, ...` in the reduced basis.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational value, if every coefficient of `zeta^i` for `i >= 1` vanishes.
    pub fn as_rational(&self) -> Option<Rational> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| self.coeffs[0].clone())
    }

    pub fn scale(&self, r: &Rational) -> CycloNumber {
        CycloNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    fn check_conductor(&self, other: &CycloNumber) {
        assert_eq!(
            self.conductor, other.conductor,
            "mixing elements of different cyclotomic fields"
        );
    }
}

impl AddAssign<&CycloNumber> for CycloNumber {
    fn add_assign(&mut self, rhs: &CycloNumber) {
        self.check_conductor(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Add<&CycloNumber> for &CycloNumber {
    type Output = CycloNumber;
    fn add(self, rhs: &CycloNumber) -> CycloNumber {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        CycloNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Sub<&CycloNumber> for &CycloNumber {
    type Output = CycloNumber;
    fn sub(self, rhs: &CycloNumber) -> CycloNumber {
        self + &(-rhs)
    }
}

impl fmt::Display for CycloNumber {
    /// Renders e.g. `1/2 - 1/3*z + z^2 [N=6]`; rationals print bare.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "z")?,
                (1, false) => write!(f, "{mag}*z")?,
                (_, true) => write!(f, "z^{i}")?,
                (_, false) => write!(f, "{mag}*z^{i}")?,
            }
        }
        write!(f, " [N={}]", self.conductor)
    }
}

impl fmt::Debug for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The field `Q(zeta_N)` for one fixed conductor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicField {
    conductor: u64,
    // Phi_N, monic, lowest degree first.
    modulus: Vec<Rational>,
}

impl CyclotomicField {
    pub fn new(conductor: u64) -> Result<Self, CycloError> {
        if conductor == 0 {
            return Err(CycloError::ZeroConductor);
        }
        let modulus = cyclotomic_polynomial(conductor)
            .into_iter()
            .map(Rational::from_integer)
            .collect();
        Ok(CyclotomicField { conductor, modulus })
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// `phi(N)`, the dimension over `Q`.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn zero(&self) -> CycloNumber {
        CycloNumber {
            conductor: self.conductor,
            coeffs: vec![Rational::zero(); self.degree()],
        }
    }

    pub fn one(&self) -> CycloNumber {
        self.from_rational(Rational::one())
    }

    pub fn from_rational(&self, r: Rational) -> CycloNumber {
        let mut x = self.zero();
        x.coeffs[0] = r;
        x
    }

    /// `zeta_N^k`, for any integer `k`.
    pub fn zeta_power(&self, k: i64) -> CycloNumber {
        let e = k.rem_euclid(self.conductor as i64) as usize;
        let mut poly = vec![Rational::zero(); e + 1];
        poly[e] = Rational::one();
        self.reduce(poly)
    }

    /// `exp(2 pi i q)`; the denominator of `q` must divide the conductor.
    pub fn root_of_unity(&self, q: &Rational) -> Result<CycloNumber, CycloError> {
        let scaled = q * Rational::from_integer(BigInt::from(self.conductor));
        if !scaled.is_integer() {
            return Err(CycloError::DenominatorMismatch(q.clone(), self.conductor));
        }
        let k = scaled
            .to_integer()
            .mod_floor(&BigInt::from(self.conductor))
            .to_i64()
            .expect("reduced exponent fits");
        Ok(self.zeta_power(k))
    }

    fn check(&self, x: &CycloNumber) -> Result<(), CycloError> {
        if x.conductor != self.conductor {
            return Err(CycloError::ConductorMismatch(self.conductor, x.conductor));
        }
        Ok(())
    }

    fn reduce(&self, mut poly: Vec<Rational>) -> CycloNumber {
        let deg = self.degree();
        poly_rem_monic(&mut poly, &self.modulus);
        poly.resize(deg, Rational::zero());
        CycloNumber {
            conductor: self.conductor,
            coeffs: poly,
        }
    }

    pub fn mul(&self, a: &CycloNumber, b: &CycloNumber) -> CycloNumber {
        a.check_conductor(b);
        assert_eq!(a.conductor, self.conductor, "element from another field");
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        if let Some(r) = a.as_rational() {
            return b.scale(&r);
        }
        if let Some(r) = b.as_rational() {
            return a.scale(&r);
        }
        self.reduce(poly_mul(&a.coeffs, &b.coeffs))
    }

    pub fn invert(&self, a: &CycloNumber) -> Result<CycloNumber, CycloError> {
        self.check(a)?;
        if a.is_zero() {
            return Err(CycloError::DivisionByZero(self.conductor));
        }
        if let Some(r) = a.as_rational() {
            return Ok(self.from_rational(r.recip()));
        }
        // Extended Euclid on (Phi_N, a); Phi_N is irreducible so the gcd is a unit.
        let mut r0 = self.modulus.clone();
        let mut r1 = trimmed(a.coeffs.clone());
        let mut s0: Vec<Rational> = Vec::new();
        let mut s1 = vec![Rational::one()];
        while !r1.is_empty() {
            let (q, r) = poly_divmod(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        debug_assert_eq!(r0.len(), 1, "gcd with Phi_N is not constant");
        let c = r0[0].recip();
        let inv: Vec<Rational> = s0.iter().map(|x| x * &c).collect();
        Ok(self.reduce(inv))
    }

    pub fn pow(&self, a: &CycloNumber, e: i64) -> Result<CycloNumber, CycloError> {
        let base = if e < 0 { self.invert(a)? } else { a.clone() };
        let mut acc = self.one();
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            sq = self.mul(&sq, &sq);
            k >>= 1;
        }
        Ok(acc)
    }
}

fn trimmed(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trimmed(out)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
            let y = b.get(i).cloned().unwrap_or_else(Rational::zero);
            x - y
        })
        .collect();
    trimmed(out)
}

/// In-place remainder modulo a monic polynomial.
fn poly_rem_monic(p: &mut Vec<Rational>, m: &[Rational]) {
    let dm = m.len() - 1;
    while p.len() > dm {
        let c = p.pop().expect("nonempty");
        if c.is_zero() {
            continue;
        }
        let base = p.len() - dm;
        for (j, mj) in m[..dm].iter().enumerate() {
            p[base + j] -= &c * mj;
        }
    }
}

/// Quotient and remainder; `b` must be nonzero and trimmed.
fn poly_divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let db = b.len() - 1;
    let lead_inv = b[db].recip();
    let mut rem = trimmed(a.to_vec());
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - db];
    while rem.len() > db {
        let k = rem.len() - 1 - db;
        let c = rem.last().expect("nonempty") * &lead_inv;
        for (j, bj) in b.iter().enumerate() {
            rem[k + j] -= &c * bj;
        }
        quot[k] = c;
        rem.pop();
        rem = trimmed(rem);
    }
    (trimmed(quot), rem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, rat_int};

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), ints(&[1, 1]));
        assert_eq!(cyclotomic_polynomial(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
        for n in 1..=20 {
            assert_eq!(cyclotomic_polynomial(n).len() as u64 - 1, euler_phi(n));
        }
    }

    #[test]
    fn roots_of_unity() {
        let f2 = CyclotomicField::new(2).unwrap();
        assert_eq!(f2.root_of_unity(&rat(0, 1)).unwrap(), f2.one());
        assert_eq!(f2.root_of_unity(&rat(1, 2)).unwrap(), f2.from_rational(rat_int(-1)));
        let f3 = CyclotomicField::new(3).unwrap();
        assert_eq!(f3.root_of_unity(&rat(1, 3)).unwrap().coeffs(), &[rat_int(0), rat_int(1)]);
        assert!(matches!(
            f3.root_of_unity(&rat(1, 2)),
            Err(CycloError::DenominatorMismatch(..))
        ));
    }

    #[test]
    fn field_examples() {
        let f4 = CyclotomicField::new(4).unwrap();
        let minus_one = f4.from_rational(rat_int(-1));
        assert!((&minus_one + &f4.one()).is_zero());

        let z = f4.zeta_power(1);
        let x = &f4.one() - &z;
        let expected = (&f4.one() + &z).scale(&rat(1, 2));
        assert_eq!(f4.invert(&x).unwrap(), expected);

        let f3 = CyclotomicField::new(3).unwrap();
        let w = f3.zeta_power(1);
        assert_eq!(f3.mul(&f3.mul(&w, &w), &w), f3.one());
    }

    #[test]
    fn invert_zero_fails() {
        let f5 = CyclotomicField::new(5).unwrap();
        assert_eq!(f5.invert(&f5.zero()), Err(CycloError::DivisionByZero(5)));
        assert_eq!(CyclotomicField::new(0), Err(CycloError::ZeroConductor));
    }

    #[test]
    fn rationality() {
        let f2 = CyclotomicField::new(2).unwrap();
        assert_eq!(f2.one().as_rational(), Some(rat_int(1)));
        let s = &f2.zeta_power(1) + &f2.one();
        assert_eq!(s.as_rational(), Some(rat_int(0)));
        let f3 = CyclotomicField::new(3).unwrap();
        assert_eq!(f3.zeta_power(1).as_rational(), None);
    }

    #[test]
    fn primitive_root_sum_is_mobius() {
        fn mobius(mut n: u64) -> i64 {
            let mut m = 1;
            let mut p = 2;
            while p * p <= n {
                if n % p == 0 {
                    n /= p;
                    if n % p == 0 {
                        return 0;
                    }
                    m = -m;
                }
                p += 1;
            }
            if n > 1 {
                m = -m;
            }
            m
        }
        for n in 1..=12u64 {
            let f = CyclotomicField::new(n).unwrap();
            let mut acc = f.zero();
            for k in (0..n).filter(|k| k.gcd(&n) == 1) {
                acc += &f.zeta_power(k as i64);
            }
            assert_eq!(acc.as_rational(), Some(rat_int(mobius(n))), "N = {n}");
        }
    }

    #[test]
    fn pow_negative() {
        let f6 = CyclotomicField::new(6).unwrap();
        let z = f6.zeta_power(1);
        assert_eq!(f6.pow(&z, -1).unwrap(), f6.zeta_power(5));
        assert_eq!(f6.pow(&z, 6).unwrap(), f6.one());
    }

    #[test]
    fn display() {
        let f6 = CyclotomicField::new(6).unwrap();
        let x = &f6.from_rational(rat(1, 2)) - &f6.zeta_power(1).scale(&rat(1, 3));
        assert_eq!(x.to_string(), "1/2 - 1/3*z [N=6]");
        assert_eq!(f6.from_rational(rat(-3, 4)).to_string(), "-3/4");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn element(n: u64) -> impl Strategy<Value = CycloNumber> {
            let deg = euler_phi(n) as usize;
            proptest::collection::vec((-6i64..=6, 1i64..=4), deg).prop_map(move |v| {
                let f = CyclotomicField::new(n).unwrap();
                let mut x = f.zero();
                for (i, (a, b)) in v.into_iter().enumerate() {
                    x.coeffs[i] = rat(a, b);
                }
                x
            })
        }

        proptest! {
            #[test]
            fn inverse_is_inverse((n, x) in (1u64..=12).prop_flat_map(|n| (Just(n), element(n)))) {
                prop_assume!(!x.is_zero());
                let f = CyclotomicField::new(n).unwrap();
                let inv = f.invert(&x).unwrap();
                prop_assert_eq!(f.mul(&x, &inv), f.one());
            }

            #[test]
            fn roots_multiply(n in 1u64..=12, a in 0u64..12, b in 0u64..12) {
                let f = CyclotomicField::new(n).unwrap();
                let qa = rat((a % n) as i64, n as i64);
                let qb = rat((b % n) as i64, n as i64);
                let mut sum = &qa + &qb;
                if sum >= rat_int(1) {
                    sum -= rat_int(1);
                }
                let lhs = f.mul(&f.root_of_unity(&qa).unwrap(), &f.root_of_unity(&qb).unwrap());
                prop_assert_eq!(lhs, f.root_of_unity(&sum).unwrap());
            }
        }
    }
}
