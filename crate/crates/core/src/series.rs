//! Truncated power series in one variable with cyclotomic coefficients.

use crate::cyclotomic::{CycloError, CycloNumber, CyclotomicField};
use crate::linalg::{rat_int, Rational};

/// `c_0 + c_1 t + ... + c_n t^n`, everything above `t^n` discarded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<CycloNumber>,
}

impl TruncatedSeries {
    pub fn from_coeffs(coeffs: Vec<CycloNumber>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least a constant term");
        TruncatedSeries { coeffs }
    }

    pub fn zero(field: &CyclotomicField, truncation: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![field.zero(); truncation + 1],
        }
    }

    pub fn constant(c: CycloNumber, field: &CyclotomicField, truncation: usize) -> Self {
        let mut s = Self::zero(field, truncation);
        s.coeffs[0] = c;
        s
    }

    pub fn from_rationals(r: &[Rational], field: &CyclotomicField) -> Self {
        Self::from_coeffs(r.iter().map(|x| field.from_rational(x.clone())).collect())
    }

    /// The monomial `c * t^k` (zero if `k` exceeds the truncation).
    pub fn monomial(c: CycloNumber, k: usize, field: &CyclotomicField, truncation: usize) -> Self {
        let mut s = Self::zero(field, truncation);
        if k <= truncation {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(CycloNumber::is_zero)
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[CycloNumber] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &CycloNumber {
        &self.coeffs[k]
    }

    /// Every coefficient as a rational, if they all are.
    pub fn as_rationals(&self) -> Option<Vec<Rational>> {
        self.coeffs.iter().map(CycloNumber::as_rational).collect()
    }

    fn same_shape(&self, other: &Self) -> Result<(), CycloError> {
        if self.truncation() != other.truncation() {
            return Err(CycloError::TruncationMismatch(
                self.truncation(),
                other.truncation(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, CycloError> {
        self.same_shape(other)?;
        Ok(TruncatedSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CycloError> {
        self.same_shape(other)?;
        Ok(TruncatedSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    /// Multiply every coefficient by `c`.
    pub fn scale(&self, c: &CycloNumber, field: &CyclotomicField) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| field.mul(a, c)).collect(),
        }
    }

    /// Multiply by `t^k`, dropping what falls past the truncation.
    pub fn shift(&self, k: usize, field: &CyclotomicField) -> Self {
        let n = self.truncation();
        let coeffs = (0..=n)
            .map(|i| if i < k { field.zero() } else { self.coeffs[i - k].clone() })
            .collect();
        TruncatedSeries { coeffs }
    }

    /// Substitute `t -> c t`, i.e. scale `t^k` by `c^k`.
    pub fn rescale_variable(&self, c: &Rational) -> Self {
        let mut power = rat_int(1);
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let out = a.scale(&power);
                power *= c;
                out
            })
            .collect();
        TruncatedSeries { coeffs }
    }
}

pub fn series_mul(
    a: &TruncatedSeries,
    b: &TruncatedSeries,
    field: &CyclotomicField,
) -> Result<TruncatedSeries, CycloError> {
    a.same_shape(b)?;
    let n = a.truncation();
    let mut out = TruncatedSeries::zero(field, n);
    for i in 0..=n {
        if a.coeffs[i].is_zero() {
            continue;
        }
        for j in 0..=n - i {
            out.coeffs[i + j] += &field.mul(&a.coeffs[i], &b.coeffs[j]);
        }
    }
    Ok(out)
}

pub fn series_invert(
    s: &TruncatedSeries,
    field: &CyclotomicField,
) -> Result<TruncatedSeries, CycloError> {
    if s.coeffs[0].is_zero() {
        return Err(CycloError::NotInvertible);
    }
    let n = s.truncation();
    let inv0 = field.invert(&s.coeffs[0])?;
    let mut out = TruncatedSeries::zero(field, n);
    out.coeffs[0] = inv0.clone();
    // b_k = -inv0 * sum_{j=1..k} a_j b_{k-j}
    for k in 1..=n {
        let mut acc = field.zero();
        for j in 1..=k {
            acc += &field.mul(&s.coeffs[j], &out.coeffs[k - j]);
        }
        out.coeffs[k] = -&field.mul(&inv0, &acc);
    }
    Ok(out)
}

pub fn series_exp(
    s: &TruncatedSeries,
    field: &CyclotomicField,
) -> Result<TruncatedSeries, CycloError> {
    if !s.coeffs[0].is_zero() {
        return Err(CycloError::NonzeroConstantTerm);
    }
    let n = s.truncation();
    let mut out = TruncatedSeries::zero(field, n);
    out.coeffs[0] = field.one();
    // From E' = S' E: k e_k = sum_{j=1..k} j s_j e_{k-j}
    for k in 1..=n {
        let mut acc = field.zero();
        for j in 1..=k {
            if s.coeffs[j].is_zero() {
                continue;
            }
            let term = field.mul(&s.coeffs[j], &out.coeffs[k - j]);
            acc += &term.scale(&rat_int(j as i64));
        }
        out.coeffs[k] = acc.scale(&Rational::new(1.into(), (k as i64).into()));
    }
    Ok(out)
}

/// Series of `exp(c t)` with rational `c`.
pub fn exp_linear(c: &Rational, field: &CyclotomicField, truncation: usize) -> TruncatedSeries {
    let mut coeffs = Vec::with_capacity(truncation + 1);
    let mut term = rat_int(1);
    for k in 0..=truncation {
        if k > 0 {
            term = term * c / rat_int(k as i64);
        }
        coeffs.push(field.from_rational(term.clone()));
    }
    TruncatedSeries { coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn q_series(v: &[(i64, i64)], f: &CyclotomicField) -> TruncatedSeries {
        let r: Vec<Rational> = v.iter().map(|&(a, b)| rat(a, b)).collect();
        TruncatedSeries::from_rationals(&r, f)
    }

    #[test]
    fn geometric_series() {
        let f = CyclotomicField::new(1).unwrap();
        let s = q_series(&[(1, 1), (-1, 1), (0, 1), (0, 1)], &f);
        let inv = series_invert(&s, &f).unwrap();
        assert_eq!(inv, q_series(&[(1, 1); 4], &f));
    }

    #[test]
    fn exponential() {
        let f = CyclotomicField::new(1).unwrap();
        let t = q_series(&[(0, 1), (1, 1), (0, 1), (0, 1)], &f);
        let e = series_exp(&t, &f).unwrap();
        assert_eq!(e, q_series(&[(1, 1), (1, 1), (1, 2), (1, 6)], &f));
        assert_eq!(e, exp_linear(&rat_int(1), &f, 3));
        assert_eq!(series_exp(&e, &f), Err(CycloError::NonzeroConstantTerm));
    }

    #[test]
    fn invert_with_root_of_unity() {
        let f = CyclotomicField::new(4).unwrap();
        let z = f.zeta_power(1);
        // 1 - z e^{-t}
        let s = TruncatedSeries::constant(f.one(), &f, 3)
            .sub(&exp_linear(&rat_int(-1), &f, 3).scale(&z, &f))
            .unwrap();
        let inv = series_invert(&s, &f).unwrap();
        let expected = (&f.one() + &z).scale(&rat(1, 2));
        assert_eq!(inv.coeff(0), &expected);
        let prod = series_mul(&s, &inv, &f).unwrap();
        assert_eq!(prod, TruncatedSeries::constant(f.one(), &f, 3));
    }

    #[test]
    fn contract_violations() {
        let f = CyclotomicField::new(3).unwrap();
        let a = TruncatedSeries::zero(&f, 2);
        let b = TruncatedSeries::zero(&f, 3);
        assert_eq!(series_mul(&a, &b, &f), Err(CycloError::TruncationMismatch(2, 3)));
        assert_eq!(series_invert(&a, &f), Err(CycloError::NotInvertible));
    }

    #[test]
    fn shift_and_rescale() {
        let f = CyclotomicField::new(1).unwrap();
        let s = q_series(&[(1, 1), (2, 1), (3, 1)], &f);
        assert_eq!(s.shift(1, &f), q_series(&[(0, 1), (1, 1), (2, 1)], &f));
        assert_eq!(s.rescale_variable(&rat_int(-1)), q_series(&[(1, 1), (-2, 1), (3, 1)], &f));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn times_inverse_is_one(
                n in prop::sample::select(vec![1u64, 2, 3, 4, 6]),
                raw in proptest::collection::vec((-5i64..=5, 1i64..=3, 0i64..12), 4),
            ) {
                let f = CyclotomicField::new(n).unwrap();
                let coeffs: Vec<CycloNumber> = raw
                    .iter()
                    .map(|&(a, b, k)| f.zeta_power(k).scale(&rat(a, b)))
                    .collect();
                prop_assume!(!coeffs[0].is_zero());
                let s = TruncatedSeries::from_coeffs(coeffs);
                let inv = series_invert(&s, &f).unwrap();
                prop_assert_eq!(
                    series_mul(&s, &inv, &f).unwrap(),
                    TruncatedSeries::constant(f.one(), &f, 3)
                );
            }
        }
    }
}
