//! Todd classes and twisted Euler characteristics.
//!
//! Every element `g` of the support set contributes
//!
//! ```text
//!     prod_tau  F_tau / (1 - a_tau(g) exp(-F_tau))
//! ```
//!
//! to the Todd class. Each factor is a power series in one divisor class; the
//! product is expanded as a polynomial in the `F_tau` truncated at the fan
//! dimension, monomials outside the Stanley-Reisner support are dropped as
//! soon as they appear, and the survivors are reduced in the Chow ring. The
//! sum over `g` has rational coefficients even though each term is only
//! cyclotomic; that is checked, not assumed.
//!
//! The Euler characteristic of `O(nD)`, `D = sum a_tau V(tau)`, inserts the
//! factor `exp(n a_tau F_tau)` per ray and weights each `g` by
//! `prod_tau a_tau(g)^(-n a_tau)`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::chow::{ChowClass, ChowError, ChowRing};
use crate::cyclotomic::{CycloError, CycloNumber, CyclotomicField};
use crate::fan::{ConeKey, Fan, FanError};
use crate::linalg::{rat_int, Rational};
use crate::polytope;
use crate::series::{exp_linear, series_invert, series_mul, TruncatedSeries};
use crate::stabilizers::{support_set, GroupElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RrError {
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Chow(#[from] ChowError),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
    #[error("fan is not smooth")]
    NotSmooth,
    #[error("divisor has {got} coefficients, fan has {expected} rays")]
    DivisorLength { expected: usize, got: usize },
    #[error("internal error: {0} is not rational")]
    NotRational(String),
}

/// A torus-invariant Weil divisor `sum a_tau V(tau)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Divisor {
    coeffs: Vec<i64>,
}

impl Divisor {
    pub fn new(fan: &Fan, coeffs: Vec<i64>) -> Result<Self, RrError> {
        if coeffs.len() != fan.num_rays() {
            return Err(RrError::DivisorLength { expected: fan.num_rays(), got: coeffs.len() });
        }
        Ok(Divisor { coeffs })
    }

    pub fn zero(fan: &Fan) -> Self {
        Divisor { coeffs: vec![0; fan.num_rays()] }
    }

    /// The prime divisor `V(tau)`.
    pub fn ray(fan: &Fan, tau: usize) -> Self {
        let mut d = Self::zero(fan);
        d.coeffs[tau] = 1;
        d
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn scaled(&self, n: i64) -> Self {
        Divisor { coeffs: self.coeffs.iter().map(|a| a * n).collect() }
    }

    fn check(&self, fan: &Fan) -> Result<(), RrError> {
        if self.coeffs.len() != fan.num_rays() {
            return Err(RrError::DivisorLength { expected: fan.num_rays(), got: self.coeffs.len() });
        }
        Ok(())
    }
}

/// Knobs on the outer sum over group elements, used by the convention and
/// negative-control checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SumOptions {
    /// Sum over `g^-1` in place of `g`.
    pub invert_elements: bool,
    /// Keep only the identity term.
    pub identity_only: bool,
}

/// `t / (1 - exp(2 pi i q) exp(-t))`, truncated at `t^degree`.
pub fn todd_factor_series(
    q: &Rational,
    degree: usize,
    field: &CyclotomicField,
) -> Result<TruncatedSeries, RrError> {
    if q.is_zero() {
        // (1 - e^{-t}) / t = sum_k (-1)^k t^k / (k+1)!
        let mut coeffs = Vec::with_capacity(degree + 1);
        let mut fact = rat_int(1);
        for k in 0..=degree {
            fact *= rat_int(k as i64 + 1);
            let sign = if k % 2 == 0 { 1 } else { -1 };
            coeffs.push(rat_int(sign) / &fact);
        }
        let s = TruncatedSeries::from_rationals(&coeffs, field);
        return Ok(series_invert(&s, field)?);
    }
    let a = field.root_of_unity(q)?;
    let one = TruncatedSeries::constant(field.one(), field, degree);
    let denom = one.sub(&exp_linear(&rat_int(-1), field, degree).scale(&a, field))?;
    Ok(series_invert(&denom, field)?.shift(1, field))
}

/// Sorted multiset of rays standing for `prod F_tau`.
type Monomial = Vec<usize>;

/// Expands `prod_tau factors[tau](F_tau)` up to total degree `degree`,
/// discarding monomials whose support is not a cone.
fn expand_product(
    fan: &Fan,
    factors: &[TruncatedSeries],
    degree: usize,
    field: &CyclotomicField,
) -> BTreeMap<Monomial, CycloNumber> {
    let mut terms: BTreeMap<Monomial, CycloNumber> = BTreeMap::new();
    terms.insert(Vec::new(), field.one());
    for (tau, s) in factors.iter().enumerate() {
        let mut next: BTreeMap<Monomial, CycloNumber> = BTreeMap::new();
        for (mono, c) in &terms {
            for k in 0..=degree - mono.len() {
                let sk = s.coeff(k);
                if sk.is_zero() {
                    continue;
                }
                let mut m = mono.clone();
                if k > 0 {
                    let mut support = m.clone();
                    support.dedup();
                    support.push(tau);
                    if !fan.is_cone(&support) {
                        continue;
                    }
                    m.extend(std::iter::repeat_n(tau, k));
                }
                let v = field.mul(c, sk);
                match next.get_mut(&m) {
                    Some(x) => *x += &v,
                    None => {
                        next.insert(m, v);
                    }
                }
            }
        }
        next.retain(|_, v| !v.is_zero());
        terms = next;
    }
    terms
}

/// Memoized monomial reduction for one fan.
struct Reducer<'a> {
    ring: ChowRing<'a>,
    cache: HashMap<Monomial, ChowClass>,
}

impl<'a> Reducer<'a> {
    fn new(ring: ChowRing<'a>) -> Self {
        Reducer { ring, cache: HashMap::new() }
    }

    fn reduce(&mut self, mono: &Monomial) -> Result<&ChowClass, ChowError> {
        if !self.cache.contains_key(mono) {
            let c = self.ring.monomial(mono)?;
            self.cache.insert(mono.clone(), c);
        }
        Ok(&self.cache[mono])
    }

    fn assemble(
        &mut self,
        terms: &BTreeMap<Monomial, CycloNumber>,
        field: &CyclotomicField,
    ) -> Result<ChowClass<CycloNumber>, ChowError> {
        let mut out = ChowClass::zero(field.clone());
        for (mono, c) in terms {
            for (cone, r) in self.reduce(mono)?.terms() {
                out.add_term(cone.clone(), &c.scale(r));
            }
        }
        Ok(out)
    }
}

/// One summand of the Todd class.
#[derive(Clone, Debug)]
pub struct PerGContribution {
    pub element: GroupElement,
    /// Per ray, the series substituted for `F_tau`.
    pub factor_series: Vec<TruncatedSeries>,
    pub assembled: ChowClass<CycloNumber>,
}

#[derive(Clone, Debug)]
pub struct ToddReport {
    pub dim: usize,
    pub conductor: u64,
    /// `Td_0 .. Td_d`; `components[k]` has codimension `k`.
    pub components: Vec<ChowClass>,
    pub contributions: Vec<PerGContribution>,
    /// `∫ Td_d`.
    pub integral: Rational,
}

impl ToddReport {
    pub fn total(&self) -> ChowClass {
        let mut out = ChowClass::zero(());
        for c in &self.components {
            out.add_assign(c);
        }
        out
    }
}

fn elements_for(fan: &Fan, opts: &SumOptions) -> (Vec<GroupElement>, u64) {
    let set = support_set(fan);
    let conductor = set.conductor();
    let elements = set
        .elements()
        .iter()
        .filter(|g| !opts.identity_only || g.is_identity())
        .map(|g| if opts.invert_elements { g.inverse() } else { g.clone() })
        .collect();
    (elements, conductor)
}

fn to_rational_class(c: &ChowClass<CycloNumber>) -> Result<ChowClass, RrError> {
    c.try_map((), CycloNumber::as_rational)
        .ok_or_else(|| RrError::NotRational(format!("Todd class coefficient in {c}")))
}

pub fn todd_class(fan: &Fan) -> Result<ToddReport, RrError> {
    todd_class_with(fan, &SumOptions::default())
}

pub fn todd_class_with(fan: &Fan, opts: &SumOptions) -> Result<ToddReport, RrError> {
    let ring = ChowRing::new(fan)?;
    let d = fan.dim();
    let (elements, conductor) = elements_for(fan, opts);
    let field = CyclotomicField::new(conductor)?;
    let mut reducer = Reducer::new(ring);

    let mut total = ChowClass::zero(field.clone());
    let mut contributions = Vec::with_capacity(elements.len());
    for g in elements {
        let factor_series = g
            .charges()
            .iter()
            .map(|q| todd_factor_series(q, d, &field))
            .collect::<Result<Vec<_>, _>>()?;
        let expanded = expand_product(fan, &factor_series, d, &field);
        let assembled = reducer.assemble(&expanded, &field)?;
        total.add_assign(&assembled);
        contributions.push(PerGContribution { element: g, factor_series, assembled });
    }

    let total = to_rational_class(&total)?;
    let components: Vec<ChowClass> = (0..=d).map(|k| total.component(k)).collect();
    let integral = ring.integrate(&components[d]);
    Ok(ToddReport { dim: d, conductor, components, contributions, integral })
}

/// `t / (1 - e^{-t})` from Bernoulli numbers: `sum_k B_k^+ t^k / k!`.
fn classical_todd_coefficients(degree: usize) -> Vec<Rational> {
    // B_0 = 1, sum_{k=0}^{n} C(n+1, k) B_k = 0 (convention B_1 = -1/2).
    let mut b: Vec<Rational> = vec![rat_int(1)];
    for n in 1..=degree {
        let mut binom = BigInt::one();
        let mut acc = Rational::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += Rational::from_integer(binom.clone()) * bk;
            binom = binom * BigInt::from(n + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / Rational::from_integer(BigInt::from(n + 1)));
    }
    if degree >= 1 {
        b[1] = -b[1].clone();
    }
    let mut fact = rat_int(1);
    b.into_iter()
        .enumerate()
        .map(|(k, bk)| {
            if k > 0 {
                fact *= rat_int(k as i64);
            }
            bk / &fact
        })
        .collect()
}

/// Classical Todd class `prod_tau Q(F_tau)` of a smooth complete toric
/// variety, expanded over the rationals without Stanley-Reisner pruning.
pub fn todd_smooth_oracle(fan: &Fan) -> Result<ToddReport, RrError> {
    if !fan.is_smooth() {
        return Err(RrError::NotSmooth);
    }
    let ring = ChowRing::new(fan)?;
    let d = fan.dim();
    let q = classical_todd_coefficients(d);

    // Full expansion as exponent vectors.
    let mut terms: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    terms.insert(vec![0; fan.num_rays()], rat_int(1));
    for tau in 0..fan.num_rays() {
        let mut next = BTreeMap::new();
        for (exps, c) in &terms {
            let deg: usize = exps.iter().sum();
            for (k, qk) in q.iter().enumerate().take(d - deg + 1) {
                let mut e = exps.clone();
                e[tau] = k;
                *next.entry(e).or_insert_with(Rational::zero) += c * qk;
            }
        }
        terms = next;
    }

    let mut total = ChowClass::zero(());
    for (exps, c) in terms {
        // Descending ray order, unlike the main path.
        let mut rays: Vec<usize> = Vec::new();
        for (tau, &k) in exps.iter().enumerate().rev() {
            rays.extend(std::iter::repeat_n(tau, k));
        }
        let reduced = ring.product_from(ChowClass::fundamental(()), &rays)?;
        total.add_assign(&reduced.scale(&c));
    }
    let components: Vec<ChowClass> = (0..=d).map(|k| total.component(k)).collect();
    let integral = ring.integrate(&components[d]);
    let contributions = Vec::new();
    Ok(ToddReport { dim: d, conductor: 1, components, contributions, integral })
}

/// `chi(O_X(nD))`.
pub fn chi_twisted(fan: &Fan, divisor: &Divisor, n: i64) -> Result<Rational, RrError> {
    chi_twisted_with(fan, divisor, n, &SumOptions::default())
}

pub fn chi_twisted_with(
    fan: &Fan,
    divisor: &Divisor,
    n: i64,
    opts: &SumOptions,
) -> Result<Rational, RrError> {
    divisor.check(fan)?;
    let ring = ChowRing::new(fan)?;
    let d = fan.dim();
    let (elements, conductor) = elements_for(fan, opts);
    let field = CyclotomicField::new(conductor)?;
    let mut integrals: HashMap<Monomial, Rational> = HashMap::new();

    let scaled: Vec<i64> = divisor.coeffs().iter().map(|a| a * n).collect();
    let exps: Vec<TruncatedSeries> =
        scaled.iter().map(|&a| exp_linear(&rat_int(a), &field, d)).collect();

    let mut total = field.zero();
    for g in &elements {
        // Sections of O(D) have character prod a_tau(g)^(a_tau); the sum
        // picks them out with the inverse character.
        let phase: Rational = -g
            .charges()
            .iter()
            .zip(&scaled)
            .map(|(q, &a)| q * rat_int(a))
            .sum::<Rational>();
        let weight = field.root_of_unity(&(&phase - Rational::from_integer(phase.floor().to_integer())))?;

        let factors = g
            .charges()
            .iter()
            .zip(&exps)
            .map(|(q, e)| Ok(series_mul(&todd_factor_series(q, d, &field)?, e, &field)?))
            .collect::<Result<Vec<_>, RrError>>()?;
        let expanded = expand_product(fan, &factors, d, &field);
        let mut integral = field.zero();
        for (mono, c) in expanded.iter().filter(|(m, _)| m.len() == d) {
            let r = match integrals.get(mono) {
                Some(r) => r.clone(),
                None => {
                    let r = ring.integrate(&ring.monomial(mono)?);
                    integrals.insert(mono.clone(), r.clone());
                    r
                }
            };
            integral += &c.scale(&r);
        }
        total += &field.mul(&weight, &integral);
    }
    total
        .as_rational()
        .ok_or_else(|| RrError::NotRational(format!("Euler characteristic {total}")))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EhrhartResult {
    /// `(n, chi(nD))` for `n = 0..=max_n`.
    pub table: Vec<(i64, Rational)>,
    /// Coefficients of `E(n)`, constant term first; Cartier divisors only.
    pub polynomial: Option<Vec<Rational>>,
}

impl EhrhartResult {
    pub fn eval_polynomial(&self, n: i64) -> Option<Rational> {
        let p = self.polynomial.as_ref()?;
        let x = rat_int(n);
        Some(p.iter().rev().fold(Rational::zero(), |acc, c| acc * &x + c))
    }
}

/// `chi(nD)` for `n = 0..=max_n`, plus the Riemann-Roch polynomial
/// `E(n) = sum_k n^k ∫ D^k Td_(d-k) / k!` when `D` is Cartier.
pub fn ehrhart(fan: &Fan, divisor: &Divisor, max_n: u32) -> Result<EhrhartResult, RrError> {
    divisor.check(fan)?;
    let table = (0..=max_n as i64)
        .map(|n| Ok((n, chi_twisted(fan, divisor, n)?)))
        .collect::<Result<Vec<_>, RrError>>()?;
    let polynomial = if polytope::is_cartier(fan, divisor) {
        Some(rr_polynomial(fan, divisor)?)
    } else {
        None
    };
    Ok(EhrhartResult { table, polynomial })
}

fn rr_polynomial(fan: &Fan, divisor: &Divisor) -> Result<Vec<Rational>, RrError> {
    let ring = ChowRing::new(fan)?;
    let td = todd_class(fan)?;
    let d = fan.dim();
    let a: Vec<Rational> = divisor.coeffs().iter().map(|&x| rat_int(x)).collect();
    let mut out = Vec::with_capacity(d + 1);
    let mut fact = rat_int(1);
    for k in 0..=d {
        if k > 0 {
            fact *= rat_int(k as i64);
        }
        let mut c = td.components[d - k].clone();
        for _ in 0..k {
            c = ring.multiply_by_linear(&c, &a)?;
        }
        out.push(ring.integrate(&c) / &fact);
    }
    Ok(out)
}

/// Sum of the rays' classes, `sum_tau F_tau`.
pub fn anticanonical(fan: &Fan) -> ChowClass {
    let mut c = ChowClass::zero(());
    for tau in 0..fan.num_rays() {
        c.add_term(vec![tau] as ConeKey, &rat_int(1));
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::linalg::rat;

    fn rationals(s: &TruncatedSeries) -> Vec<Rational> {
        s.as_rationals().unwrap()
    }

    #[test]
    fn classical_factor() {
        let f = CyclotomicField::new(1).unwrap();
        let s = todd_factor_series(&rat_int(0), 4, &f).unwrap();
        let want = vec![rat(1, 1), rat(1, 2), rat(1, 12), rat(0, 1), rat(-1, 720)];
        assert_eq!(rationals(&s), want);
        assert_eq!(classical_todd_coefficients(4), want);
        let s0 = todd_factor_series(&rat_int(0), 0, &f).unwrap();
        assert_eq!(rationals(&s0), vec![rat_int(1)]);
    }

    #[test]
    fn half_charge_factor() {
        let f = CyclotomicField::new(2).unwrap();
        let s = todd_factor_series(&rat(1, 2), 3, &f).unwrap();
        assert_eq!(rationals(&s), vec![rat(0, 1), rat(1, 2), rat(1, 4), rat(0, 1)]);
    }

    #[test]
    fn factor_needs_compatible_conductor() {
        let f = CyclotomicField::new(2).unwrap();
        assert!(matches!(
            todd_factor_series(&rat(1, 3), 2, &f),
            Err(RrError::Cyclo(CycloError::DenominatorMismatch(..)))
        ));
    }

    #[test]
    fn todd_of_p1() {
        let f = corpus::p1();
        let td = todd_class(&f).unwrap();
        assert_eq!(td.components[0], ChowClass::fundamental(()));
        let mut want = ChowClass::zero(());
        want.add_term(vec![0], &rat(1, 2));
        want.add_term(vec![1], &rat(1, 2));
        assert_eq!(td.components[1], want);
        assert_eq!(td.integral, rat_int(1));
    }

    #[test]
    fn todd_of_p2() {
        let f = corpus::p2();
        let ring = ChowRing::new(&f).unwrap();
        let td = todd_class(&f).unwrap();
        assert!(ring.chow_equal(&td.components[1], &anticanonical(&f).scale(&rat(1, 2))).unwrap());
        assert_eq!(td.integral, rat_int(1));
    }

    #[test]
    fn todd_of_weighted_plane() {
        let f = corpus::p112();
        let td = todd_class(&f).unwrap();
        assert_eq!(td.integral, rat_int(1));
        assert_eq!(td.contributions.len(), 2);
        let twisted = &td.contributions[1];
        assert!(!twisted.element.is_identity());
        assert_eq!(twisted.assembled.min_codim(), Some(2));
    }

    #[test]
    fn contributions_start_in_support_codimension() {
        for f in corpus::all() {
            for c in todd_class(&f).unwrap().contributions {
                let s = c.element.support().len();
                if let Some(k) = c.assembled.min_codim() {
                    assert!(k >= s);
                }
                for (tau, series) in c.factor_series.iter().enumerate() {
                    let in_support = c.element.support().contains(&tau);
                    assert_eq!(series.coeff(0).is_zero(), in_support);
                }
            }
        }
    }

    #[test]
    fn smooth_oracle_agrees() {
        for f in [corpus::p1(), corpus::p1xp1(), corpus::hirzebruch(1)] {
            let ring = ChowRing::new(&f).unwrap();
            let a = todd_class(&f).unwrap();
            let b = todd_smooth_oracle(&f).unwrap();
            for k in 0..=f.dim() {
                assert!(ring.chow_equal(&a.components[k], &b.components[k]).unwrap());
            }
            assert_eq!(b.integral, rat_int(1));
        }
        assert_eq!(todd_smooth_oracle(&corpus::p112()).err(), Some(RrError::NotSmooth));
    }

    #[test]
    fn chi_examples() {
        let p2 = corpus::p2();
        assert_eq!(chi_twisted(&p2, &Divisor::zero(&p2), 0).unwrap(), rat_int(1));
        assert_eq!(chi_twisted(&p2, &Divisor::ray(&p2, 0), 2).unwrap(), rat_int(6));
        let w = corpus::p112();
        let d = Divisor::ray(&w, 2);
        let got: Vec<Rational> = (1..=4).map(|n| chi_twisted(&w, &d, n).unwrap()).collect();
        assert_eq!(got, vec![rat_int(2), rat_int(4), rat_int(6), rat_int(9)]);
    }

    /// Nef divisors have no higher cohomology, so chi counts lattice points.
    #[test]
    fn nef_chi_counts_points() {
        for f in corpus::all() {
            let r = f.num_rays();
            let top: i64 = if r <= 4 { 3 } else { 2 };
            let mut checked = 0;
            for code in 0..top.pow(r as u32) {
                let coeffs: Vec<i64> = (0..r).map(|t| (code / top.pow(t as u32)) % top).collect();
                let d = Divisor::new(&f, coeffs).unwrap();
                if !polytope::is_nef(&f, &d) {
                    continue;
                }
                checked += 1;
                for n in 1..=2 {
                    let count = polytope::count_dilate(&f, &d, n, false).unwrap();
                    assert_eq!(chi_twisted(&f, &d, n).unwrap(), rat_int(count), "{:?} {:?} n={n}", f.name(), d);
                }
            }
            assert!(checked > 1, "{:?}", f.name());
        }
    }

    #[test]
    fn divisor_length_checked() {
        let f = corpus::p2();
        assert_eq!(
            Divisor::new(&f, vec![1, 0]).err(),
            Some(RrError::DivisorLength { expected: 3, got: 2 })
        );
    }

    #[test]
    fn ehrhart_polynomials() {
        let p1 = corpus::p1();
        let e = ehrhart(&p1, &Divisor::ray(&p1, 0), 3).unwrap();
        assert_eq!(e.polynomial, Some(vec![rat_int(1), rat_int(1)]));
        let p2 = corpus::p2();
        let e = ehrhart(&p2, &Divisor::ray(&p2, 0), 4).unwrap();
        assert_eq!(e.polynomial, Some(vec![rat_int(1), rat(3, 2), rat(1, 2)]));
        for (n, chi) in &e.table {
            assert_eq!(e.eval_polynomial(*n).as_ref(), Some(chi));
        }
        let w = corpus::p112();
        let e = ehrhart(&w, &Divisor::ray(&w, 2), 5).unwrap();
        assert_eq!(e.polynomial, None);
        let values: Vec<Rational> = e.table.iter().map(|(_, c)| c.clone()).collect();
        let want: Vec<Rational> = [1, 2, 4, 6, 9, 12].iter().map(|&x| rat_int(x)).collect();
        assert_eq!(values, want);
    }
}
