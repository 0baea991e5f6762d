//! Rational Chow ring of a complete simplicial toric variety.
//!
//! Classes live in the cone basis `[V(sigma)]`. The divisor class `F_tau` of a
//! ray acts by three rules:
//!
//! * `tau` not in `sigma`, `sigma + tau` a cone `gamma`:
//!   `[V(sigma)] F_tau = mult(sigma) / mult(gamma) [V(gamma)]`
//! * `tau` not in `sigma`, no such cone: the product vanishes
//! * `tau` in `sigma`: trade `F_tau` for other rays using a linear relation
//!   `sum <m, n_t> F_t = 0` where `m` is dual to `n_tau` on `sigma`.
//!
//! The degree map sends the class of every maximal cone to 1.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::cyclotomic::{CycloNumber, CyclotomicField};
use crate::fan::{ConeKey, Fan, FanError};
use crate::linalg::{nullspace, rat_int, solve_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChowError {
    #[error("fan is not complete; only complete fans have this ring presentation")]
    NotComplete,
    #[error("classes are not pure of one codimension")]
    MixedDegree,
    #[error(transparent)]
    Fan(#[from] FanError),
}

/// Coefficient ring for [`ChowClass`].
pub trait Coefficient: Clone + PartialEq + fmt::Debug {
    type Context: Clone + PartialEq + fmt::Debug;
    fn zero_in(ctx: &Self::Context) -> Self;
    fn one_in(ctx: &Self::Context) -> Self;
    fn vanishes(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn scale(&self, r: &Rational) -> Self;
}

impl Coefficient for Rational {
    type Context = ();
    fn zero_in(_: &()) -> Self {
        Rational::zero()
    }
    fn one_in(_: &()) -> Self {
        Rational::one()
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
}

impl Coefficient for CycloNumber {
    type Context = CyclotomicField;
    fn zero_in(ctx: &CyclotomicField) -> Self {
        ctx.zero()
    }
    fn one_in(ctx: &CyclotomicField) -> Self {
        ctx.one()
    }
    fn vanishes(&self) -> bool {
        CycloNumber::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn scale(&self, r: &Rational) -> Self {
        CycloNumber::scale(self, r)
    }
}

/// A finite combination of cone classes; the codimension of `[V(sigma)]` is
/// `dim sigma`. Zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct ChowClass<C: Coefficient = Rational> {
    ctx: C::Context,
    terms: BTreeMap<ConeKey, C>,
}

impl<C: Coefficient> ChowClass<C> {
    pub fn zero(ctx: C::Context) -> Self {
        ChowClass { ctx, terms: BTreeMap::new() }
    }

    /// The fundamental class `[X] = [V(0)]`.
    pub fn fundamental(ctx: C::Context) -> Self {
        let one = C::one_in(&ctx);
        Self::cone_class(ctx, Vec::new(), one)
    }

    pub fn cone_class(ctx: C::Context, cone: ConeKey, coeff: C) -> Self {
        let mut c = Self::zero(ctx);
        c.add_term(cone, &coeff);
        c
    }

    pub fn context(&self) -> &C::Context {
        &self.ctx
    }

    pub fn terms(&self) -> &BTreeMap<ConeKey, C> {
        &self.terms
    }

    pub fn coeff(&self, cone: &[usize]) -> C {
        self.terms.get(cone).cloned().unwrap_or_else(|| C::zero_in(&self.ctx))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mut cone: ConeKey, coeff: &C) {
        if coeff.vanishes() {
            return;
        }
        cone.sort_unstable();
        match self.terms.get_mut(&cone) {
            Some(x) => {
                x.add_assign(coeff);
                if x.vanishes() {
                    self.terms.remove(&cone);
                }
            }
            None => {
                self.terms.insert(cone, coeff.clone());
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v);
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = Self::zero(self.ctx.clone());
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &v.scale(r));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(&other.scale(&rat_int(-1)));
        out
    }

    /// The part of codimension `k`.
    pub fn component(&self, k: usize) -> Self {
        ChowClass {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(c, _)| c.len() == k)
                .map(|(c, v)| (c.clone(), v.clone()))
                .collect(),
        }
    }

    /// `Some(k)` if every term has codimension `k`; `None` for the zero
    /// class or mixed classes.
    pub fn pure_codim(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(Vec::len);
        let k = it.next()?;
        it.all(|j| j == k).then_some(k)
    }

    pub fn min_codim(&self) -> Option<usize> {
        self.terms.keys().map(Vec::len).min()
    }

    pub fn map<D: Coefficient>(&self, ctx: D::Context, f: impl Fn(&C) -> D) -> ChowClass<D> {
        let mut out = ChowClass::zero(ctx);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &f(v));
        }
        out
    }

    pub fn try_map<D: Coefficient>(
        &self,
        ctx: D::Context,
        f: impl Fn(&C) -> Option<D>,
    ) -> Option<ChowClass<D>> {
        let mut out = ChowClass::zero(ctx);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &f(v)?);
        }
        Some(out)
    }
}

impl<C: Coefficient + fmt::Display> fmt::Display for ChowClass<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({v})V{k:?}")?;
        }
        Ok(())
    }
}

impl<C: Coefficient + fmt::Display> fmt::Debug for ChowClass<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// What a custom chooser sees when the third reduction rule needs a
/// functional: the cone, the repeated ray, the canonical choice, and a basis
/// of the directions it may be moved in.
pub struct FunctionalRequest<'a> {
    pub cone: &'a [usize],
    pub tau: usize,
    pub canonical: &'a [Rational],
    pub kernel: &'a [Vec<Rational>],
}

/// The Chow ring of a complete simplicial fan.
#[derive(Clone, Copy, Debug)]
pub struct ChowRing<'a> {
    fan: &'a Fan,
}

impl<'a> ChowRing<'a> {
    pub fn new(fan: &'a Fan) -> Result<Self, ChowError> {
        if !fan.is_complete() {
            return Err(ChowError::NotComplete);
        }
        Ok(ChowRing { fan })
    }

    pub fn fan(&self) -> &'a Fan {
        self.fan
    }

    pub fn dim(&self) -> usize {
        self.fan.dim()
    }

    /// `F_tau = [V(tau)]`.
    pub fn divisor_class(&self, tau: usize) -> Result<ChowClass, ChowError> {
        self.fan.check_ray(tau)?;
        Ok(ChowClass::cone_class((), vec![tau], Rational::one()))
    }

    /// The canonical functional for the third reduction rule: `<m, n_tau> = 1`,
    /// `<m, n_t> = 0` for the other rays of the cone, free variables zero.
    pub fn canonical_functional(&self, cone: &[usize], tau: usize) -> Vec<Rational> {
        let (rows, rhs) = self.dual_system(cone, tau);
        solve_rational(&rows, &rhs).expect("cone rays are independent")
    }

    fn dual_system(&self, cone: &[usize], tau: usize) -> (Vec<Vec<Rational>>, Vec<Rational>) {
        let rows = cone
            .iter()
            .map(|&t| self.fan.ray(t).iter().map(|&x| rat_int(x)).collect())
            .collect();
        let rhs = cone
            .iter()
            .map(|&t| if t == tau { Rational::one() } else { Rational::zero() })
            .collect();
        (rows, rhs)
    }

    /// `[V(sigma)] * [V(tau)]` for `tau` outside `sigma`.
    fn join(&self, sigma: &[usize], tau: usize) -> Option<(ConeKey, Rational)> {
        let mut gamma = sigma.to_vec();
        gamma.push(tau);
        gamma.sort_unstable();
        let mg = self.fan.multiplicity(&gamma).ok()?;
        let ms = self.fan.multiplicity(sigma).expect("term cones are cones");
        Some((gamma, Rational::new(ms.into(), mg.into())))
    }

    /// Expansion of `[V(sigma)] * F_tau` in the cone basis.
    fn divisor_product(
        &self,
        sigma: &[usize],
        tau: usize,
        choose: &dyn Fn(&FunctionalRequest) -> Vec<Rational>,
    ) -> Vec<(ConeKey, Rational)> {
        if !sigma.contains(&tau) {
            return self.join(sigma, tau).into_iter().collect();
        }
        let canonical = self.canonical_functional(sigma, tau);
        let (rows, rhs) = self.dual_system(sigma, tau);
        let kernel = nullspace(&rows, self.dim());
        let m = choose(&FunctionalRequest { cone: sigma, tau, canonical: &canonical, kernel: &kernel });
        for (row, want) in rows.iter().zip(&rhs) {
            assert_eq!(&crate::linalg::dot(row, &m), want, "chooser returned an invalid functional");
        }
        let mut out = Vec::new();
        for other in (0..self.fan.num_rays()).filter(|t| !sigma.contains(t)) {
            let c = self.fan.pairing(&m, other);
            if c.is_zero() {
                continue;
            }
            if let Some((gamma, r)) = self.join(sigma, other) {
                out.push((gamma, -c * r));
            }
        }
        out
    }

    pub fn multiply_by_divisor<C: Coefficient>(
        &self,
        class: &ChowClass<C>,
        tau: usize,
    ) -> Result<ChowClass<C>, ChowError> {
        self.multiply_by_divisor_with(class, tau, &|req| req.canonical.to_vec())
    }

    /// As [`Self::multiply_by_divisor`], with a caller-supplied functional for
    /// the third reduction rule. The result is the same class in the ring,
    /// though possibly a different representative.
    pub fn multiply_by_divisor_with<C: Coefficient>(
        &self,
        class: &ChowClass<C>,
        tau: usize,
        choose: &dyn Fn(&FunctionalRequest) -> Vec<Rational>,
    ) -> Result<ChowClass<C>, ChowError> {
        self.fan.check_ray(tau)?;
        let mut out = ChowClass::zero(class.ctx.clone());
        for (sigma, x) in &class.terms {
            for (gamma, r) in self.divisor_product(sigma, tau, choose) {
                out.add_term(gamma, &x.scale(&r));
            }
        }
        Ok(out)
    }

    /// Multiply by the divisor `sum_tau a_tau F_tau`.
    pub fn multiply_by_linear<C: Coefficient>(
        &self,
        class: &ChowClass<C>,
        coeffs: &[Rational],
    ) -> Result<ChowClass<C>, ChowError> {
        let mut out = ChowClass::zero(class.ctx.clone());
        for (tau, a) in coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            out.add_assign(&self.multiply_by_divisor(class, tau)?.scale(a));
        }
        Ok(out)
    }

    /// `prod F_tau` over a multiset of rays, processed in ascending order.
    pub fn monomial(&self, exponents: &[usize]) -> Result<ChowClass, ChowError> {
        let mut rays = exponents.to_vec();
        rays.sort_unstable();
        self.product_from(ChowClass::fundamental(()), &rays)
    }

    /// Multiply `start` by `F_tau` for each `tau` in the given order.
    pub fn product_from<C: Coefficient>(
        &self,
        start: ChowClass<C>,
        rays: &[usize],
    ) -> Result<ChowClass<C>, ChowError> {
        rays.iter()
            .try_fold(start, |acc, &tau| self.multiply_by_divisor(&acc, tau))
    }

    /// [`Self::product_from`] with a custom functional chooser.
    pub fn product_from_with<C: Coefficient>(
        &self,
        start: ChowClass<C>,
        rays: &[usize],
        choose: &dyn Fn(&FunctionalRequest) -> Vec<Rational>,
    ) -> Result<ChowClass<C>, ChowError> {
        rays.iter()
            .try_fold(start, |acc, &tau| self.multiply_by_divisor_with(&acc, tau, choose))
    }

    /// Degree map: the sum of the coefficients of maximal cone classes.
    pub fn integrate<C: Coefficient>(&self, class: &ChowClass<C>) -> C {
        let d = self.dim();
        let mut acc = C::zero_in(&class.ctx);
        for (k, v) in &class.terms {
            if k.len() == d {
                acc.add_assign(v);
            }
        }
        acc
    }

    /// `∫ class * prod_{t in mu} F_t`.
    pub fn pair<C: Coefficient>(&self, class: &ChowClass<C>, mu: &[usize]) -> Result<C, ChowError> {
        Ok(self.integrate(&self.product_from(class.clone(), mu)?))
    }

    /// Equality in the ring, decided by pairing the difference against every
    /// square-free monomial of complementary degree.
    pub fn chow_equal<C: Coefficient>(
        &self,
        a: &ChowClass<C>,
        b: &ChowClass<C>,
    ) -> Result<bool, ChowError> {
        let k = match (a.pure_codim(), b.pure_codim()) {
            (Some(x), Some(y)) if x == y => x,
            (Some(x), None) if b.is_zero() => x,
            (None, Some(y)) if a.is_zero() => y,
            (None, None) if a.is_zero() && b.is_zero() => return Ok(true),
            _ => return Err(ChowError::MixedDegree),
        };
        if k > self.dim() {
            return Ok(true);
        }
        let diff = a.sub(b);
        for mu in self.fan.cones_of_dim(self.dim() - k) {
            if !self.pair(&diff, &mu)?.vanishes() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `P[i][j] = ∫ [V(sigma_i)] * prod_{t in tau_j} F_t` over cones of
    /// dimension `k` and `d - k`, in key order.
    pub fn pairing_matrix(&self, k: usize) -> Result<Vec<Vec<Rational>>, ChowError> {
        let d = self.dim();
        let rows = self.fan.cones_of_dim(k);
        let cols = self.fan.cones_of_dim(d - k);
        rows.iter()
            .map(|sigma| {
                let class = ChowClass::cone_class((), sigma.clone(), Rational::one());
                cols.iter().map(|tau| self.pair(&class, tau)).collect()
            })
            .collect()
    }
}
