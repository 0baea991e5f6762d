//! Finite stabilizers of the quotient presentation `X = W / G`.
//!
//! An element `g` of `G` with a fixed point in `W` is recorded by its charge
//! vector `(q_tau)` over all rays, `q_tau` in `[0, 1)`, so that the character
//! `a_tau(g)` is `exp(2 pi i q_tau)`. The cone stabilizer `G_sigma` consists of
//! classes of `z` in `Q^sigma(1)` with `sum z_j n_j` in `N`, modulo `Z^sigma(1)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::fan::{Fan, FanError};
use crate::linalg::{rat_int, smith_normal_form, IntMatrix, Rational};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    charges: Vec<Rational>,
    order: u64,
}

fn frac(q: &Rational) -> Rational {
    q - Rational::from_integer(q.floor().to_integer())
}

impl GroupElement {
    /// Builds an element from charges, reducing each mod 1.
    pub fn from_charges(charges: Vec<Rational>) -> Self {
        let charges: Vec<Rational> = charges.iter().map(frac).collect();
        let order = charges
            .iter()
            .fold(BigInt::from(1), |acc, q| acc.lcm(q.denom()))
            .to_u64()
            .expect("element order fits in 64 bits");
        GroupElement { charges, order }
    }

    pub fn identity(num_rays: usize) -> Self {
        GroupElement { charges: vec![Rational::zero(); num_rays], order: 1 }
    }

    pub fn charges(&self) -> &[Rational] {
        &self.charges
    }

    pub fn charge(&self, tau: usize) -> &Rational {
        &self.charges[tau]
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_identity(&self) -> bool {
        self.order == 1
    }

    /// `g(1)`: the rays where the character is nontrivial.
    pub fn support(&self) -> Vec<usize> {
        self.charges
            .iter()
            .enumerate()
            .filter(|(_, q)| !q.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn inverse(&self) -> Self {
        GroupElement::from_charges(self.charges.iter().map(|q| -q).collect())
    }

    /// Group law in the ambient torus.
    pub fn compose(&self, other: &Self) -> Self {
        GroupElement::from_charges(
            self.charges.iter().zip(&other.charges).map(|(a, b)| a + b).collect(),
        )
    }

    /// `sum_tau q_tau n_tau`, which lies in the lattice for every element of `G`.
    pub fn lift(&self, fan: &Fan) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); fan.dim()];
        for (tau, q) in self.charges.iter().enumerate() {
            for (vi, &n) in v.iter_mut().zip(fan.ray(tau)) {
                *vi += q * rat_int(n);
            }
        }
        v
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, q) in self.charges.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} of order {}", self.order)
    }
}

/// `G_sigma`, enumerated through the Smith form of the ray matrix.
///
/// With `U A V = D` and `A` the matrix of the cone's rays as columns,
/// `A z` is integral iff `D V^-1 z` is, so representatives are
/// `z = V (c_j / d_j)` with `0 <= c_j < d_j`.
pub fn stabilizer_of_cone(fan: &Fan, cone: &[usize]) -> Result<Vec<GroupElement>, FanError> {
    fan.multiplicity(cone)?;
    let mut cone = cone.to_vec();
    cone.sort_unstable();
    let k = cone.len();
    if k == 0 {
        return Ok(vec![GroupElement::identity(fan.num_rays())]);
    }
    let cols: Vec<&[i64]> = cone.iter().map(|&i| fan.ray(i)).collect();
    let a = IntMatrix::from_columns(fan.dim(), &cols);
    let snf = smith_normal_form(&a);
    let diag: Vec<BigInt> = snf.d.diagonal();
    if diag.iter().any(Zero::is_zero) {
        return Err(FanError::NotACone(cone));
    }
    let sizes: Vec<u64> = diag.iter().map(|d| d.to_u64().expect("small invariant")).collect();

    let mut out = Vec::new();
    let mut digits = vec![0u64; k];
    loop {
        let w: Vec<Rational> = digits
            .iter()
            .zip(&sizes)
            .map(|(&c, &d)| Rational::new(BigInt::from(c), BigInt::from(d)))
            .collect();
        let mut charges = vec![Rational::zero(); fan.num_rays()];
        for (row, &tau) in cone.iter().enumerate() {
            let z: Rational = (0..k).map(|j| rat_int(snf.v[(row, j)].clone()) * &w[j]).sum();
            charges[tau] = z;
        }
        out.push(GroupElement::from_charges(charges));

        // Odometer over the digits.
        let mut pos = 0;
        loop {
            if pos == k {
                out.sort();
                return Ok(out);
            }
            digits[pos] += 1;
            if digits[pos] < sizes[pos] {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// `G_Sigma`: the union of the cone stabilizers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSet {
    elements: Vec<GroupElement>,
    conductor: u64,
}

impl SupportSet {
    /// Canonical order: lexicographic on charge vectors, identity first.
    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    /// Least common multiple of the element orders.
    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.binary_search(g).is_ok()
    }
}

/// Faces need no separate pass: a face's stabilizer is a subgroup of the
/// stabilizer of every cone containing it.
pub fn support_set(fan: &Fan) -> SupportSet {
    let mut elements: Vec<GroupElement> = fan
        .max_cones()
        .iter()
        .flat_map(|c| stabilizer_of_cone(fan, c).expect("maximal cones are cones"))
        .collect();
    elements.sort();
    elements.dedup();
    let conductor = elements.iter().fold(1u64, |acc, g| acc.lcm(&g.order));
    SupportSet { elements, conductor }
}
