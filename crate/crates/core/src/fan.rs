//! Simplicial fans: validation, cone enumeration, multiplicities.
//!
//! Ray order is fixed at construction and is the indexing used by every
//! downstream structure (divisors, group characters, Chow generators).
//! Cones are identified with sorted sets of ray indices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::linalg::{
    feasible_point, is_primitive, nullspace, rank, rat_int, smith_normal_form, Inequality,
    IntMatrix, Rational,
};

/// Sorted ray indices of a cone. The empty key is the zero cone.
pub type ConeKey = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cone {
    pub ray_indices: ConeKey,
    pub multiplicity: u64,
}

impl Cone {
    pub fn dim(&self) -> usize {
        self.ray_indices.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    ZeroDimension,
    RayWrongLength { ray: usize, len: usize },
    RayNotPrimitive { ray: usize },
    DuplicateRay { first: usize, second: usize },
    UnusedRay { ray: usize },
    EmptyCone { cone: usize },
    IndexOutOfRange { cone: usize, index: usize },
    RepeatedIndex { cone: usize, index: usize },
    DependentRays { cone: usize },
    DuplicateCone { first: usize, second: usize },
    NotMaximal { cone: usize, container: usize },
    Overlap { first: usize, second: usize },
    MultiplicityTooLarge { cone: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroDimension => write!(f, "ambient dimension must be positive"),
            Violation::RayWrongLength { ray, len } => {
                write!(f, "ray {ray} has {len} coordinates")
            }
            Violation::RayNotPrimitive { ray } => write!(f, "ray {ray} not primitive"),
            Violation::DuplicateRay { first, second } => {
                write!(f, "rays {first} and {second} coincide")
            }
            Violation::UnusedRay { ray } => write!(f, "ray {ray} lies in no cone"),
            Violation::EmptyCone { cone } => write!(f, "cone {cone} has no rays"),
            Violation::IndexOutOfRange { cone, index } => {
                write!(f, "cone {cone} references missing ray {index}")
            }
            Violation::RepeatedIndex { cone, index } => {
                write!(f, "cone {cone} lists ray {index} twice")
            }
            Violation::DependentRays { cone } => {
                write!(f, "cone {cone} not simplicial (rays linearly dependent)")
            }
            Violation::DuplicateCone { first, second } => {
                write!(f, "cones {first} and {second} coincide")
            }
            Violation::NotMaximal { cone, container } => {
                write!(f, "cone {cone} is a face of cone {container}")
            }
            Violation::Overlap { first, second } => {
                write!(f, "cones {first} and {second} overlap without common face")
            }
            Violation::MultiplicityTooLarge { cone } => {
                write!(f, "cone {cone} has multiplicity beyond 64 bits")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("invalid fan:\n{0}")]
    Invalid(ValidationReport),
    #[error("ray index {0} out of range")]
    RayIndex(usize),
    #[error("{0:?} is not a cone of the fan")]
    NotACone(ConeKey),
}

/// Validates raw fan data.
///
/// With `check_intersections`, every pair of maximal cones must admit a
/// separating functional (see [`separating_functional`]).
pub fn validate_fan(
    dim: usize,
    rays: &[Vec<i64>],
    max_cones: &[Vec<usize>],
    check_intersections: bool,
) -> ValidationReport {
    let mut violations = Vec::new();
    if dim == 0 {
        violations.push(Violation::ZeroDimension);
        return ValidationReport { violations };
    }
    let mut rays_ok = true;
    for (i, r) in rays.iter().enumerate() {
        if r.len() != dim {
            violations.push(Violation::RayWrongLength { ray: i, len: r.len() });
            rays_ok = false;
        } else if !is_primitive(r) {
            violations.push(Violation::RayNotPrimitive { ray: i });
        }
    }
    for i in 0..rays.len() {
        for j in i + 1..rays.len() {
            if rays[i] == rays[j] {
                violations.push(Violation::DuplicateRay { first: i, second: j });
            }
        }
    }

    let mut sets: Vec<Option<BTreeSet<usize>>> = Vec::with_capacity(max_cones.len());
    for (c, cone) in max_cones.iter().enumerate() {
        let mut set = BTreeSet::new();
        let mut ok = true;
        if cone.is_empty() {
            violations.push(Violation::EmptyCone { cone: c });
            ok = false;
        }
        for &i in cone {
            if i >= rays.len() {
                violations.push(Violation::IndexOutOfRange { cone: c, index: i });
                ok = false;
            } else if !set.insert(i) {
                violations.push(Violation::RepeatedIndex { cone: c, index: i });
                ok = false;
            }
        }
        if ok && rays_ok {
            let m = ray_rows(rays, cone);
            if cone.len() > dim || rank(&m) < cone.len() {
                violations.push(Violation::DependentRays { cone: c });
                ok = false;
            } else if multiplicity_of(dim, rays, cone).is_none() {
                violations.push(Violation::MultiplicityTooLarge { cone: c });
                ok = false;
            }
        }
        sets.push(ok.then_some(set));
    }

    for (i, _) in rays.iter().enumerate() {
        if !max_cones.iter().any(|c| c.contains(&i)) {
            violations.push(Violation::UnusedRay { ray: i });
        }
    }

    for i in 0..sets.len() {
        for j in 0..sets.len() {
            let (Some(a), Some(b)) = (&sets[i], &sets[j]) else {
                continue;
            };
            if i < j && a == b {
                violations.push(Violation::DuplicateCone { first: i, second: j });
            } else if i != j && a != b && a.is_subset(b) {
                violations.push(Violation::NotMaximal { cone: i, container: j });
            }
        }
    }

    if check_intersections && rays_ok {
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                let (Some(a), Some(b)) = (&sets[i], &sets[j]) else {
                    continue;
                };
                if a == b {
                    continue;
                }
                let a: Vec<usize> = a.iter().copied().collect();
                let b: Vec<usize> = b.iter().copied().collect();
                if separating_functional(dim, rays, &a, &b).is_none() {
                    violations.push(Violation::Overlap { first: i, second: j });
                }
            }
        }
    }
    ValidationReport { violations }
}

fn ray_rows(rays: &[Vec<i64>], idx: &[usize]) -> Vec<Vec<Rational>> {
    idx.iter()
        .map(|&i| rays[i].iter().map(|&x| rat_int(x)).collect())
        .collect()
}

/// A functional vanishing on the shared rays of two simplicial cones,
/// positive on the rest of `a` and negative on the rest of `b`.
///
/// Such a functional exists exactly when the cones meet along their common
/// face.
pub fn separating_functional(
    dim: usize,
    rays: &[Vec<i64>],
    a: &[usize],
    b: &[usize],
) -> Option<Vec<Rational>> {
    let shared: Vec<usize> = a.iter().copied().filter(|i| b.contains(i)).collect();
    let basis = nullspace(&ray_rows(rays, &shared), dim);
    let project = |ray: usize| -> Vec<Rational> {
        let n: Vec<Rational> = rays[ray].iter().map(|&x| rat_int(x)).collect();
        basis.iter().map(|k| crate::linalg::dot(k, &n)).collect()
    };
    let mut system = Vec::new();
    for &r in a.iter().filter(|i| !shared.contains(i)) {
        system.push(Inequality { coeffs: project(r), bound: rat_int(1) });
    }
    for &r in b.iter().filter(|i| !shared.contains(i)) {
        let coeffs = project(r).into_iter().map(|x| -x).collect();
        system.push(Inequality { coeffs, bound: rat_int(1) });
    }
    let y = feasible_point(&system, basis.len())?;
    let mut m = vec![rat_int(0); dim];
    for (yi, k) in y.iter().zip(&basis) {
        for (mj, kj) in m.iter_mut().zip(k) {
            *mj += yi * kj;
        }
    }
    Some(m)
}

fn multiplicity_of(dim: usize, rays: &[Vec<i64>], cone: &[usize]) -> Option<u64> {
    if cone.is_empty() {
        return Some(1);
    }
    let cols: Vec<&[i64]> = cone.iter().map(|&i| rays[i].as_slice()).collect();
    let a = IntMatrix::from_columns(dim, &cols);
    let prod = smith_normal_form(&a)
        .invariant_factors()
        .into_iter()
        .fold(num_bigint::BigInt::one(), |acc, x| acc * x);
    prod.to_u64()
}

/// A validated simplicial fan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<ConeKey>,
    // Every face, with its multiplicity.
    cones: BTreeMap<ConeKey, u64>,
    name: Option<String>,
}

impl Fan {
    /// Builds and fully validates a fan.
    pub fn new(dim: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Fan, FanError> {
        Self::build(dim, rays, max_cones, true)
    }

    /// Like [`Fan::new`] but skips the pairwise intersection check.
    pub fn new_trusted(
        dim: usize,
        rays: Vec<Vec<i64>>,
        max_cones: Vec<Vec<usize>>,
    ) -> Result<Fan, FanError> {
        Self::build(dim, rays, max_cones, false)
    }

    fn build(
        dim: usize,
        rays: Vec<Vec<i64>>,
        max_cones: Vec<Vec<usize>>,
        check_intersections: bool,
    ) -> Result<Fan, FanError> {
        let report = validate_fan(dim, &rays, &max_cones, check_intersections);
        if !report.is_valid() {
            return Err(FanError::Invalid(report));
        }
        let max_cones: Vec<ConeKey> = max_cones
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        let mut cones = BTreeMap::new();
        for c in &max_cones {
            for mask in 0u32..(1 << c.len()) {
                let face: ConeKey = c
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask & (1 << b) != 0)
                    .map(|(_, &i)| i)
                    .collect();
                if let std::collections::btree_map::Entry::Vacant(e) = cones.entry(face) {
                    let m = multiplicity_of(dim, &rays, e.key())
                        .expect("face multiplicity divides cone multiplicity");
                    e.insert(m);
                }
            }
        }
        Ok(Fan { dim, rays, max_cones, cones, name: None })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[ConeKey] {
        &self.max_cones
    }

    /// True if the ray set (in any order, no repeats) spans a cone of the fan.
    pub fn is_cone(&self, rays: &[usize]) -> bool {
        let mut key = rays.to_vec();
        key.sort_unstable();
        self.cones.contains_key(&key)
    }

    pub fn cone(&self, rays: &[usize]) -> Option<Cone> {
        let mut key = rays.to_vec();
        key.sort_unstable();
        self.cones
            .get(&key)
            .map(|&multiplicity| Cone { ray_indices: key, multiplicity })
    }

    /// Order of `N_sigma / sum Z n_tau`: the product of the nonzero Smith
    /// invariants of the ray matrix. The zero cone has multiplicity 1.
    pub fn multiplicity(&self, rays: &[usize]) -> Result<u64, FanError> {
        self.cone(rays)
            .map(|c| c.multiplicity)
            .ok_or_else(|| FanError::NotACone(rays.to_vec()))
    }

    /// Every cone, grouped by dimension (index 0 is the zero cone).
    pub fn all_cones(&self) -> Vec<Vec<Cone>> {
        let mut out = vec![Vec::new(); self.dim + 1];
        for (key, &multiplicity) in &self.cones {
            out[key.len()].push(Cone { ray_indices: key.clone(), multiplicity });
        }
        out
    }

    pub fn cones_of_dim(&self, k: usize) -> Vec<ConeKey> {
        self.cones.keys().filter(|c| c.len() == k).cloned().collect()
    }

    /// Wall criterion: all maximal cones full-dimensional and every
    /// codimension-one cone a face of exactly two of them.
    pub fn is_complete(&self) -> bool {
        if self.max_cones.is_empty() || self.max_cones.iter().any(|c| c.len() != self.dim) {
            return false;
        }
        let mut walls: BTreeMap<ConeKey, usize> = BTreeMap::new();
        for c in &self.max_cones {
            for skip in 0..c.len() {
                let wall: ConeKey = c
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &r)| r)
                    .collect();
                *walls.entry(wall).or_default() += 1;
            }
        }
        walls.values().all(|&n| n == 2)
    }

    pub fn is_smooth(&self) -> bool {
        self.max_cones.iter().all(|c| self.cones[c] == 1)
    }

    /// `<m, n_tau>`
    pub fn pairing(&self, m: &[Rational], tau: usize) -> Rational {
        m.iter()
            .zip(&self.rays[tau])
            .map(|(a, &b)| a * rat_int(b))
            .sum()
    }

    pub fn check_ray(&self, tau: usize) -> Result<(), FanError> {
        if tau < self.rays.len() {
            Ok(())
        } else {
            Err(FanError::RayIndex(tau))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn projective_plane_is_valid() {
        let report = validate_fan(
            2,
            &[vec![1, 0], vec![0, 1], vec![-1, -1]],
            &[vec![0, 1], vec![1, 2], vec![2, 0]],
            true,
        );
        assert!(report.is_valid(), "{report}");
        assert_eq!(report.to_string(), "valid");
    }

    #[test]
    fn non_primitive_ray() {
        let report = validate_fan(
            2,
            &[vec![2, 0], vec![0, 1], vec![-1, -1]],
            &[vec![0, 1], vec![1, 2], vec![2, 0]],
            true,
        );
        assert_eq!(report.violations, vec![Violation::RayNotPrimitive { ray: 0 }]);
        assert_eq!(report.to_string(), "ray 0 not primitive");
    }

    #[test]
    fn overlapping_cones() {
        let rays = vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![-1, 1]];
        let cones = vec![vec![0, 1], vec![2, 3]];
        let report = validate_fan(2, &rays, &cones, true);
        assert_eq!(report.violations, vec![Violation::Overlap { first: 0, second: 1 }]);
        assert!(report.to_string().contains("overlap without common face"));
        // Trusted mode lets it through.
        assert!(validate_fan(2, &rays, &cones, false).is_valid());
    }

    #[test]
    fn structural_violations_are_all_reported() {
        let rays = vec![vec![1, 0], vec![1, 0], vec![2, 2, 1]];
        let cones = vec![vec![0, 7], vec![0, 0]];
        let v = validate_fan(2, &rays, &cones, true).violations;
        assert!(v.contains(&Violation::RayWrongLength { ray: 2, len: 3 }));
        assert!(v.contains(&Violation::DuplicateRay { first: 0, second: 1 }));
        assert!(v.contains(&Violation::IndexOutOfRange { cone: 0, index: 7 }));
        assert!(v.contains(&Violation::RepeatedIndex { cone: 1, index: 0 }));
        assert!(v.contains(&Violation::UnusedRay { ray: 1 }));
    }

    #[test]
    fn dependent_and_non_pointed_cones_rejected() {
        let rays = vec![vec![1, 0], vec![-1, 0], vec![0, 1]];
        let v = validate_fan(2, &rays, &[vec![0, 1], vec![2]], true).violations;
        assert!(v.contains(&Violation::DependentRays { cone: 0 }));
        let v = validate_fan(
            2,
            &[vec![1, 0], vec![0, 1], vec![1, 1]],
            &[vec![0, 1, 2]],
            true,
        )
        .violations;
        assert!(v.contains(&Violation::DependentRays { cone: 0 }));
    }

    #[test]
    fn face_listed_as_maximal() {
        let rays = vec![vec![1, 0], vec![0, 1]];
        let v = validate_fan(2, &rays, &[vec![0, 1], vec![0]], true).violations;
        assert_eq!(v, vec![Violation::NotMaximal { cone: 1, container: 0 }]);
    }

    #[test]
    fn separating_functional_witness() {
        let f = corpus::p2();
        let m = separating_functional(2, f.rays(), &[0, 1], &[1, 2]).unwrap();
        assert_eq!(f.pairing(&m, 1), rat_int(0));
        assert!(f.pairing(&m, 0) > rat_int(0));
        assert!(f.pairing(&m, 2) < rat_int(0));
    }

    #[test]
    fn cone_counts() {
        let counts = |f: &Fan| f.all_cones().iter().map(Vec::len).collect::<Vec<_>>();
        assert_eq!(counts(&corpus::p2()), vec![1, 3, 3]);
        assert_eq!(counts(&corpus::p1()), vec![1, 2]);
        assert_eq!(counts(&corpus::p1xp1()), vec![1, 4, 4]);
    }

    #[test]
    fn multiplicities() {
        let f = Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![1, 2]], vec![vec![0, 1], vec![0, 2]])
            .unwrap_err();
        // (0,1) and (1,2) cones overlap; build the single cones separately.
        assert!(matches!(f, FanError::Invalid(_)));
        let smooth = Fan::new(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap();
        assert_eq!(smooth.multiplicity(&[0, 1]).unwrap(), 1);
        let two = Fan::new(2, vec![vec![1, 0], vec![1, 2]], vec![vec![0, 1]]).unwrap();
        assert_eq!(two.multiplicity(&[0, 1]).unwrap(), 2);
        assert_eq!(two.multiplicity(&[]).unwrap(), 1);
        let w = corpus::p112();
        assert_eq!(w.multiplicity(&[0, 2]).unwrap(), 2);
        assert!(w.multiplicity(&[0, 1, 2]).is_err());
    }

    #[test]
    fn completeness() {
        assert!(corpus::p2().is_complete());
        assert!(corpus::p1().is_complete());
        let quadrant = Fan::new(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap();
        assert!(!quadrant.is_complete());
        for f in corpus::all() {
            assert!(f.is_complete(), "{:?}", f.name());
        }
    }

    #[test]
    fn smoothness() {
        assert!(corpus::p2().is_smooth());
        assert!(!corpus::p112().is_smooth());
        assert!(corpus::hirzebruch(1).is_smooth());
        assert!(!corpus::non_polytopal().is_smooth());
    }

    #[test]
    fn complete_surfaces_have_two_cones_per_ray() {
        for f in corpus::all().into_iter().filter(|f| f.dim() == 2) {
            for r in 0..f.num_rays() {
                let n = f.max_cones().iter().filter(|c| c.contains(&r)).count();
                assert_eq!(n, 2);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn unimodular() -> impl Strategy<Value = [[i64; 2]; 2]> {
            // Products of elementary matrices.
            proptest::collection::vec((0usize..4, -3i64..=3), 1..6).prop_map(|ops| {
                let mut m = [[1i64, 0], [0, 1]];
                for (kind, k) in ops {
                    let e = match kind {
                        0 => [[1, k], [0, 1]],
                        1 => [[1, 0], [k, 1]],
                        2 => [[0, 1], [1, 0]],
                        _ => [[-1, 0], [0, 1]],
                    };
                    m = [
                        [m[0][0] * e[0][0] + m[0][1] * e[1][0], m[0][0] * e[0][1] + m[0][1] * e[1][1]],
                        [m[1][0] * e[0][0] + m[1][1] * e[1][0], m[1][0] * e[0][1] + m[1][1] * e[1][1]],
                    ];
                }
                m
            })
        }

        proptest! {
            #[test]
            fn multiplicity_is_basis_invariant(g in unimodular()) {
                for f in [corpus::p112(), corpus::p123(), corpus::hirzebruch(2)] {
                    let rays: Vec<Vec<i64>> = f
                        .rays()
                        .iter()
                        .map(|r| vec![g[0][0] * r[0] + g[0][1] * r[1], g[1][0] * r[0] + g[1][1] * r[1]])
                        .collect();
                    let h = Fan::new(2, rays, f.max_cones().to_vec()).unwrap();
                    for c in f.max_cones() {
                        prop_assert_eq!(f.multiplicity(c).unwrap(), h.multiplicity(c).unwrap());
                    }
                }
            }
        }
    }
}
