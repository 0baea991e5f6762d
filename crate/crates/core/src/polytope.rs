//! Divisor polytopes `P_D = { m : <m, n_tau> >= -a_tau }` and brute-force
//! lattice point counts. This is the ground truth the Riemann-Roch side is
//! checked against, so it is deliberately naive.

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::fan::Fan;
use crate::linalg::{rat_int, solve_rational, Rational};
use crate::riemann_roch::Divisor;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("fan is not complete; divisor polytope may be unbounded")]
    NotComplete,
    #[error("divisor has {got} coefficients, fan has {expected} rays")]
    DivisorLength { expected: usize, got: usize },
    #[error("bounding box coordinate does not fit in 64 bits")]
    Overflow,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorPolytope {
    /// One inequality `<m, normals[i]> >= bounds[i]` per ray.
    pub normals: Vec<Vec<i64>>,
    pub bounds: Vec<i64>,
    /// `v_sigma` for each maximal cone, in fan order.
    pub vertices: Vec<Vec<Rational>>,
    /// Inclusive integer ranges per coordinate; `None` when the polytope is empty.
    pub bounding_box: Option<Vec<(i64, i64)>>,
}

impl DivisorPolytope {
    pub fn dim(&self) -> usize {
        self.vertices.first().map_or(0, Vec::len)
    }

    pub fn contains(&self, m: &[Rational]) -> bool {
        self.normals.iter().zip(&self.bounds).all(|(n, &b)| {
            let v: Rational = n.iter().zip(m).map(|(&x, y)| rat_int(x) * y).sum();
            v >= rat_int(b)
        })
    }
}

fn rows(fan: &Fan, idx: &[usize]) -> Vec<Vec<Rational>> {
    idx.iter()
        .map(|&t| fan.ray(t).iter().map(|&x| rat_int(x)).collect())
        .collect()
}

/// `v_sigma`: the solution of `<v, n_tau> = -a_tau` on the rays of `sigma`.
fn cone_vertex(fan: &Fan, divisor: &Divisor, cone: &[usize]) -> Vec<Rational> {
    let rhs: Vec<Rational> = cone.iter().map(|&t| rat_int(-divisor.coeffs()[t])).collect();
    solve_rational(&rows(fan, cone), &rhs).expect("full-dimensional simplicial cone")
}

fn check(fan: &Fan, divisor: &Divisor) -> Result<(), PolytopeError> {
    if !fan.is_complete() {
        return Err(PolytopeError::NotComplete);
    }
    if divisor.coeffs().len() != fan.num_rays() {
        return Err(PolytopeError::DivisorLength {
            expected: fan.num_rays(),
            got: divisor.coeffs().len(),
        });
    }
    Ok(())
}

pub fn polytope_of_divisor(fan: &Fan, divisor: &Divisor) -> Result<DivisorPolytope, PolytopeError> {
    check(fan, divisor)?;
    let d = fan.dim();
    let normals = fan.rays().to_vec();
    let bounds: Vec<i64> = divisor.coeffs().iter().map(|a| -a).collect();
    let vertices: Vec<Vec<Rational>> = fan
        .max_cones()
        .iter()
        .map(|c| cone_vertex(fan, divisor, c))
        .collect();
    let mut poly = DivisorPolytope { normals, bounds, vertices, bounding_box: None };

    // The true vertices lie among the feasible intersections of d facets.
    // For nef divisors these are exactly the cone vertices.
    let mut corners: Vec<Vec<Rational>> = Vec::new();
    for subset in subsets(fan.num_rays(), d) {
        let rhs: Vec<Rational> = subset.iter().map(|&t| rat_int(poly.bounds[t])).collect();
        let a = rows(fan, &subset);
        if crate::linalg::rank(&a) < d {
            continue;
        }
        if let Some(p) = solve_rational(&a, &rhs) {
            if poly.contains(&p) {
                corners.push(p);
            }
        }
    }
    if !corners.is_empty() {
        let mut bbox = Vec::with_capacity(d);
        for i in 0..d {
            let lo = corners.iter().map(|p| p[i].ceil()).min().expect("nonempty");
            let hi = corners.iter().map(|p| p[i].floor()).max().expect("nonempty");
            let lo = lo.to_integer().to_i64().ok_or(PolytopeError::Overflow)?;
            let hi = hi.to_integer().to_i64().ok_or(PolytopeError::Overflow)?;
            bbox.push((lo, hi));
        }
        poly.bounding_box = Some(bbox);
    }
    Ok(poly)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// The support function is convex: each cone's vertex satisfies every
/// inequality.
pub fn is_nef(fan: &Fan, divisor: &Divisor) -> bool {
    let Ok(()) = check(fan, divisor) else {
        return false;
    };
    let bounds: Vec<Rational> = divisor.coeffs().iter().map(|&a| rat_int(-a)).collect();
    fan.max_cones().iter().all(|c| {
        let v = cone_vertex(fan, divisor, c);
        (0..fan.num_rays()).all(|t| fan.pairing(&v, t) >= bounds[t])
    })
}

/// Every cone vertex is a lattice point.
pub fn is_cartier(fan: &Fan, divisor: &Divisor) -> bool {
    let Ok(()) = check(fan, divisor) else {
        return false;
    };
    fan.max_cones()
        .iter()
        .all(|c| cone_vertex(fan, divisor, c).iter().all(Rational::is_integer))
}

/// Lattice points of the polytope (strictly inside every facet when
/// `interior` is set), by scanning the bounding box.
pub fn count_lattice_points(p: &DivisorPolytope, interior: bool) -> u64 {
    let Some(bbox) = &p.bounding_box else {
        return 0;
    };
    let d = bbox.len();
    if bbox.iter().any(|(lo, hi)| lo > hi) {
        return 0;
    }
    let mut point: Vec<i64> = bbox.iter().map(|b| b.0).collect();
    let mut count = 0u64;
    loop {
        let inside = p.normals.iter().zip(&p.bounds).all(|(n, &b)| {
            let v: i128 = n.iter().zip(&point).map(|(&x, &y)| x as i128 * y as i128).sum();
            if interior { v > b as i128 } else { v >= b as i128 }
        });
        if inside {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == d {
                return count;
            }
            point[i] += 1;
            if point[i] <= bbox[i].1 {
                break;
            }
            point[i] = bbox[i].0;
            i += 1;
        }
    }
}

/// Lattice points of `P_{nD}`.
pub fn count_dilate(fan: &Fan, divisor: &Divisor, n: i64, interior: bool) -> Result<u64, PolytopeError> {
    let p = polytope_of_divisor(fan, &divisor.scaled(n))?;
    Ok(count_lattice_points(&p, interior))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::linalg::rat;

    fn pt(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(a, b)| rat(a, b)).collect()
    }

    #[test]
    fn simplex_vertices() {
        let f = corpus::p2();
        // cones {0,1}, {1,2}, {0,2}
        let p = polytope_of_divisor(&f, &Divisor::ray(&f, 2)).unwrap();
        assert_eq!(p.vertices, vec![pt(&[(0, 1), (0, 1)]), pt(&[(1, 1), (0, 1)]), pt(&[(0, 1), (1, 1)])]);
        assert_eq!(p.bounding_box, Some(vec![(0, 1), (0, 1)]));
        // V(0) gives a translate of the same simplex.
        let p = polytope_of_divisor(&f, &Divisor::ray(&f, 0)).unwrap();
        assert_eq!(p.vertices, vec![pt(&[(-1, 1), (0, 1)]), pt(&[(0, 1), (0, 1)]), pt(&[(-1, 1), (1, 1)])]);
        assert_eq!(p.bounding_box, Some(vec![(-1, 0), (0, 1)]));
    }

    #[test]
    fn weighted_vertices() {
        let f = corpus::p112();
        let p = polytope_of_divisor(&f, &Divisor::ray(&f, 2)).unwrap();
        let mut v = p.vertices.clone();
        v.sort();
        assert_eq!(v, vec![pt(&[(0, 1), (0, 1)]), pt(&[(0, 1), (1, 2)]), pt(&[(1, 1), (0, 1)])]);
        assert!(!is_cartier(&f, &Divisor::ray(&f, 2)));
        assert!(is_cartier(&f, &Divisor::ray(&f, 2).scaled(2)));
    }

    #[test]
    fn zero_divisor() {
        let f = corpus::p123();
        let p = polytope_of_divisor(&f, &Divisor::zero(&f)).unwrap();
        assert!(p.vertices.iter().all(|v| v.iter().all(|x| *x == rat_int(0))));
        assert_eq!(count_lattice_points(&p, false), 1);
        assert!(is_nef(&f, &Divisor::zero(&f)));
    }

    #[test]
    fn nefness() {
        let f = corpus::p2();
        assert!(is_nef(&f, &Divisor::ray(&f, 0)));
        assert!(!is_nef(&f, &Divisor::ray(&f, 0).scaled(-1)));
        // F_1: V(1) pairs negatively with a curve, V(3) is a fibre-type class.
        let h = corpus::hirzebruch(1);
        assert!(!is_nef(&h, &Divisor::ray(&h, 1)));
        assert!(is_nef(&h, &Divisor::ray(&h, 3)));
    }

    #[test]
    fn counts() {
        let f = corpus::p2();
        let p = polytope_of_divisor(&f, &Divisor::ray(&f, 0)).unwrap();
        assert_eq!(count_lattice_points(&p, false), 3);
        assert_eq!(count_lattice_points(&p, true), 0);
        let q = corpus::p1xp1();
        let d = Divisor::new(&q, vec![1, 1, 0, 0]).unwrap();
        assert_eq!(count_dilate(&q, &d, 1, false).unwrap(), 4);
        let empty = polytope_of_divisor(&f, &Divisor::new(&f, vec![-1, -1, -1]).unwrap()).unwrap();
        assert_eq!(empty.bounding_box, None);
        assert_eq!(count_lattice_points(&empty, false), 0);
    }

    #[test]
    fn non_nef_polytope_is_covered() {
        // Non-nef D: cone vertices need not lie in P_D; the box must still cover it.
        let h = corpus::hirzebruch(1);
        let d = Divisor::new(&h, vec![0, 2, 0, 0]).unwrap();
        let p = polytope_of_divisor(&h, &d).unwrap();
        let bbox = p.bounding_box.clone().unwrap();
        let mut brute = 0;
        for x in -10i64..=10 {
            for y in -10i64..=10 {
                if p.contains(&[rat_int(x), rat_int(y)]) {
                    brute += 1;
                    assert!(bbox[0].0 <= x && x <= bbox[0].1 && bbox[1].0 <= y && y <= bbox[1].1);
                }
            }
        }
        assert_eq!(count_lattice_points(&p, false), brute);
    }

    #[test]
    fn incomplete_fan_rejected() {
        let f = Fan::new(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap();
        assert_eq!(
            polytope_of_divisor(&f, &Divisor::zero(&f)),
            Err(PolytopeError::NotComplete)
        );
    }

    #[test]
    fn counts_grow_with_dilation() {
        for f in corpus::all().into_iter().filter(|f| f.dim() <= 2) {
            for tau in 0..f.num_rays() {
                let d = Divisor::ray(&f, tau);
                if !is_nef(&f, &d) {
                    continue;
                }
                let c: Vec<u64> = (0..5).map(|n| count_dilate(&f, &d, n, false).unwrap()).collect();
                assert!(c.windows(2).all(|w| w[0] <= w[1]), "{:?}", f.name());
            }
        }
    }
}
