//! Standard fans used in tests, the acceptance suite and the CLI examples.

use crate::fan::Fan;

fn build(name: &str, dim: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Fan {
    Fan::new(
        dim,
        rays.iter().map(|r| r.to_vec()).collect(),
        cones.iter().map(|c| c.to_vec()).collect(),
    )
    .unwrap_or_else(|e| panic!("corpus fan {name}: {e}"))
    .with_name(name)
}

pub fn p1() -> Fan {
    build("P1", 1, &[&[1], &[-1]], &[&[0], &[1]])
}

pub fn p2() -> Fan {
    build("P2", 2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[2, 0]])
}

pub fn p1xp1() -> Fan {
    build(
        "P1xP1",
        2,
        &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]],
        &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]],
    )
}

/// Hirzebruch surface `F_a` with rays `(1,0), (0,1), (-1,a), (0,-1)`.
pub fn hirzebruch(a: i64) -> Fan {
    build(
        &format!("F{a}"),
        2,
        &[&[1, 0], &[0, 1], &[-1, a], &[0, -1]],
        &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]],
    )
}

pub fn p3() -> Fan {
    build(
        "P3",
        3,
        &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]],
        &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]],
    )
}

/// Weighted projective plane `P(1,1,2)`; ray 2 is `(-1,-2)`.
pub fn p112() -> Fan {
    build("P(1,1,2)", 2, &[&[1, 0], &[0, 1], &[-1, -2]], &[&[0, 1], &[1, 2], &[2, 0]])
}

/// Weighted projective plane `P(1,2,3)`; ray 2 is `(-2,-3)`.
pub fn p123() -> Fan {
    build("P(1,2,3)", 2, &[&[1, 0], &[0, 1], &[-2, -3]], &[&[0, 1], &[1, 2], &[2, 0]])
}

/// A complete simplicial 3-fan with no strictly convex support function.
///
/// Start from the fan of `P^3` and subdivide the positive orthant: the inner
/// cone on `f_i = e_i + (1,1,1)` plus a twisted triangulation of the band
/// between the `e_i` and the `f_i`, always cutting along `e_i f_{i+1}`.
/// Rays 0..3 are `e_1, e_2, e_3, -(1,1,1)`; rays 4..7 are `f_1, f_2, f_3`.
pub fn non_polytopal() -> Fan {
    build(
        "twisted 3-fan",
        3,
        &[
            &[1, 0, 0],
            &[0, 1, 0],
            &[0, 0, 1],
            &[-1, -1, -1],
            &[2, 1, 1],
            &[1, 2, 1],
            &[1, 1, 2],
        ],
        &[
            &[3, 0, 1],
            &[3, 1, 2],
            &[3, 0, 2],
            &[4, 5, 6],
            &[0, 1, 5],
            &[0, 5, 4],
            &[1, 2, 6],
            &[1, 6, 5],
            &[2, 0, 4],
            &[2, 4, 6],
        ],
    )
}

pub fn smooth() -> Vec<Fan> {
    vec![p1(), p2(), p1xp1(), hirzebruch(1), p3()]
}

pub fn all() -> Vec<Fan> {
    vec![p1(), p2(), p1xp1(), hirzebruch(1), p3(), p112(), p123(), non_polytopal()]
}
