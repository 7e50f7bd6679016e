//! Shared helpers for the integration suites: a seeded generator of small
//! structured systems (rotated orthonormal triples plus span completions)
//! whose constraints are auto-derived from the geometry.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;

use kscolor::config::Tolerances;
use kscolor::csp::ConstraintSystem;
use kscolor::formats::{derive_constraints, DeriveOptions};
use kscolor::geom::{canonicalize, ProjPoint, UnitVec};

pub fn random_unit(rng: &mut StdRng) -> UnitVec {
    loop {
        let x: f64 = rng.random_range(-1.0..1.0);
        let y: f64 = rng.random_range(-1.0..1.0);
        let z: f64 = rng.random_range(-1.0..1.0);
        let n2 = x * x + y * y + z * z;
        if n2 > 0.05 && n2 <= 1.0 {
            return UnitVec::normalized(x, y, z).expect("norm checked");
        }
    }
}

pub fn random_orthonormal_triple(rng: &mut StdRng) -> [UnitVec; 3] {
    let a = random_unit(rng);
    let b = loop {
        let r = random_unit(rng);
        let c = a.cross(&r);
        let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        if n > 0.1 {
            break UnitVec::normalized(c[0], c[1], c[2]).expect("norm checked");
        }
    };
    let c = a.cross(&b);
    [a, b, UnitVec::normalized(c[0], c[1], c[2]).expect("unit cross")]
}

/// A small system with real structure: every constraint is derived from the
/// geometry of the generated points, so triples and spans genuinely occur.
pub fn random_system(rng: &mut StdRng, max_points: usize) -> ConstraintSystem {
    let tol = Tolerances::default();
    let mut points: Vec<ProjPoint> = Vec::new();
    let triple_count = rng.random_range(1..=2);
    for _ in 0..triple_count {
        for v in random_orthonormal_triple(rng) {
            points.push(canonicalize(v, &tol));
        }
    }
    let completions = rng.random_range(0..=4usize);
    for _ in 0..completions {
        let i = rng.random_range(0..points.len());
        let j = rng.random_range(0..points.len());
        if i == j {
            continue;
        }
        let alpha: f64 = rng.random_range(-1.0..1.0);
        let beta: f64 = rng.random_range(-1.0..1.0);
        let a = points[i].rep();
        let b = points[j].rep();
        if let Ok(v) = UnitVec::normalized(
            alpha * a.x() + beta * b.x(),
            alpha * a.y() + beta * b.y(),
            alpha * a.z() + beta * b.z(),
        ) {
            points.push(canonicalize(v, &tol));
        }
    }
    let extras = rng.random_range(0..=2usize);
    for _ in 0..extras {
        points.push(canonicalize(random_unit(rng), &tol));
    }
    points.truncate(max_points);
    derive_constraints(points, DeriveOptions::default(), &tol).expect("within derive limit")
}
