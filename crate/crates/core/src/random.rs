//! Random generation of self-maps and combinations for experiments and
//! property checks. Every generator only emits maps that are self-maps of
//! the disk by construction.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::disk::DiskPoint;
use crate::symbols::SymbolExpr;

/// Uniform point of the disk of radius `max_r`.
pub fn disk_point<R: Rng + ?Sized>(rng: &mut R, max_r: f64) -> DiskPoint {
    let r = max_r * rng.gen::<f64>().sqrt();
    DiskPoint::from_polar(r, rng.gen::<f64>() * TAU).expect("radius below 1")
}

pub fn unimodular<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen::<f64>() * TAU)
}

/// Nonzero scalar with modulus in `[0.25, 2]`.
pub fn lambda<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.25..2.0), rng.gen::<f64>() * TAU)
}

/// Affine map `z ↦ η((1-t) + t conj(ζ) z)`: maps the disk into the disk of
/// radius `t` internally tangent to the circle at `η`, touching only at
/// `z = ζ`.
pub fn touching_affine(zeta: Complex64, eta: Complex64, t: f64) -> SymbolExpr {
    SymbolExpr::Mobius {
        a: eta * zeta.conj() * t,
        b: eta * (1.0 - t),
        c: Complex64::new(0.0, 0.0),
        d: Complex64::new(1.0, 0.0),
    }
}

/// Leaf or shallow self-map drawn from the whole grammar.
pub fn self_map<R: Rng + ?Sized>(rng: &mut R, depth: usize) -> SymbolExpr {
    let leaf_only = depth == 0;
    let choice = if leaf_only { rng.gen_range(0..7) } else { rng.gen_range(0..10) };
    match choice {
        0 => SymbolExpr::Identity,
        1 => SymbolExpr::Sigma(disk_point(rng, 0.95)),
        2 => {
            let m = rng.gen_range(1..=3);
            SymbolExpr::Blaschke { zeros: (0..m).map(|_| disk_point(rng, 0.95)).collect(), unimodular: unimodular(rng) }
        }
        3 => SymbolExpr::Const(disk_point(rng, 0.95).value()),
        4 => {
            let deg = rng.gen_range(1..=5);
            let raw: Vec<Complex64> = (0..=deg).map(|_| disk_point(rng, 1.0 - 1e-9).value()).collect();
            let l1: f64 = raw.iter().map(|c| c.norm()).sum();
            let target = rng.gen_range(0.2..1.0);
            SymbolExpr::Poly(raw.into_iter().map(|c| c * (target / l1.max(1e-300))).collect())
        }
        5 => touching_affine(unimodular(rng), unimodular(rng), rng.gen_range(0.2..0.9)),
        6 => SymbolExpr::scale(
            Complex64::from_polar(rng.gen_range(0.1..0.9), rng.gen::<f64>() * TAU),
            SymbolExpr::Sigma(disk_point(rng, 0.9)),
        ),
        7 => SymbolExpr::scale(
            Complex64::from_polar(rng.gen_range(0.1..1.0), rng.gen::<f64>() * TAU),
            self_map(rng, depth - 1),
        ),
        8 => SymbolExpr::compose(self_map(rng, depth - 1), self_map(rng, depth - 1)),
        _ => SymbolExpr::pow(self_map(rng, depth - 1), rng.gen_range(1..=6)),
    }
}

/// Möbius or Blaschke symbol whose compactness class is decided by
/// construction: automorphisms and Blaschke products (non-compact),
/// boundary-touching affine maps (non-compact), and maps with range inside
/// a disk of radius at most 0.7 (compact).
pub fn mobius_or_blaschke<R: Rng + ?Sized>(rng: &mut R) -> SymbolExpr {
    match rng.gen_range(0..4) {
        0 => SymbolExpr::Sigma(disk_point(rng, 0.8)),
        1 => {
            SymbolExpr::Blaschke { zeros: (0..2).map(|_| disk_point(rng, 0.8)).collect(), unimodular: unimodular(rng) }
        }
        2 => touching_affine(unimodular(rng), unimodular(rng), rng.gen_range(0.3..0.7)),
        _ => SymbolExpr::scale(
            Complex64::from_polar(rng.gen_range(0.1..0.7), rng.gen::<f64>() * TAU),
            SymbolExpr::Sigma(disk_point(rng, 0.8)),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::Symbol;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_maps_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let e = self_map(&mut rng, 2);
            Symbol::compile_with_resolution(e.clone(), 128).unwrap_or_else(|err| panic!("{e} rejected: {err}"));
        }
        for _ in 0..50 {
            Symbol::compile(mobius_or_blaschke(&mut rng)).unwrap();
        }
    }

    #[test]
    fn touching_affine_touches_once() {
        let zeta = Complex64::from_polar(1.0, 2.0);
        let eta = Complex64::from_polar(1.0, -0.5);
        let s = Symbol::compile(touching_affine(zeta, eta, 0.4)).unwrap();
        use crate::dual::Evaluatable;
        let v = s.eval(zeta * (1.0 - 1e-12)).value;
        assert!((v - eta).norm() < 1e-11);
        assert!(s.eval(-zeta * (1.0 - 1e-12)).value.norm() < 0.3);
    }
}
