use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::disk::{hyperbolic_derivative, DiskPoint};
use crate::dual::Evaluatable;
use crate::random;

fn symbol_from_seed(seed: u64) -> Symbol {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Symbol::compile_with_resolution(random::self_map(&mut rng, 2), 128).unwrap()
}

fn interior(r: f64, t: f64) -> Complex64 {
    Complex64::from_polar(r, t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_matches_central_difference(seed in any::<u64>(), pts in prop::collection::vec((0.0f64..0.9, 0.0f64..6.3), 16)) {
        let s = symbol_from_seed(seed);
        for (r, t) in pts {
            let z = interior(r, t);
            let h = 1e-5 * (1.0 - r).min(1.0);
            for dir in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
                let step = dir * h;
                let fd = (s.eval(z + step).value - s.eval(z - step).value) / (step * 2.0);
                let d = s.eval(z).deriv;
                prop_assert!((fd - d).norm() <= 1e-6 * d.norm().max(1.0), "{} at {}: fd {} vs {}", s, z, fd, d);
            }
        }
    }

    #[test]
    fn powers_multiply(seed in any::<u64>(), m in 1u32..12, n in 1u32..12, r in 0.0f64..0.99, t in 0.0f64..6.3) {
        let s = symbol_from_seed(seed);
        let z = interior(r, t);
        let lhs = s.pointwise_power(m + n).unwrap().eval(z).value;
        let rhs = s.pointwise_power(m).unwrap().eval(z).value * s.pointwise_power(n).unwrap().eval(z).value;
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn accepted_symbols_satisfy_schwarz_pick(seed in any::<u64>(), pts in prop::collection::vec((0.0f64..0.99, 0.0f64..6.3), 32)) {
        let s = symbol_from_seed(seed);
        for (r, t) in pts {
            let p = DiskPoint::from_polar(r, t).unwrap();
            if let Ok(hd) = hyperbolic_derivative(&s, p) {
                prop_assert!(hd.norm() <= 1.0 + 1e-10, "{} at {:?}: {}", s, p, hd.norm());
            }
        }
    }

    #[test]
    fn printer_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random::self_map(&mut rng, 3);
        prop_assert_eq!(parse_symbol(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn parser_never_panics(s in "\\PC{0,64}") {
        let _ = parse_symbol(&s);
    }
}
