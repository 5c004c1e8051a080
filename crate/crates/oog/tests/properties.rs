//! Property tests over seeded random systems: structural identities of the
//! Hamiltonian construction, symmetry of frequency responses, and scaling
//! laws of the generalized singular values.

use faer::{Mat, c64};
use oog::sysgen::RandomSystemSpec;
use oog::{
    build_hamiltonian, generalized_singular_values, max_gsv_at_frequency, random_stable_plant,
};
use proptest::prelude::*;

fn random_complex(rows: usize, cols: usize, seed: u64) -> Mat<c64> {
    let mut s = seed
        .wrapping_mul(0x9E3779B97F4A7C15)
        .wrapping_add(0x2545F4914F6CDD1D);
    let mut next = move || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    Mat::from_fn(rows, cols, |_, _| c64::new(next(), next()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hamiltonian_structure_holds_on_random_plants(
        seed in 0u64..1u64 << 48,
        nx in prop_oneof![Just(5usize), Just(10usize)],
        gamma in 0.05f64..20.0,
        eps_exp in -9.0f64..-2.0,
    ) {
        let plant = random_stable_plant(&RandomSystemSpec::new(nx, seed)).unwrap();
        let epsilon = 10f64.powf(eps_exp);
        let parts = build_hamiltonian(&plant, epsilon, gamma, 1e-12).unwrap();
        let m = &parts.m_gamma;
        let n = nx;
        let j = Mat::from_fn(2 * n, 2 * n, |r, c| {
            if r < n && c == r + n { 1.0 } else if r >= n && c == r - n { -1.0 } else { 0.0 }
        });
        let jm = &j * m;
        let asym = (&jm - jm.transpose()).norm_max();
        prop_assert!(asym <= 1e-12 * m.norm_l2(), "asymmetry {} vs norm {}", asym, m.norm_l2());
    }

    #[test]
    fn gsv_scaling_is_homogeneous(
        seed in 0u64..1u64 << 48,
        re in -3.0f64..3.0,
        im in -3.0f64..3.0,
    ) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let m = random_complex(3, 2, seed);
        let n = {
            // stack a unit block to keep NᴴN positive definite
            let base = random_complex(2, 2, seed ^ 0xABCD);
            Mat::from_fn(4, 2, |i, j| {
                if i < 2 { base[(i, j)] } else if i - 2 == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) }
            })
        };
        let alpha = c64::new(re, im);
        let scaled = Mat::from_fn(3, 2, |i, j| alpha * m[(i, j)]);
        let base_vals = generalized_singular_values(m.as_ref(), n.as_ref()).unwrap();
        let scaled_vals = generalized_singular_values(scaled.as_ref(), n.as_ref()).unwrap();
        for (s, b) in scaled_vals.values.iter().zip(base_vals.values.iter()) {
            prop_assert!((s - alpha.norm() * b).abs() <= 1e-10 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn objective_symmetric_and_monotone_in_epsilon(
        seed in 0u64..1u64 << 48,
        omega in 0.0f64..50.0,
    ) {
        let plant = random_stable_plant(&RandomSystemSpec::new(5, seed)).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [1e-9, 1e-6, 1e-3] {
            let v = max_gsv_at_frequency(&plant, eps, omega).unwrap();
            let v_neg = max_gsv_at_frequency(&plant, eps, -omega).unwrap();
            prop_assert!((v - v_neg).abs() <= 1e-9 * (1.0 + v));
            prop_assert!(v <= prev * (1.0 + 1e-12));
            prev = v;
        }
    }

    #[test]
    fn response_conjugate_symmetry(
        seed in 0u64..1u64 << 48,
        omega in 0.0f64..100.0,
    ) {
        let plant = random_stable_plant(&RandomSystemSpec::new(10, seed)).unwrap();
        let sys = plant.performance_system();
        let plus = sys.freq_response(omega).unwrap();
        let minus = sys.freq_response(-omega).unwrap();
        for i in 0..plus.nrows() {
            for j in 0..plus.ncols() {
                let diff = (minus[(i, j)] - plus[(i, j)].conj()).norm();
                prop_assert!(diff <= 1e-9 * (1.0 + plus[(i, j)].norm()));
            }
        }
    }
}
