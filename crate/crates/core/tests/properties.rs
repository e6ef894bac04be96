mod common;

use holv_core::io::{from_json_str, to_json_pretty};
use holv_core::linalg::{eigenvalues, inf_dist, inf_norm};
use holv_core::model::{permute_two_faction, random_scenario, LvModel, Scenario};
use holv_core::pcp::{brute_force_solve, norm_bounds, omega, EnumerationOptions};
use holv_core::poly::{solve_m_tensor, SolveOptions};
use holv_core::sim::{simulate, SimOptions};
use holv_core::tensor::{classify, spectral_radius_nonneg, ClassifyOptions, SpectralOptions};
use proptest::prelude::*;

use common::*;

fn scenario_for(k: u8) -> (Scenario, usize) {
    match k % 4 {
        0 => (Scenario::General, 3),
        1 => (Scenario::Cooperative, 3),
        2 => (Scenario::Competitive, 4),
        _ => (Scenario::TwoFaction { m: 2, n: 2 }, 4),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tvp_is_homogeneous_and_linear(seed in any::<u64>(), order in 2usize..=4, n in 1usize..=4, lambda in 0.1f64..3.0) {
        let mut r = rng(seed);
        let a = random_tensor(&mut r, order, n, -1.0, 1.0);
        let b = random_tensor(&mut r, order, n, -1.0, 1.0);
        let x = random_vec(&mut r, n, -2.0, 2.0);
        let scaled: Vec<f64> = x.iter().map(|v| lambda * v).collect();
        let ax = a.tvp(&x).unwrap();
        let expect: Vec<f64> = ax.iter().map(|v| lambda.powi(order as i32 - 1) * v).collect();
        prop_assert!(inf_dist(&a.tvp(&scaled).unwrap(), &expect) <= 1e-12 * (1.0 + inf_norm(&expect)));
        let sum: Vec<f64> = ax.iter().zip(b.tvp(&x).unwrap()).map(|(p, q)| p + q).collect();
        prop_assert!(inf_dist(&a.add(&b).unwrap().tvp(&x).unwrap(), &sum) <= 1e-12 * (1.0 + inf_norm(&sum)));
    }

    #[test]
    fn jacobian_matches_central_differences(seed in 0u64..10_000, kind in any::<u8>()) {
        let (scenario, dim) = scenario_for(kind);
        let model = random_scenario(scenario, dim, seed).unwrap();
        let x = random_vec(&mut rng(seed ^ 0xabcd), dim, 0.0, 2.0);
        let fd = finite_difference(|p| model.rhs(p).unwrap(), &x, 1e-5);
        prop_assert!(relative_gap(&model.jacobian(&x).unwrap(), &fd) < 1e-6);
    }

    #[test]
    fn collatz_bracket_contains_rho(seed in any::<u64>(), n in 1usize..=4) {
        let t = random_tensor(&mut rng(seed), 3, n, 0.0, 1.0);
        let est = spectral_radius_nonneg(&t, SpectralOptions::default()).unwrap();
        let slop = 1e-12 * (1.0 + est.rho);
        prop_assert!(est.lower - slop <= est.rho && est.rho <= est.upper + slop);
        for &(l, u) in &est.bracket_history {
            prop_assert!(l - slop <= est.rho && est.rho <= u + slop);
        }
    }

    #[test]
    fn row_sdd_implies_h_plus_and_s(seed in any::<u64>(), n in 1usize..=4, order in 2usize..=3) {
        let t = sdd_tensor(&mut rng(seed), order, n);
        let report = classify(&t, &ClassifyOptions::default());
        prop_assert!(report.is_generalized_row_sdd_pos_diag);
        if report.is_strictly_diag_dominant {
            prop_assert!(report.is_h_plus);
        }
        if report.is_h_plus {
            prop_assert!(report.s_certificate.is_some());
        }
    }

    #[test]
    fn m_solver_traces_are_ordered(seed in any::<u64>()) {
        let system = m_system(seed);
        let r = solve_m_tensor(&system, SolveOptions::default()).unwrap();
        prop_assert!(r.monotone);
        prop_assert!(r.unique_certified);
        prop_assert!(system.residual(&r.solution) < 1e-8);
    }

    #[test]
    fn qcp_solutions_respect_bounds(seed in any::<u64>()) {
        let problem = sdd_qcp(seed);
        let bounds = norm_bounds(&problem).unwrap();
        let neg = omega(problem.q());
        for s in brute_force_solve(&problem, &EnumerationOptions::default()).solutions {
            let norm = inf_norm(&s.x);
            prop_assert!(bounds.lower - 1e-9 <= norm && norm <= bounds.upper + 1e-9);
            let k = (0..s.x.len()).max_by(|&i, &j| s.x[i].total_cmp(&s.x[j])).unwrap();
            prop_assert!(neg.contains(&k));
        }
    }

    #[test]
    fn permutation_is_a_similarity(seed in 0u64..10_000) {
        let model = random_scenario(Scenario::TwoFaction { m: 2, n: 3 }, 5, seed).unwrap();
        let x = random_vec(&mut rng(seed), 5, 0.1, 2.0);
        let j = model.jacobian(&x).unwrap();
        let p = permute_two_faction(&j, 2, 3).unwrap();
        let mut a: Vec<(f64, f64)> = eigenvalues(&j).iter().map(|z| (z.re, z.im)).collect();
        let mut b: Vec<(f64, f64)> = eigenvalues(&p).iter().map(|z| (z.re, z.im)).collect();
        a.sort_by(|u, v| u.partial_cmp(v).unwrap());
        b.sort_by(|u, v| u.partial_cmp(v).unwrap());
        let scale = 1.0 + a.iter().map(|z| z.0.abs() + z.1.abs()).fold(0.0, f64::max);
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u.0 - v.0).abs() + (u.1 - v.1).abs() < 1e-10 * scale);
        }
    }

    #[test]
    fn model_files_round_trip(seed in 0u64..10_000, kind in any::<u8>()) {
        let (scenario, dim) = scenario_for(kind);
        let model = random_scenario(scenario, dim, seed).unwrap();
        let back: LvModel = from_json_str(&to_json_pretty(&model)).unwrap();
        prop_assert_eq!(back, model);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn trajectories_stay_nonnegative(seed in 0u64..10_000, zero in 0usize..4) {
        let model = random_scenario(Scenario::Competitive, 4, seed).unwrap();
        let mut x0 = random_vec(&mut rng(seed), 4, 0.0, 10.0);
        x0[zero] = 0.0;
        let opts = SimOptions::default();
        let tr = simulate(&model, &x0, 5.0, &opts).unwrap();
        for x in &tr.states {
            prop_assert!(x.iter().all(|&v| v >= -10.0 * opts.abs_tol));
            prop_assert_eq!(x[zero].to_bits(), 0f64.to_bits());
        }
        prop_assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
    }
}
