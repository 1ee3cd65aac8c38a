use std::f64::consts::PI;

use cavity_grover::dynamics::{
    build_effective_hamiltonian, build_hamiltonian, evolve, extract_gate, gate_time, CavityParams,
    EvolutionSettings,
};
use cavity_grover::gates::{
    decayed_i000, diffusion, exact_i000, hadamard3, marked_gate, LogicalOperator,
};
use cavity_grover::grover::{closed_form_probability, run_search, GateVariant, MarkedState};
use cavity_grover::hilbert::{ProductBasis, PureState};
use proptest::prelude::*;

const OMEGA1: f64 = 2.0 * PI * 6.125e3;

fn designed(kappa_ratio: f64) -> CavityParams {
    CavityParams::designed(OMEGA1, kappa_ratio * OMEGA1).unwrap()
}

fn couplings() -> impl Strategy<Value = [f64; 3]> {
    [0.2f64..10.0, 0.2f64..10.0, 0.2f64..10.0].prop_map(|w| w.map(|x| x * OMEGA1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hamiltonian_is_hermitian(omega in couplings(), cutoff in 1usize..4) {
        let params = CavityParams::new(omega, 0.0, cutoff).unwrap();
        let basis = ProductBasis::new(cutoff).unwrap();
        let h = build_hamiltonian(&params, &basis);
        let diff = (&h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(diff <= 1e-15 * OMEGA1, "max |H - H†| = {diff}");
    }

    #[test]
    fn excitation_number_is_conserved(
        omega in couplings(),
        kappa_ratio in 0.0f64..0.5,
        tau in 0.0f64..5.0,
        slot in 0usize..8,
    ) {
        let params = CavityParams::new(omega, kappa_ratio * omega[0], 2).unwrap();
        let basis = ProductBasis::new(2).unwrap();
        let start = basis.computational_embedding()[slot];
        let block = basis.excitation_number(start).unwrap();
        let h = build_effective_hamiltonian(&params, &basis);
        let out = evolve(&h, tau / OMEGA1, &PureState::basis_vector(&basis, start).unwrap(), &EvolutionSettings::default()).unwrap();
        let outside: Vec<usize> = (0..basis.dim()).filter(|&i| basis.excitation_number(i).unwrap() != block).collect();
        prop_assert!(out.weight_on(&outside) < 1e-12);
    }

    #[test]
    fn resonant_evolution_preserves_norm(omega in couplings(), gates in 0.0f64..10.0, slot in 0usize..8) {
        let params = CavityParams::new(omega, 0.0, 1).unwrap();
        let basis = ProductBasis::new(1).unwrap();
        let h = build_hamiltonian(&params, &basis);
        let t = gates * gate_time(&designed(0.0)).unwrap();
        let start = PureState::basis_vector(&basis, basis.computational_embedding()[slot]).unwrap();
        let out = evolve(&h, t, &start, &EvolutionSettings::default()).unwrap();
        prop_assert!((out.norm_squared() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn decaying_norm_never_grows(kappa_ratio in 0.001f64..1.0, slot in 0usize..8) {
        let params = designed(kappa_ratio);
        let basis = ProductBasis::new(1).unwrap();
        let h = build_effective_hamiltonian(&params, &basis);
        let t0 = gate_time(&params).unwrap();
        let start = PureState::basis_vector(&basis, basis.computational_embedding()[slot]).unwrap();
        let settings = EvolutionSettings::default();
        let mut last = 1.0;
        for i in 0..=120 {
            let norm = evolve(&h, t0 * i as f64 / 120.0, &start, &settings).unwrap().norm_squared();
            prop_assert!(norm <= last + 1e-14, "norm rose from {last} to {norm} at sample {i}");
            last = norm;
        }
    }

    #[test]
    fn cutoff_one_is_exact_for_computational_inputs(omega in couplings(), kappa_ratio in 0.0f64..0.5, tau in 0.0f64..5.0) {
        let settings = EvolutionSettings::default();
        let t = tau / OMEGA1;
        let small = extract_gate(&CavityParams::new(omega, kappa_ratio * omega[0], 1).unwrap(), t, &settings).unwrap();
        let large = extract_gate(&CavityParams::new(omega, kappa_ratio * omega[0], 2).unwrap(), t, &settings).unwrap();
        prop_assert!(small.restricted.max_abs_diff(&large.restricted) < 1e-12);
        for c in 0..8 {
            prop_assert!((small.leakage[c] - large.leakage[c]).abs() < 1e-12);
        }
    }

    #[test]
    fn column_norms_and_leakage_are_bounded(omega in couplings(), kappa_ratio in 0.0f64..0.5, tau in 0.0f64..5.0) {
        let kappa = kappa_ratio * omega[0];
        let g = extract_gate(&CavityParams::new(omega, kappa, 1).unwrap(), tau / OMEGA1, &EvolutionSettings::default()).unwrap();
        for c in 0..8 {
            let kept: f64 = (0..8).map(|r| g.restricted.get(r, c).norm_sqr()).sum();
            prop_assert!(kept + g.leakage[c] <= 1.0 + 1e-9);
            if kappa == 0.0 {
                prop_assert!((kept + g.leakage[c] - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn search_records_are_consistent(kappa_ratio in 0.0f64..1.0, bits in 0u8..8) {
        let tau = MarkedState::new(bits).unwrap();
        for rec in run_search(tau, 8, GateVariant::Decayed, &designed(kappa_ratio)).unwrap() {
            prop_assert!(rec.p_find <= rec.survival + 1e-12);
            prop_assert!(rec.survival <= 1.0 + 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&rec.fidelity));
        }
    }
}

#[test]
fn integrator_matches_matrix_exponential() {
    for kappa_ratio in [0.0, 0.02, 0.1] {
        let params = designed(kappa_ratio);
        let t0 = gate_time(&params).unwrap();
        let reference =
            extract_gate(&params, t0, &EvolutionSettings::matrix_exponential()).unwrap();
        let rk4 =
            extract_gate(&params, t0, &EvolutionSettings::integrator(20_000).unwrap()).unwrap();
        let diff = reference.restricted.max_abs_diff(&rk4.restricted);
        assert!(diff < 1e-8, "kappa ratio {kappa_ratio}: {diff}");
    }
}

#[test]
fn exact_search_matches_closed_form() {
    let params = designed(0.0);
    for tau in MarkedState::all() {
        let records = run_search(tau, 12, GateVariant::Exact, &params).unwrap();
        for rec in records {
            let expected = closed_form_probability(rec.iteration);
            assert!(
                (rec.p_find - expected).abs() < 1e-12,
                "tau {tau} k {}",
                rec.iteration
            );
            assert!((rec.fidelity - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn decay_lowers_success_at_every_iteration() {
    let run = |r| {
        run_search(
            MarkedState::new(0).unwrap(),
            8,
            GateVariant::Decayed,
            &designed(r),
        )
        .unwrap()
    };
    let (clean, weak, strong) = (run(0.0), run(0.02), run(0.1));
    for k in 0..8 {
        assert!(strong[k].p_find <= weak[k].p_find, "k = {}", k + 1);
        assert!(weak[k].p_find <= clean[k].p_find, "k = {}", k + 1);
    }
}

#[test]
fn analytic_diagonal_matches_dynamics() {
    let settings = EvolutionSettings::default();
    for (kappa_ratio, tol) in [(0.0, 1e-6), (0.02, 1e-3), (0.1, 1e-3)] {
        let params = designed(kappa_ratio);
        let (analytic, _) = decayed_i000(&params).unwrap();
        let sim = extract_gate(&params, gate_time(&params).unwrap(), &settings).unwrap();
        let (a, s) = (analytic.diagonal(), sim.diagonal());
        for slot in 0..4 {
            assert!(
                (a[slot] - s[slot]).norm() < tol,
                "kappa {kappa_ratio} slot {slot}"
            );
        }
        for slot in 4..8 {
            assert!(
                (a[slot] - s[slot]).norm() < 1e-9,
                "kappa {kappa_ratio} slot {slot}"
            );
        }
    }
}

#[test]
fn diagonal_slots_follow_the_block_closed_forms() {
    // Unequal couplings so that every block has a distinct frequency.
    let omega = [1.0, 2.0, 3.0].map(|x| x * OMEGA1);
    let params = CavityParams::new(omega, 0.0, 1).unwrap();
    let t = 0.7 / OMEGA1;
    let d = extract_gate(&params, t, &EvolutionSettings::default())
        .unwrap()
        .diagonal();
    let [w1, w2, w3] = omega.map(|w| w * w);
    let block = |others: f64| (others + w1 * ((w1 + others).sqrt() * t).cos()) / (w1 + others);
    let expected = [(omega[0] * t).cos(), block(w3), block(w2), block(w2 + w3)];
    for slot in 0..4 {
        assert!((d[slot].re - expected[slot]).abs() < 1e-12, "slot {slot}");
        assert!(d[slot].im.abs() < 1e-12);
    }
}

#[test]
fn diffusion_identities() {
    let h = hadamard3();
    assert!((h * h).max_abs_diff(&LogicalOperator::identity()) < 1e-12);
    let minus_d = (h * exact_i000()) * h;
    let d = diffusion();
    for r in 0..8 {
        for c in 0..8 {
            assert!((minus_d.get(r, c) + d.get(r, c)).norm() < 1e-12);
        }
    }
    for tau in MarkedState::all() {
        let i_tau = marked_gate(tau, &exact_i000());
        let q = minus_d * i_tau;
        let expected = d * i_tau;
        for r in 0..8 {
            for c in 0..8 {
                assert!((q.get(r, c) + expected.get(r, c)).norm() < 1e-12);
            }
        }
    }
}
