use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use tlspin_core::cupcap::{cup_state, evaluate, parse, rank_one, CupType, EvalResult};
use tlspin_core::doublewell::{map_well, WellParams};
use tlspin_core::dynamics::{tunneling_time, tunneling_trace, zeno_run};
use tlspin_core::hamiltonian::{build_h, spectrum, splitting, topological_projector, ModelParams};
use tlspin_core::numerics::{gram_residual, hermitian_eig, Operator, C64, TOL_ABS, TOL_EIG};
use tlspin_core::tl_algebra::{embed, make_generator, verify_relations, Sign, TLParams};
use tlspin_core::topo_basis::{consistency_report, graphical_quadruple, spectral_basis};

fn grid() -> impl Iterator<Item = TLParams> {
    Sign::BOTH
        .into_iter()
        .flat_map(|eps| (0..12).map(move |k| TLParams::new(k as f64 * PI / 6.0, eps).unwrap()))
}

#[test]
fn relations_hold_on_chains_up_to_five() {
    for p in grid() {
        for m in 2..=5 {
            let r = verify_relations(&p, m).unwrap();
            assert!(r.passed(), "phi={} eps={:?} m={m}: {}", p.phi, p.eps, r.worst());
        }
    }
}

#[test]
fn parsed_generator_matches_matrix() {
    let src = "cup(1,2:d1);cap(1,2:d1) + cup(1,2:d2);cap(1,2:d2)";
    let d = parse(src).unwrap();
    for p in grid() {
        let EvalResult::Op { sites, op } = evaluate(&d, &p).unwrap() else {
            panic!("expected an operator")
        };
        assert_eq!(sites, vec![1, 2]);
        assert!(op.max_abs_diff(&make_generator(&p)).unwrap() <= TOL_ABS);
    }
}

#[test]
fn bond_23_operator_from_diagram() {
    let d = parse("cup(2,3:d1);cap(2,3:d1) + cup(2,3:d2);cap(2,3:d2)").unwrap();
    let p = TLParams::new(0.9, Sign::Minus).unwrap();
    let EvalResult::Op { op, .. } = evaluate(&d, &p).unwrap() else {
        panic!("expected an operator")
    };
    let u23_on_three = embed(&p, 3, 2).unwrap().op;
    // the diagram only sees sites 2 and 3; pad with site 1
    let padded = Operator::identity(2).kron(&op);
    assert!(padded.max_abs_diff(&u23_on_three).unwrap() <= TOL_ABS);
}

#[test]
fn four_site_expectation_from_text() {
    let p = TLParams::new(0.0, Sign::Plus).unwrap();
    let EvalResult::State { sites, state } = evaluate(&parse("cup(1,2:d1) | cup(3,4:d1)").unwrap(), &p).unwrap() else {
        panic!("expected a state")
    };
    assert_eq!(sites, vec![1, 2, 3, 4]);
    // each cup carries sqrt(d), so the pair carries d
    let psi = state.scale(C64::new(1.0 / SQRT_2, 0.0));
    assert!((psi.norm() - 1.0).abs() <= TOL_ABS);
    let z = embed(&p, 4, 2).unwrap().op.matrix_element(&psi, &psi).unwrap();
    assert!((z - C64::new(FRAC_1_SQRT_2, 0.0)).norm() <= TOL_ABS, "{z}");
}

#[test]
fn cup_states_are_orthonormal_everywhere() {
    for p in grid() {
        let states: Vec<_> = CupType::ALL.iter().map(|t| cup_state(*t, &p)).collect();
        assert!(gram_residual(&states).unwrap() <= TOL_ABS);
        let sum = CupType::ALL
            .iter()
            .map(|t| rank_one(*t, &p))
            .try_fold(Operator::zeros(4), |acc, r| acc.add(&r))
            .unwrap();
        assert!(sum.max_abs_diff(&Operator::identity(4).scale(C64::new(SQRT_2, 0.0))).unwrap() <= TOL_ABS);
    }
}

#[test]
fn spectrum_on_parameter_grid() {
    for j in [0.5, 1.0, 2.5] {
        for delta in [-0.4, -0.1, 0.1, 0.3, 0.45] {
            for phi in [0.0, 1.3] {
                let mp = ModelParams::new(j, delta, phi, Sign::Plus, 1.0).unwrap();
                let eig = hermitian_eig(&build_h(&mp)).unwrap();
                assert!(eig.residual(&build_h(&mp)).unwrap() <= TOL_EIG);
                let mut nonzero: Vec<f64> = eig.values.iter().copied().filter(|v| v.abs() > TOL_EIG).collect();
                nonzero.sort_by(f64::total_cmp);
                let mut want = mp.labelled_energies().to_vec();
                want.sort_by(f64::total_cmp);
                assert_eq!(nonzero.len(), 4);
                for (a, b) in nonzero.iter().zip(&want) {
                    assert!((a - b).abs() <= TOL_EIG);
                }
                let s = spectrum(&mp).unwrap();
                assert_eq!(s.levels.iter().find(|l| l.energy.abs() < TOL_EIG).unwrap().multiplicity, 12);
            }
        }
    }
}

#[test]
fn degenerate_point_has_double_levels() {
    let mp = ModelParams::new(1.0, 0.0, 0.0, Sign::Minus, 1.0).unwrap();
    let s = spectrum(&mp).unwrap();
    let mult: Vec<(f64, usize)> = s.levels.iter().map(|l| (l.energy, l.multiplicity)).collect();
    assert_eq!(mult.len(), 3);
    assert_eq!(mult[1].1, 2);
    assert_eq!(mult[2].1, 2);
    assert!((mult[1].0 - 1.0).abs() <= TOL_EIG && (mult[2].0 - 4.0).abs() <= TOL_EIG);
}

#[test]
fn both_routes_span_the_topological_subspace() {
    let mp = ModelParams::new(1.0, 0.2, 0.7, Sign::Minus, 1.0).unwrap();
    let p = mp.tl_params();
    let target = topological_projector(&p);
    let g = graphical_quadruple(&p).unwrap().projector().unwrap();
    let s = spectral_basis(&mp).unwrap().projector().unwrap();
    assert!(g.max_abs_diff(&target).unwrap() <= TOL_EIG);
    assert!(s.max_abs_diff(&target).unwrap() <= TOL_EIG);
    let h = build_h(&mp);
    assert!(h.commutator(&target).unwrap().max_abs() <= TOL_EIG);
}

#[test]
fn report_serializes() {
    let mp = ModelParams::new(1.0, 0.1, 0.0, Sign::Plus, 1.0).unwrap();
    let r = consistency_report(&mp).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["params"]["J"], 1.0);
    assert_eq!(v["overlap"].as_array().unwrap().len(), 4);
    assert_eq!(v["flags"]["single_basis_compatible"], false);
    assert_eq!(v["flags"]["same_subspace"], true);
}

#[test]
fn well_feeds_dynamics() {
    let w = WellParams::new(1.0, 2.0, 0.5, 10.0, 1.0).unwrap();
    let map = map_well(&w);
    let mp = ModelParams::new(map.j, map.delta, 0.0, Sign::Plus, w.hbar).unwrap();
    let tau = tunneling_time(&mp).unwrap();
    assert!((tau - map.tau).abs() <= 1e-12 * tau);
    assert!((splitting(&mp).delta_freq - map.delta_freq).abs() <= 1e-15);
    let tr = tunneling_trace(&mp, tau, 2).unwrap();
    assert!((tr.p_e3[1] - 1.0).abs() <= TOL_EIG);
    assert!(tr.leak.iter().all(|l| *l <= TOL_EIG));
}

#[test]
fn zeno_suppresses_transfer() {
    let mp = ModelParams::new(2.0, -0.25, 1.0, Sign::Minus, 0.5).unwrap();
    let r100 = zeno_run(&mp, 100).unwrap();
    assert!(r100.survival_exact >= 0.9756);
    assert!((r100.survival_exact - r100.survival_analytic).abs() <= TOL_EIG);
    let r10 = zeno_run(&mp, 10).unwrap();
    assert!((r10.survival_analytic - r10.survival_limit).abs() < 1e-3);
}
