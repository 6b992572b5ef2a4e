use approx::assert_abs_diff_eq;
use num_complex::Complex;
use proptest::prelude::*;

use super::*;

type C = Complex<f64>;

fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

fn pauli_x() -> ComplexMatrix<f64> {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
}

fn pauli_z() -> ComplexMatrix<f64> {
    ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
}

fn bell_phi_plus() -> ComplexMatrix<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
    ComplexMatrix::outer(&psi, &psi)
}

#[test]
fn identity_kron_identity() {
    let i2 = ComplexMatrix::<f64>::identity(2);
    let i4 = tensor_product(&i2, &i2).unwrap();
    assert_eq!(i4, ComplexMatrix::identity(4));
}

#[test]
fn x_kron_z_has_block_structure() {
    let xz = tensor_product(&pauli_x(), &pauli_z()).unwrap();
    let zero = ComplexMatrix::<f64>::zeros(2, 2);
    let z = pauli_z();
    for bi in 0..2 {
        for bj in 0..2 {
            let block = if bi == bj { &zero } else { &z };
            for k in 0..2 {
                for l in 0..2 {
                    assert_eq!(xz[(2 * bi + k, 2 * bj + l)], block[(k, l)]);
                }
            }
        }
    }
}

#[test]
fn kron_matches_four_index_definition() {
    let a = ComplexMatrix::from_vec(2, 2, vec![c(0.3, -1.2), c(2.0, 0.5), c(-0.7, 0.0), c(1.1, 0.9)]).unwrap();
    let b = ComplexMatrix::from_vec(
        2,
        3,
        vec![
            c(1.0, 1.0),
            c(0.0, -2.0),
            c(0.25, 0.0),
            c(-3.0, 0.5),
            c(0.6, 0.6),
            c(0.0, 1.0),
        ],
    )
    .unwrap();
    let ab = tensor_product(&a, &b).unwrap();
    assert_eq!((ab.rows(), ab.cols()), (4, 6));
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..3 {
                    assert_eq!(ab[(i * 2 + k, j * 3 + l)], a[(i, j)] * b[(k, l)]);
                }
            }
        }
    }
}

#[test]
fn kron_rejects_oversized_result() {
    let big = ComplexMatrix::<f64>::identity(1 << 8);
    let huge = ComplexMatrix::<f64>::identity(1 << 7);
    assert!(matches!(tensor_product(&big, &huge), Err(Error::TooLarge { .. })));
}

#[test]
fn bell_marginals_are_maximally_mixed() {
    let rho = bell_phi_plus();
    let half = ComplexMatrix::<f64>::identity(2).scale(0.5);
    for keep in [[0], [1]] {
        let r = partial_trace(&rho, &[2, 2], &keep).unwrap();
        assert!(r.max_abs_diff(&half) < 1e-15);
    }
}

#[test]
fn product_state_factorizes() {
    let rho_a = ComplexMatrix::from_vec(2, 2, vec![c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)]).unwrap();
    let rho_b = ComplexMatrix::from_vec(
        3,
        3,
        vec![
            c(0.5, 0.0),
            c(0.0, 0.1),
            c(0.0, 0.0),
            c(0.0, -0.1),
            c(0.25, 0.0),
            c(0.05, 0.0),
            c(0.0, 0.0),
            c(0.05, 0.0),
            c(0.25, 0.0),
        ],
    )
    .unwrap();
    let joint = tensor_product(&rho_a, &rho_b).unwrap();
    assert!(partial_trace(&joint, &[2, 3], &[0]).unwrap().max_abs_diff(&rho_a) < 1e-15);
    assert!(partial_trace(&joint, &[2, 3], &[1]).unwrap().max_abs_diff(&rho_b) < 1e-15);
}

#[test]
fn partial_trace_edge_cases() {
    let rho = bell_phi_plus();
    let scalar = partial_trace(&rho, &[2, 2], &[]).unwrap();
    assert_eq!((scalar.rows(), scalar.cols()), (1, 1));
    assert_abs_diff_eq!(scalar[(0, 0)].re, 1.0, epsilon = 1e-15);
    assert_eq!(partial_trace(&rho, &[2, 2], &[1, 0]).unwrap(), rho);
    assert!(matches!(
        partial_trace(&rho, &[2, 3], &[0]),
        Err(Error::DimensionMismatch(_))
    ));
    assert!(matches!(
        partial_trace(&rho, &[2, 2], &[2]),
        Err(Error::DimensionMismatch(_))
    ));
    assert!(matches!(
        partial_trace(&rho, &[2, 2], &[0, 0]),
        Err(Error::DimensionMismatch(_))
    ));
    let rect = ComplexMatrix::<f64>::zeros(2, 4);
    assert!(partial_trace(&rect, &[2, 2], &[0]).is_err());
}

#[test]
fn dagger_examples() {
    let i3 = ComplexMatrix::<f64>::identity(3);
    assert_eq!(dagger(&i3), i3);
    let m = ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
    let expected = ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0), c(0.0, 0.0)]).unwrap();
    assert_eq!(dagger(&m), expected);
    assert_eq!(dagger(&dagger(&m)), m);
}

#[test]
fn density_check_examples() {
    let mixed = ComplexMatrix::<f64>::identity(4).scale(0.25);
    assert!(is_density_matrix(&mixed, 1e-10));

    let report = density_check(&ComplexMatrix::<f64>::identity(2), 1e-10);
    assert!(!report.is_valid());
    assert_eq!(report.failure.unwrap().check(), "trace");
    assert_abs_diff_eq!(report.trace_error, 1.0, epsilon = 1e-15);

    let not_herm = ComplexMatrix::from_vec(2, 2, vec![c(0.5, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
    let report = density_check(&not_herm, 1e-10);
    assert_eq!(report.failure.unwrap().check(), "hermiticity");
    assert!(report.min_eigenvalue.is_none());

    let negative = ComplexMatrix::<f64>::from_diagonal(&[1.2, -0.2]);
    let report = density_check(&negative, 1e-10);
    match report.failure {
        Some(DensityFailure::Positivity(e)) => assert_abs_diff_eq!(e, -0.2, epsilon = 1e-14),
        other => panic!("expected positivity failure, got {other:?}"),
    }

    let rect = ComplexMatrix::<f64>::zeros(2, 3);
    assert_eq!(density_check(&rect, 1e-10).failure.unwrap().check(), "shape");
}

#[test]
fn constructors_reject_bad_input() {
    assert!(ComplexMatrix::<f64>::from_vec(2, 2, vec![c(0.0, 0.0); 3]).is_err());
    assert!(matches!(
        ComplexMatrix::<f64>::from_vec(1, 1, vec![c(f64::NAN, 0.0)]),
        Err(Error::NonFinite(_))
    ));
    assert!(PureState::<f64>::new(2, 1, vec![c(1.0, 0.0); 3]).is_err());
    assert!(PureState::<f64>::new(1, 0, vec![]).is_err());
    assert!(PureState::<f64>::new(1, 1, vec![c(f64::INFINITY, 0.0), c(0.0, 0.0)]).is_err());
    let mut zero = PureState::<f64>::from_real(1, &[0.0, 0.0]).unwrap();
    assert!(zero.normalize().is_err());
}

#[test]
fn normalize_gives_unit_norm() {
    let s = PureState::<f64>::from_real(2, &[1.0, 2.0, -3.0, 0.5])
        .unwrap()
        .normalized()
        .unwrap();
    assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-12);
}

#[test]
fn hermitian_eigenvalues_of_known_matrix() {
    // Pauli-Y has eigenvalues ±1.
    let y = ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
    let v = hermitian_eigenvalues(&y).unwrap();
    assert_abs_diff_eq!(v[0], -1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(v[1], 1.0, epsilon = 1e-14);

    let m = ComplexMatrix::from_vec(
        3,
        3,
        vec![
            c(2.0, 0.0),
            c(1.0, 1.0),
            c(0.0, 0.0),
            c(1.0, -1.0),
            c(3.0, 0.0),
            c(0.0, 2.0),
            c(0.0, 0.0),
            c(0.0, -2.0),
            c(1.0, 0.0),
        ],
    )
    .unwrap();
    let eig = hermitian_eigen(&m).unwrap();
    // Reconstruct V diag(λ) V† and compare.
    let lambda = ComplexMatrix::from_diagonal(&eig.values);
    let rebuilt = lambda.conjugate_by(&eig.vectors);
    assert!(rebuilt.max_abs_diff(&m) < 1e-13);
    let trace: f64 = eig.values.iter().sum();
    assert_abs_diff_eq!(trace, 6.0, epsilon = 1e-13);
}

#[test]
fn psd_sqrt_squares_back() {
    let m = ComplexMatrix::from_vec(2, 2, vec![c(0.6, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.4, 0.0)]).unwrap();
    let r = psd_sqrt(&m).unwrap();
    assert!(r.dot(&r).max_abs_diff(&m) < 1e-14);
}

#[test]
fn singular_values_of_rank_deficient_matrix() {
    // Outer product of two vectors: rank one, singular value |a|·|b|.
    let a = [c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0)];
    let b = [c(0.5, 0.5), c(2.0, 0.0), c(0.0, 0.0)];
    let m = ComplexMatrix::outer(&a, &b);
    let sv = singular_values(&m);
    let na: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    assert_abs_diff_eq!(sv[0], na * nb, epsilon = 1e-13);
    assert!(sv[1] < 1e-15 && sv[2] < 1e-15, "{sv:?}");
}

#[test]
fn reduced_density_matches_partial_trace_of_projector() {
    let amps: Vec<C> = (0..12)
        .map(|i| c((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
        .collect();
    let s = PureState::new(2, 3, amps).unwrap().normalized().unwrap();
    let rho = s.projector();
    for keep in [
        vec![0],
        vec![1],
        vec![2],
        vec![0, 1],
        vec![0, 2],
        vec![1, 2],
        vec![0, 1, 2],
    ] {
        let direct = s.reduced_density(&keep).unwrap();
        let traced = partial_trace(&rho, &s.dims(), &keep).unwrap();
        assert!(direct.max_abs_diff(&traced) < 1e-15);
    }
}

#[test]
fn f32_kron_and_trace() {
    let a = ComplexMatrix::<f32>::from_real_rows(&[&[0.25, 0.1], &[0.1, 0.75]]).unwrap();
    let ab = tensor_product(&a, &a).unwrap();
    assert!((ab.trace().re - 1.0).abs() < 1e-6);
    let back = partial_trace(&ab, &[2, 2], &[1]).unwrap();
    assert!(back.max_abs_diff(&a) < 1e-6);
}

fn matrix_strategy(dim: usize) -> impl Strategy<Value = ComplexMatrix<f64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim)
        .prop_map(move |v| ComplexMatrix::from_vec(dim, dim, v.into_iter().map(|(r, i)| c(r, i)).collect()).unwrap())
}

/// Random density matrix `A A† / tr(A A†)` on a register of the given dimensions.
fn density_strategy(dims: Vec<usize>) -> impl Strategy<Value = (Vec<usize>, ComplexMatrix<f64>)> {
    let d: usize = dims.iter().product();
    matrix_strategy(d).prop_map(move |a| {
        let rho = a.dot(&a.dagger());
        let tr = rho.trace().re;
        (dims.clone(), rho.scale(1.0 / tr))
    })
}

fn register_strategy() -> impl Strategy<Value = (Vec<usize>, ComplexMatrix<f64>)> {
    prop::collection::vec(1usize..=3, 1..=3).prop_flat_map(density_strategy)
}

proptest! {
    #[test]
    fn partial_trace_preserves_trace_and_hermiticity(
        (dims, rho) in register_strategy(),
        mask in 0u32..8,
    ) {
        let keep: Vec<usize> = (0..dims.len()).filter(|s| mask & (1 << s) != 0).collect();
        let out = partial_trace(&rho, &dims, &keep).unwrap();
        prop_assert!((out.trace() - rho.trace()).norm() < 1e-12);
        prop_assert!(out.hermiticity_error() < 1e-12);
    }

    #[test]
    fn kron_trace_is_multiplicative(a in matrix_strategy(2), b in matrix_strategy(3)) {
        let ab = tensor_product(&a, &b).unwrap();
        prop_assert!((ab.trace() - a.trace() * b.trace()).norm() < 1e-12);
    }

    #[test]
    fn sequential_and_joint_traces_agree((dims, rho) in density_strategy(vec![2, 3, 2])) {
        // Trace subsystem 2 then (what was) subsystem 0, versus both at once.
        let step = partial_trace(&rho, &dims, &[0, 1]).unwrap();
        let seq = partial_trace(&step, &[2, 3], &[1]).unwrap();
        let joint = partial_trace(&rho, &dims, &[1]).unwrap();
        prop_assert!(seq.max_abs_diff(&joint) < 1e-12);
    }

    #[test]
    fn random_density_matrices_pass_check((_dims, rho) in density_strategy(vec![2, 2])) {
        prop_assert!(is_density_matrix(&rho, 1e-10));
    }
}
