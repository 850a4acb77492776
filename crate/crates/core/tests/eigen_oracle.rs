use bellfoundry::quantum::{chsh_operator, hermitian_eigenvalues, CMatrix};
use bellfoundry::spin::{AxisQuad, SignChoice};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn reference_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.dim();
    let dm = DMatrix::from_fn(n, n, |i, j| m[(i, j)]);
    let mut ev: Vec<f64> = dm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn hermitian(n: usize, entries: &[(f64, f64)]) -> CMatrix {
    let mut m = CMatrix::zeros(n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            let (re, im) = entries[k];
            k += 1;
            if i == j {
                m[(i, i)] = Complex64::new(re, 0.0);
            } else {
                m[(i, j)] = Complex64::new(re, im);
                m[(j, i)] = Complex64::new(re, -im);
            }
        }
    }
    m
}

fn assert_close(got: &[f64], want: &[f64], scale: f64) {
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(want) {
        assert!(
            (g - w).abs() <= 1e-11 * scale.max(1.0),
            "{got:?} vs {want:?}"
        );
    }
}

#[test]
fn chsh_operator_spectrum_matches_reference() {
    let quads = [
        AxisQuad::tsirelson_optimal(),
        AxisQuad::from_radians(0.1, 1.3, 2.2, 4.0),
        AxisQuad::from_radians(0.0, 0.0, 0.0, 0.0),
        AxisQuad::from_radians(5.0, 0.4, 3.3, 3.3),
    ];
    for q in quads {
        for s in SignChoice::BOTH {
            let op = chsh_operator(&q, s);
            assert_close(&op.eigenvalues(), &reference_eigenvalues(op.matrix()), 1.0);
        }
    }
}

proptest! {
    #[test]
    fn random_hermitian_spectra_match_reference(
        n in 1usize..=6,
        entries in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 21),
    ) {
        let m = hermitian(n, &entries);
        assert_close(&hermitian_eigenvalues(&m), &reference_eigenvalues(&m), m.max_abs());
    }
}
