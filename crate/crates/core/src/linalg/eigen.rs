use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Hermitian,
    Unitary,
}

/// Eigenvalues with orthonormal eigenvectors stored as matrix columns.
///
/// Hermitian decompositions are sorted by ascending eigenvalue, unitary ones by
/// ascending phase in `[0, 1)`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: ComplexMatrix,
    pub kind: SpectrumKind,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Real parts of the eigenvalues; exact for the Hermitian case.
    pub fn real_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }

    /// Eigenphases `arg(λ)/2π` reduced to `[0, 1)`.
    pub fn phases(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|&z| phase_of(z)).collect()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    /// `Σ_k λ_k v_k v_k†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                out[(r, c)] = (0..n).map(|k| self.eigenvalues[k] * v[(r, k)] * v[(c, k)].conj()).sum();
            }
        }
        out
    }
}

/// Phase of a nonzero complex number as a fraction of a full turn, in `[0, 1)`.
pub(crate) fn phase_of(z: Complex64) -> f64 {
    let p = z.arg() / TAU;
    let p = if p < 0.0 { p + 1.0 } else { p };
    if p >= 1.0 {
        0.0
    } else {
        p
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<SpectralDecomposition> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let deviation = a.hermitian_deviation();
    if deviation > tolerance::HERMITIAN {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(jacobi(a))
}

fn jacobi(input: &ComplexMatrix) -> SpectralDecomposition {
    let n = input.rows();
    let mut a = input.clone();
    // enforce exact symmetry so rotations see a genuinely Hermitian matrix
    for r in 0..n {
        a[(r, r)] = Complex64::new(a[(r, r)].re, 0.0);
        for c in r + 1..n {
            let avg = (a[(r, c)] + a[(c, r)].conj()) * 0.5;
            a[(r, c)] = avg;
            a[(c, r)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let threshold = tolerance::JACOBI_OFF_DIAGONAL * input.frobenius_norm();

    for _ in 0..tolerance::JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| a[(r, c)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 || r < 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let cos = 1.0 / (t * t + 1.0).sqrt();
                let sin = t * cos;
                // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
                let g_pp = Complex64::new(cos, 0.0);
                let g_pq = Complex64::new(sin, 0.0);
                let g_qp = -phase.conj() * sin;
                let g_qq = phase.conj() * cos;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(app - t * r, 0.0);
                a[(q, q)] = Complex64::new(aqq + t * r, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| Complex64::new(a[(i, i)].re, 0.0)).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &v.column(src));
    }
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        kind: SpectrumKind::Hermitian,
    }
}

/// Eigendecomposition of a unitary matrix.
///
/// The Hermitian part `(U + U†)/2` is diagonalized first; inside each of its
/// eigenspaces the anti-Hermitian part `(U − U†)/2i` separates conjugate pairs
/// `e^{±iθ}`. Eigenvectors stay orthonormal under arbitrary degeneracy.
pub fn unitary_eig(u: &ComplexMatrix) -> Result<SpectralDecomposition> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch {
            expected: u.rows(),
            found: u.cols(),
        });
    }
    let deviation = u.unitary_deviation();
    if deviation > tolerance::UNITARY {
        return Err(Error::NotUnitary { deviation });
    }
    let n = u.rows();
    let (re_part, im_part) = u.hermitian_parts();
    let stage_one = jacobi(&re_part);
    let cosines = stage_one.real_eigenvalues();

    let mut vectors = ComplexMatrix::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && cosines[end] - cosines[end - 1] <= tolerance::DEGENERACY_GAP {
            end += 1;
        }
        let width = end - start;
        if width == 1 {
            vectors.set_column(start, &stage_one.eigenvector(start));
        } else {
            let mut basis = ComplexMatrix::zeros(n, width);
            for (c, k) in (start..end).enumerate() {
                basis.set_column(c, &stage_one.eigenvector(k));
            }
            let restricted = &(&basis.adjoint() * &im_part) * &basis;
            let stage_two = jacobi(&restricted);
            let rotated = &basis * &stage_two.eigenvectors;
            for c in 0..width {
                vectors.set_column(start + c, &rotated.column(c));
            }
        }
        start = end;
    }

    let mut pairs: Vec<(f64, Complex64, Vec<Complex64>)> = (0..n)
        .map(|k| {
            let v = vectors.column(k);
            let uv = u.mul_vec(&v);
            let lambda: Complex64 = v.iter().zip(&uv).map(|(a, b)| a.conj() * b).sum();
            let lambda = if lambda.norm() > 0.0 {
                lambda / lambda.norm()
            } else {
                ONE
            };
            (phase_of(lambda), lambda, v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    let mut eigenvalues = Vec::with_capacity(n);
    for (k, (_, lambda, v)) in pairs.into_iter().enumerate() {
        eigenvalues.push(lambda);
        eigenvectors.set_column(k, &v);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        kind: SpectrumKind::Unitary,
    })
}

/// `e^{i·scale·H}` for Hermitian `H`, via its eigendecomposition.
pub fn exp_i_hermitian(h: &ComplexMatrix, scale: f64) -> Result<ComplexMatrix> {
    let decomposition = hermitian_eig(h)?;
    let n = h.rows();
    let v = &decomposition.eigenvectors;
    let phases: Vec<Complex64> = decomposition
        .eigenvalues
        .iter()
        .map(|l| Complex64::from_polar(1.0, scale * l.re))
        .collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out[(r, c)] = (0..n).map(|k| v[(r, k)] * phases[k] * v[(c, k)].conj()).sum();
        }
    }
    Ok(out)
}

/// Largest singular value, from the top eigenvalue of `A†A`.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    let gram = &a.adjoint() * a;
    let decomposition = jacobi(&gram);
    decomposition.eigenvalues.last().map_or(0.0, |l| l.re.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inner, tensor};
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    fn shift(n: usize, corner: f64) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        for j in 1..n {
            m[(j, j - 1)] = ONE;
        }
        m[(0, n - 1)] = Complex64::new(corner, 0.0);
        m
    }

    fn circular(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(1.0);
        d.min(1.0 - d)
    }

    #[test]
    fn pauli_z_spectrum() {
        let d = hermitian_eig(&pauli_z()).unwrap();
        assert_eq!(d.real_eigenvalues(), vec![-1.0, 1.0]);
    }

    #[test]
    fn pauli_x_spectrum_and_vectors() {
        let d = hermitian_eig(&pauli_x()).unwrap();
        let vals = d.real_eigenvalues();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let minus = [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)];
        let plus = [Complex64::new(s, 0.0), Complex64::new(s, 0.0)];
        assert!((inner(&minus, &d.eigenvector(0)).norm() - 1.0).abs() < 1e-12);
        assert!((inner(&plus, &d.eigenvector(1)).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_hermitian_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random::hermitian(16, &mut rng);
        let d = hermitian_eig(&a).unwrap();
        for k in 0..16 {
            let v = d.eigenvector(k);
            let av = a.mul_vec(&v);
            let residual: f64 = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - y * d.eigenvalues[k]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(residual < 1e-9, "residual {residual}");
        }
        let recon = &d.reconstruct() - &a;
        assert!(recon.frobenius_norm() <= 1e-9 * a.frobenius_norm());
        let gram = &d.eigenvectors.adjoint() * &d.eigenvectors;
        assert!((&gram - &ComplexMatrix::identity(16)).max_abs() < 1e-10);
        let vals = d.real_eigenvalues();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
        assert!(matches!(unitary_eig(&m), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn unitary_z_phases() {
        let d = unitary_eig(&pauli_z()).unwrap();
        assert_eq!(d.phases(), vec![0.0, 0.5]);
    }

    #[test]
    fn shift_operators_have_root_of_unity_spectra() {
        for n in [3usize, 4, 5] {
            let cyclic = unitary_eig(&shift(n, 1.0)).unwrap().phases();
            let anti = unitary_eig(&shift(n, -1.0)).unwrap().phases();
            for k in 0..n {
                assert!(circular(cyclic[k], k as f64 / n as f64) < 1e-10);
                assert!(circular(anti[k], (k as f64 + 0.5) / n as f64) < 1e-10);
            }
        }
    }

    #[test]
    fn degenerate_unitary_keeps_orthonormal_basis() {
        // Z ⊗ Z ⊗ X has every eigenvalue fourfold degenerate
        let u = tensor(&tensor(&pauli_z(), &pauli_z()), &pauli_x());
        let d = unitary_eig(&u).unwrap();
        let gram = &d.eigenvectors.adjoint() * &d.eigenvectors;
        assert!((&gram - &ComplexMatrix::identity(8)).max_abs() < 1e-10);
        assert!((&d.reconstruct() - &u).max_abs() < 1e-10);
        for l in &d.eigenvalues {
            assert!((l.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn exp_of_zero_and_z() {
        let zero = ComplexMatrix::zeros(3, 3);
        assert!((&exp_i_hermitian(&zero, 2.7).unwrap() - &ComplexMatrix::identity(3)).max_abs() < 1e-15);
        let e = exp_i_hermitian(&pauli_z(), std::f64::consts::PI).unwrap();
        let minus_i = ComplexMatrix::identity(2).scale_real(-1.0);
        assert!((&e - &minus_i).max_abs() < 1e-14);
    }

    #[test]
    fn exp_inverse_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = random::hermitian(8, &mut rng);
        let forward = exp_i_hermitian(&h, 0.83).unwrap();
        let backward = exp_i_hermitian(&h, -0.83).unwrap();
        assert!(forward.is_unitary(1e-10));
        assert!((&(&forward * &backward) - &ComplexMatrix::identity(8)).max_abs() < 1e-10);
    }

    #[test]
    fn operator_norm_cases() {
        assert!((operator_norm(&ComplexMatrix::identity(4)) - 1.0).abs() < 1e-12);
        let d = ComplexMatrix::diagonal(&[Complex64::new(3.0, 0.0), Complex64::new(0.0, -4.0)]);
        assert!((operator_norm(&d) - 4.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random::complex_matrix(6, 6, &mut rng);
        let u = random::unitary(6, &mut rng);
        let na = operator_norm(&a);
        assert!((operator_norm(&(&u * &a)) - na).abs() < 1e-8 * na);
    }

    #[test]
    fn exp_phases_match_eigenvalues_mod_two_pi() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = random::hermitian(6, &mut rng);
        let h = h.scale_real(2.5 / operator_norm(&h));
        let expected: Vec<f64> = hermitian_eig(&h)
            .unwrap()
            .real_eigenvalues()
            .iter()
            .map(|l| (l / TAU).rem_euclid(1.0))
            .collect();
        let phases = unitary_eig(&exp_i_hermitian(&h, 1.0).unwrap()).unwrap().phases();
        let mut expected = expected;
        expected.sort_by(f64::total_cmp);
        for (a, b) in expected.iter().zip(&phases) {
            assert!(circular(*a, *b) < 1e-8 / TAU);
        }
    }
}
