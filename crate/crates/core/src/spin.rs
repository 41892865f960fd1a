//! Two-level operator algebra and the y-axis spin rotation between the lab
//! basis and the quasi-spin (R) basis.
//!
//! Basis order is (excited |2⟩, ground |1⟩) throughout, so S_z = diag(½, −½)
//! and S⁺ = |2⟩⟨1| is the upper off-diagonal entry.

use nalgebra::Matrix2;
use num_complex::Complex64;

pub type Mat2 = Matrix2<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const HALF: Complex64 = Complex64::new(0.5, 0.0);

pub fn s_z() -> Mat2 {
    Mat2::new(HALF, ZERO, ZERO, -HALF)
}

pub fn s_plus() -> Mat2 {
    Mat2::new(ZERO, ONE, ZERO, ZERO)
}

pub fn s_minus() -> Mat2 {
    Mat2::new(ZERO, ZERO, ONE, ZERO)
}

pub fn commutator(a: &Mat2, b: &Mat2) -> Mat2 {
    a * b - b * a
}

/// Old and new quasi-spin operators, all written in the lab basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinOps {
    pub sz: Mat2,
    pub splus: Mat2,
    pub sminus: Mat2,
    pub rz: Mat2,
    pub rplus: Mat2,
    pub rminus: Mat2,
}

impl SpinOps {
    /// R_z = S_z cos2θ − (S⁺+S⁻) sin2θ/2,
    /// R⁺ = S⁺cos²θ − S⁻sin²θ + S_z sin2θ, R⁻ = (R⁺)†.
    pub fn at(theta: f64) -> SpinOps {
        let (sz, sp, sm) = (s_z(), s_plus(), s_minus());
        let (s2, c2) = (2.0 * theta).sin_cos();
        let (s, c) = theta.sin_cos();
        let re = |v: f64| Complex64::new(v, 0.0);
        let rz = sz * re(c2) - (sp + sm) * re(0.5 * s2);
        let rplus = sp * re(c * c) - sm * re(s * s) + sz * re(s2);
        SpinOps {
            sz,
            splus: sp,
            sminus: sm,
            rz,
            rplus,
            rminus: rplus.adjoint(),
        }
    }
}

/// Real orthogonal W with W S_z Wᵀ = R_z and W S⁺ Wᵀ = R⁺.
pub fn frame_rotation(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    let re = |v: f64| Complex64::new(v, 0.0);
    Mat2::new(re(c), re(s), re(-s), re(c))
}

/// Lab-basis density matrix expressed in the R basis.
pub fn to_rotated(rho_lab: &Mat2, theta: f64) -> Mat2 {
    let w = frame_rotation(theta);
    w.transpose() * rho_lab * w
}

/// R-basis density matrix expressed in the lab basis.
pub fn to_lab(rho_rot: &Mat2, theta: f64) -> Mat2 {
    let w = frame_rotation(theta);
    w * rho_rot * w.transpose()
}

/// Largest elementwise |A − A†|.
pub fn hermiticity_residual(m: &Mat2) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Smaller eigenvalue of the Hermitian part of a 2×2 matrix.
pub fn min_eigenvalue(m: &Mat2) -> f64 {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    mean - radius
}

pub(crate) fn pack(m: &Mat2) -> [f64; 8] {
    [
        m[(0, 0)].re,
        m[(0, 0)].im,
        m[(0, 1)].re,
        m[(0, 1)].im,
        m[(1, 0)].re,
        m[(1, 0)].im,
        m[(1, 1)].re,
        m[(1, 1)].im,
    ]
}

pub(crate) fn unpack(v: &[f64; 8]) -> Mat2 {
    Mat2::new(
        Complex64::new(v[0], v[1]),
        Complex64::new(v[2], v[3]),
        Complex64::new(v[4], v[5]),
        Complex64::new(v[6], v[7]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() < tol)
    }

    #[test]
    fn reduces_to_bare_operators_at_zero() {
        let ops = SpinOps::at(0.0);
        assert_eq!(ops.rz, ops.sz);
        assert_eq!(ops.rplus, ops.splus);
        assert_eq!(ops.rminus, ops.sminus);
    }

    #[test]
    fn rotation_maps_bare_onto_rotated_operators() {
        for &theta in &[-0.7, -0.1, 0.2, 0.3374, 0.9] {
            let ops = SpinOps::at(theta);
            let w = frame_rotation(theta);
            assert!(close(&(w * ops.sz * w.transpose()), &ops.rz, 1e-15));
            assert!(close(&(w * ops.splus * w.transpose()), &ops.rplus, 1e-15));
        }
    }

    #[test]
    fn frame_round_trip() {
        let rho = Mat2::new(
            Complex64::new(0.7, 0.0),
            Complex64::new(0.1, 0.2),
            Complex64::new(0.1, -0.2),
            Complex64::new(0.3, 0.0),
        );
        let back = to_lab(&to_rotated(&rho, 0.41), 0.41);
        assert!(close(&back, &rho, 1e-15));
        assert_eq!(unpack(&pack(&rho)), rho);
    }

    #[test]
    fn eigen_and_hermiticity() {
        let rho = Mat2::new(HALF, HALF, HALF, HALF);
        assert!(min_eigenvalue(&rho).abs() < 1e-15);
        assert_eq!(hermiticity_residual(&rho), 0.0);
        let skew = Mat2::new(ZERO, ONE, ZERO, ZERO);
        assert_eq!(hermiticity_residual(&skew), 1.0);
    }
}
