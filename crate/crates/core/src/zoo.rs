//! Named coupling models. Amplitude damping ships with closed forms for the
//! damped purity and the off-block bound.
//!
//! For the input `[[a, b], [conj b, c]]` damped at angle `theta`:
//!
//! ```text
//! bound     = 2|b|^2 sin^2 + 2 cos^2 sin^2 c^2
//! tr(out^2) = a^2 + sin^4 c^2 + 2 a c sin^2 + 2 |b|^2 cos^2 + cos^4 c^2
//! ```

use serde::Serialize;

use crate::channel::{self, CouplingModel};
use crate::error::Result;
use crate::linalg::{Complex, ComplexMatrix, ONE};
use crate::measurement;
use crate::state::{DensityMatrix, DENSITY_TOL};

/// Agreement required between numerical and closed-form values.
pub const CLOSED_FORM_TOL: f64 = 1e-10;

/// Slack allowed on the closed-form bound inequality.
pub const CLOSED_FORM_SLACK: f64 = 1e-12;

/// Qubit amplitude damping through a qubit environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeDamping {
    pub theta: f64,
}

impl AmplitudeDamping {
    pub fn new(theta: f64) -> Self {
        Self { theta }
    }

    pub fn model(&self) -> CouplingModel {
        ad_unitary(self.theta)
    }
}

/// The 4x4 coupling on `E (x) S`:
///
/// ```text
/// 1  0  0  0
/// 0  c  0 -s
/// 0  s  0  c
/// 0  0  1  0
/// ```
pub fn ad_unitary(theta: f64) -> CouplingModel {
    let (s, c) = theta.sin_cos();
    let mut u = ComplexMatrix::zeros(4, 4);
    u[(0, 0)] = ONE;
    u[(1, 1)] = Complex::new(c, 0.0);
    u[(1, 3)] = Complex::new(-s, 0.0);
    u[(2, 1)] = Complex::new(s, 0.0);
    u[(2, 3)] = Complex::new(c, 0.0);
    u[(3, 2)] = ONE;
    CouplingModel::new(u, 2, 2, 0).expect("amplitude damping coupling is unitary")
}

/// Validates `[[a, b], [conj b, c]]` as a density.
pub fn qubit_density(a: f64, b: Complex, c: f64) -> Result<DensityMatrix> {
    DensityMatrix::new(ComplexMatrix::from_rows(&[
        [Complex::new(a, 0.0), b],
        [b.conj(), Complex::new(c, 0.0)],
    ]))
}

/// Entries `(a, b, c)` of a qubit density.
pub fn qubit_entries(rho: &DensityMatrix) -> (f64, Complex, f64) {
    let m = rho.matrix();
    (m[(0, 0)].re, m[(0, 1)], m[(1, 1)].re)
}

pub fn ad_closed_form_bound(a: f64, b: Complex, c: f64, theta: f64) -> Result<f64> {
    qubit_density(a, b, c)?;
    let (s, co) = theta.sin_cos();
    let (s2, c2) = (s * s, co * co);
    Ok(2.0 * b.norm_sqr() * s2 + 2.0 * c2 * s2 * c * c)
}

pub fn ad_closed_form_purity(a: f64, b: Complex, c: f64, theta: f64) -> Result<f64> {
    qubit_density(a, b, c)?;
    let (s, co) = theta.sin_cos();
    let (s2, c2) = (s * s, co * co);
    Ok(a * a + s2 * s2 * c * c + 2.0 * a * c * s2 + 2.0 * b.norm_sqr() * c2 + c2 * c2 * c * c)
}

/// Purities of the two environment blocks of the measured joint state:
/// `a^2 + 2|b|^2 cos^2 + cos^4 c^2` and `sin^4 c^2`.
pub fn ad_closed_form_block_purities(a: f64, b: Complex, c: f64, theta: f64) -> Result<(f64, f64)> {
    qubit_density(a, b, c)?;
    let (s, co) = theta.sin_cos();
    let (s2, c2) = (s * s, co * co);
    Ok((a * a + 2.0 * b.norm_sqr() * c2 + c2 * c2 * c * c, s2 * s2 * c * c))
}

/// Numerical values beside their closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormReport {
    pub theta: f64,
    pub entropy: f64,
    pub closed_form_entropy: f64,
    pub bound: f64,
    pub closed_form_bound: f64,
    pub projected_entropy: f64,
    pub hypothesis_pure: bool,
    /// Numerical entropy matches the closed form.
    pub entropy_matches: bool,
    /// Numerical bound matches the closed form.
    pub bound_matches: bool,
    /// `h(out) <= closed-form bound`; claimed for pure input only.
    pub bound_holds: bool,
    /// Measured joint entropy equals the bound; claimed for pure input only.
    pub projection_matches_bound: bool,
}

impl ClosedFormReport {
    pub fn holds(&self) -> bool {
        let identities = self.entropy_matches && self.bound_matches;
        if self.hypothesis_pure {
            identities && self.bound_holds && self.projection_matches_bound
        } else {
            identities
        }
    }
}

pub fn ad_verify(a: f64, b: Complex, c: f64, theta: f64) -> Result<ClosedFormReport> {
    let rho = qubit_density(a, b, c)?;
    let model = ad_unitary(theta);
    let out = channel::apply_channel(&rho, &channel::extract_kraus(&model)?)?;
    let entropy = out.logical_entropy();
    let closed_form_entropy = 1.0 - ad_closed_form_purity(a, b, c, theta)?;
    let closed_form_bound = ad_closed_form_bound(a, b, c, theta)?;

    let joint = channel::couple(&rho, &model)?;
    let bound = channel::off_block_bound(&channel::block_decompose(&joint, 2, 2)?);
    let env = measurement::projectors_from_partition(&channel::environment_partition(2, 2), 4)?;
    let projected_entropy = measurement::project(&joint, &env)?.logical_entropy();

    Ok(ClosedFormReport {
        theta,
        entropy,
        closed_form_entropy,
        bound,
        closed_form_bound,
        projected_entropy,
        hypothesis_pure: rho.is_pure(DENSITY_TOL),
        entropy_matches: (entropy - closed_form_entropy).abs() < CLOSED_FORM_TOL,
        bound_matches: (bound - closed_form_bound).abs() < CLOSED_FORM_TOL,
        bound_holds: entropy <= closed_form_bound + CLOSED_FORM_SLACK,
        projection_matches_bound: (projected_entropy - closed_form_bound).abs() < CLOSED_FORM_TOL,
    })
}

/// Convenience wrapper taking a validated qubit density.
pub fn ad_verify_state(rho: &DensityMatrix, theta: f64) -> Result<ClosedFormReport> {
    let (a, b, c) = qubit_entries(rho);
    ad_verify(a, b, c, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dagger;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn b(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    #[test]
    fn unitary_at_zero_is_identity_on_env_zero_sector() {
        let u = ad_unitary(0.0);
        for s in 0..2 {
            for t in 0..2 {
                let expected = if s == t { ONE } else { Complex::new(0.0, 0.0) };
                assert_eq!(u.unitary()[(s, t)], expected);
            }
        }
        let rho = qubit_density(0.3, Complex::new(0.1, 0.2), 0.7).unwrap();
        let out = channel::apply_channel(&rho, &channel::extract_kraus(&u).unwrap()).unwrap();
        assert_eq!(out.matrix(), rho.matrix());
    }

    #[test]
    fn unitarity_at_arbitrary_theta() {
        let u = ad_unitary(1.234);
        assert!(u.unitary().unitarity_deviation().unwrap() < 1e-12);
    }

    #[test]
    fn kraus_operators_match_closed_form() {
        for theta in [0.0, 0.3, FRAC_PI_4, 2.0, -1.1] {
            let k = channel::extract_kraus(&ad_unitary(theta)).unwrap();
            let e0 = ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, theta.cos()]]);
            let e1 = ComplexMatrix::from_real_rows(&[[0.0, theta.sin()], [0.0, 0.0]]);
            assert!(k.ops()[0].max_abs_diff(&e0).unwrap() < 1e-15);
            assert!(k.ops()[1].max_abs_diff(&e1).unwrap() < 1e-15);
            assert_eq!(dagger(&k.ops()[1])[(1, 0)], Complex::new(theta.sin(), 0.0));
        }
    }

    #[test]
    fn coupled_state_matches_displayed_matrix() {
        let (a, bb, c) = (0.4, Complex::new(0.2, -0.3), 0.6);
        let theta: f64 = 0.9;
        let (s, co) = theta.sin_cos();
        let rho = qubit_density(a, bb, c).unwrap();
        let joint = channel::couple(&rho, &ad_unitary(theta)).unwrap();
        let z = Complex::new(0.0, 0.0);
        let r = |x: f64| Complex::new(x, 0.0);
        let expected = ComplexMatrix::from_rows(&[
            [r(a), bb * co, bb * s, z],
            [bb.conj() * co, r(co * co * c), r(co * s * c), z],
            [bb.conj() * s, r(s * co * c), r(s * s * c), z],
            [z, z, z, z],
        ]);
        assert!(joint.matrix().max_abs_diff(&expected).unwrap() < 1e-15);

        let blocks = channel::block_decompose(&joint, 2, 2).unwrap();
        let b01 = ComplexMatrix::from_rows(&[[bb * s, z], [r(co * s * c), z]]);
        assert!(blocks.block(0, 1).max_abs_diff(&b01).unwrap() < 1e-15);
        assert!(blocks.block(1, 0).max_abs_diff(&dagger(&b01)).unwrap() < 1e-15);
    }

    #[test]
    fn closed_form_bound_examples() {
        assert_eq!(ad_closed_form_bound(0.5, b(0.5), 0.5, 0.0).unwrap(), 0.0);
        assert!((ad_closed_form_bound(0.5, b(0.5), 0.5, FRAC_PI_2).unwrap() - 0.5).abs() < 1e-15);
        assert!((ad_closed_form_bound(0.5, b(0.5), 0.5, FRAC_PI_4).unwrap() - 0.375).abs() < 1e-15);
        assert!(ad_closed_form_bound(0.5, b(0.6), 0.5, 0.1).is_err());
    }

    #[test]
    fn closed_form_purity_examples() {
        let (a, bb, c) = (0.3, Complex::new(0.1, 0.2), 0.7);
        let p0 = ad_closed_form_purity(a, bb, c, 0.0).unwrap();
        assert!((p0 - (a * a + c * c + 2.0 * bb.norm_sqr())).abs() < 1e-15);
        assert!((ad_closed_form_purity(0.5, b(0.5), 0.5, FRAC_PI_4).unwrap() - 0.875).abs() < 1e-15);
        assert!((ad_closed_form_purity(0.5, b(0.5), 0.5, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        assert!(ad_closed_form_purity(1.0, b(0.0), 0.5, 0.0).is_err());
    }

    #[test]
    fn verify_sweep_on_plus_state() {
        for k in 0..64 {
            let theta = PI * k as f64 / 63.0;
            let r = ad_verify(0.5, b(0.5), 0.5, theta).unwrap();
            assert!(r.hypothesis_pure);
            assert!(r.holds(), "theta {theta}: {r:?}");
        }
    }

    #[test]
    fn verify_endpoints() {
        let r = ad_verify(0.5, b(0.5), 0.5, FRAC_PI_2).unwrap();
        assert!(r.entropy.abs() < 1e-15 && (r.bound - 0.5).abs() < 1e-15);

        let r = ad_verify(1.0, b(0.0), 0.0, 0.0).unwrap();
        assert_eq!(r.entropy, 0.0);
        assert_eq!(r.bound, 0.0);
    }

    #[test]
    fn mixed_input_only_claims_identities() {
        let r = ad_verify(0.5, b(0.0), 0.5, 0.0).unwrap();
        assert!(!r.hypothesis_pure);
        assert!(r.entropy_matches && r.bound_matches);
        assert!(!r.bound_holds);
        assert!(r.holds());
    }

    #[test]
    fn block_purities_match_measured_joint() {
        let (a, bb, c) = (0.2, Complex::new(0.25, 0.1), 0.8);
        let theta = 0.77;
        let rho = qubit_density(a, bb, c).unwrap();
        let joint = channel::couple(&rho, &ad_unitary(theta)).unwrap();
        let blocks = channel::block_decompose(&joint, 2, 2).unwrap();
        let (p1, p2) = ad_closed_form_block_purities(a, bb, c, theta).unwrap();
        assert!((blocks.block(0, 0).frobenius_sq() - p1).abs() < 1e-15);
        assert!((blocks.block(1, 1).frobenius_sq() - p2).abs() < 1e-15);
    }
}
