//! Vector fields of the `(x, eta = 1/theta)` form of the diffusion, their
//! Lie bracket, and the rank condition that gives the process a smooth
//! transition density despite its degenerate noise.
//!
//! The drift field needs a smooth stand-in for `|x|`; we use
//! `g_eps(x) = sqrt(x^2 + eps^2)`, which is smooth, >= |x|, within
//! `eps^2 / (2|x|)` of it away from the origin, and has closed-form
//! derivatives. The fields are
//!
//! ```text
//! A0(x, eta) = ( -x / (2 eta^2), -p eta + g_eps(x) / sqrt(2 pi) )
//! A1(x, eta) = ( 1 / eta, 0 )
//! ```
//!
//! and the bracket, with the Frechet convention `[V, W] = DV W - DW V`,
//! works out to
//!
//! ```text
//! [A0, A1] = ( -1/(2 eta^3) - p/eta + g_eps(x)/(sqrt(2 pi) eta^2),
//!              g'_eps(x) / (sqrt(2 pi) eta) )
//! ```
//!
//! so `det [A1 | [A0, A1]] = g'_eps(x) / (sqrt(2 pi) eta^2)`, which vanishes
//! on the line x = 0. The rank-2 condition therefore needs the drift field
//! in the generating list: at x = 0 its eta-component `-p eta + eps/sqrt(2
//! pi)` is nonzero (away from eta = eps/(p sqrt(2 pi))) and restores the
//! span. Every closed form here is cross-checked against central-difference
//! Jacobians assembled into the same bracket.

use std::sync::Arc;

use crate::diffusion::SQRT_2PI;
use crate::error::{Error, Result};

/// Smoothing width of `g_eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierParams {
    pub epsilon: f64,
}

impl MollifierParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::Config(format!(
                "epsilon must be > 0, got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }
}

/// Smooth approximant of |x|: `sqrt(x^2 + eps^2)`.
pub fn g_eps(x: f64, params: MollifierParams) -> f64 {
    let e = params.epsilon;
    (x * x + e * e).sqrt()
}

/// Derivative of [`g_eps`]: `x / sqrt(x^2 + eps^2)`, tending to sign(x).
pub fn g_eps_prime(x: f64, params: MollifierParams) -> f64 {
    let e = params.epsilon;
    x / (x * x + e * e).sqrt()
}

type FieldFn = Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>;

/// A named vector field on the half-plane eta > 0.
#[derive(Clone)]
pub struct VectorField2 {
    name: String,
    f: FieldFn,
}

impl VectorField2 {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64, f64) -> (f64, f64) + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64, eta: f64) -> Result<(f64, f64)> {
        if eta.is_nan() || eta <= 0.0 {
            return Err(Error::FieldDomain {
                name: self.name.clone(),
                eta,
            });
        }
        let (a, b) = (self.f)(x, eta);
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::FieldValue {
                name: self.name.clone(),
                x,
                eta,
            });
        }
        Ok((a, b))
    }
}

impl std::fmt::Debug for VectorField2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VectorField2").field("name", &self.name).finish()
    }
}

/// Mollified drift field `A0`.
pub fn field_a0(p: f64, params: MollifierParams) -> VectorField2 {
    VectorField2::new("A0", move |x, eta| {
        (
            -x / (2.0 * eta * eta),
            -p * eta + g_eps(x, params) / SQRT_2PI,
        )
    })
}

/// Diffusion field `A1 = (1/eta, 0)`.
pub fn field_a1() -> VectorField2 {
    VectorField2::new("A1", |_, eta| (1.0 / eta, 0.0))
}

/// Closed-form bracket `[A0, A1] = DA0 A1 - DA1 A0`.
pub fn lie_bracket_closed(p: f64, params: MollifierParams) -> VectorField2 {
    VectorField2::new("[A0,A1]", move |x, eta| {
        (
            -1.0 / (2.0 * eta * eta * eta) - p / eta
                + g_eps(x, params) / (SQRT_2PI * eta * eta),
            g_eps_prime(x, params) / (SQRT_2PI * eta),
        )
    })
}

fn fd_jacobian(field: &VectorField2, x: f64, eta: f64, h: f64) -> Result<[[f64; 2]; 2]> {
    if eta - h <= 0.0 {
        return Err(Error::StencilDomain { eta, h });
    }
    let (fxp, gxp) = field.eval(x + h, eta)?;
    let (fxm, gxm) = field.eval(x - h, eta)?;
    let (fep, gep) = field.eval(x, eta + h)?;
    let (fem, gem) = field.eval(x, eta - h)?;
    Ok([
        [(fxp - fxm) / (2.0 * h), (fep - fem) / (2.0 * h)],
        [(gxp - gxm) / (2.0 * h), (gep - gem) / (2.0 * h)],
    ])
}

/// Finite-difference bracket `DV W - DW V` from central-difference
/// Jacobians; the independent oracle for [`lie_bracket_closed`].
pub fn lie_bracket_fd(
    v: &VectorField2,
    w: &VectorField2,
    at: (f64, f64),
    h: f64,
) -> Result<(f64, f64)> {
    let (x, eta) = at;
    let dv = fd_jacobian(v, x, eta, h)?;
    let dw = fd_jacobian(w, x, eta, h)?;
    let vv = v.eval(x, eta)?;
    let wv = w.eval(x, eta)?;
    Ok((
        dv[0][0] * wv.0 + dv[0][1] * wv.1 - (dw[0][0] * vv.0 + dw[0][1] * vv.1),
        dv[1][0] * wv.0 + dv[1][1] * wv.1 - (dw[1][0] * vv.0 + dw[1][1] * vv.1),
    ))
}

/// Determinant of the 2x2 matrix [v | w] evaluated at a point.
pub fn pair_determinant(v: &VectorField2, w: &VectorField2, at: (f64, f64)) -> Result<f64> {
    let a = v.eval(at.0, at.1)?;
    let b = w.eval(at.0, at.1)?;
    Ok(a.0 * b.1 - a.1 * b.0)
}

/// Outcome of a span check at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpanCheck {
    pub rank2: bool,
    /// Smallest over largest singular value of the stacked field matrix.
    pub smin_ratio: f64,
}

/// Stack the evaluated fields into a 2 x k matrix and decide rank 2 by the
/// singular-value ratio: `smin > tol * smax`. Determinant signs are
/// scale-fragile near x = 0, where the honest margin is O(eps).
pub fn span_check(fields: &[VectorField2], at: (f64, f64), tol: f64) -> Result<SpanCheck> {
    let (x, eta) = at;
    // Gram matrix of the 2 x k stack: singular values are the square roots
    // of its eigenvalues.
    let (mut a, mut b, mut c) = (0.0f64, 0.0f64, 0.0f64);
    for field in fields {
        let (v0, v1) = field.eval(x, eta)?;
        a += v0 * v0;
        b += v0 * v1;
        c += v1 * v1;
    }
    let half_trace = 0.5 * (a + c);
    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let smax = (half_trace + disc).max(0.0).sqrt();
    let smin = (half_trace - disc).max(0.0).sqrt();
    let smin_ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    Ok(SpanCheck {
        rank2: smin_ratio > tol,
        smin_ratio,
    })
}

/// Ito-to-Stratonovich drift correction for this system's diffusion matrix
/// `sigma = [[1/eta, 0], [0, 0]]`:
/// `c_i = (1/2) sum_{j,k} (d sigma_ij / d y_k) sigma_kj`.
/// `sigma_11` depends only on eta while row 2 vanishes, so every term
/// contains a zero factor and the two drift conventions coincide.
pub fn stratonovich_drift_correction(_x: f64, eta: f64) -> (f64, f64) {
    let d_sigma11_dx = 0.0;
    let d_sigma11_deta = -1.0 / (eta * eta);
    let sigma11 = 1.0 / eta;
    let sigma21 = 0.0;
    // Row 1: j = 1 contributes d(sigma_11)/dx * sigma_11 + d(sigma_11)/deta
    // * sigma_21; the j = 2 column of sigma is identically zero.
    let c1 = 0.5 * (d_sigma11_dx * sigma11 + d_sigma11_deta * sigma21);
    // Row 2 of sigma is zero, so its derivatives vanish.
    let c2 = 0.0;
    (c1, c2)
}
