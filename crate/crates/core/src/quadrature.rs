//! Adaptive Gauss-Kronrod (7/15) integration on a finite interval.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuadError {
    #[error("quadrature on [{a}, {b}] did not reach tolerance {tol:e} (estimated error {err:e})")]
    NotConverged { a: f64, b: f64, tol: f64, err: f64 },
    #[error("integrand is not finite near {0}")]
    NonFinite(f64),
}

pub const DEFAULT_TOL: f64 = 1e-9;
const MAX_DEPTH: u32 = 40;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (and the centre)
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Result<(f64, f64), QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (k, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let s = f(c - h * x) + f(c + h * x);
        kronrod += w * s;
        if k % 2 == 1 {
            gauss += WG[k / 2] * s;
        }
    }
    if !kronrod.is_finite() {
        return Err(QuadError::NonFinite(c));
    }
    Ok((kronrod * h, ((kronrod - gauss) * h).abs()))
}

/// `int_a^b f` to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64, QuadError> {
    if a == b {
        return Ok(0.0);
    }
    let (whole, err) = gk15(&f, a, b)?;
    refine(&f, a, b, whole, err, tol, 0)
}

fn refine(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    err: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, QuadError> {
    if err <= tol || err <= 1e-15 * whole.abs() {
        return Ok(whole);
    }
    if depth == MAX_DEPTH {
        return Err(QuadError::NotConverged { a, b, tol, err });
    }
    let m = 0.5 * (a + b);
    let (left, el) = gk15(f, a, m)?;
    let (right, er) = gk15(f, m, b)?;
    if el + er <= tol {
        return Ok(left + right);
    }
    Ok(refine(f, a, m, left, el, 0.5 * tol, depth + 1)?
        + refine(f, m, b, right, er, 0.5 * tol, depth + 1)?)
}

/// `int_0^t f` with the substitution `u = t w^2`, which absorbs an
/// integrable `u^(-1/2)`-type singularity at the origin.
pub fn integrate_from_zero(f: impl Fn(f64) -> f64, t: f64, tol: f64) -> Result<f64, QuadError> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    integrate(|w| f(t * w * w) * 2.0 * t * w, 0.0, 1.0, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 8.0).abs() < 1e-13);
    }

    #[test]
    fn smooth_transcendental() {
        let v = integrate(f64::sin, 0.0, std::f64::consts::PI, DEFAULT_TOL).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn root_singularity_at_origin() {
        let v = integrate_from_zero(|u| 0.5 / u.sqrt(), 0.25, DEFAULT_TOL).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        let v = integrate_from_zero(|u| u.powf(-0.25), 1.0, DEFAULT_TOL).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn reports_non_finite() {
        assert!(integrate(|x| 1.0 / (x - 0.5), 0.0, 1.0, DEFAULT_TOL).is_err());
    }
}
