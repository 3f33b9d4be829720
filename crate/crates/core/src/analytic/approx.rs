//! Printed approximations of λ₋ for the write phase.

use crate::error::{Error, Result};
use crate::model::SystemParams;

/// Small-time form `½[1 − 2g²t² + ⅔ g²(Γn)t³]`.
///
/// Its minimum sits at `t* = 2/(Γn)` with `λ₋(t*) = ½[1 − (8/3)(g/Γn)²]`.
pub fn lambda_minus_cubic(g: f64, gamma_ac: f64, n_th: f64, t: f64) -> f64 {
    let g2 = g * g;
    0.5 * (1.0 - 2.0 * g2 * t * t + 2.0 / 3.0 * g2 * gamma_ac * n_th * t.powi(3))
}

/// Peak log-negativity estimate `−ln[1 − 2(g/Γn)²]`.
pub fn en_max(g: f64, gamma_ac: f64, n_th: f64) -> Result<f64> {
    if g == 0.0 {
        return Ok(0.0);
    }
    let x = 2.0 * (g / (gamma_ac * n_th)).powi(2);
    // The boundary itself is excluded, allowing for rounding in x.
    if !(x < 1.0 - 4.0 * f64::EPSILON) {
        return Err(Error::HeatingDominates(x));
    }
    Ok(-(-x).ln_1p())
}

/// Rational approximant `½ X/Y` for the phase-matched case, with X of
/// degree 11 and Y of degree 12 in t.
pub fn lambda_minus_rational(g: f64, gamma_ac: f64, n_th: f64, t: f64) -> f64 {
    let (gg, big) = (g, gamma_ac);
    let heat = big * n_th;
    let g2 = gg * gg;
    let g4 = g2 * g2;
    let g6 = g4 * g2;
    let g8 = g4 * g4;
    let tp = |k: i32| t.powi(k);
    let x = 1.0
        + big * (heat - gg) / (2.0 * gg) * t
        + (g2 - big * big * n_th) * tp(2)
        + gg * (2.0 * gg + 3.0 * big) / 3.0 * heat * tp(3)
        + g2 * (g2 - 4.0 * big * big * n_th) / 3.0 * tp(4)
        + 4.0 * g4 * (6.0 * gg + 5.0 * big) / (15.0 * (2.0 * gg - big)) * heat * tp(5)
        + 2.0 * g4 * (g2 - 24.0 * big * big * n_th) / 45.0 * tp(6)
        + g6 / 3.0 * heat * tp(7)
        + g8 / 315.0 * tp(8)
        + 4.0 * g8 / 45.0 * heat * tp(9)
        + g8 * g2 / 50.0 * heat * tp(11);
    let gt2 = g2 * t * t;
    let y = 1.0
        + 3.0 * gg * (2.0 * gg + big) / 2.0 * tp(2)
        + (2.0 * gg + big) * g2 * gg * tp(4)
            * (4.0 / 3.0 + 11.0 / 15.0 * gt2 + gt2 * gt2 / 5.0 + gt2 * gt2 * gt2 / 26.0);
    0.5 * x / y
}

/// `λ₋ ≈ |V₁₄²V₃₃ − V₁₁V₃₃²| / (V₃₃² + V₁₄²)` from phase-insensitive elements.
pub fn lambda_minus_from_elements(v11: f64, v14: f64, v33: f64) -> f64 {
    (v14 * v14 * v33 - v11 * v33 * v33).abs() / (v33 * v33 + v14 * v14)
}

/// Strong-coupling (`g ≫ Γ ≫ γ`) approximations of `(V₁₁, V₁₄, V₃₃)`.
///
/// Each element is `η₁e^{α₁t} + η₂e^{α₄t} + η₃e^{−(γ+Γ)t/2} + η₄`. Requires
/// `Δ = g² + (Γ−γ)²/16 − (Δa+Δb)²/4 > 0`.
pub fn covariance_elements_strongcoupling(params: &SystemParams, t: f64) -> Result<(f64, f64, f64)> {
    let (gam, big, g) = (params.gamma, params.gamma_ac, params.g);
    let n = params.n_th();
    let (da, db) = params.detunings();
    let (sg, dg) = (gam + big, big - gam);
    let dl = g * g + dg * dg / 16.0 - (da + db).powi(2) / 4.0;
    if !(dl > 0.0) || g == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "strong-coupling elements need g² + (Γ−γ)²/16 − (Δa+Δb)²/4 > 0, got {dl:e}"
        )));
    }
    let a = (dl * dl + dg * dg * (da + db).powi(2) / 16.0).sqrt();
    let split = 2.0 * ((a + dl) / 2.0).sqrt();
    let (alpha1, alpha4) = (-sg / 2.0 - split, -sg / 2.0 + split);
    let s = dl.sqrt();
    let m = 2.0 * n + 1.0;

    let e11 = g * g * (1.0 + n) / (4.0 * dl) * (1.0 + dg / (2.0 * g) - (2.0 * big + big * dg / g) / (4.0 * s + sg));
    let q = ((g - dg / 4.0).powi(2) + (dg / 4.0).powi(2)) / (g * g);
    let e12 = g * g / (8.0 * dl) * (1.0 + q * m + 2.0 * q / (4.0 * s - sg) * big * m);
    let e13 = -(big + dg * n) / (2.0 * dl * sg) * g * g;
    let e14 = m * big * g * g * (16.0 * dl + sg * (big - 3.0 * gam)) / (32.0 * dl * dl * sg);

    let e21 = g / (8.0 * dl) * (dg * n / 2.0 + 2.0 * s * (n + 1.0) - big * m / 2.0 * (4.0 * s + dg) / (4.0 * s + sg));
    let e22 = -g / (8.0 * dl) * (-dg * n / 2.0 + 2.0 * s * (n + 1.0) + big * m / 2.0 * (4.0 * s - dg) / (4.0 * s - sg));
    let e23 = g / (8.0 * dl) * (-dg * n + (big * big - gam * gam) * big * m / (sg * sg));
    let e24 = gam * big * g * m / (4.0 * dl * sg);

    let e31 = g * g / (8.0 * dl) * (2.0 * (n + 1.0) - dg / (2.0 * g) - 2.0 * (gam + big * m) / (4.0 * s + sg));
    let e32 = g * g / (8.0 * dl) * (2.0 * (n + 1.0) + dg / (2.0 * g) + 2.0 * (gam + big * m) / (4.0 * s + sg));
    let e33 = g * g * dg * (1.0 + n) / (2.0 * dl * sg);
    let e34 = -g * g * (big * m - gam) * (16.0 * dl + sg * sg) / (32.0 * dl * dl * sg);

    let (x1, x4, x0) = ((alpha1 * t).exp(), (alpha4 * t).exp(), (-sg * t / 2.0).exp());
    let v33 = e11 * x1 + e12 * x4 + e13 * x0 + e14;
    let v14 = e21 * x1 + e22 * x4 + e23 * x0 + e24;
    let v11 = e31 * x1 + e32 * x4 + e33 * x0 + e34;
    Ok((v11, v14, v33))
}

/// Room-temperature small-time approximations of `(V₁₁, V₁₄, V₃₃)`.
pub fn covariance_elements_room(params: &SystemParams, t: f64) -> (f64, f64, f64) {
    let (gam, big, g) = (params.gamma, params.gamma_ac, params.g);
    let n = params.n_th();
    let (da, db) = params.detunings();
    let dg = big - gam;
    let dl = g * g + dg * dg / 16.0 - (da + db).powi(2) / 4.0;
    let m = 2.0 * n + 1.0;
    let g2 = g * g;
    let e = (-(gam + big) * t / 2.0).exp();
    let v11 = 0.25 * (2.0 + dg * t + 4.0 * g2 * (n + 1.0) * t * t + 4.0 / 3.0 * g2 * (n + 1.0) * dl * t.powi(4)) * e
        + gam * g2 / (2.0 * dl) * t
        + big * g2 * m / 6.0 * t.powi(3);
    let v33 = (0.5 - dg / 4.0 * t + (n + 1.0) / m * g2 * t * t) * m * e + big * m / 2.0 * t
        - g2 * big * big * m / (4.0 * dl) * t * t;
    // g·n/4·(−4(1 + 1/n) + …) written without dividing by n.
    let v14 = g / 4.0 * (-4.0 * (n + 1.0) + n * dg * t - 8.0 / 3.0 * n * dl * t * t) * t * e
        + g * big / 4.0 * m * (big * big / (16.0 * dl) - 1.0) * t * t;
    (v11, v14, v33)
}

/// Room-temperature form
/// `½|(1 + (g² − (Γ²−γ²)/4)t² + (3Γ²+16g²)/24·(Γn)t³)/(1 + 3g²t²)|`.
pub fn lambda_minus_room(params: &SystemParams, t: f64) -> f64 {
    let (gam, big, g) = (params.gamma, params.gamma_ac, params.g);
    let heat = big * params.n_th();
    let num = 1.0
        + (g * g - (big * big - gam * gam) / 4.0) * t * t
        + (3.0 * big * big + 16.0 * g * g) / 24.0 * heat * t.powi(3);
    0.5 * (num / (1.0 + 3.0 * g * g * t * t)).abs()
}
