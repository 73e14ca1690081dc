//! Independent numerical oracles: direct quadrature of the defining
//! Mellin-Barnes integral along a vertical line, and small-circle contour
//! integration around individual poles for residue verification.
//!
//! These exist for correctness, not speed: composite Gauss segments on the
//! line, node-doubling trapezoid sums on the circles. Nothing here shares a
//! code path with the series evaluator beyond the integrand itself.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gamma::{script_h, ContourSpec};
use crate::params::{
    analyze_pole_structure, nearest_other_pole_distance, HParams, Pole, DEFAULT_MAX_SHIFT,
};

/// Result of one quadrature run.
#[derive(Debug, Clone)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub contour: ContourSpec,
    pub evaluations: usize,
}

impl QuadratureResult {
    pub fn to_json(&self) -> serde_json::Value {
        let contour = match self.contour {
            ContourSpec::VerticalLine {
                sigma0,
                half_height,
            } => serde_json::json!({
                "kind": "vertical_line", "sigma0": sigma0, "half_height": half_height,
            }),
            ContourSpec::LeftLoop { phi1, phi2 } => {
                serde_json::json!({"kind": "left_loop", "phi1": phi1, "phi2": phi2})
            }
            ContourSpec::RightLoop { phi1, phi2 } => {
                serde_json::json!({"kind": "right_loop", "phi1": phi1, "phi2": phi2})
            }
        };
        serde_json::json!({
            "value": [self.value.re, self.value.im],
            "abs_error_estimate": self.abs_error_estimate,
            "contour": contour,
            "evaluations": self.evaluations,
        })
    }
}

/// Positive nodes and weights of 16-point Gauss-Legendre on (-1, 1).
const GL_NODES: [f64; 8] = [
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.7554044083550030,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL_WEIGHTS: [f64; 8] = [
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

/// Composite Gauss-Legendre integral of f over [a, b] with `panels` panels.
fn gauss_panels<F: FnMut(f64) -> Complex64>(a: f64, b: f64, panels: usize, mut f: F) -> Complex64 {
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (xi, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
            let dx = xi * 0.5 * h;
            acc += w * (f(mid + dx) + f(mid - dx));
        }
    }
    acc * (0.5 * h)
}

/// Picks a vertical abscissa separating the two pole families: the midpoint
/// of the gap between the rightmost lower pole and the leftmost upper pole.
pub fn auto_vertical_abscissa(params: &HParams) -> Result<f64> {
    let max_lower = (0..params.m())
        .map(|j| {
            let g = &params.lower()[j];
            -g.value.re / g.weight
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let min_upper = (0..params.n())
        .map(|i| {
            let g = &params.upper()[i];
            (1.0 - g.value.re) / g.weight
        })
        .fold(f64::INFINITY, f64::min);
    if params.m() == 0 && params.n() == 0 {
        return Ok(0.0);
    }
    if params.m() == 0 {
        return Ok(min_upper - 1.0);
    }
    if params.n() == 0 {
        return Ok(max_lower + 1.0);
    }
    if max_lower < min_upper {
        Ok(0.5 * (max_lower + min_upper))
    } else {
        Err(Error::ContourInvalid(format!(
            "no vertical line separates the pole families: \
             rightmost lower pole Re = {max_lower}, leftmost upper pole Re = {min_upper}"
        )))
    }
}

fn check_vertical_separation(params: &HParams, sigma0: f64) -> Result<()> {
    let margin = 1e-9;
    for j in 0..params.m() {
        let g = &params.lower()[j];
        let re0 = -g.value.re / g.weight;
        if re0 >= sigma0 - margin {
            // Poles march left; only the rightmost can conflict.
            return Err(Error::ContourInvalid(format!(
                "lower pole at Re = {re0} is not left of the line Re = {sigma0}"
            )));
        }
    }
    for i in 0..params.n() {
        let g = &params.upper()[i];
        let re0 = (1.0 - g.value.re) / g.weight;
        if re0 <= sigma0 + margin {
            return Err(Error::ContourInvalid(format!(
                "upper pole at Re = {re0} is not right of the line Re = {sigma0}"
            )));
        }
    }
    Ok(())
}

/// Direct quadrature of the defining integral along a vertical line:
/// (1/2 pi) * integral of scriptH(sigma0 + it) z^{-sigma0 - it} dt.
///
/// Preconditions: the line separates the pole families and the integrand
/// decays along it, which needs a_star > 0 (and |arg z| < pi a_star / 2).
/// The tail is truncated once whole unit segments stop contributing at
/// 1e-16 relative; a budget overrun reports `SlowDecay`.
pub fn quadrature_eval(
    params: &HParams,
    z: Complex64,
    contour: &ContourSpec,
) -> Result<QuadratureResult> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroArgument);
    }
    contour.validate()?;
    let sigma0 = match *contour {
        ContourSpec::VerticalLine { sigma0, .. } => sigma0,
        _ => {
            return Err(Error::ContourInvalid(
                "quadrature runs on vertical lines; the loop contours are handled \
                 by the residue series"
                    .into(),
            ))
        }
    };
    check_vertical_separation(params, sigma0)?;
    let inv = params.invariants();
    if inv.a_star <= 0.0 {
        return Err(Error::ContourInvalid(format!(
            "vertical integrand does not decay: a_star = {} <= 0",
            inv.a_star
        )));
    }
    let log_z = z.ln();
    if log_z.im.abs() >= std::f64::consts::FRAC_PI_2 * inv.a_star {
        return Err(Error::SlowDecay(format!(
            "|arg z| = {} outside the decay sector (pi/2) a_star = {}",
            log_z.im,
            std::f64::consts::FRAC_PI_2 * inv.a_star
        )));
    }
    let mut evaluations = 0usize;
    let mut integrand = |t: f64| -> Complex64 {
        evaluations += 1;
        let s = Complex64::new(sigma0, t);
        match script_h(params, s) {
            Ok(v) => v * (-s * log_z).exp(),
            // The line avoids all poles; treat stray failures as zero
            // measure rather than aborting a whole panel.
            Err(_) => Complex64::new(0.0, 0.0),
        }
    };

    // Segment [k, k+1) on both sides, each integrated with 16-point Gauss
    // panels, doubled until two refinements agree.
    let mut total = Complex64::new(0.0, 0.0);
    let mut quad_err = 0.0f64;
    let segment = |a: f64, b: f64, integrand: &mut dyn FnMut(f64) -> Complex64| {
        let coarse = gauss_panels(a, b, 1, &mut *integrand);
        let fine = gauss_panels(a, b, 2, &mut *integrand);
        let finest = gauss_panels(a, b, 4, &mut *integrand);
        let err = (finest - fine).norm().max((fine - coarse).norm() / 4.0);
        (finest, err)
    };
    let mut magnitude_scale = 0.0f64;
    let mut quiet_run = 0usize;
    let budget = 800usize;
    let mut k = 0usize;
    let mut reached = 0.0f64;
    while k < budget {
        let (a, b) = (k as f64, (k + 1) as f64);
        let (up, e_up) = segment(a, b, &mut integrand);
        let (down, e_down) = segment(-b, -a, &mut integrand);
        total += up + down;
        quad_err += e_up + e_down;
        reached = b;
        let seg_mag = up.norm() + down.norm();
        magnitude_scale = magnitude_scale.max(seg_mag);
        if magnitude_scale > 0.0 && seg_mag <= 1e-16 * magnitude_scale {
            quiet_run += 1;
            if quiet_run >= 3 {
                break;
            }
        } else {
            quiet_run = 0;
        }
        k += 1;
    }
    if k >= budget {
        return Err(Error::SlowDecay(format!(
            "tail still contributing after |t| = {reached}"
        )));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    Ok(QuadratureResult {
        value: total / two_pi,
        abs_error_estimate: (quad_err + 1e-16 * magnitude_scale) / two_pi,
        contour: ContourSpec::VerticalLine {
            sigma0,
            half_height: reached,
        },
        evaluations,
    })
}

/// Trapezoid circle integral (1/2 pi i) of scriptH(s) z^{-s} around
/// `pole_location` with the given radius: the residue of the enclosed pole
/// group. Spectrally accurate; the node count doubles until two successive
/// sums agree to 1e-10 relative.
///
/// The circle must enclose exactly one pole group, which is checked against
/// the grouped pole structure.
pub fn residue_check(
    params: &HParams,
    pole_location: Complex64,
    radius: f64,
    z: Complex64,
) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroArgument);
    }
    if !(radius > 0.0) {
        return Err(Error::ContourInvalid("radius must be positive".into()));
    }
    // Enclosure check: every enumerated pole is either the center (within
    // tolerance) or safely outside the circle.
    let structure = analyze_pole_structure(params, DEFAULT_MAX_SHIFT.max(128));
    let mut enclosed = 0usize;
    for g in structure.lower_poles.iter().chain(&structure.upper_poles) {
        let d = (g.location - pole_location).norm();
        if d <= 1e-9 * (1.0 + pole_location.norm()) {
            enclosed += 1;
        } else if d <= radius * (1.0 + 1e-9) {
            return Err(Error::MultiplePoleEnclosure(format!(
                "pole group at {} lies inside the radius-{radius} circle around {pole_location}",
                g.location
            )));
        }
    }
    if enclosed != 1 {
        return Err(Error::MultiplePoleEnclosure(format!(
            "{enclosed} pole groups at the circle center (expected exactly 1)"
        )));
    }
    let log_z = z.ln();
    let mut nodes = 32usize;
    let mut prev: Option<Complex64> = None;
    while nodes <= 8192 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..nodes {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / nodes as f64;
            let dir = Complex64::new(theta.cos(), theta.sin());
            let s = pole_location + radius * dir;
            let v = script_h(params, s).map_err(|e| {
                Error::NonConvergent(format!("integrand failed on the circle: {e}"))
            })?;
            // (1/2 pi i) * integral f(s) ds with ds = i r dir dtheta reduces
            // to the plain average of f(s) * (s - center).
            acc += v * (-s * log_z).exp() * (radius * dir);
        }
        let estimate = acc / nodes as f64;
        if let Some(p) = prev {
            if (estimate - p).norm() <= 1e-10 * (1.0 + estimate.norm()) {
                return Ok(estimate);
            }
        }
        prev = Some(estimate);
        nodes *= 2;
    }
    Err(Error::NonConvergent(
        "node doubling exhausted without two agreeing circle sums".into(),
    ))
}

/// Radius rule for [`residue_check`]: half the distance to the nearest other
/// pole, capped at 1/4.
pub fn default_residue_radius(params: &HParams, group: &Pole) -> f64 {
    (0.5 * nearest_other_pole_distance(params, group)).min(0.25)
}
