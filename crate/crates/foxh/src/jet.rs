//! Truncated Taylor-series (jet) arithmetic over complex coefficients.
//!
//! A jet stores the scaled derivatives c_r = f^(r)(center)/r! through a fixed
//! order; the Cauchy product then realizes the Leibniz rule, which is how the
//! high-order derivatives of the Gamma-product factors are assembled.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gamma::{is_gamma_pole, log_gamma, polygamma};

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorJet {
    pub center: Complex64,
    /// Taylor coefficients c_0..c_K.
    pub coeffs: Vec<Complex64>,
}

impl TaylorJet {
    pub fn constant(center: Complex64, value: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = value;
        TaylorJet { center, coeffs }
    }

    /// The identity map u -> u (as a deviation from the center).
    pub fn variable(center: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        if order >= 1 {
            coeffs[1] = Complex64::new(1.0, 0.0);
        }
        TaylorJet { center, coeffs }
    }

    pub fn from_coeffs(center: Complex64, coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty());
        TaylorJet { center, coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Raw derivative f^(r)(center) = r! c_r.
    pub fn derivative(&self, r: usize) -> Complex64 {
        let mut fact = 1.0;
        for k in 2..=r {
            fact *= k as f64;
        }
        self.coeffs[r] * fact
    }

    fn check_shape(&self, other: &TaylorJet) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::ShapeMismatch(format!(
                "orders {} vs {}",
                self.order(),
                other.order()
            )));
        }
        if self.center != other.center {
            return Err(Error::ShapeMismatch(format!(
                "centers {} vs {}",
                self.center, other.center
            )));
        }
        Ok(())
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &TaylorJet) -> Result<TaylorJet> {
        self.check_shape(other)?;
        let k = self.order();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j > k {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        Ok(TaylorJet {
            center: self.center,
            coeffs,
        })
    }

    pub fn add(&self, other: &TaylorJet) -> Result<TaylorJet> {
        self.check_shape(other)?;
        Ok(TaylorJet {
            center: self.center,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, factor: Complex64) -> TaylorJet {
        TaylorJet {
            center: self.center,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<TaylorJet> {
        let c0 = self.coeffs[0];
        if c0.norm() == 0.0 {
            return Err(Error::ZeroConstantTerm);
        }
        let k = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); k + 1];
        out[0] = 1.0 / c0;
        for r in 1..=k {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=r {
                acc += self.coeffs[j] * out[r - j];
            }
            out[r] = -acc / c0;
        }
        Ok(TaylorJet {
            center: self.center,
            coeffs: out,
        })
    }

    /// Composition exp(self), by the standard recurrence e' = e a'.
    pub fn exp(&self) -> TaylorJet {
        let k = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); k + 1];
        out[0] = self.coeffs[0].exp();
        for r in 1..=k {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=r {
                acc += (j as f64) * self.coeffs[j] * out[r - j];
            }
            out[r] = acc / (r as f64);
        }
        TaylorJet {
            center: self.center,
            coeffs: out,
        }
    }

    /// Composition log(self); requires a nonzero constant term. Uses the
    /// principal branch for the constant coefficient.
    pub fn ln(&self) -> Result<TaylorJet> {
        let c0 = self.coeffs[0];
        if c0.norm() == 0.0 {
            return Err(Error::ZeroConstantTerm);
        }
        let k = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); k + 1];
        out[0] = c0.ln();
        for r in 1..=k {
            let mut acc = (r as f64) * self.coeffs[r];
            for j in 1..r {
                acc -= (j as f64) * out[j] * self.coeffs[r - j];
            }
            out[r] = acc / (r as f64) / c0;
        }
        Ok(TaylorJet {
            center: self.center,
            coeffs: out,
        })
    }

    /// Reinterprets this jet of f(u) as the jet of v -> f(lambda v), with a
    /// new center label. Coefficients pick up lambda^r.
    pub fn compose_linear(&self, lambda: Complex64, new_center: Complex64) -> TaylorJet {
        let mut pow = Complex64::new(1.0, 0.0);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let out = c * pow;
                pow *= lambda;
                out
            })
            .collect();
        TaylorJet {
            center: new_center,
            coeffs,
        }
    }
}

/// Jet of Gamma at an analytic point c: exp of the log-Gamma jet whose r-th
/// coefficient (r >= 1) is psi^(r-1)(c)/r!.
pub fn gamma_jet(c: Complex64, order: usize) -> Result<TaylorJet> {
    if is_gamma_pole(c) {
        return Err(Error::PoleOfGamma(c));
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
    coeffs[0] = log_gamma(c)?;
    let mut fact = 1.0;
    for r in 1..=order {
        fact *= r as f64;
        coeffs[r] = polygamma(r as u32 - 1, c)? / fact;
    }
    Ok(TaylorJet::from_coeffs(c, coeffs).exp())
}

/// Jet of the reciprocal Gamma 1/Gamma(c + u), valid at every c including
/// the poles of Gamma (where the reciprocal has a simple zero).
pub fn recip_gamma_jet(c: Complex64, order: usize) -> Result<TaylorJet> {
    if !is_gamma_pole(c) {
        return gamma_jet(c, order)?.reciprocal();
    }
    // c = -k: 1/Gamma(w) = w (w+1) ... (w+k) / Gamma(w + k + 1), w = -k + u.
    let k = (-c.re).round() as usize;
    let mut poly = TaylorJet::constant(c, Complex64::new(1.0, 0.0), order);
    for i in 0..=k {
        let lin = TaylorJet::from_coeffs(
            c,
            {
                let mut v = vec![Complex64::new(0.0, 0.0); order + 1];
                v[0] = Complex64::new(i as f64 - k as f64, 0.0);
                if order >= 1 {
                    v[1] = Complex64::new(1.0, 0.0);
                }
                v
            },
        );
        poly = poly.mul(&lin)?;
    }
    let analytic = gamma_jet(Complex64::new(1.0, 0.0), order)?.compose_linear(Complex64::new(1.0, 0.0), c);
    poly.mul(&analytic.reciprocal()?)
}

/// Jet in u = s - s0 of the product (s - s0) * Gamma(offset + scale * s),
/// where s0 is the pole with offset + scale*s0 = -k. The recurrence
/// Gamma(w) = Gamma(w + k + 1) / [w (w+1) ... (w+k)] moves the pole into a
/// polynomial factor, so the leading coefficient is (-1)^k / (k! scale).
///
/// `scale` may be any nonzero real; the upper-family factors use a negative
/// scale.
pub fn gamma_pole_jet(
    k: u32,
    scale: f64,
    offset: Complex64,
    pole: Complex64,
    order: usize,
) -> Result<TaylorJet> {
    if scale == 0.0 {
        return Err(Error::NotAPole("zero scale".into()));
    }
    let at_pole = offset + scale * pole;
    if (at_pole + k as f64).norm() > 1e-9 * (1.0 + (k as f64)) {
        return Err(Error::NotAPole(format!(
            "offset + scale*s0 = {at_pole}, expected -{k}"
        )));
    }
    // (s-s0) Gamma(offset + scale s) = Gamma(1 + scale u) /
    //     [scale * prod_{i=0}^{k-1} ((i - k) + scale u)]
    let sc = Complex64::new(scale, 0.0);
    let top = gamma_jet(Complex64::new(1.0, 0.0), order)?.compose_linear(sc, pole);
    // Normalized polynomial prod (1 + scale u/(i-k)) avoids overflow for
    // large k; the constant (-1)^k k! is folded into log space.
    let mut poly = TaylorJet::constant(pole, Complex64::new(1.0, 0.0), order);
    for i in 0..k {
        let root = i as f64 - k as f64;
        let mut v = vec![Complex64::new(0.0, 0.0); order + 1];
        v[0] = Complex64::new(1.0, 0.0);
        if order >= 1 {
            v[1] = sc / root;
        }
        poly = poly.mul(&TaylorJet::from_coeffs(pole, v))?;
    }
    // constant = (-1)^k / (k! * scale), via lgamma to survive large k.
    let log_kfact = log_gamma(Complex64::new(k as f64 + 1.0, 0.0))?.re;
    let magnitude = (-log_kfact).exp() / scale;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let constant = Complex64::new(sign * magnitude, 0.0);
    Ok(top.mul(&poly.reciprocal()?)?.scale(constant))
}
