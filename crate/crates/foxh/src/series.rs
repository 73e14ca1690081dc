//! Residue-series representations: explicit coefficients for simple and
//! coincident pole groups, power and power-logarithmic expansions near zero
//! and infinity, adaptive evaluation, and leading-term asymptotics.
//!
//! Conventions. A pole group at location s0 with order N contributes
//! `z^w  sum_{i<N} C_i [log z]^i` with `w = -s0` to the function value.
//! For the lower family the C_i are the residue coefficients themselves;
//! for the upper family the residue sum enters with a minus sign, which the
//! returned coefficients already include, so the order-1 case always
//! degenerates to the matching simple-pole formula. Principal branches of
//! `log z` and `z^w` (arg z in (-pi, pi]) throughout.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gamma::{factor_argument, is_gamma_pole, log_gamma, Factor};
use crate::jet::{gamma_jet, gamma_pole_jet, recip_gamma_jet, TaylorJet};
use crate::params::{
    classify_existence, nearest_other_pole_distance, pole_location, require_separation,
    solve_membership, ContourChoice, ExistenceVerdict, HParams, Pole, PoleFamily,
};

/// Hard cap on the number of pole groups one evaluation may sum.
pub const MAX_GROUPS: usize = 10_000;

/// Distance below which a simple pole earns a conditioning warning.
const NEAR_COINCIDENCE_WARN: f64 = 1e-6;

/// Relative cancellation ratio that trips `JetPrecisionLoss`.
const CANCELLATION_LIMIT: f64 = 1e-12;

/// One term of a series expansion: coefficient * z^power * (log z)^log_power.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTerm {
    pub coefficient: Complex64,
    pub power: Complex64,
    pub log_power: u32,
}

/// Which point the expansion is taken about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionPoint {
    Zero,
    Infinity,
}

impl ExpansionPoint {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExpansionPoint::Zero => "zero",
            ExpansionPoint::Infinity => "infinity",
        }
    }

    fn family(&self) -> PoleFamily {
        match self {
            ExpansionPoint::Zero => PoleFamily::LowerB,
            ExpansionPoint::Infinity => PoleFamily::UpperA,
        }
    }
}

/// Where a series expansion converges, per the existence classification.
#[derive(Debug, Clone, PartialEq)]
pub enum Validity {
    /// Converges for every z != 0.
    AllNonzeroZ,
    /// Converges for 0 < |z| < radius.
    InsideDisk { radius: f64 },
    /// Converges for |z| > radius.
    OutsideDisk { radius: f64 },
    /// Converges nowhere (the family does not match the sign of Delta).
    Empty,
}

impl Validity {
    pub fn contains(&self, z: Complex64) -> bool {
        let az = z.norm();
        if az == 0.0 {
            return false;
        }
        match self {
            Validity::AllNonzeroZ => true,
            Validity::InsideDisk { radius } => az < *radius,
            Validity::OutsideDisk { radius } => az > *radius,
            Validity::Empty => false,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Validity::AllNonzeroZ => serde_json::json!({"kind": "all_nonzero_z"}),
            Validity::InsideDisk { radius } => {
                serde_json::json!({"kind": "inside_disk", "radius": radius})
            }
            Validity::OutsideDisk { radius } => {
                serde_json::json!({"kind": "outside_disk", "radius": radius})
            }
            Validity::Empty => serde_json::json!({"kind": "empty"}),
        }
    }
}

/// A truncated expansion with its validity domain and truncation metadata.
#[derive(Debug, Clone)]
pub struct SeriesExpansion {
    pub about: ExpansionPoint,
    /// Sorted by Re(power): ascending about zero, descending about infinity.
    pub terms: Vec<SeriesTerm>,
    pub max_shift: u32,
    /// Magnitude of the top coefficient of the first omitted group; a
    /// z-independent truncation indicator.
    pub tail_estimate: f64,
    pub validity: Validity,
}

impl SeriesExpansion {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "about": self.about.as_str(),
            "terms": self
                .terms
                .iter()
                .map(|t| {
                    serde_json::json!({
                        "coeff": [t.coefficient.re, t.coefficient.im],
                        "power": [t.power.re, t.power.im],
                        "log_power": t.log_power,
                    })
                })
                .collect::<Vec<_>>(),
            "validity": self.validity.to_json(),
            "truncation": {
                "max_shift": self.max_shift,
                "tail_estimate": self.tail_estimate,
            },
        })
    }

    /// Sums the stored terms at z. No adaptive control; mainly for
    /// round-tripping the serialized form.
    pub fn sum_at(&self, z: Complex64) -> Complex64 {
        let lz = z.ln();
        self.terms
            .iter()
            .map(|t| t.coefficient * (t.power * lz).exp() * lz.powu(t.log_power))
            .sum()
    }
}

/// Result of one adaptive evaluation.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub expansion_used: ExpansionPoint,
    /// Number of pole groups summed.
    pub terms_summed: usize,
    pub verdict: ExistenceVerdict,
    pub warnings: Vec<String>,
}

impl EvalReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "value": [self.value.re, self.value.im],
            "abs_error_estimate": self.abs_error_estimate,
            "expansion_used": format!("{}_series", self.expansion_used.as_str()),
            "terms_summed": self.terms_summed,
            "verdict": verdict_json(&self.verdict),
            "warnings": self.warnings,
        })
    }
}

pub fn verdict_json(v: &ExistenceVerdict) -> serde_json::Value {
    serde_json::json!({
        "exists": v.exists,
        "contour": v.contour.as_str(),
        "case": v.case.map(|c| c.as_str()),
        "boundary_case": v.boundary_case,
    })
}

/// Leading asymptotic term: coefficient * z^exponent * (log z)^log_power.
#[derive(Debug, Clone)]
pub struct AsymptoticTerm {
    pub coefficient: Complex64,
    pub exponent: Complex64,
    pub log_power: u32,
    pub regime: ExpansionPoint,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// All numerator/denominator Gamma products of the integrand at the point s,
/// excluding the given same-family numerator factors. Errors distinguish a
/// same-family numerator pole (`NotSimple`) from an other-family one
/// (`SeparationViolated`); a denominator pole yields an exact zero.
fn gamma_ratio_excluding(
    params: &HParams,
    family: PoleFamily,
    excluded: &[usize],
    s: Complex64,
) -> Result<Complex64> {
    let mut log_sum = Complex64::new(0.0, 0.0);
    for f in crate::gamma::numerator_factors(params) {
        let same_family = matches!(
            (f, family),
            (Factor::LowerNum(_), PoleFamily::LowerB) | (Factor::UpperNum(_), PoleFamily::UpperA)
        );
        let idx = match f {
            Factor::LowerNum(j) => j,
            Factor::UpperNum(i) => i,
            _ => unreachable!(),
        };
        if same_family && excluded.contains(&idx) {
            continue;
        }
        let w = factor_argument(params, f, s);
        if is_gamma_pole(w) {
            return if same_family {
                Err(Error::NotSimple(format!(
                    "factor {idx} of the same family is singular at {s}"
                )))
            } else {
                Err(Error::SeparationViolated(format!(
                    "other-family numerator factor {idx} is singular at {s}"
                )))
            };
        }
        log_sum += log_gamma(w)?;
    }
    for f in crate::gamma::denominator_factors(params) {
        let w = factor_argument(params, f, s);
        if is_gamma_pole(w) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        log_sum -= log_gamma(w)?;
    }
    Ok(log_sum.exp())
}

/// Simple-pole coefficient of the lower family: the limit of
/// (s - s0) * scriptH(s) at s0 = -(b_j + l)/beta_j, assembled as
/// (-1)^l/(l! beta_j) times the remaining Gamma products at s0.
pub fn coeff_simple_b(params: &HParams, j: usize, l: u32) -> Result<Complex64> {
    require_separation(params)?;
    let s0 = pole_location(params, PoleFamily::LowerB, j, l);
    let g = &params.lower()[j];
    let rest = gamma_ratio_excluding(params, PoleFamily::LowerB, &[j], s0)?;
    // (-1)^l / (l! beta_j), via lgamma so deep shifts cannot overflow.
    let log_norm = -log_gamma(Complex64::new(l as f64 + 1.0, 0.0))?.re - g.weight.ln();
    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
    Ok(rest * sign * log_norm.exp())
}

/// Simple-pole coefficient of the upper family, at s0 = (1 - a_i + k)/alpha_i.
/// Already carries the sign with which the group contributes to the function
/// (the upper-family residue sum enters negated).
pub fn coeff_simple_a(params: &HParams, i: usize, k: u32) -> Result<Complex64> {
    require_separation(params)?;
    let s0 = pole_location(params, PoleFamily::UpperA, i, k);
    let g = &params.upper()[i];
    let rest = gamma_ratio_excluding(params, PoleFamily::UpperA, &[i], s0)?;
    let log_norm = -log_gamma(Complex64::new(k as f64 + 1.0, 0.0))?.re - g.weight.ln();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    Ok(rest * sign * log_norm.exp())
}

/// Validates that `group` really lists every factor of its family that is
/// singular at its location.
fn validate_group(params: &HParams, group: &Pole) -> Result<()> {
    if group.indices.is_empty() {
        return Err(Error::NotAPole("empty pole group".into()));
    }
    let (anchor_idx, anchor_shift) = group.indices[0];
    for idx in 0..params.family_len(group.family) {
        let solved = solve_membership(params, group.family, idx, anchor_idx, anchor_shift);
        let listed = group.indices.iter().find(|&&(i, _)| i == idx).map(|&(_, s)| s);
        match (solved, listed) {
            (Some(s), Some(t)) if s == t => {}
            (None, None) => {}
            _ => {
                return Err(Error::NotSimple(format!(
                    "group at {} does not match the pole structure for factor {idx}",
                    group.location
                )))
            }
        }
    }
    Ok(())
}

/// Builds the jet (about the group location) of the product of all integrand
/// factors that stay analytic there: the other-family numerators, the
/// same-family numerators outside the group, and the reciprocal denominators.
fn analytic_rest_jet(params: &HParams, group: &Pole, order: usize) -> Result<TaylorJet> {
    let s0 = group.location;
    let mut acc = TaylorJet::constant(s0, Complex64::new(1.0, 0.0), order);
    let member = |idx: usize, fam: PoleFamily| {
        group.family == fam && group.indices.iter().any(|&(i, _)| i == idx)
    };
    for f in crate::gamma::numerator_factors(params) {
        let (idx, fam, lambda) = match f {
            Factor::LowerNum(j) => (j, PoleFamily::LowerB, params.lower()[j].weight),
            Factor::UpperNum(i) => (i, PoleFamily::UpperA, -params.upper()[i].weight),
            _ => unreachable!(),
        };
        if member(idx, fam) {
            continue;
        }
        let c = factor_argument(params, f, s0);
        if is_gamma_pole(c) {
            return if fam == group.family {
                Err(Error::NotSimple(format!(
                    "factor {idx} is singular at {s0} but missing from the group"
                )))
            } else {
                Err(Error::SeparationViolated(format!(
                    "other-family numerator factor {idx} is singular at {s0}"
                )))
            };
        }
        let jet = gamma_jet(c, order)?.compose_linear(Complex64::new(lambda, 0.0), s0);
        acc = acc.mul(&jet)?;
    }
    for f in crate::gamma::denominator_factors(params) {
        let lambda = match f {
            Factor::LowerDen(i) => params.upper()[i].weight,
            Factor::UpperDen(j) => -params.lower()[j].weight,
            _ => unreachable!(),
        };
        let c = factor_argument(params, f, s0);
        let jet = recip_gamma_jet(c, order)?.compose_linear(Complex64::new(lambda, 0.0), s0);
        acc = acc.mul(&jet)?;
    }
    Ok(acc)
}

/// Jet of (s - s0)^N times the product of the group's own Gamma factors.
fn singular_product_jet(params: &HParams, group: &Pole, order: usize) -> Result<TaylorJet> {
    let s0 = group.location;
    let mut acc = TaylorJet::constant(s0, Complex64::new(1.0, 0.0), order);
    for &(idx, shift) in &group.indices {
        let g = params.family_param(group.family, idx);
        let (scale, offset) = match group.family {
            PoleFamily::LowerB => (g.weight, g.value),
            PoleFamily::UpperA => (-g.weight, Complex64::new(1.0, 0.0) - g.value),
        };
        let jet = gamma_pole_jet(shift, scale, offset, s0, order)?;
        acc = acc.mul(&jet)?;
    }
    Ok(acc)
}

/// The log-polynomial coefficients C_0..C_{N-1} with which a pole group
/// contributes `z^w sum_i C_i [log z]^i` to the function value. The Leibniz
/// double sum runs over increasing n; a cancellation monitor trips
/// `JetPrecisionLoss` when the assembly loses essentially every digit.
pub fn coeff_log_group(params: &HParams, group: &Pole) -> Result<Vec<Complex64>> {
    require_separation(params)?;
    validate_group(params, group)?;
    let n_order = group.order();
    let jet_order = n_order; // one guard coefficient past the N-1 derivatives
    let h1 = singular_product_jet(params, group, jet_order)?;
    let h2 = analytic_rest_jet(params, group, jet_order)?;
    let d1: Vec<Complex64> = (0..n_order).map(|r| h1.derivative(r)).collect();
    let d2: Vec<Complex64> = (0..n_order).map(|r| h2.derivative(r)).collect();
    let norm = 1.0 / factorial(n_order - 1);
    let mut out = Vec::with_capacity(n_order);
    for i in 0..n_order {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let mut acc = Complex64::new(0.0, 0.0);
        let mut abs_acc = 0.0;
        for n in i..n_order {
            let term = binomial(n_order - 1, n)
                * binomial(n, i)
                * d1[n_order - 1 - n]
                * d2[n - i];
            acc += term;
            abs_acc += term.norm();
        }
        if abs_acc > 1e-250 && acc.norm() < CANCELLATION_LIMIT * abs_acc {
            return Err(Error::JetPrecisionLoss(format!(
                "log-power {i} coefficient at {} cancels to {:.2e} of its term sum",
                group.location,
                acc.norm() / abs_acc
            )));
        }
        out.push(acc * sign * norm);
    }
    if group.family == PoleFamily::UpperA {
        for c in &mut out {
            *c = -*c;
        }
    }
    Ok(out)
}

/// Power-logarithmic coefficients of a lower-family pole group
/// (log-powers 0..order-1). Degenerates to `coeff_simple_b` at order 1.
pub fn coeff_log_b(params: &HParams, group: &Pole) -> Result<Vec<Complex64>> {
    if group.family != PoleFamily::LowerB {
        return Err(Error::NotAPole("expected a lower-family group".into()));
    }
    coeff_log_group(params, group)
}

/// Upper-family mirror of [`coeff_log_b`]; the returned coefficients are the
/// contribution to the function (residues negated), so order 1 matches
/// `coeff_simple_a`.
pub fn coeff_log_a(params: &HParams, group: &Pole) -> Result<Vec<Complex64>> {
    if group.family != PoleFamily::UpperA {
        return Err(Error::NotAPole("expected an upper-family group".into()));
    }
    coeff_log_group(params, group)
}

/// Min-heap entry ordered along the expansion direction.
#[derive(Debug, PartialEq)]
struct HeapEntry {
    key: f64,
    im: f64,
    idx: usize,
    shift: u32,
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key
            .total_cmp(&other.key)
            .then(self.im.total_cmp(&other.im))
            .then(self.idx.cmp(&other.idx))
            .then(self.shift.cmp(&other.shift))
    }
}

/// Streams the pole groups of one family in expansion order: ascending
/// Re(power) near zero, descending Re(power) near infinity.
pub(crate) struct GroupIter<'a> {
    params: &'a HParams,
    family: PoleFamily,
    next_shift: Vec<u32>,
    heap: BinaryHeap<Reverse<HeapEntry>>,
}

impl<'a> GroupIter<'a> {
    pub fn new(params: &'a HParams, family: PoleFamily) -> Self {
        let len = params.family_len(family);
        let mut it = GroupIter {
            params,
            family,
            next_shift: vec![0; len],
            heap: BinaryHeap::new(),
        };
        for idx in 0..len {
            it.push_entry(idx, 0);
        }
        it
    }

    fn push_entry(&mut self, idx: usize, shift: u32) {
        let loc = pole_location(self.params, self.family, idx, shift);
        let key = match self.family {
            PoleFamily::LowerB => -loc.re, // ascending power
            PoleFamily::UpperA => loc.re,  // descending power
        };
        self.heap.push(Reverse(HeapEntry {
            key,
            im: loc.im,
            idx,
            shift,
        }));
    }

    /// Peek at the ordering key of the next group.
    pub fn peek_key(&self) -> Option<f64> {
        self.heap.peek().map(|Reverse(e)| e.key)
    }

    pub fn all_consumed_past(&self, max_shift: u32) -> bool {
        self.next_shift.iter().all(|&s| s > max_shift)
    }
}

impl<'a> Iterator for GroupIter<'a> {
    type Item = Pole;

    fn next(&mut self) -> Option<Pole> {
        loop {
            let Reverse(top) = self.heap.pop()?;
            if top.shift != self.next_shift[top.idx] {
                continue; // consumed as a member of an earlier group
            }
            let mut indices = vec![(top.idx, top.shift)];
            for other in 0..self.next_shift.len() {
                if other == top.idx {
                    continue;
                }
                if let Some(s) = solve_membership(self.params, self.family, other, top.idx, top.shift)
                {
                    debug_assert_eq!(s, self.next_shift[other]);
                    if s == self.next_shift[other] {
                        indices.push((other, s));
                    }
                }
            }
            indices.sort_unstable();
            for &(idx, shift) in &indices {
                self.next_shift[idx] = shift + 1;
                self.push_entry(idx, shift + 1);
            }
            return Some(Pole {
                location: pole_location(self.params, self.family, top.idx, top.shift),
                family: self.family,
                indices,
            });
        }
    }
}

/// Coefficients of one group, via the simple-pole formula when the order is
/// one and the jet machinery otherwise.
fn group_coefficients(params: &HParams, group: &Pole) -> Result<Vec<Complex64>> {
    if group.order() == 1 {
        let (idx, shift) = group.indices[0];
        let c = match group.family {
            PoleFamily::LowerB => coeff_simple_b(params, idx, shift)?,
            PoleFamily::UpperA => coeff_simple_a(params, idx, shift)?,
        };
        Ok(vec![c])
    } else {
        coeff_log_group(params, group)
    }
}

fn expansion_validity(params: &HParams, about: ExpansionPoint) -> Validity {
    let inv = params.invariants();
    match about {
        ExpansionPoint::Zero => {
            if inv.delta_is_zero() {
                Validity::InsideDisk {
                    radius: inv.delta_small,
                }
            } else if inv.delta_cap > 0.0 {
                Validity::AllNonzeroZ
            } else {
                Validity::Empty
            }
        }
        ExpansionPoint::Infinity => {
            if inv.delta_is_zero() {
                Validity::OutsideDisk {
                    radius: inv.delta_small,
                }
            } else if inv.delta_cap < 0.0 {
                Validity::AllNonzeroZ
            } else {
                Validity::Empty
            }
        }
    }
}

fn expand(params: &HParams, about: ExpansionPoint, max_shift: u32) -> Result<SeriesExpansion> {
    require_separation(params)?;
    let family = about.family();
    let mut terms = Vec::new();
    let mut tail_estimate = 0.0;
    if params.family_len(family) > 0 {
        let mut iter = GroupIter::new(params, family);
        loop {
            if iter.all_consumed_past(max_shift) {
                // First omitted group sets the truncation indicator.
                if let Some(next) = iter.next() {
                    if let Ok(coeffs) = group_coefficients(params, &next) {
                        tail_estimate = coeffs.last().map(|c| c.norm()).unwrap_or(0.0);
                    }
                }
                break;
            }
            let Some(group) = iter.next() else { break };
            if group.indices.iter().all(|&(_, s)| s > max_shift) {
                continue;
            }
            let coeffs = group_coefficients(params, &group)?;
            let power = group.power();
            for (i, c) in coeffs.iter().enumerate() {
                terms.push(SeriesTerm {
                    coefficient: *c,
                    power,
                    log_power: i as u32,
                });
            }
        }
    }
    Ok(SeriesExpansion {
        about,
        terms,
        max_shift,
        tail_estimate,
        validity: expansion_validity(params, about),
    })
}

/// Expansion about zero over the lower-family poles: simple groups via the
/// limit formula, coincident groups via the Leibniz jet assembly. Empty when
/// m = 0. With Delta < 0 the validity domain is empty.
pub fn expand_near_zero(params: &HParams, max_shift: u32) -> Result<SeriesExpansion> {
    expand(params, ExpansionPoint::Zero, max_shift)
}

/// Expansion about infinity over the upper-family poles; empty when n = 0.
pub fn expand_near_infinity(params: &HParams, max_shift: u32) -> Result<SeriesExpansion> {
    expand(params, ExpansionPoint::Infinity, max_shift)
}

/// Evaluates one pole group's contribution at z.
fn group_value(coeffs: &[Complex64], power: Complex64, log_z: Complex64) -> Complex64 {
    let zp = (power * log_z).exp();
    let mut poly = Complex64::new(0.0, 0.0);
    let mut lp = Complex64::new(1.0, 0.0);
    for c in coeffs {
        poly += c * lp;
        lp *= log_z;
    }
    zp * poly
}

/// Adaptive evaluation: sums pole groups in expansion order until three
/// consecutive groups contribute less than `tolerance` relative to the
/// partial sum while their magnitudes are no longer growing, with a hard
/// cap of [`MAX_GROUPS`] groups.
pub fn evaluate(params: &HParams, z: Complex64, tolerance: f64) -> Result<EvalReport> {
    let verdict = classify_existence(params, z, None);
    if !verdict.exists {
        return Err(Error::NotInDomain(if verdict.boundary_case {
            "|z| on the delta circle with Delta = 0 grants no series representation".into()
        } else {
            format!("no existence case applies to z = {z}")
        }));
    }
    if verdict.boundary_case {
        return Err(Error::NotInDomain(
            "existence holds on the delta circle, but the residue representation does not".into(),
        ));
    }
    require_separation(params)?;
    let about = match verdict.contour {
        ContourChoice::LeftLoop => ExpansionPoint::Zero,
        ContourChoice::RightLoop => ExpansionPoint::Infinity,
        _ => {
            return Err(Error::NotInDomain(
                "no loop contour applies to this argument".into(),
            ))
        }
    };
    let family = about.family();
    let mut warnings = Vec::new();
    if params.family_len(family) == 0 {
        // The residue sum over an empty family is zero.
        return Ok(EvalReport {
            value: Complex64::new(0.0, 0.0),
            abs_error_estimate: 0.0,
            expansion_used: about,
            terms_summed: 0,
            verdict,
            warnings,
        });
    }
    let log_z = z.ln();
    let mut partial = Complex64::new(0.0, 0.0);
    let mut window: Vec<f64> = Vec::new();
    let mut summed = 0usize;
    let mut warned_conditioning = false;
    for group in GroupIter::new(params, family) {
        if summed >= MAX_GROUPS {
            return Err(Error::NoConvergence(format!(
                "group cap {MAX_GROUPS} reached before the stopping rule fired"
            )));
        }
        if group.order() == 1 && !warned_conditioning {
            let d = nearest_other_pole_distance(params, &group);
            if d < NEAR_COINCIDENCE_WARN {
                warnings.push(format!(
                    "simple pole at {} is within {d:.2e} of another pole; \
                     coefficients may be ill-conditioned (consider exact rational parameters)",
                    group.location
                ));
                warned_conditioning = true;
            }
        }
        let coeffs = group_coefficients(params, &group)?;
        let contribution = group_value(&coeffs, group.power(), log_z);
        if !contribution.re.is_finite() || !contribution.im.is_finite() {
            return Err(Error::NoConvergence(format!(
                "non-finite contribution from the group at {}",
                group.location
            )));
        }
        partial += contribution;
        summed += 1;
        window.push(contribution.norm());
        if window.len() > 3 {
            window.remove(0);
        }
        if window.len() == 3 {
            let scale = partial.norm().max(1e-300);
            let small = window.iter().all(|&m| m <= tolerance * scale);
            let decreasing = window[2] <= window[0].max(1e-300);
            if small && decreasing {
                break;
            }
        }
    }
    // Geometric tail estimate from the stopping window.
    let abs_error_estimate = match window.as_slice() {
        [.., a, b] if *a > 0.0 && b < a => {
            let r = b / a;
            b * r / (1.0 - r)
        }
        [.., b] => *b,
        [] => 0.0,
    }
    .max(f64::EPSILON * partial.norm() * summed as f64);
    Ok(EvalReport {
        value: partial,
        abs_error_estimate,
        expansion_used: about,
        terms_summed: summed,
        verdict,
        warnings,
    })
}

/// Evaluates many points concurrently (everything here is pure and
/// immutable, so the points are independent); results keep the input order,
/// and each point's outcome is identical to a sequential [`evaluate`] call.
pub fn evaluate_batch(
    params: &HParams,
    zs: &[Complex64],
    tolerance: f64,
) -> Vec<Result<EvalReport>> {
    if zs.len() <= 1 {
        return zs.iter().map(|&z| evaluate(params, z, tolerance)).collect();
    }
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(zs.len());
    let mut out: Vec<Option<Result<EvalReport>>> = vec![None; zs.len()];
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots = std::sync::Mutex::new(&mut out);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= zs.len() {
                    break;
                }
                let r = evaluate(params, zs[i], tolerance);
                slots.lock().expect("poisoned")[i] = Some(r);
            });
        }
    });
    out.into_iter().map(|r| r.expect("every slot filled")).collect()
}

/// Leading-term asymptotics as z -> 0 (over the lower family; needs
/// Delta >= 0) or |z| -> infinity (upper family; Delta <= 0).
///
/// The extremal exponent is the minimum of Re(b_j)/beta_j (resp. the maximum
/// of (Re(a_i)-1)/alpha_i), always attained among the shift-0 groups. If any
/// group attaining it is coincident, its top log-power dominates every
/// simple candidate. Groups attaining the extremum with the identical
/// complex exponent and the same winning log-power have their coefficients
/// summed; among distinct imaginary parts the smallest is reported.
pub fn leading_term(params: &HParams, regime: ExpansionPoint) -> Result<AsymptoticTerm> {
    let inv = params.invariants();
    let family = regime.family();
    match regime {
        ExpansionPoint::Zero => {
            if params.m() == 0 {
                return Err(Error::EmptyFamily("m = 0: no expansion about zero".into()));
            }
            if !inv.delta_is_zero() && inv.delta_cap < 0.0 {
                return Err(Error::NotInDomain(
                    "asymptotics about zero need Delta >= 0".into(),
                ));
            }
        }
        ExpansionPoint::Infinity => {
            if params.n() == 0 {
                return Err(Error::EmptyFamily(
                    "n = 0: no expansion about infinity".into(),
                ));
            }
            if !inv.delta_is_zero() && inv.delta_cap > 0.0 {
                return Err(Error::NotInDomain(
                    "asymptotics about infinity need Delta <= 0".into(),
                ));
            }
        }
    }
    require_separation(params)?;
    let mut iter = GroupIter::new(params, family);
    let first_key = iter.peek_key().expect("non-empty family");
    let mut candidates = Vec::new();
    while let Some(key) = iter.peek_key() {
        if key > first_key + POWER_TIE_TOL * (1.0 + first_key.abs()) {
            break;
        }
        candidates.push(iter.next().expect("peeked"));
    }
    let top_log = candidates.iter().map(|g| g.order() - 1).max().unwrap();
    let mut attaining: Vec<(Complex64, Complex64)> = Vec::new(); // (power, coeff)
    for g in &candidates {
        if g.order() - 1 != top_log {
            continue;
        }
        let coeffs = group_coefficients(params, g)?;
        attaining.push((g.power(), coeffs[top_log]));
    }
    attaining.sort_by(|a, b| a.0.im.total_cmp(&b.0.im));
    let exponent = attaining[0].0;
    let coefficient = attaining
        .iter()
        .filter(|(p, _)| (p - exponent).norm() <= POWER_TIE_TOL * (1.0 + exponent.norm()))
        .map(|(_, c)| c)
        .sum();
    Ok(AsymptoticTerm {
        coefficient,
        exponent,
        log_power: top_log as u32,
        regime,
    })
}

const POWER_TIE_TOL: f64 = 1e-12;

/// For tests and the oracle comparisons: the first few pole groups of a
/// family in expansion order.
pub fn pole_groups(params: &HParams, family: PoleFamily, count: usize) -> Vec<Pole> {
    GroupIter::new(params, family).take(count).collect()
}
