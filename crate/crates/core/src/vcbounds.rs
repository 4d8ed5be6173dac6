//! Sample-size-to-accuracy conversions: the epsilon-approximation guarantees
//! derived from VC-dimension and empirical-VC-dimension upper bounds, and the
//! closed-form power-set bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default value for the universal constant in the VC epsilon bound.
pub const DEFAULT_VC_CONSTANT: f64 = 0.5;

fn check_common(ell: u64, delta: f64) -> Result<()> {
    if ell == 0 {
        return Err(Error::Parameter("sample size must be positive".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!(
            "confidence parameter must be in (0,1), got {delta}"
        )));
    }
    Ok(())
}

/// Accuracy from a VC-dimension bound `d` on a sample of size `ell`:
/// sqrt( (c/ell) * (d + ln(1/delta)) ).
pub fn epsilon_vc(d: u64, ell: u64, delta: f64, c: f64) -> Result<f64> {
    check_common(ell, delta)?;
    if !(c > 0.0) {
        return Err(Error::Parameter(format!(
            "universal constant must be positive, got {c}"
        )));
    }
    Ok((c / ell as f64 * (d as f64 + (1.0 / delta).ln())).sqrt())
}

/// Accuracy from an empirical VC-dimension bound `d` on a sample of size
/// `ell`: 2*sqrt( 2*d*ln(ell+1)/ell ) + sqrt( 2*ln(2/delta)/ell ), natural
/// logarithms.
pub fn epsilon_evc(d: u64, ell: u64, delta: f64) -> Result<f64> {
    check_common(ell, delta)?;
    let ell_f = ell as f64;
    let first = 2.0 * (2.0 * d as f64 * (ell_f + 1.0).ln() / ell_f).sqrt();
    let second = (2.0 * (2.0 / delta).ln() / ell_f).sqrt();
    Ok(first + second)
}

/// Minimum of the candidate accuracies.
pub fn epsilon_min(candidates: &[f64]) -> Result<f64> {
    if candidates.is_empty() {
        return Err(Error::Parameter("no epsilon candidates to combine".into()));
    }
    Ok(candidates.iter().copied().fold(f64::INFINITY, f64::min))
}

/// VC dimension of the range set of all itemsets over a universe of
/// `num_items` items: num_items - 1.
pub fn vc_bound_powerset(num_items: u64) -> Result<u64> {
    if num_items == 0 {
        return Err(Error::Parameter(
            "power-set bound requires at least one item".into(),
        ));
    }
    Ok(num_items - 1)
}

/// Which of the two epsilon routes produced the combined value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonProvenance {
    Vc,
    Evc,
    Both,
}

/// The combined epsilon computation: both routes (when their dimension
/// bounds are available), the minimum, and everything needed to audit it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonResult {
    pub eps_vc: Option<f64>,
    pub eps_evc: Option<f64>,
    pub eps: f64,
    pub d_vc: Option<u64>,
    pub d_evc: Option<u64>,
    pub ell: u64,
    pub delta: f64,
    pub c: f64,
    pub provenance: EpsilonProvenance,
}

impl EpsilonResult {
    /// Evaluates both formulas for the available dimension bounds and keeps
    /// the minimum. At least one bound must be present.
    pub fn from_bounds(
        d_vc: Option<u64>,
        d_evc: Option<u64>,
        ell: u64,
        delta: f64,
        c: f64,
    ) -> Result<EpsilonResult> {
        let eps_vc = d_vc.map(|d| epsilon_vc(d, ell, delta, c)).transpose()?;
        let eps_evc = d_evc.map(|d| epsilon_evc(d, ell, delta)).transpose()?;
        let candidates: Vec<f64> = eps_vc.iter().chain(eps_evc.iter()).copied().collect();
        let eps = epsilon_min(&candidates)?;
        let provenance = match (eps_vc, eps_evc) {
            (Some(v), Some(e)) if v == e => EpsilonProvenance::Both,
            (Some(v), _) if v == eps => EpsilonProvenance::Vc,
            _ => EpsilonProvenance::Evc,
        };
        Ok(EpsilonResult {
            eps_vc,
            eps_evc,
            eps,
            d_vc,
            d_evc,
            ell,
            delta,
            c,
            provenance,
        })
    }
}
