//! Scalar density evolution on normalized subspace dimensions.
//!
//! For large `m`, `dim(V1 ∩ V2)/m` and `dim(V1 + V2)/m` of independent uniform
//! subspaces concentrate on `ξ1 ⊡ ξ2 = max(ξ1 + ξ2 − 1, 0)` and
//! `ξ1 ⊞ ξ2 = min(ξ1 + ξ2, 1)`. Tracking those two operators through the message
//! recursions of the regular and coupled ensembles gives decoding thresholds.

use crate::code::validate_degrees;
use crate::error::{Error, Result};

/// Below this a normalized dimension counts as zero.
pub const ZERO_CUTOFF: f64 = 1e-12;
/// Successive states closer than this (max-norm) count as a fixed point.
pub const FIXED_POINT_CUTOFF: f64 = 1e-14;
pub const BISECTION_STEPS: usize = 60;
const REGULAR_MAX_STEPS: usize = 100_000;

fn check_unit(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("{x} is outside [0, 1]")));
    }
    Ok(())
}

// `a − (1 − b)` rather than `a + b − 1`: when b = 1 the result is exactly a.
#[inline]
fn dot(a: f64, b: f64) -> f64 {
    (a - (1.0 - b)).max(0.0)
}

#[inline]
fn plus(a: f64, b: f64) -> f64 {
    (a + b).min(1.0)
}

/// `a ⊡ b = max(a + b − 1, 0)`.
pub fn boxdot(a: f64, b: f64) -> Result<f64> {
    check_unit(a)?;
    check_unit(b)?;
    Ok(dot(a, b))
}

/// `a ⊞ b = min(a + b, 1)`.
pub fn boxplus(a: f64, b: f64) -> Result<f64> {
    check_unit(a)?;
    check_unit(b)?;
    Ok(plus(a, b))
}

fn check_regular(dl: usize, dr: usize, eps: f64) -> Result<()> {
    if dl < 2 {
        return Err(Error::Parameter(format!("dl must be at least 2, got {dl}")));
    }
    if dr <= dl {
        return Err(Error::Parameter(format!("dr must exceed dl, got ({dl}, {dr})")));
    }
    check_unit(eps)
}

#[inline]
fn regular_step_unchecked(xi: f64, dl: usize, dr: usize, eps: f64) -> f64 {
    let zeta = ((dr - 1) as f64 * xi).min(1.0);
    (0..dl - 1).fold(eps, |acc, _| dot(acc, zeta))
}

/// One round of the regular recursion: `ζ = ξ^{⊞(dr−1)}`, then `ε ⊡ ζ^{⊡(dl−1)}`.
pub fn de_regular_step(xi: f64, dl: usize, dr: usize, eps: f64) -> Result<f64> {
    check_regular(dl, dr, eps)?;
    check_unit(xi)?;
    Ok(regular_step_unchecked(xi, dl, dr, eps))
}

/// `[ξ⁽⁰⁾, …, ξ⁽ᵀ⁾]` starting from `ξ⁽⁰⁾ = ε`.
pub fn de_regular_trace(dl: usize, dr: usize, eps: f64, steps: usize) -> Result<Vec<f64>> {
    check_regular(dl, dr, eps)?;
    let mut out = Vec::with_capacity(steps + 1);
    let mut xi = eps;
    out.push(xi);
    for _ in 0..steps {
        xi = regular_step_unchecked(xi, dl, dr, eps);
        out.push(xi);
    }
    Ok(out)
}

/// Closed-form `ξ⁽ᵗ⁾` of the regular recursion, valid while `ζ < 1`, i.e. for
/// `ε < 1/(dr−1)`. With `A = (dl−1)(dr−1)`:
///
/// `ξ⁽ᵗ⁾ = max( (dl−1)·Aᵗ/(A−1)·((dr−1)ε − 1) + (ε − (dl−1))/(1 − A), 0 )`
pub fn de_closed_form(dl: usize, dr: usize, eps: f64, t: u32) -> Result<f64> {
    check_regular(dl, dr, eps)?;
    let limit = 1.0 / (dr - 1) as f64;
    if eps >= limit {
        return Err(Error::Domain(format!(
            "closed form needs ε < 1/(dr−1) = {limit}, got {eps}"
        )));
    }
    let a = ((dl - 1) * (dr - 1)) as f64;
    let dl1 = (dl - 1) as f64;
    let growth = dl1 * a.powi(t as i32) / (a - 1.0) * ((dr - 1) as f64 * eps - 1.0);
    let offset = (eps - dl1) / (1.0 - a);
    Ok((growth + offset).max(0.0))
}

/// Result of iterating a recursion until it dies out or freezes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convergence {
    /// Reached zero after this many steps.
    Vanished(usize),
    /// Stopped moving (or hit the step limit) while still positive.
    Stuck(usize),
}

impl Convergence {
    pub fn vanished(self) -> bool {
        matches!(self, Convergence::Vanished(_))
    }
}

/// Iterates the regular recursion from `ε` until `ξ < 1e−12` or a fixed point.
pub fn regular_convergence(dl: usize, dr: usize, eps: f64) -> Result<Convergence> {
    check_regular(dl, dr, eps)?;
    let mut xi = eps;
    for t in 0..REGULAR_MAX_STEPS {
        if xi < ZERO_CUTOFF {
            return Ok(Convergence::Vanished(t));
        }
        let next = regular_step_unchecked(xi, dl, dr, eps);
        if (next - xi).abs() < FIXED_POINT_CUTOFF {
            return Ok(Convergence::Stuck(t));
        }
        xi = next;
    }
    Ok(Convergence::Stuck(REGULAR_MAX_STEPS))
}

/// Largest ε in `[lo, hi]` for which `pred` holds, assuming `pred` is monotone
/// (true below the threshold).
fn bisect<F>(tol: f64, mut pred: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<bool>,
{
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if pred(hi)? {
        return Ok(hi);
    }
    for _ in 0..BISECTION_STEPS {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Supremum of ε for which the regular recursion vanishes, to absolute tolerance `tol`.
pub fn threshold_regular(dl: usize, dr: usize, tol: f64) -> Result<f64> {
    check_regular(dl, dr, 0.0)?;
    bisect(tol, |eps| Ok(regular_convergence(dl, dr, eps)?.vanished()))
}

/// Message state of the coupled recursion.
///
/// `xi[j][k]` is the message from variable section `j` along edge type `k`, to
/// check row `j + k`; `zeta[i][k]` is the message from check row `i` along edge
/// type `k`, to variable section `i − k`. Sections outside `[0, L)` are known and
/// contribute 0.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledDeState {
    dl: usize,
    dr: usize,
    coupling: usize,
    xi: Vec<f64>,
    zeta: Vec<f64>,
    xi_post: Vec<f64>,
}

impl CoupledDeState {
    /// Every in-range message starts at ε; check messages start at 0.
    pub fn initial(dl: usize, dr: usize, coupling: usize, eps: f64) -> Result<CoupledDeState> {
        validate_degrees(dl, dr)?;
        if dl < 2 {
            return Err(Error::Parameter(format!("dl must be at least 2, got {dl}")));
        }
        if coupling == 0 {
            return Err(Error::Parameter("coupling number L must be at least 1".into()));
        }
        check_unit(eps)?;
        Ok(CoupledDeState {
            dl,
            dr,
            coupling,
            xi: vec![eps; coupling * dl],
            zeta: vec![0.0; (coupling + dl - 1) * dl],
            xi_post: vec![eps; coupling],
        })
    }

    pub fn coupling(&self) -> usize {
        self.coupling
    }

    pub fn check_rows(&self) -> usize {
        self.coupling + self.dl - 1
    }

    /// Variable-to-check value, 0 for sections outside `[0, L)`.
    pub fn xi(&self, section: isize, k: usize) -> f64 {
        if section < 0 || section as usize >= self.coupling {
            0.0
        } else {
            self.xi[section as usize * self.dl + k]
        }
    }

    pub fn zeta(&self, row: usize, k: usize) -> f64 {
        self.zeta[row * self.dl + k]
    }

    /// A-posteriori normalized dimension per section.
    pub fn xi_post(&self) -> &[f64] {
        &self.xi_post
    }

    pub fn max_post(&self) -> f64 {
        self.xi_post.iter().copied().fold(0.0, f64::max)
    }

    fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.xi.iter().chain(&self.zeta).chain(&self.xi_post).copied()
    }

    fn distance(&self, other: &CoupledDeState) -> f64 {
        self.values()
            .zip(other.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// One round of the coupled recursion.
///
/// Check row `i`, outgoing type `k`: `⊞` over positions `k'` of `ξ_{i−k', k'}`
/// counted `dr/dl − [k' = k]` times (each covered section contributes `dr/dl`
/// edges, minus the outgoing one). Variable section `j`, outgoing type `k`:
/// `ε ⊡ (⊡_{k' ≠ k} ζ_{j+k', k'})`; the a-posteriori value takes all `k'`.
pub fn de_coupled_step(state: &CoupledDeState, eps: f64) -> Result<CoupledDeState> {
    check_unit(eps)?;
    let (dl, coupling) = (state.dl, state.coupling);
    let ratio = (state.dr / dl) as f64;
    let mut next = state.clone();

    for i in 0..state.check_rows() {
        let incoming: Vec<f64> = (0..dl)
            .map(|kp| state.xi(i as isize - kp as isize, kp))
            .collect();
        let total: f64 = incoming.iter().sum::<f64>() * ratio;
        for k in 0..dl {
            next.zeta[i * dl + k] = (total - incoming[k]).min(1.0);
        }
    }

    for j in 0..coupling {
        for k in 0..dl {
            next.xi[j * dl + k] = (0..dl)
                .filter(|&kp| kp != k)
                .fold(eps, |acc, kp| dot(acc, next.zeta(j + kp, kp)));
        }
        next.xi_post[j] = (0..dl).fold(eps, |acc, kp| dot(acc, next.zeta(j + kp, kp)));
    }
    Ok(next)
}

/// Runs the coupled recursion for at most `max_steps` rounds.
pub fn coupled_convergence(
    dl: usize,
    dr: usize,
    coupling: usize,
    eps: f64,
    max_steps: usize,
) -> Result<Convergence> {
    let mut state = CoupledDeState::initial(dl, dr, coupling, eps)?;
    for t in 1..=max_steps {
        let next = de_coupled_step(&state, eps)?;
        if next.max_post() < ZERO_CUTOFF {
            return Ok(Convergence::Vanished(t));
        }
        if next.distance(&state) < FIXED_POINT_CUTOFF {
            return Ok(Convergence::Stuck(t));
        }
        state = next;
    }
    Ok(Convergence::Stuck(max_steps))
}

/// Default step budget for the coupled predicate: `10·(L + dl)`.
pub fn default_coupled_steps(dl: usize, coupling: usize) -> usize {
    10 * (coupling + dl)
}

/// Supremum of ε for which every section's a-posteriori value vanishes within
/// `max_steps` rounds. Not converging within the budget counts as failure.
pub fn threshold_coupled(dl: usize, dr: usize, coupling: usize, tol: f64, max_steps: usize) -> Result<f64> {
    CoupledDeState::initial(dl, dr, coupling, 0.0)?;
    bisect(tol, |eps| {
        Ok(coupled_convergence(dl, dr, coupling, eps, max_steps)?.vanished())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_operator_examples() {
        assert!((boxdot(0.7, 0.6).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(boxdot(0.37, 1.0).unwrap(), 0.37);
        assert_eq!(boxdot(0.3, 0.3).unwrap(), 0.0);
        assert_eq!(boxplus(0.7, 0.6).unwrap(), 1.0);
        assert_eq!(boxplus(0.37, 0.0).unwrap(), 0.37);
        for (a, b) in [(0.1, 0.2), (0.5, 0.7), (0.0, 1.0), (0.9, 0.95)] {
            let lhs = 1.0 - boxplus(a, b).unwrap();
            let rhs = boxdot(1.0 - a, 1.0 - b).unwrap();
            assert!((lhs - rhs).abs() < 1e-15);
        }
        assert!(boxdot(1.2, 0.0).is_err());
        assert!(boxplus(0.0, -0.1).is_err());
    }

    #[test]
    fn regular_step_examples() {
        assert_eq!(de_regular_step(0.25, 3, 6, 0.25).unwrap(), 0.25);
        let x1 = de_regular_step(0.19, 3, 6, 0.19).unwrap();
        assert!((x1 - 0.09).abs() < 1e-12);
        assert_eq!(de_regular_step(x1, 3, 6, 0.19).unwrap(), 0.0);
        assert_eq!(de_regular_step(0.0, 3, 6, 0.3).unwrap(), 0.0);
        assert!(de_regular_step(0.1, 1, 6, 0.1).is_err());
        assert!(de_regular_step(0.1, 3, 3, 0.1).is_err());
    }

    #[test]
    fn regular_trace_examples() {
        let t = de_regular_trace(3, 6, 0.1, 4).unwrap();
        assert_eq!(t[0], 0.1);
        assert!(t[1..].iter().all(|&x| x == 0.0));
        assert!(de_regular_trace(3, 6, 0.25, 50).unwrap().iter().all(|&x| x == 0.25));
        let t = de_regular_trace(4, 8, 0.14, 30).unwrap();
        assert!(t.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn closed_form_examples() {
        assert!((de_closed_form(3, 6, 0.19, 0).unwrap() - 0.19).abs() < 1e-15);
        assert!((de_closed_form(3, 6, 0.19, 1).unwrap() - 0.09).abs() < 1e-12);
        assert_eq!(de_closed_form(3, 6, 0.19, 2).unwrap(), 0.0);
        assert!(matches!(de_closed_form(3, 6, 0.2, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn regular_thresholds() {
        for (dl, dr) in [(2, 4), (3, 6), (4, 8)] {
            let t = threshold_regular(dl, dr, 1e-9).unwrap();
            assert!((t - 1.0 / (dr - 1) as f64).abs() < 1e-9, "({dl},{dr}) -> {t}");
        }
    }

    #[test]
    fn coupled_one_step_hand_values() {
        let s0 = CoupledDeState::initial(3, 6, 64, 0.5).unwrap();
        let s1 = de_coupled_step(&s0, 0.5).unwrap();
        // boundary check row 0 sees only section 0 on type 0: multiplicity 2 − 1
        assert_eq!(s1.zeta(0, 0), 0.5);
        for i in 2..64 {
            for k in 0..3 {
                assert_eq!(s1.zeta(i, k), 1.0);
            }
        }
        assert_eq!(s1.xi(0, 1), 0.0);
        assert_eq!(s1.xi(30, 1), 0.5);
    }

    #[test]
    fn coupled_zero_noise() {
        let s0 = CoupledDeState::initial(3, 6, 10, 0.0).unwrap();
        let s1 = de_coupled_step(&s0, 0.0).unwrap();
        assert!(s1.values().all(|v| v == 0.0));
    }

    #[test]
    fn coupled_interior_matches_regular() {
        let (dl, dr, l, eps) = (3, 6, 80, 0.19);
        let regular = de_regular_trace(dl, dr, eps, 6).unwrap();
        let mut s = CoupledDeState::initial(dl, dr, l, eps).unwrap();
        for t in 1..=6 {
            s = de_coupled_step(&s, eps).unwrap();
            // boundary influence travels at most dl rows per round
            let mid = (l / 2) as isize;
            for k in 0..dl {
                assert!((s.xi(mid, k) - regular[t]).abs() < 1e-12, "t={t}");
            }
        }
    }

    #[test]
    fn coupled_beats_regular() {
        let reg = threshold_regular(3, 6, 1e-6).unwrap();
        let cpl = threshold_coupled(3, 6, 16, 1e-6, default_coupled_steps(3, 16)).unwrap();
        assert!(cpl >= reg, "{cpl} < {reg}");
    }

    #[test]
    fn coupled_threshold_settles_on_ratio_from_above() {
        // shorter chains carry proportionally more pinned boundary, so they decode more
        let tol = 1e-9;
        let th: Vec<f64> = [8, 16, 32, 64]
            .iter()
            .map(|&l| threshold_coupled(3, 6, l, tol, default_coupled_steps(3, l)).unwrap())
            .collect();
        assert!(th.windows(2).all(|w| w[1] <= w[0] + tol), "{th:?}");
        assert!(th.iter().all(|&t| t >= 0.5 - tol), "{th:?}");
        assert!(th[0] > 0.505 && th[3] - 0.5 < 1e-6, "{th:?}");
    }
}
