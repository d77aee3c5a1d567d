//! Convergent-series summation with a consecutive-small-terms stop rule.

use super::NumericsError;

/// Number of consecutive negligible terms required before stopping; three
/// protects against even/odd term oscillation.
pub const TAIL_RUN: usize = 3;

#[derive(Debug, Clone, Copy)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: u64,
    pub converged: bool,
}

/// Sum `term(n)` from n = 0 until `TAIL_RUN` consecutive terms each
/// contribute less than `rel_tol · |partial sum|`, or `cap` terms elapse
/// (flagged, not silent).
pub fn sum_until<F: FnMut(u64) -> Result<f64, NumericsError>>(
    mut term: F,
    rel_tol: f64,
    cap: u64,
) -> Result<SeriesResult, NumericsError> {
    let mut total = 0.0;
    let mut small_run = 0;
    let mut n = 0u64;
    while n < cap {
        let t = term(n)?;
        if !t.is_finite() {
            return Err(NumericsError::NonFiniteTerm { index: n });
        }
        total += t;
        n += 1;
        if t.abs() <= rel_tol * total.abs().max(f64::MIN_POSITIVE) {
            small_run += 1;
            if small_run >= TAIL_RUN {
                return Ok(SeriesResult { value: total, terms_used: n, converged: true });
            }
        } else {
            small_run = 0;
        }
    }
    Ok(SeriesResult { value: total, terms_used: n, converged: false })
}
