//! Symmetric finite differences with Richardson extrapolation.

use super::NumericsError;

/// Step-size ladder for Richardson extrapolation; the step halves per level.
#[derive(Debug, Clone, Copy)]
pub struct DiffSpec {
    /// Base step, in units of the differentiation variable.
    pub step: f64,
    /// Number of ladder entries (≥ 1).
    pub levels: usize,
    /// Leading error power p of the base difference (error ~ h^p). The
    /// classic symmetric second difference has p = 2; sequences contaminated
    /// by odd terms (e.g. a |k|³ term in the function) use p = 1.
    pub error_order: u32,
}

impl DiffSpec {
    pub fn new(step: f64, levels: usize) -> Self {
        Self { step, levels, error_order: 2 }
    }
}

/// Extrapolated derivative with an error estimate from the last two ladder
/// entries; `converged` is false when the Richardson tableau is not settling
/// monotonically.
#[derive(Debug, Clone, Copy)]
pub struct DiffResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

fn richardson(samples: &[f64], error_order: u32) -> DiffResult {
    let n = samples.len();
    let mut table = samples.to_vec();
    let mut diag = vec![table[0]];
    for level in 1..n {
        let p = error_order + (level as u32 - 1);
        let factor = 2f64.powi(p as i32);
        for i in (level..n).rev() {
            table[i] = (factor * table[i] - table[i - 1]) / (factor - 1.0);
        }
        diag.push(table[n - 1]);
    }
    let value = *diag.last().unwrap();
    let (error, converged) = if n >= 2 {
        let last_step = (diag[n - 1] - diag[n - 2]).abs();
        let settled = if n >= 3 {
            let prev_step = (diag[n - 2] - diag[n - 3]).abs();
            last_step <= prev_step || last_step < 1e-12 * value.abs()
        } else {
            true
        };
        (last_step, settled)
    } else {
        (f64::INFINITY, false)
    };
    DiffResult { value, error, converged }
}

/// Second derivative of `f` at `x0` from symmetric differences on a halving
/// step ladder, Richardson-extrapolated.
pub fn second_derivative_at<F: FnMut(f64) -> Result<f64, NumericsError>>(
    mut f: F,
    x0: f64,
    spec: &DiffSpec,
) -> Result<DiffResult, NumericsError> {
    assert!(spec.step > 0.0 && spec.levels >= 1);
    let f0 = f(x0)?;
    let mut samples = Vec::with_capacity(spec.levels);
    let mut h = spec.step;
    for _ in 0..spec.levels {
        let d2 = (f(x0 + h)? - 2.0 * f0 + f(x0 - h)?) / (h * h);
        samples.push(d2);
        h *= 0.5;
    }
    Ok(richardson(&samples, spec.error_order))
}

/// Richardson-extrapolate an externally computed sample ladder D(h),
/// D(h/2), … toward h → 0. Used where the samples are expensive integrals.
pub fn extrapolate_ladder(samples: &[f64], error_order: u32) -> DiffResult {
    richardson(samples, error_order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(f: impl Fn(f64) -> f64) -> impl FnMut(f64) -> Result<f64, NumericsError> {
        move |x| Ok(f(x))
    }

    #[test]
    fn quadratic_is_exact() {
        let r = second_derivative_at(ok(|x| x * x), 0.0, &DiffSpec::new(0.1, 1)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn cosine_at_zero() {
        let r = second_derivative_at(ok(f64::cos), 0.0, &DiffSpec::new(0.2, 4)).unwrap();
        assert!(r.converged);
        assert!((r.value + 1.0).abs() < 1e-9, "value {}", r.value);
    }

    #[test]
    fn constant_gives_zero() {
        let r = second_derivative_at(ok(|_| 3.25), 1.0, &DiffSpec::new(0.1, 2)).unwrap();
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn exponentials_to_1e6_relative() {
        for a in [-5.0, -1.0, 0.5, 2.0, 5.0] {
            let f = move |x: f64| (a * x).exp();
            let r = second_derivative_at(ok(f), 0.3, &DiffSpec::new(0.05, 4)).unwrap();
            let exact = a * a * (a * 0.3f64).exp();
            assert!(
                ((r.value - exact) / exact).abs() < 1e-6,
                "a={a}: {} vs {exact}",
                r.value
            );
        }
    }

    #[test]
    fn first_order_ladder_removes_linear_error() {
        // D(h) = 5 + 3h + h^2: ladder with error_order 1 must recover 5
        let samples: Vec<f64> = [0.4, 0.2, 0.1]
            .iter()
            .map(|h| 5.0 + 3.0 * h + h * h)
            .collect();
        let r = extrapolate_ladder(&samples, 1);
        assert!((r.value - 5.0).abs() < 1e-12, "value {}", r.value);
    }
}
