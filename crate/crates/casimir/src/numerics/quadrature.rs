//! Adaptive quadrature built on the 15-point Gauss–Kronrod rule, with a
//! logarithmic substitution for semi-infinite ranges with exponentially
//! decaying integrands.

use super::NumericsError;

/// 15-point Kronrod abscissae (positive half) for [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.000_000_000_000_000_0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// 7-point Gauss weights for the embedded rule (nodes are XGK[1], XGK[3], ...).
const WG: [f64; 4] = [
    0.129_484_966_168_869_93,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// Integration interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Interval {
    /// Finite [a, b].
    Finite(f64, f64),
    /// Semi-infinite [a, ∞); the integrand must decay integrably. Internally
    /// mapped by x = a − scale·ln(1−t) onto t ∈ [0, 1), which is exact in
    /// conditioning for e^{−x/scale} tails.
    SemiInfinite { start: f64, scale: f64 },
}

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64) -> Self {
        Self { rel_tol, abs_tol: 1e-300, max_subdivisions: 200 }
    }

    fn validate(&self) -> Result<(), NumericsError> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(NumericsError::BadSpec(format!(
                "relative tolerance {} outside (0, 1)",
                self.rel_tol
            )));
        }
        if self.abs_tol < 0.0 {
            return Err(NumericsError::BadSpec("negative absolute tolerance".into()));
        }
        Ok(())
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::new(1e-8)
    }
}

/// Quadrature outcome; `converged` is false when the error estimate still
/// exceeds the requested tolerance after the subdivision budget.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> Result<f64, NumericsError>>(
    f: &F,
    a: f64,
    b: f64,
) -> Result<(f64, f64), NumericsError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64, NumericsError> {
        let v = f(x)?;
        if !v.is_finite() {
            return Err(NumericsError::NonFiniteIntegrand { abscissa: x });
        }
        Ok(v)
    };
    let fc = eval(center)?;
    let mut flo = [0.0f64; 7];
    let mut fhi = [0.0f64; 7];
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        flo[i] = eval(center - dx)?;
        fhi[i] = eval(center + dx)?;
        let fsum = flo[i] + fhi[i];
        kronrod += WGK[i] * fsum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fsum;
        }
    }
    let value = kronrod * half;
    // QUADPACK error estimate: scale |K−G| by how much the integrand
    // deviates from its panel mean (resasc)
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for i in 0..7 {
        resasc += WGK[i] * ((flo[i] - mean).abs() + (fhi[i] - mean).abs());
    }
    resasc *= half.abs();
    let raw = ((kronrod - gauss) * half).abs();
    let mut error = raw;
    if resasc != 0.0 && raw != 0.0 {
        error = resasc * (200.0 * raw / resasc).powf(1.5).min(1.0);
    }
    Ok((value, error.max(f64::EPSILON * value.abs())))
}

/// Adaptive integration of `f` over `interval`, worst-panel-first.
///
/// Returns a flagged (not silent) result when the budget is exhausted; a NaN
/// or infinite integrand value is a hard error naming the abscissa.
pub fn integrate<F: Fn(f64) -> Result<f64, NumericsError>>(
    f: F,
    interval: Interval,
    spec: &QuadratureSpec,
) -> Result<QuadResult, NumericsError> {
    spec.validate()?;
    match interval {
        Interval::Finite(a, b) => integrate_finite(&f, a, b, spec),
        Interval::SemiInfinite { start, scale } => {
            if !(scale > 0.0) {
                return Err(NumericsError::BadSpec("semi-infinite scale must be > 0".into()));
            }
            // x = start − scale ln(1−t), dx = scale/(1−t) dt, t ∈ [0,1)
            let g = |t: f64| -> Result<f64, NumericsError> {
                let one_m_t = 1.0 - t;
                if one_m_t <= 0.0 {
                    return Ok(0.0);
                }
                let x = start - scale * one_m_t.ln();
                Ok(f(x)? * scale / one_m_t)
            };
            integrate_finite(&g, 0.0, 1.0, spec)
        }
    }
}

fn integrate_finite<F: Fn(f64) -> Result<f64, NumericsError>>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult, NumericsError> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, converged: true, evaluations: 0 });
    }
    let (value, error) = gk15(f, a, b)?;
    let mut evaluations = 15;
    let mut panels = vec![Panel { a, b, value, error }];
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let tol = (spec.rel_tol * total.abs()).max(spec.abs_tol);
        if err <= tol {
            return Ok(QuadResult { value: total, error: err, converged: true, evaluations });
        }
        if panels.len() >= spec.max_subdivisions {
            return Ok(QuadResult { value: total, error: err, converged: false, evaluations });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("non-empty panel list");
        let Panel { a, b, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (a + b);
        let (v1, e1) = gk15(f, a, mid)?;
        let (v2, e2) = gk15(f, mid, b)?;
        evaluations += 30;
        panels.push(Panel { a, b: mid, value: v1, error: e1 });
        panels.push(Panel { a: mid, b, value: v2, error: e2 });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> Result<f64, NumericsError> {
        move |x| Ok(f(x))
    }

    #[test]
    fn constant_on_unit_interval() {
        let r = integrate(ok(|_| 1.0), Interval::Finite(0.0, 1.0), &QuadratureSpec::default())
            .unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_four() {
        // ∫_0^∞ x^3 e^{-x} dx = 6
        let r = integrate(
            ok(|x: f64| x.powi(3) * (-x).exp()),
            Interval::SemiInfinite { start: 0.0, scale: 1.0 },
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!(r.converged);
        assert!((r.value - 6.0).abs() < 1e-7 * 6.0, "value {}", r.value);
    }

    #[test]
    fn exponential_tail() {
        let r = integrate(
            ok(|x: f64| (-2.0 * x).exp()),
            Interval::SemiInfinite { start: 0.0, scale: 1.0 },
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((r.value - 0.5).abs() < 1e-8);
    }

    #[test]
    fn polynomial_is_machine_exact() {
        // GK15 is exact for polynomials well past degree 7
        let r = integrate(
            ok(|x: f64| 5.0 * x.powi(4) - 3.0 * x * x + 2.0),
            Interval::Finite(-1.0, 2.0),
            &QuadratureSpec::default(),
        )
        .unwrap();
        let exact = (2.0f64.powi(5) + 1.0) - (2.0f64.powi(3) + 1.0) + 2.0 * 3.0;
        assert!((r.value - exact).abs() < 1e-13 * exact.abs());
    }

    #[test]
    fn nan_is_a_hard_error() {
        let r = integrate(
            ok(|x: f64| if x > 0.5 { f64::NAN } else { 1.0 }),
            Interval::Finite(0.0, 1.0),
            &QuadratureSpec::default(),
        );
        match r {
            Err(NumericsError::NonFiniteIntegrand { abscissa }) => assert!(abscissa > 0.5),
            other => panic!("expected NonFiniteIntegrand, got {other:?}"),
        }
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let spec = QuadratureSpec { rel_tol: 1e-14, abs_tol: 0.0, max_subdivisions: 3 };
        let r = integrate(
            ok(|x: f64| (1.0 / (1e-4 + x * x)).sin()),
            Interval::Finite(0.0, 1.0),
            &spec,
        )
        .unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn bad_spec_rejected() {
        let spec = QuadratureSpec { rel_tol: 0.0, ..QuadratureSpec::default() };
        assert!(integrate(ok(|_| 1.0), Interval::Finite(0.0, 1.0), &spec).is_err());
    }
}
