//! The m-Bakry-Emery Ricci tensor Ric + Hess f - (1/m) df (x) df, its
//! weighted scalar curvature, and the quasi-Einstein residual.

use crate::chart::{MetricField, ScalarField};
use crate::error::GeomError;
use crate::expr::Expr;
use crate::geometry::{
    grad_norm_sq_from_jet, hessian_from_jet, laplacian_from_jet, max_abs, projective_conn,
    trace2, AffineConn, PointFrame,
};
use nalgebra::DMatrix;

/// The parameter m: a nonzero real, or infinity (in which case the
/// (1/m) df (x) df term is structurally absent).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BEParam {
    Finite(f64),
    Infinite,
}

impl BEParam {
    pub fn finite(m: f64) -> Result<BEParam, GeomError> {
        if m == 0.0 || !m.is_finite() {
            return Err(GeomError::Invalid(format!(
                "Bakry-Emery parameter must be a nonzero real or `inf`, got {m}"
            )));
        }
        Ok(BEParam::Finite(m))
    }

    /// Coefficient of df (x) df in Ric_f^m.
    fn outer_coeff(self) -> f64 {
        match self {
            BEParam::Finite(m) => -1.0 / m,
            BEParam::Infinite => 0.0,
        }
    }
}

impl std::str::FromStr for BEParam {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "+inf" => Ok(BEParam::Infinite),
            other => {
                let m: f64 = other
                    .parse()
                    .map_err(|_| GeomError::Invalid(format!("cannot parse `{other}` as m")))?;
                BEParam::finite(m)
            }
        }
    }
}

impl std::fmt::Display for BEParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BEParam::Finite(m) => write!(f, "{m}"),
            BEParam::Infinite => write!(f, "inf"),
        }
    }
}

/// Ric_f^m = Ric + Hess f - (1/m) df (x) df at the frame's point.
pub fn be_ricci(
    f: &ScalarField,
    m: BEParam,
    frame: &PointFrame,
) -> Result<DMatrix<f64>, GeomError> {
    let jet = f.jet(frame.point()).map_err(GeomError::Eval)?;
    let n = frame.dim();
    let hess = hessian_from_jet(&jet, frame);
    let c = m.outer_coeff();
    let ric = frame.ricci();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        ric[(i, j)] + hess[(i, j)] + c * jet.d1(i) * jet.d1(j)
    }))
}

/// Weighted scalar curvature R_(g,f) = R + lap f - |grad f|^2, the metric
/// trace of Ric_f^1.
pub fn weighted_scalar(f: &ScalarField, frame: &PointFrame) -> Result<f64, GeomError> {
    let jet = f.jet(frame.point()).map_err(GeomError::Eval)?;
    Ok(frame.scalar_curv() + laplacian_from_jet(&jet, frame) - grad_norm_sq_from_jet(&jet, frame))
}

/// Sign class of the quasi-Einstein constant, following the Ricci soliton
/// terminology.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolitonClass {
    Expanding,
    Steady,
    Shrinking,
}

impl SolitonClass {
    pub fn of(lambda: f64) -> SolitonClass {
        if lambda < 0.0 {
            SolitonClass::Expanding
        } else if lambda > 0.0 {
            SolitonClass::Shrinking
        } else {
            SolitonClass::Steady
        }
    }
}

impl std::fmt::Display for SolitonClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolitonClass::Expanding => write!(f, "expanding"),
            SolitonClass::Steady => write!(f, "steady"),
            SolitonClass::Shrinking => write!(f, "shrinking"),
        }
    }
}

/// A candidate quasi-Einstein structure Ric_f^m = lambda g.
#[derive(Debug, Clone)]
pub struct QEInstance {
    pub g: MetricField,
    pub f: ScalarField,
    pub m: BEParam,
    pub lambda: f64,
}

impl QEInstance {
    pub fn new(
        g: MetricField,
        f: ScalarField,
        m: BEParam,
        lambda: f64,
    ) -> Result<QEInstance, GeomError> {
        if g.chart() != f.chart() {
            return Err(GeomError::Invalid(
                "metric and potential live on different charts".into(),
            ));
        }
        Ok(QEInstance { g, f, m, lambda })
    }

    pub fn classification(&self) -> SolitonClass {
        SolitonClass::of(self.lambda)
    }

    /// Residual tensor Ric_f^m - lambda g and its max-abs-entry norm.
    pub fn residual(&self, frame: &PointFrame) -> Result<(DMatrix<f64>, f64), GeomError> {
        let be = be_ricci(&self.f, self.m, frame)?;
        let res = be - frame.metric() * self.lambda;
        let norm = max_abs(&res);
        Ok((res, norm))
    }
}

/// Least-squares quasi-Einstein constant over a point set:
/// argmin_lambda sum_p |Ric_f^m - lambda g|^2 = mean of trace2(Ric_f^m)/n.
pub fn best_lambda(
    g: &MetricField,
    f: &ScalarField,
    m: BEParam,
    pts: &[Vec<f64>],
) -> Result<f64, GeomError> {
    assert!(!pts.is_empty());
    let n = g.dim() as f64;
    let mut acc = 0.0;
    for p in pts {
        let frame = PointFrame::new(g, p)?;
        acc += trace2(&be_ricci(f, m, &frame)?, &frame) / n;
    }
    Ok(acc / pts.len() as f64)
}

/// Component expressions of the 1-form df, obtained by symbolic
/// differentiation of the potential's tree.
pub fn df_covector(f: &ScalarField) -> Vec<Expr> {
    let n = f.chart().dim();
    (0..n).map(|i| differentiate(f.expr(), i)).collect()
}

/// Symbolic partial derivative of an expression tree with respect to
/// coordinate `i`. No simplification beyond trivial constant folding of
/// products with zero; trees stay small for the field classes used here.
pub fn differentiate(e: &Expr, i: usize) -> Expr {
    use crate::expr::{BinOp, UnaryOp};
    match e {
        Expr::Const(_) => Expr::Const(0.0),
        Expr::Var { index, .. } => Expr::Const(if *index == i { 1.0 } else { 0.0 }),
        Expr::Unary(op, a) => {
            let da = differentiate(a, i);
            if is_zero(&da) {
                return Expr::Const(0.0);
            }
            let outer = match op {
                UnaryOp::Neg => return Expr::neg(da),
                UnaryOp::Sin => Expr::apply(UnaryOp::Cos, (**a).clone()),
                UnaryOp::Cos => Expr::neg(Expr::apply(UnaryOp::Sin, (**a).clone())),
                UnaryOp::Exp => Expr::apply(UnaryOp::Exp, (**a).clone()),
                UnaryOp::Ln => Expr::div(Expr::Const(1.0), (**a).clone()),
                UnaryOp::Sqrt => Expr::div(
                    Expr::Const(0.5),
                    Expr::apply(UnaryOp::Sqrt, (**a).clone()),
                ),
                UnaryOp::Sinh => Expr::apply(UnaryOp::Cosh, (**a).clone()),
                UnaryOp::Cosh => Expr::apply(UnaryOp::Sinh, (**a).clone()),
                UnaryOp::Tanh => Expr::sub(
                    Expr::Const(1.0),
                    Expr::pow(Expr::apply(UnaryOp::Tanh, (**a).clone()), 2.0),
                ),
            };
            mul_simplified(outer, da)
        }
        Expr::Binary(op, a, b) => {
            let da = differentiate(a, i);
            let db = differentiate(b, i);
            match op {
                BinOp::Add => add_simplified(da, db),
                BinOp::Sub => match (is_zero(&da), is_zero(&db)) {
                    (_, true) => da,
                    (true, false) => Expr::neg(db),
                    _ => Expr::sub(da, db),
                },
                BinOp::Mul => add_simplified(
                    mul_simplified(da, (**b).clone()),
                    mul_simplified((**a).clone(), db),
                ),
                BinOp::Div => {
                    // (a/b)' = a'/b - a b'/b^2
                    let t1 = if is_zero(&da) {
                        Expr::Const(0.0)
                    } else {
                        Expr::div(da, (**b).clone())
                    };
                    let t2 = if is_zero(&db) {
                        Expr::Const(0.0)
                    } else {
                        Expr::div(
                            Expr::mul((**a).clone(), db),
                            Expr::pow((**b).clone(), 2.0),
                        )
                    };
                    match (is_zero(&t1), is_zero(&t2)) {
                        (_, true) => t1,
                        (true, false) => Expr::neg(t2),
                        _ => Expr::sub(t1, t2),
                    }
                }
            }
        }
        Expr::Pow(a, c) => {
            let da = differentiate(a, i);
            if is_zero(&da) || *c == 0.0 {
                return Expr::Const(0.0);
            }
            mul_simplified(
                Expr::mul(Expr::Const(*c), Expr::pow((**a).clone(), c - 1.0)),
                da,
            )
        }
    }
}

fn is_zero(e: &Expr) -> bool {
    matches!(e, Expr::Const(v) if *v == 0.0)
}

fn is_one(e: &Expr) -> bool {
    matches!(e, Expr::Const(v) if *v == 1.0)
}

fn mul_simplified(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        Expr::Const(0.0)
    } else if is_one(&a) {
        b
    } else if is_one(&b) {
        a
    } else {
        Expr::mul(a, b)
    }
}

fn add_simplified(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        b
    } else if is_zero(&b) {
        a
    } else {
        Expr::add(a, b)
    }
}

/// The connection whose Ricci tensor equals Ric_f^(1-n): the projective
/// deformation by alpha = df / (n-1).
pub fn grad_projective_conn(
    g: &MetricField,
    f: &ScalarField,
) -> Result<AffineConn, GeomError> {
    if g.chart() != f.chart() {
        return Err(GeomError::Invalid(
            "metric and potential live on different charts".into(),
        ));
    }
    let n = g.dim();
    if n < 2 {
        return Err(GeomError::DimensionTooSmall {
            required: 2,
            actual: n,
        });
    }
    let scale = 1.0 / (n as f64 - 1.0);
    let alpha = df_covector(f)
        .into_iter()
        .map(|e| mul_simplified(Expr::Const(scale), e))
        .collect();
    projective_conn(g, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{Axis, Chart};
    use crate::geometry::max_abs;
    use approx::assert_abs_diff_eq;

    fn flat2() -> (MetricField, Chart) {
        let chart = Chart::named(
            &["x", "y"],
            vec![Axis::open(-5.0, 5.0), Axis::open(-5.0, 5.0)],
        )
        .unwrap();
        (MetricField::euclidean(chart.clone()), chart)
    }

    #[test]
    fn constant_potential_reduces_to_ricci() {
        let chart = Chart::named(
            &["th", "ph"],
            vec![
                Axis::open(0.1, 3.0),
                Axis::periodic(0.0, std::f64::consts::TAU),
            ],
        )
        .unwrap();
        let g = MetricField::diagonal(
            chart.clone(),
            vec![Expr::Const(1.0), chart.parse_expr("sin(th)^2").unwrap()],
        )
        .unwrap();
        let f = ScalarField::new(chart, Expr::Const(7.0)).unwrap();
        let frame = PointFrame::new(&g, &[1.1, 0.4]).unwrap();
        for m in [BEParam::Finite(1.0), BEParam::Finite(-3.0), BEParam::Infinite] {
            let be = be_ricci(&f, m, &frame).unwrap();
            assert!(max_abs(&(be - frame.ricci())) < 1e-15);
        }
    }

    #[test]
    fn gradient_soliton_form_on_flat_plane() {
        // m = inf, flat, f = x^2/2: Ric_f^inf = Hess f = diag(1, 0)
        let (g, chart) = flat2();
        let f = ScalarField::new(chart.clone(), chart.parse_expr("x^2/2").unwrap()).unwrap();
        let frame = PointFrame::new(&g, &[0.7, -0.2]).unwrap();
        let be = be_ricci(&f, BEParam::Infinite, &frame).unwrap();
        assert_abs_diff_eq!(be[(0, 0)], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(be[(1, 1)], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(be[(0, 1)], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn interpolation_in_one_over_m() {
        let (g, chart) = flat2();
        let f = ScalarField::new(chart.clone(), chart.parse_expr("sin(x)*cos(y)").unwrap())
            .unwrap();
        let frame = PointFrame::new(&g, &[0.3, 0.9]).unwrap();
        let jet = f.jet(frame.point()).unwrap();
        for m in [2.0, -1.5, 7.0] {
            let be_m = be_ricci(&f, BEParam::Finite(m), &frame).unwrap();
            let be_inf = be_ricci(&f, BEParam::Infinite, &frame).unwrap();
            let n = frame.dim();
            let outer =
                DMatrix::from_fn(n, n, |i, j| jet.d1(i) * jet.d1(j) / m);
            assert!(max_abs(&(be_inf - be_m - outer)) < 1e-15);
        }
    }

    #[test]
    fn weighted_scalar_is_trace_of_be1() {
        let (g, chart) = flat2();
        let f = ScalarField::new(chart.clone(), chart.parse_expr("sin(x)").unwrap()).unwrap();
        // at x = 0: R + lap f - |grad f|^2 = 0 - sin(0) - cos(0)^2 = -1
        let frame = PointFrame::new(&g, &[0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(weighted_scalar(&f, &frame).unwrap(), -1.0, epsilon = 1e-14);
        for p in [[0.4, 1.0], [-0.9, 0.3]] {
            let frame = PointFrame::new(&g, &p).unwrap();
            let ws = weighted_scalar(&f, &frame).unwrap();
            let tr = trace2(
                &be_ricci(&f, BEParam::Finite(1.0), &frame).unwrap(),
                &frame,
            );
            assert_abs_diff_eq!(ws, tr, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_m_is_rejected() {
        assert!(BEParam::finite(0.0).is_err());
        assert!("0".parse::<BEParam>().is_err());
        assert!(matches!("inf".parse::<BEParam>(), Ok(BEParam::Infinite)));
        assert!(matches!(
            "-2.5".parse::<BEParam>(),
            Ok(BEParam::Finite(m)) if m == -2.5
        ));
    }

    #[test]
    fn qe_residual_with_constant_potential_is_ric_minus_lambda_g() {
        let chart = Chart::named(
            &["th", "ph"],
            vec![
                Axis::open(0.2, 2.9),
                Axis::periodic(0.0, std::f64::consts::TAU),
            ],
        )
        .unwrap();
        let g = MetricField::diagonal(
            chart.clone(),
            vec![Expr::Const(1.0), chart.parse_expr("sin(th)^2").unwrap()],
        )
        .unwrap();
        let f = ScalarField::new(chart, Expr::Const(0.0)).unwrap();
        // unit sphere: Ric = g, so lambda = 1 gives residual 0
        let inst = QEInstance::new(g.clone(), f, BEParam::Finite(4.0), 1.0).unwrap();
        let frame = PointFrame::new(&g, &[1.2, 2.0]).unwrap();
        let (_, norm) = inst.residual(&frame).unwrap();
        assert!(norm < 1e-9);
        assert_eq!(inst.classification(), SolitonClass::Shrinking);
    }

    #[test]
    fn lambda_perturbation_scales_linearly() {
        let chart = Chart::named(
            &["th", "ph"],
            vec![
                Axis::open(0.2, 2.9),
                Axis::periodic(0.0, std::f64::consts::TAU),
            ],
        )
        .unwrap();
        let g = MetricField::diagonal(
            chart.clone(),
            vec![Expr::Const(1.0), chart.parse_expr("sin(th)^2").unwrap()],
        )
        .unwrap();
        let f = ScalarField::new(chart, Expr::Const(0.0)).unwrap();
        let eps = 1e-3;
        let inst = QEInstance::new(g.clone(), f, BEParam::Finite(1.0), 1.0 + eps).unwrap();
        let frame = PointFrame::new(&g, &[1.2, 2.0]).unwrap();
        let (_, norm) = inst.residual(&frame).unwrap();
        let gnorm = max_abs(frame.metric());
        assert_abs_diff_eq!(norm, eps * gnorm, epsilon = 1e-12);
    }

    #[test]
    fn symbolic_derivative_drives_projective_covector() {
        let (_, chart) = flat2();
        let f = ScalarField::new(
            chart.clone(),
            chart.parse_expr("sin(x)*exp(y) + x^3/3").unwrap(),
        )
        .unwrap();
        let alpha = df_covector(&f);
        // check against jets at a couple of points
        for p in [[0.3, -0.5], [1.1, 0.2]] {
            let jet = f.jet(&p).unwrap();
            for i in 0..2 {
                let v = alpha[i].eval(&p).unwrap();
                assert_abs_diff_eq!(v, jet.d1(i), epsilon = 1e-13);
            }
        }
    }
}
