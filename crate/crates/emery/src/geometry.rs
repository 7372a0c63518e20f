//! Pointwise tensor calculus: Levi-Civita connection, curvature of metric
//! and general torsion-free affine connections, Hessians, Laplacians and
//! divergences. All public tensors are returned fully covariant (except
//! gradients and connection coefficients); raising is explicit via the
//! inverse metric. Sign convention: the unit 2-sphere has R = +2.

use crate::chart::{MetricField, ScalarField, SymJets, SymTensorField, MIN_ABS_DET};
use crate::error::GeomError;
use crate::expr::Expr;
use crate::jet::Jet;
use nalgebra::{DMatrix, DVector};
use std::cell::OnceCell;

/// Dense rank-3 array indexed [a][i][j].
#[derive(Debug, Clone)]
pub struct Ten3 {
    n: usize,
    a: Vec<f64>,
}

impl Ten3 {
    pub fn zeros(n: usize) -> Ten3 {
        Ten3 {
            n,
            a: vec![0.0; n * n * n],
        }
    }

    #[inline]
    pub fn get(&self, a: usize, i: usize, j: usize) -> f64 {
        self.a[(a * self.n + i) * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, a: usize, i: usize, j: usize, v: f64) {
        self.a[(a * self.n + i) * self.n + j] = v;
    }
}

/// Dense rank-4 array indexed [a][b][i][j].
#[derive(Debug, Clone)]
pub struct Ten4 {
    n: usize,
    a: Vec<f64>,
}

impl Ten4 {
    pub fn zeros(n: usize) -> Ten4 {
        Ten4 {
            n,
            a: vec![0.0; n * n * n * n],
        }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, i: usize, j: usize) -> f64 {
        self.a[((a * self.n + b) * self.n + i) * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, i: usize, j: usize, v: f64) {
        self.a[((a * self.n + b) * self.n + i) * self.n + j] = v;
    }
}

/// All metric-derived data at one point, built once and reused by every
/// operation evaluated there.
pub struct PointFrame {
    point: Vec<f64>,
    n: usize,
    g: DMatrix<f64>,
    ginv: DMatrix<f64>,
    det: f64,
    /// dg[k][i][j] = d_k g_ij
    dg: Ten3,
    /// d2g[k][l][i][j] = d_k d_l g_ij
    d2g: Ten4,
    /// dginv[k][i][j] = d_k g^ij
    dginv: Ten3,
    /// d2ginv[k][l][i][j] = d_k d_l g^ij
    d2ginv: Ten4,
    /// gamma[c][a][b] = Gamma^c_ab
    gamma: Ten3,
    /// dgamma[m][c][a][b] = d_m Gamma^c_ab
    dgamma: Ten4,
    ricci: OnceCell<DMatrix<f64>>,
    scalar: OnceCell<f64>,
}

impl PointFrame {
    pub fn new(g: &MetricField, p: &[f64]) -> Result<PointFrame, GeomError> {
        let jets = g.jets(p).map_err(GeomError::Eval)?;
        Self::from_jets(&jets, p)
    }

    /// Build a frame directly from metric component jets.
    pub fn from_jets(jets: &SymJets, p: &[f64]) -> Result<PointFrame, GeomError> {
        let n = jets.dim();
        let gmat = jets.values();
        let det = gmat.clone().determinant();
        if det.abs() < MIN_ABS_DET {
            return Err(GeomError::SingularMetric {
                point: p.to_vec(),
                det,
            });
        }
        let ginv = gmat.clone().try_inverse().ok_or(GeomError::SingularMetric {
            point: p.to_vec(),
            det,
        })?;

        let mut dg = Ten3::zeros(n);
        let mut d2g = Ten4::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let jet = jets.get(i, j);
                for k in 0..n {
                    dg.set(k, i, j, jet.d1(k));
                    for l in 0..n {
                        d2g.set(k, l, i, j, jet.d2(k, l));
                    }
                }
            }
        }

        // d_k G = -G (d_k g) G
        let dgm: Vec<DMatrix<f64>> = (0..n)
            .map(|k| DMatrix::from_fn(n, n, |i, j| dg.get(k, i, j)))
            .collect();
        let dginv_m: Vec<DMatrix<f64>> = (0..n).map(|k| -(&ginv * &dgm[k] * &ginv)).collect();
        let mut dginv = Ten3::zeros(n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    dginv.set(k, i, j, dginv_m[k][(i, j)]);
                }
            }
        }

        // d_l d_k G = G (d_l g) G (d_k g) G + G (d_k g) G (d_l g) G - G (d_l d_k g) G
        let mut d2ginv = Ten4::zeros(n);
        for k in 0..n {
            for l in 0..n {
                let d2gm = DMatrix::from_fn(n, n, |i, j| d2g.get(k, l, i, j));
                let m = &ginv * &dgm[l] * &ginv * &dgm[k] * &ginv
                    + &ginv * &dgm[k] * &ginv * &dgm[l] * &ginv
                    - &ginv * d2gm * &ginv;
                for i in 0..n {
                    for j in 0..n {
                        d2ginv.set(k, l, i, j, m[(i, j)]);
                    }
                }
            }
        }

        let mut gamma = Ten3::zeros(n);
        for c in 0..n {
            for a in 0..n {
                for b in a..n {
                    let mut s = 0.0;
                    for d in 0..n {
                        s += ginv[(c, d)]
                            * (dg.get(a, d, b) + dg.get(b, d, a) - dg.get(d, a, b));
                    }
                    gamma.set(c, a, b, 0.5 * s);
                    gamma.set(c, b, a, 0.5 * s);
                }
            }
        }

        let mut dgamma = Ten4::zeros(n);
        for m in 0..n {
            for c in 0..n {
                for a in 0..n {
                    for b in a..n {
                        let mut s = 0.0;
                        for d in 0..n {
                            s += dginv.get(m, c, d)
                                * (dg.get(a, d, b) + dg.get(b, d, a) - dg.get(d, a, b));
                            s += ginv[(c, d)]
                                * (d2g.get(m, a, d, b) + d2g.get(m, b, d, a)
                                    - d2g.get(m, d, a, b));
                        }
                        dgamma.set(m, c, a, b, 0.5 * s);
                        dgamma.set(m, c, b, a, 0.5 * s);
                    }
                }
            }
        }

        Ok(PointFrame {
            point: p.to_vec(),
            n,
            g: gmat,
            ginv,
            det,
            dg,
            d2g,
            dginv,
            d2ginv,
            gamma,
            dgamma,
            ricci: OnceCell::new(),
            scalar: OnceCell::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn inverse_metric(&self) -> &DMatrix<f64> {
        &self.ginv
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    /// sqrt(|det g|), the volume density of the chart.
    pub fn volume_density(&self) -> f64 {
        self.det.abs().sqrt()
    }

    #[inline]
    pub fn christoffel(&self, c: usize, a: usize, b: usize) -> f64 {
        self.gamma.get(c, a, b)
    }

    #[inline]
    pub fn dchristoffel(&self, m: usize, c: usize, a: usize, b: usize) -> f64 {
        self.dgamma.get(m, c, a, b)
    }

    #[inline]
    pub fn dmetric(&self, k: usize, i: usize, j: usize) -> f64 {
        self.dg.get(k, i, j)
    }

    #[inline]
    pub fn d2metric(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        self.d2g.get(k, l, i, j)
    }

    #[inline]
    pub fn dinverse(&self, k: usize, i: usize, j: usize) -> f64 {
        self.dginv.get(k, i, j)
    }

    #[inline]
    pub fn d2inverse(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        self.d2ginv.get(k, l, i, j)
    }

    /// Full curvature tensor R^l_ijk (not cached; Ricci is the hot path).
    pub fn riemann(&self) -> Ten4 {
        let n = self.n;
        let mut r = Ten4::zeros(n);
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let mut v = self.dgamma.get(i, l, j, k) - self.dgamma.get(j, l, i, k);
                        for m in 0..n {
                            v += self.gamma.get(l, i, m) * self.gamma.get(m, j, k)
                                - self.gamma.get(l, j, m) * self.gamma.get(m, i, k);
                        }
                        r.set(l, i, j, k, v);
                    }
                }
            }
        }
        r
    }

    /// Ricci tensor Ric_jk = R^i_ijk (covariant, symmetric).
    pub fn ricci(&self) -> &DMatrix<f64> {
        self.ricci.get_or_init(|| {
            let n = self.n;
            DMatrix::from_fn(n, n, |j, k| {
                let mut v = 0.0;
                for i in 0..n {
                    v += self.dgamma.get(i, i, j, k) - self.dgamma.get(j, i, i, k);
                    for m in 0..n {
                        v += self.gamma.get(i, i, m) * self.gamma.get(m, j, k)
                            - self.gamma.get(i, j, m) * self.gamma.get(m, i, k);
                    }
                }
                v
            })
        })
    }

    /// Scalar curvature R = g^{jk} Ric_jk.
    pub fn scalar_curv(&self) -> f64 {
        *self.scalar.get_or_init(|| {
            let ric = self.ricci();
            let n = self.n;
            let mut s = 0.0;
            for j in 0..n {
                for k in 0..n {
                    s += self.ginv[(j, k)] * ric[(j, k)];
                }
            }
            s
        })
    }
}

/// Hess f_ij = d_i d_j f - Gamma^k_ij d_k f.
pub fn hessian(f: &ScalarField, frame: &PointFrame) -> Result<DMatrix<f64>, GeomError> {
    let jet = f.jet(frame.point()).map_err(GeomError::Eval)?;
    Ok(hessian_from_jet(&jet, frame))
}

pub fn hessian_from_jet(jet: &Jet, frame: &PointFrame) -> DMatrix<f64> {
    let n = frame.dim();
    DMatrix::from_fn(n, n, |i, j| {
        let mut v = jet.d2(i, j);
        for k in 0..n {
            v -= frame.christoffel(k, i, j) * jet.d1(k);
        }
        v
    })
}

/// Contravariant gradient (grad f)^i = g^{ij} d_j f.
pub fn gradient(f: &ScalarField, frame: &PointFrame) -> Result<DVector<f64>, GeomError> {
    let jet = f.jet(frame.point()).map_err(GeomError::Eval)?;
    let n = frame.dim();
    Ok(DVector::from_fn(n, |i, _| {
        (0..n)
            .map(|j| frame.inverse_metric()[(i, j)] * jet.d1(j))
            .sum()
    }))
}

/// |grad f|^2 = g^{ij} d_i f d_j f; negative for timelike gradients in
/// Lorentzian signature.
pub fn grad_norm_sq(f: &ScalarField, frame: &PointFrame) -> Result<f64, GeomError> {
    let jet = f.jet(frame.point()).map_err(GeomError::Eval)?;
    Ok(grad_norm_sq_from_jet(&jet, frame))
}

pub fn grad_norm_sq_from_jet(jet: &Jet, frame: &PointFrame) -> f64 {
    let n = frame.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += frame.inverse_metric()[(i, j)] * jet.d1(i) * jet.d1(j);
        }
    }
    s
}

/// Metric trace of the Hessian (the d'Alembertian in Lorentzian signature).
pub fn laplacian(f: &ScalarField, frame: &PointFrame) -> Result<f64, GeomError> {
    let jet = f.jet(frame.point()).map_err(GeomError::Eval)?;
    Ok(laplacian_from_jet(&jet, frame))
}

pub fn laplacian_from_jet(jet: &Jet, frame: &PointFrame) -> f64 {
    trace2(&hessian_from_jet(jet, frame), frame)
}

/// <A, B> = g^{ik} g^{jl} A_ij B_kl for 2-covariant tensors.
pub fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>, frame: &PointFrame) -> f64 {
    let n = frame.dim();
    let gi = frame.inverse_metric();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    s += gi[(i, k)] * gi[(j, l)] * a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    s
}

/// Metric trace g^{ij} A_ij.
pub fn trace2(a: &DMatrix<f64>, frame: &PointFrame) -> f64 {
    let n = frame.dim();
    let gi = frame.inverse_metric();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += gi[(i, j)] * a[(i, j)];
        }
    }
    s
}

/// Largest absolute entry, the residual norm used throughout.
pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn max_abs_vec(a: &DVector<f64>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// A symmetric 2-covariant tensor with its first coordinate derivatives at
/// a point: just enough structure to take one covariant divergence.
pub struct Sym2Cov1 {
    pub t: DMatrix<f64>,
    /// dt[k][i][j] = d_k T_ij
    pub dt: Ten3,
}

impl Sym2Cov1 {
    pub fn from_field(s: &SymTensorField, p: &[f64]) -> Result<Sym2Cov1, GeomError> {
        let jets = s.jets(p).map_err(GeomError::Eval)?;
        Ok(Self::from_jets(&jets))
    }

    pub fn from_jets(jets: &SymJets) -> Sym2Cov1 {
        let n = jets.dim();
        let t = jets.values();
        let mut dt = Ten3::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    dt.set(k, i, j, jets.get(i, j).d1(k));
                }
            }
        }
        Sym2Cov1 { t, dt }
    }

    /// T = g; the divergence of this must vanish (metric compatibility).
    pub fn metric(frame: &PointFrame) -> Sym2Cov1 {
        let n = frame.dim();
        let mut dt = Ten3::zeros(n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    dt.set(k, i, j, frame.dmetric(k, i, j));
                }
            }
        }
        Sym2Cov1 {
            t: frame.metric().clone(),
            dt,
        }
    }

    /// T = df (x) df from the jet of f.
    pub fn df_outer(jet: &Jet, frame: &PointFrame) -> Sym2Cov1 {
        let n = frame.dim();
        let t = DMatrix::from_fn(n, n, |i, j| jet.d1(i) * jet.d1(j));
        let mut dt = Ten3::zeros(n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    dt.set(k, i, j, jet.d2(k, i) * jet.d1(j) + jet.d1(i) * jet.d2(k, j));
                }
            }
        }
        Sym2Cov1 { t, dt }
    }

    /// T = df (x) df - (|grad f|^2 / 2) g.
    pub fn stress(jet: &Jet, frame: &PointFrame) -> Sym2Cov1 {
        let n = frame.dim();
        let outer = Sym2Cov1::df_outer(jet, frame);
        let w = grad_norm_sq_from_jet(jet, frame);
        // dw[k] = d_k (g^{ab} f_a f_b)
        let gi = frame.inverse_metric();
        let mut dw = vec![0.0; n];
        for k in 0..n {
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    s += frame.dinverse(k, a, b) * jet.d1(a) * jet.d1(b)
                        + 2.0 * gi[(a, b)] * jet.d2(a, k) * jet.d1(b);
                }
            }
            dw[k] = s;
        }
        let g = frame.metric();
        let t = DMatrix::from_fn(n, n, |i, j| outer.t[(i, j)] - 0.5 * w * g[(i, j)]);
        let mut dt = Ten3::zeros(n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    dt.set(
                        k,
                        i,
                        j,
                        outer.dt.get(k, i, j)
                            - 0.5 * (dw[k] * g[(i, j)] + w * frame.dmetric(k, i, j)),
                    );
                }
            }
        }
        Sym2Cov1 { t, dt }
    }
}

/// div(T)_k = g^{ij} (nabla_i T)_{jk} for a symmetric 2-covariant tensor.
pub fn div_sym2(t: &Sym2Cov1, frame: &PointFrame) -> DVector<f64> {
    let n = frame.dim();
    let gi = frame.inverse_metric();
    DVector::from_fn(n, |k, _| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut cov = t.dt.get(i, j, k);
                for m in 0..n {
                    cov -= frame.christoffel(m, i, j) * t.t[(m, k)]
                        + frame.christoffel(m, i, k) * t.t[(j, m)];
                }
                s += gi[(i, j)] * cov;
            }
        }
        s
    })
}

/// Covariant divergence of a contravariant vector with known partials:
/// div X = d_k X^k + Gamma^k_km X^m.
pub fn div_vector(x: &DVector<f64>, dx: &DMatrix<f64>, frame: &PointFrame) -> f64 {
    let n = frame.dim();
    let mut s = 0.0;
    for k in 0..n {
        s += dx[(k, k)];
        for m in 0..n {
            s += frame.christoffel(k, k, m) * x[m];
        }
    }
    s
}

// ---------------------------------------------------------------------------
// torsion-free affine connections
// ---------------------------------------------------------------------------

/// A torsion-free affine connection. Either explicit coefficient
/// expressions, or the projective deformation of a metric's Levi-Civita
/// connection by a 1-form: nabla_X Y - alpha(X) Y - alpha(Y) X.
pub enum AffineConn {
    Explicit {
        n: usize,
        /// coeffs[k][(i,j) upper-triangular]: Gamma^k_ij, symmetric (i,j)
        coeffs: Vec<Expr>,
    },
    Projective {
        metric: MetricField,
        alpha: Vec<Expr>,
    },
}

impl AffineConn {
    pub fn explicit(n: usize, coeffs: Vec<Expr>) -> Result<AffineConn, GeomError> {
        let expect = n * crate::jet::len2(n);
        if coeffs.len() != expect {
            return Err(GeomError::Invalid(format!(
                "expected {expect} coefficient expressions, got {}",
                coeffs.len()
            )));
        }
        Ok(AffineConn::Explicit { n, coeffs })
    }

    pub fn dim(&self) -> usize {
        match self {
            AffineConn::Explicit { n, .. } => *n,
            AffineConn::Projective { metric, .. } => metric.dim(),
        }
    }

    /// Coefficient values and first partials at a point.
    pub fn coefficients_at(&self, p: &[f64]) -> Result<(Ten3, Ten4), GeomError> {
        match self {
            AffineConn::Explicit { n, coeffs } => {
                let n = *n;
                let l2 = crate::jet::len2(n);
                let mut c = Ten3::zeros(n);
                let mut dc = Ten4::zeros(n);
                for k in 0..n {
                    for i in 0..n {
                        for j in i..n {
                            let e = &coeffs[k * l2 + crate::jet::idx2(n, i, j)];
                            let jet = e.eval_jet(p).map_err(GeomError::Eval)?;
                            c.set(k, i, j, jet.value);
                            c.set(k, j, i, jet.value);
                            for m in 0..n {
                                dc.set(m, k, i, j, jet.d1(m));
                                dc.set(m, k, j, i, jet.d1(m));
                            }
                        }
                    }
                }
                Ok((c, dc))
            }
            AffineConn::Projective { metric, alpha } => {
                let frame = PointFrame::new(metric, p)?;
                let n = frame.dim();
                let a_jets = alpha
                    .iter()
                    .map(|e| e.eval_jet(p))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(GeomError::Eval)?;
                let mut c = Ten3::zeros(n);
                let mut dc = Ten4::zeros(n);
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            let mut v = frame.christoffel(k, i, j);
                            if k == j {
                                v -= a_jets[i].value;
                            }
                            if k == i {
                                v -= a_jets[j].value;
                            }
                            c.set(k, i, j, v);
                            for m in 0..n {
                                let mut dv = frame.dchristoffel(m, k, i, j);
                                if k == j {
                                    dv -= a_jets[i].d1(m);
                                }
                                if k == i {
                                    dv -= a_jets[j].d1(m);
                                }
                                dc.set(m, k, i, j, dv);
                            }
                        }
                    }
                }
                Ok((c, dc))
            }
        }
    }
}

/// The projectively equivalent connection of (g, alpha):
/// coefficients Gamma^k_ij(g) - alpha_i delta^k_j - alpha_j delta^k_i.
pub fn projective_conn(g: &MetricField, alpha: Vec<Expr>) -> Result<AffineConn, GeomError> {
    let n = g.dim();
    if alpha.len() != n {
        return Err(GeomError::Invalid(format!(
            "covector needs {n} components, got {}",
            alpha.len()
        )));
    }
    for e in &alpha {
        for v in e.vars() {
            if v >= n {
                return Err(GeomError::Invalid(
                    "covector component uses a variable outside the chart".into(),
                ));
            }
        }
    }
    Ok(AffineConn::Projective {
        metric: g.clone(),
        alpha,
    })
}

/// Ricci tensor of a torsion-free affine connection (no metric assumed;
/// the result need not be symmetric).
pub fn affine_ricci(conn: &AffineConn, p: &[f64]) -> Result<DMatrix<f64>, GeomError> {
    let n = conn.dim();
    let (c, dc) = conn.coefficients_at(p)?;
    Ok(DMatrix::from_fn(n, n, |j, k| {
        let mut v = 0.0;
        for i in 0..n {
            v += dc.get(i, i, j, k) - dc.get(j, i, i, k);
            for m in 0..n {
                v += c.get(i, i, m) * c.get(m, j, k) - c.get(i, j, m) * c.get(m, i, k);
            }
        }
        v
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{Axis, Chart};
    use approx::assert_abs_diff_eq;

    fn open_chart(names: &[&str]) -> Chart {
        Chart::named(
            names,
            names.iter().map(|_| Axis::open(-10.0, 10.0)).collect(),
        )
        .unwrap()
    }

    fn polar_chart() -> (MetricField, Chart) {
        let chart = Chart::named(
            &["r", "th"],
            vec![Axis::open(0.1, 10.0), Axis::periodic(0.0, std::f64::consts::TAU)],
        )
        .unwrap();
        let g = MetricField::diagonal(
            chart.clone(),
            vec![Expr::Const(1.0), chart.parse_expr("r^2").unwrap()],
        )
        .unwrap();
        (g, chart)
    }

    fn sphere_chart() -> MetricField {
        let chart = Chart::named(
            &["th", "ph"],
            vec![
                Axis::open(0.05, std::f64::consts::PI - 0.05),
                Axis::periodic(0.0, std::f64::consts::TAU),
            ],
        )
        .unwrap();
        MetricField::diagonal(
            chart.clone(),
            vec![Expr::Const(1.0), chart.parse_expr("sin(th)^2").unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn flat_metric_has_zero_curvature() {
        let g = MetricField::euclidean(open_chart(&["x", "y", "z"]));
        let frame = PointFrame::new(&g, &[0.3, -0.4, 2.0]).unwrap();
        for c in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    assert_eq!(frame.christoffel(c, a, b), 0.0);
                }
            }
        }
        assert_eq!(max_abs(frame.ricci()), 0.0);
        assert_eq!(frame.scalar_curv(), 0.0);
    }

    #[test]
    fn polar_christoffels() {
        let (g, _) = polar_chart();
        let r = 1.7;
        let frame = PointFrame::new(&g, &[r, 0.9]).unwrap();
        assert_abs_diff_eq!(frame.christoffel(0, 1, 1), -r, epsilon = 1e-12);
        assert_abs_diff_eq!(frame.christoffel(1, 0, 1), 1.0 / r, epsilon = 1e-12);
        assert_abs_diff_eq!(frame.christoffel(1, 1, 0), 1.0 / r, epsilon = 1e-12);
        // flat in disguise
        assert_abs_diff_eq!(max_abs(frame.ricci()), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn unit_sphere_is_einstein_with_r_2() {
        let g = sphere_chart();
        for p in [[1.0, 0.3], [2.0, 4.0], [0.7, 1.2]] {
            let frame = PointFrame::new(&g, &p).unwrap();
            let ric = frame.ricci();
            let diff = ric - frame.metric();
            assert!(max_abs(&diff) < 1e-9, "Ric != g at {p:?}");
            assert_abs_diff_eq!(frame.scalar_curv(), 2.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn ricci_is_symmetric_and_inverse_is_tight() {
        let chart = open_chart(&["x", "y", "z"]);
        let g = MetricField::new(
            chart.clone(),
            vec![
                (0, 0, chart.parse_expr("1 + 0.2*sin(x)*cos(y)").unwrap()),
                (1, 1, chart.parse_expr("1 + 0.1*exp(0.1*z)").unwrap()),
                (2, 2, chart.parse_expr("1 + 0.15*cos(x)").unwrap()),
                (0, 1, chart.parse_expr("0.05*sin(z)").unwrap()),
                (1, 2, chart.parse_expr("0.07*cos(x)").unwrap()),
            ],
        )
        .unwrap();
        let frame = PointFrame::new(&g, &[0.4, -0.7, 1.1]).unwrap();
        let ric = frame.ricci();
        let asym = ric - ric.transpose();
        assert!(max_abs(&asym) < 1e-12);
        let id = frame.metric() * frame.inverse_metric();
        let eye = DMatrix::<f64>::identity(3, 3);
        assert!(max_abs(&(id - eye)) < 1e-12);
    }

    #[test]
    fn hessian_gradient_laplacian_flat() {
        let chart = open_chart(&["x", "y"]);
        let f = ScalarField::new(chart.clone(), chart.parse_expr("x^2 + y^2").unwrap()).unwrap();
        let g = MetricField::euclidean(chart);
        let frame = PointFrame::new(&g, &[1.2, -0.3]).unwrap();
        let h = hessian(&f, &frame).unwrap();
        assert_abs_diff_eq!(h[(0, 0)], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(h[(1, 1)], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(h[(0, 1)], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(laplacian(&f, &frame).unwrap(), 4.0, epsilon = 1e-14);
        let w = grad_norm_sq(&f, &frame).unwrap();
        assert_abs_diff_eq!(w, 4.0 * (1.2f64.powi(2) + 0.3f64.powi(2)), epsilon = 1e-13);
        // harmonic check: sin(x) sinh(y)
        let chart = f.chart().clone();
        let fh = ScalarField::new(chart, f.chart().parse_expr("sin(x)*sinh(y)").unwrap()).unwrap();
        assert_abs_diff_eq!(laplacian(&fh, &frame).unwrap(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn constant_scalar_is_inert() {
        let chart = open_chart(&["x", "y"]);
        let f = ScalarField::new(chart.clone(), Expr::Const(3.5)).unwrap();
        let g = MetricField::euclidean(chart);
        let frame = PointFrame::new(&g, &[0.1, 0.2]).unwrap();
        assert_eq!(max_abs(&hessian(&f, &frame).unwrap()), 0.0);
        assert_eq!(grad_norm_sq(&f, &frame).unwrap(), 0.0);
        assert_eq!(laplacian(&f, &frame).unwrap(), 0.0);
    }

    #[test]
    fn metric_is_divergence_free() {
        let chart = open_chart(&["x", "y"]);
        let g = MetricField::new(
            chart.clone(),
            vec![
                (0, 0, chart.parse_expr("1 + 0.3*sin(x+y)").unwrap()),
                (1, 1, chart.parse_expr("2 + 0.2*cos(x)").unwrap()),
                (0, 1, chart.parse_expr("0.1*sin(y)").unwrap()),
            ],
        )
        .unwrap();
        let frame = PointFrame::new(&g, &[0.5, 1.3]).unwrap();
        let div = div_sym2(&Sym2Cov1::metric(&frame), &frame);
        assert!(max_abs_vec(&div) < 1e-10, "div g = {div:?}");
    }

    #[test]
    fn div_df_outer_on_circle() {
        // flat 2-torus with f = sin(x): div(df (x) df)_x = -sin(2x), no y-dependence
        let chart = Chart::named(
            &["x", "y"],
            vec![
                Axis::periodic(0.0, std::f64::consts::TAU),
                Axis::periodic(0.0, std::f64::consts::TAU),
            ],
        )
        .unwrap();
        let g = MetricField::euclidean(chart.clone());
        let f = ScalarField::new(chart.clone(), chart.parse_expr("sin(x)").unwrap()).unwrap();
        let x = std::f64::consts::FRAC_PI_4;
        let frame = PointFrame::new(&g, &[x, 0.7]).unwrap();
        let jet = f.jet(frame.point()).unwrap();
        let div = div_sym2(&Sym2Cov1::df_outer(&jet, &frame), &frame);
        assert_abs_diff_eq!(div[0], -(2.0 * x).sin(), epsilon = 1e-13);
        assert_abs_diff_eq!(div[0], -1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(div[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn inner_and_trace_identities() {
        let chart = open_chart(&["x", "y", "z", "w"]);
        let g = MetricField::minkowski(chart);
        let frame = PointFrame::new(&g, &[0.0; 4]).unwrap();
        // <g, g> = n for any metric
        assert_abs_diff_eq!(inner(frame.metric(), frame.metric(), &frame), 4.0, epsilon = 1e-14);
        // <g, s> with s = 2g, n = 4 -> 8
        let s = frame.metric() * 2.0;
        assert_abs_diff_eq!(inner(frame.metric(), &s, &frame), 8.0, epsilon = 1e-14);
        assert_abs_diff_eq!(trace2(&s, &frame), 8.0, epsilon = 1e-14);
        // Lorentzian squares cancel: <dt (x) dt, dt (x) dt> = (g^tt)^2 = 1
        let n = 4;
        let mut dt2 = DMatrix::zeros(n, n);
        dt2[(n - 1, n - 1)] = 1.0;
        assert_abs_diff_eq!(inner(&dt2, &dt2, &frame), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn first_bianchi_identity_random_metric() {
        let chart = open_chart(&["x", "y", "z"]);
        let g = MetricField::new(
            chart.clone(),
            vec![
                (0, 0, chart.parse_expr("1 + 0.2*sin(x)*cos(z)").unwrap()),
                (1, 1, chart.parse_expr("1 + 0.25*cos(y)").unwrap()),
                (2, 2, chart.parse_expr("1 + 0.1*sin(x+y)").unwrap()),
                (0, 1, chart.parse_expr("0.08*cos(z)").unwrap()),
                (0, 2, chart.parse_expr("0.06*sin(y)").unwrap()),
            ],
        )
        .unwrap();
        for p in [[0.2, 0.4, -0.6], [1.0, -1.0, 0.5]] {
            let frame = PointFrame::new(&g, &p).unwrap();
            let r = frame.riemann();
            let n = 3;
            for l in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            let cyc = r.get(l, i, j, k) + r.get(l, j, k, i) + r.get(l, k, i, j);
                            assert!(cyc.abs() < 1e-9, "Bianchi violated: {cyc}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn affine_ricci_matches_levi_civita() {
        let (g, chart) = polar_chart();
        // feed the Levi-Civita coefficients through the projective path with
        // alpha = 0; must reproduce the metric Ricci tensor
        let conn = projective_conn(&g, vec![Expr::Const(0.0), Expr::Const(0.0)]).unwrap();
        let p = [1.3, 0.4];
        let ric_conn = affine_ricci(&conn, &p).unwrap();
        let frame = PointFrame::new(&g, &p).unwrap();
        let diff = &ric_conn - frame.ricci();
        assert!(max_abs(&diff) < 1e-10);
        drop(chart);
    }

    #[test]
    fn projective_connection_flat_alpha_dx() {
        // flat R^2, alpha = dx: Gamma^x_xx = -2, Gamma^y_xy = -1, Ric = dx (x) dx
        let chart = open_chart(&["x", "y"]);
        let g = MetricField::euclidean(chart);
        let conn = projective_conn(&g, vec![Expr::Const(1.0), Expr::Const(0.0)]).unwrap();
        let p = [0.3, -0.8];
        let (c, _) = conn.coefficients_at(&p).unwrap();
        assert_eq!(c.get(0, 0, 0), -2.0);
        assert_eq!(c.get(1, 0, 1), -1.0);
        assert_eq!(c.get(1, 1, 0), -1.0);
        assert_eq!(c.get(0, 1, 1), 0.0);
        let ric = affine_ricci(&conn, &p).unwrap();
        assert_abs_diff_eq!(ric[(0, 0)], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ric[(0, 1)], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ric[(1, 0)], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ric[(1, 1)], 0.0, epsilon = 1e-14);
    }
}
