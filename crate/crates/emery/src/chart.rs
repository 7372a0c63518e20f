//! Coordinate charts and the fields living on them: metrics, scalars,
//! symmetric 2-tensors, and uniform sample grids for quadrature.

use crate::error::{EvalError, GeomError, ParseError};
use crate::expr::{parse, Expr};
use crate::jet::{idx2, len2, Jet};
use nalgebra::DMatrix;

/// Threshold below which |det g| is treated as numerically singular.
pub const MIN_ABS_DET: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

impl Axis {
    pub fn open(lo: f64, hi: f64) -> Axis {
        Axis {
            lo,
            hi,
            periodic: false,
        }
    }

    pub fn periodic(lo: f64, hi: f64) -> Axis {
        Axis {
            lo,
            hi,
            periodic: true,
        }
    }

    pub fn span(&self) -> f64 {
        self.hi - self.lo
    }
}

/// A single coordinate chart: names plus a per-coordinate interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    coords: Vec<String>,
    axes: Vec<Axis>,
}

impl Chart {
    pub fn new(coords: Vec<String>, axes: Vec<Axis>) -> Result<Chart, GeomError> {
        if coords.len() < 2 {
            return Err(GeomError::DimensionTooSmall {
                required: 2,
                actual: coords.len(),
            });
        }
        if coords.len() != axes.len() {
            return Err(GeomError::Invalid(format!(
                "{} coordinates but {} axes",
                coords.len(),
                axes.len()
            )));
        }
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(GeomError::Invalid(format!("duplicate coordinate `{c}`")));
            }
        }
        for (c, a) in coords.iter().zip(&axes) {
            if !(a.lo < a.hi) {
                return Err(GeomError::Invalid(format!(
                    "axis `{c}` has empty range [{}, {}]",
                    a.lo, a.hi
                )));
            }
        }
        Ok(Chart { coords, axes })
    }

    /// Convenience constructor with open unit-ish boxes.
    pub fn named(coords: &[&str], axes: Vec<Axis>) -> Result<Chart, GeomError> {
        Chart::new(coords.iter().map(|s| s.to_string()).collect(), axes)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coord_names(&self) -> Vec<&str> {
        self.coords.iter().map(|s| s.as_str()).collect()
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes[i]
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn fully_periodic(&self) -> bool {
        self.axes.iter().all(|a| a.periodic)
    }

    /// Parse an expression against this chart's coordinates.
    pub fn parse_expr(&self, text: &str) -> Result<Expr, ParseError> {
        let names = self.coord_names();
        parse(text, &names)
    }

    /// Coordinate-box volume (before any metric factor).
    pub fn volume(&self) -> f64 {
        self.axes.iter().map(|a| a.span()).product()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter().zip(&self.axes).all(|(x, a)| {
                // periodic coordinates wrap, any real value is admissible
                a.periodic || (*x >= a.lo && *x <= a.hi)
            })
    }
}

/// Symmetric matrix of expressions stored upper-triangular, so the (i,j)
/// and (j,i) components are one object.
#[derive(Debug, Clone)]
pub struct MetricField {
    chart: Chart,
    comps: Vec<Expr>,
}

/// Jets of all metric components at one point, shared across (i,j)/(j,i).
pub struct SymJets {
    n: usize,
    comps: Vec<Jet>,
}

impl SymJets {
    pub fn get(&self, i: usize, j: usize) -> &Jet {
        &self.comps[idx2(self.n, i, j)]
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).value)
    }
}

fn sym_storage(
    chart: &Chart,
    components: Vec<(usize, usize, Expr)>,
    what: &str,
) -> Result<Vec<Expr>, GeomError> {
    let n = chart.dim();
    let mut comps: Vec<Option<Expr>> = vec![None; len2(n)];
    for (i, j, e) in components {
        if i >= n || j >= n {
            return Err(GeomError::Invalid(format!(
                "{what} component ({i},{j}) out of range for dimension {n}"
            )));
        }
        for v in e.vars() {
            if v >= n {
                return Err(GeomError::Invalid(format!(
                    "{what} component ({i},{j}) uses variable index {v} outside the chart"
                )));
            }
        }
        let slot = &mut comps[idx2(n, i, j)];
        if slot.is_some() {
            return Err(GeomError::Invalid(format!(
                "{what} component ({i},{j}) specified twice"
            )));
        }
        *slot = Some(e);
    }
    Ok(comps
        .into_iter()
        .map(|c| c.unwrap_or(Expr::Const(0.0)))
        .collect())
}

impl MetricField {
    /// Build from explicit components; unspecified components default to 0.
    pub fn new(chart: Chart, components: Vec<(usize, usize, Expr)>) -> Result<MetricField, GeomError> {
        let comps = sym_storage(&chart, components, "metric")?;
        Ok(MetricField { chart, comps })
    }

    pub fn diagonal(chart: Chart, diag: Vec<Expr>) -> Result<MetricField, GeomError> {
        assert_eq!(diag.len(), chart.dim());
        let components = diag
            .into_iter()
            .enumerate()
            .map(|(i, e)| (i, i, e))
            .collect();
        MetricField::new(chart, components)
    }

    /// Euclidean metric on the chart.
    pub fn euclidean(chart: Chart) -> MetricField {
        let n = chart.dim();
        MetricField::diagonal(chart, vec![Expr::Const(1.0); n]).unwrap()
    }

    /// diag(1, ..., 1, -1): flat metric of signature (n-1, 1).
    pub fn minkowski(chart: Chart) -> MetricField {
        let n = chart.dim();
        let mut diag = vec![Expr::Const(1.0); n];
        diag[n - 1] = Expr::Const(-1.0);
        MetricField::diagonal(chart, diag).unwrap()
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.comps[idx2(self.chart.dim(), i, j)]
    }

    /// Per-component jets at a point; (i,j) and (j,i) resolve to the same jet.
    pub fn jets(&self, p: &[f64]) -> Result<SymJets, EvalError> {
        let comps = self
            .comps
            .iter()
            .map(|e| e.eval_jet(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SymJets {
            n: self.chart.dim(),
            comps,
        })
    }

    pub fn values(&self, p: &[f64]) -> Result<DMatrix<f64>, EvalError> {
        let n = self.chart.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.component(i, j).eval(p)?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }

    /// Map every component through `f` (used to build g + t*s).
    pub fn map_components(&self, f: impl Fn(usize, usize, &Expr) -> Expr) -> MetricField {
        let n = self.chart.dim();
        let mut comps = Vec::with_capacity(self.comps.len());
        for i in 0..n {
            for j in i..n {
                comps.push(f(i, j, self.component(i, j)));
            }
        }
        MetricField {
            chart: self.chart.clone(),
            comps,
        }
    }
}

/// Scalar field over a chart.
#[derive(Debug, Clone)]
pub struct ScalarField {
    chart: Chart,
    expr: Expr,
}

impl ScalarField {
    pub fn new(chart: Chart, expr: Expr) -> Result<ScalarField, GeomError> {
        let n = chart.dim();
        for v in expr.vars() {
            if v >= n {
                return Err(GeomError::Invalid(format!(
                    "scalar field uses variable index {v} outside the chart"
                )));
            }
        }
        Ok(ScalarField { chart, expr })
    }

    pub fn zero(chart: Chart) -> ScalarField {
        ScalarField {
            chart,
            expr: Expr::Const(0.0),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn eval(&self, p: &[f64]) -> Result<f64, EvalError> {
        self.expr.eval(p)
    }

    pub fn jet(&self, p: &[f64]) -> Result<Jet, EvalError> {
        self.expr.eval_jet(p)
    }
}

/// Symmetric 2-covariant tensor field (perturbation direction s).
#[derive(Debug, Clone)]
pub struct SymTensorField {
    chart: Chart,
    comps: Vec<Expr>,
}

impl SymTensorField {
    pub fn new(
        chart: Chart,
        components: Vec<(usize, usize, Expr)>,
    ) -> Result<SymTensorField, GeomError> {
        let comps = sym_storage(&chart, components, "tensor")?;
        Ok(SymTensorField { chart, comps })
    }

    pub fn zero(chart: Chart) -> SymTensorField {
        SymTensorField::new(chart, vec![]).unwrap()
    }

    /// s = g, sharing the metric's component expressions.
    pub fn from_metric(g: &MetricField) -> SymTensorField {
        SymTensorField {
            chart: g.chart.clone(),
            comps: g.comps.clone(),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.comps[idx2(self.chart.dim(), i, j)]
    }

    pub fn jets(&self, p: &[f64]) -> Result<SymJets, EvalError> {
        let comps = self
            .comps
            .iter()
            .map(|e| e.eval_jet(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SymJets {
            n: self.chart.dim(),
            comps,
        })
    }

    pub fn values(&self, p: &[f64]) -> Result<DMatrix<f64>, EvalError> {
        let n = self.chart.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.component(i, j).eval(p)?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }
}

/// Uniform product-rule sample grid. Periodic axes place nodes at
/// lo + k*span/m, k = 0..m (endpoint excluded); open axes use midpoints.
/// Every point carries the same weight volume/len, and integration scales
/// the mean by the box volume so that the integral of 1 is exact.
#[derive(Debug, Clone)]
pub struct SampleGrid {
    chart: Chart,
    nodes: Vec<usize>,
    axis_nodes: Vec<Vec<f64>>,
}

impl SampleGrid {
    pub fn new(chart: Chart, nodes: Vec<usize>) -> Result<SampleGrid, GeomError> {
        if nodes.len() != chart.dim() {
            return Err(GeomError::Invalid(format!(
                "{} node counts for dimension {}",
                nodes.len(),
                chart.dim()
            )));
        }
        if nodes.iter().any(|&m| m == 0) {
            return Err(GeomError::Invalid("grid with zero nodes on an axis".into()));
        }
        let axis_nodes = chart
            .axes()
            .iter()
            .zip(&nodes)
            .map(|(a, &m)| {
                let h = a.span() / m as f64;
                (0..m)
                    .map(|k| {
                        if a.periodic {
                            a.lo + k as f64 * h
                        } else {
                            a.lo + (k as f64 + 0.5) * h
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(SampleGrid {
            chart,
            nodes,
            axis_nodes,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn node_counts(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight of each point (uniform product rule).
    pub fn weight(&self) -> f64 {
        self.chart.volume() / self.len() as f64
    }

    pub fn point(&self, mut flat: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.chart.dim()];
        for ax in (0..self.chart.dim()).rev() {
            let m = self.nodes[ax];
            p[ax] = self.axis_nodes[ax][flat % m];
            flat /= m;
        }
        p
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Quadrature of `f` over the coordinate box (no metric factor).
    pub fn integrate(
        &self,
        mut f: impl FnMut(&[f64]) -> Result<f64, GeomError>,
    ) -> Result<f64, GeomError> {
        let mut sum = 0.0;
        let mut p = vec![0.0; self.chart.dim()];
        for flat in 0..self.len() {
            let mut rest = flat;
            for ax in (0..self.chart.dim()).rev() {
                let m = self.nodes[ax];
                p[ax] = self.axis_nodes[ax][rest % m];
                rest /= m;
            }
            sum += f(&p)?;
        }
        Ok(sum / self.len() as f64 * self.chart.volume())
    }
}

/// Check nondegeneracy of `g` on a point set and return the common
/// signature as (positive, negative) eigenvalue counts.
pub fn check_nondegenerate(
    g: &MetricField,
    pts: &[Vec<f64>],
) -> Result<(usize, usize), GeomError> {
    assert!(!pts.is_empty(), "empty point list");
    let mut sig: Option<((usize, usize), Vec<f64>)> = None;
    for p in pts {
        let m = g.values(p).map_err(GeomError::Eval)?;
        let det = m.determinant();
        if det.abs() < MIN_ABS_DET {
            return Err(GeomError::SingularMetric {
                point: p.clone(),
                det,
            });
        }
        let eig = m.symmetric_eigen();
        let pos = eig.eigenvalues.iter().filter(|&&e| e > 0.0).count();
        let neg = eig.eigenvalues.iter().filter(|&&e| e < 0.0).count();
        match &sig {
            None => sig = Some(((pos, neg), p.clone())),
            Some((s, first_point)) => {
                if *s != (pos, neg) {
                    return Err(GeomError::SignatureChange {
                        first: *s,
                        first_point: first_point.clone(),
                        second: (pos, neg),
                        second_point: p.clone(),
                    });
                }
            }
        }
    }
    Ok(sig.unwrap().0)
}
